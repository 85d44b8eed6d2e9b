#include "hitstat/word.hpp"

#include <charconv>

#include "hitstat/error.hpp"

namespace hitstat {

Word Word::parse(std::string_view text) {
  if (text.empty()) throw Error(ErrorCode::EmptyWord, "word text is empty");
  std::vector<Symbol> out;
  if (text.find(',') == std::string_view::npos) {
    for (char c : text) {
      if (c < '0' || c > '9') {
        throw Error(ErrorCode::InvalidSymbol, "non-digit character in word '" + std::string(text) + "'");
      }
      out.push_back(static_cast<Symbol>(c - '0'));
    }
  } else {
    std::size_t pos = 0;
    while (pos <= text.size()) {
      auto next = text.find(',', pos);
      if (next == std::string_view::npos) next = text.size();
      auto piece = text.substr(pos, next - pos);
      Symbol value = 0;
      auto [ptr, ec] = std::from_chars(piece.data(), piece.data() + piece.size(), value);
      if (ec != std::errc() || ptr != piece.data() + piece.size() || piece.empty()) {
        throw Error(ErrorCode::InvalidSymbol, "bad symbol '" + std::string(piece) + "'");
      }
      out.push_back(value);
      pos = next + 1;
    }
  }
  return Word(std::move(out));
}

std::string Word::to_string() const {
  bool digits = true;
  for (Symbol s : symbols_) digits = digits && s < 10;
  std::string out;
  for (std::size_t i = 0; i < symbols_.size(); ++i) {
    if (digits) {
      out.push_back(static_cast<char>('0' + symbols_[i]));
    } else {
      if (i) out.push_back(',');
      out += std::to_string(symbols_[i]);
    }
  }
  return out;
}

}  // namespace hitstat
