#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "hitstat/error.hpp"
#include "hitstat/exact.hpp"
#include "hitstat/experiment.hpp"
#include "hitstat/model_io.hpp"
#include "hitstat/monte_carlo.hpp"
#include "hitstat/stream_estimator.hpp"

namespace py = pybind11;
using namespace hitstat;

namespace {

Word as_word(const py::handle& w) {
  if (py::isinstance<py::str>(w)) return Word::parse(w.cast<std::string>());
  return Word(w.cast<std::vector<Symbol>>());
}

py::dict summary_dict(const Summary& s) {
  py::dict d;
  d["count"] = s.count;
  d["mean"] = s.mean;
  d["stddev"] = s.stddev;
  d["median"] = s.median;
  d["q05"] = s.q05;
  d["q25"] = s.q25;
  d["q75"] = s.q75;
  d["q95"] = s.q95;
  return d;
}

py::dict samples_dict(const ExponentSamples& s) {
  py::dict d;
  d["n"] = s.n();
  d["target"] = s.target_constant();
  d["values"] = s.values();
  d["censored"] = s.censored_count();
  d["summary"] = summary_dict(s.summary());
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Entrance times, return times and Renyi entropy for Bernoulli and Markov shifts";
  m.attr("__version__") = HITSTAT_VERSION;

  py::register_exception<Error>(m, "HitstatError", PyExc_ValueError);

  py::class_<MeasureModel>(m, "Model")
      .def_static("bernoulli", &MeasureModel::bernoulli, py::arg("p"))
      .def_static("markov", &MeasureModel::markov, py::arg("P"), py::arg("pi") = std::nullopt)
      .def_static("geometric", &MeasureModel::geometric, py::arg("theta"))
      .def_static("from_json", [](const std::string& text) { return model_from_json(nlohmann::json::parse(text)); })
      .def_property_readonly("alphabet_size", &MeasureModel::alphabet_size)
      .def("describe", &MeasureModel::describe)
      .def("__repr__", [](const MeasureModel& mm) { return "Model(" + mm.describe() + ")"; });

  m.def("builtin_models", [] {
    py::dict d;
    for (auto& [name, model] : builtin_models()) d[py::str(name)] = model;
    return d;
  });

  m.def("cylinder_measure", [](const MeasureModel& mm, const py::object& w) {
    return log_cylinder_measure(mm, as_word(w)).probability();
  });
  m.def("log_cylinder_measure", [](const MeasureModel& mm, const py::object& w) {
    return log_cylinder_measure(mm, as_word(w)).value;
  });
  m.def("shannon_entropy", &shannon_entropy);
  m.def("renyi_entropy", [](const MeasureModel& mm, double s) { return renyi_entropy(mm, s); }, py::arg("model"),
        py::arg("s"));
  m.def("log_partition_sum", [](const MeasureModel& mm, std::size_t n, double s) {
    return partition_sum_exact(mm, n, s);
  });

  m.def(
      "exact_survival",
      [](const MeasureModel& mm, const py::object& w, std::uint64_t m_max, bool return_law) {
        const auto chain = ProductChain::build(mm, as_word(w), return_law ? Conditioning::Return : Conditioning::Entrance);
        return exact_survival(chain, m_max).survival;
      },
      py::arg("model"), py::arg("word"), py::arg("m_max"), py::arg("return_law") = false);
  m.def(
      "exact_mean_return",
      [](const MeasureModel& mm, const py::object& w, double rel_tol) { return exact_mean_return(mm, as_word(w), rel_tol); },
      py::arg("model"), py::arg("word"), py::arg("rel_tol") = 1e-12);
  m.def("integral_identity_residual", [](const MeasureModel& mm, const py::object& w, std::uint64_t m_max) {
    return integral_identity_residual(mm, as_word(w), m_max).max_residual;
  });

  m.def(
      "entrance_exponents",
      [](const MeasureModel& mm, std::size_t n, std::size_t count, std::uint64_t seed, unsigned workers) {
        SamplerOptions o;
        o.workers = workers;
        const auto s = [&] {
          py::gil_scoped_release release;
          return entrance_exponent_samples(mm, n, count, seed, o);
        }();
        return samples_dict(s);
      },
      py::arg("model"), py::arg("n"), py::arg("count"), py::arg("seed"), py::arg("workers") = 1);
  m.def(
      "recurrence_exponents",
      [](const MeasureModel& mm, std::size_t n, std::size_t count, std::uint64_t seed, unsigned workers) {
        SamplerOptions o;
        o.workers = workers;
        const auto s = [&] {
          py::gil_scoped_release release;
          return recurrence_exponent_samples(mm, n, count, seed, o);
        }();
        return samples_dict(s);
      },
      py::arg("model"), py::arg("n"), py::arg("count"), py::arg("seed"), py::arg("workers") = 1);
  m.def(
      "survival_ks",
      [](const MeasureModel& mm, const py::object& w, std::size_t count, std::vector<double> grid, std::uint64_t seed) {
        return empirical_survival(mm, as_word(w), count, grid, seed).ks.statistic;
      },
      py::arg("model"), py::arg("word"), py::arg("count"), py::arg("t_grid"), py::arg("seed"));
  m.def("random_word", [](const MeasureModel& mm, std::uint64_t seed, std::size_t length) {
    return random_word(mm, seed, length).to_string();
  });

  m.def(
      "ow_entropy",
      [](const std::vector<Symbol>& seq, std::vector<std::size_t> ns, std::size_t starts, std::uint64_t seed) {
        std::vector<double> out;
        for (const auto& r : ow_entropy_estimate(seq, ns, starts, seed).rows) out.push_back(r.estimate_nats);
        return out;
      },
      py::arg("sequence"), py::arg("n_list"), py::arg("starts_per_n") = 1000, py::arg("seed") = 0);
  m.def(
      "plugin_renyi",
      [](const std::vector<Symbol>& seq, std::size_t n, double s) { return plugin_renyi_estimate(seq, n, s); },
      py::arg("sequence"), py::arg("n"), py::arg("s"));
  m.def("ingest_bytes", [](const py::bytes& data, const std::string& map) {
    const std::string raw = data;
    const std::vector<std::uint8_t> bytes(raw.begin(), raw.end());
    return ingest(bytes, SymbolMap::from_name(map));
  });

  m.def(
      "run_config",
      [](const std::string& config_json, const std::string& base_dir, unsigned workers) {
        const auto config = parse_config(nlohmann::json::parse(config_json), base_dir);
        const auto report = run_experiment(config, workers);
        py::dict d;
        d["rows"] = report.rows;
        d["summary"] = report.summary.dump();
        d["header"] = report.header.dump();
        if (report.acceptance_passed) d["acceptance_passed"] = *report.acceptance_passed;
        return d;
      },
      py::arg("config_json"), py::arg("base_dir") = ".", py::arg("workers") = 1);
}
