"""Entrance times, return times and Renyi entropy for Bernoulli and Markov shifts."""

import json as _json

from ._core import *  # noqa: F401,F403
from ._core import __version__, run_config as _run_config


def run(config, base_dir=".", workers=1):
    """Run an experiment config (dict) and return rows, summary and header."""
    out = _run_config(_json.dumps(config), str(base_dir), workers)
    out["summary"] = _json.loads(out["summary"])
    out["header"] = _json.loads(out["header"])
    return out
