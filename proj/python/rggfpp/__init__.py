"""Random geometric graphs, first-passage percolation and the rescaled
Richardson process."""

import json

from ._core import (
    RggfppError,
    branching_run,
    check_A1,
    n_alpha,
    passage_times,
    pc_lower_bound,
    rgg_edges,
    sample_ppp,
    version,
)
from ._core import run_experiment as _run_experiment

__all__ = [
    "RggfppError",
    "branching_run",
    "check_A1",
    "n_alpha",
    "passage_times",
    "pc_lower_bound",
    "rgg_edges",
    "run_experiment",
    "sample_ppp",
    "version",
]


def run_experiment(config, out):
    """Run a config (dict or JSON text) writing into `out`; returns the manifest dict."""
    text = config if isinstance(config, str) else json.dumps(config)
    return json.loads(_run_experiment(text, str(out)))
