"""Alignment tax geometry: tax rates, Pareto frontiers, safety-safety conflict
analysis and Monte Carlo scaling experiments, backed by a C++ core."""

import json as _json

from ._core import *  # noqa: F401,F403
from ._core import AtaxError, __version__, run_command as _run_command


def run(command, problem=None, **options):
    """Run an atax command and return (report dict, csv text or None).

    `problem` is either a dict in the problem-file schema or its JSON text.
    """
    text = problem if problem is None or isinstance(problem, str) else _json.dumps(problem)
    report, csv = _run_command(command, text, options)
    return _json.loads(report), csv


__all__ = ["AtaxError", "__version__", "run"]
