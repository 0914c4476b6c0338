"""Two-stage stochastic intermodal container planner."""

import csv
import io
import json

from ._core import (
    PlannerError,
    Problem,
    __version__,
    cvar,
    cvar_dual,
    export_lp,
    load_problem,
    parse_problem,
    validate,
)
from . import _core

__all__ = [
    "PlannerError",
    "Problem",
    "__version__",
    "capacity_grid",
    "cvar",
    "cvar_dual",
    "emissions_grid",
    "export_lp",
    "load_problem",
    "parse_problem",
    "risk_grid",
    "solve",
    "stochastic_values",
    "validate",
]


def _rows(text):
    rows = []
    for row in csv.DictReader(io.StringIO(text)):
        parsed = {}
        for key, value in row.items():
            try:
                parsed[key] = float(value) if value != "" else None
            except ValueError:
                parsed[key] = value
        rows.append(parsed)
    return rows


def solve(problem, lambda_=0.0, alpha=0.75, epsilon=None, use_transfer=False, gap=1e-6, time_limit=0.0):
    """Solves one (lambda, alpha) model; returns status, objective, bound and the plan."""
    return json.loads(_core._solve(problem, lambda_, alpha, epsilon, use_transfer, gap, time_limit))


def stochastic_values(problem, alpha=0.75):
    """EEV, SS, WS, VSS, EVPI and CVaR of the stochastic solution (thousands)."""
    return _rows(_core._stochastic_values(problem, alpha))[0]


def risk_grid(problem, time_limit=None, workers=1):
    return _rows(_core._risk_grid(problem, time_limit, workers))


def emissions_grid(problem, time_limit=None, workers=1):
    return _rows(_core._emissions_grid(problem, time_limit, workers))


def capacity_grid(problem, time_limit=None, workers=1):
    return _rows(_core._capacity_grid(problem, time_limit, workers))
