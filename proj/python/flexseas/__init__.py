"""Local linear estimation of flexible seasonal trends.

Thin wrappers over the C++ core: dict configs go in, numpy arrays and dict
reports come out. The config schemas match the ``flexseas`` CLI exactly.
"""

import json as _json

from flexseas._core import (
    FlexseasError,
    __version__,
    build_design,
    empirical_autocov,
    kernel_eval,
    kernel_eval_scaled,
    kernel_moment,
    kernel_sq_moment,
    weights,
)
from flexseas import _core

__all__ = [
    "FlexseasError",
    "__version__",
    "autocov",
    "build_design",
    "dependence_bound",
    "empirical_autocov",
    "fit_panel",
    "kernel_eval",
    "kernel_eval_scaled",
    "kernel_moment",
    "kernel_sq_moment",
    "longrun_sigma0",
    "run_study",
    "simulate_errors",
    "simulate_panel",
    "theoretical_bias",
    "weights",
]


def simulate_errors(spec, n, seed):
    """Draw n rows from a stationary error process described by a dict."""
    return _core.simulate_errors(_json.dumps(spec), n, seed)


def autocov(spec, k):
    """Analytic autocovariance R(k) of the process described by ``spec``."""
    return _core.autocov(_json.dumps(spec), k)


def longrun_sigma0(spec, tol=1e-12):
    """Long-run covariance R(0) + 2 * sum of R(k)."""
    return _core.longrun_sigma0(_json.dumps(spec), tol)


def dependence_bound(spec, r):
    """Monotone upper bound on the dependence coefficient at lag r."""
    return _core.dependence_bound(_json.dumps(spec), r)


def simulate_panel(n, curves, error=None, seed=1):
    """Synthesize a panel: dict with the time grid ``t`` and matrix ``y``.

    ``curves`` and ``error`` take the same dict schemas as the CLI simulate
    config.
    """
    config = {"n": n, "seed": seed, "curves": curves}
    if error is not None:
        config["error"] = error
    return _core.simulate_panel(_json.dumps(config), None)


def fit_panel(y, kernel="epanechnikov", bandwidth=0.1, grid=None,
              min_denominator=1e-12):
    """Local linear fit of an n x d panel over a grid of t values.

    Returns a dict with ``t``, ``theta`` (rows are (alpha, beta_1..beta_{d-1})
    at each grid point), and ``theta_prime``.
    """
    if grid is None:
        grid = [i / 100.0 for i in range(101)]
    return _core.fit_panel(y, kernel, bandwidth, list(grid), min_denominator)


def theoretical_bias(curves, kernel, h, t):
    """Leading bias term h^2 mu_2 theta''(t) / 2 for a curve preset dict."""
    return _core.theoretical_bias(_json.dumps(curves), kernel, h, t)


def run_study(study, config, threads=1):
    """Run a Monte Carlo study ("bias", "clt", "lemma6", or "rate").

    Returns the report as a dict (the ``summary_csv`` key holds the CSV
    rendering the CLI would write).
    """
    report_json, summary_csv = _core.run_study(study, _json.dumps(config),
                                               threads)
    report = _json.loads(report_json)
    report["summary_csv"] = summary_csv
    return report
