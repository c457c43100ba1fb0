"""Smoke tests for the Python bindings: surface coverage, not statistics."""

import numpy as np
import pytest

import flexseas


def test_version():
    assert flexseas.__version__.count(".") == 2


def test_kernel_moments():
    assert flexseas.kernel_moment("epanechnikov", 2) == pytest.approx(0.2)
    assert flexseas.kernel_sq_moment("epanechnikov", 0) == pytest.approx(0.6)
    with pytest.raises(flexseas.FlexseasError):
        flexseas.kernel_moment("gaussian", 2)


def test_design_matrix():
    a, a_inv = flexseas.build_design(3)
    assert a.shape == (3, 3)
    assert np.abs(a @ a_inv - np.eye(3)).max() < 1e-12


def test_simulate_is_deterministic():
    spec = {"variant": "var_1", "d": 2,
            "sigma_eps": [[1.0, 0.0], [0.0, 1.0]],
            "phi": [[0.5, 0.0], [0.0, 0.5]]}
    a = flexseas.simulate_errors(spec, n=200, seed=7)
    b = flexseas.simulate_errors(spec, n=200, seed=7)
    c = flexseas.simulate_errors(spec, n=200, seed=8)
    assert np.array_equal(a, b)
    assert not np.array_equal(a, c)
    assert a.shape == (200, 2)


def test_weakdep_analytics():
    ar = {"variant": "var_1", "d": 1, "sigma_eps": [[1.0]], "phi": [[0.5]]}
    assert flexseas.autocov(ar, 0)[0, 0] == pytest.approx(4.0 / 3.0)
    assert flexseas.longrun_sigma0(ar)[0, 0] == pytest.approx(4.0, abs=1e-8)
    assert flexseas.dependence_bound(ar, 10) > 0.0
    iid = {"variant": "iid", "d": 1, "sigma_eps": [[1.0]]}
    assert flexseas.dependence_bound(iid, 1) == 0.0


def test_simulate_and_fit_roundtrip():
    panel = flexseas.simulate_panel(
        n=300,
        curves={"preset": "linear", "d": 2},
        seed=1,
    )
    assert len(panel["t"]) == 300
    fit = flexseas.fit_panel(
        panel["y"], kernel="epanechnikov", bandwidth=0.2, grid=[0.3, 0.5, 0.7]
    )
    # Noiseless linear curves are reproduced.
    for k, t in enumerate(fit["t"]):
        assert fit["theta"][k, 0] == pytest.approx(2.0 + 3.0 * t, abs=1e-8)
        assert fit["theta"][k, 1] == pytest.approx(t - 0.5, abs=1e-8)
        assert fit["theta_prime"][k, 0] == pytest.approx(3.0, abs=1e-7)


def test_fit_error_surfaces_as_flexseas_error():
    panel = flexseas.simulate_panel(n=10, curves={"preset": "linear", "d": 2})
    with pytest.raises(flexseas.FlexseasError, match="DegenerateWindow"):
        flexseas.fit_panel(panel["y"], kernel="epanechnikov",
                           bandwidth=0.01, grid=[0.55])


def test_run_study_smoke():
    config = {
        "error": {"variant": "iid", "d": 2,
                  "sigma_eps": [[1.0, 0.0], [0.0, 1.0]]},
        "kernel": "epanechnikov",
        "n_list": [400],
        "h_rule": {"fixed": [0.2]},
        "eval_points": [0.5],
        "replications": 100,
        "base_seed": 5,
    }
    report = flexseas.run_study("lemma6", config, threads=2)
    assert report["study"] == "lemma6"
    assert len(report["cells"]) == 1
    cell = report["cells"][0]
    assert cell["n"] == 400
    assert abs(cell["b0_limit"][0][0] - 0.6) < 1e-12
    assert "summary_csv" in report
    # Deterministic across calls.
    again = flexseas.run_study("lemma6", config, threads=1)
    assert report == again
