import math

import pytest

import fmoment


def test_psi_abs_closed_form():
    f = fmoment.CharFn(p=1.0)
    assert fmoment.psi(f, 2.0) == pytest.approx(2.0 * math.sqrt(2.0 / math.pi), rel=1e-10)
    assert fmoment.psi_inverse(f, math.sqrt(2.0 / math.pi)) == pytest.approx(1.0, abs=1e-8)


def test_gaussian_abs_moment():
    assert fmoment.gaussian_abs_moment(1.0) == pytest.approx(math.sqrt(2.0 / math.pi), rel=1e-14)
    assert fmoment.gaussian_abs_moment(2.0) == pytest.approx(1.0, rel=1e-14)


def test_verify_fcond_log_family():
    rep = fmoment.verify_fcond(fmoment.CharFn(p=1.0, B=1.0, C=1.0))
    assert rep["ok"]


def test_bad_parameters_raise():
    with pytest.raises(ValueError):
        fmoment.CharFn(p=2.5)


def test_criterion_brownian_and_poisson():
    f = fmoment.CharFn(p=1.0)
    bm = fmoment.run_criterion({"preset": "brownian", "sigma": 1.0}, f, seed=5,
                               replicates=5000, points=8, levels=5)
    assert bm["verdict"] == "BrownianCompatible"
    assert bm["sigma_hat"] == pytest.approx(1.0, rel=0.05)
    cp = {"preset": "compound_poisson", "rate": 1.0,
          "jump_dist": {"kind": "constant", "value": 1.0}}
    r = fmoment.run_criterion(cp, f, seed=5, replicates=5000, points=8, levels=5)
    assert r["verdict"] == "NotCompatible"


def test_criterion_deterministic():
    f = fmoment.CharFn(p=1.3)
    spec = {"preset": "brownian", "sigma": 1.5}
    a = fmoment.run_criterion(spec, f, seed=9, replicates=2000, points=4, levels=4)
    b = fmoment.run_criterion(spec, f, seed=9, replicates=2000, points=4, levels=4, threads=3)
    assert a == b


def test_counterexample_b_is_one_for_abs():
    r = fmoment.counterexample(fmoment.CharFn(p=1.0), [0.25, 0.0625], seed=1, replicates=20000)
    assert r["b"] == pytest.approx(1.0, abs=1e-8)
    assert r["k_values"] == pytest.approx([0.5, 0.25])


def test_clt_iid():
    r = fmoment.run_clt({"kind": "iid", "dist": {"kind": "normal", "sd": 1.0}}, seed=3,
                        config={"n_ladder": [16, 32], "replicates": 4000, "k_grid": [2]})
    rho = {e["n"]: e for e in r["rho"]}
    assert abs(rho[16]["mean"] - 4.0) < 4 * rho[16]["std_error"]


def test_config_error_is_value_error():
    with pytest.raises(ValueError):
        fmoment.run_clt({"kind": "nope"}, seed=1)
