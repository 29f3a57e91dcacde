import math

import numpy as np
import pytest

import cvsat


def test_tmsv_log_negativity():
    for r in (0.1, 1.0, 2.0):
        assert cvsat.log_negativity(cvsat.tmsv_cm(r)) == pytest.approx(2 * r / math.log(2), abs=1e-10)


def test_loss_round_trip_through_effective_parameters():
    cm = cvsat.apply_loss(cvsat.tmsv_cm(0.8), 0.6, 0.3)
    cosh_2r, eta_a, eta_b = cvsat.to_effective(cm)
    assert cosh_2r == pytest.approx(math.cosh(1.6), rel=1e-10)
    assert (eta_a, eta_b) == pytest.approx((0.6, 0.3), abs=1e-10)


def test_schemes_on_reference_channel():
    links = cvsat.expand_links(0.7, 0.5, 0.64, beta=1.0, w=2.0)
    direct = cvsat.scheme_ensemble(cvsat.SchemeKind.direct, 1.0, links["as"], links["sb"])
    sat = cvsat.scheme_ensemble(cvsat.SchemeKind.satellite, 1.0, links["sa"], links["sb"])
    assert direct.shape == (4, 4)
    assert np.allclose(direct, direct.T)
    assert cvsat.log_negativity(sat) >= cvsat.log_negativity(direct)
    cm, e_ln = cvsat.evaluate_scheme(cvsat.SchemeKind.swap, 1.0, 0.7, w=2.0)
    assert e_ln == pytest.approx(cvsat.log_negativity(cm))


def test_postselection_trade_off():
    links = cvsat.expand_links(1.0, 0.5, 0.64, beta=1.0, w=2.0)
    low = cvsat.classical_postselect(1.5, links["as"], links["sb"], 0.0)
    high = cvsat.classical_postselect(1.5, links["as"], links["sb"], 0.3)
    assert low["p_success"] == pytest.approx(1.0, abs=1e-12)
    assert high["p_success"] < low["p_success"]
    assert high["e_ln"] > low["e_ln"]
    q = cvsat.quantum_postselect(1.5, links["as"], links["sb"], 0.93, 1.0)
    assert 0 < q["p_success"] < 1


def test_errors_map_to_python_exceptions():
    with pytest.raises(cvsat.DomainError):
        cvsat.apply_loss(cvsat.tmsv_cm(1.0), 1.5, 0.5)
    with pytest.raises(ValueError):
        cvsat.rate_estimate(2.0, 1e8)
    with pytest.raises(cvsat.NotEntangledError):
        cvsat.to_effective(np.diag([2.0, 2.0, 2.0, 2.0]))
    with pytest.raises(cvsat.ConfigError):
        cvsat.run_sweep("channel.k1 = 3\n")


def test_scenario_sweep_and_rate():
    rows = cvsat.run_sweep(
        "scheme.kinds = direct, swap\nsweep.r_min = 0.5\nsweep.r_max = 1\nsweep.r_steps = 2\n"
        "channel.beta_over_w = 0.5\n"
    )
    assert [row["scheme"] for row in rows] == ["direct", "direct", "swap", "swap"]
    assert cvsat.rate_estimate(1e-4, 1e8) == pytest.approx(1e4)
