import math

import numpy as np
import pytest

from grunsky_bounds import grunsky as g
from grunsky_bounds.grunsky import (
    KOEBE,
    CoefficientVector,
    GrunskyWindow,
    RejectionBudgetError,
    Scenario,
    ScenarioArityError,
    coefficients_from_grunsky,
    complete_window,
    consistency_residuals,
    feasibility_margins,
    grunsky_form_margin,
    objectives,
    sample,
)

ZERO = GrunskyWindow()


def _coeffs(w):
    a = coefficients_from_grunsky(w)
    return (a.a2, a.a3, a.a4, a.a5)


def test_zero_window_coefficients():
    assert _coeffs(ZERO) == (0, 0, 0, 0)


def test_koebe_coefficients():
    assert _coeffs(KOEBE) == (2, 3, 4, 5)


def test_half_w11():
    got = _coeffs(GrunskyWindow(w11=0.5))
    for u, v in zip(got, (1, 3 / 4, 5 / 12, 7 / 48)):
        assert u == pytest.approx(v, abs=1e-15)


def test_residuals():
    assert consistency_residuals(KOEBE) == (0, 0)
    assert consistency_residuals(ZERO) == (0, 0)
    # the second relation carries + w11^4 / 3
    r1, r2 = consistency_residuals(GrunskyWindow(w11=1))
    assert r1 == 1
    assert r2 == pytest.approx(1 / 3, abs=1e-16)


def test_complete_a2_zero():
    w = complete_window((0.3, 0, 0), Scenario.A2_ZERO)
    assert w.w35 == pytest.approx(-0.09, abs=1e-15)
    assert w.w11 == 0


def test_complete_a3_zero():
    w = complete_window((0.4, 0.2, 0.1), "a3_zero")
    assert w.w13 == pytest.approx(-0.24, abs=1e-15)
    assert abs(coefficients_from_grunsky(w).a3) <= 1e-15


def test_complete_odd_zero():
    w = complete_window((0, 0), Scenario.ODD_A5A3)
    assert all(v == 0 for v in w.astuple())


def test_complete_unconstrained_relation():
    w = complete_window((0.3 + 0.1j, 0.2j, -0.1), Scenario.UNCONSTRAINED_THM6)
    r1, r2 = consistency_residuals(w)
    assert abs(r1) <= 1e-15
    assert w.w17 == 0 and w.w35 == 0


def test_arity_error():
    with pytest.raises(ScenarioArityError):
        complete_window((0.1, 0.2), Scenario.A2_ZERO)
    with pytest.raises(ValueError):
        complete_window((0.1,), "bogus")


def test_margins():
    assert feasibility_margins(ZERO) == (1, 1, 1, 1)
    assert feasibility_margins(KOEBE) == (0, 0, 0, 0)
    m = feasibility_margins(GrunskyWindow(w11=1, w13=0.1))
    assert m[1] == pytest.approx(-0.03, abs=1e-15)


def test_h3_on_odd_koebe_coefficients():
    w = g.grunsky_from_coefficients(CoefficientVector(0, 1, 0, 1))
    assert abs(objectives(w).h3) <= 1e-15
    assert abs(g.hankel3(w)) <= 1e-15


def test_zero_window_objectives():
    o = objectives(ZERO)
    assert (o.h2, o.h3, o.a4_minus_a3, o.a5_minus_a3) == (0, 0, 0, 0)


def test_koebe_h2():
    assert objectives(KOEBE).h2 == 1


def test_h3_a3zero_reduced_examples():
    w = complete_window((0, 0.3, 0.2), Scenario.A3_ZERO)
    assert g.h3_a3zero_reduced(w) == pytest.approx(-0.09, abs=1e-15)
    w = complete_window((0.4, 0.2, 0.1), Scenario.A3_ZERO)
    assert g.h3_a3zero_reduced(w) == pytest.approx(-0.2192, abs=1e-14)
    assert g.h3_a3zero_reduced(complete_window((0, 0, 0), Scenario.A3_ZERO)) == 0


def test_h3_a3zero_general_route():
    # substituting a3 = 0 gives a leading -4 w15^2, so the two forms differ by 3 w15^2
    w = complete_window((0.4, 0.2, 0.1), Scenario.A3_ZERO)
    assert g.hankel3(w) == pytest.approx(-0.3392, abs=1e-14)
    assert g.h3_a3zero_expanded(w) == pytest.approx(-0.3392, abs=1e-14)


def test_a5_a2zero_reduced_examples():
    w = complete_window((0.3, 0, 0), Scenario.A2_ZERO)
    assert g.a5_a2zero_reduced(w) == pytest.approx(0.27, abs=1e-15)
    w = complete_window((0, 0, 0.2), Scenario.A2_ZERO)
    assert g.a5_a2zero_reduced(w) == pytest.approx(0.4, abs=1e-15)


def test_a5_a2zero_dual_route(rng):
    w = g.draw_free(Scenario.A2_ZERO, rng, 10_000)
    a5 = coefficients_from_grunsky(w).a5
    assert np.max(np.abs(np.abs(g.a5_a2zero_reduced(w)) - np.abs(a5))) <= 1e-12


def test_grunsky_form_margin():
    assert grunsky_form_margin(ZERO, 1, 0) == 1
    assert grunsky_form_margin(KOEBE, 1, 0) == 0
    assert grunsky_form_margin(ZERO, 0, 1) == pytest.approx(1 / 3, abs=1e-16)


def test_take_and_astuple():
    w = GrunskyWindow(w11=np.array([0.1, 0.2]))
    assert w.take(1).w11 == 0.2
    assert isinstance(w.take(0).w13, complex)


@pytest.mark.parametrize("s", list(Scenario))
def test_draws_are_feasible(s, rng):
    w = g.draw_free(s, rng, 20_000)
    assert g._accept_mask(s, w).all()
    r1, r2 = consistency_residuals(w)
    assert np.max(np.abs(r1)) <= 1e-14
    if s is not Scenario.UNCONSTRAINED_THM6:  # w17, w35 unused there
        assert np.max(np.abs(r2)) <= 1e-14


def test_sample_rejects_zero():
    with pytest.raises(ValueError):
        sample(Scenario.ODD_A5A3, 0, 1)


def test_sample_is_deterministic():
    a = sample("odd_a5a3", 70_000, seed=3)
    b = sample("odd_a5a3", 70_000, seed=3)
    c = sample("odd_a5a3", 70_000, seed=3, workers=2)
    assert a == b == c
    assert a.violation_count == 0
    assert a.maxima["a5_minus_a3"] <= 2 / math.sqrt(7)


def test_sample_different_seed_differs():
    a = sample("a2_zero", 1000, seed=1)
    b = sample("a2_zero", 1000, seed=2)
    assert a.maxima != b.maxima


def test_sample_counts_violations_against_given_bounds():
    r = sample("a2_zero", 1000, seed=1, bounds={"abs_a5": 0.0, "h3": 10.0})
    assert r.violations["abs_a5"] > 0
    assert r.violations["h3"] == 0


def test_rejection_budget(monkeypatch):
    def infeasible(s, rng, n):
        return GrunskyWindow(*(np.full(n, 2 + 0j) for _ in range(6)))

    monkeypatch.setattr(g, "draw_free", infeasible)
    with pytest.raises(RejectionBudgetError):
        sample("a2_zero", 10, seed=0, bounds={"abs_a5": 2.0, "h3": 2.0})
