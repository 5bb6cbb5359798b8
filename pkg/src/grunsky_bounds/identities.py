"""Dual-route identity checks for the Grunsky reductions.

Every row compares a reduced closed form against the general route through
the coefficient map on random scenario windows and reports the largest
discrepancy.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import grunsky as g
from .grunsky import Scenario

__all__ = ["IdentityRow", "run_identities", "RESIDUAL_TOL", "IDENTITY_TOL"]

IDENTITY_TOL = 1e-12
RESIDUAL_TOL = 1e-14
STATIONARY_TOL = 1e-6


@dataclass(frozen=True)
class IdentityRow:
    name: str
    max_residual: float
    threshold: float
    detail: str = ""

    @property
    def passed(self) -> bool:
        return self.max_residual <= self.threshold


def _windows(s: Scenario, n: int, seed: int, stream: int) -> g.GrunskyWindow:
    rng = np.random.default_rng([seed, 1000 + stream])
    return g.draw_free(s, rng, n)


def _maxabs(a) -> float:
    return float(np.max(np.abs(a)))


def run_identities(n: int = 10_000, seed: int = 42, with_optimizer: bool = True) -> list[IdentityRow]:
    if n < 1:
        raise ValueError("n must be at least 1")
    rows: list[IdentityRow] = []

    w = _windows(Scenario.A3_ZERO, n, seed, 0)
    h3 = g.hankel3(w)
    rows.append(IdentityRow(
        "h3_a3zero_reduced_vs_general", _maxabs(g.h3_a3zero_reduced(w) - h3), IDENTITY_TOL,
        "-w15^2 - 4 w11^3 w15 - 8 w11^2 w17 against H3(1) via a2..a5",
    ))
    rows.append(IdentityRow(
        "h3_a3zero_expanded_vs_general", _maxabs(g.h3_a3zero_expanded(w) - h3), IDENTITY_TOL,
        "-4 w15^2 - 4 w11^3 w15 - 8 w11^2 w17 against H3(1) via a2..a5",
    ))
    a = g.coefficients_from_grunsky(w)
    rows.append(IdentityRow(
        "a4_a3zero_reduced", _maxabs(2 * w.w15 - 5 * w.w11**3 - a.a4), IDENTITY_TOL,
        "a4 = 2 w15 - 5 w11^3",
    ))
    rows.append(IdentityRow(
        "a5_a3zero_reduced",
        _maxabs(2 * w.w17 + 6 * w.w11 * w.w15 - 6.25 * w.w11**4 - a.a5), IDENTITY_TOL,
        "a5 = 2 w17 + 6 w11 w15 - (25/4) w11^4",
    ))
    rows.append(IdentityRow("a3_zero_holds", _maxabs(a.a3), IDENTITY_TOL, "a3 = 0"))

    w = _windows(Scenario.A2_ZERO, n, seed, 1)
    a = g.coefficients_from_grunsky(w)
    rows.append(IdentityRow(
        "a5_a2zero_reduced_vs_direct",
        max(
            _maxabs(np.abs(g.a5_a2zero_reduced(w)) - np.abs(a.a5)),
            _maxabs(np.abs(g.a5_a2zero_direct(w)) - np.abs(a.a5)),
        ),
        IDENTITY_TOL,
        "|2 w17 + 3 w13^2| and |2 w35 + 5 w13^2| against |a5|",
    ))
    rows.append(IdentityRow(
        "h3_a2zero_reduced",
        _maxabs(-2 * w.w13**3 - 4 * w.w15**2 + 4 * w.w13 * w.w17 - g.hankel3(w)), IDENTITY_TOL,
        "H3(1) = -2 w13^3 - 4 w15^2 + 4 w13 w17",
    ))

    w = _windows(Scenario.UNCONSTRAINED_THM6, n, seed, 2)
    a = g.coefficients_from_grunsky(w)
    rows.append(IdentityRow(
        "a4_minus_w11_a3_reduced",
        _maxabs(2 * w.w15 + 4 * w.w11 * w.w13 + w.w11**3 - (a.a4 - w.w11 * a.a3)), IDENTITY_TOL,
        "a4 - w11 a3 = 2 w15 + 4 w11 w13 + w11^3",
    ))

    for k, s in enumerate((Scenario.A2_ZERO, Scenario.A3_ZERO, Scenario.ODD_A5A3)):
        w = _windows(s, n, seed, 10 + k)
        r1, r2 = g.consistency_residuals(w)
        rows.append(IdentityRow(
            f"residuals_{s.value}", max(_maxabs(r1), _maxabs(r2)), RESIDUAL_TOL,
            "both equality relations on completed windows",
        ))

    # round trip (w11, w13, w33, w35) -> (a2..a5) -> window
    worst = 0.0
    for k, s in enumerate((Scenario.A2_ZERO, Scenario.A3_ZERO, Scenario.ODD_A5A3)):
        w = _windows(s, n, seed, 20 + k)
        back = g.grunsky_from_coefficients(g.coefficients_from_grunsky(w), w.w15, w.w17)
        for u, v in zip(w.astuple(), back.astuple()):
            worst = max(worst, _maxabs(np.asarray(u) - np.asarray(v)))
    rows.append(IdentityRow("coefficient_map_round_trip", worst, RESIDUAL_TOL, "inverse of the triangular map"))

    k = g.coefficients_from_grunsky(g.KOEBE)
    err = max(abs(k.a2 - 2), abs(k.a3 - 3), abs(k.a4 - 4), abs(k.a5 - 5))
    rows.append(IdentityRow(
        "koebe_coefficients", err, 0.0,
        f"a = ({k.a2.real:g}, {k.a3.real:g}, {k.a4.real:g}, {k.a5.real:g})",
    ))
    m = g.feasibility_margins(g.KOEBE)
    rows.append(IdentityRow(
        "koebe_margins", max(abs(v) for v in m), 0.0, "margins = (" + ", ".join(f"{v:g}" for v in m) + ")",
    ))
    r = g.consistency_residuals(g.KOEBE)
    rows.append(IdentityRow("koebe_residuals", max(abs(v) for v in r), 0.0, "equality relations"))

    if with_optimizer:
        from .catalog import get_problem
        from .optimizer import OptimizerConfig, maximize, stationary_residual_f6

        enc = maximize(get_problem("f6"), OptimizerConfig(tolerance=1e-12))
        px, py = enc.argmax
        rows.append(IdentityRow(
            "f6_stationary_residual", abs(stationary_residual_f6(px, py)), STATIONARY_TOL,
            f"x^2(9y-4) + 12y^2 at ({px:.17g}, {py:.17g})",
        ))
    return rows
