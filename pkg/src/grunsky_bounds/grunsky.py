"""Truncated Grunsky coefficient algebra and a seeded feasibility sampler.

A :class:`GrunskyWindow` holds the six coefficients w11, w13, w15, w17, w33,
w35 of the odd square-root transform ``sqrt(f(z^2))``.  Every function here
is written with plain arithmetic so that fields may be Python complex
scalars or equally-shaped numpy complex arrays; the sampler relies on that.

The sampler draws from a *relaxation* of the class S: windows obeying the
modulus chain and the equality relations.  Such windows need not come from a
univalent function, so observed maxima are upper-bound stress tests, not
values attained by functions in S.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from enum import Enum
from functools import lru_cache
from typing import Any, Sequence

import numpy as np

__all__ = [
    "GrunskyWindow",
    "CoefficientVector",
    "Objectives",
    "Scenario",
    "SampleReport",
    "ScenarioArityError",
    "RejectionBudgetError",
    "KOEBE",
    "coefficients_from_grunsky",
    "grunsky_from_coefficients",
    "consistency_residuals",
    "complete_window",
    "feasibility_margins",
    "objectives",
    "h3_a3zero_reduced",
    "a5_a2zero_reduced",
    "grunsky_form_margin",
    "draw_free",
    "sample",
    "certified_bounds",
    "SCENARIO_CHECKS",
]


class ScenarioArityError(ValueError):
    pass


class RejectionBudgetError(RuntimeError):
    pass


@dataclass(frozen=True)
class GrunskyWindow:
    w11: Any = 0j
    w13: Any = 0j
    w15: Any = 0j
    w17: Any = 0j
    w33: Any = 0j
    w35: Any = 0j

    def take(self, i) -> GrunskyWindow:
        """Element ``i`` of an array-valued window, as Python complexes."""
        cols = np.broadcast_arrays(*(np.asarray(v) for v in self.astuple()))
        return GrunskyWindow(*(complex(c[i]) for c in cols))

    def astuple(self) -> tuple:
        return (self.w11, self.w13, self.w15, self.w17, self.w33, self.w35)


@dataclass(frozen=True)
class CoefficientVector:
    a2: Any
    a3: Any
    a4: Any
    a5: Any


@dataclass(frozen=True)
class Objectives:
    h2: Any
    h3: Any
    a4_minus_a3: Any
    a5_minus_a3: Any
    abs_a2: Any
    abs_a3: Any
    abs_a4: Any
    abs_a5: Any


class Scenario(str, Enum):
    UNCONSTRAINED_THM6 = "unconstrained_thm6"
    A2_ZERO = "a2_zero"
    A3_ZERO = "a3_zero"
    ODD_A5A3 = "odd_a5a3"


# Koebe function k(z) = z/(1-z)^2, a_n = n
KOEBE = GrunskyWindow(w11=1 + 0j, w33=1 / 3 + 0j)


def coefficients_from_grunsky(w: GrunskyWindow) -> CoefficientVector:
    w11, w13, w33, w35 = w.w11, w.w13, w.w33, w.w35
    w11_2 = w11 * w11
    return CoefficientVector(
        a2=2 * w11,
        a3=2 * w13 + 3 * w11_2,
        a4=2 * w33 + 8 * w11 * w13 + (10 / 3) * w11_2 * w11,
        a5=2 * w35 + 8 * w11 * w33 + 5 * w13 * w13 + 18 * w11_2 * w13 + (7 / 3) * w11_2 * w11_2,
    )


def grunsky_from_coefficients(a: CoefficientVector, w15=0j, w17=0j) -> GrunskyWindow:
    """Invert the triangular coefficient map for (w11, w13, w33, w35)."""
    w11 = a.a2 / 2
    w11_2 = w11 * w11
    w13 = (a.a3 - 3 * w11_2) / 2
    w33 = (a.a4 - 8 * w11 * w13 - (10 / 3) * w11_2 * w11) / 2
    w35 = (a.a5 - 8 * w11 * w33 - 5 * w13 * w13 - 18 * w11_2 * w13 - (7 / 3) * w11_2 * w11_2) / 2
    return GrunskyWindow(w11, w13, w15, w17, w33, w35)


def consistency_residuals(w: GrunskyWindow):
    """Left-hand sides of the two equality relations; ``(0, 0)`` when consistent."""
    w11, w13, w15, w17, w33, w35 = w.astuple()
    w11_3 = w11 * w11 * w11
    r1 = 3 * w15 - 3 * w11 * w13 + w11_3 - 3 * w33
    r2 = w17 - w35 - w11 * w33 - w13 * w13 + w11_3 * w11 / 3
    return r1, r2


_ARITY = {
    Scenario.A2_ZERO: 3,
    Scenario.A3_ZERO: 3,
    Scenario.UNCONSTRAINED_THM6: 3,
    Scenario.ODD_A5A3: 2,
}


def complete_window(free: Sequence, s: Scenario | str) -> GrunskyWindow:
    """Fill in the determined coefficients of a scenario.

    Free tuples: a2_zero (w13, w15, w17); a3_zero (w11, w15, w17);
    unconstrained_thm6 (w11, w13, w15); odd_a5a3 (w13, w17).
    """
    s = Scenario(s)
    if len(free) != _ARITY[s]:
        raise ScenarioArityError(f"{s.value} takes {_ARITY[s]} free coefficients, got {len(free)}")
    if s is Scenario.A2_ZERO:
        w13, w15, w17 = free
        zero = 0 * w13
        return GrunskyWindow(zero, w13, w15, w17, w15, w17 - w13 * w13)
    if s is Scenario.A3_ZERO:
        w11, w15, w17 = free
        w11_2 = w11 * w11
        return GrunskyWindow(
            w11,
            -1.5 * w11_2,
            w15,
            w17,
            w15 + (11 / 6) * w11_2 * w11,
            w17 - w11 * w15 - 3.75 * w11_2 * w11_2,
        )
    if s is Scenario.UNCONSTRAINED_THM6:
        w11, w13, w15 = free
        zero = 0 * w11
        w33 = w15 - w11 * w13 + w11 * w11 * w11 / 3
        return GrunskyWindow(w11, w13, w15, zero, w33, zero)
    w13, w17 = free
    zero = 0 * w13
    return GrunskyWindow(zero, w13, zero, w17, zero, w17 - w13 * w13)


def feasibility_margins(w: GrunskyWindow):
    """The four nested modulus-chain margins; feasible iff all are >= 0."""
    m1 = 1 - abs(w.w11) ** 2
    m2 = m1 - 3 * abs(w.w13) ** 2
    m3 = m2 - 5 * abs(w.w15) ** 2
    m4 = m3 - 7 * abs(w.w17) ** 2
    return (m1, m2, m3, m4)


def _hankel(a: CoefficientVector):
    a2, a3, a4, a5 = a.a2, a.a3, a.a4, a.a5
    h2 = a2 * a4 - a3 * a3
    h3 = a3 * h2 - a4 * (a4 - a2 * a3) + a5 * (a3 - a2 * a2)
    return h2, h3


def objectives(w: GrunskyWindow) -> Objectives:
    a = coefficients_from_grunsky(w)
    h2, h3 = _hankel(a)
    m2, m3, m4, m5 = abs(a.a2), abs(a.a3), abs(a.a4), abs(a.a5)
    return Objectives(abs(h2), abs(h3), m4 - m3, m5 - m3, m2, m3, m4, m5)


def hankel3(w: GrunskyWindow):
    """Complex H3(1) through the coefficient map."""
    return _hankel(coefficients_from_grunsky(w))[1]


def h3_a3zero_reduced(w: GrunskyWindow):
    """``-w15^2 - 4 w11^3 w15 - 8 w11^2 w17`` on a window completed with a3 = 0.

    NB: substituting the a3 = 0 relations into H3(1) actually yields
    ``-4 w15^2 - 4 w11^3 w15 - 8 w11^2 w17``; this returns the expression
    with the leading coefficient 1 so that the discrepancy can be measured.
    """
    w11, w15, w17 = w.w11, w.w15, w.w17
    w11_2 = w11 * w11
    return -w15 * w15 - 4 * w11_2 * w11 * w15 - 8 * w11_2 * w17


def h3_a3zero_expanded(w: GrunskyWindow):
    """H3(1) with a3 = 0, fully expanded in (w11, w15, w17)."""
    w11, w15, w17 = w.w11, w.w15, w.w17
    w11_2 = w11 * w11
    return -4 * w15 * w15 - 4 * w11_2 * w11 * w15 - 8 * w11_2 * w17


def a5_a2zero_reduced(w: GrunskyWindow):
    """``2 w17 + 3 w13^2`` on a window completed with a2 = 0."""
    return 2 * w.w17 + 3 * w.w13 * w.w13


def a5_a2zero_direct(w: GrunskyWindow):
    """``2 w35 + 5 w13^2``: a5 with w11 = 0, before eliminating w35."""
    return 2 * w.w35 + 5 * w.w13 * w.w13


def grunsky_form_margin(w: GrunskyWindow, x1: complex, x3: complex) -> float:
    """Slack of the two-term Grunsky quadratic form (w37 term omitted)."""
    rhs = abs(x1) ** 2 + abs(x3) ** 2 / 3
    lhs = (
        abs(w.w11 * x1 + w.w13 * x3) ** 2
        + 3 * abs(w.w13 * x1 + w.w33 * x3) ** 2
        + 5 * abs(w.w15 * x1 + w.w35 * x3) ** 2
    )
    return rhs - lhs


# -- sampling -----------------------------------------------------------------

# scenario -> objective name -> catalog id whose certified max bounds it
SCENARIO_CHECKS: dict[Scenario, dict[str, str]] = {
    Scenario.A2_ZERO: {"abs_a5": "a5_a2zero", "h3": "f1"},
    Scenario.A3_ZERO: {"abs_a4": "f2", "abs_a5": "f3", "h2": "f4", "h3": "f5"},
    Scenario.UNCONSTRAINED_THM6: {"a4_minus_a3": "f6"},
    Scenario.ODD_A5A3: {"a5_minus_a3": "a5_minus_a3_odd"},
}

# samples per independently seeded block; shard-count independent by design
BLOCK_SIZE = 1 << 16
MIN_ACCEPTANCE = 1e-4
VIOLATION_MARGIN = 1e-9


def _cplx(rng: np.random.Generator, modulus: np.ndarray) -> np.ndarray:
    phase = rng.uniform(0.0, 2.0 * math.pi, size=modulus.shape)
    return modulus * np.exp(1j * phase)


def _cap(margin: np.ndarray, k: int) -> np.ndarray:
    return np.sqrt(np.maximum(margin, 0.0) / k)


def draw_free(s: Scenario, rng: np.random.Generator, n: int) -> GrunskyWindow:
    """Sequential conditional draw of ``n`` completed windows (before rejection).

    Each modulus is uniform on the widest range the modulus chain allows given
    the coefficients already drawn; phases are uniform on [0, 2pi).
    """
    s = Scenario(s)
    u = lambda hi: rng.uniform(0.0, 1.0, size=n) * hi  # noqa: E731
    if s is Scenario.A2_ZERO:
        r13 = u(0.5)
        m2 = 1 - 3 * r13**2
        r15 = u(_cap(m2, 5))
        r17 = u(_cap(m2 - 5 * r15**2, 7))
        free = (_cplx(rng, r13), _cplx(rng, r15), _cplx(rng, r17))
    elif s is Scenario.A3_ZERO:
        r11 = u(0.5)
        m2 = 1 - r11**2 - 3 * (1.5 * r11**2) ** 2
        r15 = u(_cap(m2, 5))
        r17 = u(_cap(m2 - 5 * r15**2, 7))
        free = (_cplx(rng, r11), _cplx(rng, r15), _cplx(rng, r17))
    elif s is Scenario.UNCONSTRAINED_THM6:
        r11 = u(1.0)
        m1 = 1 - r11**2
        r13 = u(_cap(m1, 3))
        r15 = u(_cap(m1 - 3 * r13**2, 5))
        free = (_cplx(rng, r11), _cplx(rng, r13), _cplx(rng, r15))
    else:
        r13 = u(0.5)
        r17 = u(_cap(1 - 3 * r13**2, 7))
        free = (_cplx(rng, r13), _cplx(rng, r17))
    return complete_window(free, s)


def _accept_mask(s: Scenario, w: GrunskyWindow) -> np.ndarray:
    ok = np.ones(np.shape(w.w11), dtype=bool)
    for m in feasibility_margins(w):
        ok &= m >= 0
    if s in (Scenario.A2_ZERO, Scenario.ODD_A5A3):
        ok &= np.abs(w.w13) <= 0.5
    elif s is Scenario.A3_ZERO:
        ok &= np.abs(w.w11) <= 0.5
    else:
        ok &= np.abs(w.w11) <= 1.0
    return ok


def _concat(parts: list[GrunskyWindow]) -> GrunskyWindow:
    return GrunskyWindow(*(np.concatenate(cols) for cols in zip(*(p.astuple() for p in parts))))


def _slice(w: GrunskyWindow, mask_or_slice) -> GrunskyWindow:
    return GrunskyWindow(*(np.asarray(v)[mask_or_slice] for v in w.astuple()))


@dataclass
class _BlockResult:
    index: int
    accepted: int
    attempts: int
    maxima: dict
    argmax: dict
    violations: dict


def _run_block(s: Scenario, seed: int, index: int, quota: int, bounds: dict) -> _BlockResult:
    rng = np.random.default_rng([seed, index])
    parts: list[GrunskyWindow] = []
    have = attempts = 0
    while have < quota:
        want = quota - have
        w = draw_free(s, rng, want)
        attempts += want
        mask = _accept_mask(s, w)
        if mask.any():
            parts.append(_slice(w, mask))
            have += int(mask.sum())
        if attempts >= 1000 and have / attempts < MIN_ACCEPTANCE:
            raise RejectionBudgetError(
                f"{s.value}: acceptance rate {have / attempts:.2e} below {MIN_ACCEPTANCE}"
            )
    w = _slice(_concat(parts), slice(0, quota))
    obj = asdict(objectives(w))
    maxima, argmax, violations = {}, {}, {}
    for name in SCENARIO_CHECKS[s]:
        vals = np.asarray(obj[name])
        i = int(np.argmax(vals))
        maxima[name] = float(vals[i])
        argmax[name] = w.take(i)
        violations[name] = int(np.count_nonzero(vals > bounds[name] + VIOLATION_MARGIN))
    return _BlockResult(index, quota, attempts, maxima, argmax, violations)


@dataclass
class SampleReport:
    scenario: str
    n: int
    seed: int
    attempts: int
    acceptance_rate: float
    maxima: dict[str, float]
    argmax_windows: dict[str, GrunskyWindow]
    bounds: dict[str, float]
    bound_ids: dict[str, str]
    violations: dict[str, int] = field(default_factory=dict)

    @property
    def violation_count(self) -> int:
        return sum(self.violations.values())


@lru_cache(maxsize=None)
def certified_bounds(s: Scenario | str) -> dict[str, float]:
    """Certified upper bounds (``max_hi``) for the objectives checked in ``s``."""
    from .catalog import get_problem
    from .optimizer import maximize

    return {
        name: maximize(get_problem(pid)).max_hi for name, pid in SCENARIO_CHECKS[Scenario(s)].items()
    }


def sample(
    s: Scenario | str,
    n: int,
    seed: int = 42,
    workers: int = 1,
    bounds: dict[str, float] | None = None,
) -> SampleReport:
    """Draw ``n`` feasible windows and count violations of the certified bounds.

    Samples are generated in fixed blocks of :data:`BLOCK_SIZE`, block ``i``
    seeded by ``(seed, i)``, so the report does not depend on ``workers``.
    """
    s = Scenario(s)
    if n < 1:
        raise ValueError("n must be at least 1")
    bounds = dict(bounds) if bounds is not None else certified_bounds(s)
    quotas = [min(BLOCK_SIZE, n - k) for k in range(0, n, BLOCK_SIZE)]
    args = [(s, seed, i, q, bounds) for i, q in enumerate(quotas)]
    if workers > 1 and len(args) > 1:
        with ProcessPoolExecutor(workers) as ex:
            blocks = list(ex.map(_run_block, *zip(*args)))
    else:
        blocks = [_run_block(*a) for a in args]

    maxima: dict[str, float] = {}
    argmax: dict[str, GrunskyWindow] = {}
    violations = {name: 0 for name in SCENARIO_CHECKS[s]}
    for b in sorted(blocks, key=lambda b: b.index):
        for name, v in b.maxima.items():
            if name not in maxima or v > maxima[name]:
                maxima[name] = v
                argmax[name] = b.argmax[name]
            violations[name] += b.violations[name]
    attempts = sum(b.attempts for b in blocks)
    return SampleReport(
        scenario=s.value,
        n=n,
        seed=seed,
        attempts=attempts,
        acceptance_rate=n / attempts,
        maxima=maxima,
        argmax_windows=argmax,
        bounds=bounds,
        bound_ids=dict(SCENARIO_CHECKS[s]),
        violations=violations,
    )
