"""Registry of the bound problems: objective, domain, expected maximum.

Variables: ``x`` (index 0) stands for ``|w11|`` and ``y`` for ``|w13|``; the
one-variable problems that are naturally functions of ``|w13|`` still use
variable index 0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction as Q
from functools import lru_cache
from typing import Callable, Optional, Sequence

from .expr import Expr, csqrt, eval_interval, eval_point, sqrt, var
from .interval import Interval, sqrt_strict

__all__ = [
    "DomainSpec",
    "BoundProblem",
    "catalog",
    "f6_edge_curves",
    "all_problems",
    "get_problem",
    "problem_ids",
    "UnknownProblemError",
    "CLOSED_FORMS",
]


class UnknownProblemError(KeyError):
    pass


@dataclass(frozen=True)
class DomainSpec:
    """Bounding box plus an optional feasibility constraint ``g(p) >= 0``.

    ``project`` maps a point of the bounding box towards the feasible set; it
    is used only to place witness points inside boundary boxes.
    """

    box: tuple[Interval, ...]
    constraint: Optional[Expr] = None
    project: Optional[Callable[[tuple[float, ...]], tuple[float, ...]]] = None

    def contains(self, p: Sequence[float], eps: float = 1e-12) -> bool:
        if len(p) != len(self.box):
            return False
        if not all(iv.lo <= v <= iv.hi for iv, v in zip(self.box, p)):
            return False
        if self.constraint is not None:
            return eval_point(self.constraint, p) >= -eps
        return True


@dataclass(frozen=True)
class BoundProblem:
    id: str
    arity: int
    objective: Expr
    domain: DomainSpec
    expected_value: float
    expected_note: str
    expected_argmax: tuple[float, ...]
    value_tolerance: float
    argmax_tolerance: float
    theorem_tag: str
    closed_form: Optional[float] = None
    closed_form_label: str = ""
    description: str = field(default="", compare=False)

    def __post_init__(self):
        if self.arity not in (1, 2):
            raise ValueError(f"{self.id}: arity must be 1 or 2")
        if self.objective.max_var_index() >= self.arity:
            raise ValueError(f"{self.id}: objective uses a variable beyond arity {self.arity}")
        if len(self.domain.box) != self.arity or len(self.expected_argmax) != self.arity:
            raise ValueError(f"{self.id}: domain/argmax dimension mismatch")
        if not self.domain.contains(self.expected_argmax):
            raise ValueError(f"{self.id}: expected argmax {self.expected_argmax} outside domain")
        v = eval_point(self.objective, self.expected_argmax)
        if abs(v - self.expected_value) > self.value_tolerance:
            raise ValueError(
                f"{self.id}: objective at expected argmax is {v!r}, "
                f"not within {self.value_tolerance} of {self.expected_value!r}"
            )
        _check_radicands(self)


def _check_radicands(problem: BoundProblem, cells: int = 32, eps: float = 1e-12) -> None:
    """Every radicand must be nonnegative wherever the constraint holds.

    Checked on a grid of sub-boxes: cells entirely inside the feasible set must
    have radicand enclosures with ``lo >= -eps``.  Cells straddling the
    constraint boundary are left to the constraint itself.
    """
    rads = problem.objective.radicands()
    if not rads:
        return
    dom = problem.domain
    axes = []
    for iv in dom.box:
        edges = [iv.lo + (iv.hi - iv.lo) * k / cells for k in range(cells)] + [iv.hi]
        axes.append([Interval(a, b) for a, b in zip(edges, edges[1:])])
    grids = [(a,) for a in axes[0]] if problem.arity == 1 else [(a, b) for a in axes[0] for b in axes[1]]
    for cell in grids:
        if dom.constraint is not None and eval_interval(dom.constraint, cell).lo < 0.0:
            continue
        for r in rads:
            if eval_interval(r, cell).lo < -eps:
                raise ValueError(f"{problem.id}: radicand {r!r} may be negative on {cell}")


# -- building blocks --------------------------------------------------------

x = var(0)
y = var(1)
t = var(0)  # single-variable problems

_UNIT = Interval(0.0, 1.0)
# upper end of the outward enclosure of 1/sqrt(3); the constraint trims the rest
_Y_MAX = sqrt_strict(Interval.from_fraction(Q(1, 3))).hi

S7 = math.sqrt(7.0)
S5 = math.sqrt(5.0)

CLOSED_FORMS = {
    "a5_a2zero": ("3/4 + 1/sqrt(7)", 0.75 + 1.0 / S7),
    "f2": ("(1/4)sqrt(21/5) + 5/8", 0.25 * math.sqrt(21.0 / 5.0) + 0.625),
    "f4": ("(1/4)sqrt(21/5) + 5/8", 0.25 * math.sqrt(21.0 / 5.0) + 0.625),
    "a5_minus_a3_odd": ("2/sqrt(7)", 2.0 / S7),
    "f6_edge_0": ("2/sqrt(5)", 2.0 / S5),
}

_R13 = 1 - 3 * t**2                      # 1 - 3y^2
_R27 = 1 - t**2 - Q(27, 4) * t**4        # 1 - x^2 - (27/4)x^4
_R_D1 = 1 - x**2 - 3 * y**2              # 1 - x^2 - 3y^2

F1 = 2 * t**3 + Q(4, 5) * _R13 + 4 * csqrt(Q(1, 7)) * t * sqrt(_R13)
A5_A2ZERO = 2 * csqrt(Q(1, 7)) * sqrt(_R13) + 3 * t**2
F2 = 2 * csqrt(Q(1, 5)) * sqrt(_R27) + 5 * t**3
F3 = (2 * csqrt(Q(1, 7)) + 6 * csqrt(Q(1, 5)) * t) * sqrt(_R27) + Q(25, 4) * t**4
F4 = 4 * csqrt(Q(1, 5)) * t * sqrt(_R27) + 10 * t**4
F5 = Q(1, 5) * _R27 + (4 * csqrt(Q(1, 5)) * t**3 + 8 * csqrt(Q(1, 7)) * t**2) * sqrt(_R27)
F6 = 2 * csqrt(Q(1, 5)) * sqrt(_R_D1) + 4 * x * y + x**3
A5_MINUS_A3_ODD = 2 * csqrt(Q(1, 7)) * sqrt(_R13) + t**2

EDGE_0 = 2 * csqrt(Q(1, 5)) * sqrt(_R13)
EDGE_Y0 = 2 * csqrt(Q(1, 5)) * sqrt(1 - t**2) + t**3
EDGE_CURVE = 4 * csqrt(Q(1, 3)) * t * sqrt(1 - t**2) + t**3


def project_d1(p: tuple[float, ...]) -> tuple[float, ...]:
    """Shrink ``y`` onto ``y <= sqrt(1 - x^2)/sqrt(3)``."""
    px, py = p
    cap = math.sqrt(max(0.0, 1.0 - px * px)) / math.sqrt(3.0)
    return (px, min(py, cap))


def _cf(pid: str) -> dict:
    label, value = CLOSED_FORMS[pid]
    return {"closed_form": value, "closed_form_label": label}


@lru_cache(maxsize=None)
def catalog() -> tuple[BoundProblem, ...]:
    """The eight bound problems."""
    one_half = DomainSpec((Interval(0.0, 0.5),))
    d1 = DomainSpec((_UNIT, Interval(0.0, _Y_MAX)), constraint=_R_D1, project=project_d1)
    return (
        BoundProblem(
            "f1", 1, F1, one_half, 1.026, "1.026 (|H3(1)| with a2 = 0)", (0.286667,),
            5e-4, 1e-4, "|H3(1)|, a2 = 0",
            description="2y^3 + (4/5)(1-3y^2) + (4/sqrt7) y sqrt(1-3y^2), 0<=y<=1/2",
        ),
        BoundProblem(
            "a5_a2zero", 1, A5_A2ZERO, one_half, CLOSED_FORMS["a5_a2zero"][1],
            "3/4 + 1/sqrt(7) = 1.12796 (|a5| with a2 = 0)", (0.5,), 1e-12, 1e-6, "|a5|, a2 = 0",
            description="(2/sqrt7) sqrt(1-3y^2) + 3y^2, 0<=y<=1/2",
            **_cf("a5_a2zero"),
        ),
        BoundProblem(
            "f2", 1, F2, one_half, CLOSED_FORMS["f2"][1],
            "(1/4)sqrt(21/5) + 5/8 = 1.1373 (|a4| with a3 = 0)", (0.5,), 1e-12, 1e-6, "|a4|, a3 = 0",
            description="(2/sqrt5) sqrt(1-x^2-(27/4)x^4) + 5x^3, 0<=x<=1/2",
            **_cf("f2"),
        ),
        BoundProblem(
            "f3", 1, F3, one_half, 1.674896577, "1.674896577 (|a5| with a3 = 0)", (0.43957885,),
            1e-9, 1e-6, "|a5|, a3 = 0",
            description="(2/sqrt7 + (6/sqrt5)x) sqrt(1-x^2-(27/4)x^4) + (25/4)x^4, 0<=x<=1/2",
        ),
        BoundProblem(
            "f4", 1, F4, one_half, CLOSED_FORMS["f4"][1],
            "1.1373 (|H2(2)| with a3 = 0)", (0.5,), 1e-12, 1e-6, "|H2(2)|, a3 = 0",
            description="(4/sqrt5) x sqrt(1-x^2-(27/4)x^4) + 10x^4, 0<=x<=1/2",
            **_cf("f4"),
        ),
        BoundProblem(
            "f5", 1, F5, one_half, 0.6647958756, "0.6647958756 (|H3(1)| with a3 = 0)", (0.458573,),
            1e-9, 1e-5, "|H3(1)|, a3 = 0",
            description="(1/5)R + ((4/sqrt5)x^3 + (8/sqrt7)x^2) sqrt(R), R = 1-x^2-(27/4)x^4, 0<=x<=1/2",
        ),
        BoundProblem(
            "f6", 2, F6, d1, 1.75185, "1.75185 (|a4| - |a3|)", (0.83634, 0.2872),
            1e-4, 1e-3, "|a4| - |a3|",
            description="(2/sqrt5) sqrt(1-x^2-3y^2) + 4xy + x^3 on D1",
        ),
        BoundProblem(
            "a5_minus_a3_odd", 1, A5_MINUS_A3_ODD, one_half, CLOSED_FORMS["a5_minus_a3_odd"][1],
            "2/sqrt(7) = 0.7559 (|a5| - |a3|, f odd)", (0.0,), 1e-12, 1e-6, "|a5| - |a3|, f odd",
            description="(2/sqrt7) sqrt(1-3y^2) + y^2, 0<=y<=1/2",
            **_cf("a5_minus_a3_odd"),
        ),
    )


@lru_cache(maxsize=None)
def f6_edge_curves() -> tuple[BoundProblem, ...]:
    """F6 restricted to the three edges of D1."""
    return (
        BoundProblem(
            "f6_edge_0", 1, EDGE_0, DomainSpec((Interval(0.0, _Y_MAX),)),
            CLOSED_FORMS["f6_edge_0"][1], "2/sqrt(5) = 0.8944 (F6 on x = 0)", (0.0,),
            1e-12, 1e-6, "|a4| - |a3|, edge of D1",
            description="(2/sqrt5) sqrt(1-3y^2), 0<=y<=1/sqrt3",
            **_cf("f6_edge_0"),
        ),
        BoundProblem(
            "f6_edge_y0", 1, EDGE_Y0, DomainSpec((_UNIT,)), 1.13666, "1.13666 (F6 on y = 0)",
            (0.9494,), 5e-4, 1e-4, "|a4| - |a3|, edge of D1",
            description="(2/sqrt5) sqrt(1-x^2) + x^3, 0<=x<=1",
        ),
        BoundProblem(
            "f6_edge_curve", 1, EDGE_CURVE, DomainSpec((_UNIT,)), 1.6496,
            "1.6496 (F6 on y = sqrt(1-x^2)/sqrt3)", (0.8628,), 5e-4, 1e-4, "|a4| - |a3|, edge of D1",
            description="(4/sqrt3) x sqrt(1-x^2) + x^3, 0<=x<=1",
        ),
    )


def all_problems() -> tuple[BoundProblem, ...]:
    return catalog() + f6_edge_curves()


def problem_ids() -> list[str]:
    return [p.id for p in all_problems()]


def get_problem(pid: str) -> BoundProblem:
    for p in all_problems():
        if p.id == pid:
            return p
    raise UnknownProblemError(pid)
