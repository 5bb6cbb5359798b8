"""Expression trees for the closed-form bound functions.

An :class:`Expr` is built with ordinary Python operators from :func:`var`,
integer/:class:`~fractions.Fraction` constants, :func:`csqrt` constants and
:func:`sqrt` radicals.  The same tree evaluates in four modes:

* real point (IEEE doubles)                       -- :func:`eval_point`
* interval enclosure over a box                   -- :func:`eval_interval`
* forward-mode derivative at a point (dual)       -- :func:`eval_derivative`
* interval enclosure of a partial derivative      -- :func:`eval_interval_derivative`

plus a vectorised numpy mode (:func:`eval_array`) used for grid scans.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .interval import DomainError, Interval, inv_positive, pow_int, sqrt_clamped, sqrt_strict

__all__ = [
    "Expr",
    "Const",
    "Var",
    "Add",
    "Sub",
    "Mul",
    "Neg",
    "Pow",
    "Sqrt",
    "Dual",
    "var",
    "const",
    "csqrt",
    "sqrt",
    "eval_point",
    "eval_interval",
    "eval_derivative",
    "eval_interval_derivative",
    "eval_array",
    "RADICAND_EPS",
]

# Point evaluation tolerates radicands this far below zero (rounding noise).
RADICAND_EPS = 1e-12


class Expr:
    """Base node.  Subclasses are immutable."""

    __slots__ = ()

    def __add__(self, other):
        return Add(self, _wrap(other))

    def __radd__(self, other):
        return Add(_wrap(other), self)

    def __sub__(self, other):
        return Sub(self, _wrap(other))

    def __rsub__(self, other):
        return Sub(_wrap(other), self)

    def __mul__(self, other):
        return Mul(self, _wrap(other))

    def __rmul__(self, other):
        return Mul(_wrap(other), self)

    def __neg__(self):
        return Neg(self)

    def __pow__(self, n: int):
        return Pow(self, n)

    def children(self) -> tuple[Expr, ...]:
        return ()

    def walk(self):
        yield self
        for c in self.children():
            yield from c.walk()

    def max_var_index(self) -> int:
        return max((n.index for n in self.walk() if isinstance(n, Var)), default=-1)

    def radicands(self) -> list[Expr]:
        return [n.arg for n in self.walk() if isinstance(n, Sqrt)]


@dataclass(frozen=True, slots=True, eq=False)
class Const(Expr):
    value: float
    enclosure: Interval
    label: str = ""

    def _ev(self, m, p):
        return m.const(self)

    def __repr__(self):
        return self.label or repr(self.value)


@dataclass(frozen=True, slots=True, eq=False)
class Var(Expr):
    index: int

    def _ev(self, m, p):
        return m.var(self.index, p)

    def __repr__(self):
        return "xy"[self.index] if self.index < 2 else f"v{self.index}"


@dataclass(frozen=True, slots=True, eq=False)
class Add(Expr):
    a: Expr
    b: Expr

    def children(self):
        return (self.a, self.b)

    def _ev(self, m, p):
        return self.a._ev(m, p) + self.b._ev(m, p)

    def __repr__(self):
        return f"({self.a!r} + {self.b!r})"


@dataclass(frozen=True, slots=True, eq=False)
class Sub(Expr):
    a: Expr
    b: Expr

    def children(self):
        return (self.a, self.b)

    def _ev(self, m, p):
        return self.a._ev(m, p) - self.b._ev(m, p)

    def __repr__(self):
        return f"({self.a!r} - {self.b!r})"


@dataclass(frozen=True, slots=True, eq=False)
class Mul(Expr):
    a: Expr
    b: Expr

    def children(self):
        return (self.a, self.b)

    def _ev(self, m, p):
        return self.a._ev(m, p) * self.b._ev(m, p)

    def __repr__(self):
        return f"{self.a!r}*{self.b!r}"


@dataclass(frozen=True, slots=True, eq=False)
class Neg(Expr):
    a: Expr

    def children(self):
        return (self.a,)

    def _ev(self, m, p):
        return -self.a._ev(m, p)

    def __repr__(self):
        return f"-{self.a!r}"


@dataclass(frozen=True, slots=True, eq=False)
class Pow(Expr):
    a: Expr
    n: int

    def __post_init__(self):
        if not isinstance(self.n, int) or not 2 <= self.n <= 4:
            raise ValueError(f"integer power must be 2..4, got {self.n!r}")

    def children(self):
        return (self.a,)

    def _ev(self, m, p):
        return m.pow(self.a._ev(m, p), self.n)

    def __repr__(self):
        return f"{self.a!r}^{self.n}"


@dataclass(frozen=True, slots=True, eq=False)
class Sqrt(Expr):
    arg: Expr
    radicand: bool = True  # guarded: argument is nonnegative on the domain

    def children(self):
        return (self.arg,)

    def _ev(self, m, p):
        return m.sqrt(self.arg._ev(m, p), self.radicand)

    def __repr__(self):
        return f"sqrt({self.arg!r})"


# -- constructors -----------------------------------------------------------

def var(index: int) -> Var:
    return Var(index)


def const(q: int | Fraction) -> Const:
    q = Fraction(q)
    return Const(float(q), Interval.from_fraction(q), str(q))


def csqrt(q: int | Fraction) -> Const:
    """The constant ``sqrt(q)`` for a nonnegative rational ``q``."""
    q = Fraction(q)
    if q < 0:
        raise ValueError("csqrt of negative rational")
    enc = sqrt_strict(Interval.from_fraction(q))
    return Const(math.sqrt(float(q)), enc, f"sqrt({q})")


def sqrt(e: Expr, radicand: bool = True) -> Sqrt:
    return Sqrt(_wrap(e), radicand)


def _wrap(x) -> Expr:
    if isinstance(x, Expr):
        return x
    if isinstance(x, (int, Fraction)):
        return const(x)
    raise TypeError(f"cannot use {type(x).__name__} in an expression; use an exact int/Fraction")


# -- dual numbers -----------------------------------------------------------

class Dual:
    """Value/derivative pair; components are floats or Intervals."""

    __slots__ = ("v", "d")

    def __init__(self, v, d):
        self.v = v
        self.d = d

    def __add__(self, o: Dual) -> Dual:
        return Dual(self.v + o.v, self.d + o.d)

    def __sub__(self, o: Dual) -> Dual:
        return Dual(self.v - o.v, self.d - o.d)

    def __mul__(self, o: Dual) -> Dual:
        return Dual(self.v * o.v, self.v * o.d + self.d * o.v)

    def __neg__(self) -> Dual:
        return Dual(-self.v, -self.d)

    def __repr__(self):
        return f"Dual({self.v!r}, {self.d!r})"


# -- evaluation modes -------------------------------------------------------

class _PointMode:
    @staticmethod
    def const(c):
        return c.value

    @staticmethod
    def var(i, p):
        return p[i]

    @staticmethod
    def pow(a, n):
        return a**n

    @staticmethod
    def sqrt(a, guarded):
        if a < 0.0:
            if not guarded or a < -RADICAND_EPS:
                raise DomainError(f"sqrt of negative value {a!r}")
            return 0.0
        return math.sqrt(a)


class _IntervalMode:
    def __init__(self, eps: float = RADICAND_EPS):
        self.eps = eps

    @staticmethod
    def const(c):
        return c.enclosure

    @staticmethod
    def var(i, p):
        return p[i]

    @staticmethod
    def pow(a, n):
        return pow_int(a, n)

    def sqrt(self, a, guarded):
        return sqrt_clamped(a, self.eps) if guarded else sqrt_strict(a)


class _DualMode:
    def __init__(self, wrt: int):
        self.wrt = wrt

    @staticmethod
    def const(c):
        return Dual(c.value, 0.0)

    def var(self, i, p):
        return Dual(p[i], 1.0 if i == self.wrt else 0.0)

    @staticmethod
    def pow(a, n):
        return Dual(a.v**n, n * a.v ** (n - 1) * a.d)

    @staticmethod
    def sqrt(a, guarded):
        if a.v <= 0.0:
            raise DomainError(f"derivative of sqrt is singular at radicand {a.v!r}")
        s = math.sqrt(a.v)
        return Dual(s, a.d / (2.0 * s))


_ZERO = Interval(0.0)
_ONE = Interval(1.0)


class _DualIntervalMode:
    def __init__(self, wrt: int):
        self.wrt = wrt

    @staticmethod
    def const(c):
        return Dual(c.enclosure, _ZERO)

    def var(self, i, p):
        return Dual(p[i], _ONE if i == self.wrt else _ZERO)

    @staticmethod
    def pow(a, n):
        inner = a.v if n == 2 else pow_int(a.v, n - 1)
        return Dual(pow_int(a.v, n), Interval.from_fraction(n) * inner * a.d)

    @staticmethod
    def sqrt(a, guarded):
        if a.v.lo <= 0.0:
            raise DomainError("derivative of sqrt unbounded on this box")
        s = sqrt_strict(a.v)
        return Dual(s, a.d * inv_positive(s + s))


class _ArrayMode:
    @staticmethod
    def const(c):
        return c.value

    @staticmethod
    def var(i, p):
        return p[i]

    @staticmethod
    def pow(a, n):
        return a**n

    @staticmethod
    def sqrt(a, guarded):
        a = np.asarray(a, dtype=float)
        if np.any(a < -RADICAND_EPS) or (not guarded and np.any(a < 0.0)):
            raise DomainError("sqrt of negative value in array evaluation")
        return np.sqrt(np.maximum(a, 0.0))


_POINT = _PointMode()
_INTERVAL = _IntervalMode()
_ARRAY = _ArrayMode()


def eval_point(e: Expr, p: Sequence[float]) -> float:
    """Evaluate ``e`` at the point ``p`` in double precision."""
    return float(e._ev(_POINT, tuple(float(v) for v in p)))


def eval_interval(e: Expr, box: Sequence[Interval], eps: float = RADICAND_EPS) -> Interval:
    """Enclosure of the range of ``e`` over ``box``."""
    mode = _INTERVAL if eps == RADICAND_EPS else _IntervalMode(eps)
    r = e._ev(mode, tuple(box))
    return r if isinstance(r, Interval) else Interval(r)


def eval_derivative(e: Expr, p: Sequence[float], wrt: int) -> float:
    """Partial derivative of ``e`` with respect to variable ``wrt`` at ``p``."""
    r = e._ev(_DualMode(wrt), tuple(float(v) for v in p))
    return float(r.d)


def eval_interval_derivative(e: Expr, box: Sequence[Interval], wrt: int) -> Interval:
    """Enclosure of the partial derivative over ``box``.

    Raises :class:`DomainError` when some radicand may vanish on the box,
    since the derivative of the square root is then unbounded.
    """
    r = e._ev(_DualIntervalMode(wrt), tuple(box))
    return r.d


def eval_array(e: Expr, arrays: Sequence[np.ndarray]) -> np.ndarray:
    """Vectorised double-precision evaluation over coordinate arrays."""
    arrs = tuple(np.asarray(a, dtype=float) for a in arrays)
    r = e._ev(_ARRAY, arrs)
    return np.broadcast_to(np.asarray(r, dtype=float), np.broadcast(*arrs).shape).copy()
