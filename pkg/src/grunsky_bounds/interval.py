"""Outward-rounded interval arithmetic.

Rounding is emulated rather than switched in the FPU: every endpoint is
computed in round-to-nearest, the exact rounding error is recovered with an
error-free transformation (TwoSum, Dekker's TwoProduct, or an exact square
residual for sqrt), and the endpoint is nudged one ulp outward only when the
error points the wrong way.  Exact results therefore stay exact, and inexact
ones are rounded in the correct direction.  No global state is touched, so
evaluation is safe from any thread or process.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Iterable, Sequence

__all__ = [
    "DomainError",
    "Interval",
    "Box",
    "add",
    "sub",
    "mul",
    "neg",
    "sqrt_clamped",
    "sqrt_strict",
    "pow_int",
    "inv_positive",
    "hull",
    "box_midpoint",
    "box_width",
]

_INF = math.inf
_SPLITTER = 134217729.0  # 2**27 + 1

# Dekker's splitting overflows above _SAFE_MAX; below _SAFE_MIN the product
# error term may be subnormal and inexact.  TwoSum is exact short of overflow.
_SAFE_MAX = 2.0**500
_SAFE_MIN = 2.0**-900
_SUM_MAX = 2.0**1000


class DomainError(ValueError):
    """Raised when an operation leaves its mathematical domain."""


def _down(x: float) -> float:
    return math.nextafter(x, -_INF)


def _up(x: float) -> float:
    return math.nextafter(x, _INF)


def _two_sum_err(a: float, b: float, s: float) -> float:
    bb = s - a
    return (a - (s - bb)) + (b - bb)


def _split(a: float) -> tuple[float, float]:
    c = _SPLITTER * a
    hi = c - (c - a)
    return hi, a - hi


def _two_prod_err(a: float, b: float, p: float) -> float:
    ah, al = _split(a)
    bh, bl = _split(b)
    return ((ah * bh - p) + ah * bl + al * bh) + al * bl


def _safe(x: float) -> bool:
    ax = abs(x)
    return ax == 0.0 or _SAFE_MIN < ax < _SAFE_MAX


def add_down(a: float, b: float) -> float:
    s = a + b
    if not abs(s) < _SUM_MAX:
        return _down(s)
    return _down(s) if _two_sum_err(a, b, s) < 0 else s


def add_up(a: float, b: float) -> float:
    s = a + b
    if not abs(s) < _SUM_MAX:
        return _up(s)
    return _up(s) if _two_sum_err(a, b, s) > 0 else s


def _mul_err_sign(a: float, b: float, p: float) -> float | None:
    """Sign carrier of ``a*b - p``, or None when it cannot be computed exactly."""
    if abs(a) >= _SAFE_MAX or abs(b) >= _SAFE_MAX or abs(p) <= _SAFE_MIN:
        return None
    return _two_prod_err(a, b, p)


def mul_down(a: float, b: float) -> float:
    p = a * b
    if a == 0.0 or b == 0.0:
        return 0.0
    err = _mul_err_sign(a, b, p)
    if err is None:
        d = _down(p)
        # a positive true product never needs a negative lower bound
        return max(d, 0.0) if (a > 0) == (b > 0) else d
    return _down(p) if err < 0 else p


def mul_up(a: float, b: float) -> float:
    p = a * b
    if a == 0.0 or b == 0.0:
        return 0.0
    err = _mul_err_sign(a, b, p)
    if err is None:
        u = _up(p)
        return min(u, 0.0) if (a > 0) != (b > 0) else u
    return _up(p) if err > 0 else p


def _sqrt_residual(a: float, s: float) -> float:
    # sign of a - s*s, computed exactly
    p = s * s
    return (a - p) - _two_prod_err(s, s, p)


def sqrt_down(a: float) -> float:
    if a <= 0.0:
        return 0.0
    s = math.sqrt(a)
    if not (_safe(a) and _safe(s)):
        return _down(s)
    return _down(s) if _sqrt_residual(a, s) < 0 else s


def sqrt_up(a: float) -> float:
    if a <= 0.0:
        return 0.0
    s = math.sqrt(a)
    if not (_safe(a) and _safe(s)):
        return _up(s)
    return _up(s) if _sqrt_residual(a, s) > 0 else s


class Interval:
    """Closed interval ``[lo, hi]`` of finite doubles."""

    __slots__ = ("lo", "hi")

    def __init__(self, lo: float, hi: float | None = None) -> None:
        lo = float(lo)
        hi = lo if hi is None else float(hi)
        if math.isnan(lo) or math.isnan(hi):
            raise ValueError("interval endpoint is NaN")
        if math.isinf(lo) or math.isinf(hi):
            raise ValueError(f"interval endpoint is infinite: [{lo}, {hi}]")
        if lo > hi:
            raise ValueError(f"empty interval: [{lo}, {hi}]")
        self.lo = lo
        self.hi = hi

    @classmethod
    def point(cls, x: float) -> Interval:
        return cls(x, x)

    @classmethod
    def from_fraction(cls, q: Fraction | int) -> Interval:
        """Tightest enclosure of an exact rational."""
        q = Fraction(q)
        f = float(q)
        exact = Fraction(f)
        if exact == q:
            return cls(f, f)
        if exact < q:
            return cls(f, _up(f))
        return cls(_down(f), f)

    # -- queries ---------------------------------------------------------
    @property
    def width(self) -> float:
        return self.hi - self.lo

    @property
    def mid(self) -> float:
        m = 0.5 * self.lo + 0.5 * self.hi
        return min(max(m, self.lo), self.hi)

    def __contains__(self, x: object) -> bool:
        if isinstance(x, Interval):
            return self.lo <= x.lo and x.hi <= self.hi
        return self.lo <= x <= self.hi  # type: ignore[operator]

    def subset_of(self, other: Interval) -> bool:
        return other.lo <= self.lo and self.hi <= other.hi

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Interval):
            return NotImplemented
        return self.lo == other.lo and self.hi == other.hi

    def __hash__(self) -> int:
        return hash((self.lo, self.hi))

    def __repr__(self) -> str:
        return f"Interval({self.lo!r}, {self.hi!r})"

    def __iter__(self):
        yield self.lo
        yield self.hi

    # -- arithmetic ------------------------------------------------------
    def __add__(self, other: Interval | float) -> Interval:
        return add(self, _coerce(other))

    __radd__ = __add__

    def __sub__(self, other: Interval | float) -> Interval:
        return sub(self, _coerce(other))

    def __rsub__(self, other: float) -> Interval:
        return sub(_coerce(other), self)

    def __mul__(self, other: Interval | float) -> Interval:
        return mul(self, _coerce(other))

    __rmul__ = __mul__

    def __neg__(self) -> Interval:
        return neg(self)

    def __pow__(self, n: int) -> Interval:
        return pow_int(self, n)


Box = tuple[Interval, ...]


def _coerce(x: Interval | float) -> Interval:
    if isinstance(x, Interval):
        return x
    if isinstance(x, (int, Fraction)):
        return Interval.from_fraction(x)
    return Interval(x, x)


def add(a: Interval, b: Interval) -> Interval:
    return Interval(add_down(a.lo, b.lo), add_up(a.hi, b.hi))


def sub(a: Interval, b: Interval) -> Interval:
    return Interval(add_down(a.lo, -b.hi), add_up(a.hi, -b.lo))


def neg(a: Interval) -> Interval:
    return Interval(-a.hi, -a.lo)


def mul(a: Interval, b: Interval) -> Interval:
    al, ah, bl, bh = a.lo, a.hi, b.lo, b.hi
    if al >= 0.0 and bl >= 0.0:
        return Interval(mul_down(al, bl), mul_up(ah, bh))
    if al == ah and bl == bh:
        return Interval(mul_down(al, bl), mul_up(al, bl))
    lo = min(mul_down(al, bl), mul_down(al, bh), mul_down(ah, bl), mul_down(ah, bh))
    hi = max(mul_up(al, bl), mul_up(al, bh), mul_up(ah, bl), mul_up(ah, bh))
    return Interval(lo, hi)


def _pow_nonneg(x: float, n: int, mulr) -> float:
    r = x
    for _ in range(n - 1):
        r = mulr(r, x)
    return r


def pow_int(a: Interval, n: int) -> Interval:
    """``a**n`` for ``n`` in 1..4, tight at zero for even powers."""
    if not isinstance(n, int) or not 1 <= n <= 4:
        raise ValueError(f"unsupported exponent {n!r}; expected 1..4")
    if n == 1:
        return a
    lo, hi = a.lo, a.hi
    if lo >= 0.0:
        return Interval(_pow_nonneg(lo, n, mul_down), _pow_nonneg(hi, n, mul_up))
    if hi <= 0.0:
        inner = Interval(_pow_nonneg(-hi, n, mul_down), _pow_nonneg(-lo, n, mul_up))
        return inner if n % 2 == 0 else neg(inner)
    # straddles zero
    if n % 2 == 0:
        return Interval(0.0, _pow_nonneg(max(-lo, hi), n, mul_up))
    return Interval(-_pow_nonneg(-lo, n, mul_up), _pow_nonneg(hi, n, mul_up))


def sqrt_clamped(a: Interval, eps: float = 1e-12) -> Interval:
    """Square root of ``a`` intersected with ``[0, inf)``.

    A slightly negative lower endpoint is clamped to zero; this is only sound
    for radicands that are mathematically nonnegative on the region being
    evaluated.  An upper endpoint below ``-eps`` means the radicand is
    genuinely negative and raises :class:`DomainError`.
    """
    if a.hi < -eps:
        raise DomainError(f"negative radicand {a!r}")
    lo = sqrt_down(a.lo) if a.lo > 0.0 else 0.0
    hi = sqrt_up(a.hi) if a.hi > 0.0 else 0.0
    return Interval(lo, hi)


def sqrt_strict(a: Interval) -> Interval:
    if a.lo < 0.0:
        raise DomainError(f"sqrt of interval with negative part {a!r}")
    return sqrt_clamped(a, 0.0)


def _div_down(a: float, b: float) -> float:
    q = a / b
    # sign of a - q*b decides the rounding direction (b > 0 here)
    r = (a - q * b) - _two_prod_err(q, b, q * b) if _safe(q) and _safe(b) else None
    if r is None:
        return _down(q)
    return _down(q) if r < 0 else q


def _div_up(a: float, b: float) -> float:
    q = a / b
    r = (a - q * b) - _two_prod_err(q, b, q * b) if _safe(q) and _safe(b) else None
    if r is None:
        return _up(q)
    return _up(q) if r > 0 else q


def inv_positive(a: Interval) -> Interval:
    """``1/a`` for a strictly positive interval (used only by derivative bounds)."""
    if a.lo <= 0.0:
        raise DomainError(f"reciprocal of interval touching zero {a!r}")
    return Interval(_div_down(1.0, a.hi), _div_up(1.0, a.lo))


def hull(items: Iterable[Interval]) -> Interval:
    items = list(items)
    if not items:
        raise ValueError("hull of nothing")
    return Interval(min(i.lo for i in items), max(i.hi for i in items))


def box_midpoint(box: Sequence[Interval]) -> tuple[float, ...]:
    return tuple(iv.mid for iv in box)


def box_width(box: Sequence[Interval]) -> float:
    return max(iv.width for iv in box)
