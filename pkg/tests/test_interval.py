import math
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from grunsky_bounds.interval import (
    DomainError,
    Interval,
    add,
    hull,
    inv_positive,
    mul,
    neg,
    pow_int,
    sqrt_clamped,
    sub,
)

F = Fraction


def test_add_exact_endpoints():
    assert add(Interval(1, 2), Interval(3, 4)) == Interval(4, 6)


def test_mul_symmetric():
    assert mul(Interval(-1, 1), Interval(-1, 1)) == Interval(-1, 1)


def test_additive_identity():
    a = Interval(0.1, 0.7)
    assert add(Interval(0, 0), a) == a


def test_sub_and_neg():
    assert sub(Interval(1, 2), Interval(3, 5)) == Interval(-4, -1)
    assert neg(Interval(-1, 3)) == Interval(-3, 1)


def test_inexact_sum_is_rounded_outward():
    r = Interval(0.1) + Interval(0.2)
    assert r.lo < r.hi
    assert F(r.lo) <= F(0.1) + F(0.2) <= F(r.hi)


def test_sqrt_exact_squares():
    assert sqrt_clamped(Interval(0.25, 1)) == Interval(0.5, 1)


def test_sqrt_clamps_rounding_noise():
    r = sqrt_clamped(Interval(-1e-18, 4))
    assert r.lo == 0.0
    assert 2.0 <= r.hi <= math.nextafter(2.0, 3.0)


def test_sqrt_negative_radicand():
    with pytest.raises(DomainError):
        sqrt_clamped(Interval(-1, -0.5), eps=1e-12)


@pytest.mark.parametrize(
    "a, n, expected",
    [
        (Interval(-2, 1), 2, Interval(0, 4)),
        (Interval(0.5, 0.5), 3, Interval(0.125, 0.125)),
        (Interval(1, 2), 4, Interval(1, 16)),
        (Interval(-2, -1), 3, Interval(-8, -1)),
        (Interval(-3, 2), 3, Interval(-27, 8)),
        (Interval(-3, -2), 4, Interval(16, 81)),
    ],
)
def test_pow_int(a, n, expected):
    assert pow_int(a, n) == expected


def test_pow_rejects_big_exponent():
    with pytest.raises(ValueError):
        pow_int(Interval(1, 2), 5)


def test_constructor_rejects_bad_endpoints():
    with pytest.raises(ValueError):
        Interval(2, 1)
    with pytest.raises(ValueError):
        Interval(math.nan, 1)
    with pytest.raises(ValueError):
        Interval(0, math.inf)


def test_from_fraction_encloses():
    for q in (F(1, 3), F(4, 5), F(27, 4), F(-2, 7)):
        iv = Interval.from_fraction(q)
        assert F(iv.lo) <= q <= F(iv.hi)
    assert Interval.from_fraction(F(27, 4)).width == 0.0


def test_inv_positive():
    r = inv_positive(Interval(3.0, 7.0))
    assert F(r.lo) <= F(1, 7) and F(1, 3) <= F(r.hi)
    with pytest.raises(DomainError):
        inv_positive(Interval(0.0, 1.0))


def test_hull():
    assert hull([Interval(0, 1), Interval(-2, 0.5)]) == Interval(-2, 1)


# -- randomized containment against exact rational arithmetic ---------------

def _rand_interval(r: random.Random) -> Interval:
    scale = 10.0 ** r.randint(-6, 3)
    a, b = r.uniform(-1, 1) * scale, r.uniform(-1, 1) * scale
    if r.random() < 0.1:
        b = a
    return Interval(min(a, b), max(a, b))


def _rand_point(r: random.Random, iv: Interval) -> float:
    return min(max(iv.lo + r.random() * (iv.hi - iv.lo), iv.lo), iv.hi)


def _contains_exact(iv: Interval, q: Fraction) -> bool:
    return F(iv.lo) <= q <= F(iv.hi)


def test_containment_randomized():
    r = random.Random(7)
    for _ in range(100_000):
        a, b = _rand_interval(r), _rand_interval(r)
        x, y = F(_rand_point(r, a)), F(_rand_point(r, b))
        op = r.randrange(6)
        if op == 0:
            assert _contains_exact(add(a, b), x + y)
        elif op == 1:
            assert _contains_exact(sub(a, b), x - y)
        elif op == 2:
            assert _contains_exact(mul(a, b), x * y)
        elif op == 3:
            assert _contains_exact(neg(a), -x)
        elif op == 4:
            n = r.randint(2, 4)
            assert _contains_exact(pow_int(a, n), x**n)
        else:
            aa = Interval(abs(a.lo) if a.lo >= 0 else 0.0, abs(a.hi) + abs(a.lo))
            z = F(_rand_point(r, aa))
            s = sqrt_clamped(aa)
            assert F(s.lo) ** 2 <= z <= F(s.hi) ** 2


finite = st.floats(min_value=-1e6, max_value=1e6, allow_nan=False, allow_infinity=False)


@st.composite
def nested(draw):
    """(inner, outer) with inner a subset of outer."""
    a, b, c, d = sorted(draw(st.lists(finite, min_size=4, max_size=4)))
    return Interval(b, c), Interval(a, d)


@settings(max_examples=400, deadline=None)
@given(nested(), nested())
def test_inclusion_monotonicity(ab, cd):
    a, a2 = ab
    b, b2 = cd
    for op in (add, sub, mul):
        assert op(a, b).subset_of(op(a2, b2))
    for n in (2, 3, 4):
        assert pow_int(a, n).subset_of(pow_int(a2, n))
    if a.lo >= 0:
        assert sqrt_clamped(a).subset_of(sqrt_clamped(a2, eps=math.inf))


@settings(max_examples=200, deadline=None)
@given(st.floats(min_value=0.01, max_value=100.0), st.floats(min_value=-50.0, max_value=50.0))
def test_width_convergence(x, y):
    widths = []
    for delta in (1e-3, 1e-6, 1e-9):
        a = Interval(x - delta, x + delta)
        b = Interval(y - delta, y + delta)
        w = max(
            add(a, b).width,
            mul(a, b).width,
            pow_int(a, 3).width,
            sqrt_clamped(a).width,
        )
        widths.append(w)
    assert widths[0] > widths[1] > widths[2]
