import pytest
import sympy as sp
from hypothesis import given, strategies as st

from orient_rr.algebra.ring import laurent_beta, rationals, truncated_universal
from orient_rr.algebra.series import TruncatedSeries, series_ring
from orient_rr.errors import IncompatibleError, NormalizationError, PresentationError
from orient_rr.fgl import (
    FormalGroupLaw,
    Orientation,
    comparison_series,
    fgl_additive,
    fgl_check,
    fgl_from_orientation,
    fgl_inverse,
    fgl_multiplicative,
    identity_orientation,
    law_for,
    multiplicative_orientation,
    theory,
    universal_orientation,
)

from oracles import compose_truncated, reverse_by_substitution, series, to_sympy, truncate_total

x, y, t, b, b1 = sp.symbols("x y t beta b1")


def _conjugate(theta, order):
    """``theta(theta^-1(x) + theta^-1(y))`` computed with sympy."""
    inv = reverse_by_substitution(theta, t, order)
    inner = inv.subs(t, x) + inv.subs(t, y)
    return truncate_total(sp.expand(theta.subs(t, inner)), (x, y), order)


def test_multiplicative_inverse():
    iota = fgl_inverse(fgl_multiplicative(order=4))
    assert to_sympy(iota) == -x - b * x ** 2 - b ** 2 * x ** 3 - b ** 3 * x ** 4
    # F(x, iota(x)) = 0, checked in sympy
    F = x + y - b * x * y
    assert truncate_total(F.subs(y, to_sympy(iota)), (x,), 4) == 0


def test_additive_inverse():
    assert to_sympy(fgl_inverse(fgl_additive(order=5))) == -x


@pytest.mark.parametrize("F", [fgl_additive(order=6), fgl_multiplicative(order=6),
                               fgl_multiplicative(order=8)])
def test_residuals_vanish(F):
    r = fgl_check(F)
    assert r["ok"] and r["associativity"] and r["unit"] and r["commutativity"]
    assert set(r["residuals"].values()) == {"0"}


def test_multiplicative_orientation_recovers_multiplicative_law():
    F = fgl_from_orientation(multiplicative_orientation(order=5))
    assert to_sympy(F) == x + y - b * x * y


def test_universal_order_two_coefficient():
    U = truncated_universal(1, 4)
    F = fgl_from_orientation(universal_orientation(U, 4))
    oracle = _conjugate(t + b1 * t ** 2, 4)
    assert to_sympy(F) == oracle
    # the hand expansion: theta(x' + y') with x' = x - b1 x^2 + ... gives +2 b1 xy
    assert F.coefficient(1, 1) == 2 * U.gen("b1")
    assert sp.Poly(oracle, x, y).coeff_monomial(x * y) == 2 * b1


def test_universal_inverse_order_three():
    U = truncated_universal(1, 3)
    F = fgl_from_orientation(universal_orientation(U, 3))
    iota = to_sympy(fgl_inverse(F))
    Fs = to_sympy(F)
    assert truncate_total(sp.expand(Fs.subs(y, iota)), (x,), 3) == 0
    assert sp.Poly(iota, x).coeff_monomial(x) == -1


def test_comparison_series_examples():
    th = theory("multiplicative", 5)
    mult, ident = th.orientation("multiplicative"), th.orientation("identity")
    assert to_sympy(comparison_series(mult, ident)) == series((1 - sp.exp(-b * t)) / b, t, 5)
    assert to_sympy(comparison_series(ident, mult)) == series(-sp.log(1 - b * t) / b, t, 5)
    assert comparison_series(mult, mult) == TruncatedSeries.variable(th.coeff, 5)


@pytest.mark.parametrize("desc", ["additive", "multiplicative", "universal:3"])
def test_theory_laws_at_order_ten(desc):
    assert fgl_check(law_for(theory(desc, 10)))["ok"]


def test_universal_law_weights():
    F = law_for(theory("universal:3", 6))
    for (i, j), c in F.F.coefficients().items():
        assert c.is_homogeneous(1 - i - j)


def test_corrupted_law_fails():
    R = series_ring(rationals(), ("x", "y"), 5)
    X, Y = R.gen("x"), R.gen("y")
    bad = FormalGroupLaw(TruncatedSeries(X + Y + X ** 2, ("x", "y"), 5), "bad")
    r = fgl_check(bad)
    assert not r["ok"]
    assert not r["commutativity"] and not r["unit"]
    assert r["residuals"]["commutativity"] != "0"


def test_orientation_must_be_normalized():
    with pytest.raises(NormalizationError):
        Orientation(TruncatedSeries.from_list(rationals(), [0, 2], 4), "bad")


def test_comparison_needs_one_coefficient_ring():
    a = identity_orientation(rationals(), 4)
    c = identity_orientation(laurent_beta(), 4)
    with pytest.raises(IncompatibleError):
        comparison_series(a, c)


@pytest.mark.parametrize("desc", ["topological", "universal:0", "universal:x"])
def test_bad_theory_descriptor(desc):
    with pytest.raises(PresentationError):
        theory(desc)


@given(st.lists(st.integers(-3, 3), min_size=4, max_size=4))
def test_any_orientation_gives_a_group_law(cs):
    Q = rationals()
    theta = Orientation(TruncatedSeries.from_list(Q, [0, 1] + cs, 5), "random")
    F = fgl_from_orientation(theta)
    r = fgl_check(F)
    # constant coefficients over Q are not graded, so only the axioms apply
    assert r["unit"] and r["commutativity"] and r["associativity"]
    # inverse is the conjugate of negation: theta(-theta^-1(x))
    ts = to_sympy(theta.theta)
    inv = reverse_by_substitution(ts, t, 5)
    want = compose_truncated(ts, -inv, t, 5).subs(t, x)
    assert to_sympy(fgl_inverse(F)) == sp.expand(want)
