from fractions import Fraction

import pytest
import sympy as sp
from hypothesis import given, strategies as st

from orient_rr.algebra.ring import laurent_beta, rationals, truncated_universal
from orient_rr.algebra.series import (
    TruncatedSeries,
    evaluate_at_nilpotents,
    exp_series,
    geometric_series,
    log1p_series,
    series_compose,
    series_reverse,
)
from orient_rr.algebra.symmetric import (
    expand_elementary,
    substitute_elementary,
    symmetric_reduce,
)
from orient_rr.errors import (
    CompositionDomainError,
    NotInvertibleError,
    PresentationError,
    ReversionError,
    SymmetryError,
    TruncationError,
)

from oracles import reverse_by_substitution, series, to_sympy, truncate

t, b = sp.symbols("t beta")
Q = rationals()
LB = laurent_beta()


def P(n):
    """``Q[h]/(h^(n+1))``."""
    return Q.adjoin("h", n + 1, [0] * (n + 1))


# examples ----------------------------------------------------------------------

def test_compose_square():
    f = TruncatedSeries.from_list(Q, [0, 0, 1], 3)
    g = TruncatedSeries.from_list(Q, [0, 1, 1], 3)
    want = truncate(sp.expand((t + t ** 2) ** 2), t, 3)
    assert to_sympy(series_compose(f, g)) == want == t ** 2 + 2 * t ** 3


def test_compose_exp_log():
    f = exp_series(Q, 8) - 1
    g = log1p_series(Q, 8)
    assert to_sympy(f.compose(g)) == series(sp.exp(sp.log(1 + t)) - 1, t, 8) == t


def test_reverse_multiplicative_coordinate():
    f = TruncatedSeries.from_list(LB, [0, 1, -LB.gen("beta")], 3)
    got = to_sympy(series_reverse(f))
    assert got == reverse_by_substitution(t - b * t ** 2, t, 3)
    assert got == t + b * t ** 2 + 2 * b ** 2 * t ** 3


def test_reverse_one_minus_exp():
    f = TruncatedSeries.from_list(Q, [0] + [Fraction((-1) ** (k + 1), sp.factorial(k))
                                            for k in range(1, 5)], 4)
    g = series_reverse(f)
    assert to_sympy(g) == series(-sp.log(1 - t), t, 4)
    assert to_sympy(f.compose(g)) == t


def test_symmetric_power_sum():
    assert symmetric_reduce({(2, 0): 1, (0, 2): 1}, 2) == {(2, 0): 1, (0, 1): -2}


def test_geometric_series_at_h():
    R = P(2)
    h = R.gen("h")
    assert evaluate_at_nilpotents(geometric_series(Q, 2), [h]) == h + h ** 2


def test_normal_form_projective_bundle_rule():
    # h2^2 = c1 h2 - c2 over Q[h]/(h^2), c1 = h, c2 = 0
    R = P(1)
    h = R.gen("h")
    R2 = R.adjoin("h2", 2, [h, 0])
    h2 = R2.gen("h2")
    assert h2 ** 2 == R2.coerce(h) * h2
    assert h2 ** 3 == 0


def test_laurent_beta_inverse():
    beta = LB.gen("beta")
    assert beta * beta.inverse() == 1
    assert str(beta ** -2) == "beta^-2"


def test_unit_inverse_in_nilpotent_ring():
    R = P(3)
    h = R.gen("h")
    assert (1 - h).inverse() == 1 + h + h ** 2 + h ** 3


# errors ------------------------------------------------------------------------

def test_reversion_needs_unit_linear_term():
    with pytest.raises(ReversionError):
        series_reverse(TruncatedSeries.from_list(Q, [0, 0, 1], 3))


def test_compose_needs_zero_constant():
    f = TruncatedSeries.from_list(Q, [0, 1], 3)
    with pytest.raises(CompositionDomainError):
        series_compose(f, TruncatedSeries.from_list(Q, [1, 1], 3))


def test_symmetry_violation():
    with pytest.raises(SymmetryError):
        symmetric_reduce({(1, 0): 1}, 2)


def test_evaluation_below_nilpotency_bound():
    h = P(4).gen("h")
    with pytest.raises(TruncationError):
        evaluate_at_nilpotents(geometric_series(Q, 3), [h])


def test_non_unit_has_no_inverse():
    with pytest.raises(NotInvertibleError):
        P(2).gen("h").inverse()


def test_relation_must_not_lower_degree():
    R = P(1)
    with pytest.raises(PresentationError):
        R.adjoin("h2", 2, [1, 0])


def test_negative_exponent_only_for_beta():
    with pytest.raises(PresentationError):
        P(2).element({(-1,): 1})


# properties -------------------------------------------------------------------

R3 = P(1).adjoin("h2", 3, [P(1).gen("h"), 0, 0])  # a small tower


def _elements(R):
    mons = R.basis()
    return st.lists(st.integers(-4, 4), min_size=len(mons), max_size=len(mons)).map(
        lambda cs: sum((c * m for c, m in zip(cs, mons)), R.zero))


@given(_elements(R3), _elements(R3), _elements(R3))
def test_ring_axioms(x, y, z):
    assert x * y == y * x
    assert (x * y) * z == x * (y * z)
    assert x * (y + z) == x * y + x * z
    assert x + (-x) == 0
    assert x * R3.one == x


@given(_elements(P(4)), _elements(P(4)))
def test_product_matches_sympy_truncation(x, y):
    h = sp.Symbol("h")
    assert to_sympy(x * y) == truncate(to_sympy(x) * to_sympy(y), h, 4)


_coeffs = st.lists(st.integers(-5, 5), min_size=5, max_size=5)


@given(_coeffs)
def test_reversion_is_an_involution(cs):
    f = TruncatedSeries.from_list(Q, [0, 1] + cs, 6)
    g = series_reverse(f)
    assert series_reverse(g) == f
    assert f.compose(g) == TruncatedSeries.variable(Q, 6)
    assert to_sympy(g) == reverse_by_substitution(to_sympy(f), t, 6)


@given(st.dictionaries(st.tuples(*[st.integers(0, 2)] * 3), st.integers(-3, 3), max_size=5))
def test_symmetric_round_trip(poly_in_e):
    # expand a random polynomial in e_1, e_2, e_3 and reduce it back
    expanded: dict = {}
    for lam, c in poly_in_e.items():
        for e, m in expand_elementary(lam).items():
            expanded[e] = expanded.get(e, 0) + c * m
    want = {k: v for k, v in poly_in_e.items() if v}
    assert symmetric_reduce(expanded, 3) == want


@given(st.lists(st.integers(-3, 3), min_size=3, max_size=3))
def test_substitute_elementary_evaluates(vals):
    # e_1^2 - 2 e_2 at the elementary values of integer roots is the power sum
    y = vals
    e = [sum(y), y[0] * y[1] + y[0] * y[2] + y[1] * y[2], y[0] * y[1] * y[2]]
    red = symmetric_reduce({(2, 0, 0): 1, (0, 2, 0): 1, (0, 0, 2): 1}, 3)
    assert substitute_elementary(red, e, 1) == sum(v * v for v in y)


@given(_coeffs, _coeffs, _elements(P(5)))
def test_evaluation_is_multiplicative(cf, cg, a):
    a = a - a.gen_degree_part(0)  # arguments live in the generator ideal
    f = TruncatedSeries.from_list(Q, [1] + cf, 5)
    g = TruncatedSeries.from_list(Q, [2] + cg, 5)
    assert evaluate_at_nilpotents(f * g, [a]) == evaluate_at_nilpotents(f, [a]) * evaluate_at_nilpotents(g, [a])
    assert evaluate_at_nilpotents(f + g, [a]) == evaluate_at_nilpotents(f, [a]) + evaluate_at_nilpotents(g, [a])


def test_universal_weight_cut():
    U = truncated_universal(3, 4)
    b1, b2 = U.gen("b1"), U.gen("b2")
    assert b1 ** 4 != 0
    assert b1 ** 5 == 0
    assert b1 ** 2 * b2 != 0
    assert b2 ** 3 == 0
