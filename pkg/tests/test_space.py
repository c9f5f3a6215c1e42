import pytest
import sympy as sp
from hypothesis import given, strategies as st

from orient_rr.classes import chern_total, context, euler
from orient_rr.errors import (
    BaseMismatchError,
    DegenerateBundleError,
    EmbeddingError,
    PresentationError,
    RankError,
)
from orient_rr.fgl import theory
from orient_rr.space import (
    Bundle,
    RingMap,
    bundle_dual,
    bundle_pullback,
    bundle_sum,
    chern_bundle,
    compose_embeddings,
    embed_linear,
    embed_zero_section,
    proj_bundle,
    projective_space,
    relative_tangent,
    roots_bundle,
    trivial,
    twisting_line,
    universal_quotient,
)

from oracles import to_sympy, truncate

ADD = theory("additive")
MULT = theory("multiplicative")
UNIV = theory("universal:3")
THEORIES = [ADD, MULT, UNIV]
h = sp.Symbol("h")


def test_projective_bundle_relation_over_p1():
    P1 = projective_space(1, ADD)
    P = proj_bundle(P1, roots_bundle(P1, [0, P1.h]))
    h2 = P.h
    assert h2 ** 2 == P.pull(P1.h) * h2
    assert [str(b) for b in P.basis()] == ["1", "h", "h2", "h*h2"]


@pytest.mark.parametrize("n", [1, 2, 3, 4])
@pytest.mark.parametrize("th", THEORIES, ids=lambda t: t.name)
def test_universal_quotient_of_projective_space(th, n):
    P = projective_space(n, th)
    xi = universal_quotient(P)
    want = truncate(sp.series(1 / (1 + h), h, 0, n + 1).removeO(), h, n)
    assert to_sympy(xi.total_chern()) == want
    assert xi.rank == n


def test_quotient_examples():
    P2 = projective_space(2, ADD)
    h2 = P2.h
    assert universal_quotient(P2).chern_classes() == (-h2, h2 ** 2)
    assert universal_quotient(projective_space(1, ADD)).chern_classes() == (-projective_space(1, ADD).h,)


@pytest.mark.parametrize("n", [1, 2, 3])
def test_relative_tangent_euler_sequence(n):
    # additive coordinates: c(T) = (1 + c_1(O(1)))^(n+1) = (1 - h)^(n+1)
    P = projective_space(n, ADD)
    T = relative_tangent(P)
    assert T.rank == n
    assert to_sympy(T.total_chern()) == truncate(sp.expand((1 - h) ** (n + 1)), h, n)


def test_tangent_first_chern_examples():
    for n, want in ((1, -2), (2, -3)):
        P = projective_space(n, ADD)
        assert relative_tangent(P).chern_classes()[0] == want * P.h


def test_multiplicative_twisting_lines():
    P2 = projective_space(2, MULT)
    x = P2.h
    beta = P2.ring.gen("beta")
    # O(-1) = lambda has coordinate class h; O(1) has iota(h) = -h/(1 - beta h)
    assert twisting_line(P2, -1).roots[0] == x
    assert twisting_line(P2, 1).roots[0] == -x - beta * x ** 2
    assert twisting_line(P2, 0).roots[0] == 0
    # O(1) (x) O(-1) = O
    F = MULT.coordinate_law
    assert F(twisting_line(P2, 1).roots[0], twisting_line(P2, -1).roots[0]) == 0


@given(st.integers(-4, 4), st.integers(-4, 4))
def test_twisting_lines_add(a, b):
    P = projective_space(3, MULT)
    F = MULT.coordinate_law
    s = F(twisting_line(P, a).roots[0], twisting_line(P, b).roots[0])
    assert s == twisting_line(P, a + b).roots[0]


@pytest.mark.parametrize("th", THEORIES, ids=lambda t: t.name)
def test_dual_is_involutive(th):
    P = projective_space(3, th)
    E = roots_bundle(P, [P.h, -P.h, 0])
    assert bundle_dual(bundle_dual(E)).total_chern() == E.total_chern()


def test_zero_section_of_trivial_line():
    pt = projective_space(0, ADD).base
    P, s = embed_zero_section(pt, trivial(pt, 1))
    assert s.fdl() == -P.h
    assert P.label == "P(O+1)"


def test_linear_embedding_fundamental_classes():
    e = embed_linear(0, 1, ADD)
    assert e.fdl() == -e.target.h
    assert e.restrict(e.fdl()) == 0
    e = embed_linear(1, 2, ADD)
    assert e.fdl() == -e.target.h
    # self-intersection: restriction of fdl is c_1(O(1)) on P^1
    assert e.restrict(e.fdl()) == euler(e.normal) == -e.source.h
    e = embed_linear(0, 2, ADD)
    assert e.fdl() == e.target.h ** 2


@pytest.mark.parametrize("th", THEORIES, ids=lambda t: t.name)
def test_composite_embedding_matches_direct(th):
    direct = embed_linear(0, 3, th)
    chain = compose_embeddings(embed_linear(1, 3, th), embed_linear(0, 1, th))
    for lab in th.orientation_labels:
        ctx = context(th, lab)
        assert direct.fdl(ctx) == chain.fdl(ctx)
    assert chern_total(direct.normal) == chern_total(chain.normal)


def test_embedding_errors():
    with pytest.raises(EmbeddingError):
        embed_linear(3, 2, ADD)
    P1, P2 = projective_space(1, ADD), projective_space(2, ADD)
    with pytest.raises(EmbeddingError):
        # h |-> h on Q[h]/(h^2) does not respect h^3 = 0 in reverse
        RingMap(P1, P2, {"h": P2.h})


def test_bundle_errors():
    P1 = projective_space(1, ADD)
    with pytest.raises(DegenerateBundleError):
        proj_bundle(P1, trivial(P1, 0))
    with pytest.raises(DegenerateBundleError):
        projective_space(-1, ADD)
    with pytest.raises(RankError):
        Bundle(P1, 2, roots=(P1.h,))
    with pytest.raises(PresentationError):
        roots_bundle(P1, [P1.ring.one])
    with pytest.raises(PresentationError):
        chern_bundle(P1, 1, [P1.h ** 0])
    other = projective_space(2, ADD)
    with pytest.raises(BaseMismatchError):
        bundle_sum(trivial(P1, 1), trivial(other, 1))
    with pytest.raises(BaseMismatchError):
        proj_bundle(P1, trivial(other, 2))
    with pytest.raises(BaseMismatchError):
        bundle_pullback(trivial(other, 1), P1)


@pytest.mark.parametrize("th", THEORIES, ids=lambda t: t.name)
def test_projective_bundle_basis_ranks(th):
    P1 = projective_space(1, th)
    for r in (1, 2, 3):
        P = proj_bundle(P1, roots_bundle(P1, [P1.h] * r))
        assert P.module_rank() == 2 * r
        assert P.dim == r
