from fractions import Fraction

import pytest
import sympy as sp

from orient_rr.classes import context, todd
from orient_rr.errors import PresentationError, TruncationError
from orient_rr.fgl import theory
from orient_rr.gysin import kunneth_square
from orient_rr.rr import (
    closed_embeddings,
    forget_beta,
    hrr_number,
    lci_factorizations,
    make_pair,
    pairs,
    projection_spaces,
    sweep_closed,
    sweep_grr,
    sweep_projection,
    verify_grr_lci,
    verify_rr_closed,
    verify_rr_projection,
    virtual_tangent,
)
from orient_rr.space import (
    compose_embeddings,
    embed_linear,
    embed_zero_section,
    identity_embedding,
    projective_space,
    roots_bundle,
    trivial,
)

from oracles import binomial, normal_form, series, to_sympy

ADD = theory("additive")
MULT = theory("multiplicative")
UNIV = theory("universal:3")
THEORIES = [ADD, MULT, UNIV]
t, beta, h, h2 = sp.symbols("t beta h h2")


def test_pairs_of_equal_orientations_are_trivial():
    for th in THEORIES:
        for lab in th.orientation_labels:
            p = make_pair(th, lab, lab)
            assert to_sympy(p.Phi) == t


def test_comparison_series_of_pairs():
    p = make_pair(MULT, "multiplicative", "identity")
    assert to_sympy(p.Phi) == series((1 - sp.exp(-beta * t)) / beta, t, MULT.order)
    p = make_pair(MULT, "identity", "multiplicative")
    assert to_sympy(p.Phi) == series(-sp.log(1 - beta * t) / beta, t, MULT.order)


def test_unknown_orientation_label():
    with pytest.raises(PresentationError):
        make_pair(ADD, "identity", "multiplicative")


def test_virtual_tangent_ranks():
    e = embed_linear(0, 1, ADD)
    assert virtual_tangent(e, e.target).rank == 0
    P1 = projective_space(1, MULT)
    _, s = embed_zero_section(P1, roots_bundle(P1, [P1.h, 0]))
    assert virtual_tangent(s, s.target).rank == 0
    P2 = projective_space(2, ADD)
    assert virtual_tangent(identity_embedding(P2), P2).rank == 2


def test_rr_closed_zero_section_against_hand_expansion():
    # zero section of a line with c_1 = h on P^1, pair (identity, multiplicative)
    pair = make_pair(MULT, "identity", "multiplicative")
    P1 = projective_space(1, MULT)
    _, s = embed_zero_section(P1, roots_bundle(P1, [P1.h], "L"))
    r = verify_rr_closed(pair, s, 1)
    assert r["status"] == "pass"
    # by hand: thom = c1(L) - c1(lambda) in each orientation, in Q(beta)[h, h2]
    rels = [h ** 2, h2 ** 2 - h * h2]
    Phi = series(-sp.log(1 - beta * t) / beta, t, 3)
    lhs = normal_form(Phi.subs(t, h) - Phi.subs(t, h2), rels, (h2, h))
    td_minus_L = series(Phi / t, t, 2).subs(t, h)
    rhs = normal_form(td_minus_L * (h - h2), rels, (h2, h))
    assert lhs == rhs == to_sympy(r["lhs"]) == to_sympy(r["rhs"])


def test_rr_closed_linear_p1_in_p2():
    e = embed_linear(1, 2, MULT)
    for pair in pairs(MULT):
        assert verify_rr_closed(pair, e, e.source.h)["status"] == "pass"


def test_rr_projection_p1_encodes_euler_characteristic():
    pair = make_pair(MULT, "identity", "multiplicative")
    P1 = projective_space(1, MULT)
    r = verify_rr_projection(pair, P1, 1)
    assert r["status"] == "pass"
    # p_*(1) in the identity orientation is the beta-weighted Euler characteristic
    assert forget_beta(r["lhs"]) in (0, 1)


def test_rr_projection_on_p2_and_its_square():
    P2 = projective_space(2, MULT)
    K = kunneth_square(P2).K
    assert len(K.basis()) == 9
    for P in (P2, K):
        for pair in pairs(MULT):
            for a in P.basis():
                assert verify_rr_projection(pair, P, a)["status"] == "pass"


def test_grr_p1_in_p2():
    pair = make_pair(MULT, "multiplicative", "identity")
    e = embed_linear(1, 2, MULT)
    assert verify_grr_lci(pair, e, e.target, 1)["status"] == "pass"


def test_grr_is_factorization_independent():
    for th in (MULT, UNIV):
        for pair in pairs(th, trivial_pairs=False):
            direct = embed_linear(0, 3, th)
            chain = compose_embeddings(embed_linear(1, 3, th), embed_linear(0, 1, th))
            a = verify_grr_lci(pair, direct, direct.target, 1)
            b = verify_grr_lci(pair, chain, chain.target, 1)
            assert a["status"] == b["status"] == "pass"
            assert a["lhs"] == b["lhs"] and a["rhs"] == b["rhs"]
            # and through a different ambient space
            other = embed_linear(0, 2, th)
            c = verify_grr_lci(pair, other, other.target, 1)
            assert c["lhs"] == a["lhs"]


def test_identity_factorization_reduces_to_projection():
    pair = make_pair(MULT, "identity", "multiplicative")
    P2 = projective_space(2, MULT)
    i = identity_embedding(P2)
    for a in P2.basis():
        g, p = verify_grr_lci(pair, i, P2, a), verify_rr_projection(pair, P2, a)
        assert g["lhs"] == p["lhs"] and g["rhs"] == p["rhs"]


def test_todd_of_codimension_zero_virtual_tangent_is_unipotent():
    for th in (MULT, UNIV):
        for i, P in lci_factorizations(th, 3):
            tau = virtual_tangent(i, P)
            if tau.rank:
                continue
            for pair in pairs(th):
                assert todd(pair.Phi, tau.value, pair.ctx2).gen_degree_part(0) == 1


def test_universal_truncation_soundness():
    th = theory("universal:3", 3)
    pair = make_pair(th, "identity", "universal")
    with pytest.raises(TruncationError):
        verify_rr_projection(pair, projective_space(2, th), 1)


@pytest.mark.parametrize("n", range(4))
def test_hrr_against_binomial(n):
    for d in range(-n, 6):
        want = binomial(n + d, n) if n + d >= 0 else 0
        assert hrr_number(n, d) == want, (n, d)


def test_hrr_examples():
    assert hrr_number(1, 0) == 1
    assert hrr_number(2, 1) == 3
    assert hrr_number(3, -1) == 0
    assert hrr_number(3, 2) == 10
    assert isinstance(hrr_number(1, 1), Fraction)


def test_hrr_beyond_the_vanishing_range_is_serre_dual():
    # chi(P^n, O(-n-1-k)) = (-1)^n chi(P^n, O(k))
    for n in range(1, 4):
        for k in range(3):
            assert hrr_number(n, -n - 1 - k) == (-1) ** n * binomial(n + k, n)


@pytest.mark.parametrize("th", THEORIES, ids=lambda t: t.name)
def test_sweeps_pass(th):
    for sweep in (sweep_closed, sweep_projection, sweep_grr):
        reports = sweep(th, 3)
        bad = [r for r in reports if r["status"] != "pass"]
        assert not bad and reports


def test_sweep_sizes():
    assert len(closed_embeddings(MULT, 3)) == 12
    assert len(projection_spaces(MULT, 3)) == 22
