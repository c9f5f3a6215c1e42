"""Riemann-Roch checks between two orientations of one theory.

The morphism of theories is the identity on the ring; all of its content
sits in the comparison series ``Phi = theta_1 o theta_2^-1``.  Every check
returns both sides in normal form and passes only on exact equality.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations_with_replacement
from typing import Optional

from .algebra.ring import Element
from .algebra.series import TruncatedSeries
from .classes import OrientedClassContext, context, todd
from .errors import IncompatibleError, TruncationError
from .fgl import Orientation, Theory, comparison_series
from .gysin import (
    embed_diagonal,
    pushforward_embedding,
    pushforward_projection,
    pushforward_to_point,
)
from .space import (
    Embedding,
    Space,
    VirtualBundle,
    bundle_pullback,
    compose_embeddings,
    embed_linear,
    embed_zero_section,
    proj_bundle,
    projective_space,
    relative_tangent,
    roots_bundle,
    trivial,
    twisting_line,
)


@dataclass(frozen=True)
class OrientationPair:
    ctx1: OrientedClassContext
    ctx2: OrientedClassContext
    Phi: TruncatedSeries

    @property
    def theta1(self) -> Orientation:
        return self.ctx1.orientation

    @property
    def theta2(self) -> Orientation:
        return self.ctx2.orientation

    @property
    def label(self) -> str:
        return f"{self.ctx1.label}->{self.ctx2.label}"

    @property
    def theory(self) -> Theory:
        return self.ctx1.theory


def make_pair(th: Theory, label1: str, label2: str) -> OrientationPair:
    c1, c2 = context(th, label1), context(th, label2)
    if c1.orientation.coeff_ring != c2.orientation.coeff_ring:
        raise IncompatibleError("orientations over different coefficient rings")
    phi = comparison_series(c1.orientation, c2.orientation)
    if phi.constant() or phi.coefficient((1,)) != 1:
        raise IncompatibleError("comparison series is not t + O(t^2)")
    for (i,), a in phi.coefficients().items():
        if a and not a.is_homogeneous(1 - i):
            raise IncompatibleError(f"coefficient of t^{i} in Phi is not of weight {1 - i}")
    return OrientationPair(c1, c2, phi)


def pairs(th: Theory, trivial_pairs: bool = True):
    labels = th.orientation_labels
    out = []
    for a in labels:
        for b in labels:
            if a != b or trivial_pairs:
                out.append(make_pair(th, a, b))
    return out


def _report(check, space, pair, lhs, rhs, **extra):
    out = {"check": check, "space": str(space), "orientation": pair.label,
           "status": "pass" if lhs == rhs else "fail", "lhs": lhs, "rhs": rhs}
    out.update(extra)
    return out


def _sound(space: Space):
    """Refuse sweeps whose weights could reach past the universal cut-off."""
    th = space.theory
    if th.coeff.kind.startswith("universal") and th.order < 2 * space.dim:
        raise TruncationError(
            f"truncation {th.order} is too small for exact checks on {space.label} (need {2 * space.dim})")


# virtual tangent ---------------------------------------------------------------

@dataclass(frozen=True)
class VirtualTangent:
    embedding: Embedding
    P: Space
    value: VirtualBundle

    @property
    def rank(self) -> int:
        return self.value.rank


def virtual_tangent(i: Embedding, P: Space) -> VirtualTangent:
    """``tau_f = [i^* T_p] - [N_i]`` for ``f = p o i``."""
    Tp = bundle_pullback(relative_tangent(P), i.restrict)
    return VirtualTangent(i, P, VirtualBundle(Tp, i.normal))


# the three theorems -------------------------------------------------------------

def verify_rr_closed(pair: OrientationPair, e: Embedding, z) -> dict:
    _sound(e.target)
    z = e.source.ring.coerce(z)
    lhs = pushforward_embedding(e, z, pair.ctx1)
    td = todd(pair.Phi, VirtualBundle.negative(e.normal), pair.ctx2)
    rhs = pushforward_embedding(e, td * z, pair.ctx2)
    return _report("rr-closed", e.label, pair, lhs, rhs, input=z)


def verify_rr_projection(pair: OrientationPair, P: Space, alpha) -> dict:
    _sound(P)
    alpha = P.ring.coerce(alpha)
    lhs = pushforward_projection(P, alpha, pair.ctx1)
    td = todd(pair.Phi, relative_tangent(P), pair.ctx2)
    rhs = pushforward_projection(P, td * alpha, pair.ctx2)
    return _report("rr-projection", P.label, pair, lhs, rhs, input=alpha)


def lci_pushforward(i: Embedding, P: Space, y, ctx) -> Element:
    return pushforward_projection(P, pushforward_embedding(i, y, ctx), ctx)


def verify_grr_lci(pair: OrientationPair, i: Embedding, P: Space, y) -> dict:
    _sound(P)
    y = i.source.ring.coerce(y)
    tau = virtual_tangent(i, P)
    lhs = lci_pushforward(i, P, y, pair.ctx1)
    rhs = lci_pushforward(i, P, todd(pair.Phi, tau.value, pair.ctx2) * y, pair.ctx2)
    return _report("grr-lci", f"{i.label}->{P.base.label}", pair, lhs, rhs, input=y)


# Hirzebruch numbers ---------------------------------------------------------------

def k_class(P: Space, d: int) -> Element:
    """``[O(d)] = 1 - beta c_1(O(-d))`` in the multiplicative coordinates."""
    beta = P.ring.gen("beta")
    return 1 - beta * twisting_line(P, -d).roots[0]


def hrr_number(n: int, d: int, order: Optional[int] = None) -> Fraction:
    """``chi(P^n, O(d))`` read off from the ``beta^n`` coefficient of ``p_*[O(d)]``."""
    from .fgl import theory
    if n < 0:
        raise ValueError("n must be non-negative")
    th = theory("multiplicative", max(order or 0, n + 1, 10))
    P = projective_space(n, th)
    val = pushforward_to_point(P, k_class(P, d), context(th, "multiplicative"))
    if not val.is_homogeneous(-n):
        raise TruncationError("pushforward of a K-class is not of weight -n")
    return Fraction(val.terms.get((n,), 0))


def forget_beta(x: Element) -> Fraction:
    """Reporting-only specialization ``beta -> 1`` of a coefficient."""
    return Fraction(sum(x.coefficient_part().terms.values(), 0))


# sweeps ---------------------------------------------------------------------------

def closed_embeddings(th: Theory, max_dim: int = 3):
    """Zero sections of rank <= 2, linear P^m -> P^n (m < n <= max_dim) and the
    diagonal of P^1."""
    out = []
    pt = projective_space(0, th)
    base_pt = pt.base
    for r in (1, 2):
        if r <= max_dim:
            out.append(embed_zero_section(base_pt, trivial(base_pt, r))[1])
    if max_dim >= 2:
        P1 = projective_space(1, th)
        for roots in ([P1.h], [0, P1.h], [-P1.h, P1.h]):
            if 1 + len(roots) <= max_dim:
                out.append(embed_zero_section(P1, roots_bundle(P1, roots, "E"))[1])
    for n in range(1, max_dim + 1):
        for m in range(n):
            out.append(embed_linear(m, n, th))
    if max_dim >= 2:
        out.append(embed_diagonal(projective_space(1, th)))
    return out


def projection_spaces(th: Theory, max_dim: int = 3):
    """``P(E)`` with ``E`` split of rank <= 3, roots in ``{0, h, -h}``, over a
    point and over ``P^1``."""
    out = []
    for r in range(1, 4):
        if r - 1 <= max_dim:
            out.append(projective_space(r - 1, th))
    if max_dim >= 1:
        P1 = projective_space(1, th)
        h = P1.h
        for r in range(1, 4):
            if r > max_dim:
                break
            for roots in combinations_with_replacement((0, 1, -1), r):
                out.append(proj_bundle(P1, roots_bundle(P1, [c * h for c in roots], "E")))
    return out


def sweep_closed(th: Theory, max_dim: int = 3, trivial_pairs: bool = True):
    out = []
    for e in closed_embeddings(th, max_dim):
        for pair in pairs(th, trivial_pairs):
            for z in e.source.basis():
                out.append(verify_rr_closed(pair, e, z))
    return out


def sweep_projection(th: Theory, max_dim: int = 3, trivial_pairs: bool = True):
    out = []
    for P in projection_spaces(th, max_dim):
        for pair in pairs(th, trivial_pairs):
            for a in P.basis():
                out.append(verify_rr_projection(pair, P, a))
    return out


def lci_factorizations(th: Theory, max_dim: int = 3):
    """``(i, P)`` with ``i: P^m -> P^n`` linear (``m < n <= max_dim``), composites
    included, each followed by ``P^n -> pt``."""
    out = []
    for n in range(1, max_dim + 1):
        for m in range(n):
            out.append(embed_linear(m, n, th))
            for k in range(m + 1, n):
                out.append(compose_embeddings(embed_linear(k, n, th), embed_linear(m, k, th)))
    return [(i, i.target) for i in out]


def sweep_grr(th: Theory, max_dim: int = 3, trivial_pairs: bool = True):
    out = []
    for i, P in lci_factorizations(th, max_dim):
        for pair in pairs(th, trivial_pairs):
            for y in i.source.basis():
                out.append(verify_grr_lci(pair, i, P, y))
    return out


def factorization_check(th: Theory, m: int, n1: int, n2: int, ctx=None) -> list:
    """``P^m -> pt`` through ``P^n1`` and through ``P^n2``: same pushforward."""
    ctx = ctx or context(th)
    i1, i2 = embed_linear(m, n1, th), embed_linear(m, n2, th)
    out = []
    for y in i1.source.basis():
        a = pushforward_to_point(i1.target, pushforward_embedding(i1, y, ctx), ctx)
        b = pushforward_to_point(i2.target, pushforward_embedding(i2, y, ctx), ctx)
        out.append({"check": "functoriality", "space": f"P^{m}->P^{n1}|P^{n2}->pt",
                    "orientation": ctx.label, "status": "pass" if a == b else "fail",
                    "lhs": a, "rhs": b, "input": y})
    return out
