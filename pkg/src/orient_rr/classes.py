"""Characteristic classes in a chosen orientation.

Ring coordinates are first Chern classes in the theory's coordinate
orientation ``theta_p``.  A context for an orientation ``theta`` turns a
coordinate class ``x`` into ``c_1^theta = sigma(x)`` with
``sigma = theta o theta_p^-1``; higher classes of non-split bundles go
through formal roots.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Optional

from .algebra.ring import Element
from .algebra.series import TruncatedSeries, evaluate_at_nilpotents
from .errors import (
    BaseMismatchError,
    InternalInconsistencyError,
    InvalidExcessError,
    NormalizationError,
    RankError,
)
from .fgl import FormalGroupLaw, Orientation, Theory, comparison_series, fgl_from_orientation
from .space import (
    Bundle,
    Embedding,
    Space,
    VirtualBundle,
    bundle_pullback,
    completion,
    product_over_roots,
    universal_quotient,
)


@dataclass(frozen=True)
class OrientedClassContext:
    theory: Theory
    orientation: Orientation

    @property
    def label(self) -> str:
        return self.orientation.label

    @property
    def transport(self) -> TruncatedSeries:
        return comparison_series(self.orientation, self.theory.primary)

    @property
    def is_coordinate(self) -> bool:
        return self.orientation == self.theory.primary

    @property
    def law(self) -> FormalGroupLaw:
        return fgl_from_orientation(self.orientation)

    def c1(self, x) -> Element:
        """``c_1^theta`` of the line with coordinate class ``x``."""
        if self.is_coordinate or not x:
            return x
        return evaluate_at_nilpotents(self.transport, [x])

    def __str__(self):
        return f"{self.theory.name}/{self.label}"


def context(th: Theory, label: Optional[str] = None) -> OrientedClassContext:
    return _context(th, label or th.primary.label)


@lru_cache(maxsize=None)
def _context(th: Theory, label: str) -> OrientedClassContext:
    return OrientedClassContext(th, th.orientation(label))


def _ctx(E_or_space, ctx):
    th = E_or_space.theory if isinstance(E_or_space, Space) else E_or_space.base.theory
    if ctx is None:
        return context(th)
    if ctx.theory != th:
        raise BaseMismatchError(f"context {ctx} does not belong to theory {th.name}")
    return ctx


# Chern classes ------------------------------------------------------------------

def chern_total(E: Bundle, ctx: Optional[OrientedClassContext] = None) -> Element:
    ctx = _ctx(E, ctx)
    return _chern_total(E, ctx)


@lru_cache(maxsize=4096)
def _chern_total(E: Bundle, ctx: OrientedClassContext) -> Element:
    if ctx.is_coordinate:
        return E.total_chern()
    return product_over_roots(E, lambda y: 1 + ctx.c1(y))


def chern(i: int, E: Bundle, ctx: Optional[OrientedClassContext] = None) -> Element:
    if i < 0:
        raise RankError("Chern class index must be non-negative")
    ring = E.base.ring
    if i == 0:
        return ring.one
    if i > E.rank:
        return ring.zero
    ctx = _ctx(E, ctx)
    if ctx.is_coordinate:
        return E.chern_classes()[i - 1]
    return chern_total(E, ctx).weight_part(i)


def chern_vector(E: Bundle, ctx=None) -> list:
    """``[c_0, c_1, ..., c_rank]``."""
    return [chern(i, E, ctx) for i in range(E.rank + 1)]


def c1(L: Bundle, ctx=None) -> Element:
    if L.rank != 1:
        raise RankError("c1 needs a line bundle")
    return chern(1, L, ctx)


def c1_tensor(L1: Bundle, L2: Bundle, ctx=None) -> Element:
    """``F_theta(c_1 L1, c_1 L2)``."""
    if L1.base != L2.base:
        raise BaseMismatchError("line bundles on different spaces")
    ctx = _ctx(L1, ctx)
    return ctx.law(c1(L1, ctx), c1(L2, ctx))


def euler(E: Bundle, ctx=None) -> Element:
    return chern(E.rank, E, ctx)


def top_chern_line_tensor(L: Bundle, E: Bundle, ctx=None) -> Element:
    """``c_top(L (x) E) = prod_i F_theta(c_1 L, y_i)`` over the roots of ``E``."""
    if L.base != E.base:
        raise BaseMismatchError("bundles on different spaces")
    if L.rank != 1:
        raise RankError("first argument must be a line bundle")
    ctx = _ctx(L, ctx)
    ell = c1(L, ctx)
    F = ctx.law
    return product_over_roots(E, lambda y: F(ell, ctx.c1(y)))


def thom(E: Bundle, ctx=None, P: Optional[Space] = None) -> Element:
    """``sum_i c_i(E) (-c_1(lambda))^(n-i)`` on the completion ``P(E + 1)``."""
    ctx = _ctx(E, ctx)
    if E.rank < 1:
        raise RankError("Thom class of a rank-0 bundle")
    if P is None:
        P = completion(E.base, E)
    elif P.base != E.base or P.rank != E.rank + 1:
        raise BaseMismatchError(f"{P.label} is not the completion of {E.label}")
    n = E.rank
    mh = -ctx.c1(P.h)
    powers = [P.ring.one]
    for _ in range(n):
        powers.append(powers[-1] * mh)
    cs = chern_vector(E, ctx)
    return sum((P.pull(cs[i]) * powers[n - i] for i in range(n + 1)), P.ring.zero)


def thom_quotient_check(E: Bundle, ctx=None) -> dict:
    """Compare ``thom(E)`` with ``c_n`` of the universal quotient of ``E + 1``."""
    ctx = _ctx(E, ctx)
    P = completion(E.base, E)
    lhs = thom(E, ctx, P)
    rhs = euler(universal_quotient(P), ctx)
    return {"check": "thom", "space": P.label, "orientation": ctx.label,
            "status": "pass" if lhs == rhs else "fail", "lhs": lhs, "rhs": rhs}


# excess -------------------------------------------------------------------------

def excess_bundle(outer: Embedding, inner: Embedding, along=None) -> Bundle:
    """``xi = g^* N_outer / N_inner`` by division of total Chern classes.

    ``along`` maps the ring of ``outer.source`` to that of ``inner.source``;
    it defaults to the identity when both sources agree."""
    if along is None:
        if inner.source != outer.source:
            raise BaseMismatchError("excess needs a map between the embedded spaces")
        pulled = outer.normal
    else:
        pulled = bundle_pullback(outer.normal, along)
    e = pulled.rank - inner.normal.rank
    if e < 0:
        raise InvalidExcessError(
            f"normal bundle of {inner.label} has larger rank than that of {outer.label}")
    ring = inner.source.ring
    q = ring.coerce(pulled.total_chern()) * ring.coerce(inner.normal.total_chern()).inverse()
    bound = ring.nilpotency_bound or 0
    for k in range(e + 1, bound + 1):
        if q.weight_part(k):
            raise InvalidExcessError(
                f"quotient of total Chern classes has a nonzero part in weight {k} > {e}")
    return Bundle(inner.source, e, classes=tuple(q.weight_part(k) for k in range(1, e + 1)),
                  label="excess")


def excess_class(outer: Embedding, inner: Embedding, ctx=None, along=None) -> Element:
    xi = excess_bundle(outer, inner, along)
    return euler(xi, _ctx(xi, ctx))


# Todd classes -------------------------------------------------------------------

def _check_phi(phi: TruncatedSeries):
    if len(phi.variables) != 1 or phi.constant() or phi.coefficient((1,)) != 1:
        raise NormalizationError("a comparison series must be t + O(t^2)")


@lru_cache(maxsize=None)
def todd_series(phi: TruncatedSeries) -> TruncatedSeries:
    """``t / Phi(t)`` (order drops by one)."""
    _check_phi(phi)
    return phi.shift_down().reciprocal()


def _todd_bundle(phi: TruncatedSeries, E: Bundle, ctx: OrientedClassContext) -> Element:
    if E.rank == 0 or phi.elem == phi.ring.gen(phi.variables[0]):
        return E.base.ring.one
    g = todd_series(phi)
    return product_over_roots(E, lambda y: evaluate_at_nilpotents(g, [ctx.c1(y)]) if y else 1)


def todd(phi: TruncatedSeries, v, ctx=None) -> Element:
    """``td_Phi(v)`` for a bundle or virtual bundle: ``td(L) = t/Phi(t)`` at
    ``c_1^ctx(L)``, extended multiplicatively; so ``td(-L) = Phi(t)/t``."""
    _check_phi(phi)
    if isinstance(v, Bundle):
        v = VirtualBundle.of(v)
    ctx = _ctx(v.base, ctx)
    plus = _todd_bundle(phi, v.plus, ctx)
    if v.minus.rank == 0:
        return plus
    minus = _todd_bundle(phi, v.minus, ctx)
    out = plus * minus.inverse()
    if out.gen_degree_part(0) != 1:
        raise InternalInconsistencyError("Todd class does not have constant term 1")
    return out
