"""Iterated projective bundles, vector bundles and closed immersions.

The cohomology ring of ``P(E) -> X`` is ``E(X)[h] / (sum_i c_i(E) (-h)^(r-i))``
with ``h`` the first Chern class of the tautological line ``lambda`` taken in
the theory's coordinate orientation.  Bundle data (Chern roots or Chern
classes) is always stored in those coordinates; other orientations are
reached by transport through the comparison series.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

from .algebra.ring import Element, Ring
from .algebra.series import evaluate_at_nilpotents
from .algebra.symmetric import reduce_in_roots, substitute_elementary
from .errors import (
    BaseMismatchError,
    DegenerateBundleError,
    EmbeddingError,
    InternalInconsistencyError,
    PresentationError,
    RankError,
)
from .fgl import Theory, fgl_inverse


# spaces -----------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class Space:
    theory: Theory
    ring: Ring
    label: str
    base: Optional["Space"] = None
    bundle: Optional["Bundle"] = None
    gen: Optional[str] = None

    def __eq__(self, other):
        return isinstance(other, Space) and self.theory == other.theory and self.ring == other.ring

    def __hash__(self):
        return hash((self.theory, self.ring))

    def __str__(self):
        return self.label

    @property
    def is_point(self) -> bool:
        return self.base is None

    @property
    def rank(self) -> int:
        """Fibre rank ``r`` of the projective bundle (``P^(r-1)`` fibres)."""
        return self.bundle.rank if self.bundle is not None else 0

    @property
    def relative_dim(self) -> int:
        return self.rank - 1 if self.bundle is not None else 0

    @property
    def dim(self) -> int:
        return 0 if self.base is None else self.base.dim + self.relative_dim

    @property
    def h(self) -> Element:
        if self.gen is None:
            raise PresentationError("a point has no tautological class")
        return self.ring.gen(self.gen)

    def pull(self, x) -> Element:
        """Pull a class back from any space in the tower below."""
        return self.ring.coerce(x)

    def basis(self):
        return self.ring.basis()

    def module_rank(self) -> int:
        return len(self.ring.basis())


def point(th: Theory) -> Space:
    return Space(th, th.coeff, "pt")


def fresh_gen_name(names, ngens: int) -> str:
    """Default name of the next tautological generator: ``h``, then ``h2``, ..."""
    used = set(names)
    k = ngens + 1
    cand = "h" if k == 1 and "h" not in used else f"h{k}"
    while cand in used:
        k += 1
        cand = f"h{k}"
    return cand


def _fresh_gen(ring: Ring, name: Optional[str]) -> str:
    if name is not None:
        return name
    return fresh_gen_name(ring.names, len(ring.gen_names))


def proj_bundle(base: Space, E: "Bundle", name: Optional[str] = None,
                label: Optional[str] = None) -> Space:
    """``P(E)`` over ``base`` with the relation ``sum_i c_i(E) (-h)^(r-i) = 0``."""
    if E.base != base:
        raise BaseMismatchError("bundle does not live on the requested base")
    r = E.rank
    if r < 1:
        raise DegenerateBundleError("projective bundle of a rank-0 bundle")
    gname = _fresh_gen(base.ring, name)
    cs = E.chern_classes()
    # h^r = sum_{i>=1} (-1)^(i+1) c_i h^(r-i)
    lower = [cs[i - 1] * ((-1) ** (i + 1)) for i in range(1, r + 1)]
    ring = base.ring.adjoin(gname, r, lower)
    if label is None:
        label = f"P({E.label})" if not base.is_point or not E.is_trivial() else f"P^{r - 1}"
        if not base.is_point:
            label = f"{label}/{base.label}"
    return Space(base.theory, ring, label, base, E, gname)


def projective_space(n: int, th: Theory, base: Optional[Space] = None,
                     name: Optional[str] = None) -> Space:
    if n < 0:
        raise DegenerateBundleError("projective space of negative dimension")
    base = base if base is not None else point(th)
    label = f"P^{n}" if base.is_point else f"P^{n}/{base.label}"
    return proj_bundle(base, trivial(base, n + 1), name=name, label=label)


# bundles ----------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class Bundle:
    """Either split (``roots``) or given by coordinate Chern classes."""

    base: Space
    rank: int
    roots: Optional[tuple] = None
    classes: Optional[tuple] = None
    label: str = "E"

    def __post_init__(self):
        if self.rank < 0:
            raise RankError("negative rank")
        if self.roots is not None and len(self.roots) != self.rank:
            raise RankError("root count differs from rank")
        if self.classes is not None and len(self.classes) != self.rank:
            raise RankError("need exactly rank Chern classes")

    @property
    def is_split(self) -> bool:
        return self.roots is not None

    def is_trivial(self) -> bool:
        return all(not c for c in self.chern_classes())

    def chern_classes(self) -> tuple:
        """Coordinate Chern classes ``c_1..c_r``."""
        if self.classes is not None:
            return self.classes
        ring = self.base.ring
        e = [ring.one] + [ring.zero] * self.rank
        for x in self.roots:
            for k in range(self.rank, 0, -1):
                e[k] = e[k] + e[k - 1] * x
        return tuple(e[1:])

    def total_chern(self) -> Element:
        return self.base.ring.one + sum(self.chern_classes(), self.base.ring.zero)

    def __str__(self):
        return self.label


def _roots_bundle(base: Space, roots, label) -> Bundle:
    ring = base.ring
    roots = tuple(ring.coerce(x) for x in roots)
    for x in roots:
        if x and not x.is_homogeneous(1):
            raise PresentationError(f"Chern root {x} is not of weight 1")
        if x and x.min_gen_degree() < 1:
            raise PresentationError(f"Chern root {x} is not nilpotent")
    return Bundle(base, len(roots), roots=roots, label=label)


def roots_bundle(base: Space, roots: Sequence, label: str = "E") -> Bundle:
    return _roots_bundle(base, roots, label)


def chern_bundle(base: Space, rank: int, classes: Sequence, label: str = "E") -> Bundle:
    ring = base.ring
    classes = tuple(ring.coerce(c) for c in classes)
    for i, c in enumerate(classes, start=1):
        if c and not c.is_homogeneous(i):
            raise PresentationError(f"c_{i} = {c} is not of weight {i}")
        if c and c.min_gen_degree() < i:
            raise PresentationError(f"c_{i} = {c} is not in the {i}-th power of the generator ideal")
    return Bundle(base, rank, classes=classes, label=label)


def trivial(base: Space, rank: int) -> Bundle:
    return Bundle(base, rank, roots=(base.ring.zero,) * rank,
                  label="O" if rank == 1 else f"O^{rank}")


def line(base: Space, c1, label: str = "L") -> Bundle:
    return _roots_bundle(base, [c1], label)


def twisting_line(P: Space, d: int) -> Bundle:
    """``O(d)`` on a projective bundle, where ``O(1) = lambda^v``; its root is
    the ``(-d)``-fold formal sum of ``h``."""
    F = P.theory.coordinate_law
    x = P.h if d < 0 else evaluate_at_nilpotents(coordinate_inverse(P.theory), [P.h])
    acc = P.ring.zero
    for _ in range(abs(d)):
        acc = F(acc, x)
    return _roots_bundle(P, [acc], f"O({d})")


def _check_same_base(E: Bundle, F: Bundle):
    if E.base != F.base:
        raise BaseMismatchError(f"bundles {E.label} and {F.label} live on different spaces")


def bundle_sum(E: Bundle, F: Bundle) -> Bundle:
    _check_same_base(E, F)
    label = f"{E.label}+{F.label}"
    if E.is_split and F.is_split:
        return Bundle(E.base, E.rank + F.rank, roots=E.roots + F.roots, label=label)
    a = (E.base.ring.one,) + E.chern_classes()
    b = (E.base.ring.one,) + F.chern_classes()
    n = E.rank + F.rank
    out = []
    for k in range(1, n + 1):
        acc = E.base.ring.zero
        for i in range(max(0, k - F.rank), min(k, E.rank) + 1):
            acc = acc + a[i] * b[k - i]
        out.append(acc)
    return Bundle(E.base, n, classes=tuple(out), label=label)


def coordinate_inverse(th: Theory):
    return fgl_inverse(th.coordinate_law)


def map_roots(E: Bundle, factor: Callable[[Element], Element], label: str) -> Bundle:
    """Bundle whose roots are ``factor(x)`` for the roots ``x`` of ``E``; for
    non-split ``E`` the Chern classes go through formal roots."""
    if E.is_split:
        return _roots_bundle(E.base, [factor(x) for x in E.roots], label)
    total = product_over_roots(E, lambda y: 1 + factor(y))
    classes = tuple(total.weight_part(k) for k in range(1, E.rank + 1))
    return Bundle(E.base, E.rank, classes=classes, label=label)


def bundle_dual(E: Bundle) -> Bundle:
    iota = coordinate_inverse(E.base.theory)
    return map_roots(E, lambda x: evaluate_at_nilpotents(iota, [x]), f"{E.label}^v")


def bundle_tensor_line(E: Bundle, L: Bundle) -> Bundle:
    _check_same_base(E, L)
    if L.rank != 1:
        raise RankError("tensor_line needs a line bundle")
    F = E.base.theory.coordinate_law
    ell = L.chern_classes()[0]
    return map_roots(E, lambda x: F(x, ell), f"{E.label}*{L.label}")


def bundle_pullback(E: Bundle, along) -> Bundle:
    """Pull back to a space higher in the tower (``along`` a :class:`Space`)
    or through a :class:`RingMap` whose source is ``E.base``."""
    if isinstance(along, Space):
        target, f = along, along.ring.coerce
        if not E.base.ring.is_prefix_of(along.ring):
            raise BaseMismatchError(f"{along.label} does not lie over {E.base.label}")
    else:
        if along.source != E.base.ring:
            raise BaseMismatchError("ring map does not start at the bundle's base")
        target, f = along.target_space, along
    if E.is_split:
        return Bundle(target, E.rank, roots=tuple(f(x) for x in E.roots), label=E.label)
    return Bundle(target, E.rank, classes=tuple(f(c) for c in E.classes), label=E.label)


def tautological_sub(P: Space) -> Bundle:
    return Bundle(P, 1, roots=(P.h,), label="lambda")


def universal_quotient(P: Space) -> Bundle:
    """``xi = p^*E / lambda``: rank ``r-1``, ``c(xi) = c(p^*E) / (1 + h)``."""
    E = P.bundle
    r = E.rank
    total = P.ring.coerce(E.total_chern()) * (P.ring.one + P.h).inverse()
    classes = tuple(total.weight_part(k) for k in range(1, r))
    for k in range(r, P.ring.nilpotency_bound + 1):
        if total.weight_part(k):
            raise InternalInconsistencyError(
                f"c_{k} of the universal quotient on {P.label} does not vanish")
    return Bundle(P, r - 1, classes=classes, label="xi")


def relative_tangent(P: Space) -> Bundle:
    """``T_p = lambda^v (x) xi``."""
    b = bundle_tensor_line(universal_quotient(P), bundle_dual(tautological_sub(P)))
    return Bundle(P, b.rank, roots=b.roots, classes=b.classes, label="T_p")


@dataclass(frozen=True, eq=False)
class VirtualBundle:
    plus: Bundle
    minus: Bundle

    def __post_init__(self):
        _check_same_base(self.plus, self.minus)

    @property
    def base(self) -> Space:
        return self.plus.base

    @property
    def rank(self) -> int:
        return self.plus.rank - self.minus.rank

    @classmethod
    def of(cls, E: Bundle) -> "VirtualBundle":
        return cls(E, trivial(E.base, 0))

    @classmethod
    def negative(cls, E: Bundle) -> "VirtualBundle":
        return cls(trivial(E.base, 0), E)

    def __add__(self, other: "VirtualBundle") -> "VirtualBundle":
        return VirtualBundle(bundle_sum(self.plus, other.plus), bundle_sum(self.minus, other.minus))

    def __neg__(self) -> "VirtualBundle":
        return VirtualBundle(self.minus, self.plus)

    def __sub__(self, other: "VirtualBundle") -> "VirtualBundle":
        return self + (-other)

    def __str__(self):
        return f"[{self.plus.label}] - [{self.minus.label}]"


# formal roots -------------------------------------------------------------------

def root_names(ring: Ring, n: int):
    used = set(ring.names)
    names = []
    k = 1
    while len(names) < n:
        cand = f"y{k}"
        if cand not in used:
            names.append(cand)
        k += 1
    return names


def product_over_roots(E: Bundle, factor: Callable[[Element], Element]) -> Element:
    """``prod_i factor(x_i)`` over the coordinate Chern roots of ``E``.

    Split bundles use their roots; otherwise formal roots ``y_i`` are adjoined
    (cut at the nilpotency bound of the base ring), the symmetric product is
    rewritten in elementary symmetric functions and those are replaced by
    the stored Chern classes."""
    ring = E.base.ring
    if E.is_split:
        acc = ring.one
        for x in E.roots:
            acc = acc * ring.coerce(factor(x))
        return acc
    if E.rank == 0:
        return ring.one
    names = root_names(ring, E.rank)
    bound = ring.nilpotency_bound
    ry = ring.adjoin_free(names, bound)
    acc = ry.one
    for n in names:
        acc = acc * ry.coerce(factor(ry.gen(n)))
    reduced = reduce_in_roots(acc, names, ring)
    return substitute_elementary(reduced, E.classes, ring.one)


# ring maps and embeddings -----------------------------------------------------------

class RingMap:
    """Ring homomorphism fixing coefficient symbols, given by generator images."""

    def __init__(self, source: Space, target_space: Space, images: dict):
        self.source_space = source
        self.target_space = target_space
        self.source = source.ring
        self.target = target_space.ring
        if self.source.coeff_ring != self.target.coeff_ring:
            raise BaseMismatchError("ring map between different coefficient rings")
        self.images = []
        for g in self.source.gen_names:
            if g not in images:
                raise PresentationError(f"no image for generator {g}")
            self.images.append(self.target.coerce(images[g]))
        self._powers = [[self.target.one] for _ in self.images]
        nc = self.source.ncoeff
        for idx, deg, rule in self.source.relations:
            if self._pow(idx - nc, deg) != self._map_terms(dict(rule)):
                raise EmbeddingError(
                    f"generator images violate the relation of {self.source.names[idx]}")

    def _pow(self, i, k):
        pw = self._powers[i]
        while len(pw) <= k:
            pw.append(pw[-1] * self.images[i])
        return pw[k]

    def __call__(self, x) -> Element:
        return self._map_terms(self.source.coerce(x).terms)

    def _map_terms(self, terms: dict) -> Element:
        nc = self.source.ncoeff
        pad = (0,) * (self.target.nvars - nc)
        total = self.target.zero
        grouped: dict = {}
        for e, c in terms.items():
            grouped.setdefault(e[nc:], {})[e[:nc] + pad] = c
        for ge, coeffs in grouped.items():
            term = self.target.element(coeffs)
            for i, k in enumerate(ge):
                if k:
                    term = term * self._pow(i, k)
            total = total + term
        return total

    def then(self, other: "RingMap") -> "RingMap":
        """``other o self``."""
        return RingMap(self.source_space, other.target_space,
                       {g: other(img) for g, img in zip(self.source.gen_names, self.images)})


class BasisLift:
    """Coefficient-linear map fixed on the generator monomial basis."""

    def __init__(self, source: Space, target: Space, images: Optional[dict] = None):
        self.source_space = source
        self.target_space = target
        self.source = source.ring
        self.target = target.ring
        self.images = images  # None: the prefix inclusion

    def __call__(self, z) -> Element:
        z = self.source.coerce(z)
        if self.images is None:
            return z.extend(self.target)
        nc = self.source.ncoeff
        pad = (0,) * (self.target.nvars - nc)
        total = self.target.zero
        grouped: dict = {}
        for e, c in z.terms.items():
            grouped.setdefault(e[nc:], {})[e[:nc] + pad] = c
        for ge, coeffs in grouped.items():
            total = total + self.target.element(coeffs) * self.images[ge]
        return total

    def then(self, other: "BasisLift") -> "BasisLift":
        """``other o self``."""
        nc = self.source.ncoeff
        imgs = {}
        for m in self.source.basis():
            (e, _), = m.terms.items()
            imgs[e[nc:]] = other(self(m))
        return BasisLift(self.source_space, other.target_space, imgs)


@dataclass(frozen=True, eq=False)
class Embedding:
    """Closed immersion ``source -> target`` in the purity model: support
    cohomology is free on the fundamental class and ``i_*(z) = lift(z) fdl``."""

    source: Space
    target: Space
    codim: int
    restrict: RingMap
    lift: BasisLift
    normal: Bundle
    label: str
    cut: Optional[Bundle] = None
    fdl_fn: Optional[Callable] = field(default=None, repr=False)

    def fdl(self, ctx=None) -> Element:
        from .classes import context, euler
        ctx = ctx or context(self.target.theory)
        if self.fdl_fn is not None:
            return self.fdl_fn(ctx)
        return euler(self.cut, ctx)

    def __str__(self):
        return self.label

    def check(self):
        """Constructor invariants: ``restrict o lift = id``,
        ``restrict(fdl) = c_top(normal)`` and ``fdl`` kills ``ker(restrict)``."""
        from .classes import context, euler
        ctx = context(self.target.theory)
        if self.normal.base != self.source or self.normal.rank != self.codim:
            raise EmbeddingError(f"{self.label}: normal bundle has the wrong base or rank")
        for b in self.source.basis():
            if self.restrict(self.lift(b)) != b:
                raise EmbeddingError(f"{self.label}: lift is not a section of restriction at {b}")
        fdl = self.fdl(ctx)
        if not fdl.is_homogeneous(self.codim):
            raise EmbeddingError(f"{self.label}: fundamental class is not of weight {self.codim}")
        if self.restrict(fdl) != euler(self.normal, ctx):
            raise EmbeddingError(f"{self.label}: restriction of fdl differs from the normal Euler class")
        for m in self.target.basis():
            k = m - self.lift(self.restrict(m))
            if fdl * k:
                raise InternalInconsistencyError(
                    f"{self.label}: fdl does not annihilate {k} in ker(restrict)")
        return self


def completion(X: Space, E: Bundle, name: Optional[str] = None) -> Space:
    """Projective completion ``P(E + 1)``."""
    return proj_bundle(X, bundle_sum(E, trivial(X, 1)), name=name,
                       label=f"P({E.label}+1)" + ("" if X.is_point else f"/{X.label}"))


def identity_embedding(X: Space) -> Embedding:
    gens = {g: X.ring.gen(g) for g in X.ring.gen_names}
    return Embedding(X, X, 0, RingMap(X, X, gens), BasisLift(X, X), trivial(X, 0),
                     f"id_{X.label}", cut=trivial(X, 0))


def embed_zero_section(X: Space, E: Bundle, name: Optional[str] = None):
    """Zero section ``X -> P(E + 1)``; the fundamental class is ``thom(E)``."""
    from .classes import thom
    if E.base != X:
        raise BaseMismatchError("bundle does not live on X")
    if E.rank < 1:
        raise DegenerateBundleError("zero section of a rank-0 bundle")
    P = completion(X, E, name)
    images = {g: X.ring.gen(g) for g in X.ring.gen_names}
    images[P.gen] = X.ring.zero
    emb = Embedding(X, P, E.rank, RingMap(P, X, images), BasisLift(X, P), E,
                    f"s_{E.label}", cut=universal_quotient(P),
                    fdl_fn=lambda ctx: thom(E, ctx, P))
    return P, emb.check()


def embed_linear(m: int, n: int, th: Theory, base: Optional[Space] = None) -> Embedding:
    """``P^m -> P^n`` (over ``base``) cut out by ``n - m`` sections of ``O(1)``."""
    if m < 0 or m > n:
        raise EmbeddingError(f"no linear embedding of P^{m} into P^{n}")
    Z = projective_space(m, th, base)
    X = projective_space(n, th, base)
    if m == n:
        return identity_embedding(X)
    restrict = RingMap(X, Z, {**{g: Z.ring.gen(g) for g in Z.ring.gen_names}, X.gen: Z.h})
    nc = Z.ring.ncoeff
    images = {}
    for b in Z.basis():
        (e, _), = b.terms.items()
        images[e[nc:]] = X.ring.monomial(e)
    lift = BasisLift(Z, X, images)
    iota = coordinate_inverse(th)
    o1_x = evaluate_at_nilpotents(iota, [X.h])
    o1_z = evaluate_at_nilpotents(iota, [Z.h])
    cut = Bundle(X, n - m, roots=(o1_x,) * (n - m), label=f"O(1)^{n - m}")
    normal = Bundle(Z, n - m, roots=(o1_z,) * (n - m), label=f"O(1)^{n - m}")
    return Embedding(Z, X, n - m, restrict, lift, normal,
                     f"{Z.label}->{X.label}", cut=cut).check()


def compose_embeddings(outer: Embedding, inner: Embedding) -> Embedding:
    """``Z -> Y -> X`` with ``inner: Z -> Y`` and ``outer: Y -> X``."""
    if inner.target != outer.source:
        raise BaseMismatchError("embeddings do not compose")
    restrict = outer.restrict.then(inner.restrict)
    lift = inner.lift.then(outer.lift)
    normal = bundle_sum(inner.normal, bundle_pullback(outer.normal, inner.restrict))

    def fdl(ctx):
        return outer.fdl(ctx) * outer.lift(inner.fdl(ctx))

    return Embedding(inner.source, outer.target, inner.codim + outer.codim, restrict, lift,
                     normal, f"{outer.label}.{inner.label}", fdl_fn=fdl).check()
