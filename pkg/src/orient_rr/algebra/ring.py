"""Graded quotient rings with a triangular monomial normal form.

A :class:`Ring` is a commutative ring over the rationals generated by

* coefficient symbols (``beta``, ``b1``, ...) carrying non-positive weights;
  ``beta`` may appear with negative exponents (Laurent), the ``b_i`` are cut
  off above a total weight magnitude, and
* weight-one generators ``h``, each either nilpotent through a monic rule
  ``h^d -> lower terms`` involving only earlier generators, or free but cut
  off by a total-degree cap.

Elements are stored flat: a mapping from full exponent tuples (coefficient
symbols first, then generators) to exact ``gmpy2.mpq`` rationals.  Every
element is kept in normal form, so equality is structural.
"""
from __future__ import annotations

from fractions import Fraction
from itertools import product

from gmpy2 import mpq
from typing import Iterable, Mapping

from ..errors import (
    BaseMismatchError,
    NotInvertibleError,
    PresentationError,
)

Exps = tuple
Rational = type(mpq(0))
NUMBER = (int, Fraction, Rational)

_RINGS: dict = {}


def _add(a: Exps, b: Exps) -> Exps:
    return tuple([x + y for x, y in zip(a, b)])


class Ring:
    """Use the module level factories (:func:`rationals`, ...) and
    :meth:`adjoin` / :meth:`adjoin_free` instead of calling this directly."""

    def __init__(self, names, weights, ncoeff, kind, laurent=frozenset(),
                 relations=(), caps=()):
        self.names = tuple(names)
        self.weights = tuple(weights)
        self.ncoeff = ncoeff
        self.kind = kind
        self.laurent = frozenset(laurent)
        self.relations = tuple(relations)
        self.caps = tuple(caps)
        self.nvars = len(self.names)
        n = self.nvars
        # rules were recorded at adjunction time; pad them to the current length
        self._rel = {idx: (deg, {e + (0,) * (n - len(e)): c for e, c in terms})
                     for idx, deg, terms in self.relations}
        self._rel_order = sorted(self._rel, reverse=True)
        self._rel_deg = [(idx, deg) for idx, deg in ((i, self._rel[i][0]) for i in self._rel_order)]
        self._nf_cache: dict = {}
        self._index = {name: i for i, name in enumerate(self.names)}
        self.zero = Element(self, {})
        self.one = Element(self, {(0,) * self.nvars: mpq(1)})

    # identity ---------------------------------------------------------
    @property
    def key(self):
        return (self.names, self.weights, self.ncoeff, self.kind, self.laurent,
                self.relations, self.caps)

    def __eq__(self, other):
        return self is other or (isinstance(other, Ring) and self.key == other.key)

    def __hash__(self):
        return hash(self.key)

    def __repr__(self):
        gens = ", ".join(self.names[self.ncoeff:])
        return f"Ring({self.kind}; {gens})"

    # structure --------------------------------------------------------
    @property
    def gen_names(self):
        return self.names[self.ncoeff:]

    @property
    def coeff_names(self):
        return self.names[:self.ncoeff]

    @property
    def coeff_ring(self) -> "Ring":
        if self.nvars == self.ncoeff:
            return self
        caps = tuple(c for c in self.caps if all(i < self.ncoeff for i in c[0]))
        return _intern(self.names[:self.ncoeff], self.weights[:self.ncoeff],
                       self.ncoeff, self.kind, self.laurent, (), caps)

    def index(self, name: str) -> int:
        try:
            return self._index[name]
        except KeyError:
            raise PresentationError(f"unknown symbol {name!r} in {self!r}") from None

    def gen(self, name: str) -> "Element":
        i = self.index(name)
        e = [0] * self.nvars
        e[i] = 1
        return self.monomial(tuple(e))

    def gens(self):
        return [self.gen(n) for n in self.gen_names]

    def monomial(self, exps: Exps, coeff=1) -> "Element":
        return self.element({tuple(exps): coeff})

    def const(self, c) -> "Element":
        c = mpq(c)
        if not c:
            return self.zero
        return Element(self, {(0,) * self.nvars: c})

    def relation_degree(self, name: str):
        """Degree ``d`` of the rule ``name^d -> ...`` (None for free symbols)."""
        rel = self._rel.get(self.index(name))
        return rel[0] if rel else None

    @property
    def total_cap(self):
        """The cap on total generator degree, when one is declared."""
        gens = tuple(range(self.ncoeff, self.nvars))
        for idx, wts, top in self.caps:
            if idx == gens and all(w == 1 for w in wts):
                return top
        return None

    @property
    def nilpotency_bound(self):
        """Largest total generator degree of a nonzero monomial.

        Any product of more elements of the generator ideal vanishes."""
        cap = self.total_cap
        free = [i for i in range(self.ncoeff, self.nvars) if i not in self._rel]
        rel_bound = sum(self._rel[i][0] - 1 for i in self._rel)
        if free:
            if cap is None:
                return None
            return cap
        return rel_bound if cap is None else min(cap, rel_bound)

    def basis(self):
        """Generator monomials of the normal form (free module basis over the
        coefficient ring), in graded-lexicographic order."""
        ranges = []
        for i in range(self.ncoeff, self.nvars):
            if i not in self._rel:
                raise PresentationError("basis() needs every generator to be nilpotent")
            ranges.append(range(self._rel[i][0]))
        out = []
        for gexps in product(*ranges):
            out.append(self.monomial((0,) * self.ncoeff + tuple(gexps)))
        out.sort(key=lambda m: _gen_sort_key(next(iter(m.terms)), self.ncoeff))
        return out

    def is_prefix_of(self, other: "Ring") -> bool:
        if self is other:
            return True
        n = self.nvars
        return (other.nvars >= n and other.names[:n] == self.names
                and other.weights[:n] == self.weights
                and other.ncoeff == self.ncoeff and other.kind == self.kind
                and set(self.relations) <= set(other.relations)
                and set(self.caps) <= set(other.caps))

    # extension --------------------------------------------------------
    def adjoin(self, name: str, degree: int, lower) -> "Ring":
        """Adjoin a weight-one generator ``x`` with ``x^degree = sum_k lower[k-1] x^(degree-k)``.

        ``lower`` holds elements of this ring; ``lower[k-1]`` must lie in the
        k-th power of the generator ideal so that rewriting never lowers
        degree."""
        if name in self._index:
            raise PresentationError(f"duplicate symbol {name!r}")
        if degree < 1:
            raise PresentationError("relation degree must be positive")
        terms = {}
        for k, c in enumerate(lower, start=1):
            if k > degree:
                break
            c = self.coerce(c)
            if c and c.min_gen_degree() < k:
                raise PresentationError(
                    f"relation coefficient {k} has generator degree below {k}")
            for e, v in c.terms.items():
                terms[e + (degree - k,)] = v
        rel = (self.nvars, degree, tuple(sorted(terms.items())))
        return _intern(self.names + (name,), self.weights + (1,), self.ncoeff,
                       self.kind, self.laurent, self.relations + (rel,), self.caps)

    def adjoin_free(self, names: Iterable[str], cap: int) -> "Ring":
        """Adjoin free weight-one symbols; monomials of total generator degree
        above ``cap`` are identified with zero."""
        names = tuple(names)
        for n in names:
            if n in self._index:
                raise PresentationError(f"duplicate symbol {n!r}")
        nv = self.nvars + len(names)
        caps = tuple(c for c in self.caps if not _is_total_cap(c, self.ncoeff, self.nvars))
        gens = tuple(range(self.ncoeff, nv))
        caps = caps + ((gens, (1,) * len(gens), cap),)
        return _intern(self.names + names, self.weights + (1,) * len(names),
                       self.ncoeff, self.kind, self.laurent, self.relations, caps)

    # normal form ------------------------------------------------------
    def _is_normal(self, e: Exps) -> bool:
        for idx, deg in self._rel_deg:
            if e[idx] >= deg:
                return False
        for idx, wts, top in self.caps:
            if sum(e[i] * w for i, w in zip(idx, wts)) > top:
                return False
        return True

    def _capped(self, e: Exps) -> bool:
        for idx, wts, top in self.caps:
            if sum(e[i] * w for i, w in zip(idx, wts)) > top:
                return True
        return False

    def _nf_monomial(self, e: Exps) -> dict:
        hit = self._nf_cache.get(e)
        if hit is not None:
            return hit
        if self._capped(e):
            self._nf_cache[e] = {}
            return {}
        for idx in self._rel_order:
            deg, rule = self._rel[idx]
            if e[idx] >= deg:
                base = list(e)
                base[idx] -= deg
                base = tuple(base)
                acc: dict = {}
                for er, cr in rule.items():
                    for e3, c3 in self._nf_monomial(_add(base, er)).items():
                        acc[e3] = acc.get(e3, 0) + cr * c3
                out = {k: v for k, v in acc.items() if v}
                self._nf_cache[e] = out
                return out
        out = {e: mpq(1)}
        self._nf_cache[e] = out
        return out

    def _capvals(self, e: Exps):
        return tuple(sum(e[i] * w for i, w in zip(idx, wts)) for idx, wts, _ in self.caps)

    def _multiply(self, ta: dict, tb: dict) -> dict:
        caps = self.caps
        tops = tuple(top for _, _, top in caps)
        rel_deg = self._rel_deg
        nf = self._nf_monomial
        la = [(e, c, self._capvals(e)) for e, c in ta.items()]
        lb = [(e, c, self._capvals(e)) for e, c in tb.items()]
        acc: dict = {}
        get = acc.get
        for e1, c1, v1 in la:
            for e2, c2, v2 in lb:
                if caps:
                    over = False
                    for x, y, top in zip(v1, v2, tops):
                        if x + y > top:
                            over = True
                            break
                    if over:
                        continue
                e = tuple([x + y for x, y in zip(e1, e2)])
                c = c1 * c2
                for idx, deg in rel_deg:
                    if e[idx] >= deg:
                        for e3, c3 in nf(e).items():
                            acc[e3] = get(e3, 0) + c * c3
                        break
                else:
                    acc[e] = get(e, 0) + c
        return {e: c for e, c in acc.items() if c}

    def element(self, raw: Mapping) -> "Element":
        """Normal form of a raw exponent->coefficient mapping."""
        acc: dict = {}
        n = self.nvars
        for e, c in raw.items():
            if not c:
                continue
            e = tuple(e)
            if len(e) != n:
                raise PresentationError(f"exponent vector {e} has wrong length for {self!r}")
            for i, x in enumerate(e):
                if x < 0 and i not in self.laurent:
                    raise PresentationError(
                        f"negative exponent of {self.names[i]!r} is not allowed")
            c = mpq(c)
            if self._is_normal(e):
                acc[e] = acc.get(e, 0) + c
            else:
                for e3, c3 in self._nf_monomial(e).items():
                    acc[e3] = acc.get(e3, 0) + c * c3
        return Element(self, {k: v for k, v in acc.items() if v})

    def coerce(self, x) -> "Element":
        if isinstance(x, Element):
            if x.ring is self or x.ring == self:
                return x if x.ring is self else Element(self, x.terms)
            if x.ring.is_prefix_of(self):
                return x.extend(self)
            raise BaseMismatchError(f"cannot view an element of {x.ring!r} in {self!r}")
        if isinstance(x, NUMBER):
            return self.const(x)
        raise TypeError(f"cannot coerce {type(x).__name__} into a ring element")


def _is_total_cap(cap, ncoeff, nvars):
    idx, wts, _ = cap
    return idx == tuple(range(ncoeff, nvars)) and all(w == 1 for w in wts)


def _intern(names, weights, ncoeff, kind, laurent, relations, caps) -> Ring:
    key = (tuple(names), tuple(weights), ncoeff, kind, frozenset(laurent),
           tuple(relations), tuple(caps))
    ring = _RINGS.get(key)
    if ring is None:
        ring = Ring(names, weights, ncoeff, kind, laurent, relations, caps)
        _RINGS[key] = ring
    return ring


def rationals() -> Ring:
    return _intern((), (), 0, "rationals", (), (), ())


def laurent_beta() -> Ring:
    return _intern(("beta",), (-1,), 1, "laurent-beta", {0}, (), ())


def truncated_universal(k: int, max_weight: int) -> Ring:
    """``Q[b_1..b_k]`` modulo monomials of total weight magnitude above ``max_weight``."""
    if k < 1:
        raise PresentationError("universal coefficient ring needs k >= 1")
    names = tuple(f"b{i}" for i in range(1, k + 1))
    weights = tuple(-i for i in range(1, k + 1))
    caps = ((tuple(range(k)), tuple(range(1, k + 1)), max_weight),)
    return _intern(names, weights, k, f"universal:{k}", (), (), caps)


def _gen_sort_key(e: Exps, ncoeff: int):
    g = e[ncoeff:]
    c = e[:ncoeff]
    return (sum(g), tuple(-x for x in g), sum(abs(x) for x in c), tuple(-x for x in c))


def _fmt_rational(c) -> str:
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def format_monomial(names, e: Exps) -> str:
    parts = []
    for name, x in zip(names, e):
        if x == 1:
            parts.append(name)
        elif x:
            parts.append(f"{name}^{x}")
    return "*".join(parts)


class Element:
    """An immutable ring element in normal form."""

    __slots__ = ("ring", "terms", "_hash")

    def __init__(self, ring: Ring, terms: dict):
        self.ring = ring
        self.terms = terms
        self._hash = None

    # arithmetic -------------------------------------------------------
    def _pair(self, other):
        if isinstance(other, Element):
            if other.ring is self.ring or other.ring == self.ring:
                return self, other
            if self.ring.is_prefix_of(other.ring):
                return self.extend(other.ring), other
            if other.ring.is_prefix_of(self.ring):
                return self, other.extend(self.ring)
            raise BaseMismatchError(
                f"elements of {self.ring!r} and {other.ring!r} do not combine")
        if isinstance(other, NUMBER):
            return self, self.ring.const(other)
        return NotImplemented

    def __add__(self, other):
        pair = self._pair(other)
        if pair is NotImplemented:
            return NotImplemented
        a, b = pair
        out = dict(a.terms)
        for e, c in b.terms.items():
            v = out.get(e, 0) + c
            if v:
                out[e] = v
            else:
                out.pop(e, None)
        return Element(a.ring, out)

    __radd__ = __add__

    def __neg__(self):
        return Element(self.ring, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        pair = self._pair(other)
        if pair is NotImplemented:
            return NotImplemented
        a, b = pair
        return a + (-b)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, NUMBER):
            if not other:
                return self.ring.zero
            other = mpq(other)
            return Element(self.ring, {e: c * other for e, c in self.terms.items()})
        pair = self._pair(other)
        if pair is NotImplemented:
            return NotImplemented
        a, b = pair
        ring = a.ring
        if not a.terms or not b.terms:
            return ring.zero
        return Element(ring, ring._multiply(a.terms, b.terms))

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, NUMBER):
            return self * (1 / mpq(other))
        pair = self._pair(other)
        if pair is NotImplemented:
            return NotImplemented
        a, b = pair
        return a * b.inverse()

    def __pow__(self, n: int):
        if n < 0:
            return self.inverse() ** (-n)
        result = self.ring.one
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def __eq__(self, other):
        if isinstance(other, NUMBER):
            if not other:
                return not self.terms
            return self.terms == self.ring.const(other).terms
        if isinstance(other, Element):
            try:
                a, b = self._pair(other)
            except BaseMismatchError:
                return False
            return a.terms == b.terms
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.ring, frozenset(self.terms.items())))
        return self._hash

    def __bool__(self):
        return bool(self.terms)

    # structure --------------------------------------------------------
    def extend(self, ring: Ring) -> "Element":
        """Pull back along the inclusion of a prefix ring."""
        if ring is self.ring:
            return self
        if not self.ring.is_prefix_of(ring):
            raise BaseMismatchError(f"{self.ring!r} is not a prefix of {ring!r}")
        pad = (0,) * (ring.nvars - self.ring.nvars)
        return ring.element({e + pad: c for e, c in self.terms.items()})

    def restrict_to(self, ring: Ring) -> "Element":
        """Drop trailing symbols, which must not occur (inverse of :meth:`extend`)."""
        n = ring.nvars
        out = {}
        for e, c in self.terms.items():
            if any(e[n:]):
                raise BaseMismatchError("element involves symbols outside the target ring")
            out[e[:n]] = c
        return ring.element(out)

    def min_gen_degree(self) -> int:
        nc = self.ring.ncoeff
        if not self.terms:
            return 10 ** 9
        return min(sum(e[nc:]) for e in self.terms)

    def gen_degree_part(self, k: int) -> "Element":
        nc = self.ring.ncoeff
        return Element(self.ring, {e: c for e, c in self.terms.items() if sum(e[nc:]) == k})

    def weight_of(self, e: Exps) -> int:
        return sum(x * w for x, w in zip(e, self.ring.weights))

    def weights(self) -> set:
        return {self.weight_of(e) for e in self.terms}

    def weight_part(self, w: int) -> "Element":
        return Element(self.ring, {e: c for e, c in self.terms.items() if self.weight_of(e) == w})

    def is_homogeneous(self, w=None) -> bool:
        ws = self.weights()
        if not ws:
            return True
        return len(ws) == 1 and (w is None or w in ws)

    def coefficient_part(self):
        """Generator-degree-zero part, as an element of the coefficient ring."""
        nc = self.ring.ncoeff
        cr = self.ring.coeff_ring
        return cr.element({e[:nc]: c for e, c in self.terms.items() if not any(e[nc:])})

    def split(self, positions):
        """Group terms by the exponents at ``positions``; the remaining exponents
        are zeroed.  Returns ``{exps_at_positions: Element}``."""
        positions = tuple(positions)
        out: dict = {}
        for e, c in self.terms.items():
            key = tuple(e[i] for i in positions)
            rest = list(e)
            for i in positions:
                rest[i] = 0
            out.setdefault(key, {})[tuple(rest)] = c
        return {k: Element(self.ring, v) for k, v in out.items()}

    def inverse(self) -> "Element":
        """Inverse of a unit: an invertible coefficient monomial plus a nilpotent."""
        ring = self.ring
        unit, nil = {}, {}
        for e, c in self.terms.items():
            if _nilpotent_monomial(ring, e):
                nil[e] = c
            else:
                unit[e] = c
        if len(unit) != 1:
            raise NotInvertibleError(f"{self} is not a unit")
        (ue, uc), = unit.items()
        for i, x in enumerate(ue):
            if x and i not in ring.laurent:
                raise NotInvertibleError(f"{self} is not a unit")
        u_inv = ring.element({tuple(-x for x in ue): 1 / uc})
        n = Element(ring, nil) * u_inv
        # (1 + n)^-1 = sum (-n)^k, finite since n is nilpotent
        total = ring.one
        term = ring.one
        for _ in range(_nil_bound(ring) + 1):
            term = -(term * n)
            if not term:
                break
            total = total + term
        else:
            if term:
                raise NotInvertibleError(f"nilpotent part of {self} did not vanish")
        return total * u_inv

    # display ----------------------------------------------------------
    def sorted_terms(self):
        nc = self.ring.ncoeff
        return sorted(self.terms.items(), key=lambda t: _gen_sort_key(t[0], nc))

    def term_list(self):
        """Canonical ``[[coefficient, monomial], ...]`` rendering."""
        names = self.ring.names
        return [[_fmt_rational(c), format_monomial(names, e) or "1"]
                for e, c in self.sorted_terms()]

    def __str__(self):
        if not self.terms:
            return "0"
        names = self.ring.names
        out = []
        for i, (e, c) in enumerate(self.sorted_terms()):
            mono = format_monomial(names, e)
            neg = c < 0
            a = -c if neg else c
            if mono:
                body = mono if a == 1 else f"{_fmt_rational(a)}*{mono}"
            else:
                body = _fmt_rational(a)
            if i == 0:
                out.append(f"-{body}" if neg else body)
            else:
                out.append(f" - {body}" if neg else f" + {body}")
        return "".join(out)

    def __repr__(self):
        return f"<{self}>"


def _nilpotent_monomial(ring: Ring, e: Exps) -> bool:
    if any(e[ring.ncoeff:]):
        return True
    for idx, wts, _ in ring.caps:
        if any(e[i] for i in idx):
            return True
    return False


def _nil_bound(ring: Ring) -> int:
    bound = ring.nilpotency_bound
    bound = 64 if bound is None else bound
    for _, wts, top in ring.caps:
        bound += top
    return bound + 1
