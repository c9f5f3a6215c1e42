"""Multivariate power series cut at a fixed total order.

A series over a coefficient ring ``C`` in variables ``t`` (or ``x, y``) is an
element of ``C[t]`` modulo monomials of total degree above the order, so the
arithmetic of :mod:`.ring` is reused unchanged.  Composition is evaluation at
nilpotent arguments, which is exact once the order reaches the nilpotency
bound of the target ring.
"""
from __future__ import annotations

from fractions import Fraction
from math import factorial

from ..errors import (
    BaseMismatchError,
    CompositionDomainError,
    NotInvertibleError,
    ReversionError,
    TruncationError,
)
from .ring import Element, Ring


def series_ring(coeff: Ring, variables, order: int) -> Ring:
    if coeff.nvars != coeff.ncoeff:
        raise BaseMismatchError("series coefficients must come from a coefficient ring")
    return coeff.adjoin_free(tuple(variables), order)


class TruncatedSeries:
    __slots__ = ("elem", "order", "variables")

    def __init__(self, elem: Element, variables, order: int):
        self.elem = elem
        self.variables = tuple(variables)
        self.order = order

    # construction -----------------------------------------------------
    @classmethod
    def from_coeffs(cls, coeff: Ring, coeffs, order: int, variables=("t",)):
        """``coeffs`` maps exponent tuples (one entry per variable) to
        rationals or coefficient-ring elements."""
        ring = series_ring(coeff, variables, order)
        acc = ring.zero
        nc = coeff.ncoeff
        for e, c in coeffs.items():
            if isinstance(e, int):
                e = (e,)
            if sum(e) > order:
                continue
            mono = ring.monomial((0,) * nc + tuple(e))
            acc = acc + mono * (ring.coerce(c) if isinstance(c, Element) else Fraction(c))
        return cls(acc, variables, order)

    @classmethod
    def from_list(cls, coeff: Ring, coeffs, order: int):
        """Univariate series from ``[a_0, a_1, ...]``."""
        return cls.from_coeffs(coeff, {(i,): c for i, c in enumerate(coeffs)}, order)

    @classmethod
    def variable(cls, coeff: Ring, order: int, name="t", variables=None):
        variables = tuple(variables or (name,))
        ring = series_ring(coeff, variables, order)
        return cls(ring.gen(name), variables, order)

    @property
    def ring(self) -> Ring:
        return self.elem.ring

    @property
    def coeff_ring(self) -> Ring:
        return self.elem.ring.coeff_ring

    def _wrap(self, elem):
        return TruncatedSeries(elem, self.variables, self.order)

    def _other(self, other):
        if isinstance(other, TruncatedSeries):
            if other.variables != self.variables or other.order != self.order:
                raise BaseMismatchError("series over different variables or orders")
            return other.elem
        return other

    def __add__(self, other):
        return self._wrap(self.elem + self._other(other))

    __radd__ = __add__

    def __sub__(self, other):
        return self._wrap(self.elem - self._other(other))

    def __rsub__(self, other):
        return self._wrap(self._other(other) - self.elem)

    def __neg__(self):
        return self._wrap(-self.elem)

    def __mul__(self, other):
        return self._wrap(self.elem * self._other(other))

    __rmul__ = __mul__

    def __pow__(self, n):
        return self._wrap(self.elem ** n)

    def __eq__(self, other):
        if isinstance(other, TruncatedSeries):
            return (self.variables == other.variables and self.order == other.order
                    and self.elem == other.elem)
        return self.elem == other

    def __hash__(self):
        return hash((self.elem, self.order, self.variables))

    def __repr__(self):
        return f"TruncatedSeries({self.elem} + O({self.order + 1}))"

    def __str__(self):
        return str(self.elem)

    def is_zero(self) -> bool:
        return not self.elem

    # coefficients -----------------------------------------------------
    def coefficient(self, *exps) -> Element:
        """Coefficient of ``t^exps`` as a coefficient-ring element."""
        if len(exps) == 1 and isinstance(exps[0], tuple):
            exps = exps[0]
        nc = self.ring.ncoeff
        cr = self.coeff_ring
        out = {}
        for e, c in self.elem.terms.items():
            if e[nc:] == tuple(exps):
                out[e[:nc]] = c
        return cr.element(out)

    def coefficients(self) -> dict:
        nc = self.ring.ncoeff
        cr = self.coeff_ring
        grouped: dict = {}
        for e, c in self.elem.terms.items():
            grouped.setdefault(e[nc:], {})[e[:nc]] = c
        return {k: cr.element(v) for k, v in grouped.items()}

    def constant(self) -> Element:
        return self.coefficient((0,) * len(self.variables))

    def truncate(self, order: int) -> "TruncatedSeries":
        if order > self.order:
            raise TruncationError("cannot raise the order of a truncated series")
        ring = series_ring(self.coeff_ring, self.variables, order)
        return TruncatedSeries(ring.element(self.elem.terms), self.variables, order)

    def shift_down(self) -> "TruncatedSeries":
        """``(f - f(0)) / t`` for a univariate series; the order drops by one."""
        if len(self.variables) != 1:
            raise CompositionDomainError("shift_down needs a univariate series")
        nc = self.ring.ncoeff
        ring = series_ring(self.coeff_ring, self.variables, self.order - 1)
        out = {}
        for e, c in self.elem.terms.items():
            if e[nc] >= 1:
                out[e[:nc] + (e[nc] - 1,)] = c
        return TruncatedSeries(ring.element(out), self.variables, self.order - 1)

    def shift_up(self) -> "TruncatedSeries":
        """``t * f``; the order rises by one."""
        nc = self.ring.ncoeff
        ring = series_ring(self.coeff_ring, self.variables, self.order + 1)
        out = {e[:nc] + (e[nc] + 1,): c for e, c in self.elem.terms.items()}
        return TruncatedSeries(ring.element(out), self.variables, self.order + 1)

    def reciprocal(self) -> "TruncatedSeries":
        try:
            return self._wrap(self.elem.inverse())
        except NotInvertibleError as exc:
            raise NotInvertibleError(f"constant term of {self} is not a unit") from exc

    # composition ------------------------------------------------------
    def __call__(self, *args):
        return evaluate_at_nilpotents(self, list(args))

    def compose(self, *gs: "TruncatedSeries") -> "TruncatedSeries":
        return series_compose(self, *gs)

    def reverse(self) -> "TruncatedSeries":
        return series_reverse(self)


def evaluate_at_nilpotents(f: TruncatedSeries, args) -> Element:
    """Exact value of ``f(args)`` for arguments in the generator ideal of a
    ring whose nilpotency bound does not exceed the order of ``f``."""
    if len(args) != len(f.variables):
        raise CompositionDomainError(
            f"series in {len(f.variables)} variables evaluated at {len(args)} arguments")
    target = None
    for a in args:
        if isinstance(a, Element):
            if target is None or (target.is_prefix_of(a.ring) and target is not a.ring):
                target = a.ring
    if target is None:
        raise CompositionDomainError("evaluation needs ring-element arguments")
    args = [target.coerce(a) for a in args]
    cr = f.coeff_ring
    if target.coeff_ring != cr:
        raise BaseMismatchError(
            f"series over {cr!r} cannot be evaluated in {target!r}")
    for a in args:
        if a and a.min_gen_degree() < 1:
            raise CompositionDomainError(
                f"argument {a} has a nonzero generator-degree-zero part")
    bound = target.nilpotency_bound
    if bound is None:
        raise TruncationError(f"{target!r} has no nilpotency bound")
    if f.order < bound:
        raise TruncationError(
            f"series order {f.order} is below the nilpotency bound {bound}")
    nc = cr.ncoeff
    pad = (0,) * (target.nvars - nc)
    powers = []
    for a in args:
        pw = [target.one]
        for _ in range(bound):
            pw.append(pw[-1] * a)
        powers.append(pw)
    grouped: dict = {}
    for e, c in f.elem.terms.items():
        ve = e[nc:]
        if sum(ve) > bound:
            continue
        grouped.setdefault(ve, {})[e[:nc] + pad] = c
    total = target.zero
    for ve, coeffs in grouped.items():
        term = target.element(coeffs)
        for pw, k in zip(powers, ve):
            if k:
                term = term * pw[k]
                if not term:
                    break
        total = total + term
    return total


def series_compose(f: TruncatedSeries, *gs: TruncatedSeries) -> TruncatedSeries:
    """``f(g_1, ..., g_k)``; every ``g_i`` must have zero constant term."""
    if not gs:
        raise CompositionDomainError("nothing to compose with")
    variables = gs[0].variables
    order = min([f.order] + [g.order for g in gs])
    gs = [g if g.order == order else g.truncate(order) for g in gs]
    if f.order != order:
        f = f.truncate(order)
    for g in gs:
        if g.variables != variables:
            raise BaseMismatchError("inner series must share their variables")
        if g.constant():
            raise CompositionDomainError("inner series has a nonzero constant term")
    return TruncatedSeries(evaluate_at_nilpotents(f, [g.elem for g in gs]), variables, order)


def series_reverse(f: TruncatedSeries) -> TruncatedSeries:
    """Compositional inverse of a univariate series ``a_1 t + a_2 t^2 + ...``."""
    if len(f.variables) != 1:
        raise ReversionError("reversion needs a univariate series")
    if f.constant():
        raise ReversionError("series to reverse must vanish at 0")
    a1 = f.coefficient((1,))
    try:
        inv = a1.inverse()
    except NotInvertibleError:
        raise ReversionError(f"linear coefficient {a1} is not a unit") from None
    ring = f.ring
    t = ring.gen(f.variables[0])
    g = t * ring.coerce(inv)
    nc = ring.ncoeff
    for m in range(2, f.order + 1):
        r = evaluate_at_nilpotents(f, [g])
        cm = {e: c for e, c in r.terms.items() if e[nc] == m}
        if cm:
            g = g - ring.element(cm) * ring.coerce(inv)
    out = TruncatedSeries(g, f.variables, f.order)
    return out


# standard series ---------------------------------------------------------

def exp_series(coeff: Ring, order: int, scale=None) -> TruncatedSeries:
    """``exp(s t)`` with ``s`` a coefficient-ring element (default 1)."""
    s = coeff.one if scale is None else coeff.coerce(scale)
    return TruncatedSeries.from_list(
        coeff, [s ** k * Fraction(1, factorial(k)) for k in range(order + 1)], order)


def log1p_series(coeff: Ring, order: int) -> TruncatedSeries:
    """``log(1 + t)``."""
    return TruncatedSeries.from_list(
        coeff, [0] + [Fraction((-1) ** (k + 1), k) for k in range(1, order + 1)], order)


def geometric_series(coeff: Ring, order: int) -> TruncatedSeries:
    """``t / (1 - t)``."""
    return TruncatedSeries.from_list(coeff, [0] + [1] * order, order)
