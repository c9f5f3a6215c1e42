"""Formal group laws, orientations and comparison series.

Every orientation is a reparameterization ``theta(t) = t + O(t^2)`` of the
additive law over a fixed coefficient ring; its group law is the conjugate
``theta(theta^-1(x) + theta^-1(y))``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import factorial

from .algebra.ring import Element, Ring, laurent_beta, rationals, truncated_universal
from .algebra.series import (
    TruncatedSeries,
    evaluate_at_nilpotents,
    series_compose,
    series_reverse,
    series_ring,
)
from .errors import IncompatibleError, NormalizationError, PresentationError

DEFAULT_ORDER = 10


@dataclass(frozen=True)
class FormalGroupLaw:
    F: TruncatedSeries
    name: str = "F"

    @property
    def order(self) -> int:
        return self.F.order

    @property
    def coeff_ring(self) -> Ring:
        return self.F.coeff_ring

    def coefficient(self, i: int, j: int) -> Element:
        return self.F.coefficient((i, j))

    def __call__(self, a, b) -> Element:
        return evaluate_at_nilpotents(self.F, [a, b])

    def inverse(self) -> TruncatedSeries:
        return fgl_inverse(self)

    def __str__(self):
        return f"{self.name}(x, y) = {self.F}"


@dataclass(frozen=True)
class Orientation:
    """``theta`` expresses this orientation's first Chern class through the
    additive reference class."""

    theta: TruncatedSeries
    label: str
    reference: str = field(default="additive", compare=False)

    def __post_init__(self):
        th = self.theta
        if len(th.variables) != 1:
            raise NormalizationError("an orientation series is univariate")
        if th.constant():
            raise NormalizationError(f"orientation {self.label} has a constant term")
        if th.coefficient((1,)) != 1:
            raise NormalizationError(f"orientation {self.label} is not normalized: linear coefficient must be 1")

    @property
    def coeff_ring(self) -> Ring:
        return self.theta.coeff_ring

    @property
    def order(self) -> int:
        return self.theta.order

    def __hash__(self):
        return hash((self.label, self.theta))


def _xy(coeff: Ring, order: int):
    ring = series_ring(coeff, ("x", "y"), order)
    return ring, ring.gen("x"), ring.gen("y")


def fgl_additive(coeff: Ring | None = None, order: int = DEFAULT_ORDER) -> FormalGroupLaw:
    coeff = coeff or rationals()
    _, x, y = _xy(coeff, order)
    return FormalGroupLaw(TruncatedSeries(x + y, ("x", "y"), order), "additive")


def fgl_multiplicative(coeff: Ring | None = None, order: int = DEFAULT_ORDER,
                       beta: str = "beta") -> FormalGroupLaw:
    """``x + y - beta x y``."""
    coeff = coeff or laurent_beta()
    ring, x, y = _xy(coeff, order)
    b = ring.gen(beta)
    return FormalGroupLaw(TruncatedSeries(x + y - b * x * y, ("x", "y"), order), "multiplicative")


@lru_cache(maxsize=None)
def fgl_from_orientation(theta: Orientation) -> FormalGroupLaw:
    th = theta.theta
    inv = _reverse(th)
    ring, x, y = _xy(th.coeff_ring, th.order)
    inner = evaluate_at_nilpotents(inv, [x]) + evaluate_at_nilpotents(inv, [y])
    F = evaluate_at_nilpotents(th, [inner])
    return FormalGroupLaw(TruncatedSeries(F, ("x", "y"), th.order), theta.label)


@lru_cache(maxsize=None)
def _reverse(th: TruncatedSeries) -> TruncatedSeries:
    return series_reverse(th)


def fgl_inverse(F: FormalGroupLaw) -> TruncatedSeries:
    """Formal inverse ``i(x)`` with ``F(x, i(x)) = 0``, solved order by order."""
    return _fgl_inverse(F.F)


@lru_cache(maxsize=None)
def _fgl_inverse(F: TruncatedSeries) -> TruncatedSeries:
    order = F.order
    ring = series_ring(F.coeff_ring, ("x",), order)
    x = ring.gen("x")
    a01 = ring.coerce(F.coefficient((0, 1)))
    inv01 = a01.inverse()
    iota = -x * ring.coerce(F.coefficient((1, 0))) * inv01
    nc = ring.ncoeff
    for m in range(2, order + 1):
        r = evaluate_at_nilpotents(F, [x, iota])
        cm = {e: c for e, c in r.terms.items() if e[nc] == m}
        if cm:
            iota = iota - ring.element(cm) * inv01
    return TruncatedSeries(iota, ("x",), order)


@lru_cache(maxsize=None)
def comparison_series(theta1: Orientation, theta2: Orientation) -> TruncatedSeries:
    """``Phi = theta1 o theta2^-1``: the first orientation's Chern class as a
    series in the second's."""
    if theta1.reference != theta2.reference:
        raise IncompatibleError("orientations over different reference laws")
    if theta1.coeff_ring != theta2.coeff_ring:
        raise IncompatibleError(
            f"orientations {theta1.label} and {theta2.label} live over different coefficient rings")
    order = min(theta1.order, theta2.order)
    t1 = theta1.theta if theta1.order == order else theta1.theta.truncate(order)
    t2 = theta2.theta if theta2.order == order else theta2.theta.truncate(order)
    if t1 == t2:
        return TruncatedSeries.variable(t1.coeff_ring, order)
    return series_compose(t1, _reverse(t2))


def fgl_check(F: FormalGroupLaw) -> dict:
    """Residuals of the group-law axioms; all must vanish."""
    order = F.order
    coeff = F.coeff_ring
    r1 = series_ring(coeff, ("x",), order)
    x1 = r1.gen("x")
    unit_left = F(x1, r1.zero) - x1
    r1y = series_ring(coeff, ("y",), order)
    y1 = r1y.gen("y")
    unit_right = F(r1y.zero, y1) - y1
    _, x, y = _xy(coeff, order)
    comm = F(x, y) - F(y, x)
    r3 = series_ring(coeff, ("x", "y", "z"), order)
    a, b, c = r3.gen("x"), r3.gen("y"), r3.gen("z")
    assoc = F(F(a, b), c) - F(a, F(b, c))
    bad_weights = []
    for (i, j), cf in F.F.coefficients().items():
        if not cf.is_homogeneous(1 - i - j):
            bad_weights.append((i, j))
    residuals = {
        "unit_left": str(unit_left),
        "unit_right": str(unit_right),
        "commutativity": str(comm),
        "associativity": str(assoc),
    }
    ok = not unit_left and not unit_right and not comm and not assoc and not bad_weights
    return {
        "law": F.name,
        "order": order,
        "unit": not unit_left and not unit_right,
        "commutativity": not comm,
        "associativity": not assoc,
        "weights": not bad_weights,
        "residuals": residuals,
        "ok": ok,
    }


# orientations -------------------------------------------------------------

def identity_orientation(coeff: Ring, order: int = DEFAULT_ORDER) -> Orientation:
    return Orientation(TruncatedSeries.variable(coeff, order), "identity")


def multiplicative_orientation(coeff: Ring | None = None, order: int = DEFAULT_ORDER,
                               beta: str = "beta") -> Orientation:
    """``(1 - exp(-beta t)) / beta``."""
    coeff = coeff or laurent_beta()
    b = coeff.gen(beta)
    coeffs = [0] + [b ** (m - 1) * Fraction((-1) ** (m - 1), factorial(m))
                    for m in range(1, order + 1)]
    return Orientation(TruncatedSeries.from_list(coeff, coeffs, order), "multiplicative")


def universal_orientation(coeff: Ring, order: int = DEFAULT_ORDER) -> Orientation:
    """``t + b_1 t^2 + ... + b_k t^(k+1)``."""
    k = coeff.ncoeff
    coeffs = [0, 1] + [coeff.gen(f"b{i}") for i in range(1, k + 1)]
    return Orientation(TruncatedSeries.from_list(coeff, coeffs[:order + 1], order), "universal")


@dataclass(frozen=True)
class Theory:
    """A coefficient ring, a truncation order and the orientation whose first
    Chern classes serve as the ring coordinates of every space."""

    name: str
    coeff: Ring
    order: int = DEFAULT_ORDER

    @property
    def orientation_labels(self):
        if self.coeff.kind == "laurent-beta":
            return ("identity", "multiplicative")
        if self.coeff.kind.startswith("universal"):
            return ("identity", "universal")
        return ("identity",)

    def orientation(self, label: str) -> Orientation:
        return _theory_orientation(self, label)

    @property
    def primary(self) -> Orientation:
        return self.orientation(self.orientation_labels[-1])

    @property
    def coordinate_law(self) -> FormalGroupLaw:
        return fgl_from_orientation(self.primary)

    def __str__(self):
        return self.name


@lru_cache(maxsize=None)
def _theory_orientation(th: Theory, label: str) -> Orientation:
    if label == "identity":
        return identity_orientation(th.coeff, th.order)
    if label == "multiplicative" and th.coeff.kind == "laurent-beta":
        return multiplicative_orientation(th.coeff, th.order)
    if label == "universal" and th.coeff.kind.startswith("universal"):
        return universal_orientation(th.coeff, th.order)
    raise PresentationError(f"orientation {label!r} is not available in theory {th.name}")


def theory(descriptor: str, order: int = DEFAULT_ORDER) -> Theory:
    """``additive``, ``multiplicative`` or ``universal:k``."""
    if order < 1:
        raise PresentationError("truncation order must be positive")
    if descriptor == "additive":
        return Theory("additive", rationals(), order)
    if descriptor == "multiplicative":
        return Theory("multiplicative", laurent_beta(), order)
    if descriptor.startswith("universal:"):
        try:
            k = int(descriptor.split(":", 1)[1])
        except ValueError:
            raise PresentationError(f"bad theory descriptor {descriptor!r}") from None
        if k < 1:
            raise PresentationError("universal:k needs k >= 1")
        return Theory(descriptor, truncated_universal(k, order), order)
    raise PresentationError(f"unknown theory {descriptor!r}")


def law_for(th: Theory) -> FormalGroupLaw:
    """The group law a CLI theory descriptor names."""
    if th.name == "additive":
        return fgl_additive(th.coeff, th.order)
    if th.name == "multiplicative":
        return fgl_multiplicative(th.coeff, th.order)
    return fgl_from_orientation(th.primary)
