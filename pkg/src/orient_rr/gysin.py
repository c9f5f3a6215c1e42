"""Gysin pushforwards.

Closed immersions push forward by ``i_*(z) = lift(z) * fdl``.  A projection
``p: P(E) -> X`` pushes forward through the diagonal class of the fibre
square ``P x_X P``: writing ``Delta = sum C_ij h1^i h2^j`` over ``E(X)``, the
classes ``pi_j = p_*(h^j)`` solve ``C pi = e_0``, and ``p_*`` is
``E(X)``-linear in the basis ``1, h, ..., h^(r-1)``.
"""
from __future__ import annotations

import threading
from dataclasses import dataclass
from typing import Optional

from .algebra.ring import Element, Ring
from .classes import OrientedClassContext, context, euler
from .errors import (
    BaseMismatchError,
    InternalInconsistencyError,
    NotInvertibleError,
)
from .space import (
    BasisLift,
    Bundle,
    Embedding,
    RingMap,
    Space,
    bundle_dual,
    bundle_pullback,
    bundle_tensor_line,
    proj_bundle,
    relative_tangent,
    tautological_sub,
    universal_quotient,
)


def _ctx(space: Space, ctx):
    return ctx if ctx is not None else context(space.theory)


# closed immersions ------------------------------------------------------------

def pushforward_embedding(e: Embedding, z, ctx: Optional[OrientedClassContext] = None) -> Element:
    return e.lift(z) * e.fdl(_ctx(e.target, ctx))


def pullback(f, x) -> Element:
    """``f^*`` for an embedding (restriction) or a projective bundle (inclusion)."""
    if isinstance(f, Embedding):
        return f.restrict(x)
    if isinstance(f, Space):
        return f.pull(x)
    raise TypeError(f"cannot pull back along {type(f).__name__}")


# the fibre square ---------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class KunnethSquare:
    P: Space
    K: Space  # P(p^*E) over P, second generator h2

    @property
    def ring(self) -> Ring:
        return self.K.ring

    @property
    def h1(self) -> Element:
        return self.K.pull(self.P.h)

    @property
    def h2(self) -> Element:
        return self.K.h

    def basis(self):
        return self.K.basis()


_SQUARES: dict = {}
_LOCK = threading.Lock()


def kunneth_square(P: Space) -> KunnethSquare:
    if P.bundle is None:
        raise BaseMismatchError("the fibre square needs a projective bundle")
    key = P
    sq = _SQUARES.get(key)
    if sq is None:
        E2 = bundle_pullback(P.bundle, P)
        K = proj_bundle(P, E2, name=P.gen + "_2", label=f"{P.label}x{P.label}")
        sq = KunnethSquare(P, K)
        with _LOCK:
            sq = _SQUARES.setdefault(key, sq)
    return sq


def diagonal_cut(K: KunnethSquare) -> Bundle:
    """``lambda_1^v (x) xi_2``; its tautological section vanishes on the diagonal."""
    l1 = Bundle(K.K, 1, roots=(K.h1,), label="lambda_1")
    return bundle_tensor_line(universal_quotient(K.K), bundle_dual(l1))


def diagonal_class(K: KunnethSquare, ctx=None) -> Element:
    return euler(diagonal_cut(K), _ctx(K.K, ctx))


def embed_diagonal(P: Space) -> Embedding:
    K = kunneth_square(P)
    images = {g: P.ring.gen(g) for g in P.ring.gen_names}
    images[K.K.gen] = P.h
    restrict = RingMap(K.K, P, images)
    return Embedding(P, K.K, P.relative_dim, restrict, BasisLift(P, K.K), relative_tangent(P),
                     f"diag_{P.label}", cut=diagonal_cut(K)).check()


# duality ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class DualityData:
    P: Space
    ctx: OrientedClassContext
    diag: Element
    C: tuple     # C[i][j] in E(X), Delta = sum C_ij h1^i h2^j
    M: tuple     # C in the basis (-h)^k with rows reversed
    strict: bool  # M unit upper triangular on the nose
    pi: tuple    # p_*(h^j)
    shape: Optional[str] = None  # "upper", "lower", "diagonal" or None (not unit triangular)

    @property
    def rank(self) -> int:
        return len(self.C)


def coefficient_matrix(K: KunnethSquare, diag: Element) -> list:
    P = K.P
    X = P.base
    r = P.rank
    ring = K.ring
    i1, i2 = ring.index(P.gen), ring.index(K.K.gen)
    C = [[X.ring.zero] * r for _ in range(r)]
    for (a, b), part in diag.split((i1, i2)).items():
        C[a][b] = part.restrict_to(X.ring)
    return C


def _unit(x: Element) -> bool:
    try:
        x.inverse()
        return True
    except NotInvertibleError:
        return False


def _modulo_base_gens(x: Element) -> Element:
    return x.coefficient_part()


def solve_unit_system(M, rhs, ring: Ring):
    """Gauss-Jordan elimination with unit pivots over ``ring``; ``M x = rhs``."""
    n = len(M)
    A = [list(row) + [rhs[i]] for i, row in enumerate(M)]
    for k in range(n):
        piv = next((i for i in range(k, n) if _unit(A[i][k])), None)
        if piv is None:
            raise InternalInconsistencyError("duality matrix has no unit pivot")
        A[k], A[piv] = A[piv], A[k]
        inv = A[k][k].inverse()
        A[k] = [x * inv for x in A[k]]
        for i in range(n):
            if i != k and A[i][k]:
                f = A[i][k]
                A[i] = [x - f * y for x, y in zip(A[i], A[k])]
    return [A[i][n] for i in range(n)]


_DUALITY: dict = {}


def triangular_shape(M) -> Optional[str]:
    """Which way ``M`` is unit triangular, exactly; ``None`` if neither."""
    r = len(M)
    if any(M[k][k] != 1 for k in range(r)):
        return None
    up = all(not M[k][j] for k in range(r) for j in range(k))
    lo = all(not M[k][j] for k in range(r) for j in range(k + 1, r))
    if up and lo:
        return "diagonal"
    return "upper" if up else "lower" if lo else None


def duality_matrix(P: Space, ctx=None) -> DualityData:
    ctx = _ctx(P, ctx)
    key = (P, ctx)
    hit = _DUALITY.get(key)
    if hit is not None:
        return hit
    K = kunneth_square(P)
    diag = diagonal_class(K, ctx)
    r = P.rank
    if not diag.is_homogeneous(r - 1):
        raise InternalInconsistencyError("diagonal class is not homogeneous of the fibre dimension")
    C = coefficient_matrix(K, diag)
    for i in range(r):
        for j in range(r):
            if C[i][j] != C[j][i]:
                raise InternalInconsistencyError("diagonal class is not symmetric")
            if C[i][j] and not C[i][j].is_homogeneous(r - 1 - i - j):
                raise InternalInconsistencyError("duality coefficient of the wrong weight")
    M = [[C[r - 1 - k][j] * (-1) ** (r - 1 - k + j) for j in range(r)] for k in range(r)]
    shape = triangular_shape(M)
    strict = shape in ("upper", "diagonal")
    for k in range(r):
        for j in range(k + 1):
            m0 = _modulo_base_gens(M[k][j])
            if m0 != (1 if j == k else 0):
                raise InternalInconsistencyError(
                    "duality matrix is not unipotent triangular modulo the base generators")
    pi = solve_unit_system(C, [P.base.ring.one] + [P.base.ring.zero] * (r - 1), P.base.ring)
    data = DualityData(P, ctx, diag, tuple(tuple(row) for row in C),
                       tuple(tuple(row) for row in M), strict, tuple(pi), shape)
    with _LOCK:
        data = _DUALITY.setdefault(key, data)
    return data


def fibre_coordinates(P: Space, alpha) -> list:
    """Coefficients ``a_j`` in ``E(X)`` with ``alpha = sum a_j h^j``."""
    alpha = P.ring.coerce(alpha)
    X = P.base
    a = [X.ring.zero] * P.rank
    for (j,), part in alpha.split((P.ring.index(P.gen),)).items():
        a[j] = part.restrict_to(X.ring)
    return a


def pushforward_projection(P: Space, alpha, ctx=None) -> Element:
    d = duality_matrix(P, ctx)
    a = fibre_coordinates(P, alpha)
    return sum((x * p for x, p in zip(a, d.pi)), P.base.ring.zero)


def pushforward_to_point(X: Space, alpha, ctx=None) -> Element:
    """Push all the way down the tower."""
    x = X.ring.coerce(alpha)
    while not X.is_point:
        x = pushforward_projection(X, x, ctx)
        X = X.base
    return x


def pushforward_lci(i: Embedding, P: Space, y, ctx=None) -> Element:
    """``f_* = p_* i_*`` for ``f = p o i``."""
    if i.target != P:
        raise BaseMismatchError(f"{i.label} does not land in {P.label}")
    return pushforward_projection(P, pushforward_embedding(i, y, ctx), ctx)


def self_intersection_check(e: Embedding, ctx=None) -> dict:
    ctx = _ctx(e.target, ctx)
    lhs = e.restrict(pushforward_embedding(e, 1, ctx))
    rhs = euler(e.normal, ctx)
    return {"check": "excess", "space": e.label, "orientation": ctx.label,
            "status": "pass" if lhs == rhs else "fail", "lhs": lhs, "rhs": rhs}


def section_check(E: Bundle, ctx=None) -> list:
    """``p_* s_* = 1`` on the basis of the base, for the zero section of ``E``."""
    from .space import embed_zero_section
    X = E.base
    P, s = embed_zero_section(X, E)
    ctx = _ctx(X, ctx)
    out = []
    for b in X.basis():
        lhs = pushforward_projection(P, pushforward_embedding(s, b, ctx), ctx)
        out.append({"check": "section", "space": P.label, "orientation": ctx.label,
                    "status": "pass" if lhs == b else "fail", "lhs": lhs, "rhs": b})
    return out
