"""Reduction of symmetric polynomials to elementary symmetric functions.

Polynomials are sparse mappings ``{exponent tuple: coefficient}``; the
coefficients may be rationals or ring elements, anything supporting ``+``,
``-``, ``*`` by integers and truth-testing for zero.
"""
from __future__ import annotations

from functools import lru_cache
from itertools import combinations

from ..errors import SymmetryError
from .ring import Element, Ring


@lru_cache(maxsize=None)
def elementary(n: int, k: int) -> tuple:
    """``e_k(y_1..y_n)`` as a tuple of exponent tuples (all coefficients 1)."""
    out = []
    for idx in combinations(range(n), k):
        e = [0] * n
        for i in idx:
            e[i] = 1
        out.append(tuple(e))
    return tuple(out)


@lru_cache(maxsize=None)
def expand_elementary(lam: tuple) -> dict:
    """``prod_k e_k^lam[k-1]`` expanded in the ``y`` variables."""
    n = len(lam)
    poly = {(0,) * n: 1}
    for k, m in enumerate(lam, start=1):
        for _ in range(m):
            nxt: dict = {}
            for e1, c1 in poly.items():
                for e2 in elementary(n, k):
                    e = tuple(a + b for a, b in zip(e1, e2))
                    nxt[e] = nxt.get(e, 0) + c1
            poly = nxt
    return poly


def _check_symmetric(poly: dict, n: int):
    for i in range(n - 1):
        for e, c in poly.items():
            s = list(e)
            s[i], s[i + 1] = s[i + 1], s[i]
            other = poly.get(tuple(s))
            if other is None or other != c:
                raise SymmetryError(
                    f"polynomial is not invariant under swapping y{i + 1} and y{i + 2}")


def symmetric_reduce(poly: dict, n: int) -> dict:
    """Rewrite a symmetric polynomial in ``y_1..y_n`` as a polynomial in
    ``e_1..e_n``.  Returns ``{(m_1, ..., m_n): coeff}`` for ``prod e_k^m_k``."""
    work = {tuple(e): c for e, c in poly.items() if c}
    for e in work:
        if len(e) != n:
            raise SymmetryError(f"exponent vector {e} does not have {n} entries")
    _check_symmetric(work, n)
    result: dict = {}
    while work:
        lead = max(work)
        c = work[lead]
        if any(lead[i] < lead[i + 1] for i in range(n - 1)):
            raise SymmetryError("leading monomial is not a partition")
        lam = tuple(lead[i] - lead[i + 1] for i in range(n - 1)) + (lead[n - 1],)
        prev = result.get(lam)
        result[lam] = c if prev is None else prev + c
        for e, m in expand_elementary(lam).items():
            v = work.get(e)
            v = -(c * m) if v is None else v - c * m
            if v:
                work[e] = v
            else:
                work.pop(e, None)
    return {k: v for k, v in result.items() if v}


def substitute_elementary(reduced: dict, values, one):
    """Evaluate ``sum coeff * prod e_k^m_k`` at ``e_k = values[k-1]``."""
    total = None
    cache: dict = {}
    for lam, c in reduced.items():
        term = c * one
        for k, m in enumerate(lam):
            if m:
                key = (k, m)
                p = cache.get(key)
                if p is None:
                    p = values[k] ** m
                    cache[key] = p
                term = term * p
        total = term if total is None else total + term
    return one * 0 if total is None else total


def reduce_in_roots(poly: Element, root_names, base: Ring) -> dict:
    """Split an element of ``base[y_1..y_n]`` along the root symbols and
    reduce; coefficients come back as elements of ``base``."""
    ring = poly.ring
    pos = [ring.index(n) for n in root_names]
    nested = {k: v.restrict_to(base) for k, v in poly.split(pos).items()}
    return symmetric_reduce(nested, len(pos))
