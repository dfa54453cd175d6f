"""Reference computations that share no code with the package.

Each oracle takes plain numbers (Fractions, floats, tuples) and computes the
same quantity as an engine routine by a different route.
"""
from __future__ import annotations

import itertools
import math
from fractions import Fraction

import numpy as np


def _inverse2(B):
    """Exact inverse of a 1x1 or 2x2 Fraction matrix."""
    if len(B) == 1:
        return [[1 / Fraction(B[0][0])]]
    (a, b), (c, d) = [[Fraction(v) for v in row] for row in B]
    det = a * d - b * c
    return [[d / det, -b / det], [-c / det, a / det]]


def _matchings(items):
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for k in range(len(rest)):
        for tail in _matchings(rest[:k] + rest[k + 1:]):
            yield [(first, rest[k])] + tail


def wick_perfect_matchings(B, alpha) -> Fraction:
    """``E[y^alpha]`` for density ∝ e^{-yᵀBy}, summed over all perfect matchings."""
    C = [[v / 2 for v in row] for row in _inverse2(B)]
    slots = [i for i, a in enumerate(alpha) for _ in range(a)]
    if len(slots) % 2:
        return Fraction(0)
    total = Fraction(0)
    for pairing in _matchings(slots):
        prod = Fraction(1)
        for i, j in pairing:
            prod *= C[i][j]
        total += prod
    return total


def gaussian_integral_hermite(B, alpha, order: int = 40) -> float:
    """``∫ e^{-yᵀBy} y^alpha dy`` by Cholesky + tensor Gauss-Hermite."""
    Bf = np.array([[float(v) for v in row] for row in B])
    m = len(Bf)
    L = np.linalg.cholesky(Bf)  # B = L Lᵀ, substitute z = Lᵀ y
    Linv_t = np.linalg.inv(L.T)
    t, w = np.polynomial.hermite.hermgauss(order)
    total = 0.0
    for idx in itertools.product(range(order), repeat=m):
        z = np.array([t[k] for k in idx])
        y = Linv_t @ z
        total += np.prod([w[k] for k in idx]) * np.prod(y ** np.array(alpha))
    return total / abs(np.linalg.det(L))


def count_ssyt(rows, m: int) -> int:
    """Number of semistandard tableaux of shape ``rows`` with entries 1..m."""
    cells = [(r, c) for r, length in enumerate(rows) for c in range(length)]
    fill: dict = {}

    def rec(k):
        if k == len(cells):
            return 1
        r, c = cells[k]
        lo = 1
        if c > 0:
            lo = max(lo, fill[(r, c - 1)])
        if r > 0:
            lo = max(lo, fill[(r - 1, c)] + 1)
        n = 0
        for v in range(lo, m + 1):
            fill[(r, c)] = v
            n += rec(k + 1)
        fill.pop((r, c), None)
        return n

    return rec(0)


def sphere_top_coefficient_at_origin() -> int:
    """|top Berezin coefficient| of e^{d1 d2 β} at u = v = 0, unit sphere, by hand.

    At the origin b = 4δ and db = 0, so only the quartic curvature term
    ``½ R_ijkl ξ1^i ξ1^j ξ2^k ξ2^l`` reaches the top monomial.  The four index
    patterns (1212), (2121), (1221), (2112) each contribute R_1212 = 16 times
    ξ1^1 ξ1^2 ξ2^1 ξ2^2, giving ``½ · 4 · 16 = 32`` up to the ordering sign.
    """
    r1212 = 16  # K det(b) with K = 1, det b = 16
    return 4 * r1212 // 2


def sphere_density_at_origin() -> float:
    """|Berezin density| at the origin: 32 · ∫ e^{-4|y|²} dy = 32 · π/4."""
    return sphere_top_coefficient_at_origin() * math.pi / 4


def gauss_bonnet_sphere_value() -> float:
    """Chart integral for the unit sphere from the pointwise density.

    The density equals ``2π K sqrt(det b)`` (8π at the origin, where
    sqrt(det b) = 4).  Gauss-Bonnet then gives ``2π ∫ K dA = 2π · 4π``,
    negative in the engine's Berezin order.
    """
    return -2 * math.pi * 4 * math.pi


def poincare_n1_betti(max_degree: int) -> dict:
    """Polynomial de Rham on R: only the constants survive."""
    return {(0,): 1}
