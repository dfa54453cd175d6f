"""Vector fields on R^{0|n} as a standalone Lie superalgebra.

Elements of the Grassmann algebra are dicts ``increasing index tuple ->
Fraction``; a vector field ``Σ f^a ∂/∂θ^a`` is a dict ``a -> Grassmann``.
Nothing here depends on the worm algebra, so it serves as a reference for the
bracket relations of the operators ``d_a``, ``E_a^b``, ``R_a``.
"""
from __future__ import annotations

from fractions import Fraction

Grass = dict  # tuple[int, ...] -> Fraction


def g_mul(f: Grass, g: Grass) -> Grass:
    out: Grass = {}
    for s, a in f.items():
        for t, b in g.items():
            if set(s) & set(t):
                continue
            # sign of sorting the concatenation
            seq = list(s + t)
            sign = 1
            for i in range(len(seq)):
                for j in range(i + 1, len(seq)):
                    if seq[i] > seq[j]:
                        sign = -sign
            key = tuple(sorted(seq))
            out[key] = out.get(key, Fraction(0)) + sign * a * b
    return {k: v for k, v in out.items() if v}


def g_add(f: Grass, g: Grass, scale=1) -> Grass:
    out = dict(f)
    for k, v in g.items():
        out[k] = out.get(k, Fraction(0)) + scale * v
    return {k: v for k, v in out.items() if v}


def g_deriv(a: int, f: Grass) -> Grass:
    """Left derivative ∂/∂θ^a."""
    out: Grass = {}
    for s, c in f.items():
        if a in s:
            pos = s.index(a)
            key = s[:pos] + s[pos + 1:]
            out[key] = out.get(key, Fraction(0)) + (-c if pos & 1 else c)
    return {k: v for k, v in out.items() if v}


def g_parity(f: Grass) -> int | None:
    ps = {len(s) & 1 for s in f}
    return ps.pop() if len(ps) == 1 else (0 if not ps else None)


def monomial(*idx: int) -> Grass:
    """``θ^{i1} θ^{i2} ...`` in the order written."""
    out: Grass = {(): Fraction(1)}
    for i in idx:
        out = g_mul(out, {(i,): Fraction(1)})
    return out


VField = dict  # int -> Grass


def field(coef: Grass, a: int) -> VField:
    return {a: coef}


def v_parity(u: VField) -> int:
    ps = set()
    for f in u.values():
        p = g_parity(f)
        if p is None:
            raise ValueError("inhomogeneous vector field")
        if f:
            ps.add((p + 1) & 1)
    if len(ps) > 1:
        raise ValueError("inhomogeneous vector field")
    return ps.pop() if ps else 0


def v_apply(u: VField, f: Grass) -> Grass:
    out: Grass = {}
    for a, c in u.items():
        out = g_add(out, g_mul(c, g_deriv(a, f)))
    return out


def v_bracket(u: VField, w: VField) -> VField:
    pu, pw = v_parity(u), v_parity(w)
    sign = -1 if (pu * pw) & 1 else 1
    keys = set(u) | set(w)
    out = {}
    for b in sorted(keys):
        val = g_add(v_apply(u, w.get(b, {})), v_apply(w, u.get(b, {})), -sign)
        if val:
            out[b] = val
    return out


def v_add(u: VField, w: VField, scale=1) -> VField:
    out = {a: dict(f) for a, f in u.items()}
    for a, f in w.items():
        out[a] = g_add(out.get(a, {}), f, scale)
    return {a: f for a, f in out.items() if f}


def standard_basis_n2() -> dict[str, VField]:
    """Named fields whose negative lifts are ``d_a``, ``E_a^b``, ``R_a`` (n = 2)."""
    out = {}
    for a in (1, 2):
        out[f"d{a}"] = field(monomial(), a)
    for a in (1, 2):
        for b in (1, 2):
            out[f"E{a}{b}"] = field(monomial(b), a)
    for a in (1, 2):
        out[f"R{a}"] = field(monomial(2, 1), a)
    return out


def decompose_n2(u: VField) -> dict[str, Fraction]:
    """Coordinates of a field in :func:`standard_basis_n2` (θ^2θ^1 normal form)."""
    out = {}
    for a, f in u.items():
        for s, c in f.items():
            if s == ():
                out[f"d{a}"] = out.get(f"d{a}", 0) + c
            elif len(s) == 1:
                out[f"E{a}{s[0]}"] = out.get(f"E{a}{s[0]}", 0) + c
            else:
                # θ^1θ^2 = -θ^2θ^1
                out[f"R{a}"] = out.get(f"R{a}", 0) - c
    return {k: v for k, v in out.items() if v}
