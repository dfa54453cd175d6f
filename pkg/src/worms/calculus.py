"""Operator calculus on worms: the Diff(R^{0|n}) generators, Lie derivatives,
contractions, the θ-module structure on derivations, pullbacks and the
semigroup action of maps R^{0|2} -> R^{0|2}.

Sign conventions.  The operators exposed here are the *left* actions on the
algebra: ``d_a = -(∂_{θ^a})♭``, ``E_a^b = -(θ^b ∂_{θ^a})♭`` and
``R_a = -(θ^2 θ^1 ∂_{θ^a})♭``, where ``u♭`` is the lift of a vector field on
R^{0|n}.  Since ``u -> u♭`` is a Lie algebra map, ``u -> -u♭`` reverses
brackets: ``[-u♭, -w♭] = -(-[u, w]♭)``.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Mapping, Sequence

from .algebra import (
    Ctx,
    Deriv,
    Elem,
    apply_deriv,
    basis_deriv,
    bracket,
    embed,
    restrict,
)
from .coef import Coef, compose, partial


class CalculusError(ValueError):
    pass


THETA_LABELS = {1: ("th1",), 2: ("th2", "th1")}
PARAM_LABELS = ("beta1", "beta2", "gamma1", "gamma2")


def _require_n(ctx: Ctx, allowed, what: str):
    if ctx.n not in allowed:
        if max(allowed) <= 2 and ctx.n >= 3:
            raise CalculusError("operator suite limited to n <= 2")
        raise CalculusError(f"{what} needs n in {sorted(allowed)}, got n={ctx.n}")


def _base(ctx: Ctx):
    if ctx.extra_odd or ctx.extra_even:
        raise CalculusError("operator expects a context without extra generators")


# -- the Diff(R^{0|n}) generators ---------------------------------------------

def _sign(a: int, S: Sequence[int]) -> int:
    return -1 if sum(1 for b in S if b < a) & 1 else 1


def d_op(ctx: Ctx, a: int) -> Deriv:
    """The differential ``d_a`` (a is 1-based)."""
    if not 1 <= a <= ctx.n:
        raise CalculusError(f"direction index {a} out of range 1..{ctx.n}")
    images = {}
    for i in range(ctx.m):
        images[i] = ctx.d(i, (a,))
    for g in ctx.gens:
        if g.coord is None or a in g.subset:
            continue
        target = tuple(sorted(g.subset + (a,)))
        img = ctx.d(g.coord, target)
        images[ctx.m + g.id] = img if _sign(a, g.subset) > 0 else -img
    return Deriv(ctx, 1, images)


def euler_op(ctx: Ctx, a: int, b: int) -> Deriv:
    """``E_a^b = ξ_a^i ∂/∂ξ_b^i + δ_a^b y^i ∂/∂y^i`` (n = 1 gives ``E``)."""
    _require_n(ctx, {1, 2}, "euler_op")
    if not (1 <= a <= ctx.n and 1 <= b <= ctx.n):
        raise CalculusError("direction index out of range")
    images = {}
    for i in range(ctx.m):
        images[ctx.m + ctx.gen_id(i, (b,))] = ctx.xi(i, a)
        if ctx.n == 2 and a == b:
            images[ctx.m + ctx.gen_id(i, (1, 2))] = ctx.y(i)
    return Deriv(ctx, 0, images)


def r_op(ctx: Ctx, a: int) -> Deriv:
    """``R_a = ξ_a^i ∂/∂y^i`` (n = 2)."""
    if ctx.n != 2:
        raise CalculusError(f"R_a needs n = 2, got n={ctx.n}")
    if a not in (1, 2):
        raise CalculusError("direction index out of range")
    images = {ctx.m + ctx.gen_id(i, (1, 2)): ctx.xi(i, a) for i in range(ctx.m)}
    return Deriv(ctx, 1, images)


def fiberwise_d(ctx: Ctx, a: int) -> Deriv:
    """The part of ``d_a`` that does not touch coefficients: ``ε_ab y^i ∂/∂ξ_b^i``."""
    if ctx.n != 2:
        raise CalculusError("fiberwise_d needs n = 2")
    D = d_op(ctx, a)
    return Deriv(ctx, 1, {k: v for k, v in D.images.items() if k >= ctx.m})


def structure_ops(ctx: Ctx) -> dict[str, Deriv]:
    """All named generators of the right action, keyed ``d1, E12, R1`` ..."""
    _require_n(ctx, {1, 2}, "structure_ops")
    ops = {f"d{a}": d_op(ctx, a) for a in range(1, ctx.n + 1)}
    for a in range(1, ctx.n + 1):
        for b in range(1, ctx.n + 1):
            ops[f"E{a}{b}"] = euler_op(ctx, a, b)
    if ctx.n == 2:
        ops["R1"] = r_op(ctx, 1)
        ops["R2"] = r_op(ctx, 2)
    return ops


# -- vector fields and coordinate changes on M --------------------------------

@dataclass(frozen=True)
class VectorFieldOnM:
    components: tuple[Coef, ...]

    @classmethod
    def of(cls, ctx: Ctx, comps) -> "VectorFieldOnM":
        comps = tuple(ctx.field(c) for c in comps)
        if len(comps) != ctx.m:
            raise CalculusError(f"vector field needs {ctx.m} components, got {len(comps)}")
        return cls(comps)


@dataclass(frozen=True)
class CoordChange:
    images: tuple[Coef, ...]

    @classmethod
    def of(cls, ctx: Ctx, comps) -> "CoordChange":
        comps = tuple(ctx.field(c) for c in comps)
        if len(comps) != ctx.m:
            raise CalculusError(f"coordinate change needs {ctx.m} components, got {len(comps)}")
        return cls(comps)

    def jacobian(self) -> list[list[Coef]]:
        m = len(self.images)
        return [[partial(self.images[i], j) for j in range(m)] for i in range(m)]


def _as_field(ctx: Ctx, v, cls):
    if isinstance(v, cls):
        if len(v.components if cls is VectorFieldOnM else v.images) != ctx.m:
            raise CalculusError("dimension mismatch")
        return v
    return cls.of(ctx, v)


def lie_op(ctx: Ctx, v) -> Deriv:
    """The Lie derivative ``L_v = v♯`` on worms (n <= 2), from explicit formulas."""
    _base(ctx)
    _require_n(ctx, {1, 2}, "lie_op")
    v = _as_field(ctx, v, VectorFieldOnM)
    m = ctx.m
    jac = [[partial(v.components[i], j) for j in range(m)] for i in range(m)]
    images = {i: ctx.const(v.components[i]) for i in range(m)}
    for i in range(m):
        for a in range(1, ctx.n + 1):
            img = ctx.zero()
            for j in range(m):
                if jac[i][j]:
                    img = img + ctx.xi(j, a).scale(jac[i][j])
            images[m + ctx.gen_id(i, (a,))] = img
        if ctx.n == 2:
            img = ctx.zero()
            for j in range(m):
                if jac[i][j]:
                    img = img + ctx.y(j).scale(jac[i][j])
                for k in range(m):
                    h = partial(jac[i][j], k)
                    if h:
                        img = img + (ctx.xi(j, 1) * ctx.xi(k, 2)).scale(h)
            images[m + ctx.gen_id(i, (1, 2))] = img
    return Deriv(ctx, 0, images)


def iota_op(ctx: Ctx, v) -> Deriv:
    """Contraction with ``v``: ``v^i ∂/∂ξ^i`` for n = 1, ``v^i ∂/∂y^i`` for n = 2."""
    _base(ctx)
    _require_n(ctx, {1, 2}, "iota_op")
    v = _as_field(ctx, v, VectorFieldOnM)
    S = (1,) if ctx.n == 1 else (1, 2)
    images = {ctx.m + ctx.gen_id(i, S): ctx.const(v.components[i]) for i in range(ctx.m)}
    return Deriv(ctx, 1 if ctx.n == 1 else 0, images)


# -- the θ-module structure on derivations -------------------------------------

@lru_cache(maxsize=None)
def theta_ctx(ctx: Ctx) -> Ctx:
    return ctx.extend(extra_odd=THETA_LABELS[ctx.n])


def theta(tctx: Ctx, a: int) -> Elem:
    return tctx.param(f"th{a}")


def taylor_map(ctx: Ctx, i: int, tctx: Ctx | None = None) -> Elem:
    """``x^i(θ) = x^i + θ^a ξ_a^i (+ θ^2 θ^1 y^i)`` in the θ-extended context."""
    tctx = tctx or theta_ctx(ctx)
    out = tctx.x(i)
    for a in range(1, ctx.n + 1):
        out = out + theta(tctx, a) * tctx.xi(i, a)
    if ctx.n == 2:
        out = out + theta(tctx, 2) * theta(tctx, 1) * tctx.y(i)
    return out


def embed_deriv(D: Deriv, target: Ctx) -> Deriv:
    """Extend D to a context with extra constant generators (killed by D)."""
    src = D.ctx
    images = {}
    for slot, v in D.images.items():
        if slot < src.m:
            images[slot] = embed(v, target)
        else:
            k = target.gen_by_label(src.gens[slot - src.m].label)
            images[target.m + k] = embed(v, target)
    return Deriv(target, D.parity, images)


def _split_theta(tctx: Ctx, e: Elem, theta_ids: set[int]) -> dict[tuple[int, ...], Elem]:
    """Group terms by their (leftmost, canonical) θ-part."""
    out: dict[tuple[int, ...], dict] = {}
    for (odds, evens), c in e.terms.items():
        th = tuple(k for k in odds if k in theta_ids)
        rest = tuple(k for k in odds if k not in theta_ids)
        out.setdefault(th, {})[(rest, evens)] = c
    return {k: Elem(tctx, v) for k, v in out.items()}


def theta_contract(ctx: Ctx, S: Sequence[int], D: Deriv) -> Deriv:
    """The module action ``θ^S · D`` on derivations (n <= 2).

    ``S`` is the θ-product in the order written, e.g. ``(2, 1)`` for
    ``θ^2 θ^1``.  A derivation D is identified with the section
    ``σ_D(θ) = D(x(θ))`` and ``θ^S · D`` is the derivation whose section is
    ``θ^S σ_D(θ)``.
    """
    _base(ctx)
    _require_n(ctx, {1, 2}, "theta_contract")
    if D.ctx != ctx:
        raise CalculusError("derivation from a different context")
    S = tuple(S)
    if any(not 1 <= a <= ctx.n for a in S):
        raise CalculusError("θ index out of range")
    if not D:
        return D
    tctx = theta_ctx(ctx)
    prefix = tctx.one()
    for a in S:
        prefix = prefix * theta(tctx, a)
    parity = (D.parity + len(S)) & 1
    if not prefix:
        return Deriv(ctx, parity, {})
    Dt = embed_deriv(D, tctx)
    th_ids = {tctx.gen_by_label(lab) for lab in THETA_LABELS[ctx.n]}
    th = {a: tctx.gen_by_label(f"th{a}") for a in range(1, ctx.n + 1)}
    images = {}
    for i in range(ctx.m):
        sigma = prefix * apply_deriv(Dt, taylor_map(ctx, i, tctx))
        parts = _split_theta(tctx, sigma, th_ids)
        sgn = -1 if parity else 1
        for key, val in parts.items():
            val = restrict(val, ctx)
            if key == ():
                images[i] = val
            elif key == (th[1],):
                images[ctx.m + ctx.gen_id(i, (1,))] = val.scale(sgn)
            elif ctx.n == 2 and key == (th[2],):
                images[ctx.m + ctx.gen_id(i, (2,))] = val.scale(sgn)
            elif ctx.n == 2 and key == (th[2], th[1]):
                images[ctx.m + ctx.gen_id(i, (1, 2))] = val
            else:
                raise AssertionError(f"unexpected θ-monomial {key}")
    return Deriv(ctx, parity, images)


def flat_theta_derivative(ctx: Ctx, a: int) -> Deriv:
    """The lift ``(∂/∂θ^a)♭ = -d_a``."""
    return -d_op(ctx, a)


def split_derivation_n1(D: Deriv) -> tuple[Deriv, Deriv]:
    """Unique splitting ``D = w1 + w2`` with ``[Dθ, w1] = 0`` and ``θ·w2 = 0``."""
    ctx = D.ctx
    if ctx.n != 1:
        raise CalculusError("split_derivation_n1 needs n = 1")
    Dth = flat_theta_derivative(ctx, 1)
    w1 = bracket(Dth, theta_contract(ctx, (1,), D))
    w2 = theta_contract(ctx, (1,), bracket(Dth, D))
    return w1, w2


# -- Frölicher-Nijenhuis bracket (n = 1) ---------------------------------------

def _form_degree(ctx: Ctx, K: Sequence[Elem]) -> int:
    degs = set()
    for comp in K:
        if comp.ctx != ctx:
            raise CalculusError("component from a different context")
        for odds, evens in comp.terms:
            if evens:
                raise CalculusError("vector-valued form components must be pure ξ-forms")
            degs.add(len(odds))
    if len(degs) > 1:
        raise CalculusError(f"components of mixed form degree {sorted(degs)}")
    return degs.pop() if degs else 0


def insertion(ctx: Ctx, K: Sequence[Elem]) -> Deriv:
    """``i_K = K^k ∂/∂ξ^k`` for a vector-valued form with components ``K^k``."""
    if ctx.n != 1:
        raise CalculusError("vector-valued forms live on n = 1")
    K = [ctx.const(c) if not isinstance(c, Elem) else c for c in K]
    if len(K) != ctx.m:
        raise CalculusError(f"need {ctx.m} components, got {len(K)}")
    q = _form_degree(ctx, K)
    images = {ctx.m + ctx.gen_id(k, (1,)): K[k] for k in range(ctx.m)}
    return Deriv(ctx, (q - 1) & 1, images)


def fn_bracket(K1: Sequence[Elem], K2: Sequence[Elem]) -> list[Elem]:
    """Frölicher-Nijenhuis bracket of vector-valued forms on an n = 1 chart.

    Both inputs are carried into ker(ad d) by ``w -> [d, i_K]``, bracketed
    there, and carried back by the inverse map ``w -> -θ·w``.
    """
    ctx = next(c.ctx for c in list(K1) + list(K2) if isinstance(c, Elem))
    if ctx.n != 1:
        raise CalculusError("fn_bracket needs n = 1")
    d = d_op(ctx, 1)
    L1 = bracket(d, insertion(ctx, K1))
    L2 = bracket(d, insertion(ctx, K2))
    w = -theta_contract(ctx, (1,), bracket(L1, L2))
    if w.has_coef_action():
        raise AssertionError("FN bracket left ker θ")
    return [w.gen_image(ctx.gen_id(k, (1,))) for k in range(ctx.m)]


# -- morphisms -----------------------------------------------------------------

def substitute(c: Coef, images: Sequence[Elem]) -> Elem:
    """``c(images)`` where each image is a body Coef plus an even nilpotent part."""
    target = images[0].ctx
    bodies = [im.body() for im in images]
    nils = [im - target.const(b) for im, b in zip(images, bodies)]
    out = target.const(compose(c, bodies))
    level = {(): (c, target.one())}
    k = 0
    while level:
        k += 1
        nxt: dict[tuple[int, ...], tuple[Coef, Elem]] = {}
        for alpha, (g, w) in level.items():
            start = alpha[-1] if alpha else 0
            for i in range(start, len(images)):
                if not nils[i]:
                    continue
                beta = alpha + (i,)
                if beta in nxt:
                    continue
                # weight N^beta / beta! built incrementally
                mult = sum(1 for j in beta if j == i)
                wb = (w * nils[i]).scale(Fraction(1, mult))
                if not wb:
                    continue
                nxt[beta] = (partial(g, i), wb)
        for beta, (g, w) in nxt.items():
            if g:
                out = out + w.scale(compose(g, bodies))
        level = {b: v for b, v in nxt.items() if v[0]}
    return out


class Morphism:
    """An algebra morphism from ``src`` to ``tgt`` given on coordinates.

    ``coef_images[i]`` is the image of ``x^i`` (an Elem whose nilpotent part
    is even), ``gen_images[k]`` the image of generator ``k``.
    """

    def __init__(self, src: Ctx, tgt: Ctx, coef_images: Sequence[Elem], gen_images: Mapping[int, Elem]):
        self.src = src
        self.tgt = tgt
        self.coef_images = tuple(coef_images)
        self.gen_images = dict(gen_images)
        self._cache: dict = {}

    def image_of_coef(self, c: Coef) -> Elem:
        v = self._cache.get(("c", c))
        if v is None:
            if all(im.is_constant() for im in self.coef_images):
                v = self.tgt.const(compose(c, [im.body() for im in self.coef_images]))
            else:
                v = substitute(c, self.coef_images)
            self._cache[("c", c)] = v
        return v

    def __call__(self, e: Elem) -> Elem:
        if e.ctx != self.src:
            raise CalculusError("element from a different context")
        out = self.tgt.zero()
        for (odds, evens), c in e.terms.items():
            img = self.image_of_coef(c)
            for k, ex in evens:
                img = img * self.gen_images[k] ** ex
            for k in odds:
                img = img * self.gen_images[k]
            out = out + img
        return out

    def then(self, other: "Morphism") -> "Morphism":
        """``other ∘ self`` (apply self first)."""
        if other.src != self.tgt:
            raise CalculusError("morphisms do not compose")
        return Morphism(
            self.src,
            other.tgt,
            [other(v) for v in self.coef_images],
            {k: other(v) for k, v in self.gen_images.items()},
        )

    def __eq__(self, other):
        if not isinstance(other, Morphism):
            return NotImplemented
        return (
            self.src == other.src
            and self.tgt == other.tgt
            and self.coef_images == other.coef_images
            and all(self.gen_images[k] == other.gen_images[k] for k in range(self.src.ngens))
        )

    def __repr__(self):
        lines = [f"{self.src.coords[i]} -> {v}" for i, v in enumerate(self.coef_images)]
        lines += [f"{self.src.gens[k].label} -> {v}" for k, v in sorted(self.gen_images.items())]
        return "Morphism(" + "; ".join(lines) + ")"


def identity_morphism(ctx: Ctx) -> Morphism:
    return Morphism(ctx, ctx, [ctx.x(i) for i in range(ctx.m)], {k: ctx.gen(k) for k in range(ctx.ngens)})


def coef_det(mat: Sequence[Sequence[Coef]]) -> Coef:
    n = len(mat)
    if n == 1:
        return mat[0][0]
    total = mat[0][0].field.zero
    for j in range(n):
        if not mat[0][j]:
            continue
        minor = [row[:j] + row[j + 1:] for row in mat[1:]]
        term = mat[0][j] * coef_det(minor)
        total = total + term if j % 2 == 0 else total - term
    return total


def iterated_d(ctx: Ctx, S: Sequence[int], e: Elem) -> Elem:
    """``d_{s1} d_{s2} ... d_{sk} e`` with s1 < ... < sk (largest applied first)."""
    for a in sorted(S, reverse=True):
        e = apply_deriv(d_op(ctx, a), e)
    return e


def pullback(ctx: Ctx, phi) -> Morphism:
    """The worm morphism induced by the coordinate change ``x~ = phi(x)``."""
    _base(ctx)
    phi = _as_field(ctx, phi, CoordChange)
    if not coef_det(phi.jacobian()):
        raise CalculusError("singular coordinate change (Jacobian determinant vanishes identically)")
    gen_images = {}
    for g in ctx.gens:
        gen_images[g.id] = iterated_d(ctx, g.subset, ctx.const(phi.images[g.coord]))
    return Morphism(ctx, ctx, [ctx.const(p) for p in phi.images], gen_images)


def compose_changes(phi: CoordChange, psi: CoordChange) -> CoordChange:
    """``phi ∘ psi``."""
    return CoordChange(tuple(compose(p, list(psi.images)) for p in phi.images))


def _mat(ctx: Ctx, A) -> list[list[Coef]]:
    if len(A) != 2 or any(len(row) != 2 for row in A):
        raise CalculusError("A must be a 2x2 matrix")
    return [[ctx.field(v) for v in row] for row in A]


def mat2_act(ctx: Ctx, A) -> Morphism:
    """Action of ``A in Mat(2)``: ``ξ'_a = A[b][a] ξ_b``, ``y' = det(A) y``.

    ``A[a][b]`` is the coefficient in ``θ'^a = A[a][b] θ^b``.
    """
    _base(ctx)
    if ctx.n != 2:
        raise CalculusError("mat2_act needs n = 2")
    A = _mat(ctx, A)
    det = A[0][0] * A[1][1] - A[0][1] * A[1][0]
    gen_images = {}
    for i in range(ctx.m):
        for a in (1, 2):
            img = ctx.zero()
            for b in (1, 2):
                img = img + ctx.xi(i, b).scale(A[b - 1][a - 1])
            gen_images[ctx.gen_id(i, (a,))] = img
        gen_images[ctx.gen_id(i, (1, 2))] = ctx.y(i).scale(det)
    return Morphism(ctx, ctx, [ctx.x(i) for i in range(ctx.m)], gen_images)


@lru_cache(maxsize=None)
def param_ctx(ctx: Ctx) -> Ctx:
    """``ctx`` with the odd parameters β^1, β^2, γ^1, γ^2 adjoined."""
    return ctx.extend(extra_odd=PARAM_LABELS)


def _params(pctx: Ctx, beta, gamma):
    def conv(v, default):
        if v is None:
            return [pctx.param(lab) for lab in default]
        out = []
        for t in v:
            if isinstance(t, Elem):
                out.append(embed(t, pctx) if t.ctx != pctx else t)
            else:
                out.append(pctx.const(t))
        return out

    return conv(beta, PARAM_LABELS[:2]), conv(gamma, PARAM_LABELS[2:])


def full_act(ctx: Ctx, A, beta=None, gamma=None) -> Morphism:
    """Action of the map ``θ'^a = β^a + A[a][b] θ^b + γ^a θ^2 θ^1``.

    The images are read off from ``x(θ'(θ))`` where ``x(θ)`` is the Taylor
    expansion of a map R^{0|2} -> M.  ``beta``/``gamma`` default to the odd
    parameters of :func:`param_ctx`; pass ``(0, 0)`` to switch one off.
    The target context is always ``param_ctx(ctx)``.
    """
    _base(ctx)
    if ctx.n != 2:
        raise CalculusError("full_act needs n = 2")
    pctx = param_ctx(ctx)
    A = _mat(ctx, A)
    beta, gamma = _params(pctx, beta, gamma)
    # θ's must sit left of the parameters in canonical order
    big = Ctx(2, coords=ctx.coords, extra_odd=("th2", "th1") + PARAM_LABELS)
    th = {a: big.param(f"th{a}") for a in (1, 2)}
    b_ = [embed(v, big) for v in beta]
    g_ = [embed(v, big) for v in gamma]
    thp = {}
    for a in (1, 2):
        thp[a] = b_[a - 1] + g_[a - 1] * th[2] * th[1]
        for b in (1, 2):
            thp[a] = thp[a] + th[b].scale(A[a - 1][b - 1])
    th_ids = {big.gen_by_label("th1"), big.gen_by_label("th2")}
    key1, key2 = (big.gen_by_label("th1"),), (big.gen_by_label("th2"),)
    key21 = (big.gen_by_label("th2"), big.gen_by_label("th1"))
    coef_images, gen_images = [], {}
    for i in range(ctx.m):
        xt = big.x(i) + thp[1] * big.xi(i, 1) + thp[2] * big.xi(i, 2) + thp[2] * thp[1] * big.y(i)
        parts = _split_theta(big, xt, th_ids)
        get = lambda k: restrict(parts.get(k, big.zero()), pctx)
        coef_images.append(get(()))
        gen_images[ctx.gen_id(i, (1,))] = get(key1)
        gen_images[ctx.gen_id(i, (2,))] = get(key2)
        gen_images[ctx.gen_id(i, (1, 2))] = get(key21)
    return Morphism(ctx, pctx, coef_images, gen_images)


def full_act_display(ctx: Ctx, A, beta=None, gamma=None, y_sign: int = 1) -> Morphism:
    """The closed-form images ``x' = x + β^a ξ_a + β^2 β^1 y``,
    ``ξ'_a = A[b][a] ξ_b + ε_bc β^b A[c][a] y``,
    ``y' = (det A + y_sign·ε_bc β^b γ^c) y + γ^a ξ_a``.

    With ``y_sign = -1`` this agrees with :func:`full_act`.
    """
    _base(ctx)
    if ctx.n != 2:
        raise CalculusError("full_act needs n = 2")
    pctx = param_ctx(ctx)
    A = _mat(ctx, A)
    beta, gamma = _params(pctx, beta, gamma)
    det = A[0][0] * A[1][1] - A[0][1] * A[1][0]
    eps = {(1, 2): 1, (2, 1): -1}
    coef_images, gen_images = [], {}
    for i in range(ctx.m):
        xi = {a: pctx.xi(i, a) for a in (1, 2)}
        y = pctx.y(i)
        coef_images.append(pctx.x(i) + beta[0] * xi[1] + beta[1] * xi[2] + beta[1] * beta[0] * y)
        for a in (1, 2):
            img = pctx.zero()
            for b in (1, 2):
                img = img + xi[b].scale(A[b - 1][a - 1])
            for (b, c), s in eps.items():
                img = img + (beta[b - 1] * y).scale(A[c - 1][a - 1] * s)
            gen_images[ctx.gen_id(i, (a,))] = img
        bg = pctx.zero()
        for (b, c), s in eps.items():
            bg = bg + (beta[b - 1] * gamma[c - 1]).scale(s)
        gen_images[ctx.gen_id(i, (1, 2))] = (pctx.const(det) + bg.scale(y_sign)) * y + gamma[0] * xi[1] + gamma[1] * xi[2]
    return Morphism(ctx, pctx, coef_images, gen_images)


def param_coefficient(e: Elem, label: str) -> Elem:
    """Left coefficient of a single odd parameter at zero (other parameters set to 0)."""
    ctx = e.ctx
    k = ctx.gen_by_label(label)
    params = {ctx.gen_by_label(l) for l in ctx.extra_odd}
    out = {}
    for (odds, evens), c in e.terms.items():
        ps = [g for g in odds if g in params]
        if ps != [k]:
            continue
        pos = odds.index(k)
        rest = odds[:pos] + odds[pos + 1:]
        # move the parameter to the far left
        out[(rest, evens)] = -c if pos & 1 else c
    base = Ctx(ctx.n, coords=ctx.coords)
    return restrict(Elem(ctx, out), base)


def param_free_part(e: Elem) -> Elem:
    ctx = e.ctx
    params = {ctx.gen_by_label(l) for l in ctx.extra_odd}
    out = {mon: c for mon, c in e.terms.items() if not any(g in params for g in mon[0])}
    return restrict(Elem(ctx, out), Ctx(ctx.n, coords=ctx.coords))


# -- differential forms pulled back along maps R^{0|2} -> M ----------------------

FORM_EXTRA_ODD = ("th2", "th1")
FORM_EXTRA_EVEN = ("dth1", "dth2")


@lru_cache(maxsize=None)
def form_ctx(ctx: Ctx) -> Ctx:
    return ctx.extend(extra_odd=FORM_EXTRA_ODD, extra_even=FORM_EXTRA_EVEN)


def form_expansion(ctx: Ctx, alpha: Mapping) -> Elem:
    """``φ*α`` as an element of the (θ, dθ)-extended algebra.

    ``alpha`` maps increasing index tuples ``(i1, ..., ik)`` (0-based) to
    coefficients of ``dx^{i1} ∧ ... ∧ dx^{ik}``.
    """
    _base(ctx)
    if ctx.n != 2:
        raise CalculusError("form_components needs n = 2")
    fctx = form_ctx(ctx)
    xs = [taylor_map(ctx, i, fctx) for i in range(ctx.m)]
    dth = {a: fctx.param(f"dth{a}") for a in (1, 2)}
    dtheta = {a: basis_deriv(fctx, fctx.m + fctx.gen_by_label(f"th{a}")) for a in (1, 2)}
    dx = [sum((dth[a] * apply_deriv(dtheta[a], xs[i]) for a in (1, 2)), fctx.zero()) for i in range(ctx.m)]
    out = fctx.zero()
    for idx, c in alpha.items():
        idx = tuple(idx)
        if any(not 0 <= i < ctx.m for i in idx):
            raise CalculusError(f"form index {idx} out of range")
        if list(idx) != sorted(set(idx)):
            raise CalculusError(f"form indices must be strictly increasing: {idx}")
        term = substitute(ctx.field(c), xs)
        for i in idx:
            term = term * dx[i]
        out = out + term
    return out


def form_components(ctx: Ctx, alpha: Mapping) -> dict[tuple[tuple[int, ...], tuple[int, int]], Elem]:
    """Components of ``φ*α`` keyed by (θ-monomial, dθ-exponents).

    The θ-monomial is written in the order ``θ^2 θ^1`` (e.g. ``(2, 1)``), the
    dθ part as the exponent pair of ``(dθ^1, dθ^2)``.
    """
    return split_form(ctx, form_expansion(ctx, alpha))


def split_form(ctx: Ctx, e: Elem) -> dict:
    fctx = e.ctx
    th = {fctx.gen_by_label("th1"): 1, fctx.gen_by_label("th2"): 2}
    dth = {fctx.gen_by_label("dth1"): 0, fctx.gen_by_label("dth2"): 1}
    groups: dict = {}
    for (odds, evens), c in e.terms.items():
        tkey = tuple(th[k] for k in odds if k in th)
        rest_odds = tuple(k for k in odds if k not in th)
        dexp = [0, 0]
        rest_evens = []
        for k, ex in evens:
            if k in dth:
                dexp[dth[k]] = ex
            else:
                rest_evens.append((k, ex))
        groups.setdefault((tkey, tuple(dexp)), {})[(rest_odds, tuple(rest_evens))] = c
    return {k: restrict(Elem(fctx, v), ctx) for k, v in groups.items()}
