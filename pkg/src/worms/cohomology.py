"""Finite truncations of worm complexes as exact rational linear maps.

The truncated space is spanned by ``x^α · (generator monomial)``.  Every
coordinate, ``ξ`` and ``y`` has weight 1 in the total degree, so ``d_a``,
``R_a`` and the n = 1 differential preserve it; the x-degree never goes up
under them.  A truncation by total degree (and optionally by x-degree) is
therefore a subcomplex.
"""
from __future__ import annotations

import itertools
from math import comb
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .algebra import Ctx, Deriv, Elem, apply_deriv, monomial_multidegree
from .calculus import Morphism, d_op, euler_op, mat2_act, r_op
from .linalg import nullspace, rank, sparse_matrix


class CohomologyError(ValueError):
    pass


@dataclass(frozen=True)
class TruncationSpec:
    """``max_degree``: total degree bound; ``max_x_degree``: bound on the
    polynomial degree of coefficients (0 = constant coefficients, i.e. fibers);
    ``window``: optional inclusive upper bound on each multidegree entry."""

    max_degree: int
    max_x_degree: int | None = None
    window: tuple[int, ...] | None = None

    def __post_init__(self):
        if self.max_degree < 0:
            raise CohomologyError("max_degree must be nonnegative")
        if self.max_x_degree is not None and self.max_x_degree < 0:
            raise CohomologyError("max_x_degree must be nonnegative")

    def bumped(self) -> "TruncationSpec":
        return TruncationSpec(self.max_degree + 1, self.max_x_degree, self.window)

    def to_json(self):
        return {"max_degree": self.max_degree, "max_x_degree": self.max_x_degree,
                "window": list(self.window) if self.window else None}


# basis element: (x-exponents, monomial)
BasisKey = tuple


def _gen_monomials(ctx: Ctx, max_count: int):
    """Generator monomials (only coordinate generators) with at most ``max_count`` factors."""
    odd = [g.id for g in ctx.gens if g.coord is not None and g.parity]
    even = [g.id for g in ctx.gens if g.coord is not None and not g.parity]
    for k_odd in range(min(len(odd), max_count) + 1):
        for odds in itertools.combinations(odd, k_odd):
            for k_even in range(max_count - k_odd + 1):
                for ev in itertools.combinations_with_replacement(even, k_even):
                    evens = tuple((k, ev.count(k)) for k in sorted(set(ev)))
                    yield (odds, evens)


def _x_exponents(m: int, max_deg: int):
    for d in range(max_deg + 1):
        for combo in itertools.combinations_with_replacement(range(m), d):
            yield tuple(combo.count(i) for i in range(m))


def _mon_count(mon) -> int:
    return len(mon[0]) + sum(e for _, e in mon[1])


def truncated_basis(ctx: Ctx, trunc: TruncationSpec) -> list[BasisKey]:
    out = []
    for mon in _gen_monomials(ctx, trunc.max_degree):
        rest = trunc.max_degree - _mon_count(mon)
        if trunc.window is not None:
            md = monomial_multidegree(ctx, mon)
            if any(a > b for a, b in zip(md, trunc.window)):
                continue
        xdeg = rest if trunc.max_x_degree is None else min(rest, trunc.max_x_degree)
        for alpha in _x_exponents(ctx.m, xdeg):
            out.append((alpha, mon))
    out.sort(key=lambda k: (monomial_multidegree(ctx, k[1]), sum(k[0]), k[1], k[0]))
    return out


def basis_elem(ctx: Ctx, key: BasisKey) -> Elem:
    alpha, mon = key
    c = ctx.field.one
    for i, a in enumerate(alpha):
        if a:
            c = c * ctx.field.var(i) ** a
    return Elem(ctx, {mon: c})


def expand(e: Elem) -> dict[BasisKey, Fraction]:
    out = {}
    for mon, c in e.terms.items():
        if not c.is_polynomial():
            raise CohomologyError("non-polynomial coefficient in truncated complex")
        for alpha, v in c.poly_terms().items():
            out[(alpha, mon)] = out.get((alpha, mon), Fraction(0)) + v
    return {k: v for k, v in out.items() if v}


@dataclass
class OpMatrix:
    matrix: object  # DomainMatrix
    domain: list[BasisKey]
    codomain: list[BasisKey]

    @property
    def shape(self):
        return self.matrix.shape

    def entry(self, row_key, col_key) -> Fraction:
        i = self.codomain.index(row_key)
        j = self.domain.index(col_key)
        v = self.matrix.to_sdm().get(i, {}).get(j, 0)
        return Fraction(int(v.numerator), int(v.denominator)) if v else Fraction(0)


def op_matrix(D: Deriv, trunc: TruncationSpec, domain: Sequence[BasisKey] | None = None) -> OpMatrix:
    """Matrix of D on the truncated basis; the codomain basis grows as needed."""
    ctx = D.ctx
    domain = list(domain) if domain is not None else truncated_basis(ctx, trunc)
    codomain = list(domain)
    index = {k: i for i, k in enumerate(codomain)}
    entries = {}
    for j, key in enumerate(domain):
        for k, v in expand(apply_deriv(D, basis_elem(ctx, key))).items():
            if k not in index:
                index[k] = len(codomain)
                codomain.append(k)
            entries[index[k], j] = v
    return OpMatrix(sparse_matrix(entries, len(codomain), len(domain)), domain, codomain)


@dataclass
class BettiEntry:
    multidegree: tuple[int, ...]
    dim: int
    kernel: int
    image: int
    betti: int
    betti_next: int
    stable: bool

    def to_json(self):
        return {
            "multidegree": list(self.multidegree),
            "dim": self.dim,
            "kernel": self.kernel,
            "image": self.image,
            "betti": self.betti,
            "betti_next": self.betti_next,
            "stable": self.stable,
        }


@dataclass
class BettiReport:
    operator: str
    truncation: TruncationSpec
    shift: tuple[int, ...] | None
    entries: list[BettiEntry]

    def betti(self, stable_only: bool = True) -> dict[tuple[int, ...], int]:
        return {e.multidegree: e.betti for e in self.entries if e.betti and (e.stable or not stable_only)}

    @property
    def all_stable(self) -> bool:
        return all(e.stable for e in self.entries)

    def to_json(self):
        return {
            "operator": self.operator,
            "truncation": self.truncation.to_json(),
            "shift": list(self.shift) if self.shift else None,
            "nonzero_stable_betti": {",".join(map(str, k)): v for k, v in sorted(self.betti().items())},
            "all_stable": self.all_stable,
            "entries": [e.to_json() for e in self.entries],
        }


@dataclass
class _Blocks:
    dims: dict
    ranks: dict  # source multidegree -> rank of D on that block
    shift: tuple | None
    keys: dict


def _blocks(D: Deriv, trunc: TruncationSpec, check_square: bool = True) -> _Blocks:
    ctx = D.ctx
    basis = truncated_basis(ctx, trunc)
    inside = set(basis)
    by_md: dict = {}
    for key in basis:
        by_md.setdefault(monomial_multidegree(ctx, key[1]), []).append(key)
    shift = None
    ranks = {}
    for md, keys in by_md.items():
        rows: dict = {}
        entries = {}
        for j, key in enumerate(keys):
            img = apply_deriv(D, basis_elem(ctx, key))
            for k, v in expand(img).items():
                if k not in inside:
                    raise CohomologyError("operator leaves the truncation (unbounded image)")
                s = tuple(a - b for a, b in zip(monomial_multidegree(ctx, k[1]), md))
                if shift is None:
                    shift = s
                elif s != shift:
                    raise CohomologyError("operator is not homogeneous")
                r = rows.setdefault(k, len(rows))
                entries[r, j] = v
            if check_square and img:
                if apply_deriv(D, img):
                    raise CohomologyError("not a differential")
        ranks[md] = rank(sparse_matrix(entries, len(rows), len(keys))) if rows else 0
    return _Blocks({md: len(k) for md, k in by_md.items()}, ranks, shift, by_md)


def _betti_table(blk: _Blocks) -> dict:
    out = {}
    for md, dim in blk.dims.items():
        ker = dim - blk.ranks[md]
        im = 0
        if blk.shift is not None:
            src = tuple(a - b for a, b in zip(md, blk.shift))
            im = blk.ranks.get(src, 0)
        out[md] = (dim, ker, im, ker - im)
    return out


def betti(D: Deriv, trunc: TruncationSpec, name: str = "D") -> BettiReport:
    """Per-multidegree Betti numbers at ``trunc`` and at the next total degree."""
    if D.parity != 1:
        raise CohomologyError("not a differential (operator is even)")
    t0 = _betti_table(_blocks(D, trunc))
    blk1 = _blocks(D, trunc.bumped(), check_square=True)
    t1 = _betti_table(blk1)
    entries = []
    for md in sorted(set(t0) | set(t1)):
        dim, ker, im, b = t0.get(md, (0, 0, 0, 0))
        b1 = t1.get(md, (0, 0, 0, 0))[3]
        if b < 0 or b1 < 0:
            raise AssertionError("negative Betti number")
        entries.append(BettiEntry(md, dim, ker, im, b, b1, b == b1))
    return BettiReport(name, trunc, blk1.shift, entries)


# -- induced maps on cohomology ------------------------------------------------

def _kernel_and_image(D: Deriv, keys_md, keys_prev):
    """Kernel basis of D on block ``keys_md`` and image vectors from ``keys_prev``."""
    ctx = D.ctx
    idx = {k: i for i, k in enumerate(keys_md)}
    rows: dict = {}
    entries = {}
    for j, key in enumerate(keys_md):
        for k, v in expand(apply_deriv(D, basis_elem(ctx, key))).items():
            r = rows.setdefault(k, len(rows))
            entries[r, j] = v
    kern = nullspace(sparse_matrix(entries, len(rows), len(keys_md)))
    image = []
    for key in keys_prev:
        vec = [Fraction(0)] * len(keys_md)
        for k, v in expand(apply_deriv(D, basis_elem(ctx, key))).items():
            vec[idx[k]] = v
        image.append(vec)
    return kern, image


def _vec_elem(ctx: Ctx, keys, vec) -> Elem:
    out = ctx.zero()
    for key, v in zip(keys, vec):
        if v:
            out = out + basis_elem(ctx, key).scale(v)
    return out


def _rank_rows(vectors, ncols) -> int:
    entries = {(i, j): v for i, vec in enumerate(vectors) for j, v in enumerate(vec) if v}
    return rank(sparse_matrix(entries, len(vectors), ncols)) if vectors else 0


def induced_map_check(D: Deriv, F, trunc: TruncationSpec, expect: str) -> dict:
    """Check the map induced on H(D) by ``F`` (a Deriv or Morphism preserving multidegree).

    ``expect`` is ``"zero"`` (F z lies in im D for every cocycle z) or
    ``"identity"`` (F z - z lies in im D).  Also checks ``F`` commutes with D
    (up to the Koszul sign for an odd derivation).
    """
    ctx = D.ctx
    blk = _blocks(D, trunc)
    apply_f = (lambda e: apply_deriv(F, e)) if isinstance(F, Deriv) else F
    commutes = True
    sign = -1 if isinstance(F, Deriv) and F.parity else 1
    for keys in blk.keys.values():
        for key in keys:
            e = basis_elem(ctx, key)
            lhs = apply_f(apply_deriv(D, e))
            rhs = apply_deriv(D, apply_f(e))
            if lhs != (rhs if sign > 0 else -rhs):
                commutes = False
    ok = True
    checked = 0
    for md, keys in blk.keys.items():
        prev_md = tuple(a - b for a, b in zip(md, blk.shift)) if blk.shift else None
        prev = blk.keys.get(prev_md, [])
        kern, image = _kernel_and_image(D, keys, prev)
        idx = {k: i for i, k in enumerate(keys)}
        base_rank = _rank_rows(image, len(keys))
        for z in kern:
            ze = _vec_elem(ctx, keys, z)
            fz = apply_f(ze)
            if expect == "identity":
                fz = fz - ze
            vec = [Fraction(0)] * len(keys)
            for k, v in expand(fz).items():
                if k not in idx:
                    ok = False
                    break
                vec[idx[k]] = v
            if _rank_rows(image + [vec], len(keys)) != base_rank:
                ok = False
            checked += 1
    return {"commutes": commutes, "induced_ok": ok, "cocycles_checked": checked, "expect": expect}


def e11_trivial_on_r1(m: int, max_degree: int) -> dict:
    """E_1^1 induces zero on R_1-cohomology of the fibers."""
    ctx = Ctx(2, m)
    return induced_map_check(r_op(ctx, 1), euler_op(ctx, 1, 1), TruncationSpec(max_degree, 0), "zero")


def rescaling_trivial_on_r1(m: int, max_degree: int, lam=Fraction(3)) -> dict:
    """The rescaling d_1 x -> λ d_1 x, y -> λ y induces the identity on R_1-cohomology."""
    ctx = Ctx(2, m)
    phi = mat2_act(ctx, [[lam, 0], [0, 1]])
    return induced_map_check(r_op(ctx, 1), phi, TruncationSpec(max_degree, 0), "identity")


# -- projections Ω_[2] -> Ω ----------------------------------------------------

def projection_to_forms(ctx: Ctx, keep: int) -> Morphism:
    """Algebra map Ω_[2] -> Ω sending ``d_keep x -> dx``, the other ξ and y to 0."""
    tgt = Ctx(1, coords=ctx.coords)
    gen_images = {}
    for g in ctx.gens:
        if g.subset == (keep,):
            gen_images[g.id] = tgt.xi(g.coord, 1)
        else:
            gen_images[g.id] = tgt.zero()
    return Morphism(ctx, tgt, [tgt.x(i) for i in range(ctx.m)], gen_images)


def pairing_report(m: int, max_degree: int) -> dict:
    """Both projections against the R_1 complex on fibers.

    A projection ``P`` to Ω (zero differential) is a chain map iff
    ``P ∘ R_1 = 0``; it is a quasi-isomorphism iff additionally it maps
    R_1-cocycles onto Ω bijectively modulo coboundaries.
    """
    ctx = Ctx(2, m)
    R1 = r_op(ctx, 1)
    trunc = TruncationSpec(max_degree, 0)
    basis = truncated_basis(ctx, trunc)
    blk = _blocks(R1, trunc)
    out = {}
    for name, keep in (("d1->d, d2->0", 1), ("d2->d, d1->0", 2)):
        P = projection_to_forms(ctx, keep)
        chain = all(not P(apply_deriv(R1, basis_elem(ctx, k))) for k in basis)
        iso = None
        if chain:
            iso = True
            total_h = 0
            for md, keys in blk.keys.items():
                prev_md = tuple(a - b for a, b in zip(md, blk.shift))
                kern, image = _kernel_and_image(R1, keys, blk.keys.get(prev_md, []))
                hdim = len(kern) - _rank_rows(image, len(keys))
                total_h += hdim
                imgs = [P(_vec_elem(ctx, keys, z)) for z in kern]
                monos = sorted({mon for e in imgs for mon in e.terms})
                vecs = [[e.terms[mon].constant() if mon in e.terms else Fraction(0) for mon in monos] for e in imgs]
                if (_rank_rows(vecs, len(monos)) if monos else 0) != hdim:
                    iso = False
            # onto the constant-coefficient forms
            if total_h != sum(comb(m, k) for k in range(min(m, max_degree) + 1)):
                iso = False
        out[name] = {"chain_map": chain, "quasi_isomorphism": iso}
    return out


def named_differential(name: str, m: int) -> tuple[Deriv, Ctx]:
    if name == "d":
        ctx = Ctx(1, m)
        return d_op(ctx, 1), ctx
    ctx = Ctx(2, m)
    table = {"d1": lambda: d_op(ctx, 1), "d2": lambda: d_op(ctx, 2), "r1": lambda: r_op(ctx, 1), "r2": lambda: r_op(ctx, 2)}
    if name not in table:
        raise CohomologyError(f"unknown differential {name!r}; expected d, d1, d2, r1 or r2")
    return table[name](), ctx
