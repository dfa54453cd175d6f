"""The free graded-commutative worm algebra on a chart.

Generators are ``d_S x^i`` for a nonempty subset ``S`` of ``{1..n}``; the
generator is odd iff ``|S|`` is odd and has multidegree the indicator vector
of ``S``.  The base coordinates ``x^i`` themselves are not generators: they
live in the coefficient field.

A monomial is stored as a pair ``(odds, evens)``: ``odds`` is a strictly
increasing tuple of generator ids (the canonical odd order), ``evens`` a sorted
tuple of ``(id, exponent)`` pairs.  Generator ids are assigned so that sorting
ids reproduces the canonical order ``(i, S)``; extra odd constants (used for
odd parameters and for the θ's of ``R^{0|n}``) come before all ``ξ``'s.
"""
from __future__ import annotations

import itertools
import json
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator, Mapping, Sequence

import sympy

from .coef import Coef, CoefError, CoefField, field_for, partial

Monomial = tuple  # (odds: tuple[int, ...], evens: tuple[tuple[int, int], ...])
ONE_MONOMIAL: Monomial = ((), ())


class AlgebraError(ValueError):
    pass


@dataclass(frozen=True)
class Gen:
    id: int
    label: str
    parity: int
    multideg: tuple[int, ...]
    coord: int | None  # base coordinate index, None for extra constants
    subset: tuple[int, ...]  # directions (1-based); () for extra constants


def _subsets(n: int) -> list[tuple[int, ...]]:
    out = []
    for k in range(1, n + 1):
        out.extend(itertools.combinations(range(1, n + 1), k))
    return out


class Ctx:
    """Generator table for Ω_[n] on an m-dimensional chart.

    ``extra_odd`` / ``extra_even`` adjoin constant generators of multidegree
    zero (odd parameters β, γ, the θ^a, the even dθ^a ...).  They are killed
    by every derivation built in :mod:`worms.calculus`.
    """

    def __init__(
        self,
        n: int,
        m: int | None = None,
        coords: Sequence[str] | None = None,
        extra_odd: Sequence[str] = (),
        extra_even: Sequence[str] = (),
    ):
        if coords is None:
            if m is None:
                raise AlgebraError("need m or coordinate names")
            coords = [f"x{i + 1}" for i in range(m)]
        coords = tuple(coords)
        if m is not None and m != len(coords):
            raise AlgebraError(f"m={m} does not match {len(coords)} coordinate names")
        if n < 1:
            raise AlgebraError("n must be a positive integer")
        if not coords:
            raise AlgebraError("empty chart (m = 0) is not supported")
        if n > 9:
            raise AlgebraError("generator labels support n <= 9")
        self.n = n
        self.m = len(coords)
        self.coords = coords
        self.extra_odd = tuple(extra_odd)
        self.extra_even = tuple(extra_even)
        self.field: CoefField = field_for(coords)
        self.subsets = _subsets(n)

        specs = []
        for lab in self.extra_odd:
            specs.append((lab, 1, (0,) * n, None, ()))
        for i in range(self.m):
            for S in sorted(s for s in self.subsets if len(s) % 2 == 1):
                specs.append((self._label(i, S), 1, self._indicator(S), i, S))
        for i in range(self.m):
            for S in sorted(s for s in self.subsets if len(s) % 2 == 0):
                specs.append((self._label(i, S), 0, self._indicator(S), i, S))
        for lab in self.extra_even:
            specs.append((lab, 0, (0,) * n, None, ()))
        self.gens: tuple[Gen, ...] = tuple(Gen(k, *spec) for k, spec in enumerate(specs))
        if len({g.label for g in self.gens}) != len(self.gens):
            raise AlgebraError("generator labels collide")
        self.ngens = len(self.gens)
        self.nslots = self.m + self.ngens
        self._by_label = {g.label: g.id for g in self.gens}
        self._by_coord = {(g.coord, g.subset): g.id for g in self.gens if g.coord is not None}
        self.odd_ids = tuple(g.id for g in self.gens if g.parity)
        self.top_ids = tuple(g.id for g in self.gens if g.parity and g.coord is not None)
        self._key = (n, self.coords, self.extra_odd, self.extra_even)

    def _label(self, i: int, S: tuple[int, ...]) -> str:
        return f"d{''.join(map(str, S))}({self.coords[i]})"

    def _indicator(self, S) -> tuple[int, ...]:
        return tuple(1 if a in S else 0 for a in range(1, self.n + 1))

    def __eq__(self, other):
        return isinstance(other, Ctx) and self._key == other._key

    def __hash__(self):
        return hash(self._key)

    def __repr__(self):
        extra = ""
        if self.extra_odd or self.extra_even:
            extra = f", extra_odd={list(self.extra_odd)}, extra_even={list(self.extra_even)}"
        return f"Ctx(n={self.n}, coords={list(self.coords)}{extra})"

    def extend(self, extra_odd: Sequence[str] = (), extra_even: Sequence[str] = ()) -> "Ctx":
        return Ctx(
            self.n,
            coords=self.coords,
            extra_odd=self.extra_odd + tuple(extra_odd),
            extra_even=self.extra_even + tuple(extra_even),
        )

    # -- generator lookup -------------------------------------------------
    def gen_id(self, i: int, S: Iterable[int]) -> int:
        S = tuple(sorted(S))
        try:
            return self._by_coord[(i, S)]
        except KeyError:
            raise AlgebraError(f"no generator d_{S} x^{i} in {self}") from None

    def gen_by_label(self, label: str) -> int:
        try:
            return self._by_label[label]
        except KeyError:
            raise AlgebraError(f"unknown generator {label!r}") from None

    # -- element constructors ---------------------------------------------
    def zero(self) -> "Elem":
        return Elem(self, {})

    def one(self) -> "Elem":
        return Elem(self, {ONE_MONOMIAL: self.field.one})

    def const(self, c) -> "Elem":
        c = self.field(c)
        return Elem(self, {ONE_MONOMIAL: c} if c else {})

    def x(self, i: int) -> "Elem":
        return self.const(self.field.gens[i])

    def gen(self, k: int) -> "Elem":
        g = self.gens[k]
        mon = ((k,), ()) if g.parity else ((), ((k, 1),))
        return Elem(self, {mon: self.field.one})

    def d(self, i: int, S: Iterable[int]) -> "Elem":
        """The generator ``d_S x^i`` (i 0-based, S a set of 1-based directions)."""
        return self.gen(self.gen_id(i, S))

    def xi(self, i: int, a: int = 1) -> "Elem":
        return self.d(i, (a,))

    def y(self, i: int) -> "Elem":
        if self.n != 2:
            raise AlgebraError("y^i = d1 d2 x^i needs n = 2")
        return self.d(i, (1, 2))

    def param(self, label: str) -> "Elem":
        return self.gen(self.gen_by_label(label))

    def monomial(self, mon: Monomial) -> "Elem":
        return Elem(self, {mon: self.field.one})

    def parse(self, text: str) -> "Elem":
        return parse_elem(self, text)


def make_context(n: int, m: int, coords: Sequence[str] | None = None) -> Ctx:
    return Ctx(n, m, coords)


# -- monomial arithmetic -------------------------------------------------------

def _merge_odds(a: tuple, b: tuple):
    """Sign and merged tuple for ``a * b``; ``None`` if a generator repeats."""
    if not a:
        return 1, b
    if not b:
        return 1, a
    out = []
    inversions = 0
    i = j = 0
    la, lb = len(a), len(b)
    while i < la and j < lb:
        if a[i] < b[j]:
            out.append(a[i])
            i += 1
        elif a[i] > b[j]:
            out.append(b[j])
            inversions += la - i
            j += 1
        else:
            return None
    out.extend(a[i:])
    out.extend(b[j:])
    return (-1 if inversions & 1 else 1), tuple(out)


def _merge_evens(a: tuple, b: tuple) -> tuple:
    if not a:
        return b
    if not b:
        return a
    d = dict(a)
    for k, e in b:
        d[k] = d.get(k, 0) + e
    return tuple(sorted(d.items()))


def mul_monomials(m1: Monomial, m2: Monomial):
    r = _merge_odds(m1[0], m2[0])
    if r is None:
        return None
    sign, odds = r
    return sign, (odds, _merge_evens(m1[1], m2[1]))


def monomial_parity(mon: Monomial) -> int:
    return len(mon[0]) & 1


# -- elements ------------------------------------------------------------------

class Elem:
    """A finite sum of Coef times monomial.  Treat as immutable."""

    __slots__ = ("ctx", "terms")

    def __init__(self, ctx: Ctx, terms: Mapping[Monomial, Coef]):
        self.ctx = ctx
        self.terms = terms

    def _check(self, other: "Elem"):
        if other.ctx != self.ctx:
            raise AlgebraError(f"mismatched contexts: {self.ctx} vs {other.ctx}")

    def _coerce(self, other):
        if isinstance(other, Elem):
            self._check(other)
            return other
        if isinstance(other, (Coef, int, Fraction)):
            return self.ctx.const(other)
        return None

    def __add__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        if not other.terms:
            return self
        if not self.terms:
            return other
        out = dict(self.terms)
        for mon, c in other.terms.items():
            v = out.get(mon)
            if v is None:
                out[mon] = c
            else:
                v = v + c
                if v:
                    out[mon] = v
                else:
                    del out[mon]
        return Elem(self.ctx, out)

    __radd__ = __add__

    def __neg__(self):
        return Elem(self.ctx, {mon: -c for mon, c in self.terms.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return other + (-self)

    def scale(self, c) -> "Elem":
        if not isinstance(c, Coef):
            c = self.ctx.field(c)
        if not c:
            return self.ctx.zero()
        return Elem(self.ctx, {mon: v * c for mon, v in self.terms.items()})

    def __mul__(self, other):
        if isinstance(other, (Coef, int, Fraction)):
            return self.scale(other)
        if not isinstance(other, Elem):
            return NotImplemented
        return mul(self, other)

    def __rmul__(self, other):
        if isinstance(other, (Coef, int, Fraction)):
            return self.scale(other)
        return NotImplemented

    def __pow__(self, k: int):
        out = self.ctx.one()
        for _ in range(k):
            out = out * self
        return out

    def __eq__(self, other):
        if isinstance(other, Elem):
            return self.ctx == other.ctx and self.terms == other.terms
        if isinstance(other, (Coef, int, Fraction)):
            return self == self.ctx.const(other)
        return NotImplemented

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __bool__(self):
        return bool(self.terms)

    def __iter__(self) -> Iterator[tuple[Monomial, Coef]]:
        return iter(sorted(self.terms.items(), key=lambda t: _mon_sort_key(t[0])))

    def __len__(self):
        return len(self.terms)

    def coeff(self, mon: Monomial) -> Coef:
        return self.terms.get(mon, self.ctx.field.zero)

    def parity(self) -> int | None:
        ps = {monomial_parity(mon) for mon in self.terms}
        if len(ps) == 1:
            return ps.pop()
        return 0 if not ps else None

    def multidegree(self):
        return multidegree(self)

    def is_constant(self) -> bool:
        return all(mon == ONE_MONOMIAL for mon in self.terms)

    def body(self) -> Coef:
        """The coefficient of the empty monomial."""
        return self.coeff(ONE_MONOMIAL)

    def map_coefs(self, fn) -> "Elem":
        out = {}
        for mon, c in self.terms.items():
            v = fn(c)
            if v:
                out[mon] = v
        return Elem(self.ctx, out)

    def __repr__(self):
        return f"Elem({self})"

    def __str__(self):
        return to_text(self)


def _mon_sort_key(mon: Monomial):
    odds, evens = mon
    deg = len(odds) + sum(e for _, e in evens)
    return (deg, odds, evens)


def mul(a: Elem, b: Elem) -> Elem:
    """Graded-commutative product with the Koszul sign rule."""
    a._check(b)
    if not a.terms or not b.terms:
        return a.ctx.zero()
    out: dict[Monomial, Coef] = {}
    for m1, c1 in a.terms.items():
        for m2, c2 in b.terms.items():
            r = mul_monomials(m1, m2)
            if r is None:
                continue
            sign, mon = r
            c = c1 * c2
            if sign < 0:
                c = -c
            v = out.get(mon)
            if v is None:
                out[mon] = c
            else:
                v = v + c
                if v:
                    out[mon] = v
                else:
                    del out[mon]
    return Elem(a.ctx, out)


def monomial_multidegree(ctx: Ctx, mon: Monomial) -> tuple[int, ...]:
    deg = [0] * ctx.n
    for k in mon[0]:
        for a, v in enumerate(ctx.gens[k].multideg):
            deg[a] += v
    for k, e in mon[1]:
        for a, v in enumerate(ctx.gens[k].multideg):
            deg[a] += v * e
    return tuple(deg)


def multidegree(e: Elem):
    """Common multidegree of all terms, or ``None`` if inhomogeneous (or zero)."""
    degs = {monomial_multidegree(e.ctx, mon) for mon in e.terms}
    if len(degs) == 1:
        return degs.pop()
    return None


def homogeneous_parts(e: Elem) -> dict[tuple[int, ...], Elem]:
    parts: dict[tuple[int, ...], dict] = {}
    for mon, c in e.terms.items():
        parts.setdefault(monomial_multidegree(e.ctx, mon), {})[mon] = c
    return {k: Elem(e.ctx, v) for k, v in parts.items()}


# -- derivations ---------------------------------------------------------------

class Deriv:
    """A graded derivation, given by its values on every coordinate slot.

    Slots ``0..m-1`` are the base coordinates ``x^i`` (their images define the
    action on coefficients, ``D(f) = sum_i (df/dx^i) D(x^i)``); slot ``m + k``
    is generator ``k``.  Missing slots map to zero.
    """

    __slots__ = ("ctx", "parity", "images", "_cache")

    def __init__(self, ctx: Ctx, parity: int, images: Mapping[int, Elem]):
        self.ctx = ctx
        self.parity = parity & 1
        self.images = {k: v for k, v in images.items() if v}
        self._cache: dict = {}

    @classmethod
    def from_maps(cls, ctx, parity, coord_images=None, gen_images=None) -> "Deriv":
        images = {}
        for i, v in (coord_images or {}).items():
            images[i] = v
        for k, v in (gen_images or {}).items():
            images[ctx.m + k] = v
        return cls(ctx, parity, images)

    def image(self, slot: int) -> Elem:
        return self.images.get(slot) or self.ctx.zero()

    def coord_image(self, i: int) -> Elem:
        return self.image(i)

    def gen_image(self, k: int) -> Elem:
        return self.image(self.ctx.m + k)

    def has_coef_action(self) -> bool:
        return any(k < self.ctx.m for k in self.images)

    def __call__(self, e: Elem) -> Elem:
        return apply_deriv(self, e)

    def __eq__(self, other):
        if not isinstance(other, Deriv):
            return NotImplemented
        if self.ctx != other.ctx:
            return False
        if not self.images and not other.images:
            return True
        return self.parity == other.parity and self.images == other.images

    def __hash__(self):
        return hash((self.parity, frozenset(self.images.items())))

    def __bool__(self):
        return bool(self.images)

    def __add__(self, other: "Deriv") -> "Deriv":
        if other.ctx != self.ctx:
            raise AlgebraError("mismatched contexts")
        if not other.images:
            return self
        if not self.images:
            return other
        if other.parity != self.parity:
            raise AlgebraError("cannot add derivations of different parity")
        out = dict(self.images)
        for k, v in other.images.items():
            out[k] = out[k] + v if k in out else v
        return Deriv(self.ctx, self.parity, out)

    def __neg__(self):
        return Deriv(self.ctx, self.parity, {k: -v for k, v in self.images.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c) -> "Deriv":
        return Deriv(self.ctx, self.parity, {k: v.scale(c) for k, v in self.images.items()})

    def __rmul__(self, c):
        if isinstance(c, Elem):
            return left_mul(c, self)
        return self.scale(c)

    def shift(self):
        """Multidegree shift, or None if the images are not consistently homogeneous."""
        shifts = set()
        ctx = self.ctx
        for k, v in self.images.items():
            src = (0,) * ctx.n if k < ctx.m else ctx.gens[k - ctx.m].multideg
            for mon in v.terms:
                deg = monomial_multidegree(ctx, mon)
                shifts.add(tuple(a - b for a, b in zip(deg, src)))
        if len(shifts) == 1:
            return shifts.pop()
        return (0,) * ctx.n if not shifts else None

    def __repr__(self):
        parts = []
        ctx = self.ctx
        for k in sorted(self.images):
            name = ctx.coords[k] if k < ctx.m else ctx.gens[k - ctx.m].label
            parts.append(f"({self.images[k]})∂[{name}]")
        body = " + ".join(parts) if parts else "0"
        return f"Deriv(parity={self.parity}: {body})"


def left_mul(f: Elem, D: Deriv) -> Deriv:
    """The derivation ``u -> f * D(u)`` (f homogeneous)."""
    p = f.parity()
    if p is None:
        raise AlgebraError("left multiplication needs a parity-homogeneous element")
    return Deriv(D.ctx, D.parity + p, {k: f * v for k, v in D.images.items()})


def basis_deriv(ctx: Ctx, slot: int) -> Deriv:
    """``∂/∂x^i`` for slot < m, ``∂/∂g`` for generator slots."""
    parity = 0 if slot < ctx.m else ctx.gens[slot - ctx.m].parity
    return Deriv(ctx, parity, {slot: ctx.one()})


def coef_action(D: Deriv, c: Coef) -> Elem:
    ctx = D.ctx
    out = ctx.zero()
    for i in range(ctx.m):
        img = D.images.get(i)
        if img is None:
            continue
        dc = partial(c, i)
        if dc:
            out = out + img.scale(dc)
    return out


def _deriv_monomial(D: Deriv, mon: Monomial) -> Elem:
    cached = D._cache.get(mon)
    if cached is not None:
        return cached
    ctx = D.ctx
    odds, evens = mon
    out = ctx.zero()
    # evens first: monomial = (even part) * o1 * ... * ok
    for idx, (k, e) in enumerate(evens):
        img = D.images.get(ctx.m + k)
        if img is None:
            continue
        rest = list(evens)
        if e == 1:
            del rest[idx]
        else:
            rest[idx] = (k, e - 1)
        factor = Elem(ctx, {(odds, tuple(rest)): ctx.field(e)})
        out = out + img * factor
    if odds:
        evpart = Elem(ctx, {((), evens): ctx.field.one})
        for j, k in enumerate(odds):
            img = D.images.get(ctx.m + k)
            if img is None:
                continue
            left = Elem(ctx, {(odds[:j], ()): ctx.field.one})
            right = Elem(ctx, {(odds[j + 1:], ()): ctx.field.one})
            term = evpart * left * img * right
            if D.parity and (j & 1):
                term = -term
            out = out + term
    D._cache[mon] = out
    return out


def apply_deriv(D: Deriv, e: Elem) -> Elem:
    """Graded Leibniz extension of the slot images."""
    if e.ctx != D.ctx:
        raise AlgebraError("mismatched contexts")
    ctx = D.ctx
    out = ctx.zero()
    coef_slots = any(i < ctx.m for i in D.images)
    for mon, c in e.terms.items():
        if coef_slots:
            dc = coef_action(D, c)
            if dc:
                out = out + dc * ctx.monomial(mon)
        dm = _deriv_monomial(D, mon)
        if dm:
            out = out + dm.scale(c)
    return out


def compose_apply(D1: Deriv, D2: Deriv, e: Elem) -> Elem:
    return apply_deriv(D1, apply_deriv(D2, e))


def bracket(D1: Deriv, D2: Deriv) -> Deriv:
    """Graded commutator ``D1 D2 - (-1)^{p1 p2} D2 D1``."""
    if D1.ctx != D2.ctx:
        raise AlgebraError("mismatched contexts")
    ctx = D1.ctx
    sign = -1 if (D1.parity and D2.parity) else 1
    images = {}
    for slot in range(ctx.nslots):
        a = apply_deriv(D1, D2.image(slot)) if slot in D2.images else ctx.zero()
        b = apply_deriv(D2, D1.image(slot)) if slot in D1.images else ctx.zero()
        v = a + b if sign < 0 else a - b
        if v:
            images[slot] = v
    return Deriv(ctx, D1.parity + D2.parity, images)


# -- text and JSON -------------------------------------------------------------

def monomial_text(ctx: Ctx, mon: Monomial) -> str:
    factors = []
    for k, e in mon[1]:
        lab = ctx.gens[k].label
        factors.append(lab if e == 1 else f"{lab}^{e}")
    factors.extend(ctx.gens[k].label for k in mon[0])
    return "*".join(factors)


def to_text(e: Elem) -> str:
    if not e.terms:
        return "0"
    parts = []
    for mon, c in e:
        ms = monomial_text(e.ctx, mon)
        cs = str(c)
        if not ms:
            parts.append(cs if " " not in cs.strip("-") else f"({cs})")
        elif cs == "1":
            parts.append(ms)
        elif cs == "-1":
            parts.append(f"-{ms}")
        else:
            parts.append(f"({cs})*{ms}")
    return " + ".join(parts).replace("+ -", "- ")


_GEN_TOKEN = re.compile(r"d(\d+)\(\s*([A-Za-z_][A-Za-z_0-9]*)\s*\)")


def parse_elem(ctx: Ctx, text: str) -> Elem:
    """Parse e.g. ``"x1^2*d1(x1) + (1/(1+x1^2))*d12(x1)*d2(x2)"``."""
    placeholders: dict[str, int] = {}

    def sub(match):
        digits, name = match.group(1), match.group(2)
        if name not in ctx.coords:
            raise AlgebraError(f"unknown coordinate {name!r} in {match.group(0)!r}")
        S = tuple(int(ch) for ch in digits)
        if len(set(S)) != len(S) or any(not 1 <= a <= ctx.n for a in S):
            raise AlgebraError(f"bad direction set in {match.group(0)!r}")
        gid = ctx.gen_id(ctx.coords.index(name), S)
        ph = f"G__{gid}"
        placeholders[ph] = gid
        return ph

    src = _GEN_TOKEN.sub(sub, text)
    for lab in ctx.extra_odd + ctx.extra_even:
        if re.fullmatch(r"[A-Za-z_][A-Za-z_0-9]*", lab) and re.search(rf"\b{lab}\b", src):
            gid = ctx.gen_by_label(lab)
            ph = f"G__{gid}"
            src = re.sub(rf"\b{lab}\b", ph, src)
            placeholders[ph] = gid
    local = {name: sympy.Symbol(name) for name in ctx.coords}
    for ph in placeholders:
        local[ph] = sympy.Symbol(ph, commutative=False)
    from sympy.parsing.sympy_parser import convert_xor, parse_expr, standard_transformations

    try:
        expr = parse_expr(src, local_dict=local, transformations=standard_transformations + (convert_xor,))
    except Exception as exc:
        raise AlgebraError(f"cannot parse element {text!r}: {exc}") from None
    return _from_sympy(ctx, expr, placeholders)


def _from_sympy(ctx: Ctx, expr, placeholders) -> Elem:
    if not any(s.name in placeholders for s in expr.free_symbols):
        try:
            return ctx.const(ctx.field.K.from_expr(expr) if not expr.is_Integer else int(expr))
        except Exception:
            raise AlgebraError(f"not a rational coefficient: {expr}") from None
    if isinstance(expr, sympy.Symbol):
        return ctx.gen(placeholders[expr.name])
    if isinstance(expr, sympy.Add):
        out = ctx.zero()
        for a in expr.args:
            out = out + _from_sympy(ctx, a, placeholders)
        return out
    if isinstance(expr, sympy.Mul):
        out = ctx.one()
        for a in expr.args:
            out = out * _from_sympy(ctx, a, placeholders)
        return out
    if isinstance(expr, sympy.Pow) and expr.exp.is_Integer and expr.exp >= 0:
        return _from_sympy(ctx, expr.base, placeholders) ** int(expr.exp)
    raise AlgebraError(f"unsupported expression {expr}")


def to_json(e: Elem) -> dict:
    ctx = e.ctx
    terms = []
    for mon, c in e:
        terms.append(
            {
                "odd": [ctx.gens[k].label for k in mon[0]],
                "even": [[ctx.gens[k].label, ex] for k, ex in mon[1]],
                "coef": str(c),
            }
        )
    return {
        "n": ctx.n,
        "coords": list(ctx.coords),
        "extra_odd": list(ctx.extra_odd),
        "extra_even": list(ctx.extra_even),
        "terms": terms,
    }


def from_json(data: dict | str) -> Elem:
    if isinstance(data, str):
        data = json.loads(data)
    ctx = Ctx(
        data["n"],
        coords=data["coords"],
        extra_odd=data.get("extra_odd", ()),
        extra_even=data.get("extra_even", ()),
    )
    out = ctx.zero()
    for t in data["terms"]:
        mon = ctx.one()
        for lab, ex in t["even"]:
            mon = mon * ctx.gen(ctx.gen_by_label(lab)) ** ex
        for lab in t["odd"]:
            mon = mon * ctx.gen(ctx.gen_by_label(lab))
        out = out + mon.scale(ctx.field.parse(t["coef"]))
    return out


def embed(e: Elem, target: Ctx) -> Elem:
    """Re-express ``e`` in a context with the same chart and more generators."""
    src = e.ctx
    if src == target:
        return e
    if src.n != target.n or src.coords != target.coords:
        raise AlgebraError("can only embed into an extension of the same chart")
    idmap = {g.id: target.gen_by_label(g.label) for g in src.gens}
    out = target.zero()
    for mon, c in e.terms.items():
        img = target.const(target.field(c) if c.field == target.field else c)
        for k, ex in mon[1]:
            img = img * target.gen(idmap[k]) ** ex
        for k in mon[0]:
            img = img * target.gen(idmap[k])
        out = out + img
    return out


def restrict(e: Elem, target: Ctx) -> Elem:
    """Inverse of :func:`embed` on elements that avoid the extra generators."""
    src = e.ctx
    idmap = {}
    for g in src.gens:
        try:
            idmap[g.id] = target.gen_by_label(g.label)
        except AlgebraError:
            pass
    out = target.zero()
    for mon, c in e.terms.items():
        if any(k not in idmap for k in mon[0]) or any(k not in idmap for k, _ in mon[1]):
            raise AlgebraError("element involves generators missing from the target context")
        img = target.const(c)
        for k, ex in mon[1]:
            img = img * target.gen(idmap[k]) ** ex
        for k in mon[0]:
            img = img * target.gen(idmap[k])
        out = out + img
    return out


def coerce_coef(ctx: Ctx, c) -> Coef:
    try:
        return ctx.field(c)
    except CoefError as exc:
        raise AlgebraError(str(exc)) from None
