"""Exact rational functions of the even base coordinates.

Every coefficient that appears in a worm is an element of ``Q(x^1, ..., x^m)``.
Arithmetic is delegated to sympy's sparse fraction field, which keeps each
value reduced (gcd cancelled, denominator with positive leading coefficient
under graded-lex order), so ``==`` is structural equality.
"""
from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Sequence

import numpy as np
import sympy
from sympy import QQ
from sympy.polys.fields import FracField
from sympy.polys.orderings import grlex
from sympy.parsing.sympy_parser import (
    convert_xor,
    parse_expr,
    standard_transformations,
)


class CoefError(ValueError):
    pass


class ZeroDivisorError(CoefError, ZeroDivisionError):
    pass


class PoleError(CoefError):
    pass


class CoefField:
    """The field Q(x^1..x^m) for a fixed list of coordinate names."""

    def __init__(self, names: Sequence[str]):
        names = tuple(names)
        if not names:
            raise CoefError("a chart needs at least one coordinate")
        if len(set(names)) != len(names):
            raise CoefError(f"duplicate coordinate names: {names}")
        self.names = names
        self.m = len(names)
        self._symbols = tuple(sympy.Symbol(n) for n in names)
        self.K = FracField(self._symbols, QQ, grlex)
        self.gens = tuple(Coef(self, g) for g in self.K.gens)
        self.zero = Coef(self, self.K.zero)
        self.one = Coef(self, self.K.one)

    def __eq__(self, other):
        return isinstance(other, CoefField) and other.names == self.names

    def __hash__(self):
        return hash(("CoefField", self.names))

    def __repr__(self):
        return f"CoefField({', '.join(self.names)})"

    def __call__(self, value) -> "Coef":
        """Coerce an int, Fraction, Coef or expression string into the field."""
        if isinstance(value, Coef):
            if value.field != self:
                raise CoefError("coefficient belongs to a different chart")
            return value
        if isinstance(value, str):
            return self.parse(value)
        if isinstance(value, Fraction):
            return Coef(self, self.K(QQ(value.numerator, value.denominator)))
        if isinstance(value, (int, np.integer)):
            return Coef(self, self.K(int(value)))
        if isinstance(value, float):
            raise CoefError("floating-point coefficients are not allowed; use a fraction")
        return Coef(self, self.K(value))

    def parse(self, text: str) -> "Coef":
        """Parse infix text such as ``"4/(1+u^2+v^2)^2"``.

        Only the chart's coordinate names and integer literals are accepted.
        """
        return _parse(self, text)

    def var(self, i: int) -> "Coef":
        return self.gens[i]


_TRANSFORMS = standard_transformations + (convert_xor,)


def _parse(field: CoefField, text: str) -> "Coef":
    if not isinstance(text, str) or not text.strip():
        raise CoefError(f"empty coefficient expression: {text!r}")
    for tok in _number_tokens(text):
        if "." in tok:
            raise CoefError(f"decimal literal {tok!r} in {text!r}; use a fraction")
    local = dict(zip(field.names, field._symbols))
    try:
        expr = parse_expr(text, local_dict=local, transformations=_TRANSFORMS, evaluate=True)
    except Exception as exc:  # sympy raises a zoo of exception types
        raise CoefError(f"cannot parse coefficient {text!r}: {exc}") from None
    extra = expr.free_symbols - set(field._symbols)
    if extra:
        raise CoefError(f"unknown symbols {sorted(map(str, extra))} in {text!r}")
    if expr.has(sympy.Float) or expr.has(sympy.zoo) or expr.has(sympy.nan):
        raise CoefError(f"not a rational function: {text!r}")
    try:
        return Coef(field, field.K.from_expr(expr))
    except Exception as exc:
        raise CoefError(f"not a rational function of {field.names}: {text!r} ({exc})") from None


def _number_tokens(text: str) -> list[str]:
    out, cur = [], ""
    for ch in text:
        if ch.isdigit() or ch == ".":
            cur += ch
        else:
            if cur:
                out.append(cur)
            cur = ""
    if cur:
        out.append(cur)
    return out


class Coef:
    """Immutable element of a :class:`CoefField`."""

    __slots__ = ("field", "f")

    def __init__(self, field: CoefField, f):
        self.field = field
        self.f = f

    # -- coercion ---------------------------------------------------------
    def _lift(self, other):
        if isinstance(other, Coef):
            if other.field is not self.field and other.field != self.field:
                raise CoefError("coefficients from different charts")
            return other.f
        if isinstance(other, Fraction):
            return self.field.K(QQ(other.numerator, other.denominator))
        if isinstance(other, (int, np.integer)):
            return self.field.K(int(other))
        return NotImplemented

    # -- arithmetic -------------------------------------------------------
    def __add__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return o
        return Coef(self.field, self.f + o)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return o
        return Coef(self.field, self.f - o)

    def __rsub__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return o
        return Coef(self.field, o - self.f)

    def __mul__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return o
        return Coef(self.field, self.f * o)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return o
        if not o:
            raise ZeroDivisorError("zero divisor")
        return Coef(self.field, self.f / o)

    def __rtruediv__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return o
        if not self.f:
            raise ZeroDivisorError("zero divisor")
        return Coef(self.field, o / self.f)

    def __neg__(self):
        return Coef(self.field, -self.f)

    def __pow__(self, k: int):
        if not isinstance(k, int):
            return NotImplemented
        if k < 0 and not self.f:
            raise ZeroDivisorError("zero divisor")
        return Coef(self.field, self.f**k)

    def __eq__(self, other):
        if isinstance(other, Coef):
            return self.field == other.field and self.f == other.f
        o = self._lift(other)
        if o is NotImplemented:
            return False
        return self.f == o

    def __hash__(self):
        return hash(self.f)

    def __bool__(self):
        return bool(self.f)

    # -- structure --------------------------------------------------------
    @property
    def numer(self):
        return self.f.numer

    @property
    def denom(self):
        return self.f.denom

    def is_constant(self) -> bool:
        return self.f.numer.is_ground and self.f.denom.is_ground

    def is_polynomial(self) -> bool:
        return self.f.denom.is_ground

    def constant(self) -> Fraction:
        if not self.is_constant():
            raise CoefError(f"{self} is not a constant")
        return _to_fraction(self.f.numer.LC if self.f.numer else 0) / _to_fraction(self.f.denom.LC)

    def poly_terms(self) -> dict[tuple[int, ...], Fraction]:
        """Exponent vector -> rational coefficient, for polynomial values only."""
        if not self.is_polynomial():
            raise CoefError(f"{self} is not a polynomial")
        d = _to_fraction(self.f.denom.LC)
        return {mon: _to_fraction(c) / d for mon, c in self.f.numer.terms()}

    def total_degree(self) -> int:
        if not self.f.numer:
            return -1
        return max(sum(mon) for mon in self.f.numer.monoms())

    def partial(self, i: int) -> "Coef":
        return partial(self, i)

    def __call__(self, *point):
        return evaluate(self, point)

    def __repr__(self):
        return f"Coef({self})"

    def __str__(self):
        return to_text(self)


def _to_fraction(q) -> Fraction:
    return Fraction(int(q.numerator), int(q.denominator))


def to_text(c: Coef) -> str:
    """Canonical infix text; parses back to the same value."""
    num, den = c.f.numer, c.f.denom
    names = c.field.names
    ns = _poly_text(num, names)
    if den.is_ground and den.LC == 1:
        return ns
    ds = _poly_text(den, names)
    if len(num.terms()) > 1:
        ns = f"({ns})"
    return f"{ns}/({ds})" if len(den.terms()) > 1 or not den.is_ground else f"{ns}/{ds}"


def _poly_text(p, names) -> str:
    if not p:
        return "0"
    parts = []
    for mon, c in p.terms():
        c = _to_fraction(c)
        factors = []
        for name, e in zip(names, mon):
            if e == 1:
                factors.append(name)
            elif e > 1:
                factors.append(f"{name}^{e}")
        mag = abs(c)
        if factors:
            body = "*".join(factors)
            if mag != 1:
                body = f"{_frac_text(mag)}*{body}"
        else:
            body = _frac_text(mag)
        parts.append(("-" if c < 0 else "+", body))
    sign, body = parts[0]
    out = ("-" if sign == "-" else "") + body
    for sign, body in parts[1:]:
        out += f" {sign} {body}"
    return out


def _frac_text(q: Fraction) -> str:
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


# -- module-level operations ---------------------------------------------------

def arith(op: str, a: Coef, b: Coef) -> Coef:
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    if op == "div":
        return a / b
    raise CoefError(f"unknown operation {op!r}")


def partial(c: Coef, i: int) -> Coef:
    """Exact partial derivative with respect to coordinate ``i`` (0-based)."""
    if not 0 <= i < c.field.m:
        raise CoefError(f"coordinate index {i} out of range for {c.field.names}")
    return Coef(c.field, c.f.diff(c.field.K.gens[i]))


def _exact_point(field: CoefField, point) -> list:
    vals = []
    for v in point:
        if isinstance(v, Fraction):
            vals.append(QQ(v.numerator, v.denominator))
        elif isinstance(v, (int, np.integer)):
            vals.append(QQ(int(v)))
        else:
            return None
    return vals


def evaluate(c: Coef, point: Sequence) -> float | Fraction:
    """Evaluate at a point; exact (Fraction) when every entry is rational."""
    field = c.field
    if len(point) != field.m:
        raise CoefError(f"point has {len(point)} entries, chart has {field.m}")
    exact = _exact_point(field, point)
    if exact is not None:
        gens = field.K.ring.gens
        pairs = list(zip(gens, exact))
        den = c.f.denom.evaluate(pairs) if pairs else c.f.denom
        if den == 0:
            raise PoleError("pole at evaluation point")
        num = c.f.numer.evaluate(pairs)
        return _to_fraction(num) / _to_fraction(den)
    x = np.asarray(point, dtype=float)
    den = _eval_poly_float(c.f.denom, x)
    if den == 0:
        raise PoleError("pole at evaluation point")
    return float(_eval_poly_float(c.f.numer, x) / den)


def _eval_poly_float(p, x):
    total = 0.0
    for mon, coef in p.terms():
        term = float(_to_fraction(coef))
        for xi, e in zip(x, mon):
            if e:
                term *= xi**e
        total += term
    return total


class VectorizedCoef:
    """Numeric evaluator for a Coef over arrays of points.

    ``__call__(*arrays)`` broadcasts; raises :class:`PoleError` if the
    denominator vanishes anywhere.
    """

    def __init__(self, c: Coef):
        self.m = c.field.m
        self._num = _compile(c.f.numer)
        self._den = _compile(c.f.denom)

    def __call__(self, *xs):
        xs = [np.asarray(v, dtype=float) for v in xs]
        den = _run(self._den, xs)
        if np.any(den == 0):
            raise PoleError("pole at evaluation point")
        return _run(self._num, xs) / den


def _compile(p):
    return [(float(_to_fraction(c)), mon) for mon, c in p.terms()]


def _run(compiled, xs):
    shape = np.broadcast(*xs).shape if xs else ()
    out = np.zeros(shape)
    powers: dict[tuple[int, int], np.ndarray] = {}
    for c, mon in compiled:
        term = np.full(shape, c)
        for i, e in enumerate(mon):
            if e:
                key = (i, e)
                if key not in powers:
                    powers[key] = xs[i] ** e
                term = term * powers[key]
        out = out + term
    return out


def compose(c: Coef, images: Sequence[Coef]) -> Coef:
    """Substitute ``x^i -> images[i]`` (rational change of coordinates)."""
    field = images[0].field if images else c.field
    num = _compose_poly(c.f.numer, images, field)
    den = _compose_poly(c.f.denom, images, field)
    return num / den


def _compose_poly(p, images: Sequence[Coef], field: CoefField) -> Coef:
    total = field.zero
    cache: dict[tuple[int, int], Coef] = {}
    for mon, coef in p.terms():
        term = field(_to_fraction(coef))
        for i, e in enumerate(mon):
            if e:
                if (i, e) not in cache:
                    cache[(i, e)] = images[i] ** e
                term = term * cache[(i, e)]
        total = total + term
    return total


@lru_cache(maxsize=None)
def default_field(m: int) -> CoefField:
    return CoefField([f"x{i + 1}" for i in range(m)])


def field_for(names: Iterable[str]) -> CoefField:
    return _field_cache(tuple(names))


@lru_cache(maxsize=None)
def _field_cache(names: tuple[str, ...]) -> CoefField:
    return CoefField(names)
