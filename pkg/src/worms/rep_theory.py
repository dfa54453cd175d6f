"""Young tables, Schur dimensions and highest-weight kernels on bidegree fibers.

A fiber is the space of constant-coefficient gorms of a fixed bidegree
(polynomials in ``ξ_1^i, ξ_2^i, y^i``).  Highest-weight gorms of weight
``(p, q)`` with ``p >= q`` are those annulled by the raising operator; the
generic ones are additionally annulled by ``R_1`` and ``R_2``.

Raising-operator conventions:

* ``e12`` (default): ``E_1^2 = ξ_1 ∂/∂ξ_2`` on bidegree ``(p, q)``, ``p >= q``.
* ``e21``: ``E_2^1 = ξ_2 ∂/∂ξ_1`` on the transposed bidegree ``(q, p)``.

The two agree by the symmetry exchanging the two directions.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

from .algebra import Ctx, Deriv, Elem, apply_deriv
from .calculus import euler_op, mat2_act, r_op
from .linalg import nullspace, rank, sparse_matrix

CONVENTIONS = ("e12", "e21")


class RepError(ValueError):
    pass


@dataclass(frozen=True)
class YoungTable:
    rows: tuple[int, ...]

    def __post_init__(self):
        rows = tuple(int(r) for r in self.rows)
        if any(r <= 0 for r in rows):
            raise RepError("row lengths must be positive")
        if any(a < b for a, b in zip(rows, rows[1:])):
            raise RepError("row lengths must be weakly decreasing")
        object.__setattr__(self, "rows", rows)

    @classmethod
    def of(cls, *rows) -> "YoungTable":
        if len(rows) == 1 and not isinstance(rows[0], int):
            rows = tuple(rows[0])
        return cls(tuple(rows))

    @classmethod
    def parse(cls, text: str) -> "YoungTable":
        text = text.strip()
        if not text:
            return cls(())
        try:
            return cls(tuple(int(t) for t in text.split(",")))
        except ValueError:
            raise RepError(f"bad table {text!r}: expected comma-separated row lengths") from None

    @classmethod
    def from_columns(cls, cols: Sequence[int]) -> "YoungTable":
        return cls(()).transpose() if not cols else cls(tuple(cols)).transpose()

    def transpose(self) -> "YoungTable":
        if not self.rows:
            return self
        return YoungTable(tuple(sum(1 for r in self.rows if r > j) for j in range(self.rows[0])))

    @property
    def columns(self) -> tuple[int, ...]:
        return self.transpose().rows

    @property
    def size(self) -> int:
        return sum(self.rows)

    def cells(self):
        for i, r in enumerate(self.rows):
            for j in range(r):
                yield i, j

    def is_two_column(self) -> bool:
        return bool(self.rows) and self.rows[0] == 2

    def __str__(self):
        return "(" + ",".join(map(str, self.rows)) + ")"


def schur_dim(lam: YoungTable, m: int) -> int:
    """Dimension of the Schur functor ``S_λ(R^m)`` (hook-content formula)."""
    if m < 1:
        raise RepError("m must be positive")
    cols = lam.columns
    num = 1
    den = 1
    for i, j in lam.cells():
        num *= m + j - i
        den *= (lam.rows[i] - j) + (cols[j] - i) - 1
    out = Fraction(num, den)
    assert out.denominator == 1
    return int(out)


def mat2_support(p: int, q: int, m: int) -> bool:
    """Whether a Mat(2) highest weight ``(p, q)`` can occur for ``dim M = m``."""
    return abs(p - q) <= m


def tetris_sequence(ell: YoungTable) -> list[YoungTable]:
    """The cotangent-tetris tables of a two-column table.

    Each step removes the bottom cell of both columns and adds a cell to the
    first row, until the second column has length one.
    """
    if not ell.is_two_column():
        raise RepError("not a generic (two-column) table")
    c1, c2 = ell.columns
    out = []
    for k in range(c2):
        cols = [c1 - k, c2 - k]
        rows = list(YoungTable.from_columns(cols).rows)
        rows[0] += k
        out.append(YoungTable(tuple(rows)))
    return out


def tilde_dim(ell: YoungTable, m: int) -> int:
    return sum(schur_dim(t, m) for t in tetris_sequence(ell))


# -- fibers --------------------------------------------------------------------

@dataclass
class FiberSpace:
    ctx: Ctx
    p: int
    q: int
    basis: list  # canonical monomials

    @property
    def dim(self) -> int:
        return len(self.basis)

    def elements(self) -> list[Elem]:
        return [self.ctx.monomial(mon) for mon in self.basis]

    def index(self) -> dict:
        return {mon: k for k, mon in enumerate(self.basis)}

    def coords_of(self, e: Elem) -> list[Fraction]:
        idx = self.index()
        v = [Fraction(0)] * self.dim
        for mon, c in e.terms.items():
            if mon not in idx:
                raise RepError("element outside the fiber")
            v[idx[mon]] = c.constant()
        return v

    def vector_to_elem(self, v: Sequence[Fraction]) -> Elem:
        out = {}
        for mon, c in zip(self.basis, v):
            if c:
                out[mon] = self.ctx.field(c)
        return Elem(self.ctx, out)


def fiber_basis(ctx: Ctx, p: int, q: int) -> FiberSpace:
    """All constant-coefficient monomials of bidegree ``(p, q)``."""
    if ctx.n != 2:
        raise RepError("fiber_basis needs n = 2")
    if p < 0 or q < 0:
        return FiberSpace(ctx, p, q, [])
    m = ctx.m
    xi1 = [ctx.gen_id(i, (1,)) for i in range(m)]
    xi2 = [ctx.gen_id(i, (2,)) for i in range(m)]
    ys = [ctx.gen_id(i, (1, 2)) for i in range(m)]
    basis = []
    for t in range(min(p, q) + 1):
        for a in itertools.combinations(xi1, p - t):
            for b in itertools.combinations(xi2, q - t):
                odds = tuple(sorted(a + b))
                for ymul in itertools.combinations_with_replacement(ys, t):
                    evens = tuple((k, ymul.count(k)) for k in sorted(set(ymul)))
                    basis.append((odds, evens))
    basis.sort(key=lambda mon: (mon[1], mon[0]))
    return FiberSpace(ctx, p, q, basis)


def op_on_fiber(fiber: FiberSpace, ops: Sequence[Deriv]):
    """Stacked matrix of ``ops`` on the fiber (rows indexed by output monomials)."""
    rows: dict = {}
    entries = {}
    for D in ops:
        if D.ctx != fiber.ctx:
            raise RepError("operator from a different context")
        if D.has_coef_action():
            raise RepError("not fiberwise")
    for j, e in enumerate(fiber.elements()):
        for k, D in enumerate(ops):
            for mon, c in apply_deriv(D, e).terms.items():
                if not c.is_constant():
                    raise RepError("not fiberwise")
                r = rows.setdefault((k, mon), len(rows))
                entries[r, j] = c.constant()
    return sparse_matrix(entries, len(rows), fiber.dim)


def hw_kernel(fiber: FiberSpace, ops: Sequence[Deriv]) -> list[Elem]:
    """Exact basis of the joint kernel of ``ops`` on the fiber."""
    if fiber.dim == 0:
        return []
    M = op_on_fiber(fiber, ops)
    return [fiber.vector_to_elem(v) for v in nullspace(M)]


def kernel_dim(fiber: FiberSpace, ops: Sequence[Deriv]) -> int:
    if fiber.dim == 0:
        return 0
    return fiber.dim - rank(op_on_fiber(fiber, ops))


def raising_op(ctx: Ctx, convention: str = "e12") -> Deriv:
    if convention == "e12":
        return euler_op(ctx, 1, 2)
    if convention == "e21":
        return euler_op(ctx, 2, 1)
    raise RepError(f"unknown convention {convention!r}; expected one of {CONVENTIONS}")


def hw_bidegree(p: int, q: int, convention: str = "e12") -> tuple[int, int]:
    """Fiber carrying highest weight ``(p, q)``, ``p >= q``, under a convention."""
    return (p, q) if convention == "e12" else (q, p)


@lru_cache(maxsize=None)
def _ctx(m: int) -> Ctx:
    return Ctx(2, m)


def hw_dim(m: int, p: int, q: int, convention: str = "e12", generic: bool = False) -> int:
    """Dimension of highest-weight gorms of weight ``(p, q)`` (``p >= q``).

    With ``generic`` the kernel also includes ``R_1`` and ``R_2``.
    """
    ctx = _ctx(m)
    fiber = fiber_basis(ctx, *hw_bidegree(p, q, convention))
    ops = [raising_op(ctx, convention)]
    if generic:
        ops += [r_op(ctx, 1), r_op(ctx, 2)]
    return kernel_dim(fiber, ops)


def tilde_dim_kernel(ell: YoungTable, m: int, convention: str = "e12") -> int:
    """``dim T~*_ℓ`` computed as a kernel on the fiber of bidegree ``ℓᵀ``."""
    cols = ell.columns
    p = cols[0] if cols else 0
    q = cols[1] if len(cols) > 1 else 0
    if len(cols) > 2:
        raise RepError("table has more than two columns")
    return hw_dim(m, p, q, convention, generic=True)


def mat2_irrep_dim(p: int, q: int) -> int:
    """Dimension of the Mat(2) irreducible with highest weight ``(p, q)``, ``p >= q``."""
    return p - q + 1


def two_column_tables(max_c2: int, max_extra: int):
    """Two-column tables with ``1 <= c2 <= max_c2`` and ``c1 - c2 <= max_extra``."""
    for c2 in range(1, max_c2 + 1):
        for c1 in range(c2, c2 + max_extra + 1):
            yield YoungTable.from_columns([c1, c2])


# -- decomposition report ------------------------------------------------------

@dataclass
class DecompositionRow:
    p: int
    q: int
    fiber_dim: int
    hw_dim: int
    irrep_dim: int
    total: int
    tilde_dim: int
    generic: int
    remainder: int
    in_support: bool
    character_ok: bool

    def to_json(self):
        return dict(self.__dict__)


@dataclass
class DecompositionReport:
    m: int
    max_total_degree: int
    convention: str
    rows: list[DecompositionRow]

    @property
    def ok(self) -> bool:
        return all(r.remainder >= 0 and r.character_ok for r in self.rows)

    def to_json(self):
        return {
            "m": self.m,
            "max_total_degree": self.max_total_degree,
            "convention": self.convention,
            "ok": self.ok,
            "rows": [r.to_json() for r in self.rows],
        }

    def text_table(self) -> str:
        """Grid of highest weights: ``G`` generic present, ``o`` only non-generic, ``.`` absent."""
        cells = {(r.p, r.q): r for r in self.rows}
        D = self.max_total_degree
        lines = []
        for q in range(D // 2, -1, -1):
            line = f"{q:>3} "
            for p in range(D + 1):
                r = cells.get((p, q))
                if r is None:
                    mark = " "
                elif r.generic:
                    mark = "G"
                elif r.hw_dim:
                    mark = "o"
                else:
                    mark = "."
                line += f" {mark}"
            lines.append(line.rstrip())
        lines.append("    " + "".join(f" {p % 10}" for p in range(D + 1)))
        lines.append("q/p: G generic part present, o non-generic only, . empty")
        return "\n".join(lines)


def decompose_report(m: int, max_total_degree: int, convention: str = "e12") -> DecompositionReport:
    """Per highest weight ``(p, q)``, ``p >= q``, ``p + q <= bound``: dimension accounting.

    * ``hw_dim``: highest-weight gorms (kernel of the raising operator)
    * ``total = hw_dim × irrep_dim``: the isotypic part of the fiber
    * ``generic = tilde_dim × irrep_dim`` over two-column tables (``(0,0)`` counts as 1)
    * ``remainder = total - generic`` (the non-generic part)
    * ``character_ok``: fiber dimension equals the sum of weight multiplicities
    """
    if convention not in CONVENTIONS:
        raise RepError(f"unknown convention {convention!r}")
    if isinstance(m, Ctx):
        m = m.m
    ctx = _ctx(m)
    hw = {}
    for total_deg in range(max_total_degree + 1):
        for q in range(total_deg // 2 + 1):
            p = total_deg - q
            hw[p, q] = hw_dim(m, p, q, convention)
    rows = []
    for total_deg in range(max_total_degree + 1):
        for q in range(total_deg // 2 + 1):
            p = total_deg - q
            fdim = fiber_basis(ctx, p, q).dim
            irrep = mat2_irrep_dim(p, q)
            h = hw[p, q]
            if q == 0 and p == 0:
                tdim = 1
            elif q == 0:
                tdim = 0
            else:
                tdim = tilde_dim(YoungTable.from_columns([p, q]), m)
            char = sum(hw[pp, total_deg - pp] for pp in range(p, total_deg + 1))
            rows.append(
                DecompositionRow(
                    p, q, fdim, h, irrep, h * irrep, tdim, tdim * irrep,
                    h * irrep - tdim * irrep, mat2_support(p, q, m), char == fdim,
                )
            )
    return DecompositionReport(m, max_total_degree, convention, rows)


def mat2_fiber_stable(ctx: Ctx, p: int, q: int, A) -> bool:
    """A (diagonal, invertible) A maps the (p, q) fiber bijectively onto itself."""
    return _stable(ctx, fiber_basis(ctx, p, q).basis, A)


def mat2_total_stable(ctx: Ctx, total: int, A) -> bool:
    """An invertible A maps the sum of the fibers with p + q = total bijectively onto itself."""
    basis = []
    for p in range(total + 1):
        basis += fiber_basis(ctx, p, total - p).basis
    return _stable(ctx, basis, A)


def _stable(ctx: Ctx, basis, A) -> bool:
    fiber = FiberSpace(ctx, -1, -1, basis)
    phi = mat2_act(ctx, A)
    idx = fiber.index()
    entries = {}
    for j, e in enumerate(fiber.elements()):
        for mon, c in phi(e).terms.items():
            if mon not in idx:
                return False
            entries[idx[mon], j] = c.constant()
    return rank(sparse_matrix(entries, fiber.dim, fiber.dim)) == fiber.dim
