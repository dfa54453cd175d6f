"""Invariant suites: exact identities of the calculus checked on concrete and
randomized inputs.  Each suite returns a :class:`SuiteResult`; the CLI
``check`` command and the acceptance tests run them."""
from __future__ import annotations

import itertools
import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

from . import theta_fields as tf
from .algebra import Ctx, Deriv, Elem, apply_deriv, basis_deriv, bracket, left_mul
from .calculus import (
    CoordChange,
    compose_changes,
    d_op,
    flat_theta_derivative,
    fn_bracket,
    iota_op,
    lie_op,
    pullback,
    split_derivation_n1,
    structure_ops,
    theta_contract,
)
from .coef import Coef, field_for, partial


@dataclass
class Check:
    name: str
    passed: bool
    detail: str = ""


@dataclass
class SuiteResult:
    suite: str
    checks: list[Check] = field(default_factory=list)

    def add(self, name: str, passed: bool, detail: str = ""):
        self.checks.append(Check(name, bool(passed), detail))

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    @property
    def first_failure(self) -> Check | None:
        return next((c for c in self.checks if not c.passed), None)

    def to_json(self):
        return {
            "suite": self.suite,
            "passed": self.passed,
            "checks": [{"name": c.name, "passed": c.passed, "detail": c.detail} for c in self.checks],
        }


# -- random inputs -------------------------------------------------------------

def random_poly(rng: random.Random, fld, degree: int, terms: int = 3, coeff: int = 3) -> Coef:
    out = fld.zero
    m = fld.m
    for _ in range(terms):
        d = rng.randint(0, degree)
        mono = fld.one
        for _ in range(d):
            mono = mono * fld.var(rng.randrange(m))
        c = rng.randint(-coeff, coeff)
        out = out + mono * c
    return out


def random_vector_field(rng, ctx: Ctx, degree: int = 3) -> list[Coef]:
    return [random_poly(rng, ctx.field, degree) for _ in range(ctx.m)]


def random_change(rng, ctx: Ctx, degree: int = 2) -> CoordChange:
    """``x_i + (higher-order polynomial)``: the Jacobian is 1 at the origin."""
    fld = ctx.field
    images = []
    for i in range(ctx.m):
        pert = fld.zero
        for _ in range(2):
            d = rng.randint(2, degree)
            mono = fld.one
            for _ in range(d):
                mono = mono * fld.var(rng.randrange(ctx.m))
            pert = pert + mono * Fraction(rng.randint(-3, 3), rng.randint(1, 3))
        images.append(fld.var(i) + pert + rng.randint(-2, 2))
    return CoordChange(tuple(images))


def random_elem(rng, ctx: Ctx, terms: int = 3, max_gens: int = 3, parity: int | None = None) -> Elem:
    out = ctx.zero()
    coord_gens = [g.id for g in ctx.gens if g.coord is not None]
    attempts = 0
    while len(out.terms) < terms and attempts < 50:
        attempts += 1
        e = ctx.const(random_poly(rng, ctx.field, 2, terms=2))
        for _ in range(rng.randint(0, max_gens)):
            e = e * ctx.gen(rng.choice(coord_gens))
        if not e:
            continue
        if parity is not None and e.parity() != parity:
            continue
        out = out + e
    return out


# -- suites --------------------------------------------------------------------

def suite_brackets(m: int = 3) -> SuiteResult:
    """All graded brackets among d_a, E_a^b, R_a against θ-vector fields."""
    res = SuiteResult("brackets")
    ctx = Ctx(2, m)
    ops = structure_ops(ctx)
    fields = tf.standard_basis_n2()
    names = list(fields)

    def engine(coords: dict) -> Deriv:
        out = None
        for k, c in coords.items():
            term = ops[k].scale(c)
            out = term if out is None else out + term
        return out

    for a, b in itertools.combinations_with_replacement(names, 2):
        lhs = bracket(ops[a], ops[b])
        oracle = tf.v_bracket(fields[a], fields[b])
        coords = tf.decompose_n2(oracle)
        # u -> -u♭ reverses the bracket
        rhs = -engine(coords) if coords else None
        ok = (not lhs) if rhs is None else lhs == rhs
        res.add(f"[{a},{b}]", ok, f"oracle={coords}")
    r = bracket(ops["R1"], ops["d2"])
    res.add("[R1,d2] = -E11", r == -ops["E11"])
    res.add("[d1,d2] = 0", not bracket(ops["d1"], ops["d2"]))
    res.add("[d1,d1] = 0", not bracket(ops["d1"], ops["d1"]))
    return res


def suite_cartan(count: int = 20, seed: int = 1, max_m: int = 3, degree: int = 3) -> SuiteResult:
    res = SuiteResult("cartan")
    rng = random.Random(seed)
    for k in range(count):
        m = 1 + k % max_m
        c1 = Ctx(1, m)
        v = random_vector_field(rng, c1, degree)
        L = lie_op(c1, v)
        d = d_op(c1, 1)
        i = iota_op(c1, v)
        res.add(f"n=1 #{k} [d,i_v] = L_v", bracket(d, i) == L)
        res.add(f"n=1 #{k} [Dθ, θ·L_v] = L_v", bracket(flat_theta_derivative(c1, 1), theta_contract(c1, (1,), L)) == L)
        res.add(f"n=1 #{k} θ·L_v = -i_v", theta_contract(c1, (1,), L) == -i)
        c2 = Ctx(2, m)
        L2 = lie_op(c2, v)
        iv = iota_op(c2, v)
        d1, d2 = d_op(c2, 1), d_op(c2, 2)
        res.add(f"n=2 #{k} [d1,[d2,i_v]] = L_v", bracket(d1, bracket(d2, iv)) == L2)
        res.add(f"n=2 #{k} [d_a,L_v] = 0", not bracket(d1, L2) and not bracket(d2, L2))
        res.add(f"n=2 #{k} θ²θ¹·L_v = i_v", theta_contract(c2, (2, 1), L2) == iv)
    return res


def _second_order_image(ctx: Ctx, phi: CoordChange, i: int) -> Elem:
    out = ctx.zero()
    for j in range(ctx.m):
        dj = partial(phi.images[i], j)
        if dj:
            out = out + ctx.y(j).scale(dj)
        for k in range(ctx.m):
            djk = partial(dj, k)
            if djk:
                out = out + (ctx.xi(j, 1) * ctx.xi(k, 2)).scale(djk)
    return out


def suite_pullback(count: int = 10, seed: int = 2) -> SuiteResult:
    res = SuiteResult("pullback")
    rng = random.Random(seed)
    for k in range(count):
        n = 1 + k % 3
        m = 1 + (k // 3) % 2
        ctx = Ctx(n, m)
        phi = random_change(rng, ctx)
        psi = random_change(rng, ctx)
        P, Q = pullback(ctx, phi), pullback(ctx, psi)
        res.add(f"#{k} n={n} m={m} functoriality", pullback(ctx, compose_changes(phi, psi)) == P.then(Q))
        for _ in range(2):
            e = random_elem(rng, ctx)
            f = random_elem(rng, ctx)
            res.add(f"#{k} multiplicative", P(e * f) == P(e) * P(f))
            for a in range(1, n + 1):
                D = d_op(ctx, a)
                res.add(f"#{k} commutes with d{a}", P(apply_deriv(D, e)) == apply_deriv(D, P(e)))
        if n == 2:
            ok = all(P.gen_images[ctx.gen_id(i, (1, 2))] == _second_order_image(ctx, phi, i) for i in range(m))
            res.add(f"#{k} second-derivative transition term", ok)
    ctx = Ctx(2, coords=["x"])
    P = pullback(ctx, ["x^2"])
    res.add("x^2: y -> 2xy + 2ξ1ξ2", P(ctx.y(0)) == ctx.parse("2*x*d12(x) + 2*d1(x)*d2(x)"))
    return res


def _der_basis(ctx: Ctx) -> list[Deriv]:
    base = [basis_deriv(ctx, s) for s in range(ctx.nslots)]
    mult = [ctx.one(), ctx.xi(0, 1), ctx.y(0), ctx.xi(0, 1) * ctx.xi(ctx.m - 1, 2)]
    out = []
    for D in base:
        for f in mult:
            w = left_mul(f, D)
            if w:
                out.append(w)
    return out


def suite_clifford(m: int = 2) -> SuiteResult:
    res = SuiteResult("clifford")
    ctx = Ctx(2, m)
    flat = {a: flat_theta_derivative(ctx, a) for a in (1, 2)}
    th = lambda a, D: theta_contract(ctx, (a,), D)
    ok = {k: True for k in ("ad-theta", "theta-theta", "ad-ad", "identities")}
    for D in _der_basis(ctx):
        for a in (1, 2):
            for b in (1, 2):
                lhs = bracket(flat[a], th(b, D)) + th(b, bracket(flat[a], D))
                want = D if a == b else Deriv(ctx, (D.parity + 1) & 1, {})
                if lhs != want:
                    ok["ad-theta"] = False
                if th(a, th(b, D)) + th(b, th(a, D)):
                    ok["theta-theta"] = False
                if bracket(flat[a], bracket(flat[b], D)) + bracket(flat[b], bracket(flat[a], D)):
                    ok["ad-ad"] = False
        # θ^2θ^1 acting at once agrees with θ^2·(θ^1·D)
        if theta_contract(ctx, (2, 1), D) != th(2, th(1, D)):
            ok["identities"] = False
    res.add("{ad_(∂θa)♭, θ^b·} = δ_ab", ok["ad-theta"])
    res.add("{θ^a·, θ^b·} = 0", ok["theta-theta"])
    res.add("{ad, ad} = 0", ok["ad-ad"])
    res.add("θ^S·(θ^T·D) = (θ^Sθ^T)·D", ok["identities"])
    dx = basis_deriv(ctx, 0)
    res.add("θ¹·∂x = -∂ξ1", theta_contract(ctx, (1,), dx) == -basis_deriv(ctx, ctx.m + ctx.gen_id(0, (1,))))
    res.add("θ²θ¹·∂x = ∂y", theta_contract(ctx, (2, 1), dx) == basis_deriv(ctx, ctx.m + ctx.gen_id(0, (1, 2))))
    c1 = Ctx(1, 1)
    res.add("θ·∂ξ = 0 (n=1)", not theta_contract(c1, (1,), basis_deriv(c1, 1)))
    return res


def _deriv_vector(D: Deriv) -> dict:
    out = {}
    for slot, img in D.images.items():
        for mon, c in img.terms.items():
            for alpha, v in c.poly_terms().items():
                out[(slot, mon, alpha)] = v
    return out


def _rank_of(vectors: list[dict]) -> int:
    from .linalg import rank, sparse_matrix

    keys = {}
    entries = {}
    for i, vec in enumerate(vectors):
        for k, v in vec.items():
            j = keys.setdefault(k, len(keys))
            entries[i, j] = v
    return rank(sparse_matrix(entries, len(vectors), len(keys))) if vectors else 0


def suite_split(count: int = 10, seed: int = 3) -> SuiteResult:
    res = SuiteResult("split")
    rng = random.Random(seed)
    for k in range(count):
        m = 1 + k % 2
        ctx = Ctx(1, m)
        parity = k % 2
        images = {}
        for slot in range(ctx.nslots):
            sp = 0 if slot < ctx.m else 1
            e = random_elem(rng, ctx, terms=2, max_gens=2, parity=(parity + sp) & 1)
            if e:
                images[slot] = e
        D = Deriv(ctx, parity, images)
        w1, w2 = split_derivation_n1(D)
        flat = flat_theta_derivative(ctx, 1)
        res.add(f"#{k} w1 + w2 = D", w1 + w2 == D)
        res.add(f"#{k} [Dθ, w1] = 0", not bracket(flat, w1))
        res.add(f"#{k} θ·w2 = 0", not theta_contract(ctx, (1,), w2))
    # uniqueness: w -> ([Dθ,w], θ·w) is injective on a spanning set
    for m in (1, 2):
        ctx = Ctx(1, m)
        flat = flat_theta_derivative(ctx, 1)
        span = []
        coefs = [ctx.one(), ctx.x(0), ctx.xi(0), ctx.x(0) * ctx.xi(ctx.m - 1), ctx.xi(0) * ctx.xi(ctx.m - 1)]
        for s in range(ctx.nslots):
            for f in coefs:
                w = left_mul(f, basis_deriv(ctx, s))
                if w:
                    span.append(w)
        dim = _rank_of([_deriv_vector(w) for w in span])
        image = []
        for w in span:
            v = {("a",) + k: x for k, x in _deriv_vector(bracket(flat, w)).items()}
            v.update({("t",) + k: x for k, x in _deriv_vector(theta_contract(ctx, (1,), w)).items()})
            image.append(v)
        res.add(f"uniqueness m={m}", _rank_of(image) == dim, f"span dim {dim}")
    ctx = Ctx(1, 1)
    dxi = basis_deriv(ctx, 1)
    w1, w2 = split_derivation_n1(dxi)
    res.add("split(∂ξ) = (0, ∂ξ)", not w1 and w2 == dxi)
    dx = basis_deriv(ctx, 0)
    w1, w2 = split_derivation_n1(dx)
    res.add("split(∂x) = (∂x, 0)", w1 == dx and not w2)
    return res


def nijenhuis_torsion(K: list[list[Coef]]) -> dict:
    """``N^i_{jk}`` for ``K = K^i_j dx^j ⊗ ∂_i``."""
    m = len(K)
    out = {}
    for i in range(m):
        for j in range(m):
            for k in range(m):
                s = K[0][0].field.zero
                for l in range(m):
                    s = s + K[l][j] * partial(K[i][k], l) - K[l][k] * partial(K[i][j], l)
                    s = s - K[i][l] * (partial(K[l][k], j) - partial(K[l][j], k))
                out[i, j, k] = s
    return out


def _form_from_tensor(ctx: Ctx, K: list[list[Coef]]) -> list[Elem]:
    return [sum((ctx.xi(j).scale(K[i][j]) for j in range(ctx.m) if K[i][j]), ctx.zero()) for i in range(ctx.m)]


def _two_form_components(ctx: Ctx, comps: list[Elem]) -> dict:
    out = {}
    for i, e in enumerate(comps):
        for j in range(ctx.m):
            for k in range(j + 1, ctx.m):
                mon = ((ctx.gen_id(j, (1,)), ctx.gen_id(k, (1,))), ())
                out[i, j, k] = e.coeff(mon)
    return out


def suite_fn(count: int = 5, seed: int = 4) -> SuiteResult:
    res = SuiteResult("fn_bracket")
    c1 = Ctx(1, coords=["x"])
    res.add("[x∂x, ∂x] = -∂x", fn_bracket([c1.x(0)], [c1.one()]) == [-c1.one()])
    rng = random.Random(seed)
    ctx = Ctx(1, 2)
    fld = ctx.field
    for k in range(count):
        u = random_vector_field(rng, ctx, 2)
        v = random_vector_field(rng, ctx, 2)
        lie = [sum((u[j] * partial(v[i], j) - v[j] * partial(u[i], j) for j in range(2)), fld.zero) for i in range(2)]
        got = fn_bracket([ctx.const(c) for c in u], [ctx.const(c) for c in v])
        res.add(f"#{k} vector fields: Lie bracket", got == [ctx.const(c) for c in lie])
    ident = [[fld.one, fld.zero], [fld.zero, fld.one]]
    Id = _form_from_tensor(ctx, ident)
    res.add("[Id, Id] = 0", all(not c for c in fn_bracket(Id, Id)))
    for k in range(count):
        K = [[random_poly(rng, fld, 2) for _ in range(2)] for _ in range(2)]
        if k == 0:
            x = fld.var(0)
            K = [[x, fld.zero], [fld.zero, x * fld.var(1)]]
        form = _form_from_tensor(ctx, K)
        got = _two_form_components(ctx, fn_bracket(form, form))
        N = nijenhuis_torsion(K)
        ok = all(got[i, j, kk] == N[i, j, kk] * 2 for (i, j, kk) in got)
        res.add(f"#{k} [K,K] = 2 N_K", ok)
    return res


def suite_rep(max_m: int = 4) -> SuiteResult:
    from .rep_theory import (
        YoungTable,
        decompose_report,
        hw_dim,
        mat2_fiber_stable,
        mat2_total_stable,
        mat2_support,
        tilde_dim,
        tilde_dim_kernel,
        two_column_tables,
    )

    res = SuiteResult("representation")
    bad = []
    count = 0
    for m in range(1, max_m + 1):
        for ell in two_column_tables(3, m + 1):
            count += 1
            a, b = tilde_dim(ell, m), tilde_dim_kernel(ell, m)
            if a != b:
                bad.append(f"{ell} m={m}: {a} vs {b}")
    res.add("tilde_dim = joint kernel dim (c2<=3, m<=4)", not bad, f"{count} cases; " + "; ".join(bad))
    box = YoungTable.of(2, 2)
    res.add("⊞, m=2: 5 = 1 + 4", tilde_dim(box, 2) == 5 == tilde_dim_kernel(box, 2))
    res.add("⊞, m=2: e21 convention agrees", tilde_dim_kernel(box, 2, "e21") == 5)
    bad = []
    for m in range(1, 4):
        for tot in range(6):
            for q in range(tot // 2 + 1):
                p = tot - q
                if mat2_support(p, q, m) != (hw_dim(m, p, q) > 0):
                    bad.append(f"({p},{q}) m={m}")
    res.add("mat2_support = nonvanishing highest weights (p+q<=5, m<=3)", not bad, "; ".join(bad))
    ok = True
    for m in range(1, 4):
        rep = decompose_report(m, 6)
        ok = ok and rep.ok and all(r.remainder >= 0 for r in rep.rows)
    res.add("decompose_report remainders >= 0, characters consistent", ok)
    ctx = Ctx(2, 2)
    res.add("diagonal Mat(2) preserves each bidegree fiber", all(mat2_fiber_stable(ctx, p, q, [[2, 0], [0, 3]]) for p in range(4) for q in range(4)))
    res.add("invertible Mat(2) preserves each total-degree fiber", all(mat2_total_stable(ctx, N, [[2, 1], [1, 1]]) for N in range(6)))
    return res


def suite_cohomology() -> SuiteResult:
    from .cohomology import (
        TruncationSpec,
        betti,
        e11_trivial_on_r1,
        named_differential,
        pairing_report,
        rescaling_trivial_on_r1,
    )

    res = SuiteResult("cohomology")
    D, _ = named_differential("r1", 1)
    rep = betti(D, TruncationSpec(4, 0), "r1")
    res.add("R1 on m=1 fibers: {(0,0):1, (0,1):1}", rep.betti() == {(0, 0): 1, (0, 1): 1} and rep.all_stable, str(rep.betti()))
    D, _ = named_differential("d", 1)
    rep = betti(D, TruncationSpec(5), "d")
    res.add("Poincaré lemma n=1: H0=1, H1=0", rep.betti() == {(0,): 1} and rep.all_stable, str(rep.betti()))
    D, _ = named_differential("d1", 1)
    rep = betti(D, TruncationSpec(4), "d1")
    res.add("d1 on polynomial gorms: total Betti 1 in degree 0", rep.betti() == {(0, 0): 1}, str(rep.betti()))
    for m in (1, 2):
        r = e11_trivial_on_r1(m, 4)
        res.add(f"E11 induces zero on H(R1), m={m}", r["commutes"] and r["induced_ok"])
        r = rescaling_trivial_on_r1(m, 4)
        res.add(f"diag(λ,1) induces identity on H(R1), m={m}", r["commutes"] and r["induced_ok"])
    pr = pairing_report(1, 4)
    res.add("projection d2->d, d1->0 is a quasi-isomorphism for R1", pr["d2->d, d1->0"]["quasi_isomorphism"] is True)
    res.add("projection d1->d, d2->0 is not a chain map for R1 (recorded)", pr["d1->d, d2->0"]["chain_map"] is False)
    return res


def stokes_test_gorms():
    """Five Gaussian-weighted test gorms as (ctx, B, poly text, domain)."""
    c1 = Ctx(2, coords=["x"])
    c2 = Ctx(2, coords=["u", "v"])
    return [
        (c1, [["1"]], "x*d2(x)", "line"),
        (c1, [["1"]], "d12(x)*d2(x) + x^2*d1(x)", "line"),
        (c1, [["2"]], "(1+x)*d12(x)*d1(x) + x^3*d2(x)", "line"),
        (c1, [["1+x^2"]], "x*d12(x)^2*d2(x) + d1(x) - x*d12(x)*d1(x)", "line"),
        (c2, [["1", "1/2"], ["1/2", "1"]], "u*d1(u)*d2(u)*d1(v) + d12(v)*d2(u)*d1(v)*d2(v) + v*d12(u)*d1(u)*d2(v)*d1(v)", "plane"),
    ]


def suite_stokes(tol: float = 1e-9, nodes: int = 200) -> SuiteResult:
    from .integrate import PseudoGorm, QuadSettings, WEIGHT_GAUSS_X, integrate_gorm, stokes_check

    res = SuiteResult("stokes")
    settings = QuadSettings(nodes=nodes, refine=False)
    for k, (ctx, B, poly, dom) in enumerate(stokes_test_gorms()):
        Bc = [[ctx.field(v) for v in row] for row in B]
        g = PseudoGorm(ctx, Bc, ctx.parse(poly), WEIGHT_GAUSS_X)
        for name, op in structure_ops(ctx).items():
            val = stokes_check(op, g, dom, settings)
            # a nontrivial image: integrate the naive part u(poly) alone
            naive = integrate_gorm(PseudoGorm(ctx, Bc, apply_deriv(op, g.poly), g.weight), dom, settings).value
            res.add(f"gorm {k} {name}", abs(val) <= tol, f"∫={val:.3e}, ∫u(poly)={naive:.3e}")
    return res


def suite_integrate() -> SuiteResult:
    from .integrate import gorm_from_exponent, integrate_gorm, quadrature, wick

    res = SuiteResult("integrate")
    ctx = Ctx(2, coords=["x"])
    g = gorm_from_exponent(ctx.parse("-x^2 - d12(x)^2"), ctx.parse("d1(x)*d2(x)"))
    v = integrate_gorm(g, "line").value
    res.add("∫ e^{-x²-y²} ξ1ξ2 = π", abs(v - math.pi) <= 1e-9, f"{v!r}")
    g = gorm_from_exponent(ctx.parse("-x^2 - 2*d12(x)^2"), ctx.parse("d1(x)*d2(x)"))
    v = integrate_gorm(g, "line").value
    res.add("∫ e^{-x²-2y²} ξ1ξ2 = π/√2", abs(v - math.pi / math.sqrt(2)) <= 1e-9, f"{v!r}")
    fld = field_for(["x"])
    one = [[fld.one]]
    res.add("wick([[1]], 1) = 1", wick(one, {(0,): fld.one}).rat == fld.one)
    res.add("wick([[1]], y²) = 1/2", wick(one, {(2,): fld.one}).rat == fld(Fraction(1, 2)))
    f2 = field_for(["u", "v"])
    q = quadrature(f2.parse("4/(1+u^2+v^2)^2"), "plane")
    res.add("sphere area 4π", abs(q.value - 4 * math.pi) <= 1e-6, f"{q.value!r}")
    return res


SUITES: dict[str, Callable[[], SuiteResult]] = {
    "brackets": suite_brackets,
    "cartan": suite_cartan,
    "pullback": suite_pullback,
    "clifford": suite_clifford,
    "split": suite_split,
    "fn": suite_fn,
    "rep": suite_rep,
    "cohomology": suite_cohomology,
    "integrate": suite_integrate,
    "stokes": suite_stokes,
}
