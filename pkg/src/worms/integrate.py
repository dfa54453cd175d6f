"""Berezin integration of (pseudodifferential) gorms on a chart.

A pseudodifferential gorm is stored as ``e^{-yᵀBy} · weight(x) · poly`` with
``poly`` polynomial in y and the odd generators.  Integration extracts the
coefficient of the top odd monomial (in the canonical order
``ξ_1^1 ξ_2^1 ξ_1^2 ξ_2^2 ...``), does the Gaussian y-integral exactly by
Wick pairing and finally integrates the resulting function of x numerically.
"""
from __future__ import annotations

import json
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from pathlib import Path
from typing import Callable, Mapping, Sequence

import numpy as np

from .algebra import Ctx, Elem, apply_deriv
from .calculus import coef_det, d_op
from .coef import Coef, CoefError, VectorizedCoef, compose, field_for, partial

WEIGHT_GAUSS_X = "gauss_x"
DEFAULT_NODES = 400


class IntegrationError(ValueError):
    pass


# -- metrics and chart domains -------------------------------------------------

@dataclass(frozen=True)
class Domain:
    """Chart domain: ``line`` (R), ``plane`` (R^2), ``rectangle`` or ``disk``."""

    kind: str
    bounds: tuple = ()
    radius: float = 1.0

    @classmethod
    def parse(cls, spec, m: int) -> "Domain":
        if isinstance(spec, Domain):
            return spec
        if isinstance(spec, str):
            spec = {"type": spec}
        if not isinstance(spec, Mapping) or "type" not in spec:
            raise IntegrationError("domain: expected a name or an object with a 'type' field")
        kind = spec["type"]
        if kind == "line":
            if m != 1:
                raise IntegrationError("domain: 'line' needs dim 1")
            return cls("line")
        if kind == "plane":
            if m != 2:
                raise IntegrationError("domain: 'plane' needs dim 2")
            return cls("plane")
        if kind == "rectangle":
            bounds = spec.get("bounds")
            if not isinstance(bounds, list) or len(bounds) != m or any(len(b) != 2 for b in bounds):
                raise IntegrationError(f"domain.bounds: expected {m} pairs [lo, hi]")
            bounds = tuple((float(Fraction(str(lo))), float(Fraction(str(hi)))) for lo, hi in bounds)
            if any(lo >= hi for lo, hi in bounds):
                raise IntegrationError("domain.bounds: empty interval")
            return cls("rectangle", bounds=bounds)
        if kind == "disk":
            if m != 2:
                raise IntegrationError("domain: 'disk' needs dim 2")
            r = float(Fraction(str(spec.get("radius", 1))))
            if r <= 0:
                raise IntegrationError("domain.radius: must be positive")
            return cls("disk", radius=r)
        raise IntegrationError(f"domain.type: unknown domain {kind!r}")

    def to_json(self):
        if self.kind == "rectangle":
            return {"type": "rectangle", "bounds": [list(b) for b in self.bounds]}
        if self.kind == "disk":
            return {"type": "disk", "radius": self.radius}
        return {"type": self.kind}

    def is_compact(self) -> bool:
        return self.kind in ("rectangle", "disk")


@dataclass(frozen=True)
class MetricSpec:
    coords: tuple[str, ...]
    metric: tuple[tuple[Coef, ...], ...]
    domain: Domain
    euler_char: int | None = None

    @property
    def dim(self) -> int:
        return len(self.coords)

    @classmethod
    def build(cls, coords, metric, domain, euler_char=None) -> "MetricSpec":
        coords = tuple(coords)
        fld = field_for(coords)
        m = len(coords)
        if len(metric) != m or any(len(row) != m for row in metric):
            raise IntegrationError(f"metric: expected a {m}x{m} matrix")
        try:
            b = tuple(tuple(fld(v) for v in row) for row in metric)
        except CoefError as exc:
            raise IntegrationError(f"metric: {exc}") from None
        for i in range(m):
            for j in range(i):
                if b[i][j] != b[j][i]:
                    raise IntegrationError(f"metric: not symmetric at ({i + 1},{j + 1})")
        if not coef_det([list(r) for r in b]):
            raise IntegrationError("metric: determinant vanishes identically")
        return cls(coords, b, Domain.parse(domain, m), euler_char)

    @classmethod
    def from_json(cls, data) -> "MetricSpec":
        if isinstance(data, (str, Path)) and Path(data).exists():
            data = json.loads(Path(data).read_text())
        elif isinstance(data, str) and data.lstrip().startswith("{"):
            try:
                data = json.loads(data)
            except json.JSONDecodeError as exc:
                raise IntegrationError(f"metric JSON: {exc}") from None
        elif isinstance(data, (str, Path)):
            raise IntegrationError(f"metric file not found: {data}")
        if not isinstance(data, Mapping):
            raise IntegrationError("metric JSON: expected an object")
        for key in ("coords", "metric", "domain"):
            if key not in data:
                raise IntegrationError(f"{key}: missing field")
        coords = data["coords"]
        if "dim" in data and data["dim"] != len(coords):
            raise IntegrationError("dim: does not match the number of coordinates")
        chi = data.get("euler_char")
        if chi is not None and not isinstance(chi, int):
            raise IntegrationError("euler_char: expected an integer")
        return cls.build(coords, data["metric"], data["domain"], chi)

    def to_json(self):
        return {
            "dim": self.dim,
            "coords": list(self.coords),
            "metric": [[str(v) for v in row] for row in self.metric],
            "domain": self.domain.to_json(),
            "euler_char": self.euler_char,
        }

    def scaled(self, factor) -> "MetricSpec":
        fld = field_for(self.coords)
        f = fld(factor)
        return MetricSpec(self.coords, tuple(tuple(f * v for v in row) for row in self.metric), self.domain, self.euler_char)


def pullback_metric(metric: MetricSpec, new_coords, images, domain=None) -> MetricSpec:
    """Metric in coordinates ``s`` with ``x^i = images[i](s)``: ``Jᵀ b(x(s)) J``."""
    new_coords = tuple(new_coords)
    fld = field_for(new_coords)
    imgs = [fld(v) for v in images]
    if len(imgs) != metric.dim:
        raise IntegrationError("need one image per old coordinate")
    J = [[partial(imgs[i], k) for k in range(len(new_coords))] for i in range(metric.dim)]
    b = [[compose(metric.metric[i][j], imgs) for j in range(metric.dim)] for i in range(metric.dim)]
    n = len(new_coords)
    out = [[fld.zero] * n for _ in range(n)]
    for k in range(n):
        for l in range(n):
            s = fld.zero
            for i in range(metric.dim):
                for j in range(metric.dim):
                    if J[i][k] and J[j][l] and b[i][j]:
                        s = s + J[i][k] * b[i][j] * J[j][l]
            out[k][l] = s
    return MetricSpec.build(new_coords, out, domain or metric.domain, metric.euler_char)


def sphere_metric(coords=("u", "v")) -> MetricSpec:
    """Round unit sphere in stereographic coordinates."""
    u, v = coords
    b = f"4/(1+{u}^2+{v}^2)^2"
    return MetricSpec.build(coords, [[b, 0], [0, b]], "plane", 2)


# -- symbolic stage ------------------------------------------------------------

def metric_context(metric: MetricSpec) -> Ctx:
    return Ctx(2, coords=metric.coords)


def d1d2_beta(ctx: Ctx, metric: MetricSpec) -> Elem:
    """``d_1 d_2 β`` for ``β = b_ij ξ_1^i ξ_2^j``."""
    if ctx.n != 2:
        raise IntegrationError("d1d2_beta needs n = 2")
    if ctx.m != metric.dim or ctx.coords != metric.coords:
        raise IntegrationError("dimension mismatch between context and metric")
    beta = ctx.zero()
    for i in range(ctx.m):
        for j in range(ctx.m):
            if metric.metric[i][j]:
                beta = beta + (ctx.xi(i, 1) * ctx.xi(j, 2)).scale(metric.metric[i][j])
    return apply_deriv(d_op(ctx, 1), apply_deriv(d_op(ctx, 2), beta))


def coef_inverse(mat: Sequence[Sequence[Coef]]) -> list[list[Coef]]:
    n = len(mat)
    fld = mat[0][0].field
    a = [list(row) + [fld.one if i == j else fld.zero for j in range(n)] for i, row in enumerate(mat)]
    for col in range(n):
        piv = next((r for r in range(col, n) if a[r][col]), None)
        if piv is None:
            raise IntegrationError("singular matrix")
        a[col], a[piv] = a[piv], a[col]
        inv = fld.one / a[col][col]
        a[col] = [v * inv for v in a[col]]
        for r in range(n):
            if r != col and a[r][col]:
                f = a[r][col]
                a[r] = [x - f * y for x, y in zip(a[r], a[col])]
    return [row[n:] for row in a]


def christoffel(metric: MetricSpec) -> list[list[list[Coef]]]:
    """``Γ[m][k][l] = ½ g^{mp}(∂_k g_pl + ∂_l g_pk - ∂_p g_kl)``."""
    g = metric.metric
    n = metric.dim
    ginv = coef_inverse(g)
    dg = [[[partial(g[i][j], k) for k in range(n)] for j in range(n)] for i in range(n)]
    half = Fraction(1, 2)
    gam = [[[None] * n for _ in range(n)] for _ in range(n)]
    for k in range(n):
        for l in range(n):
            low = [(dg[p][l][k] + dg[p][k][l] - dg[k][l][p]) * half for p in range(n)]
            for m in range(n):
                s = g[0][0].field.zero
                for p in range(n):
                    if ginv[m][p] and low[p]:
                        s = s + ginv[m][p] * low[p]
                gam[m][k][l] = s
    return gam


def curvature(metric: MetricSpec) -> dict[tuple[int, int, int, int], Coef]:
    """All components ``R_ijkl`` (0-based keys), with

    ``R_ijkl = g_im (∂_k Γ^m_lj - ∂_l Γ^m_kj + Γ^m_kp Γ^p_lj - Γ^m_lp Γ^p_kj)``

    so that ``R_1212 = K (g_11 g_22 - g_12^2)`` for a surface of Gauss curvature K.
    """
    g = metric.metric
    n = metric.dim
    gam = christoffel(metric)
    zero = g[0][0].field.zero
    up = {}
    for m in range(n):
        for j in range(n):
            for k in range(n):
                for l in range(n):
                    s = partial(gam[m][l][j], k) - partial(gam[m][k][j], l)
                    for p in range(n):
                        s = s + gam[m][k][p] * gam[p][l][j] - gam[m][l][p] * gam[p][k][j]
                    up[m, j, k, l] = s
    out = {}
    for i in range(n):
        for j in range(n):
            for k in range(n):
                for l in range(n):
                    s = zero
                    for m in range(n):
                        if g[i][m] and up[m, j, k, l]:
                            s = s + g[i][m] * up[m, j, k, l]
                    out[i, j, k, l] = s
    return out


@dataclass
class PseudoGorm:
    """``e^{-yᵀBy} · weight(x) · poly``."""

    ctx: Ctx
    B: list[list[Coef]]
    poly: Elem
    weight: str | None = None

    def __post_init__(self):
        if self.weight not in (None, WEIGHT_GAUSS_X):
            raise IntegrationError(f"unknown weight tag {self.weight!r}")


def _y_ids(ctx: Ctx) -> dict[int, int]:
    """Generator id of ``y^i`` -> i (n = 2)."""
    if ctx.n != 2:
        return {}
    return {ctx.gen_id(i, (1, 2)): i for i in range(ctx.m)}


def exp_gorm(e: Elem, weight: str | None = None) -> PseudoGorm:
    """Split ``e = -yᵀBy + N`` (N nilpotent) and expand ``e^N``."""
    ctx = e.ctx
    ys = _y_ids(ctx)
    zero = ctx.field.zero
    B = [[zero] * ctx.m for _ in range(ctx.m)]
    nil = {}
    for (odds, evens), c in e.terms.items():
        if odds:
            if len(odds) & 1:
                raise IntegrationError("exponent must be even")
            nil[(odds, evens)] = c
            continue
        deg = sum(ex for _, ex in evens)
        if deg != 2 or any(k not in ys for k, _ in evens):
            raise IntegrationError("non-Gaussian even part")
        if len(evens) == 1:
            i = ys[evens[0][0]]
            B[i][i] = B[i][i] - c
        else:
            i, j = ys[evens[0][0]], ys[evens[1][0]]
            half = c * Fraction(-1, 2)
            B[i][j] = B[i][j] + half
            B[j][i] = B[j][i] + half
    N = Elem(ctx, nil)
    poly = ctx.one()
    term = ctx.one()
    k = 0
    while True:
        k += 1
        term = (term * N).scale(Fraction(1, k))
        if not term:
            break
        poly = poly + term
    if ctx.m and ys and not coef_det(B):
        raise IntegrationError("Gaussian matrix B is singular")
    return PseudoGorm(ctx, B, poly, weight)


def gorm_from_exponent(exponent: Elem, poly: Elem | None = None) -> PseudoGorm:
    """``e^{exponent} · poly``; a term ``-Σ x_i^2`` in the exponent becomes the x-weight tag."""
    ctx = exponent.ctx
    body = exponent.body()
    weight = None
    if body:
        gauss = ctx.field.zero
        for i in range(ctx.m):
            gauss = gauss - ctx.field.var(i) ** 2
        if body != gauss:
            raise IntegrationError("the x-only part of the exponent must be -(sum of squares of coordinates)")
        weight = WEIGHT_GAUSS_X
        exponent = exponent - ctx.const(body)
    g = exp_gorm(exponent, weight)
    if poly is not None:
        g.poly = g.poly * poly
    return g


def berezin_top(p):
    """Coefficient of the product of all odd generators (canonical Ctx order).

    For an Elem the y-polynomial is returned; for a PseudoGorm a PseudoGorm
    with the same Gaussian and weight.
    """
    if isinstance(p, PseudoGorm):
        return PseudoGorm(p.ctx, p.B, berezin_top(p.poly), p.weight)
    ctx = p.ctx
    top = ctx.top_ids
    out = {}
    for (odds, evens), c in p.terms.items():
        if odds == top:
            out[((), evens)] = c
    return Elem(ctx, out)


# -- Wick pairing --------------------------------------------------------------

@dataclass
class WickResult:
    """``rat · π^{m/2} det(B)^{-1/2}``."""

    rat: Coef
    B: list[list[Coef]]

    @property
    def m(self) -> int:
        return len(self.B)

    def det(self) -> Coef:
        return coef_det(self.B)

    def value_at(self, *point) -> float:
        d = float(self.det()(*point))
        if d <= 0:
            raise IntegrationError("Gaussian matrix not positive definite")
        return float(self.rat(*point)) * math.pi ** (self.m / 2) / math.sqrt(d)


def _as_ypoly(ctx: Ctx, q) -> dict[tuple[int, ...], Coef]:
    ys = _y_ids(ctx)
    out = {}
    for (odds, evens), c in q.terms.items():
        if odds or any(k not in ys for k, _ in evens):
            raise IntegrationError("wick expects a polynomial in y only")
        alpha = [0] * ctx.m
        for k, ex in evens:
            alpha[ys[k]] = ex
        out[tuple(alpha)] = c
    return out


def gaussian_moments(C: Sequence[Sequence[Coef]]):
    """Moment function ``alpha -> E[y^alpha]`` for the centered Gaussian with covariance C."""
    m = len(C)

    @lru_cache(maxsize=None)
    def moment(alpha: tuple[int, ...]):
        if sum(alpha) == 0:
            return C[0][0].field.one
        if sum(alpha) & 1:
            return C[0][0].field.zero
        i = next(k for k, a in enumerate(alpha) if a)
        rest = list(alpha)
        rest[i] -= 1
        total = C[0][0].field.zero
        for j in range(m):
            if rest[j] and C[i][j]:
                lower = list(rest)
                lower[j] -= 1
                total = total + C[i][j] * rest[j] * moment(tuple(lower))
        return total

    return moment


def wick(B: Sequence[Sequence[Coef]], q) -> WickResult:
    """Exact ``∫ e^{-yᵀBy} q(y) dy`` as a WickResult.

    ``q`` is an Elem polynomial in the y's or a mapping exponent-tuple -> Coef.
    """
    B = [list(r) for r in B]
    if not coef_det(B):
        raise IntegrationError("Gaussian matrix B is singular")
    if isinstance(q, Elem):
        q = _as_ypoly(q.ctx, q)
    binv = coef_inverse(B)
    C = [[v * Fraction(1, 2) for v in row] for row in binv]
    moment = gaussian_moments(C)
    total = B[0][0].field.zero
    for alpha, c in sorted(q.items()):
        if sum(alpha) & 1:
            continue
        total = total + c * moment(tuple(alpha))
    return WickResult(total, B)


# -- quadrature ----------------------------------------------------------------

@dataclass(frozen=True)
class QuadSettings:
    nodes: int = DEFAULT_NODES
    workers: int | None = None
    refine: bool = True

    def to_json(self):
        return {"nodes": self.nodes, "workers": self.resolved_workers(), "refine": self.refine}

    def resolved_workers(self) -> int:
        return self.workers if self.workers else (os.cpu_count() or 1)


@dataclass
class QuadResult:
    value: float
    error_estimate: float | None
    nodes: int


@lru_cache(maxsize=32)
def _gl(n: int) -> tuple[np.ndarray, np.ndarray]:
    """Gauss-Legendre nodes/weights on (0, 1)."""
    x, w = np.polynomial.legendre.leggauss(n)
    return (x + 1) / 2, w / 2


def _grid(domain: Domain, m: int, n: int):
    """Points (list of coordinate arrays) and weights including the Jacobian."""
    s, w = _gl(n)
    if domain.kind == "line":
        t = 2 * s - 1
        x = t / (1 - t * t)
        jac = 2 * (1 + t * t) / (1 - t * t) ** 2
        return [x], w * jac
    if domain.kind in ("plane", "disk"):
        if domain.kind == "plane":
            r = s / (1 - s)
            rw = w / (1 - s) ** 2
        else:
            r = domain.radius * s
            rw = w * domain.radius
        phi = 2 * np.pi * s
        pw = 2 * np.pi * w
        R, P = np.meshgrid(r, phi, indexing="ij")
        W = np.outer(rw * r, pw)
        return [(R * np.cos(P)).ravel(), (R * np.sin(P)).ravel()], W.ravel()
    if domain.kind == "rectangle":
        axes, ws = [], []
        for lo, hi in domain.bounds:
            axes.append(lo + (hi - lo) * s)
            ws.append(w * (hi - lo))
        mesh = np.meshgrid(*axes, indexing="ij")
        W = ws[0]
        for extra in ws[1:]:
            W = np.multiply.outer(W, extra)
        return [a.ravel() for a in mesh], np.asarray(W).ravel()
    raise IntegrationError(f"unsupported domain {domain.kind!r}")


def _apply_weight(weight: str | None, pts) -> np.ndarray | float:
    if weight is None:
        return 1.0
    if weight == WEIGHT_GAUSS_X:
        return np.exp(-sum(p * p for p in pts))
    raise IntegrationError(f"unknown weight tag {weight!r}")


CHUNK = 8192


def _integrate_once(f: Callable, domain: Domain, m: int, n: int, weight, workers: int) -> float:
    """Chunk boundaries do not depend on ``workers``, so the sum is reproducible."""
    pts, W = _grid(domain, m, n)
    total_n = W.shape[0]
    bounds = list(range(0, total_n, CHUNK)) + [total_n]
    nchunks = len(bounds) - 1

    def part(k):
        lo, hi = bounds[k], bounds[k + 1]
        sub = [p[lo:hi] for p in pts]
        vals = np.asarray(f(*sub), dtype=float) * _apply_weight(weight, sub)
        vals = np.broadcast_to(vals, (hi - lo,))
        if not np.all(np.isfinite(vals)):
            raise IntegrationError("non-finite integrand value")
        return float(np.dot(vals, W[lo:hi]))

    if workers <= 1 or nchunks == 1:
        partials = [part(k) for k in range(nchunks)]
    else:
        with ThreadPoolExecutor(max_workers=min(workers, nchunks)) as pool:
            partials = list(pool.map(part, range(nchunks)))
    return math.fsum(partials)


def quadrature(f, domain, settings: QuadSettings | None = None, weight: str | None = None, m: int | None = None) -> QuadResult:
    """Integrate ``f`` (a Coef or a vectorized callable) times ``weight`` over ``domain``.

    The error estimate is the difference to the same rule with half the nodes.
    """
    settings = settings or QuadSettings()
    if isinstance(f, Coef):
        m = f.field.m
        f = VectorizedCoef(f)
    if m is None:
        raise IntegrationError("dimension unknown for a callable integrand")
    domain = Domain.parse(domain, m)
    workers = settings.resolved_workers()
    value = _integrate_once(f, domain, m, settings.nodes, weight, workers)
    err = None
    if settings.refine:
        coarse = _integrate_once(f, domain, m, max(2, settings.nodes // 2), weight, workers)
        err = abs(value - coarse)
    return QuadResult(value, err, settings.nodes)


# -- the full pipeline ---------------------------------------------------------

def _check_pd(B: Sequence[Sequence[Coef]], pts):
    m = len(B)
    vals = np.empty((pts[0].shape[0], m, m))
    for i in range(m):
        for j in range(m):
            vals[:, i, j] = np.broadcast_to(VectorizedCoef(B[i][j])(*pts), pts[0].shape)
    eig = np.linalg.eigvalsh(vals)
    if not np.all(eig > 0):
        k = int(np.argmin(eig.min(axis=1)))
        where = ", ".join(f"{p[k]:.6g}" for p in pts)
        raise IntegrationError(f"Gaussian matrix not positive definite at ({where})")


@dataclass
class GormIntegral:
    value: float
    error_estimate: float | None
    symbolic_zero: bool
    top: Elem | None = None
    wick: WickResult | None = None


def integrate_gorm(g: PseudoGorm, domain, settings: QuadSettings | None = None) -> GormIntegral:
    """Berezin top coefficient, then Wick in y, then quadrature in x."""
    settings = settings or QuadSettings()
    ctx = g.ctx
    domain = Domain.parse(domain, ctx.m)
    top = berezin_top(g.poly)
    if not top:
        return GormIntegral(0.0, 0.0, True, top, None)
    if not _y_ids(ctx):
        raise IntegrationError("integration of pseudodifferential gorms needs n = 2")
    w = wick(g.B, top)
    if not w.rat:
        return GormIntegral(0.0, 0.0, True, top, w)
    rat = VectorizedCoef(w.rat)
    det = VectorizedCoef(w.det())
    m = ctx.m
    pi_factor = math.pi ** (m / 2)

    def f(*xs):
        d = det(*xs)
        if np.any(d <= 0):
            raise IntegrationError("Gaussian matrix not positive definite")
        return rat(*xs) * pi_factor / np.sqrt(d)

    pts, _ = _grid(domain, m, settings.nodes)
    _check_pd(g.B, pts)
    q = quadrature(f, domain, settings, g.weight, m)
    return GormIntegral(q.value, q.error_estimate, False, top, w)


def sphere_area(m: int) -> float:
    """Volume of the unit m-sphere S^m."""
    return 2 * math.pi ** ((m + 1) / 2) / math.gamma((m + 1) / 2)


def predicted_euler_integral(m: int, chi: int) -> float:
    """``½ (-π)^{m/2} S_m χ``."""
    if m % 2 or chi == 0:
        return 0.0
    return 0.5 * (-math.pi) ** (m // 2) * sphere_area(m) * chi


SIGN_NOTE = (
    "Berezin top monomial ordered d1(x1) d2(x1) d1(x2) d2(x2) ...; "
    "reversing the odd order flips the sign"
)


@dataclass
class EulerReport:
    value: float
    error_estimate: float | None
    symbolic_zero: bool
    predicted: float | None
    relative_error: float | None
    ratio: float | None
    settings: QuadSettings
    note: str = SIGN_NOTE
    warnings: list[str] = field(default_factory=list)

    def to_json(self):
        return {
            "value": self.value,
            "error_estimate": self.error_estimate,
            "symbolic_zero": self.symbolic_zero,
            "predicted": self.predicted,
            "relative_error": self.relative_error,
            "ratio_to_predicted": self.ratio,
            "quadrature": self.settings.to_json(),
            "sign_convention": self.note,
            "warnings": self.warnings,
        }


def euler_integral(metric: MetricSpec, settings: QuadSettings | None = None) -> EulerReport:
    """``∫ e^{d_1 d_2 β}`` over the chart, compared with ``½ (-π)^{m/2} S_m χ``."""
    settings = settings or QuadSettings()
    ctx = metric_context(metric)
    warnings = []
    if metric.dim % 2:
        warnings.append("odd dimension: the top term is expected to vanish")
    g = exp_gorm(d1d2_beta(ctx, metric))
    res = integrate_gorm(g, metric.domain, settings)
    predicted = rel = ratio = None
    if metric.euler_char is not None:
        predicted = predicted_euler_integral(metric.dim, metric.euler_char)
        if predicted:
            rel = abs(res.value - predicted) / abs(predicted)
            ratio = res.value / predicted
    return EulerReport(res.value, res.error_estimate, res.symbolic_zero, predicted, rel, ratio, settings, warnings=warnings)


def stokes_check(u, g: PseudoGorm, domain, settings: QuadSettings | None = None) -> float:
    """``∫ u(g)`` for a derivation ``u`` of the worm algebra (expected to vanish).

    ``u(e^{Q+W} p) = e^{Q+W} (u(Q + W) p + u(p))`` with ``Q = -yᵀBy`` and ``W``
    the log of the x-weight.
    """
    ctx = g.ctx
    if u.ctx != ctx:
        raise IntegrationError("operator from a different context")
    Q = ctx.zero()
    for i in range(ctx.m):
        for j in range(ctx.m):
            if g.B[i][j]:
                Q = Q - (ctx.y(i) * ctx.y(j)).scale(g.B[i][j])
    if g.weight == WEIGHT_GAUSS_X:
        for i in range(ctx.m):
            Q = Q - ctx.x(i) * ctx.x(i)
    new_poly = apply_deriv(u, Q) * g.poly + apply_deriv(u, g.poly)
    return integrate_gorm(PseudoGorm(ctx, g.B, new_poly, g.weight), domain, settings).value
