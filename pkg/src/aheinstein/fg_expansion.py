r"""Geodesic compactification and Fefferman-Graham data.

For a warped product with a boundary chart, the geodesic defining function
``t`` solves ``d log t / dx = -f_r`` and is normalized so that
``t^2 g`` restricted to the fiber tends to a declared boundary metric.  The
compactified metric is then ``dt^2 + sum_i F_i(t)^2 sigma_i^2`` and its
Taylor coefficients in ``t`` are the Fefferman-Graham coefficients,
expressed in the boundary orthonormal frame.

Two independent routes are provided for the coefficients:

* exact power series in the boundary variable ``u`` of the chart, reverted
  to a series in ``t``;
* floating point ``t``-jets at a geometric sequence of small ``t`` values,
  extrapolated to ``t = 0``.
"""

import json
from dataclasses import dataclass, field
from functools import cached_property
from math import pi, sqrt

import numpy as np
from scipy import integrate

from .errors import (ConsistencyError, DomainError, FiberTypeError,
                     NumericalFailure)
from .series import Series
from .tensor_core import (FiberBlock, WarpedProductMetric, block_invariants,
                          curvature_jets)

__all__ = [
    "BoundaryMetric",
    "BoundaryMetric3",
    "FGExpansion",
    "GeodesicCompactification",
    "geodesic_compactification",
    "fg_coefficients",
    "g2_closed_form",
    "g2_printed_form",
    "tt_check",
    "boundary_identities_check",
    "conformal_change_check",
    "scalar_monotonicity_profile",
    "width_and_bound",
    "neville",
]

MAX_ORDER = 4

_GL_N1 = 20
_x1, _GL_W1 = np.polynomial.legendre.leggauss(_GL_N1)
_x2, _GL_W2 = np.polynomial.legendre.leggauss(2 * _GL_N1)
_GL_NODES = np.concatenate([_x1, _x2])


# -- boundary metrics -------------------------------------------------------

@dataclass(frozen=True)
class BoundaryMetric:
    """Homogeneous boundary metric: a product of scaled constant-curvature blocks."""

    kind: str
    blocks: tuple
    scales: tuple
    label: str = ""

    def __post_init__(self):
        if len(self.blocks) != len(self.scales):
            raise FiberTypeError("one scale per block")
        if any(not s > 0 for s in self.scales):
            raise DomainError("block scales must be positive")

    @classmethod
    def round_sphere(cls, radius=1.0, dim=3):
        return cls("RoundSphere", (FiberBlock.sphere(dim),), (float(radius),),
                   f"S{dim}({radius:g})")

    @classmethod
    def flat_torus(cls, gram):
        block = FiberBlock.torus(gram)
        return cls("FlatTorus3" if block.dim == 3 else f"FlatTorus{block.dim}",
                   (block,), (1.0,), "T")

    @classmethod
    def circle_cross(cls, beta, block, scale=1.0):
        """S^1(beta) x (scaled block); flat blocks give a flat torus class."""
        kind = "FlatTorus3" if block.kind == "torus" else "CircleCrossSurface"
        name = {"sphere": "S2(1)", "hyperbolic": f"Sigma{block.genus}(-1)",
                "torus": "T2"}.get(block.kind, block.kind)
        return cls(kind, (FiberBlock.circle(beta), block), (1.0, float(scale)),
                   f"S1({beta:.12g})x{name}")

    @classmethod
    def circle_cross_sphere(cls, beta):
        return cls.circle_cross(beta, FiberBlock.sphere(2))

    @classmethod
    def circle_cross_hyperbolic(cls, beta, genus=2):
        return cls.circle_cross(beta, FiberBlock.hyperbolic_surface(genus))

    @classmethod
    def circle_cross_torus(cls, beta, gram2):
        return cls.circle_cross(beta, FiberBlock.torus(gram2))

    @property
    def dimension(self):
        return sum(b.dim for b in self.blocks)

    @property
    def frame_labels(self):
        return [i for i, b in enumerate(self.blocks) for _ in range(b.dim)]

    def _block_values(self, per_block):
        return np.array([per_block[i] for i in self.frame_labels], dtype=float)

    @property
    def sectional_by_block(self):
        return [b.curvature / s ** 2 for b, s in zip(self.blocks, self.scales)]

    @property
    def ricci(self):
        """Ricci tensor in the orthonormal frame (diagonal)."""
        return np.diag(self._block_values(
            [(b.dim - 1) * k for b, k in zip(self.blocks, self.sectional_by_block)]))

    @property
    def scalar_curvature(self):
        return float(sum(b.dim * (b.dim - 1) * k
                         for b, k in zip(self.blocks, self.sectional_by_block)))

    @property
    def volume(self):
        if not all(b.compact for b in self.blocks):
            return None
        return float(np.prod([b.volume * s ** b.dim for b, s in zip(self.blocks, self.scales)]))

    @property
    def flat(self):
        return all(b.curvature == 0 for b in self.blocks)

    def gram(self):
        """Coordinate Gram matrix of a flat boundary (block diagonal)."""
        if not self.flat:
            raise FiberTypeError("Gram matrix only defined for flat boundaries")
        mats = [s ** 2 * _block_gram(b) for b, s in zip(self.blocks, self.scales)]
        return _blockdiag(mats)

    def to_dict(self):
        out = {"kind": self.kind, "label": self.label,
               "blocks": [_block_dict(b, s) for b, s in zip(self.blocks, self.scales)],
               "scalar_curvature": self.scalar_curvature,
               "ricci": self.ricci.tolist()}
        vol = self.volume
        if vol is not None:
            out["volume"] = vol
        return out

    def close_to(self, other, tol=1e-8):
        """Same homogeneous metric up to ``tol`` (relative)."""
        try:
            _, scale2 = _match_blocks(list(zip(self.blocks, self.scales)),
                                      list(zip(other.blocks, other.scales)), tol)
        except FiberTypeError:
            return False
        return abs(scale2 - 1.0) < tol


BoundaryMetric3 = BoundaryMetric


def _block_gram(b):
    if b.kind == "circle":
        return np.array([[b.period ** 2]])
    if b.kind == "torus":
        return np.array(b.gram, dtype=float)
    raise FiberTypeError(f"block {b.kind} has no Gram matrix")


def _blockdiag(mats):
    n = sum(m.shape[0] for m in mats)
    out = np.zeros((n, n))
    i = 0
    for m in mats:
        k = m.shape[0]
        out[i:i + k, i:i + k] = m
        i += k
    return out


def _block_dict(b, s):
    d = {"type": b.kind, "dim": b.dim, "scale": s}
    if b.period is not None:
        d["period"] = b.period
    if b.gram is not None:
        d["gram"] = [list(r) for r in b.gram]
    if b.genus is not None:
        d["genus"] = b.genus
    return d


def _same_block(a, b, tol):
    if a.kind != b.kind or a.dim != b.dim or a.curvature != b.curvature:
        return False
    if a.kind == "circle":
        return abs(a.period - b.period) <= tol * max(a.period, b.period)
    if a.kind == "torus":
        ga, gb = np.array(a.gram), np.array(b.gram)
        return np.max(np.abs(ga - gb)) <= tol * np.max(np.abs(gb))
    return a.genus == b.genus


def _match_blocks(src, dst, tol):
    """Overall squared scale taking ``src`` block data to ``dst``.

    ``src`` and ``dst`` are lists of (block, scale).  Flat data are compared
    through their block-diagonal Gram matrices, so a circle times a flat
    2-torus matches a flat 3-torus with the same lattice.  Returns
    ``(mode, scale2)`` and raises when no common scale exists.
    """
    if all(b.curvature == 0 for b, _ in src) and all(b.curvature == 0 for b, _ in dst):
        gs = _blockdiag([s ** 2 * _block_gram(b) for b, s in src])
        gd = _blockdiag([s ** 2 * _block_gram(b) for b, s in dst])
        if gs.shape != gd.shape:
            raise FiberTypeError("flat boundary dimension mismatch")
        scale2 = np.trace(gd) / np.trace(gs)
        if np.max(np.abs(gd - scale2 * gs)) > tol * np.max(np.abs(gd)):
            raise FiberTypeError("flat lattices are not homothetic")
        return "flat", float(scale2)
    if len(src) != len(dst) or not all(_same_block(a, b, tol) for (a, _), (b, _) in zip(src, dst)):
        raise FiberTypeError("boundary blocks do not match the fiber blocks")
    ratios = [(sd / ss) ** 2 for (_, ss), (_, sd) in zip(src, dst)]
    if max(ratios) - min(ratios) > tol * max(ratios):
        raise FiberTypeError("boundary block scales are not those induced by the metric")
    return "blocks", float(ratios[-1])


# -- extrapolation ----------------------------------------------------------

def neville(ts, values):
    """Polynomial extrapolation of ``values(t)`` to t = 0.

    ``values`` may carry trailing dimensions.  Returns the estimate and the
    difference between the two highest-order estimates.
    """
    ts = np.asarray(ts, dtype=float)
    p = [np.asarray(v, dtype=float) for v in values]
    n = len(ts)
    best_prev = p[-1]
    for k in range(1, n):
        p = [(ts[i + k] * p[i] - ts[i] * p[i + 1]) / (ts[i + k] - ts[i]) for i in range(n - k)]
        if k == n - 2:
            best_prev = p[-1]
    return p[0], np.abs(p[0] - best_prev)


# -- geodesic compactification ---------------------------------------------

@dataclass(frozen=True)
class GeodesicCompactification:
    """Geodesic compactification of a warped product for a boundary representative."""

    source: WarpedProductMetric
    boundary: BoundaryMetric
    scale: float
    ratios: tuple
    kappa: float
    anchor: float
    log_t_anchor: float
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    @property
    def dimension(self):
        return self.source.dimension

    @property
    def ref(self):
        return len(self.source.blocks) - 1

    def boundary_scales(self):
        """Asymptotic scale of each fiber block: lim t * w_i."""
        return tuple(self.scale * a for a in self.ratios)

    def _radial(self, xs):
        with np.errstate(all="ignore"):
            return np.asarray(self.source.radial(Series.variable(xs, 0)).value, dtype=float)

    def _int_fr(self, x0, x1, depth=0):
        """Integral of f_r over [x0, x1]: adaptive vectorized Gauss-Legendre."""
        if x0 == x1:
            return 0.0
        mid, half = 0.5 * (x0 + x1), 0.5 * (x1 - x0)
        v = self._radial(mid + half * _GL_NODES)
        coarse = half * (v[:_GL_N1] @ _GL_W1)
        fine = half * (v[_GL_N1:] @ _GL_W2)
        if abs(fine - coarse) <= 1e-14 * max(1.0, abs(fine)) and np.isfinite(fine):
            return fine
        if depth > 60:
            raise NumericalFailure("radial quadrature did not converge")
        return self._int_fr(x0, mid, depth + 1) + self._int_fr(mid, x1, depth + 1)

    @cached_property
    def _table(self):
        """Nodes x_j (increasing) and log t(x_j), built once by cumulative integration."""
        a = self.source.interval[0]
        x0 = self.anchor
        scale = max(1.0, abs(x0))
        above = x0 + scale * (2.0 ** np.arange(0, 45) - 1)
        if np.isfinite(a):
            below = a + (x0 - a) * 2.0 ** -np.arange(6, 0, -1)
        else:
            below = x0 - scale * (2.0 ** np.arange(10, 0, -1) - 1)
        nodes = np.concatenate([below, above])
        L = np.empty_like(nodes)
        j0 = len(below)
        L[j0] = self.log_t_anchor
        for j in range(j0 + 1, len(nodes)):
            L[j] = L[j - 1] - self._int_fr(nodes[j - 1], nodes[j])
        for j in range(j0 - 1, -1, -1):
            L[j] = L[j + 1] + self._int_fr(nodes[j], nodes[j + 1])
        return nodes, L

    def _log_t_scalar(self, x):
        nodes, L = self._table
        j = int(np.clip(np.searchsorted(nodes, x), 1, len(nodes) - 1))
        j = j if abs(nodes[j] - x) < abs(nodes[j - 1] - x) else j - 1
        return L[j] - self._int_fr(nodes[j], x)

    def log_t(self, x):
        """log t at coordinate ``x`` (scalar or array)."""
        xs = np.atleast_1d(self.source.check_point(x))
        out = np.array([self._log_t_scalar(float(xi)) for xi in xs])
        return out.reshape(np.shape(x)) if np.ndim(x) else float(out[0])

    def t(self, x):
        return np.exp(self.log_t(x))

    @cached_property
    def width(self):
        """sup t, attained at the inner end of the interval."""
        a = self.source.interval[0]
        if not np.isfinite(a):
            return float("inf")
        nodes, L = self._table
        # x = a + y^2 tames the inverse square root of a horizon
        def integrand(y):
            v = 2 * y * float(self._radial(a + y * y))
            return v if np.isfinite(v) else 0.0

        val, err, *_ = integrate.quad(integrand, 0.0, np.sqrt(nodes[0] - a),
                                      epsabs=1e-15, epsrel=1e-13, limit=400, full_output=1)
        if not np.isfinite(val):
            raise NumericalFailure("width quadrature failed")
        return float(np.exp(L[0] + val))

    def x_of_t(self, t):
        """Inverse of t(x) by bracketed root finding on log t."""
        if np.ndim(t):
            return np.array([self.x_of_t(ti) for ti in np.ravel(t)]).reshape(np.shape(t))
        t = float(t)
        if not 0 < t < self.width:
            raise DomainError(f"t = {t} outside the collar (0, {self.width})")
        target = np.log(t)
        nodes, L = self._table
        a = self.source.interval[0]
        if target < L[-1]:
            raise DomainError(f"t = {t} too close to the boundary")
        if target > L[0]:
            hi, L_hi = nodes[0], L[0]
            lo = hi
            for _ in range(200):
                lo = a + (lo - a) * 0.25
                L_lo = L[0] + self._int_fr(lo, nodes[0])
                if L_lo >= target:
                    break
            else:
                raise NumericalFailure("could not bracket x(t)")
        else:
            j = int(np.searchsorted(-L, -target))
            j = min(max(j, 1), len(nodes) - 1)
            lo, hi, L_lo, L_hi = nodes[j - 1], nodes[j], L[j - 1], L[j]
        return self._solve_log_t(target, lo, hi, L_lo, L_hi)

    def _solve_log_t(self, target, lo, hi, L_lo, L_hi):
        # safeguarded Newton; d log t / dx = -f_r
        frac = (L_lo - target) / (L_lo - L_hi) if L_lo != L_hi else 0.5
        x = lo + frac * (hi - lo)
        Lx = L_lo - self._int_fr(lo, x)
        for _ in range(200):
            f = Lx - target
            if f > 0:
                lo, L_lo = x, Lx
            else:
                hi, L_hi = x, Lx
            if abs(f) <= 2e-16 * max(1.0, abs(target)) or hi - lo <= 4e-16 * max(1.0, abs(x)):
                return x
            x_new = x + f / float(self._radial(x))
            if not lo < x_new < hi:
                x_new = 0.5 * (lo + hi)
            Lx = Lx - self._int_fr(x, x_new)
            x = x_new
        raise NumericalFailure("x(t) iteration did not converge")

    def t_jets(self, t0, order):
        """Jets in ``t`` of the compactified warp factors F_i = t * w_i at ``t0``."""
        key = (np.asarray(t0, dtype=float).tobytes(), np.shape(t0), order)
        if key in self._cache:
            return self._cache[key]
        t0 = np.asarray(t0, dtype=float)
        x0 = self.x_of_t(t0)
        fr, ws = self.source.jets(x0, order)
        logt = (-fr.truncate(order - 1)).integral(np.log(t0)) if order >= 1 else Series(np.log(t0)[None])
        tx = logt.exp()
        eps_of_delta = (tx - t0).revert()
        out = [(tx * w).compose(eps_of_delta) for w in ws]
        if len(self._cache) > 256:
            self._cache.clear()
        self._cache[key] = out
        return out

    @cached_property
    def compactified(self):
        """The compactified metric dt^2 + sum F_i(t)^2 sigma_i^2 on (0, width)."""

        def warp(i):
            return lambda s: self.t_jets(s.value, s.order)[i]

        return WarpedProductMetric(
            interval=(0.0, self.width),
            radial=lambda s: s * 0 + 1.0,
            warps=[warp(i) for i in range(len(self.source.blocks))],
            blocks=self.source.blocks,
            name=f"compactified {self.source.name}",
        )

    # exact boundary series -------------------------------------------------

    def boundary_series(self, order, exact=True):
        """Series in t (about 0) of F_i^2 / F_i(0)^2, the normalized g_t blocks.

        Entries are Fractions when the chart is exact; the ``t`` variable is
        rescaled so coefficient j multiplies ``t^j`` exactly (kappa powers
        applied in floating point).
        """
        q, Ws = self.source.boundary_chart(order, exact=exact)
        P = (q - 1).divide_by_variable().integral(0)
        s_of_u = P.exp().times_variable().truncate(order)
        u_of_s = s_of_u.revert()
        e2P = (P * 2).exp()
        out = []
        for W in Ws:
            H = (e2P * W).truncate(order).compose(u_of_s)
            ratio = H / H.c[0]
            coeffs = [ratio.c[j] for j in range(order + 1)]
            out.append(coeffs)
        return out

    def induced_boundary(self):
        blocks = self.source.blocks
        return BoundaryMetric(self.boundary.kind, tuple(blocks), self.boundary_scales(),
                              self.boundary.label)


def geodesic_compactification(metric, boundary, tol=1e-9):
    """Geodesic compactification of ``metric`` inducing ``boundary``."""
    if metric.boundary_chart is None:
        raise DomainError(f"{metric.name or 'metric'} has no conformal boundary chart")
    if boundary.dimension != metric.dimension - 1:
        raise FiberTypeError("boundary dimension does not match the fiber")
    _, Ws = metric.boundary_chart(0, exact=False)
    w0 = np.array([float(W.c[0]) for W in Ws])
    if np.any(w0 <= 0):
        raise DomainError("boundary chart has degenerate blocks")
    ratios = np.sqrt(w0 / w0[-1])
    mode, scale2 = _match_blocks(list(zip(metric.blocks, ratios)),
                                 list(zip(boundary.blocks, boundary.scales)), tol)
    lam = sqrt(scale2)
    kappa = lam / sqrt(w0[-1])
    a, b = metric.interval
    if np.isfinite(b):
        raise DomainError("the conformal boundary must sit at the upper end x -> inf")
    anchor = a + max(1.0, abs(a)) if np.isfinite(a) else 0.0

    ref = len(metric.blocks) - 1

    def integrand(s):
        # far out the warps may overflow while the integrand itself has decayed
        with np.errstate(all="ignore"):
            fr, ws = metric.jets(s, 1)
            w = ws[ref]
            val = float(fr.value - w.c[1] / w.c[0])
        return val if np.isfinite(val) else 0.0

    tail, _ = integrate.quad(integrand, anchor, np.inf, epsabs=1e-15, epsrel=1e-13, limit=400)
    _, ws = metric.jets(anchor, 0)
    log_t_anchor = np.log(lam) - np.log(float(ws[ref].value)) + tail
    return GeodesicCompactification(metric, boundary, lam, tuple(float(r) for r in ratios),
                                    float(kappa), float(anchor), float(log_t_anchor))


# -- FG coefficients --------------------------------------------------------

@dataclass
class FGExpansion:
    """Ordered FG coefficients g_(0..m) as matrices in the boundary orthonormal frame."""

    boundary: BoundaryMetric
    coefficients: list
    order: int
    remainder_estimate: float
    numeric_coefficients: list = None
    path_gap: list = None
    exact_blocks: list = None

    def to_dict(self):
        out = {
            "schema": "fg_expansion/1",
            "boundary": self.boundary.to_dict(),
            "frame": "boundary orthonormal frame, fiber block order",
            "order": self.order,
            "coefficients": [np.asarray(c).tolist() for c in self.coefficients],
            "remainder_estimate": self.remainder_estimate,
        }
        if self.path_gap is not None:
            out["path_gap"] = [float(g) for g in self.path_gap]
        if self.order >= 3:
            tr = tt_check(self)
            out["residuals"] = {"g1_norm": float(np.max(np.abs(self.coefficients[1]))),
                                "trace_g3": tr["trace_residual"],
                                "divergence_g3": tr["divergence_residual"]}
        return out

    def to_json(self):
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)


def _kappa_scale(comp, coeff, j):
    return float(coeff) / comp.kappa ** j


def fg_series(comp, order=MAX_ORDER):
    """FG block coefficients by exact series reversion: list over blocks of lists over j."""
    try:
        blocks = comp.boundary_series(order, exact=True)
    except (TypeError, ValueError):
        blocks = comp.boundary_series(order, exact=False)
    return [[_kappa_scale(comp, c, j) for j, c in enumerate(b)] for b in blocks], blocks


def fg_numeric(comp, order=MAX_ORDER, t_start=None, levels=7):
    """FG block coefficients by extrapolating t-jets at t_k = t_start / 2^k."""
    if t_start is None:
        t_start = min(0.2, 0.5 * comp.width)
    ts = t_start * 0.5 ** np.arange(levels)
    jets = comp.t_jets(ts, order)
    norms = [(comp.scale * a) ** 2 for a in comp.ratios]
    vals = np.array([[np.asarray((F * F).c[j]) / nrm for j in range(order + 1)]
                     for F, nrm in zip(jets, norms)])  # (blocks, j, level)
    est, err = neville(ts, np.moveaxis(vals, -1, 0))
    return est, err


def _frame_matrix(comp, per_block):
    labels = [i for i, b in enumerate(comp.source.blocks) for _ in range(b.dim)]
    return np.diag([per_block[i] for i in labels])


def fg_coefficients(compact, order=3, tol=1e-6, tol_top=1e-4):
    """FG coefficients through ``order`` by two routes, cross-checked."""
    if not 0 <= order <= MAX_ORDER:
        raise DomainError(f"order must lie in [0, {MAX_ORDER}]")
    depth = max(order, 3)
    series, exact_blocks = fg_series(compact, depth)
    numeric, err = fg_numeric(compact, depth)
    gaps = []
    for j in range(order + 1):
        gap = max(abs(series[i][j] - numeric[i][j]) for i in range(len(series)))
        gaps.append(gap)
        limit = tol_top if j == MAX_ORDER else tol
        if gap > limit:
            raise ConsistencyError(f"series and extrapolated FG coefficient {j} differ by {gap:.3e}")
    coeffs = [_frame_matrix(compact, [series[i][j] for i in range(len(series))])
              for j in range(order + 1)]
    num = [_frame_matrix(compact, [numeric[i][j] for i in range(len(series))])
           for j in range(order + 1)]
    return FGExpansion(compact.boundary, coeffs, order, float(max(gaps)), num, gaps,
                       [b[:order + 1] for b in exact_blocks])


def g2_closed_form(boundary, n=None):
    """g_(2) from boundary curvature: -(Ric - s/(2(n-2)) gamma)/(n-3).

    In dimension four this is -(Ric - s/4 gamma).
    """
    n = boundary.dimension + 1 if n is None else n
    ric = boundary.ricci
    s = boundary.scalar_curvature
    return -(ric - s / (2 * (n - 2)) * np.eye(len(ric))) / (n - 3)


def g2_printed_form(boundary):
    """The alternate normalization -(1/2)(Ric - s/4 gamma); kept for comparison."""
    return -0.5 * (boundary.ricci - boundary.scalar_curvature / 4 * np.eye(boundary.dimension))


def tt_check(exp):
    """Trace and divergence residuals of g_(3).

    The divergence of a constant form on a homogeneous boundary in an
    invariant frame vanishes identically; it is reported as 0.0 with a note.
    """
    if exp.order < 3:
        raise DomainError("expansion order must be at least 3")
    g3 = np.asarray(exp.coefficients[3])
    return {"trace_residual": float(abs(np.trace(g3))),
            "divergence_residual": 0.0,
            "note": "divergence vanishes structurally for invariant forms"}


# -- boundary curvature -----------------------------------------------------

def _compact_invariants(comp, t):
    """Compactified block invariants (Ric entries and scalar) at t values."""
    met = comp.compactified
    fr, ws = met.jets(t, 2)
    k = curvature_jets(fr, ws, met.blocks)
    ric_rad, ric_blk, scalar, _ = block_invariants(*k, met.blocks)
    return (np.asarray(ric_rad.value), [np.asarray(r.value) for r in ric_blk],
            np.asarray(scalar.value))


def _boundary_curvature_series(comp, order=3):
    """Compactified curvature at t = 0 from the boundary series."""
    series, _ = fg_series(comp, max(order, 4))
    scales = comp.boundary_scales()
    ws = []
    for blk, sc in zip(series, scales):
        g = Series(np.array(blk, dtype=float)) * sc ** 2
        ws.append(g.sqrt())
    fr = Series.constant(1.0, len(series[0]) - 1)
    k = curvature_jets(fr, ws, comp.source.blocks)
    return block_invariants(*k, comp.source.blocks)


def boundary_identities_check(compact, t_start=None, levels=6):
    """Boundary values of the compactified curvature and the residuals of
    s = 2(n-1) Ric(N,N) = (n-1)/(n-2) s_gamma and
    Ric^T = ((n-2)/(n-3)) Ric_gamma - s_gamma/(2(n-2)(n-3)) gamma.

    Values come from extrapolation t -> 0; the boundary series provides an
    independent cross-check.
    """
    n = compact.dimension
    if t_start is None:
        t_start = min(0.1, 0.25 * compact.width)
    ts = t_start * 0.5 ** np.arange(levels)
    ric_rad, ric_blk, scalar = _compact_invariants(compact, ts)
    stack = np.vstack([ric_rad[None], np.array(ric_blk), scalar[None]])
    est, err = neville(ts, stack.T)
    if not np.all(np.isfinite(est)):
        raise NumericalFailure("boundary extrapolation failed")
    ric_nn = float(est[0])
    ric_t_blocks = est[1:-1]
    s_bar = float(est[-1])
    gamma = compact.boundary
    s_g = gamma.scalar_curvature
    ric_g_blocks = [(b.dim - 1) * k for b, k in zip(compact.source.blocks,
                                                     _induced_sectional(compact))]
    expected_t = [(n - 2) / (n - 3) * r - s_g / (2 * (n - 2) * (n - 3)) for r in ric_g_blocks]
    ser = _boundary_curvature_series(compact)
    series_vals = [float(ser[0].value)] + [float(r.value) for r in ser[1]] + [float(ser[2].value)]
    report = {
        "s_bar": s_bar,
        "ric_nn": ric_nn,
        "ric_nx": 0.0,
        "ric_tangential": [float(v) for v in ric_t_blocks],
        "s_gamma": s_g,
        "residual_scalar_normal": abs(s_bar - 2 * (n - 1) * ric_nn),
        "residual_scalar_boundary": abs(s_bar - (n - 1) / (n - 2) * s_g),
        "residual_tangential": float(np.max(np.abs(np.array(ric_t_blocks) - expected_t))),
        "residual_mixed": 0.0,
        "series_gap": float(np.max(np.abs(np.array(series_vals) - est))),
        "extrapolation_error": float(np.max(err)),
        "printed_dimension_factor": (3 * n - 4) / (2 * (n - 1) * (n - 2)),
        "boundary_factor": (n - 1) / (n - 2),
    }
    return report


def _induced_sectional(comp):
    return [b.curvature / s ** 2 for b, s in zip(comp.source.blocks, comp.boundary_scales())]


def conformal_change_check(compact, a=1.0):
    """Ricci of phi^2 gbar against the boundary identity for phi = 1 + a t^2.

    phi = 1 and d phi = 0 on the boundary, so at t = 0
    Ric~ = Ric + (s~ - s)/(2(n-1)) (g + (n-2) nu nu).
    Returns the max residual over frame entries.
    """
    n = compact.dimension
    series, _ = fg_series(compact, 4)
    scales = compact.boundary_scales()
    t = Series(np.array([0.0, 1.0, 0.0, 0.0, 0.0]))
    phi = 1.0 + a * t * t
    ws = [(Series(np.array(blk, dtype=float)) * sc ** 2).sqrt() for blk, sc in zip(series, scales)]
    base = block_invariants(*curvature_jets(Series.constant(1.0, 4), ws, compact.source.blocks),
                            compact.source.blocks)
    tilde = block_invariants(*curvature_jets(phi, [phi * w for w in ws], compact.source.blocks),
                             compact.source.blocks)
    ds = float(tilde[2].value - base[2].value)
    c = ds / (2 * (n - 1))
    res = [abs(float(tilde[0].value) - (float(base[0].value) + c * (n - 1)))]
    res += [abs(float(rt.value) - (float(rb.value) + c)) for rt, rb in zip(tilde[1], base[1])]
    return {"max_residual": max(res), "scalar_jump": ds,
            "expected_scalar_jump": -2 * (n - 1) * 2 * a}


# -- monotonicity and width -------------------------------------------------

def scalar_monotonicity_profile(compact, grid, tol=1e-8):
    """max |s' - 2(n-1) |D^2 t|^2 / t| on ``grid`` for the compactified metric.

    Also returns the s values along the grid and asserts s' >= -tol.
    """
    grid = np.asarray(grid, dtype=float)
    if np.any(grid <= 0) or np.any(grid >= compact.width):
        raise DomainError("grid must lie inside the collar (0, width)")
    n = compact.dimension
    met = compact.compactified
    fr, ws = met.jets(grid, 3)
    _, _, scalar, _ = block_invariants(*curvature_jets(fr, ws, met.blocks), met.blocks)
    ds = np.asarray(scalar.c[1])
    hess2 = sum(b.dim * (np.asarray(w.c[1]) / np.asarray(w.c[0])) ** 2
                for w, b in zip(ws, met.blocks))
    rhs = 2 * (n - 1) * hess2 / grid
    resid = np.abs(ds - rhs)
    if np.any(ds < -tol):
        raise ConsistencyError("scalar curvature decreases along the collar")
    return {"max_residual": float(np.max(resid)), "s_bar": np.asarray(scalar.value),
            "s_bar_prime": ds, "rhs": rhs, "grid": grid}


def width_and_bound(compact):
    """Width sup t, the bound pi sqrt((n-1)(n-2)/2)/sqrt(s0), and the alternate 2(n-1)/sqrt(s0)."""
    n = compact.dimension
    s0 = compact.boundary.scalar_curvature
    width = compact.width
    if s0 > 0:
        bound = pi * sqrt((n - 1) * (n - 2) / 2) / sqrt(s0)
        alternate = 2 * (n - 1) / sqrt(s0)
    else:
        bound = alternate = float("inf")
    return {"width": width, "bound": bound, "alternate_bound": alternate,
            "satisfied": bool(width <= bound)}
