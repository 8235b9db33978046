r"""Curvature of cohomogeneity-one (multiply warped) metrics.

A :class:`WarpedProductMetric` is

.. math::

    g = f_r(x)^2\,dx^2 + \sum_i f_i(x)^2 \sigma_i^2 ,

with each :math:`\sigma_i^2` a homogeneous fiber block of constant sectional
curvature (circle, round sphere, hyperbolic surface, flat torus).  In the
parallel orthonormal frame adapted to the blocks the curvature operator is
diagonal on :math:`e_a \wedge e_b`, so everything follows from the sectional
curvatures

* radial/fiber:  :math:`-f_i''/f_i`
* within block:  :math:`(k_i - f_i'^2)/f_i^2`
* across blocks: :math:`-f_i' f_j'/(f_i f_j)`

with primes taken in arclength :math:`d\tau = f_r dx`.  Warp factors are
callables evaluated on :class:`~aheinstein.series.Series` jets, which gives
analytic derivatives of any order.

Sign conventions: :math:`\Delta` is the trace of the Hessian, hyperbolic
space has :math:`Ric = -(n-1) g`, and tensor norms are full sums over frame
components.
"""

from dataclasses import dataclass, field
from math import gamma, pi
from typing import Callable, Optional, Sequence

import numpy as np

from .errors import ConsistencyError, DomainError, InvalidMetricError
from .series import Series

__all__ = [
    "FiberBlock",
    "WarpedProductMetric",
    "CurvatureData",
    "curvature",
    "curvature_jets",
    "einstein_residual",
    "conformal_curvature",
    "weyl_energy_density",
    "weyl_tensor",
    "hyperbolic_ball",
    "hyperbolic_cusp",
    "flat_product",
    "fd_curvature",
]


def sphere_volume(dim):
    """Volume of the unit round sphere S^dim."""
    return 2 * pi ** ((dim + 1) / 2) / gamma((dim + 1) / 2)


@dataclass(frozen=True)
class FiberBlock:
    """One homogeneous factor of the fiber, with unit-model curvature."""

    kind: str
    dim: int
    curvature: float
    volume: Optional[float]
    period: Optional[float] = None
    gram: Optional[tuple] = None
    genus: Optional[int] = None

    @classmethod
    def circle(cls, period):
        if not period > 0:
            raise InvalidMetricError("circle period must be positive")
        return cls("circle", 1, 0.0, float(period), period=float(period))

    @classmethod
    def sphere(cls, dim=2):
        return cls("sphere", dim, 1.0, sphere_volume(dim))

    @classmethod
    def hyperbolic_surface(cls, genus=2):
        if genus < 2:
            raise InvalidMetricError("hyperbolic surfaces need genus >= 2")
        return cls("hyperbolic", 2, -1.0, 4 * pi * (genus - 1), genus=genus)

    @classmethod
    def hyperbolic_space(cls, dim):
        """Noncompact H^dim(-1) (universal cover); volume undefined."""
        return cls("hyperbolic", dim, -1.0, None)

    @classmethod
    def torus(cls, gram):
        g = np.atleast_2d(np.asarray(gram, dtype=float))
        if not np.allclose(g, g.T, atol=1e-14):
            raise InvalidMetricError("torus Gram matrix must be symmetric")
        if np.any(np.linalg.eigvalsh(g) <= 0):
            raise InvalidMetricError("torus Gram matrix must be positive definite")
        return cls("torus", g.shape[0], 0.0, float(np.sqrt(np.linalg.det(g))),
                   gram=tuple(map(tuple, g)))

    @classmethod
    def flat_space(cls, dim):
        """Noncompact R^dim (universal cover of a flat torus)."""
        return cls("flat", dim, 0.0, None)

    @property
    def compact(self):
        return self.volume is not None


@dataclass(frozen=True)
class WarpedProductMetric:
    """A cohomogeneity-one metric on an interval times homogeneous blocks.

    ``radial`` and ``warps`` are callables taking the coordinate jet
    (``Series.variable(x, K)``) and returning the jet of the factor.
    ``boundary_chart``, when present, returns ``(q, [W_i])`` as power series
    in a boundary variable ``u`` with ``f_r dx = -q(u) du / u`` and
    ``W_i = u^2 f_i^2``; it drives the exact expansion at infinity.
    """

    interval: tuple
    radial: Callable
    warps: Sequence[Callable]
    blocks: Sequence[FiberBlock]
    name: str = ""
    boundary_chart: Optional[Callable] = None
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if len(self.warps) != len(self.blocks):
            raise InvalidMetricError("one warp factor per fiber block is required")
        a, b = self.interval
        if not a < b:
            raise InvalidMetricError("empty coordinate interval")

    @property
    def dimension(self):
        return 1 + sum(b.dim for b in self.blocks)

    @property
    def fiber_volume(self):
        if not all(b.compact for b in self.blocks):
            return None
        return float(np.prod([b.volume for b in self.blocks]))

    def check_point(self, x):
        x = np.asarray(x, dtype=float)
        a, b = self.interval
        if np.any(~((x > a) & (x < b))):
            raise DomainError(f"{self.name or 'metric'}: point outside open interval ({a}, {b})")
        return x

    def jets(self, x, order):
        """Jets of the radial factor and the warps at ``x``."""
        x = self.check_point(x)
        s = Series.variable(x, order)
        fr = self.radial(s)
        ws = [w(s) for w in self.warps]
        if np.any(np.asarray(fr.value) <= 0) or any(np.any(np.asarray(w.value) <= 0) for w in ws):
            raise InvalidMetricError(f"{self.name or 'metric'}: non-positive metric factor")
        return fr, ws

    def volume_density(self, x):
        """Riemannian volume per unit coordinate length, fiber volume included."""
        fr, ws = self.jets(x, 0)
        dens = fr.value * np.prod([w.value ** b.dim for w, b in zip(ws, self.blocks)], axis=0)
        vol = self.fiber_volume
        return dens * (vol if vol is not None else 1.0)


@dataclass
class CurvatureData:
    """Curvature at one point in the parallel orthonormal frame.

    Frame index 0 is the radial direction; fiber directions follow in block
    order.
    """

    riemann: np.ndarray
    ricci: np.ndarray
    scalar: float
    weyl: np.ndarray
    sectional: np.ndarray
    norm_riemann: float
    norm_ricci: float
    norm_weyl: float

    @property
    def dimension(self):
        return self.ricci.shape[0]


def _frame_blocks(blocks):
    """Block label per frame index; -1 for the radial direction."""
    labels = [-1]
    for i, b in enumerate(blocks):
        labels += [i] * b.dim
    return labels


def curvature_jets(fr, ws, blocks):
    """Block-level sectional curvatures as jets (order drops by two).

    Returns ``(k_rad, k_in, k_x)``: lists indexed by block, and a dict keyed
    by block pairs ``(i, j)`` with ``i < j``.
    """

    def d(s):
        return s.deriv() / fr.truncate(s.order - 1)

    k_rad, k_in, first = [], [], []
    for w, b in zip(ws, blocks):
        w1 = d(w)
        w2 = d(w1)
        w0 = w.truncate(w2.order)
        w1 = w1.truncate(w2.order)
        first.append((w0, w1))
        k_rad.append(-w2 / w0)
        k_in.append((b.curvature - w1 * w1) / (w0 * w0) if b.dim > 1 else None)
    k_x = {}
    for i in range(len(blocks)):
        for j in range(i + 1, len(blocks)):
            (wi, wi1), (wj, wj1) = first[i], first[j]
            k_x[i, j] = -(wi1 * wj1) / (wi * wj)
    return k_rad, k_in, k_x


def _sectional_matrix(k_rad, k_in, k_x, blocks, idx=()):
    labels = _frame_blocks(blocks)
    n = len(labels)

    def val(s):
        return np.asarray(s.c[0])[idx] if idx != () else np.asarray(s.c[0])

    K = np.zeros((n, n))
    for a in range(n):
        for b in range(n):
            if a == b:
                continue
            la, lb = labels[a], labels[b]
            if la == -1 or lb == -1:
                K[a, b] = val(k_rad[lb if la == -1 else la])
            elif la == lb:
                K[a, b] = val(k_in[la])
            else:
                K[a, b] = val(k_x[min(la, lb), max(la, lb)])
    return K


def kulkarni_nomizu(h, k):
    return (np.einsum("ac,bd->abcd", h, k) + np.einsum("bd,ac->abcd", h, k)
            - np.einsum("ad,bc->abcd", h, k) - np.einsum("bc,ad->abcd", h, k))


def weyl_tensor(riemann, ricci, scalar):
    """Weyl part of a frame Riemann tensor, R_abab = K(e_a, e_b)."""
    n = ricci.shape[0]
    g = np.eye(n)
    schouten = (ricci - scalar / (2 * (n - 1)) * g) / (n - 2)
    return riemann - kulkarni_nomizu(schouten, g)


def _curvature_from_sectional(K):
    n = K.shape[0]
    R = np.zeros((n, n, n, n))
    for a in range(n):
        for b in range(n):
            if a != b:
                R[a, b, a, b] = K[a, b]
                R[a, b, b, a] = -K[a, b]
    ricci = np.einsum("abad->bd", R)
    scalar = float(np.trace(ricci))
    W = weyl_tensor(R, ricci, scalar)
    return CurvatureData(
        riemann=R, ricci=ricci, scalar=scalar, weyl=W, sectional=K,
        norm_riemann=float(np.sum(R * R)), norm_ricci=float(np.sum(ricci * ricci)),
        norm_weyl=float(np.sum(W * W)),
    )


def curvature(metric, x):
    """All curvature quantities of ``metric`` at the scalar point ``x``."""
    fr, ws = metric.jets(float(x), 2)
    k_rad, k_in, k_x = curvature_jets(fr, ws, metric.blocks)
    return _curvature_from_sectional(_sectional_matrix(k_rad, k_in, k_x, metric.blocks))


def block_invariants(k_rad, k_in, k_x, blocks):
    """Frame Ricci entries per block, scalar curvature and |W|^2, as jets.

    Uses the diagonal structure: W_abab = K_ab - P_aa - P_bb, and every
    unordered pair contributes four equal squared components to |W|^2.
    """
    dims = [b.dim for b in blocks]
    nb = len(blocks)
    n = 1 + sum(dims)
    ric_rad = sum(dims[i] * k_rad[i] for i in range(nb))
    ric_blk = []
    for i in range(nb):
        r = k_rad[i]
        if dims[i] > 1:
            r = r + (dims[i] - 1) * k_in[i]
        for j in range(nb):
            if j != i:
                r = r + dims[j] * k_x[min(i, j), max(i, j)]
        ric_blk.append(r)
    scalar = ric_rad + sum(dims[i] * ric_blk[i] for i in range(nb))
    c = scalar / (2 * (n - 1))
    p_rad = (ric_rad - c) / (n - 2)
    p_blk = [(r - c) / (n - 2) for r in ric_blk]
    w2 = 0
    for i in range(nb):
        w = k_rad[i] - p_rad - p_blk[i]
        w2 = w2 + dims[i] * (w * w)
        if dims[i] > 1:
            w = k_in[i] - 2 * p_blk[i]
            w2 = w2 + dims[i] * (dims[i] - 1) / 2 * (w * w)
        for j in range(i + 1, nb):
            w = k_x[i, j] - p_blk[i] - p_blk[j]
            w2 = w2 + dims[i] * dims[j] * (w * w)
    return ric_rad, ric_blk, scalar, 4 * w2


def einstein_residual(metric, sample_grid):
    """max over the grid of the frame sup-norm of Ric + (n - 1) g."""
    grid = np.asarray(sample_grid, dtype=float)
    if grid.size == 0:
        raise DomainError("empty sample grid")
    fr, ws = metric.jets(grid, 2)
    k = curvature_jets(fr, ws, metric.blocks)
    ric_rad, ric_blk, _, _ = block_invariants(*k, metric.blocks)
    n = metric.dimension
    vals = [np.abs(np.asarray(ric_rad.value) + (n - 1))]
    vals += [np.abs(np.asarray(r.value) + (n - 1)) for r in ric_blk]
    return float(np.max(vals))


def weyl_energy_density(metric, x):
    """|W|^2 (full component sum) at ``x``; vectorized over arrays."""
    fr, ws = metric.jets(x, 2)
    k = curvature_jets(fr, ws, metric.blocks)
    w2 = block_invariants(*k, metric.blocks)[3]
    return np.asarray(w2.value)[()]


def conformal_curvature(metric, defining_function, x, tol=1e-7):
    """Curvature of rho^2 g at ``x``, computed two ways and cross-checked.

    Route (a) applies the conformal-change formulas for sectional, Ricci and
    scalar curvature to the curvature of ``g`` and the Hessian of rho in the
    compactified metric; route (b) differentiates the compactified warp
    factors directly.  ``defining_function`` maps the coordinate jet to the
    jet of rho.  Returns ``(data, info)`` with ``data`` from route (b) and
    ``info`` holding ``|grad rho|`` and the route gap.
    """
    x = float(metric.check_point(x))
    order = 3
    s = Series.variable(x, order)
    rho = defining_function(s)
    if not rho.value > 0:
        raise DomainError("defining function must be positive at x")
    fr = metric.radial(s)
    ws = [w(s) for w in metric.warps]
    n = metric.dimension

    # route (b): direct curvature of the compactified metric
    fr_b = rho * fr
    ws_b = [rho * w for w in ws]
    kb = curvature_jets(fr_b, ws_b, metric.blocks)
    direct = _curvature_from_sectional(_sectional_matrix(*kb, metric.blocks))

    # route (a): conformal-change formulas
    kg = curvature_jets(fr, ws, metric.blocks)
    K = _sectional_matrix(*kg, metric.blocks)

    def d(q):
        return q.deriv() / fr_b.truncate(q.order - 1)

    drho = d(rho)
    ddrho = d(drho)
    grad2 = float(drho.value) ** 2
    labels = _frame_blocks(metric.blocks)
    hess = np.zeros(n)
    hess[0] = float(ddrho.value)
    for a in range(1, n):
        wb = ws_b[labels[a]]
        hess[a] = float(drho.value) * float(d(wb).value) / float(wb.value)
    r = float(rho.value)
    Kbar = (K + grad2) / r ** 2 - (hess[:, None] + hess[None, :]) / r
    np.fill_diagonal(Kbar, 0.0)
    formula = _curvature_from_sectional(Kbar)
    lap = hess.sum()
    ric_formula = -(n - 2) * np.diag(hess) / r + ((n - 1) * (grad2 - 1) / r ** 2 - lap / r) * np.eye(n)
    s_formula = -2 * (n - 1) * lap / r + n * (n - 1) * (grad2 - 1) / r ** 2

    scale = max(1.0, float(np.max(np.abs(direct.sectional))))
    gap = max(
        float(np.max(np.abs(formula.sectional - direct.sectional))),
        float(np.max(np.abs(ric_formula - direct.ricci))),
        abs(s_formula - direct.scalar),
    ) / scale
    if gap > tol:
        raise ConsistencyError(f"conformal curvature routes disagree: relative gap {gap:.3e}")
    return direct, {"grad_rho": float(np.sqrt(grad2)), "gap": gap}


def fd_curvature(metric, x, h=1e-3):
    """Sectional curvatures from 4th-order finite differences of the warps.

    Cross-check only; the jet route is primary.
    """
    x = float(x)
    offs = np.array([-2, -1, 0, 1, 2]) * h
    pts = metric.check_point(x + offs)
    fr = np.array([float(metric.radial(Series.variable(p, 0)).value) for p in pts])
    ws = [np.array([float(w(Series.variable(p, 0)).value) for p in pts]) for w in metric.warps]
    d1 = np.array([1, -8, 0, 8, -1]) / (12 * h)
    d2 = np.array([-1, 16, -30, 16, -1]) / (12 * h * h)

    def derivs(f):
        return f[2], f @ d1, f @ d2

    r0, r1, _ = derivs(fr)
    vals = []
    for f in ws:
        f0, f1, f2 = derivs(f)
        t1 = f1 / r0
        t2 = (f2 * r0 - f1 * r1) / r0 ** 3
        vals.append((Series(np.array([f0, t1, t2 / 2]))))
    # assemble via the same block formulas using arclength-derivative jets
    k_rad, k_in, k_x = [], [], {}
    for v, b in zip(vals, metric.blocks):
        f0, f1, f2 = v.c[0], v.c[1], 2 * v.c[2]
        k_rad.append(Series([-f2 / f0]))
        k_in.append(Series([(b.curvature - f1 ** 2) / f0 ** 2]) if b.dim > 1 else None)
    for i in range(len(vals)):
        for j in range(i + 1, len(vals)):
            k_x[i, j] = Series([-vals[i].c[1] * vals[j].c[1] / (vals[i].c[0] * vals[j].c[0])])
    return _sectional_matrix(k_rad, k_in, k_x, metric.blocks)


# -- basic catalog metrics -------------------------------------------------

def hyperbolic_ball(n=4):
    """H^n(-1) as d rho^2 + sinh^2 rho g_{S^{n-1}}."""

    def chart(order, exact=True):
        u = Series.exact_variable(order) if exact else Series.variable(0.0, order)
        one = u * 0 + 1
        return one, [(one - u * u) ** 2 / 4]

    return WarpedProductMetric(
        interval=(0.0, np.inf),
        radial=lambda s: s * 0 + 1.0,
        warps=[lambda s: s.sinh()],
        blocks=[FiberBlock.sphere(n - 1)],
        name=f"hyperbolic-ball-{n}",
        boundary_chart=chart,
        params={"family": "hyperbolic_ball", "n": n, "chi": 1},
    )


def hyperbolic_cusp(gram):
    """Complete cusp dr^2 + e^{2r} g_T on R x T."""
    block = FiberBlock.torus(gram)

    def chart(order, exact=True):
        one = Series.constant(1, order) if exact else Series.constant(1.0, order)
        return one, [one]

    return WarpedProductMetric(
        interval=(-np.inf, np.inf),
        radial=lambda s: s * 0 + 1.0,
        warps=[lambda s: s.exp()],
        blocks=[block],
        name="hyperbolic-cusp",
        boundary_chart=chart,
        params={"family": "cusp"},
    )


def flat_product(gram):
    """Flat product dt^2 + g_T on (0, inf) x T."""
    return WarpedProductMetric(
        interval=(0.0, np.inf),
        radial=lambda s: s * 0 + 1.0,
        warps=[lambda s: s * 0 + 1.0],
        blocks=[FiberBlock.torus(gram)],
        name="flat-product",
        params={"family": "flat"},
    )
