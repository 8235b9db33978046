r"""Dehn fillings of a flat torus by hyperbolic tubes and toral black holes.

A primitive class ``sigma`` on a flat torus ``(T^2, g_o)`` is made to bound
a disc.  In dimension three the filling is a quotient of the tube

.. math::

    dr^2 + \sinh^2 r\, d\theta^2 + \cosh^2 r\, ds^2

about a geodesic of H^3; in dimension four it is a quotient of the toral
black hole with ``m = 1`` (the ``(theta, s_1)`` plane plays the role of the
tube, ``s_2`` is an extra circle of period ``beta_2``).

The quotient is described by the generator of the deck group acting on the
cover: a rotation ``alpha`` of the meridian angle together with a
translation ``tau`` along the core.  Matching the meridian to ``sigma`` fixes
the radius ``R`` at which the meridian has length ``L(sigma)``.  The
generator is chosen so that the conformal infinity is the prescribed torus.
"""

from dataclasses import dataclass
from functools import lru_cache
from math import asinh, cosh, gcd, pi, sinh, sqrt

import numpy as np
from scipy import optimize

from .black_holes import conformal_infinity, make_black_hole
from .errors import DomainError, NumericalFailure
from .fg_expansion import BoundaryMetric, fg_coefficients, geodesic_compactification
from .series import Series
from .tensor_core import FiberBlock, WarpedProductMetric

__all__ = [
    "FlatTorus2",
    "DehnFilling",
    "primitive_geodesics",
    "lattice_automorphisms",
    "fill_3d",
    "fill_4d",
    "tube_metric",
    "cusp_limit_distance",
    "isometry_key",
    "filling_invariant",
    "filling_fg_check",
    "TORAL_MASS",
]

TORAL_MASS = 1.0
R_PLUS = 2 ** (1 / 3)
BETA = 4 * pi / (3 * R_PLUS)
CUSP_CORE = 1e-2


@dataclass(frozen=True)
class FlatTorus2:
    """Flat torus R^2 / Z^2 with the metric given by a Gram matrix."""

    gram: tuple

    def __post_init__(self):
        G = np.asarray(self.gram, dtype=float)
        if G.shape != (2, 2) or not np.all(np.isfinite(G)):
            raise DomainError("gram must be a finite 2x2 matrix")
        if abs(G[0, 1] - G[1, 0]) > 1e-12 * np.max(np.abs(G)):
            raise DomainError("gram must be symmetric")
        if G[0, 0] <= 0 or np.linalg.det(G) <= 0:
            raise DomainError("gram must be positive definite")
        object.__setattr__(self, "gram", tuple(map(tuple, G.tolist())))

    @classmethod
    def square(cls, side=1.0):
        return cls(((side ** 2, 0.0), (0.0, side ** 2)))

    @property
    def matrix(self):
        return np.array(self.gram)

    @property
    def area(self):
        return float(sqrt(np.linalg.det(self.matrix)))

    def length(self, v):
        v = np.asarray(v, dtype=float)
        return float(sqrt(v @ self.matrix @ v))

    def to_dict(self):
        return {"gram": [list(r) for r in self.gram], "area": self.area}


@dataclass(frozen=True)
class DehnFilling:
    """A filling of ``base_torus`` in which ``sigma`` bounds a disc.

    ``rotation`` and ``translation`` describe the deck generator on the
    cover (meridian angle, core parameter).  ``core_length`` follows the
    tube-radius convention; ``core_length_prescribed`` is the length of the
    core in the metric whose conformal infinity is exactly the base torus.
    """

    dimension: int
    base_torus: FlatTorus2
    sigma: tuple
    complement: tuple
    L: float
    R: float
    core_length: float
    core_length_prescribed: float
    rotation: float
    translation: float
    boundary_class: object
    matching_residual: float
    boundary_gap: float
    beta2: float = None
    mass: float = None

    @property
    def cusp_flag(self):
        return bool(self.core_length < CUSP_CORE)

    @property
    def boundary_scale(self):
        """Homothety from the coordinate boundary of the cover to the representative."""
        period = 2 * pi if self.dimension == 3 else BETA
        return self.L / period

    def to_dict(self):
        bc = self.boundary_class
        out = {"dimension": self.dimension, "sigma": list(self.sigma), "L": self.L,
               "R": self.R, "core_length": self.core_length,
               "core_length_prescribed": self.core_length_prescribed,
               "rotation": self.rotation, "translation": self.translation,
               "boundary_class": {"kind": "FlatTorus2" if self.dimension == 3 else "FlatTorus3",
                                  "gram": np.asarray(bc.gram if self.dimension == 3
                                                     else bc.gram()).tolist()},
               "matching_residual": self.matching_residual,
               "boundary_gap": self.boundary_gap, "cusp_flag": self.cusp_flag}
        if self.dimension == 4:
            out["beta2"] = self.beta2
            out["mass"] = self.mass
        return out


# -- lattice plumbing --------------------------------------------------------

def _lattice_vectors(G, L_max):
    """All nonzero integer vectors of G-length at most L_max."""
    Ginv = np.linalg.inv(G)
    pmax = int(np.floor(L_max * sqrt(Ginv[0, 0]) + 1e-9))
    qmax = int(np.floor(L_max * sqrt(Ginv[1, 1]) + 1e-9))
    out = []
    for p in range(-pmax, pmax + 1):
        for q in range(-qmax, qmax + 1):
            if p == 0 and q == 0:
                continue
            v = np.array([p, q], dtype=float)
            ell = sqrt(v @ G @ v)
            if ell <= L_max * (1 + 1e-12):
                out.append(((p, q), ell))
    return out


def _canonical(v):
    p, q = v
    return (p, q) if p > 0 or (p == 0 and q > 0) else (-p, -q)


def _check_primitive(sigma):
    try:
        p, q = (int(sigma[0]), int(sigma[1]))
    except (TypeError, ValueError, IndexError) as exc:
        raise DomainError("sigma must be a pair of integers") from exc
    if (p, q) != tuple(sigma) or gcd(p, q) != 1:
        raise DomainError(f"sigma = {tuple(sigma)} is not a primitive class")
    return p, q


def primitive_geodesics(torus, L_max):
    """Primitive classes up to sign with length at most ``L_max``.

    Sorted by length, then lexicographically; each class is reported with
    ``p > 0`` or ``(0, 1)``.
    """
    if not L_max > 0:
        return []
    found = {}
    for v, ell in _lattice_vectors(torus.matrix, L_max):
        if gcd(*v) == 1:
            found[_canonical(v)] = ell
    return sorted(found.items(), key=lambda kv: (round(kv[1], 11), kv[0]))


def lattice_automorphisms(torus, tol=1e-10):
    """Integer matrices A (columns = images of the basis) preserving the Gram matrix."""
    G = torus.matrix
    scale = np.max(np.abs(G))
    cand = _lattice_vectors(G, sqrt(max(G[0, 0], G[1, 1])))
    first = [np.array(v) for v, ell in cand if abs(ell ** 2 - G[0, 0]) < tol * scale]
    second = [np.array(v) for v, ell in cand if abs(ell ** 2 - G[1, 1]) < tol * scale]
    out = []
    for a in first:
        for b in second:
            A = np.column_stack([a, b])
            if abs(round(np.linalg.det(A))) == 1 and np.allclose(A.T @ G @ A, G,
                                                                 atol=tol * scale):
                out.append(A.astype(int))
    return out


def isometry_key(torus, sigma, beta2=None):
    """Canonical representative of the orbit of ``sigma`` under lattice isometries."""
    p, q = _check_primitive(sigma)
    orbit = [_canonical(tuple(int(x) for x in A @ np.array([p, q])))
             for A in lattice_automorphisms(torus)]
    key = (min(orbit),)
    if beta2 is not None:
        key += (round(float(beta2), 12),)
    return key


def _complement(torus, sigma):
    """Second basis vector w with det(sigma, w) = 1 and |<w, sigma>| <= L^2 / 2."""
    p, q = sigma
    x, y = _egcd(abs(p), abs(q))
    v, u = (x if p >= 0 else -x), (-y if q >= 0 else y)  # p*v - q*u = 1
    G = torus.matrix
    s = np.array([p, q], dtype=float)
    w = np.array([u, v], dtype=float)
    k = round(float(w @ G @ s) / float(s @ G @ s))
    return int(u - k * p), int(v - k * q)


def _egcd(a, b):
    """x, y with a x + b y = gcd(a, b) for a, b >= 0."""
    if b == 0:
        return 1, 0
    x, y = _egcd(b, a % b)
    return y, x - (a // b) * y


def _deck_generator(torus, sigma, period):
    """Rotation and translation of the deck generator in the prescribed construction."""
    w = _complement(torus, sigma)
    G = torus.matrix
    s = np.array(sigma, dtype=float)
    L = sqrt(s @ G @ s)
    along = float(np.array(w, dtype=float) @ G @ s) / L
    height = torus.area / L
    mu = L / period
    return w, L, along / mu, height / mu, height


def _lattice_gram(rows, metric):
    """Gram matrix in the input basis from lattice generator images in the cover."""
    M = np.array(rows, dtype=float)
    return M @ metric @ M.T


def _to_input_basis(gram_sw, sigma, w):
    B = np.array([sigma, w], dtype=float)
    Binv = np.linalg.inv(B)
    out = Binv @ gram_sw @ Binv.T
    return 0.5 * (out + out.T)


# -- three dimensions -------------------------------------------------------

def tube_metric():
    """The tube about a geodesic in H^3, with its conformal boundary chart."""

    def chart(order, exact=True):
        u = Series.exact_variable(order) if exact else Series.variable(0.0, order)
        one = u * 0 + 1
        half = one / 2 if exact else one * 0.5
        return one, [((one - u * u) * half) ** 2, ((one + u * u) * half) ** 2]

    return WarpedProductMetric(
        interval=(0.0, np.inf),
        radial=lambda s: s * 0 + 1.0,
        warps=[lambda s: s.sinh(), lambda s: s.cosh()],
        blocks=[FiberBlock.circle(2 * pi), FiberBlock.flat_space(1)],
        name="tube in H3",
        boundary_chart=chart,
        params={"family": "tube"},
    )


def _boundary_ratios(metric):
    _, Ws = metric.boundary_chart(0, exact=False)
    w0 = np.array([float(W.c[0]) for W in Ws])
    return np.sqrt(w0 / w0[0])


def fill_3d(torus, sigma):
    """Hyperbolic solid torus whose conformal infinity is ``torus`` with ``sigma`` filled."""
    sigma = _check_primitive(sigma)
    w, L, alpha, tau, height = _deck_generator(torus, sigma, 2 * pi)
    if not L > 0:
        raise DomainError("sigma must have positive length")
    R = asinh(L / (2 * pi))
    # boundary of the cover, read off the tube chart, in (theta, s)
    ratios = _boundary_ratios(tube_metric())
    cover = (L / (2 * pi)) ** 2 * np.diag(ratios ** 2)
    gram_sw = _lattice_gram([[2 * pi, 0.0], [alpha, tau]], cover)
    induced = _to_input_basis(gram_sw, sigma, w)
    gap = float(np.max(np.abs(induced - torus.matrix)) / np.max(np.abs(torus.matrix)))
    return DehnFilling(
        dimension=3, base_torus=torus, sigma=sigma, complement=w, L=L, R=R,
        core_length=height / cosh(R), core_length_prescribed=tau,
        rotation=alpha, translation=tau, boundary_class=FlatTorus2(induced),
        matching_residual=abs(2 * pi * sinh(R) - L), boundary_gap=gap)


# -- four dimensions --------------------------------------------------------

@lru_cache(maxsize=1)
def _toral_compactification():
    bh = make_black_hole(4, 0, TORAL_MASS)
    return geodesic_compactification(bh.metric, conformal_infinity(bh))


def _horizon_match(L):
    """R > r_+ with V(R) beta^2 = L^2 for V = r^2 - 2/r."""
    v = (L / BETA) ** 2

    def f(r):
        return r ** 3 - v * r - 2

    hi = max(2.0, 2 * sqrt(v) + 2)
    if not (f(R_PLUS) < 0 < f(hi)):
        raise NumericalFailure("no horizon-matching radius bracketed")
    R = optimize.brentq(f, R_PLUS, hi, xtol=1e-15, rtol=1e-15, maxiter=200)
    for _ in range(2):
        d = 3 * R * R - v
        if d > 0:
            R -= f(R) / d
    return R


def fill_4d(torus, sigma, beta2):
    """Toral black-hole filling with conformal infinity ``torus`` x S^1(``beta2``)."""
    sigma = _check_primitive(sigma)
    if not beta2 > 0:
        raise DomainError("beta2 must be positive")
    w, L, alpha, tau, height = _deck_generator(torus, sigma, BETA)
    R = _horizon_match(L)
    lam = L / BETA
    comp = _toral_compactification()
    s_theta, s_flat = comp.boundary_scales()
    cover = lam ** 2 * np.diag([s_theta ** 2, s_flat ** 2, s_flat ** 2])
    rows = [[BETA, 0.0, 0.0], [alpha, tau, 0.0], [0.0, 0.0, beta2 / lam]]
    gram_sw = _lattice_gram(rows, cover)
    B = np.array([[sigma[0], sigma[1], 0], [w[0], w[1], 0], [0, 0, 1]], dtype=float)
    Binv = np.linalg.inv(B)
    induced = Binv @ gram_sw @ Binv.T
    induced = 0.5 * (induced + induced.T)
    want = np.zeros((3, 3))
    want[:2, :2] = torus.matrix
    want[2, 2] = beta2 ** 2
    gap = float(np.max(np.abs(induced - want)) / np.max(np.abs(want)))
    V = R * R - 2 * TORAL_MASS / R
    return DehnFilling(
        dimension=4, base_torus=torus, sigma=sigma, complement=w, L=L, R=R,
        core_length=R_PLUS * height / R, core_length_prescribed=R_PLUS * tau,
        rotation=alpha, translation=tau, boundary_class=BoundaryMetric.flat_torus(induced),
        matching_residual=abs(sqrt(V) * BETA - L), boundary_gap=gap,
        beta2=float(beta2), mass=TORAL_MASS)


def filling_fg_check(filling):
    """Norms of g_(1) and tr g_(3) for the local model of a filling."""
    if filling.dimension != 4:
        raise DomainError("FG data is computed for four-dimensional fillings")
    fg = fg_coefficients(_toral_compactification(), 3)
    return {"g1_norm": float(np.max(np.abs(fg.coefficients[1]))),
            "tr_g3": float(np.trace(fg.coefficients[3])),
            "g3": np.asarray(fg.coefficients[3], dtype=float).tolist()}


def filling_invariant(filling, digits=9):
    """(L, core translation, |rotation|): determines the filling up to isometry."""
    return (round(filling.L, digits), round(filling.translation, digits),
            round(abs(filling.rotation), digits))


# -- cusp comparison --------------------------------------------------------

def _window(t_window, width):
    lo, hi = (float(t_window[0]), float(t_window[1]))
    if not (0 <= lo < hi):
        raise DomainError("t_window must satisfy 0 <= lo < hi")
    if hi >= width:
        raise DomainError(f"t_window reaches t = {hi:g}, beyond the collar width {width:.6g}")
    ts = np.linspace(lo, hi, 41)
    return ts[ts > 0]


def cusp_limit_distance(filling, t_window):
    """Sup over the window of |F_i(t)^2 - 1|, the frame difference from the cusp.

    Both metrics are written as t^{-2}(dt^2 + g_t) with t the geodesic
    defining function for the same boundary representative; the cusp has
    g_t equal to the boundary metric, so F_i = 1.
    """
    if isinstance(filling, str) and filling == "cusp":
        _window(t_window, np.inf)
        return 0.0
    mu = filling.boundary_scale
    if filling.dimension == 3:
        # exact geodesic defining function of the tube: t = 2 mu e^{-r}
        ts = _window(t_window, 2 * mu)
        e = (ts / (2 * mu)) ** 2
        F = np.array([1 - e, 1 + e])
    else:
        comp = _toral_compactification()
        ts = _window(t_window, mu * comp.width)
        scales = comp.boundary_scales()
        jets = comp.t_jets(ts / mu, 1)
        F = np.array([np.asarray(j.value, dtype=float) / s for j, s in zip(jets, scales)])
    if ts.size == 0:
        return 0.0
    return float(np.max(np.abs(F ** 2 - 1)))

