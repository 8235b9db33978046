r"""AdS black holes with spherical, toral and hyperbolic horizons.

The metrics are

.. math::

    g = V^{-1} dr^2 + V d\theta^2 + r^2 g_\Sigma, \qquad
    V = c + r^2 - \frac{2m}{r^{n-3}},

on ``r > r_+`` with ``g_Sigma`` of constant curvature ``c`` and dimension
``n - 2``.  The mass ``m`` is the only stored parameter; the horizon radius
and the smooth period of ``theta`` are derived from it.
"""

from dataclasses import dataclass, field
from fractions import Fraction
from math import pi, sqrt

import numpy as np
from scipy import optimize

from .errors import DomainError, FiberTypeError, NumericalFailure
from .fg_expansion import BoundaryMetric
from .series import Series
from .tensor_core import FiberBlock, WarpedProductMetric, einstein_residual

__all__ = [
    "BlackHoleSolution",
    "CompetitorSet",
    "Competitor",
    "make_black_hole",
    "beta_of_rplus",
    "dbeta_drplus",
    "masses_for_beta",
    "beta_extremum",
    "toral_rescaling_isometry",
    "conformal_infinity",
    "extremal_mass",
    "hyperbolic_quotient",
    "euler_characteristic",
]

TOPOLOGY = {1: "S2xR2", 0: "R2xT2", -1: "R2xSigma"}


def _potential(n, c, m):
    def V(r):
        return c + r * r - 2 * m * r ** (-(n - 3))
    return V


def extremal_mass(n=4):
    """Lower mass limit for c = -1: V has a double root at r^2 = (n-3)/(n-1)."""
    r = sqrt((n - 3) / (n - 1))
    return -r ** (n - 1) / (n - 3)


def _check_sign(c):
    if c not in (-1, 0, 1):
        raise DomainError("c must be one of +1, 0, -1")


def horizon_radius(n, c, m):
    """Largest root of V, by bracketing and Brent's method."""
    _check_sign(c)
    if n < 4:
        raise DomainError("dimension must be at least 4")
    V = lambda r: c + r * r - 2 * m / r ** (n - 3)
    if m > 0:
        lo = min(1.0, (2 * m) ** (1 / (n - 3)) * 1e-3)
        while V(lo) > 0:
            lo *= 0.5
    elif m == 0:
        if c >= 0:
            raise DomainError("no horizon for m = 0 unless c = -1")
        return 1.0
    else:
        if c != -1 or m <= extremal_mass(n):
            raise DomainError(f"mass {m} below the admissible range")
        lo = ((n - 3) * abs(m)) ** (1 / (n - 1))
        if not V(lo) < 0:
            raise DomainError("degenerate horizon")
    hi = max(1.0, (2 * abs(m) + 2) ** (1 / (n - 3)) * 2)
    while V(hi) <= 0:
        hi *= 2
    r = optimize.brentq(V, lo, hi, xtol=1e-16, rtol=4 * np.finfo(float).eps, maxiter=500)
    # Newton polish
    for _ in range(3):
        dV = 2 * r + 2 * (n - 3) * m / r ** (n - 2)
        r -= V(r) / dV
    return r


def beta_of_rplus(c, r_plus, n=4):
    """Smooth period 4 pi r / ((n-1) r^2 + (n-3) c)."""
    _check_sign(c)
    r = np.asarray(r_plus, dtype=float)
    if not np.all(r > 0):
        raise DomainError("r_plus must be positive")
    den = (n - 1) * r ** 2 + (n - 3) * c
    # the edge r^2 = (n-3)/(n-1) itself is excluded despite rounding
    if np.any(den <= 1e-12 * (n - 1) * r ** 2):
        raise DomainError("r_plus below the smooth range")
    return (4 * pi * r / den)[()]


def dbeta_drplus(c, r_plus, n=4):
    den = (n - 1) * r_plus ** 2 + (n - 3) * c
    return 4 * pi * ((n - 3) * c - (n - 1) * r_plus ** 2) / den ** 2


def mass_of_rplus(c, r_plus, n=4):
    return r_plus ** (n - 3) * (c + r_plus ** 2) / 2


def _default_block(n, c, genus=2, gram=None):
    d = n - 2
    if c == 1:
        return FiberBlock.sphere(d)
    if c == 0:
        return FiberBlock.torus(np.eye(d) if gram is None else gram)
    if d == 2:
        return FiberBlock.hyperbolic_surface(genus)
    return FiberBlock.hyperbolic_space(d)


def euler_characteristic(c, block=None):
    if c == 1:
        return 2
    if c == 0:
        return 0
    if block is not None and block.genus is not None:
        return 2 - 2 * block.genus
    return None


def ansatz_metric(n, c, m, beta, block, interval):
    """The materialized metric V^{-1}dr^2 + V dtheta^2 + r^2 g_Sigma."""
    k = n - 3

    def V(s):
        return s * s + c - 2 * m * s.reciprocal() ** k

    def chart(order, exact=True):
        if exact:
            u = Series.exact_variable(order)
            mm = Fraction(m) if not isinstance(m, Fraction) else m
            one = u * 0 + 1
            W = one + c * (u * u) - 2 * mm * u ** (n - 1)
            return W.reciprocal().sqrt(), [W, one]
        u = Series.variable(0.0, order)
        one = u * 0 + 1.0
        W = one + c * (u * u) - 2 * float(m) * u ** (n - 1)
        return W.reciprocal().sqrt(), [W, one]

    return WarpedProductMetric(
        interval=interval,
        radial=lambda s: V(s).sqrt().reciprocal(),
        warps=[lambda s: V(s).sqrt(), lambda s: s],
        blocks=[FiberBlock.circle(beta), block],
        name=f"bh(n={n},c={c:+d},m={float(m):.6g})",
        boundary_chart=chart,
        params={"family": "black_hole", "n": n, "c": c, "m": m},
    )


@dataclass(frozen=True)
class BlackHoleSolution:
    """An AdS black hole; ``r_plus`` and ``beta`` are derived from ``m``."""

    dimension: int
    c: int
    m: float
    fiber_block: FiberBlock
    _derived: dict = field(default_factory=dict, repr=False, compare=False)

    @property
    def r_plus(self):
        if "r" not in self._derived:
            self._derived["r"] = horizon_radius(self.dimension, self.c, self.m)
        return self._derived["r"]

    @property
    def beta(self):
        return beta_of_rplus(self.c, self.r_plus, self.dimension)

    @property
    def fiber(self):
        return (FiberBlock.circle(self.beta), self.fiber_block)

    @property
    def metric(self):
        if "metric" not in self._derived:
            self._derived["metric"] = ansatz_metric(self.dimension, self.c, self.m, self.beta,
                                                    self.fiber_block, (self.r_plus, np.inf))
        return self._derived["metric"]

    @property
    def euler_characteristic(self):
        return euler_characteristic(self.c, self.fiber_block)

    @property
    def topology(self):
        return TOPOLOGY[self.c]

    def V(self, r):
        return _potential(self.dimension, self.c, self.m)(r)

    def to_dict(self):
        return {"n": self.dimension, "c": self.c, "m": float(self.m),
                "r_plus": self.r_plus, "beta": self.beta, "admissible": True,
                "topology": self.topology}


def admissible(n, c, m):
    _check_sign(c)
    if c == -1:
        return m > extremal_mass(n)
    return m > 0


def make_black_hole(n, c, m, genus=2, gram=None, check=True):
    """Black hole of mass ``m``; raises DomainError outside the admissible range."""
    _check_sign(c)
    if n < 4:
        raise DomainError("dimension must be at least 4")
    if not admissible(n, c, m):
        raise DomainError(f"mass m = {m} not admissible for c = {c:+d} in dimension {n}")
    bh = BlackHoleSolution(n, c, m, _default_block(n, c, genus, gram))
    if check:
        grid = bh.r_plus + np.geomspace(1e-2, 100, 50) * max(1.0, bh.r_plus)
        res = einstein_residual(bh.metric, grid)
        if res > 1e-8:
            raise NumericalFailure(f"Einstein residual {res:.3e} for {bh.metric.name}")
    return bh


# -- competitors ------------------------------------------------------------

@dataclass(frozen=True)
class Competitor:
    """One filling of a given conformal infinity."""

    topology: str
    kind: str
    params: dict
    boundary: BoundaryMetric
    euler_characteristic: int
    renormalized_volume: float = None

    def to_dict(self):
        out = {"topology": self.topology, "kind": self.kind,
               "params": {k: float(v) if isinstance(v, (int, float, Fraction)) else v
                          for k, v in self.params.items()},
               "euler_characteristic": self.euler_characteristic,
               "boundary": self.boundary.label}
        if self.renormalized_volume is not None:
            out["renormalized_volume"] = self.renormalized_volume
        return out


@dataclass(frozen=True)
class CompetitorSet:
    boundary: BoundaryMetric
    members: tuple

    @property
    def black_holes(self):
        return [m for m in self.members if m.kind == "black_hole"]

    @property
    def masses(self):
        return [m.params["m"] for m in self.black_holes]

    def to_dict(self):
        return {"boundary": self.boundary.to_dict(),
                "competitors": [m.to_dict() for m in self.members]}


def hyperbolic_quotient(beta, twist=0.0):
    """H^4 modulo a translation of length ``beta`` (optional twist label).

    Stored descriptively; its constant-curvature invariants are those of
    H^4 and its renormalized volume vanishes (W = 0 and chi = 0).
    """
    return Competitor("R3xS1", "hyperbolic_quotient", {"translation": beta, "twist": twist},
                      BoundaryMetric.circle_cross_sphere(beta), 0, 0.0)


def quotient_metric(beta):
    """Chart of H^4/Z: the c = +1, m = 0 ansatz on r > 0 (the S^2 closes at r = 0)."""
    return ansatz_metric(4, 1, 0, beta, FiberBlock.sphere(2), (0.0, np.inf))


def _quadratic_roots(c, beta, n):
    # (n-1) beta r^2 - 4 pi r + (n-3) c beta = 0
    a, b, cc = (n - 1) * beta, -4 * pi, (n - 3) * c * beta
    if c == 0:
        return [4 * pi / ((n - 1) * beta)]
    disc = b * b - 4 * a * cc
    scale = b * b
    if abs(disc) <= 1e-12 * scale:
        return [-b / (2 * a)]
    if disc < 0:
        return []
    sq = sqrt(disc)
    roots = [(-b - sq) / (2 * a), (-b + sq) / (2 * a)]
    # stable small root
    if c == 1:
        roots[0] = (2 * cc) / (-b + sq)
    return sorted(r for r in roots if r > 0 and (n - 1) * r * r + (n - 3) * c > 0)


def masses_for_beta(c, beta, n=4, genus=2, gram=None):
    """All black holes with period ``beta``, plus the hyperbolic quotient for c = +1."""
    _check_sign(c)
    if not beta > 0:
        raise DomainError("beta must be positive")
    block = _default_block(n, c, genus, gram)
    boundary = BoundaryMetric.circle_cross(beta, block)
    members = []
    for r in _quadratic_roots(c, beta, n):
        m = mass_of_rplus(c, r, n)
        members.append(Competitor(TOPOLOGY[c], "black_hole",
                                  {"m": m, "r_plus": r, "beta": beta_of_rplus(c, r, n)},
                                  boundary, euler_characteristic(c, block)))
    members.sort(key=lambda mem: mem.params["m"])
    if c == 1 and n == 4:
        members.append(hyperbolic_quotient(beta))
    return CompetitorSet(boundary, tuple(members))


def beta_extremum(c, n=4):
    """Maximizer of beta(r_plus) for c = +1; otherwise None and a monotonicity certificate."""
    _check_sign(c)
    if c == 1:
        r = optimize.brentq(lambda x: dbeta_drplus(1, x, n), 1e-3, 10.0, xtol=1e-15, rtol=1e-15)
        return (r, beta_of_rplus(1, r, n)), None
    lo = sqrt((n - 3) / (n - 1)) if c == -1 else 0.0
    grid = lo + np.geomspace(1e-6, 1e3, 2000)
    slopes = np.array([dbeta_drplus(c, r, n) for r in grid])
    return None, {"domain": (lo, float("inf")), "max_slope": float(slopes.max()),
                  "decreasing": bool(np.all(slopes < 0))}


# -- toral rescaling --------------------------------------------------------

def toral_rescaling_isometry(m, radii=None, n=4):
    """Compare invariants of the c = 0 metric of mass m with the m = 1 metric.

    The substitution r = m^{1/3} s, theta = m^{-1/3} psi (and the torus
    coordinates scaled by m^{-1/3}) pulls g_m back to g_1, so invariants at r
    agree with those of g_1 at r m^{-1/3}.  The period check confirms the
    sign of the exponent on theta.
    """
    from .tensor_core import curvature

    if not m > 0:
        raise DomainError("m must be positive")
    gm = make_black_hole(n, 0, m, check=False)
    g1 = make_black_hole(n, 0, 1.0, check=False)
    k = m ** (1 / (n - 1))
    if radii is None:
        radii = gm.r_plus * np.linspace(1.05, 20, 20)
    gaps = []
    for r in radii:
        a = curvature(gm.metric, r)
        b = curvature(g1.metric, r / k)
        gaps.append(max(abs(a.scalar - b.scalar), abs(a.norm_riemann - b.norm_riemann),
                        abs(a.norm_weyl - b.norm_weyl)))
    return {"m": m, "max_gap": float(max(gaps)), "radii": list(map(float, radii)),
            "period_ratio": gm.beta / g1.beta,
            "period_ratio_expected": m ** (-1 / (n - 1)),
            "period_ratio_printed": m ** (1 / (n - 1))}


def conformal_infinity(bh, fiber_periods=None):
    """Boundary representative S^1(beta) x Sigma induced by the geodesic compactification.

    For c = 0, ``fiber_periods`` lists rectangular torus periods and must
    agree with the fiber lattice.
    """
    block = bh.fiber_block
    if fiber_periods is not None and len(fiber_periods):
        if block.kind != "torus":
            raise FiberTypeError("fiber periods only apply to toral horizons")
        gram = np.array(block.gram)
        want = np.diag(np.asarray(fiber_periods, dtype=float) ** 2)
        if gram.shape != want.shape or np.max(np.abs(gram - want)) > 1e-12 * np.max(want):
            raise FiberTypeError("fiber periods inconsistent with the horizon lattice")
    return BoundaryMetric.circle_cross(bh.beta, block)
