r"""Renormalized volume, Weyl energy and the variation of V along a family.

With ``t`` the geodesic defining function and ``r = log(2/t)``, the area of
the level sets expands as

.. math::

    \mathrm{vol}\,S(r) = v_0 e^{3r} + v_2 e^{r} + O(e^{-r}),

so that ``vol B(r) = v_0 e^{3r}/3 + v_2 e^{r} + V + o(1)``.  In terms of the
FG data ``v_0 = vol(gamma)/8`` and ``v_2 = vol(gamma) tr g_(2) / 4``.

The renormalized volume is computed as the bulk volume inside ``t = T``
plus a finite integral of the subtracted area density over ``(0, T)``.  The
piece nearest the boundary uses the boundary power series, the rest uses
the metric itself.
"""

from dataclasses import dataclass
from math import pi

import numpy as np
from scipy import integrate

from .black_holes import BlackHoleSolution, conformal_infinity, make_black_hole
from .errors import DomainError, InvalidMetricError, NumericalFailure
from .fg_expansion import (GeodesicCompactification, fg_coefficients,
                           geodesic_compactification)
from .series import Series
from .tensor_core import weyl_energy_density

__all__ = [
    "VolumeExpansion",
    "volume_expansion_fit",
    "renormalized_volume",
    "weyl_energy",
    "gauss_bonnet_weyl_check",
    "ToralFamily",
    "dv_variation_check",
    "compactify",
]

SERIES_DEPTH = 14


@dataclass
class VolumeExpansion:
    v0: float
    v2: float
    V_ren: float
    fit_residual: float
    r_window: tuple
    V_ren_half: float = None
    fit_coefficients: dict = None

    @property
    def window_gap(self):
        return abs(self.V_ren - self.V_ren_half)

    def to_dict(self):
        return {"v0": self.v0, "v2": self.v2, "V_ren": self.V_ren,
                "fit_residual": self.fit_residual, "r_window": list(self.r_window),
                "window_gap": self.window_gap}


def compactify(subject, boundary=None):
    """Geodesic compactification of a black hole, or of a metric with a boundary."""
    if isinstance(subject, GeodesicCompactification):
        return subject
    if isinstance(subject, BlackHoleSolution):
        return geodesic_compactification(subject.metric, boundary or conformal_infinity(subject))
    if boundary is None:
        raise DomainError("a boundary metric is required")
    return geodesic_compactification(subject, boundary)


def _quad(f, a, b, what):
    val, err, *rest = integrate.quad(f, a, b, epsabs=1e-13, epsrel=1e-12, limit=500,
                                     full_output=1)
    if not np.isfinite(val) or err > 1e-8 * max(1.0, abs(val)):
        raise NumericalFailure(f"{what} quadrature did not converge (error {err:.2e})")
    return val


def _area_product(comp, order):
    """Series of prod_i (F_i / F_i(0))^{d_i}, the normalized area density t^3 vol S / vol."""
    blocks, _ = _float_series(comp, order)
    P = Series.constant(1.0, order)
    for coeffs, b in zip(blocks, comp.source.blocks):
        P = P * Series(np.array(coeffs, dtype=float)) ** (b.dim / 2)
    return P


def _float_series(comp, order):
    raw = comp.boundary_series(order, exact=False)
    return [[float(c) / comp.kappa ** j for j, c in enumerate(b)] for b in raw], raw


def renormalized_volume(comp, T, s_cut=None):
    """V_ren from the split point ``T`` (any T in the collar gives the same value)."""
    if comp.dimension != 4:
        raise DomainError("renormalized volume is implemented for dimension four")
    A = comp.boundary.volume
    if A is None or comp.source.fiber_volume is None:
        raise DomainError("renormalized volume needs a compact fiber")
    A = comp.source.fiber_volume * np.prod([s ** b.dim for s, b in
                                            zip(comp.boundary_scales(), comp.source.blocks)])
    P = _area_product(comp, SERIES_DEPTH)
    p2 = float(P.c[2])
    if abs(P.c[1]) > 1e-10 or abs(P.c[3]) > 1e-8:
        raise NumericalFailure("area expansion has odd low-order terms")
    if s_cut is None:
        s_cut = min(0.05, T / 2)
    # near the boundary: term-wise integral of the series
    near = A * sum(float(P.c[k]) * s_cut ** (k - 3) / (k - 3) for k in range(4, SERIES_DEPTH + 1))
    # collar piece, integrated in the source coordinate
    x_T = comp.x_of_t(T)
    x_c = comp.x_of_t(s_cut)
    blocks = comp.source.blocks
    vol_f = comp.source.fiber_volume

    def subtracted(x):
        fr, ws = comp.source.jets(x, 0)
        t = comp.t(x)
        area = vol_f * np.prod([float(w.value) ** b.dim for w, b in zip(ws, blocks)])
        return (area * t ** 3 / A - 1 - p2 * t * t) * A / t ** 4 * t * float(fr.value)

    mid = _quad(subtracted, x_T, x_c, "collar")
    a = comp.source.interval[0]

    def bulk(x):
        try:
            return float(comp.source.volume_density(x))
        except InvalidMetricError:
            if np.isfinite(a):
                raise
            return 0.0  # warps underflow deep inside a finite-volume end

    inner = _quad(bulk, a, x_T, "bulk volume")
    return inner + mid + near - A / (3 * T ** 3) - A * p2 / T


def volume_expansion_fit(compact, T=None, boundary=None):
    """v0, v2 and V_ren, with window stability and an exponential fit of vol S(r)."""
    comp = compactify(compact, boundary)
    if comp.source.fiber_volume is None:
        raise DomainError("volume expansion needs a compact fiber")
    A = comp.boundary.volume
    fg = fg_coefficients(comp, 3)
    tr2 = float(np.trace(fg.coefficients[2]))
    v0 = A / 8
    v2 = A * tr2 / 4
    if T is None:
        T = 0.5 * min(1.0, comp.width)
    V = renormalized_volume(comp, T)
    V_half = renormalized_volume(comp, T / 2)
    if abs(V - V_half) > 1e-4 * max(1.0, abs(V)):
        raise NumericalFailure(f"renormalized volume unstable under window change: {V} vs {V_half}")
    fit, resid, window = _fit_area(comp, v0)
    return VolumeExpansion(v0, v2, V, resid, window, V_half, fit)


def _fit_area(comp, v0, r_lo=3.0, r_hi=9.0, count=60):
    """Least squares fit of vol S(r) on exponentials e^{kr}, k = 3 .. -4."""
    r = np.linspace(r_lo, r_hi, count)
    t = 2 * np.exp(-r)
    if t.max() >= comp.width:
        r = np.linspace(np.log(2 / (0.5 * comp.width)), r_hi, count)
        t = 2 * np.exp(-r)
    x = comp.x_of_t(t)
    fr, ws = comp.source.jets(x, 0)
    area = comp.source.fiber_volume * np.prod([np.asarray(w.value) ** b.dim
                                               for w, b in zip(ws, comp.source.blocks)], axis=0)
    ks = np.arange(3, -5, -1)
    basis = np.exp(np.outer(r, ks))
    scale = np.exp(-3 * r)  # relative weighting
    coef, *_ = np.linalg.lstsq(basis * scale[:, None], area * scale, rcond=None)
    fit = {int(k): float(c) for k, c in zip(ks, coef)}
    resid = max(abs(fit[2]), abs(fit[0]), abs(fit[3] - v0)) / v0
    return fit, float(resid), (float(r[0]), float(r[-1]))


# -- Weyl energy and the Gauss-Bonnet identity ------------------------------

def weyl_energy(metric, split=None):
    """Integral of |W|^2 (full component sum) over the manifold."""
    a, b = metric.interval
    if not np.isfinite(a):
        raise DomainError("Weyl energy needs an inner end")
    if split is None:
        split = a + 10 * max(1.0, abs(a))

    def dens(x):
        # overflow of the warps only happens once the density has decayed
        with np.errstate(all="ignore"):
            w2 = float(weyl_energy_density(metric, x))
            if w2 == 0.0 or not np.isfinite(w2):
                return 0.0
            val = w2 * float(metric.volume_density(x))
        return val if np.isfinite(val) else 0.0

    far = split * 1e3
    # tail decay must beat 1/x for convergence
    d1, d2 = dens(far), dens(10 * far)
    if d2 * 10 * far > max(0.5 * d1 * far, 1e-10):
        raise NumericalFailure("Weyl energy density does not decay fast enough")
    return _quad(dens, a, split, "Weyl energy") + _quad(dens, split, np.inf, "Weyl energy tail")


def gauss_bonnet_weyl_check(subject, euler_characteristic, boundary=None):
    """Both sides of (1/8pi^2) int |W|^2 = chi - (3/4pi^2) V.

    The Weyl norm here is the one on two-forms, a quarter of the full
    component sum returned by ``weyl_energy_density``.
    """
    comp = compactify(subject, boundary)
    energy = weyl_energy(comp.source)
    lhs = energy / 4 / (8 * pi ** 2)
    exp = volume_expansion_fit(comp)
    rhs = euler_characteristic - 3 / (4 * pi ** 2) * exp.V_ren
    gap = abs(lhs - rhs) / max(1.0, abs(rhs))
    return {"lhs": lhs, "rhs": rhs, "relative_gap": gap, "V_ren": exp.V_ren,
            "weyl_energy": energy, "chi": euler_characteristic,
            "volume_bound_holds": bool(exp.V_ren <= 4 * pi ** 2 / 3 * euler_characteristic + 1e-9)}


# -- variation formula ------------------------------------------------------

@dataclass(frozen=True)
class ToralFamily:
    """Toral black holes on a fixed coordinate torus; ``frozen`` pins the member."""

    gram: tuple = ((1.0, 0.0), (0.0, 1.0))
    frozen: float = None

    def member(self, m):
        return make_black_hole(4, 0, self.frozen if self.frozen is not None else m,
                               gram=np.array(self.gram), check=False)

    def boundary_gram(self, m):
        """Gram matrix of the boundary on the fixed coordinate torus (theta period 1)."""
        bh = self.member(m)
        return conformal_infinity(bh).gram()

    def renormalized_volume(self, m):
        return volume_expansion_fit(self.member(m)).V_ren


def _sym_inv_sqrt(G):
    w, v = np.linalg.eigh(G)
    return v @ np.diag(w ** -0.5) @ v.T


def dv_variation_check(family, m, step=1e-3, tol=1e-3):
    """Central difference of V_ren in m against -(1/4) int <g_(3), h_(0)> dV_gamma."""
    if not m > 0 or not step > 0 or step >= m:
        raise DomainError("need 0 < step < m")

    def central(h):
        return (family.renormalized_volume(m + h) - family.renormalized_volume(m - h)) / (2 * h)

    d1, d2 = central(step), central(step / 2)
    if abs(d1 - d2) > tol * max(1.0, abs(d2)):
        raise NumericalFailure(f"finite differences not converged: {d1} vs {d2}")
    fd = (4 * d2 - d1) / 3
    G = family.boundary_gram(m)
    dG = (family.boundary_gram(m + step) - family.boundary_gram(m - step)) / (2 * step)
    S = _sym_inv_sqrt(G)
    h0 = S @ dG @ S
    bh = family.member(m)
    comp = compactify(bh)
    g3 = fg_coefficients(comp, 3).coefficients[3]
    vol = comp.boundary.volume
    bint = -0.25 * float(np.trace(g3 @ h0)) * vol
    gap = abs(fd - bint) / max(abs(bint), abs(fd), 1e-300) if (fd or bint) else 0.0
    return {"finite_difference": fd, "boundary_integral": bint, "gap": gap,
            "steps": (step, step / 2), "h0": h0.tolist()}
