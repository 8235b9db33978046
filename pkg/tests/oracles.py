"""Independent reference computations for the tests.

Nothing here imports the package: curvature comes from Christoffel symbols
in sympy, boundary expansions from hand series in u = 1/r, and widths from
mpmath quadrature.
"""

from functools import lru_cache

import mpmath
import sympy as sp


def diagonal_curvature(coords, diag):
    """Riemann (all indices down), Ricci and scalar of a diagonal metric, symbolically."""
    n = len(coords)
    g = sp.diag(*diag)
    ginv = sp.diag(*[1 / d for d in diag])
    gam = [[[sp.simplify(sum(ginv[a, e] * (sp.diff(g[e, b], coords[c]) + sp.diff(g[e, c], coords[b])
                                           - sp.diff(g[b, c], coords[e])) for e in range(n)) / 2)
             for c in range(n)] for b in range(n)] for a in range(n)]
    # R^a_{bcd}
    up = sp.MutableDenseNDimArray.zeros(n, n, n, n)
    for a in range(n):
        for b in range(n):
            for c in range(n):
                for d in range(n):
                    val = sp.diff(gam[a][b][d], coords[c]) - sp.diff(gam[a][b][c], coords[d])
                    val += sum(gam[a][c][e] * gam[e][b][d] - gam[a][d][e] * gam[e][b][c]
                               for e in range(n))
                    up[a, b, c, d] = val
    down = sp.MutableDenseNDimArray.zeros(n, n, n, n)
    for a in range(n):
        for b in range(n):
            for c in range(n):
                for d in range(n):
                    down[a, b, c, d] = g[a, a] * up[a, b, c, d]
    ric = sp.Matrix(n, n, lambda b, d: sum(up[a, b, a, d] for a in range(n)))
    scal = sum(ginv[b, b] * ric[b, b] for b in range(n))
    return g, down, ric, scal


def black_hole_metric(c, m, sigma_kind):
    """Coordinates and diagonal of V^-1 dr^2 + V dth^2 + r^2 g_Sigma."""
    r, th, x, y = sp.symbols("r theta x y", positive=True)
    V = c + r ** 2 - 2 * sp.nsimplify(m) / r
    if sigma_kind == "sphere":
        surf = [r ** 2, r ** 2 * sp.sin(x) ** 2]
    elif sigma_kind == "flat":
        surf = [r ** 2, r ** 2]
    else:
        surf = [r ** 2, r ** 2 * sp.sinh(x) ** 2]
    return (r, th, x, y), [1 / V, V] + surf


@lru_cache(maxsize=None)
def frame_ricci(c, m, sigma_kind, r0, point=0.7):
    coords, diag = black_hole_metric(c, m, sigma_kind)
    g, _, ric, _ = diagonal_curvature(coords, diag)
    subs = {coords[0]: r0, coords[2]: point}
    return [float((ric[i, i] / g[i, i]).subs(subs)) for i in range(4)]


@lru_cache(maxsize=None)
def weyl_norm_squared(c, m, sigma_kind, r0, point=0.7):
    """|W|^2 as the full component sum W_abcd W^abcd at r = r0."""
    coords, diag = black_hole_metric(c, m, sigma_kind)
    g, riem, ric, scal = diagonal_curvature(coords, diag)
    n = 4
    subs = {coords[0]: r0, coords[2]: point}
    gv = [g[i, i].subs(subs) for i in range(n)]
    R = [[[[riem[a, b, cc, d].subs(subs) for d in range(n)] for cc in range(n)]
          for b in range(n)] for a in range(n)]
    Ric = [ric[i, i].subs(subs) for i in range(n)]
    S = scal.subs(subs)

    def delta(a, b):
        return gv[a] if a == b else 0

    def ricd(a, b):
        return Ric[a] if a == b else 0

    total = 0
    for a in range(n):
        for b in range(n):
            for cc in range(n):
                for d in range(n):
                    w = R[a][b][cc][d]
                    w -= (ricd(a, cc) * delta(b, d) - ricd(a, d) * delta(b, cc)
                          + ricd(b, d) * delta(a, cc) - ricd(b, cc) * delta(a, d)) / (n - 2)
                    w += S * (delta(a, cc) * delta(b, d) - delta(a, d) * delta(b, cc)) / ((n - 1) * (n - 2))
                    total += w * w / (gv[a] * gv[b] * gv[cc] * gv[d])
    return float(total)


# -- boundary expansions ------------------------------------------------------

ORDER = 6


@lru_cache(maxsize=None)
def boundary_expansion(c, m):
    """Series in t of t^2 V, t^2 r^2 and r^3, for V = c + r^2 - 2m/r.

    The defining function is t = u exp(int_0^u (1/sqrt(1 + c s^2 - 2 m s^3) - 1) ds / s)
    with u = 1/r, normalized so that t r -> 1.
    """
    u, s, t = sp.symbols("u s t")
    c = sp.nsimplify(c)
    m = sp.nsimplify(m)
    integrand = sp.series((1 / sp.sqrt(1 + c * s ** 2 - 2 * m * s ** 3) - 1) / s, s, 0, ORDER).removeO()
    I = sp.integrate(integrand, (s, 0, u))
    t_of_u = sp.series(u * sp.exp(I), u, 0, ORDER + 1).removeO()
    # revert t = u + ... by fixed point iteration on the coefficients
    u_of_t = t
    for _ in range(ORDER + 1):
        u_of_t = sp.expand(t - (t_of_u - u).subs(u, u_of_t))
        u_of_t = sp.series(u_of_t, t, 0, ORDER + 1).removeO()
    r_t = sp.series(1 / u_of_t, t, 0, ORDER - 1).removeO()
    theta = sp.series(t ** 2 * (c + r_t ** 2 - 2 * m / r_t), t, 0, 5).removeO()
    fiber = sp.series(t ** 2 * r_t ** 2, t, 0, 5).removeO()
    cube = sp.series(r_t ** 3, t, 0, 1).removeO()
    return (sp.Poly(theta, t).all_coeffs()[::-1], sp.Poly(fiber, t).all_coeffs()[::-1],
            sp.expand(cube), t)


def fg_oracle(c, m):
    """Per-block FG coefficients g_(0..4) for the theta circle and the surface."""
    theta, fiber, _, _ = boundary_expansion(c, m)
    pad = lambda cs: [float(x) for x in cs] + [0.0] * (5 - len(cs))
    return pad(theta), pad(fiber)


def renormalized_volume_oracle(c, m, r_plus, beta, surface_area):
    """Constant term in t of beta * area * (r(t)^3 - r_+^3) / 3."""
    _, _, cube, t = boundary_expansion(c, m)
    const = float(sp.expand(cube).coeff(t, 0))
    return beta * surface_area * (const - r_plus ** 3) / 3


def width_oracle(c, m, r_plus):
    """t at the horizon: log t = -log r_+ + int_{r_+}^inf (1/sqrt(V) - 1/r) dr."""
    V = lambda r: c + r * r - 2 * m / r
    with mpmath.workdps(30):
        val = mpmath.quad(lambda r: 1 / mpmath.sqrt(V(r)) - 1 / r,
                          [r_plus, r_plus + 1, mpmath.inf])
        return float(mpmath.exp(-mpmath.log(r_plus) + val))


def bisect(f, lo, hi, steps=200):
    for _ in range(steps):
        mid = 0.5 * (lo + hi)
        if (f(lo) < 0) == (f(mid) < 0):
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)
