"""Renormalized volume, Weyl energy and the Gauss-Bonnet balance."""
# %%
from math import pi

import numpy as np

from aheinstein.action import (ToralFamily, dv_variation_check, gauss_bonnet_weyl_check,
                               volume_expansion_fit)
from aheinstein.black_holes import conformal_infinity, make_black_hole
from aheinstein.fg_expansion import BoundaryMetric, geodesic_compactification
from aheinstein.tensor_core import hyperbolic_ball


def compactify(bh):
    return geodesic_compactification(bh.metric, conformal_infinity(bh))


# %%
ball = geodesic_compactification(hyperbolic_ball(4), BoundaryMetric.round_sphere(1.0))
exp = volume_expansion_fit(ball)
print(f"ball: v0 {exp.v0:.8f} (pi^2/4 = {pi ** 2 / 4:.8f})")
print(f"      v2 {exp.v2:.8f} (-3 pi^2/4 = {-3 * pi ** 2 / 4:.8f})")
print(f"      V  {exp.V_ren:.8f} (4 pi^2/3 = {4 * pi ** 2 / 3:.8f})")

# %% [markdown]
# For the black holes the volume, the Euler characteristic and the Weyl
# energy must balance; the two sides are printed next to each other.
# %%
for c, chi in ((1, 2), (0, 0), (-1, -2)):
    for m in (0.5, 1.0, 2.0):
        rep = gauss_bonnet_weyl_check(compactify(make_black_hole(4, c, m)), chi)
        print(f"c={c:+d} m={m:<4} V={rep['V_ren']:+.6f}  lhs={rep['lhs']:+.6f} "
              f"rhs={rep['rhs']:+.6f}  gap={rep['relative_gap']:.1e}")

# %%
# On a fixed coordinate torus the toral volume scales like m^(2/3).
family = ToralFamily()
ms = np.linspace(0.25, 4, 6)
vs = [volume_expansion_fit(family.member(m)).V_ren for m in ms]
print(np.round(np.array(vs) / ms ** (2 / 3), 10))

# %%
for m in (0.5, 1.0):
    rep = dv_variation_check(family, m)
    print(f"m={m}: dV/dm by differences {rep['finite_difference']:.8f}, "
          f"by boundary integral {rep['boundary_integral']:.8f}")
