"""Fefferman-Graham coefficients of the catalog metrics."""
# %%
import numpy as np

from aheinstein.black_holes import conformal_infinity, make_black_hole
from aheinstein.fg_expansion import (BoundaryMetric, fg_coefficients, g2_closed_form,
                                     geodesic_compactification, width_and_bound)
from aheinstein.tensor_core import hyperbolic_ball

np.set_printoptions(precision=6, suppress=True)

ball = geodesic_compactification(hyperbolic_ball(4), BoundaryMetric.round_sphere(1.0))
members = {"ball": ball}
for label, c in (("sphere", 1), ("torus", 0), ("genus 2", -1)):
    bh = make_black_hole(4, c, 1.0)
    members[label] = geodesic_compactification(bh.metric, conformal_infinity(bh))

# %% [markdown]
# g_(1) vanishes, g_(2) is fixed by the boundary curvature and g_(3) is
# trace-free.  Only g_(3) knows about the mass.
# %%
for label, comp in members.items():
    fg = fg_coefficients(comp, 4)
    g2 = np.diag(fg.coefficients[2])
    g3 = np.diag(fg.coefficients[3])
    print(f"{label:8s} g2 {g2}  closed form {np.diag(g2_closed_form(comp.boundary))}")
    print(f"{'':8s} g3 {g3}  trace {g3.sum():+.1e}  path gap {max(fg.path_gap):.1e}")

# %%
# The toral g_(3) is m * diag(-4/3, 2/3, 2/3) in the (theta, torus) frame.
for m in (0.5, 2.0):
    bh = make_black_hole(4, 0, m)
    fg = fg_coefficients(geodesic_compactification(bh.metric, conformal_infinity(bh)), 3)
    print(m, np.diag(fg.coefficients[3]) / m)

# %%
# How far the geodesic collar reaches, against the curvature bound.
for label, comp in members.items():
    rep = width_and_bound(comp)
    print(f"{label:8s} width {rep['width']:.6f}  bound {rep['bound']:.6f}")
