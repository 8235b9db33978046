"""Dehn fillings of a flat torus in dimensions 3 and 4."""
# %%
import numpy as np

from aheinstein.dehn_surgery import (FlatTorus2, cusp_limit_distance, fill_3d, fill_4d,
                                     filling_invariant, isometry_key, primitive_geodesics)

square = FlatTorus2.square()
print("shortest classes on the square torus:")
for sigma, length in primitive_geodesics(square, 3.0):
    print(f"  {sigma}  L = {length:.6f}  orbit {isometry_key(square, sigma)[0]}")

# %% [markdown]
# Filling longer and longer classes shrinks the core geodesic and pushes
# the metric near the boundary toward the cusp.
# %%
print(" k    L        core 3d      core 4d      cusp distance 4d")
for k in (1, 2, 5, 10, 20, 40):
    f3, f4 = fill_3d(square, (k, 1)), fill_4d(square, (k, 1), 1.0)
    d4 = cusp_limit_distance(f4, (0.1, 0.4))
    print(f"{k:2d}  {f3.L:7.3f}  {f3.core_length:.4e}  {f4.core_length:.4e}  {d4:.3e}")

# %%
# Two classes of the same length need not give isometric fillings.
for sigma in ((1, 8), (4, 7)):
    f = fill_3d(square, sigma)
    print(sigma, f"L^2 = {f.L ** 2:.0f}", f"core {f.core_length:.10f}",
          isometry_key(square, sigma), filling_invariant(f))

# %%
skew = FlatTorus2(((2.0, 0.3), (0.3, 1.0)))
f = fill_4d(skew, (2, -3), 0.7)
print("skew torus:", f"R = {f.R:.8f}", f"matching {f.matching_residual:.1e}",
      f"boundary gap {f.boundary_gap:.1e}")
print(np.round(f.boundary_class.gram(), 8))
