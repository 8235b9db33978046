"""Black holes filling S^1(beta) x S^2 and S^1(beta) x Sigma_2.

Run with ``python3 demos/black_hole_branches.py``.
"""
# %%
from math import pi, sqrt

import numpy as np

from aheinstein.black_holes import (beta_extremum, beta_of_rplus, extremal_mass,
                                    make_black_hole, masses_for_beta)

# %% [markdown]
# For round horizons the period of the smooth filling is not monotone in the
# horizon radius.  It rises from 0, peaks, then falls back to 0.
# %%
r = np.linspace(0.05, 3, 60)
beta = beta_of_rplus(1, r)
(r_peak, beta_peak), _ = beta_extremum(1)
print(f"peak at r_+ = {r_peak:.12f}  (1/sqrt 3 = {1 / sqrt(3):.12f})")
print(f"beta_o = {beta_peak:.12f}  (2 pi / sqrt 3 = {2 * pi / sqrt(3):.12f})")
print("sampled maximum:", r[np.argmax(beta)].round(3), beta.max().round(6))

# %%
# Below beta_o there are two masses with the same boundary; above it, none.
for b in (1.0, pi, beta_peak, 4.0):
    comp = masses_for_beta(1, b)
    kinds = [m.topology for m in comp.members]
    print(f"beta = {b:.6f}: masses {np.round(comp.masses, 10).tolist()}  members {kinds}")

# %% [markdown]
# Hyperbolic horizons: one filling per period, and negative masses down to
# the extremal value where the horizon degenerates.
# %%
print("extremal mass", extremal_mass(4), "vs", -3 ** -1.5)
for m in (extremal_mass(4) + 1e-3, -0.1, 0.0, 1.0, 10.0):
    bh = make_black_hole(4, -1, m)
    print(f"m = {m:+.4f}  r_+ = {bh.r_plus:.6f}  beta = {bh.beta:.6f}")

# %%
# The toral family: every period is realized exactly once, beta = 4 pi / (3 r_+).
for m in (0.5, 1.0, 2.0):
    bh = make_black_hole(4, 0, m)
    print(f"m = {m}: r_+ = {bh.r_plus:.6f}  beta * r_+ = {bh.beta * bh.r_plus:.12f}")
