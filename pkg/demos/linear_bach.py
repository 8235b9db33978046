"""Polynomial solutions of the linearized Bach equation, exactly."""
# %%
import numpy as np
import sympy

from aheinstein.linear_bach import (InvariantForm, bach_residual, check_polynomials,
                                    general_solution, kernel_dimensions,
                                    linearized_operators, parameter_count)

h = general_solution(c0=24)
print("normal form of the quartic:")
print(sympy.pretty(h.to_sympy(sympy.Symbol("t"))))
ric, s = linearized_operators(h)
print("scalar curvature variation:", s)

# %%
# Perturbing by t^5 breaks the equation unless the profile is diag(3,1,1,1).
bump = InvariantForm.monomial(np.diag([1, 2, 0, 0]), 5)
print("generic t^5 residual nonzero:", not bach_residual(h + bump).is_zero)
print("t^5 diag(3,1,1,1) residual zero:",
      bach_residual(InvariantForm.monomial(np.diag([3, 1, 1, 1]), 5)).is_zero)

# %%
print("kernel dimensions:", kernel_dimensions(4), "parameters:", parameter_count())
rep = check_polynomials(seed=1, draws=25)
print("random admissible draws all pass:", rep["passed"])
