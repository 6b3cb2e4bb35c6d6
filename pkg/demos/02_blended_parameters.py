"""
Choosing the blending parameter
===============================

The blended iteration replaces the full Newton system by s small
factorisations of ``I - h gamma J``. Picking ``gamma = min |mu|`` over
the spectrum of the Gauss matrix keeps the worst-case contraction
factor on the imaginary axis as small as possible.
"""

import numpy as np

from hbvm import eigenvalues, gamma_opt, linear_analysis, make_partition, rho_star_optimal, x_matrix

# %%
# Optimal parameters for s = 2..10
print(" s   gamma   rho*")
for s in range(2, 11):
    mu = eigenvalues(x_matrix(s))
    print(f"{s:2d}  {gamma_opt(mu):.4f}  {rho_star_optimal(mu):.4f}")

# %%
# The amplification factor along q = i y peaks at y = 1/gamma.
# Adding silent stages does not change it: C(k, s) has the same spectrum.
for k in (2, 4, 10):
    an = linear_analysis(make_partition(k, 2).C)
    y_peak = an.q_grid[np.argmax(an.rho)].imag
    print(f"HBVM({k},2): max rho = {an.max_rho:.4f} at y = {y_peak:.3f}, 1/gamma = {1 / an.gamma:.3f}")
