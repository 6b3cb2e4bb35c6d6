"""
Butcher matrix of HBVM(k, s) and its spectrum
=============================================

An HBVM(k, s) method evaluates the vector field at k Gauss points but
keeps only s independent directions, so its k x k Butcher matrix has
rank s. The nonzero eigenvalues coincide with those of the Gauss-s
method.
"""

import numpy as np

from hbvm import eigenvalues, hbvm_tableau, x_matrix

# %%
# Gauss-2 and HBVM(6, 2) side by side
gauss = hbvm_tableau(2, 2)
hbvm = hbvm_tableau(6, 2)
print("Gauss-2 matrix:\n", gauss.A)
print("rank of the 6x6 matrix:", np.linalg.matrix_rank(hbvm.A))

# %%
# The nonzero part of the spectrum is the one of X_2
lam = eigenvalues(hbvm.A)
print("eigenvalues of A(6,2):", np.round(np.sort_complex(lam), 12))
print("eigenvalues of X_2:   ", np.sort_complex(eigenvalues(x_matrix(2))))

# %%
# Row sums give the nodes, as for any consistent Runge-Kutta method
print("max |A e - c| =", np.abs(hbvm.A.sum(axis=1) - hbvm.nodes).max())
