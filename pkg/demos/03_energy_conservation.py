"""
Energy conservation on polynomial and non-polynomial Hamiltonians
=================================================================

With k large enough relative to s and the degree of H, the method
conserves a polynomial Hamiltonian exactly. For the pendulum, adding
silent stages shrinks the energy error until it reaches round-off.
"""

from hbvm import integrate, pendulum, quartic_oscillator, sextic_oscillator

# %%
# Quartic oscillator: degree 4 needs k >= 2s
for k in (2, 4):
    res = integrate(quartic_oscillator(), [1.0, 0.5], 100.0, 0.1, k, 2)
    print(f"quartic HBVM({k},2): max |H - H0| = {res.max_energy_drift():.2e}")

# %%
# Sextic oscillator: degree 6 needs k >= 3s. A coarse step makes the
# quadrature error of the smaller k visible.
for k in (2, 4, 6, 8):
    res = integrate(sextic_oscillator(), [1.0, 0.5], 100.0, 0.5, k, 2)
    print(f"sextic  HBVM({k},2), h = 0.5: max |H - H0| = {res.max_energy_drift():.2e}")

# %%
# Pendulum with a coarse step: the drift falls as k grows
for k in (2, 4, 6, 8, 10):
    res = integrate(pendulum(), [2.0, 0.0], 100.0, 1.0, k, 2)
    print(f"pendulum HBVM({k},2), h = 1: max |H - H0| = {res.max_energy_drift():.2e}")
