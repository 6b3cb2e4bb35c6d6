"""Canonical Hamiltonian systems ``y' = J grad H(y)`` and the built-in test problems.

States are ordered ``y = (q_1..q_m, p_1..p_m)``, so ``J = [[0, I], [-I, 0]]``.
All callables act on the last axis and broadcast over leading ones,
which lets the solver evaluate every stage in one call.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np
from scipy.special import ellipj, ellipk

from .errors import InvalidArgumentError


def canonical_J(dim: int) -> np.ndarray:
    if dim % 2:
        raise InvalidArgumentError(f"phase-space dimension must be even, got {dim}")
    m = dim // 2
    J = np.zeros((dim, dim))
    J[:m, m:] = np.eye(m)
    J[m:, :m] = -np.eye(m)
    return J


@dataclass(frozen=True)
class HamiltonianSystem:
    dim: int
    hamiltonian: Callable
    gradient: Callable
    jac_f: Optional[Callable] = None
    name: str = "custom"

    def __post_init__(self):
        if self.dim < 2 or self.dim % 2:
            raise InvalidArgumentError(f"dim must be a positive even integer, got {self.dim}")

    @property
    def J(self) -> np.ndarray:
        return canonical_J(self.dim)

    def f(self, y):
        """Vector field ``J grad H(y)``."""
        g = np.asarray(self.gradient(y))
        m = self.dim // 2
        return np.concatenate([g[..., m:], -g[..., :m]], axis=-1)

    def energy(self, y):
        return self.hamiltonian(y)

    def jacobian(self, y) -> np.ndarray:
        """Jacobian of f at a single state; central differences if none was supplied."""
        y = np.asarray(y, dtype=float)
        if self.jac_f is not None:
            return np.asarray(self.jac_f(y), dtype=float)
        return fd_jacobian(self.f, y)


def fd_jacobian(f, y) -> np.ndarray:
    y = np.asarray(y, dtype=float)
    n = len(y)
    steps = np.sqrt(np.finfo(float).eps) * (1.0 + np.abs(y))
    jac = np.empty((n, n))
    for i in range(n):
        e = np.zeros(n)
        e[i] = steps[i]
        jac[:, i] = (f(y + e) - f(y - e)) / (2.0 * steps[i])
    return jac


def _split(y):
    y = np.asarray(y, dtype=float)
    return y[..., 0], y[..., 1]


def _one_dof_jac(d2V):
    # f = (p, -V'(q)) so df/dy = [[0, 1], [-V''(q), 0]]
    def jac(y):
        q, _ = _split(y)
        return np.array([[0.0, 1.0], [-d2V(q), 0.0]])
    return jac


def harmonic_oscillator(omega: float = 1.0) -> HamiltonianSystem:
    """``H = omega (p^2 + q^2) / 2``, a quadratic (degree 2) Hamiltonian."""

    def H(y):
        q, p = _split(y)
        return 0.5 * omega * (p * p + q * q)

    def grad(y):
        return omega * np.asarray(y, dtype=float)

    def jac(y):
        return omega * canonical_J(2)

    return HamiltonianSystem(2, H, grad, jac, name="harmonic")


def harmonic_exact(t, y0, omega: float = 1.0) -> np.ndarray:
    q0, p0 = y0
    c, s = np.cos(omega * t), np.sin(omega * t)
    return np.array([q0 * c + p0 * s, p0 * c - q0 * s])


def _power_oscillator(n, name):
    def H(y):
        q, p = _split(y)
        return 0.5 * p * p + q ** n / n

    def grad(y):
        q, p = _split(y)
        return np.stack([q ** (n - 1), p], axis=-1)

    return HamiltonianSystem(2, H, grad, _one_dof_jac(lambda q: (n - 1) * q ** (n - 2)), name=name)


def quartic_oscillator() -> HamiltonianSystem:
    """``H = p^2/2 + q^4/4`` (degree 4)."""
    return _power_oscillator(4, "quartic")


def sextic_oscillator() -> HamiltonianSystem:
    """``H = p^2/2 + q^6/6`` (degree 6)."""
    return _power_oscillator(6, "sextic")


def pendulum() -> HamiltonianSystem:
    """Nonlinear pendulum ``H = p^2/2 - cos q``; not polynomial."""

    def H(y):
        q, p = _split(y)
        return 0.5 * p * p - np.cos(q)

    def grad(y):
        q, p = _split(y)
        return np.stack([np.sin(q), p], axis=-1)

    return HamiltonianSystem(2, H, grad, _one_dof_jac(np.cos), name="pendulum")


def pendulum_exact(t, q0: float) -> np.ndarray:
    """Pendulum released at rest from angle ``q0`` (``|q0| < pi``), via Jacobi elliptic functions.

    ``q(t) = 2 arcsin(kappa sn(t + K))``, ``p(t) = 2 kappa cn(t + K)`` with
    ``kappa = sin(q0 / 2)`` and ``K`` the complete elliptic integral.
    """
    kappa = np.sin(0.5 * q0)
    m = kappa * kappa
    sn, cn, _, _ = ellipj(np.asarray(t, dtype=float) + ellipk(m), m)
    return np.stack([2.0 * np.arcsin(kappa * sn), 2.0 * kappa * cn], axis=-1)


PROBLEMS = {
    "harmonic": harmonic_oscillator,
    "quartic": quartic_oscillator,
    "sextic": sextic_oscillator,
    "pendulum": pendulum,
}

# polynomial degree of H, None when H is not a polynomial
HAMILTONIAN_DEGREE = {"harmonic": 2, "quartic": 4, "sextic": 6, "pendulum": None}


def get_problem(name: str) -> HamiltonianSystem:
    try:
        return PROBLEMS[name]()
    except KeyError:
        raise InvalidArgumentError(
            f"unknown problem {name!r}; choose from {', '.join(sorted(PROBLEMS))}") from None
