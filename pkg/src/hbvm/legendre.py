"""Orthonormal shifted-Legendre basis on [0, 1].

Indices are 1-based to match the usual notation: ``P_1 = 1``,
``P_2(t) = sqrt(3) (2t - 1)`` and ``P_j`` has degree ``j - 1``.
Every function accepts scalar or array ``t``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidIndexError


def xi(j: int) -> float:
    """Coupling coefficient ``1 / (2 sqrt((2j+1)(2j-1)))``."""
    if j < 1:
        raise InvalidIndexError(f"xi index must be >= 1, got {j}")
    return 0.5 / np.sqrt((2.0 * j + 1.0) * (2.0 * j - 1.0))


def _recurrence_coeffs(j):
    a = (2 * j + 1) / (j + 1) * np.sqrt((2 * j + 3) / (2 * j + 1))
    b = j / (j + 1) * np.sqrt((2 * j + 3) / (2 * j - 1))
    return a, b


def basis_eval_all(s: int, t):
    """Evaluate ``P_1..P_s`` at ``t`` in one recurrence pass.

    Returns an array of shape ``t.shape + (s,)``.
    """
    if s < 1:
        raise InvalidIndexError(f"number of basis functions must be >= 1, got {s}")
    t = np.asarray(t, dtype=float)
    out = np.empty(t.shape + (s,))
    out[..., 0] = 1.0
    if s > 1:
        x = 2.0 * t - 1.0
        out[..., 1] = np.sqrt(3.0) * x
        for j in range(1, s - 1):
            a, b = _recurrence_coeffs(j)
            out[..., j + 1] = a * x * out[..., j] - b * out[..., j - 1]
    return out


def basis_eval(j: int, t):
    """``P_j(t)`` via the three-term recurrence."""
    if j < 1:
        raise InvalidIndexError(f"basis index must be >= 1, got {j}")
    vals = basis_eval_all(j, t)[..., j - 1]
    return float(vals) if np.ndim(vals) == 0 else vals


def basis_eval_with_derivative(s: int, t):
    """Values and t-derivatives of ``P_1..P_s``; both of shape ``t.shape + (s,)``."""
    t = np.asarray(t, dtype=float)
    p = basis_eval_all(s, t)
    dp = np.zeros_like(p)
    if s > 1:
        x = 2.0 * t - 1.0
        dp[..., 1] = 2.0 * np.sqrt(3.0)
        for j in range(1, s - 1):
            a, b = _recurrence_coeffs(j)
            dp[..., j + 1] = a * (2.0 * p[..., j] + x * dp[..., j]) - b * dp[..., j - 1]
    return p, dp


def _antiderivative(s, t):
    # columns of P_{s+1} @ Xhat_s: the antiderivatives of P_j in the basis itself
    p = basis_eval_all(s + 1, t)
    out = np.empty(np.shape(t) + (s,))
    out[..., 0] = 0.5 * p[..., 0] + xi(1) * p[..., 1]
    for j in range(2, s + 1):
        out[..., j - 1] = -xi(j - 1) * p[..., j - 2] + xi(j) * p[..., j]
    return out


def basis_integral_all(s: int, c):
    """``int_0^c P_j(x) dx`` for ``j = 1..s``; shape ``c.shape + (s,)``."""
    if s < 1:
        raise InvalidIndexError(f"number of basis functions must be >= 1, got {s}")
    c = np.asarray(c, dtype=float)
    return _antiderivative(s, c) - _antiderivative(s, 0.0)


def basis_integral(j: int, c):
    """Exact ``int_0^c P_j(x) dx``, normalised so the value at ``c = 0`` is 0."""
    if j < 1:
        raise InvalidIndexError(f"basis index must be >= 1, got {j}")
    vals = basis_integral_all(j, c)[..., j - 1]
    return float(vals) if np.ndim(vals) == 0 else vals


@dataclass(frozen=True)
class OrthonormalBasis:
    """The first ``max_degree`` orthonormal shifted-Legendre polynomials."""

    max_degree: int
    xi: tuple = field(init=False)

    def __post_init__(self):
        if self.max_degree < 1:
            raise InvalidIndexError(f"max_degree must be >= 1, got {self.max_degree}")
        object.__setattr__(self, "xi", tuple(xi(j) for j in range(1, self.max_degree + 1)))

    def __call__(self, t):
        return basis_eval_all(self.max_degree, t)

    def integral(self, c):
        return basis_integral_all(self.max_degree, c)
