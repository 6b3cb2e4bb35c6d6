"""Gauss-Legendre rules on [0, 1] and interpolatory weights for arbitrary nodes."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidArgumentError, NumericalError
from .legendre import basis_eval_all, basis_eval_with_derivative

MAX_GAUSS_NODES = 200
_NEWTON_MAXITER = 100


@dataclass(frozen=True, eq=False)
class QuadratureRule:
    """Nodes ``t_1 < ... < t_k`` and weights ``w_i`` on [0, 1]."""

    nodes: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        nodes = np.array(self.nodes, dtype=float)
        weights = np.array(self.weights, dtype=float)
        if nodes.ndim != 1 or nodes.shape != weights.shape:
            raise InvalidArgumentError("nodes and weights must be 1-d arrays of equal length")
        nodes.flags.writeable = False
        weights.flags.writeable = False
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "weights", weights)

    @property
    def k(self) -> int:
        return len(self.nodes)

    def integrate(self, values):
        """Apply the rule to samples of shape ``(k, ...)``."""
        return np.tensordot(self.weights, np.asarray(values), axes=(0, 0))

    def __repr__(self):
        return f"QuadratureRule(k={self.k})"


def gauss_rule(k: int) -> QuadratureRule:
    """k-point Gauss-Legendre rule shifted to [0, 1].

    Nodes are the roots of the degree-k orthonormal shifted Legendre
    polynomial ``P_{k+1}``, found by Newton's method from Chebyshev-angle
    guesses. Weights come from the Christoffel function,
    ``w_i = 1 / sum_{j<=k} P_j(t_i)**2``.
    """
    if not isinstance(k, (int, np.integer)) or not 1 <= k <= MAX_GAUSS_NODES:
        raise InvalidArgumentError(f"k must be an integer in [1, {MAX_GAUSS_NODES}], got {k!r}")
    k = int(k)
    i = np.arange(1, k + 1)
    t = 0.5 * (1.0 - np.cos(np.pi * (4 * i - 1) / (4 * k + 2)))

    for _ in range(_NEWTON_MAXITER):
        p, dp = basis_eval_with_derivative(k + 1, t)
        step = p[:, k] / dp[:, k]
        t = t - step
        if np.max(np.abs(step)) <= 1e-15:
            break
    else:
        raise NumericalError(f"Newton iteration for {k} Gauss nodes did not converge")
    # one extra step after the stopping test costs nothing and lands on the rounding floor
    p, dp = basis_eval_with_derivative(k + 1, t)
    t = t - p[:, k] / dp[:, k]

    t = 0.5 * (t + (1.0 - t[::-1]))
    w = 1.0 / np.sum(basis_eval_all(k, t) ** 2, axis=-1)
    w = 0.5 * (w + w[::-1])
    return QuadratureRule(t, w)


def _check_nodes(nodes):
    if np.any(nodes <= 0.0) or np.any(nodes > 1.0):
        raise InvalidArgumentError("nodes must lie in (0, 1]")
    if len(np.unique(nodes)) != len(nodes):
        raise InvalidArgumentError("nodes must be distinct")


def interpolatory_weights(fund, silent=()):
    """Weights of the interpolatory rule on ``fund`` together with ``silent``.

    Each weight is the integral over [0, 1] of the cardinal Lagrange
    polynomial of its node, on the union of both node sets. Returns
    ``(beta, beta_hat)`` in the order the nodes were given.
    """
    fund = np.atleast_1d(np.asarray(fund, dtype=float))
    silent = np.atleast_1d(np.asarray(silent, dtype=float))
    nodes = np.concatenate([fund, silent])
    if len(fund) == 0:
        raise InvalidArgumentError("at least one fundamental node is required")
    _check_nodes(nodes)

    n = len(nodes)
    oracle = gauss_rule(n // 2 + 1)  # exactness 2*(n//2+1)-1 >= n-1
    x = oracle.nodes[:, None]
    weights = np.empty(n)
    for i in range(n):
        others = np.delete(nodes, i)
        card = np.prod((x - others) / (nodes[i] - others), axis=1)
        weights[i] = oracle.integrate(card)
    return weights[: len(fund)], weights[len(fund):]


def exactness_degree(rule: QuadratureRule, tol: float = 1e-11) -> int:
    """Largest ``d <= 2k+1`` such that every monomial ``t**e``, ``e <= d``, is integrated within ``tol``.

    Returns -1 if even the constant is not integrated correctly.
    """
    for d in range(2 * rule.k + 2):
        if abs(rule.integrate(rule.nodes ** d) - 1.0 / (d + 1)) > tol:
            return d - 1
    return 2 * rule.k + 1
