"""HBVM(k, s) Butcher tableaux and the spectral check against Gauss-Legendre."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidArgumentError, NumericalError
from .legendre import basis_eval_all, basis_integral_all, xi
from .quadrature import QuadratureRule, gauss_rule


@dataclass(frozen=True, eq=False)
class HbvmTableau:
    """Runge-Kutta form of HBVM(k, s).

    ``mat_I[i, j] = int_0^{t_i} P_j``, ``mat_P[i, j] = P_j(t_i)``, and the
    Butcher matrix is ``A = mat_I @ mat_P.T @ omega``.
    """

    k: int
    s: int
    rule: QuadratureRule
    mat_I: np.ndarray
    mat_P: np.ndarray
    omega: np.ndarray
    A: np.ndarray

    @property
    def nodes(self):
        return self.rule.nodes

    @property
    def weights(self):
        return self.rule.weights

    def extended_P(self):
        """``mat_P`` with the column ``P_{s+1}(t_i)`` appended."""
        return basis_eval_all(self.s + 1, self.rule.nodes)


def build_tableau(rule: QuadratureRule, s: int) -> HbvmTableau:
    k = rule.k
    if not 1 <= s <= k:
        raise InvalidArgumentError(f"need 1 <= s <= k, got s={s}, k={k}")
    mat_I = basis_integral_all(s, rule.nodes)
    mat_P = basis_eval_all(s, rule.nodes)
    omega = np.diag(rule.weights)
    A = mat_I @ (mat_P.T * rule.weights)
    for arr in (mat_I, mat_P, omega, A):
        arr.flags.writeable = False
    return HbvmTableau(k, s, rule, mat_I, mat_P, omega, A)


def hbvm_tableau(k: int, s: int) -> HbvmTableau:
    """Tableau on the k Gauss-Legendre nodes."""
    return build_tableau(gauss_rule(k), s)


def x_matrix(s: int) -> np.ndarray:
    """Tridiagonal matrix whose eigenvalues are those of the Gauss-s Butcher matrix."""
    if s < 1:
        raise InvalidArgumentError(f"s must be >= 1, got {s}")
    X = np.zeros((s, s))
    X[0, 0] = 0.5
    for j in range(1, s):
        X[j, j - 1] = xi(j)
        X[j - 1, j] = -xi(j)
    return X


def xhat_matrix(s: int) -> np.ndarray:
    """``x_matrix(s)`` with an extra last row ``(0, ..., 0, xi_s)``."""
    Xh = np.zeros((s + 1, s))
    Xh[:s] = x_matrix(s)
    Xh[s, s - 1] = xi(s)
    return Xh


def eigenvalues(M) -> np.ndarray:
    """All eigenvalues of a small dense real matrix (LAPACK ``geev``)."""
    M = np.asarray(M, dtype=float)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise InvalidArgumentError(f"square matrix required, got shape {M.shape}")
    try:
        return np.linalg.eigvals(M)
    except np.linalg.LinAlgError as exc:
        raise NumericalError(str(exc)) from exc


def pair_spectra(found, reference) -> float:
    """Greedy nearest-neighbour matching; returns the largest matched distance.

    Both multisets must have the same size.
    """
    found = list(np.asarray(found, dtype=complex))
    reference = np.asarray(reference, dtype=complex)
    if len(found) != len(reference):
        return float("inf")
    worst = 0.0
    for mu in reference:
        d = [abs(lam - mu) for lam in found]
        i = int(np.argmin(d))
        worst = max(worst, d[i])
        found.pop(i)
    return worst


@dataclass(frozen=True)
class SpectrumReport:
    k: int
    s: int
    eigenvalues: np.ndarray
    zero_count: int
    max_pairing_error: float
    tol: float

    @property
    def nonzero_count(self) -> int:
        return len(self.eigenvalues) - self.zero_count

    @property
    def passed(self) -> bool:
        return self.zero_count == self.k - self.s and self.max_pairing_error <= self.tol


def verify_isospectral(k: int, s: int, tol: float = 1e-9) -> SpectrumReport:
    """Check that A of HBVM(k, s) has k-s zero eigenvalues and the Gauss-s spectrum otherwise.

    Eigenvalues with ``|lam| <= tol * ||A||_2`` count as zero. A failed check
    is reported through ``SpectrumReport.passed``, not raised.
    """
    if not 1 <= s <= k:
        raise InvalidArgumentError(f"need k >= s >= 1, got k={k}, s={s}")
    A = hbvm_tableau(k, s).A
    lam = eigenvalues(A)
    is_zero = np.abs(lam) <= tol * np.linalg.norm(A, 2)
    zero_count = int(np.count_nonzero(is_zero))
    err = pair_spectra(lam[~is_zero], eigenvalues(x_matrix(s)))
    return SpectrumReport(k, s, lam, zero_count, err, tol)
