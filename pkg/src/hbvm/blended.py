"""Blended iteration for the reduced HBVM stage equations, and its linear convergence analysis.

Stage blocks are arrays of shape ``(s, 2m)``: row ``i`` is stage ``i``.
In that layout ``(C kron J0) y`` is ``C @ y @ J0.T`` and the weight
``theta = I_s kron inv(Phi)`` acts row by row, so only the ``2m x 2m``
matrix ``Phi = I - h gamma J0`` is ever factored.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .errors import (
    ConvergenceError,
    InvalidArgumentError,
    InvalidSpectrumError,
    PoleError,
    StepRejectedError,
)
from .partition import StagePartition, silent_from_fundamental
from .systems import HamiltonianSystem
from .tableau import eigenvalues


# ---------------------------------------------------------------------------
# linear analysis on y' = lambda y, q = h lambda


def gamma_opt(spectrum) -> float:
    """Optimal blending parameter: the smallest modulus in the spectrum."""
    mu = np.asarray(spectrum, dtype=complex).ravel()
    if mu.size == 0:
        raise InvalidSpectrumError("empty spectrum")
    if np.any(mu == 0):
        raise InvalidSpectrumError("spectrum contains a zero eigenvalue")
    return float(np.min(np.abs(mu)))


def rho_star(spectrum, gamma: float) -> float:
    """Maximum amplification factor over the imaginary axis, ``max |mu - gamma|^2 / (2 gamma |mu|)``."""
    if gamma <= 0:
        raise InvalidArgumentError(f"gamma must be positive, got {gamma}")
    mu = np.asarray(spectrum, dtype=complex).ravel()
    return float(np.max(np.abs(mu - gamma) ** 2 / (2.0 * gamma * np.abs(mu))))


def rho_star_optimal(spectrum) -> float:
    """``1 - cos(arg mu_min)``, the value of rho_star at the optimal gamma."""
    mu = np.asarray(spectrum, dtype=complex).ravel()
    mu_min = mu[np.argmin(np.abs(mu))]
    return float(1.0 - np.cos(np.angle(mu_min)))


def iteration_matrix_Z(C, gamma: float, q: complex) -> np.ndarray:
    """``Z(q) = q / (1 - gamma q)^2 * inv(C) (C - gamma I)^2``."""
    C = np.asarray(C, dtype=float)
    denom = (1.0 - gamma * q) ** 2
    if abs(denom) == 0.0:
        raise PoleError(f"q = 1/gamma = {q} is a pole of the iteration matrix")
    try:
        Cg = C - gamma * np.eye(len(C))
        core = np.linalg.solve(C, Cg @ Cg)
    except np.linalg.LinAlgError as exc:
        raise InvalidArgumentError("C is singular") from exc
    return (q / denom) * core


def spectral_radius(M) -> float:
    return float(np.max(np.abs(np.linalg.eigvals(M))))


def amplification_grid(gamma: float, grid_size: int = 200) -> np.ndarray:
    """Points ``y > 0`` (for ``q = i y``): a log grid on [1e-3, 1e3] plus a refinement around ``1/gamma``."""
    if grid_size < 16:
        raise InvalidArgumentError(f"grid_size must be >= 16, got {grid_size}")
    base = np.logspace(-3.0, 3.0, grid_size)
    peak = (1.0 / gamma) * np.logspace(-0.05, 0.05, 21)
    return np.unique(np.concatenate([base, peak, [1.0 / gamma]]))


def max_amplification(C, gamma: float, grid_size: int = 200) -> float:
    """Largest ``rho(Z(i y))`` over :func:`amplification_grid`."""
    return max(spectral_radius(iteration_matrix_Z(C, gamma, 1j * y))
               for y in amplification_grid(gamma, grid_size))


@dataclass(frozen=True)
class LinearAnalysis:
    spectrum_C: np.ndarray
    gamma: float
    rho_star: float
    q_grid: np.ndarray
    rho: np.ndarray

    @property
    def max_rho(self) -> float:
        return float(self.rho.max())


def linear_analysis(C, gamma: float | None = None, grid_size: int = 200) -> LinearAnalysis:
    mu = eigenvalues(C)
    if gamma is None:
        gamma = gamma_opt(mu)
    ys = amplification_grid(gamma, grid_size)
    rho = np.array([spectral_radius(iteration_matrix_Z(C, gamma, 1j * y)) for y in ys])
    return LinearAnalysis(mu, gamma, rho_star(mu, gamma), 1j * ys, rho)


# ---------------------------------------------------------------------------
# the blended iteration


class Mode(enum.Enum):
    LINEARIZED = "linearized"
    NONLINEAR = "nonlinear"


@dataclass(frozen=True)
class BlendedConfig:
    """Solver settings. ``gamma=None`` means the optimal value for the partition's C."""

    gamma: float | None = None
    max_outer: int = 50
    max_inner: int = 50
    rtol: float = 1e-14
    atol: float = 1e-16
    mode: Mode = Mode.NONLINEAR

    def __post_init__(self):
        if self.gamma is not None and not self.gamma > 0:
            raise InvalidArgumentError(f"gamma must be positive, got {self.gamma}")
        if self.max_outer < 1 or self.max_inner < 1:
            raise InvalidArgumentError("iteration caps must be >= 1")
        if self.rtol < 0 or self.atol < 0 or (self.rtol == 0 and self.atol == 0):
            raise InvalidArgumentError("tolerances must be >= 0 and not both zero")
        object.__setattr__(self, "mode", Mode(self.mode))


@dataclass
class SolveStats:
    iterations: int = 0
    outer_iterations: int = 0
    f_evals: int = 0
    residuals: list = field(default_factory=list)
    gamma: float = float("nan")


class BlendedOperator:
    """The pieces of one blended step: C, inv(C), gamma, h, J0 and the LU factors of Phi.

    Works for real or complex stage blocks, so the same code runs the
    Hamiltonian solver and the scalar test equation.
    """

    def __init__(self, C, gamma: float, h: float, jac0):
        self.C = np.asarray(C, dtype=float)
        self.Cinv = np.linalg.inv(self.C)
        self.gamma = float(gamma)
        self.h = h
        self.jac0 = np.atleast_2d(jac0)
        phi = np.eye(len(self.jac0)) - h * self.gamma * self.jac0
        if not np.all(np.isfinite(phi)):
            raise StepRejectedError("Phi = I - h gamma J0 is not finite")
        try:
            with np.errstate(divide="ignore", invalid="ignore"):
                cond = np.linalg.cond(phi)
        except np.linalg.LinAlgError:
            cond = np.inf
        if not np.isfinite(cond) or cond > 1.0 / np.finfo(float).eps:
            raise StepRejectedError("Phi = I - h gamma J0 is singular")
        self._lu = scipy.linalg.lu_factor(phi)

    def theta(self, block):
        """Apply ``I_s kron inv(Phi)``."""
        return scipy.linalg.lu_solve(self._lu, block.T, check_finite=False).T

    def newton_matvec(self, d):
        """``(I - h C kron J0) d``."""
        return d - self.h * (self.C @ d @ self.jac0.T)

    def scaled_matvec(self, d):
        """``gamma (inv(C) kron I - h I kron J0) d``."""
        return self.gamma * (self.Cinv @ d - self.h * (d @ self.jac0.T))

    def blend(self, a, b):
        """``theta a + (I - theta) b``."""
        return b + self.theta(a - b)

    def M(self, d):
        return self.blend(self.newton_matvec(d), self.scaled_matvec(d))

    def rhs(self, residual):
        """``psi`` built from ``psi1 = -F`` and ``psi2 = -gamma inv(C) F``."""
        return self.blend(-residual, -self.gamma * (self.Cinv @ residual))

    def sweep(self, delta, psi):
        """One linear blended step ``delta - theta (M delta - psi)``."""
        return delta - self.theta(self.M(delta) - psi)

    def nonlinear_update(self, residual):
        """Correction ``theta psi(y)`` of the nonlinear variant (one sweep from a zero increment)."""
        return self.theta(self.rhs(residual))


def error_propagation_matrix(C, gamma: float, q: complex) -> np.ndarray:
    """Observed error map of one blended sweep on ``y' = lambda y`` with ``h lambda = q``.

    Built column by column by running the sweep on unit errors; it should
    equal :func:`iteration_matrix_Z`.
    """
    s = len(C)
    op = BlendedOperator(C, gamma, 1.0, np.array([[q]]))
    newton = np.eye(s) - q * np.asarray(C)
    cols = []
    for e in np.eye(s, dtype=complex):
        err = e[:, None]
        # F(y) = (I - qC)(y - y*), so start from zero increment with psi = -F
        cols.append((err + op.nonlinear_update(newton @ err))[:, 0])
    return np.array(cols).T


def residual_F(part: StagePartition, system: HamiltonianSystem, y0, h: float, y1_block) -> np.ndarray:
    """Residual of the reduced stage equations, shape ``(s, 2m)``."""
    y0 = np.asarray(y0, dtype=float)
    y1_block = np.asarray(y1_block, dtype=float)
    if y1_block.shape != (part.s, system.dim) or y0.shape != (system.dim,):
        raise InvalidArgumentError(
            f"expected y0 of shape ({system.dim},) and stages of shape ({part.s}, {system.dim})")
    y2 = silent_from_fundamental(part, y0, y1_block)
    incr = part.B1 @ system.f(y1_block)
    if part.k > part.s:
        incr = incr + part.B2 @ system.f(y2)
    return y1_block - y0 - h * incr


_FLOOR = 64 * np.finfo(float).eps


def _norm(x):
    return float(np.max(np.abs(x))) if x.size else 0.0


def blended_solve(part: StagePartition, system: HamiltonianSystem, y0, h: float,
                  cfg: BlendedConfig | None = None, y1_guess=None, jac0=None):
    """Solve the reduced stage equations by blended iteration.

    Returns ``(y1_block, stats)`` with ``||F(y1)|| <= rtol ||y1|| + atol``
    (max norms). ``h`` may be negative, which integrates backwards.
    Raises :class:`StepRejectedError` if Phi is singular and
    :class:`ConvergenceError` when the iteration cap is reached.
    """
    cfg = cfg or BlendedConfig()
    y0 = np.asarray(y0, dtype=float)
    gamma = cfg.gamma if cfg.gamma is not None else gamma_opt(eigenvalues(part.C))
    if jac0 is None:
        jac0 = system.jacobian(y0)
    op = BlendedOperator(part.C, gamma, h, jac0)
    y1 = np.tile(y0, (part.s, 1)) if y1_guess is None else np.array(y1_guess, dtype=float)
    stats = SolveStats(gamma=gamma)

    def evaluate(y):
        stats.f_evals += 1
        res = residual_F(part, system, y0, h, y)
        norm = _norm(res)
        scale = _norm(y)
        done = norm <= cfg.rtol * scale + cfg.atol
        # tolerances below rounding level: accept once the residual stops shrinking there
        if not done and stats.residuals and norm <= _FLOOR * scale:
            done = norm >= 0.5 * stats.residuals[-1]
        stats.residuals.append(norm)
        return res, done

    res, done = evaluate(y1)
    if cfg.mode is Mode.NONLINEAR:
        while not done:
            if stats.iterations >= cfg.max_inner:
                raise ConvergenceError(
                    f"blended iteration did not converge in {cfg.max_inner} sweeps",
                    stats.residuals[-1], stats.iterations)
            y1 = y1 + op.nonlinear_update(res)
            stats.iterations += 1
            res, done = evaluate(y1)
        return y1, stats

    while not done:
        if stats.outer_iterations >= cfg.max_outer:
            raise ConvergenceError(
                f"simplified Newton did not converge in {cfg.max_outer} outer iterations",
                stats.residuals[-1], stats.iterations)
        psi = op.rhs(res)
        delta = np.zeros_like(y1)
        for _ in range(cfg.max_inner):
            new = op.sweep(delta, psi)
            stats.iterations += 1
            change = _norm(new - delta)
            delta = new
            if change <= cfg.rtol * _norm(delta) + cfg.atol:
                break
        y1 = y1 + delta
        stats.outer_iterations += 1
        res, done = evaluate(y1)
    return y1, stats


def contraction_factor(residuals, lo: float = 1e-11, hi: float = 1e-2) -> float:
    """Geometric-mean ratio of successive residuals while ``lo < r / r0 < hi``.

    The window skips the transient start and the rounding floor, leaving
    the asymptotic rate of a linearly converging iteration.
    """
    r = np.asarray(residuals, dtype=float)
    rel = r / r[0]
    idx = np.flatnonzero((rel > lo) & (rel < hi))
    if len(idx) < 2:
        raise InvalidArgumentError("not enough residuals inside the measurement window")
    i0, i1 = idx[0], idx[-1]
    return float((r[i1] / r[i0]) ** (1.0 / (i1 - i0)))
