"""Fixed-step HBVM(k, s) integration and the experiment drivers built on it."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from .blended import BlendedConfig, blended_solve
from .errors import HbvmError, InvalidArgumentError
from .partition import (
    StagePartition,
    all_stages,
    build_partition,
    first_fundamental,
    select_fundamental,
)
from .systems import HamiltonianSystem
from .tableau import hbvm_tableau

log = logging.getLogger(__name__)

SELECTIONS = ("rule-of-thumb", "first-s")


class UnmeasurableOrderError(HbvmError):
    """Some errors are already at rounding level, so no slope can be fitted."""


def make_partition(k: int, s: int, selection: str = "rule-of-thumb",
                   permissive: bool = True) -> StagePartition:
    """Tableau on k Gauss nodes plus a choice of fundamental stages.

    ``permissive`` lets the rule of thumb handle an odd ``k - s``; the
    step result does not depend on which stages are fundamental.
    """
    tab = hbvm_tableau(k, s)
    if selection == "rule-of-thumb":
        fund = select_fundamental(tab.nodes, s, permissive=permissive)
    elif selection == "first-s":
        fund = first_fundamental(k, s)
    else:
        raise InvalidArgumentError(f"unknown selection {selection!r}; choose from {SELECTIONS}")
    return build_partition(tab, fund)


def advance_step(part: StagePartition, system: HamiltonianSystem, y0, h: float,
                 cfg: BlendedConfig | None = None, return_stats: bool = False):
    """One HBVM step: ``y1 = y0 + h sum_l w_l f(Y_l)`` over all k stages."""
    y0 = np.asarray(y0, dtype=float)
    y1_block, stats = blended_solve(part, system, y0, h, cfg)
    stages = all_stages(part, y0, y1_block)
    y_new = y0 + h * (part.tableau.weights @ system.f(stages))
    return (y_new, stats) if return_stats else y_new


@dataclass
class IntegrationResult:
    times: np.ndarray
    states: np.ndarray
    energy: np.ndarray
    iterations: list = field(default_factory=list)
    failures: list = field(default_factory=list)

    @property
    def completed(self) -> bool:
        return not self.failures

    @property
    def final_state(self) -> np.ndarray:
        return self.states[-1]

    def energy_drift(self) -> np.ndarray:
        return np.abs(self.energy - self.energy[0])

    def max_energy_drift(self) -> float:
        return float(self.energy_drift().max())

    def max_relative_energy_drift(self) -> float:
        return self.max_energy_drift() / max(abs(self.energy[0]), np.finfo(float).tiny)


def _step_count(t_end, h):
    n = t_end / abs(h)
    return int(np.floor(n + 1e-9))


def integrate(system: HamiltonianSystem, y0, t_end: float, h: float, k: int, s: int,
              cfg: BlendedConfig | None = None, selection: str = "rule-of-thumb",
              part: StagePartition | None = None) -> IntegrationResult:
    """Fixed-step trajectory on ``[0, t_end]`` with ``floor(t_end / h)`` steps.

    A failed step is recorded in ``failures`` and ends the integration;
    the states computed so far are kept.
    """
    if h <= 0 or t_end < 0:
        raise InvalidArgumentError(f"need h > 0 and t_end >= 0, got h={h}, t_end={t_end}")
    if not 1 <= s <= k:
        raise InvalidArgumentError(f"need k >= s >= 1, got k={k}, s={s}")
    part = part or make_partition(k, s, selection)
    n = _step_count(t_end, h)

    y = np.asarray(y0, dtype=float)
    states = [y]
    iterations = []
    failures = []
    for i in range(n):
        try:
            y, stats = advance_step(part, system, y, h, cfg, return_stats=True)
        except HbvmError as exc:
            log.warning("step %d at t=%g failed: %s", i, i * h, exc)
            failures.append({"step": i, "time": i * h, "error": repr(exc)})
            break
        states.append(y)
        iterations.append(stats.iterations)
    states = np.array(states)
    times = h * np.arange(len(states))
    return IntegrationResult(times, states, np.asarray(system.energy(states)), iterations, failures)


def convergence_errors(system, y0, t_end, k, s, h_levels, exact=None, cfg=None):
    """Error at ``t_end`` for each step size.

    ``exact`` is the true final state; if omitted, the same method at the
    smallest step divided by 64 serves as reference.
    """
    h_levels = np.asarray(h_levels, dtype=float)
    part = make_partition(k, s)
    if exact is None:
        ref = integrate(system, y0, t_end, h_levels.min() / 64, k, s, cfg, part=part)
        exact = ref.final_state
    errors = []
    for h in h_levels:
        res = integrate(system, y0, t_end, h, k, s, cfg, part=part)
        if not res.completed or not np.isclose(res.times[-1], t_end):
            raise InvalidArgumentError(f"step {h} does not reach t_end={t_end} cleanly")
        errors.append(np.linalg.norm(res.final_state - exact))
    return h_levels, np.array(errors)


def observed_order(system, y0, t_end, k, s, h_levels, exact=None, cfg=None) -> float:
    """Least-squares slope of ``log(error)`` against ``log(h)``."""
    if len(h_levels) < 4:
        raise InvalidArgumentError("at least 4 step-size levels are needed")
    hs, errs = convergence_errors(system, y0, t_end, k, s, h_levels, exact, cfg)
    if errs.min() < 1e-13:
        raise UnmeasurableOrderError(
            f"errors reach rounding level ({errs.min():.1e} < 1e-13); use larger steps")
    slope, _ = np.polyfit(np.log(hs), np.log(errs), 1)
    return float(slope)


def reversibility_check(system, y0, n_steps: int, h: float, k: int, s: int,
                        cfg: BlendedConfig | None = None) -> float:
    """``||y_back - y0||`` after n steps with ``h`` followed by n steps with ``-h``."""
    part = make_partition(k, s)
    y = np.asarray(y0, dtype=float)
    for step in (h, -h):
        for _ in range(n_steps):
            y = advance_step(part, system, y, step, cfg)
    return float(np.linalg.norm(y - np.asarray(y0, dtype=float)))
