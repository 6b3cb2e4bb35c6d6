"""Reduction of the k-stage system to the s fundamental stages.

Stage indices are 0-based throughout.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import InvalidArgumentError, ParityError, PartitionRejectedError, SelectionError
from .tableau import HbvmTableau

# reciprocal condition of I_s1 below which a partition is rejected
_RCOND_MIN = 1e3 * np.finfo(float).eps


def select_fundamental(nodes, s: int, permissive: bool = False) -> list[int]:
    """Rule-of-thumb choice of the fundamental stages.

    For each target ``j / (s + 1)``, ``j = 1..s``, pick the closest node
    (ties go to the smaller index). ``k - s`` must be even so the choice
    is symmetric, and two targets sharing a closest node is an error.

    With ``permissive=True`` neither condition is fatal: targets are
    served in mirrored pairs from the outside in, each taking the closest
    unused node and handing its mirror image to the partner target when
    that node is free.
    """
    nodes = np.asarray(nodes, dtype=float)
    k = len(nodes)
    if not 1 <= s <= k:
        raise InvalidArgumentError(f"need 1 <= s <= k, got s={s}, k={k}")
    if k == s:
        return list(range(k))
    if (k - s) % 2 and not permissive:
        raise ParityError(f"k - s = {k - s} is odd; the selection would not be symmetric")

    targets = np.arange(1, s + 1) / (s + 1)
    chosen = [int(np.argmin(np.abs(nodes - target))) for target in targets]
    if len(set(chosen)) == s:
        return sorted(chosen)
    if not permissive:
        raise SelectionError(f"targets collide on nodes {chosen}")

    used = []

    def closest_free(target):
        dist = np.abs(nodes - target)
        dist[used] = np.inf
        used.append(int(np.argmin(dist)))
        return used[-1]

    for j in range(s // 2):
        i = closest_free(targets[j])
        mirror = k - 1 - i
        if mirror not in used:
            used.append(mirror)
        else:
            closest_free(targets[s - 1 - j])
    if s % 2:
        closest_free(targets[s // 2])
    return sorted(used)


def first_fundamental(k: int, s: int) -> list[int]:
    """The naive choice: the first s stages."""
    return list(range(s))


@dataclass(frozen=True, eq=False)
class StagePartition:
    """Blocks of the reduced problem for a given choice of fundamental stages.

    Silent stages follow from ``y2 = u_hat (x) y0 + A1 y1``, and the
    fundamental ones solve ``y1 = e (x) y0 + h [B1 f(y1) + B2 f(y2)]``.
    """

    tableau: HbvmTableau
    fund_idx: tuple
    silent_idx: tuple
    A1: np.ndarray
    u_hat: np.ndarray
    B1: np.ndarray
    B2: np.ndarray
    C: np.ndarray

    @property
    def k(self):
        return self.tableau.k

    @property
    def s(self):
        return self.tableau.s

    @property
    def fund_nodes(self):
        return self.tableau.nodes[list(self.fund_idx)]

    @property
    def silent_nodes(self):
        return self.tableau.nodes[list(self.silent_idx)]


def build_partition(tab: HbvmTableau, fund_idx) -> StagePartition:
    k, s = tab.k, tab.s
    fund = sorted(int(i) for i in fund_idx)
    if len(fund) != s or len(set(fund)) != s or fund[0] < 0 or fund[-1] >= k:
        raise InvalidArgumentError(f"need {s} distinct stage indices in [0, {k}), got {list(fund_idx)}")
    silent = [i for i in range(k) if i not in fund]

    I1, I2 = tab.mat_I[fund], tab.mat_I[silent]
    P1, P2 = tab.mat_P[fund], tab.mat_P[silent]
    w1, w2 = tab.weights[fund], tab.weights[silent]

    try:
        with np.errstate(divide="ignore", invalid="ignore"):
            rcond = 1.0 / np.linalg.cond(I1, 1)
    except np.linalg.LinAlgError:
        rcond = 0.0
    if not np.isfinite(rcond) or rcond < _RCOND_MIN:
        raise PartitionRejectedError(f"fundamental block is singular (rcond={rcond:.2e})")
    lu, piv = scipy.linalg.lu_factor(I1)
    # A1 = I2 @ inv(I1), via I1^T A1^T = I2^T
    A1 = scipy.linalg.lu_solve((lu, piv), I2.T, trans=1).T
    u_hat = 1.0 - A1.sum(axis=1)
    B1 = I1 @ (P1.T * w1)
    B2 = I1 @ (P2.T * w2)
    C = B1 + B2 @ A1
    return StagePartition(tab, tuple(fund), tuple(silent), A1, u_hat, B1, B2, C)


def rule_of_thumb_partition(tab: HbvmTableau) -> StagePartition:
    return build_partition(tab, select_fundamental(tab.nodes, tab.s))


def silent_from_fundamental(part: StagePartition, y0, y1_block) -> np.ndarray:
    """Silent stages ``u_hat (x) y0 + (A1 (x) I) y1`` as a ``(k-s, 2m)`` block."""
    y0 = np.asarray(y0)
    y1_block = np.asarray(y1_block)
    if y1_block.shape != (part.s,) + y0.shape:
        raise InvalidArgumentError(
            f"stage block has shape {y1_block.shape}, expected {(part.s,) + y0.shape}")
    return np.multiply.outer(part.u_hat, y0) + part.A1 @ y1_block


def all_stages(part: StagePartition, y0, y1_block) -> np.ndarray:
    """Full ``(k, 2m)`` stage block in tableau order."""
    y1_block = np.asarray(y1_block)
    out = np.empty((part.k,) + y1_block.shape[1:], dtype=np.result_type(y1_block, y0))
    out[list(part.fund_idx)] = y1_block
    out[list(part.silent_idx)] = silent_from_fundamental(part, y0, y1_block)
    return out


def condition_number(M) -> float:
    """2-norm condition number ``sigma_max / sigma_min``; ``inf`` when singular."""
    sv = np.linalg.svd(np.asarray(M, dtype=float), compute_uv=False)
    if sv[-1] == 0.0:
        return float("inf")
    return float(sv[0] / sv[-1])
