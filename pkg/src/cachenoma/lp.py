"""Feasibility of small linear systems in the four power variables.

Rate targets of the form ``C(a.p / (b.p + noise)) >= c`` become half-spaces
``(a - gamma b) . p >= gamma noise`` with ``gamma = 2**c - 1``.  Feasibility
is decided by a dense phase-1 simplex with Bland's rule.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence, Tuple

import numpy as np

PIVOT_TOL = 1e-12
PHASE1_TOL = 1e-10
N_VARS = 4


class ConditioningError(ArithmeticError):
    """The simplex could only continue through a pivot below ``PIVOT_TOL``."""


@dataclass(frozen=True)
class Halfspace:
    """``normal . p >= offset``."""

    normal: Tuple[float, float, float, float]
    offset: float

    def __post_init__(self):
        if len(self.normal) != N_VARS:
            raise ValueError("half-space normal must have 4 coefficients")
        if not (np.all(np.isfinite(self.normal)) and np.isfinite(self.offset)):
            raise ValueError("half-space coefficients must be finite")

    def slack(self, p) -> float:
        return float(np.dot(self.normal, p) - self.offset)


@dataclass(frozen=True)
class HalfspaceSystem:
    """Half-spaces plus the implicit ``p >= 0`` and ``sum(p) <= power_budget``."""

    halfspaces: Tuple[Halfspace, ...]
    power_budget: float
    meta: dict = field(default_factory=dict, compare=False)

    def tolerance(self) -> float:
        return 1e-9 * max(1.0, self.power_budget)

    def satisfied_by(self, p) -> bool:
        tol = self.tolerance()
        p = np.asarray(p, dtype=float)
        if np.any(p < -tol) or p.sum() > self.power_budget + tol:
            return False
        return all(h.slack(p) >= -tol for h in self.halfspaces)


def linearize(a: Sequence[float], b: Sequence[float], noise: float, c_target: float) -> Halfspace:
    if noise <= 0:
        raise ValueError("noise must be positive")
    if c_target < 0:
        raise ValueError("target spectral efficiency must be non-negative")
    gamma = 2.0 ** c_target - 1.0
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    return Halfspace(tuple(float(v) for v in a - gamma * b), float(gamma * noise))


def selector(indices: Sequence[int]) -> np.ndarray:
    v = np.zeros(N_VARS)
    v[list(indices)] = 1.0
    return v


def _phase1(A: np.ndarray, b: np.ndarray, n_struct: int):
    """Minimize the sum of artificials for ``A x = b, x >= 0`` (``b >= 0``).

    ``A`` already contains one slack column per row; rows whose slack has a
    +1 coefficient start with the slack basic, the rest get an artificial.
    Returns the phase-1 optimum and the basic solution.
    """
    m, n = A.shape
    basis = [-1] * m
    for r in range(m):
        col = n_struct + r
        if A[r, col] == 1.0:
            basis[r] = col
    need = [r for r in range(m) if basis[r] < 0]
    n_art = len(need)
    T = np.zeros((m + 1, n + n_art + 1))
    T[:m, :n] = A
    T[:m, -1] = b
    for k, r in enumerate(need):
        T[r, n + k] = 1.0
        basis[r] = n + k
    # reduced costs of the phase-1 objective
    for r in need:
        T[m, :] -= T[r, :]
    for k in range(n_art):
        T[m, n + k] = 0.0
    n_cols = n + n_art
    for _ in range(50 * (m + n_cols)):
        costs = T[m, :n_cols]
        entering = next((c for c in range(n_cols) if costs[c] < -PIVOT_TOL), None)
        if entering is None:
            break
        col = T[:m, entering]
        best, leave = None, None
        for r in range(m):
            if col[r] > PIVOT_TOL:
                ratio = T[r, -1] / col[r]
                if best is None or ratio < best - 1e-15 or (
                    abs(ratio - best) <= 1e-15 and basis[r] < basis[leave]
                ):
                    best, leave = ratio, r
        if leave is None:
            # phase 1 is bounded below, so a missing pivot is numerical
            raise ConditioningError(
                f"no pivot above {PIVOT_TOL:g} in column {entering} "
                f"(max entry {col.max():.3g})"
            )
        T[leave, :] /= T[leave, entering]
        for r in range(m + 1):
            if r != leave and T[r, entering] != 0.0:
                T[r, :] -= T[r, entering] * T[leave, :]
        basis[leave] = entering
    else:
        raise ConditioningError("simplex iteration limit reached")
    x = np.zeros(n_cols)
    for r, bcol in enumerate(basis):
        x[bcol] = T[r, -1]
    return -T[m, -1], x[:n_struct]


def feasible(system: HalfspaceSystem) -> Tuple[bool, Optional[np.ndarray]]:
    """Decide feasibility; on success also return a witness power vector."""
    P = system.power_budget
    rows, rhs = [], []
    for h in system.halfspaces:
        g = np.asarray(h.normal, dtype=float)
        off = h.offset / P  # variables are p / P
        scale = np.max(np.abs(g))
        if scale <= 1e-300:
            if off > PHASE1_TOL:
                return False, None
            continue
        rows.append(g / scale)
        rhs.append(off / scale)
    m = len(rows) + 1
    A = np.zeros((m, N_VARS + m))
    b = np.zeros(m)
    for r, (g, off) in enumerate(zip(rows, rhs)):
        # g.x - s = off; flip sign when off < 0 so the slack starts basic
        if off > 0:
            A[r, :N_VARS] = g
            A[r, N_VARS + r] = -1.0
            b[r] = off
        else:
            A[r, :N_VARS] = -g
            A[r, N_VARS + r] = 1.0
            b[r] = -off
    A[m - 1, :N_VARS] = 1.0
    A[m - 1, N_VARS + m - 1] = 1.0
    b[m - 1] = 1.0
    infeas, x = _phase1(A, b, N_VARS)
    if infeas > PHASE1_TOL:
        return False, None
    p = np.clip(x[:N_VARS], 0.0, None) * P
    if not system.satisfied_by(p):
        return False, None
    return True, p
