"""Closed-form achievable rate regions of cache-aided NOMA (Case I).

Each region couples a power-region predicate with a set of capacity bounds.
Every bound has the shape ``C(sum(p[num]) / (sum(p[den]) + alpha_k))`` and
every predicate is a half-space ``g . p >= h`` (closure of the strict set),
so the same table drives membership tests, rate evaluation, and the
linearized feasibility systems built by the optimizer.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .model import A1, A2, B1, B2, SIGNAL_NAMES, ChannelState, capacity, check_power

BOUNDARY_TOL = 1e-12


class RegionMismatchError(ValueError):
    pass


@dataclass(frozen=True)
class RegionId:
    n: int
    delta_branch: Optional[int] = None

    def __post_init__(self):
        if self.n not in range(1, 8):
            raise ValueError(f"region index must be in 1..7, got {self.n}")
        if (self.n == 6) != (self.delta_branch is not None):
            raise ValueError("delta_branch is required for region 6 and only for it")
        if self.delta_branch not in (None, 0, 1):
            raise ValueError("delta_branch must be 0 or 1")

    def __str__(self):
        if self.delta_branch is None:
            return f"R{self.n}"
        return f"R6(delta={self.delta_branch})"


ALL_REGIONS: Tuple[RegionId, ...] = (
    RegionId(1),
    RegionId(2),
    RegionId(3),
    RegionId(4),
    RegionId(5),
    RegionId(6, 1),
    RegionId(6, 0),
    RegionId(7),
)


@dataclass(frozen=True)
class Bound:
    """``r[target]`` (or the sum over ``target``) <= C(p[num] / (p[den] + alpha_user))."""

    user: str
    target: Tuple[int, ...]
    num: Tuple[int, ...]
    den: Tuple[int, ...]

    @property
    def is_sum(self) -> bool:
        return len(self.target) == 2

    def sinr(self, p: np.ndarray, ch: ChannelState):
        p = np.asarray(p, dtype=float)
        num = sum(p[..., k] for k in self.num)
        den = sum((p[..., k] for k in self.den), 0.0) + ch.alpha(self.user)
        return num / den

    def value(self, p, ch: ChannelState):
        return capacity(self.sinr(p, ch))


def _b(user, target, num, den=()):
    return Bound(user, tuple(target), tuple(num), tuple(den))


_BOUNDS: Dict[Tuple[int, Optional[int]], Tuple[Bound, ...]] = {
    (1, None): (
        _b("i", [A1], [A1], [A2, B2]),
        _b("i", [A2], [A2]),
        _b("j", [B1], [B1], [A2]),
        _b("j", [B2], [B2], [A2]),
        _b("j", [B1, B2], [B1, B2], [A2]),
    ),
    (2, None): (
        _b("i", [A1], [A1], [A2, B2]),
        _b("i", [A2], [A2], [B2]),
        _b("j", [B1], [B1]),
        _b("j", [B2], [B2], [A2, B1]),
    ),
    (3, None): (
        _b("i", [A1], [A1]),
        _b("i", [A2], [A2]),
        _b("i", [A1, A2], [A1, A2]),
        _b("j", [B1], [B1], [A2, B2]),
        _b("j", [B2], [B2], [A2]),
    ),
    (4, None): (
        _b("i", [A1], [A1], [B2]),
        _b("i", [A2], [A2], [A1, B2]),
        _b("j", [B1], [B1], [A2, B2]),
        _b("j", [B2], [B2]),
    ),
    (5, None): (
        _b("i", [A1], [A1]),
        _b("i", [A2], [A2]),
        _b("i", [A1, A2], [A1, A2]),
        _b("j", [B1], [B1], [A2]),
        _b("j", [B2], [B2], [A2, B1]),
    ),
    (6, 1): (
        _b("i", [A1], [A1], [B2]),
        _b("i", [A2], [A2], [A1, B2]),
        _b("j", [B1], [B1]),
        _b("j", [B2], [B2], [A2, B1]),
    ),
    (6, 0): (
        _b("i", [A1], [A1]),
        _b("i", [A2], [A2], [A1, B2]),
        _b("j", [B1], [B1]),
        _b("j", [B2], [B2], [A2, B1]),
    ),
    (7, None): (
        _b("i", [A1], [A1], [B2]),
        _b("i", [A2], [A2], [A1, B2]),
        _b("j", [B1], [B1]),
        _b("j", [B2], [B2]),
        _b("j", [B1, B2], [B1, B2]),
    ),
}


def bounds(region: RegionId) -> Tuple[Bound, ...]:
    return _BOUNDS[(region.n, region.delta_branch)]


def predicates(region: RegionId, ch: ChannelState) -> List[Tuple[np.ndarray, float]]:
    """Half-spaces ``(g, h)`` meaning ``g . p >= h`` that define the closure of P_n.

    Region 6 adds the branch condition on whether UE i can strip x_B2 before
    x_A1: that works when ``p_i2 >= p_i1 - p_j1 - (alpha_j - alpha_i)``, the
    ``delta = 0`` branch whose A1 bound has no x_B2 interference.
    """
    gap = ch.alpha_gap
    n = region.n
    out = []
    if n == 2:
        out.append((np.array([0.0, 0.0, -1.0, 1.0]), gap))
    elif n == 3:
        out.append((np.array([-1.0, 0.0, 0.0, 0.0]), -gap))
    elif n == 4:
        out.append((np.array([1.0, 0.0, 0.0, 0.0]), gap))
    elif n == 5:
        out.append((np.array([-1.0, 0.0, 1.0, 0.0]), -gap))
    elif n in (6, 7):
        out.append((np.array([1.0, 0.0, -1.0, 0.0]), gap))
    if n == 6:
        if region.delta_branch == 0:
            out.append((np.array([-1.0, 1.0, 1.0, 0.0]), -gap))
        else:
            out.append((np.array([1.0, -1.0, -1.0, 0.0]), gap))
    return out


def delta_indicator(p: Sequence[float], ch: ChannelState) -> int:
    """1 when x_B2 stays as interference for x_A1 at UE i, 0 when it can be cancelled."""
    p_i1, p_i2, p_j1, _ = p
    return int(p_i2 < p_i1 - p_j1 - ch.alpha_gap)


def power_region_contains(region: RegionId, p: Sequence[float], ch: ChannelState,
                          tol: float = BOUNDARY_TOL) -> bool:
    arr = np.asarray(p, dtype=float)
    return all(float(g @ arr) - h >= -tol for g, h in predicates(region, ch))


def containing_regions(p: Sequence[float], ch: ChannelState) -> List[RegionId]:
    return [reg for reg in ALL_REGIONS if power_region_contains(reg, p, ch)]


@dataclass(frozen=True)
class RateBoundSet:
    """Capacity bounds of one region at a fixed power allocation.

    ``per_signal`` follows the ``(i1, i2, j1, j2)`` layout; ``sum_i`` and
    ``sum_j`` are the joint-decoding bounds, ``None`` where the region has none.
    """

    per_signal: Tuple[float, float, float, float]
    sum_i: Optional[float] = None
    sum_j: Optional[float] = None

    def sum_bound(self, user: str) -> Optional[float]:
        return self.sum_i if user == "i" else self.sum_j

    def user_max(self, user: str) -> float:
        lo = 0 if user == "i" else 2
        total = self.per_signal[lo] + self.per_signal[lo + 1]
        s = self.sum_bound(user)
        return total if s is None else min(total, s)

    def contains(self, r: Sequence[float], tol: float = 1e-12) -> bool:
        r = np.asarray(r, dtype=float)
        if np.any(r < -tol):
            return False
        if np.any(r > np.asarray(self.per_signal) + tol):
            return False
        if self.sum_i is not None and r[0] + r[1] > self.sum_i + tol:
            return False
        if self.sum_j is not None and r[2] + r[3] > self.sum_j + tol:
            return False
        return True

    def margin(self, r: Sequence[float]) -> float:
        """Smallest slack over all bounds (negative when ``r`` lies outside)."""
        r = np.asarray(r, dtype=float)
        slack = list(np.asarray(self.per_signal) - r)
        if self.sum_i is not None:
            slack.append(self.sum_i - r[0] - r[1])
        if self.sum_j is not None:
            slack.append(self.sum_j - r[2] - r[3])
        return float(min(slack))


def evaluate_bounds(region: RegionId, p: Sequence[float], ch: ChannelState) -> RateBoundSet:
    """Bound values without the membership check (callers handle closure tolerance)."""
    arr = np.asarray(p, dtype=float)
    per = [0.0, 0.0, 0.0, 0.0]
    sums = {"i": None, "j": None}
    for b in bounds(region):
        v = float(b.value(arr, ch))
        if b.is_sum:
            sums[b.user] = v
        else:
            per[b.target[0]] = v
    return RateBoundSet(tuple(per), sums["i"], sums["j"])


def rate_bounds(region: RegionId, p: Sequence[float], ch: ChannelState) -> RateBoundSet:
    arr = check_power(p, ch)
    if not power_region_contains(region, arr, ch):
        raise RegionMismatchError(f"power allocation {arr} is not in {region}")
    return evaluate_bounds(region, arr, ch)


def achievable(r: Sequence[float], p: Sequence[float], ch: ChannelState,
               tol: float = 1e-12) -> Tuple[bool, Optional[RegionId]]:
    """Whether ``r`` lies in the union of regions whose power predicate holds at ``p``.

    Returns the first witnessing region in ``ALL_REGIONS`` order.
    """
    arr = check_power(p, ch)
    for reg in ALL_REGIONS:
        if power_region_contains(reg, arr, ch) and evaluate_bounds(reg, arr, ch).contains(r, tol):
            return True, reg
    return False, None


def union_margin(r: Sequence[float], p: Sequence[float], ch: ChannelState) -> float:
    """Signed distance-like margin of ``r`` to the union boundary at ``p``."""
    arr = np.asarray(p, dtype=float)
    return max(
        evaluate_bounds(reg, arr, ch).margin(r)
        for reg in ALL_REGIONS
        if power_region_contains(reg, arr, ch)
    )


# -- decoding orders -------------------------------------------------------

Step = object  # a signal name like "A1" or a jointly decoded pair ("B1", "B2")


@dataclass(frozen=True)
class DecodingOrder:
    user: str
    steps: Tuple[Step, ...]

    def __str__(self):
        parts = [s if isinstance(s, str) else "(" + ", ".join(s) + ")" for s in self.steps]
        return f"UE {self.user}: " + " -> ".join(parts)


_ORDERS = {
    (1, None): (("A1", "B2", "A2"), (("B1", "B2"),)),
    (2, None): (("A1", "A2"), ("B2", "A2", "B1")),
    (3, None): (("B2", ("A1", "A2")), ("B1", "B2")),
    (4, None): (("A2", "A1"), ("B1", "A2", "B2")),
    (5, None): (("B2", ("A1", "A2")), ("B2", "B1")),
    (6, 1): (("A2", "A1"), ("B2", "A2", "B1")),
    (6, 0): (("A2", "B2", "A1"), ("B2", "A2", "B1")),
    (7, None): (("A2", "A1"), ("A2", ("B1", "B2"))),
}


def decoding_order(region: RegionId) -> Tuple[DecodingOrder, DecodingOrder]:
    """SIC order at each UE that achieves the region's bounds (after CIC)."""
    oi, oj = _ORDERS[(region.n, region.delta_branch)]
    return DecodingOrder("i", oi), DecodingOrder("j", oj)


# -- frontier sweep --------------------------------------------------------

SPLIT_STEPS = 101


def rate_uniform_axis(alpha: float, power: float, points: int) -> np.ndarray:
    """Powers in ``[0, power]`` whose interference-free rates ``C(x/alpha)`` are evenly spaced."""
    top = float(capacity(power / alpha))
    x = alpha * (2.0 ** (np.linspace(0.0, top, points)) - 1.0)
    x[-1] = power
    return x


def pareto_front(points: np.ndarray) -> np.ndarray:
    """Pareto-maximal rows of an ``(n, 2)`` array, sorted by the first column."""
    pts = np.asarray(points, dtype=float).reshape(-1, 2)
    if len(pts) == 0:
        return pts
    order = np.lexsort((-pts[:, 1], -pts[:, 0]))
    pts = pts[order]
    keep = []
    best = -np.inf
    for k in range(len(pts)):
        if pts[k, 1] > best:
            keep.append(k)
            best = pts[k, 1]
    return pts[keep][::-1]


def _vector_user_rates(region: RegionId, P: np.ndarray, ch: ChannelState):
    per = {}
    sums = {}
    for b in bounds(region):
        v = np.log2(1.0 + b.sinr(P, ch))
        if b.is_sum:
            sums[b.user] = v
        else:
            per[b.target[0]] = v
    r_i = per[A1] + per[A2]
    r_j = per[B1] + per[B2]
    if "i" in sums:
        r_i = np.minimum(r_i, sums["i"])
    if "j" in sums:
        r_j = np.minimum(r_j, sums["j"])
    return r_i, r_j


def _vector_contains(region: RegionId, P: np.ndarray, ch: ChannelState) -> np.ndarray:
    mask = np.ones(P.shape[0], dtype=bool)
    for g, h in predicates(region, ch):
        mask &= P @ g - h >= -BOUNDARY_TOL
    return mask


def sweep_region_frontier(ch: ChannelState, grid_points_per_axis: int = 200) -> List[Tuple[float, float]]:
    """Pareto frontier of per-user sum rates ``(r_i, r_j)`` over the union of regions.

    The full budget is split between the users along a grid whose strong-user
    rates are evenly spaced, and each user's power is split between its two
    codewords in ``SPLIT_STEPS`` steps.  Each region's user rates at a fixed
    power allocation form a box, so only its corner is kept.
    """
    if grid_points_per_axis < 2:
        raise ValueError("grid_points_per_axis must be at least 2")
    P = ch.power_budget
    xs = rate_uniform_axis(ch.alpha_i, P, grid_points_per_axis)
    theta = np.linspace(0.0, 1.0, SPLIT_STEPS)
    ti, tj = np.meshgrid(theta, theta, indexing="ij")
    ti, tj = ti.ravel(), tj.ravel()
    slices = []
    for x in xs:
        rest = max(P - x, 0.0)
        pw = np.column_stack([ti * x, (1 - ti) * x, tj * rest, (1 - tj) * rest])
        cand = []
        for reg in ALL_REGIONS:
            mask = _vector_contains(reg, pw, ch)
            if not mask.any():
                continue
            r_i, r_j = _vector_user_rates(reg, pw[mask], ch)
            cand.append(np.column_stack([r_i, r_j]))
        slices.append(pareto_front(np.vstack(cand)))
    front = pareto_front(np.vstack(slices))
    return [(float(a), float(b)) for a, b in front]


def noma_frontier(ch: ChannelState, grid_points_per_axis: int = 200) -> List[Tuple[float, float]]:
    """Conventional two-signal NOMA frontier on the same strong-user power axis."""
    P = ch.power_budget
    xs = rate_uniform_axis(ch.alpha_i, P, grid_points_per_axis)
    r_i = np.log2(1.0 + xs / ch.alpha_i)
    r_j = np.log2(1.0 + np.maximum(P - xs, 0.0) / (xs + ch.alpha_j))
    return [(float(a), float(b)) for a, b in zip(r_i, r_j)]


def oma_frontier(ch: ChannelState, grid_points_per_axis: int = 200) -> List[Tuple[float, float]]:
    """Time-sharing frontier ``(tau C(P/alpha_i), (1 - tau) C(P/alpha_j))``."""
    tau = np.linspace(0.0, 1.0, grid_points_per_axis)
    ci = capacity(ch.power_budget / ch.alpha_i)
    cj = capacity(ch.power_budget / ch.alpha_j)
    return [(float(t * ci), float((1 - t) * cj)) for t in tau]


def frontier_at(front: Sequence[Tuple[float, float]], r_i: float, tol: float = 1e-9) -> float:
    """Largest ``r_j`` among frontier points with at least ``r_i`` for UE i (0 if none)."""
    best = 0.0
    for a, b in front:
        if a >= r_i - tol and b > best:
            best = b
    return best


__all__ = [
    "ALL_REGIONS",
    "Bound",
    "DecodingOrder",
    "RateBoundSet",
    "RegionId",
    "RegionMismatchError",
    "SIGNAL_NAMES",
    "achievable",
    "bounds",
    "containing_regions",
    "decoding_order",
    "delta_indicator",
    "evaluate_bounds",
    "frontier_at",
    "noma_frontier",
    "oma_frontier",
    "pareto_front",
    "power_region_contains",
    "predicates",
    "rate_bounds",
    "sweep_region_frontier",
    "union_margin",
]
