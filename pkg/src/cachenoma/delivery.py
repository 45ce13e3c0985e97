"""Delivery-time minimization for cache-aided NOMA and the two baselines.

The delivery time is ``T = max beta_ks / (W r_ks)``; writing ``rho = 1/T``,
each region is solved by bisection on ``rho`` where every step is an LP
feasibility problem over the powers (rate targets linearized per bound).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from . import lp
from .model import ChannelState, DeliveryLoad, capacity
from .regions import (
    ALL_REGIONS,
    DecodingOrder,
    RegionId,
    bounds,
    decoding_order,
    predicates,
)


class NoSolutionError(RuntimeError):
    pass


@dataclass(frozen=True)
class BisectionConfig:
    lb: float
    ub: float
    epsilon: float

    def __post_init__(self):
        if not (0 <= self.lb < self.ub):
            raise ValueError(f"need 0 <= lb < ub, got lb={self.lb}, ub={self.ub}")
        if not self.epsilon > 0:
            raise ValueError("epsilon must be positive")


def default_bracket(ch: ChannelState, user_loads: Sequence[float], rel_eps: float = 1e-6) -> BisectionConfig:
    """``[0, min_k W C(P/alpha_k) / beta_k]`` over UEs with data to receive.

    ``user_loads`` is ``(beta_i, beta_j)`` or a four-codeword load, which is
    summed per UE.  No scheme gives a UE more than its clean single-user rate,
    so the bound is valid and stays within a small factor of the optimum; that
    keeps ``rel_eps`` meaningful as a relative precision even in deep fades.
    """
    loads = [float(v) for v in user_loads]
    if len(loads) == 4:
        loads = [loads[0] + loads[1], loads[2] + loads[3]]
    if len(loads) != 2:
        raise ValueError("expected two per-UE loads or a four-codeword load")
    if any(b < 0 for b in loads):
        raise ValueError("bit loads must be non-negative")
    caps = [ch.bandwidth_hz * capacity(ch.power_budget / ch.alpha(u)) / b
            for u, b in zip(("i", "j"), loads) if b > 0]
    if not caps:
        raise ValueError("at least one codeword must carry data")
    # a hair above the bound so the top of the bracket is strictly infeasible
    ub = min(caps) * (1.0 + 1e-3)
    return BisectionConfig(0.0, ub, rel_eps * ub)


@dataclass
class BisectionResult:
    rho: float
    witness: Optional[np.ndarray]
    lb: float
    ub: float
    iterations: int

    @property
    def gap(self) -> float:
        return self.ub - self.lb


def bisect(build, cfg: BisectionConfig) -> BisectionResult:
    """Largest ``rho`` whose system ``build(rho)`` is feasible, to within ``cfg.epsilon``."""
    lb, ub = cfg.lb, cfg.ub
    ok, witness = lp.feasible(build(lb))
    if not ok:
        return BisectionResult(0.0, None, lb, ub, 0)
    it = 0
    while ub - lb >= cfg.epsilon:
        mid = 0.5 * (lb + ub)
        ok, w = lp.feasible(build(mid))
        if ok:
            lb, witness = mid, w
        else:
            ub = mid
        it += 1
    return BisectionResult(lb, witness, lb, ub, it)


def region_system(region: RegionId, ch: ChannelState, load: DeliveryLoad, rho: float) -> lp.HalfspaceSystem:
    beta = load.as_array()
    W = ch.bandwidth_hz
    hs = []
    for b in bounds(region):
        need = float(sum(beta[k] for k in b.target))
        if need <= 0:
            continue
        hs.append(lp.linearize(lp.selector(b.num), lp.selector(b.den),
                               ch.alpha(b.user), rho * need / W))
    for k in range(4):
        if beta[k] <= 0:
            hs.append(lp.Halfspace(tuple(-lp.selector([k])), 0.0))
    for g, h in predicates(region, ch):
        hs.append(lp.Halfspace(tuple(float(v) for v in g), float(h)))
    return lp.HalfspaceSystem(tuple(hs), ch.power_budget, {"region": region, "rho": rho})


def achieved_rho(region: RegionId, p: np.ndarray, ch: ChannelState, load: DeliveryLoad) -> float:
    """``1/T`` delivered by powers ``p`` with the region's bounds as rates."""
    beta = load.as_array()
    best = math.inf
    for b in bounds(region):
        need = float(sum(beta[k] for k in b.target))
        if need > 0:
            best = min(best, ch.bandwidth_hz * float(b.value(p, ch)) / need)
    return best


def _check_load(load: DeliveryLoad):
    beta = load.as_array()
    if np.any(beta < 0):
        raise ValueError("bit loads must be non-negative")
    if not np.any(beta > 0):
        raise ValueError("nothing to deliver: every requested bit is cached")


def rho_star_region(region: RegionId, ch: ChannelState, load: DeliveryLoad,
                    cfg: Optional[BisectionConfig] = None) -> BisectionResult:
    _check_load(load)
    cfg = cfg or default_bracket(ch, load)
    return bisect(lambda rho: region_system(region, ch, load, rho), cfg)


@dataclass
class DeliverySolution:
    delivery_time_s: float
    rho: float
    region: RegionId
    order: Tuple[DecodingOrder, DecodingOrder]
    p_star: np.ndarray
    r_star: np.ndarray
    per_region: Dict[RegionId, BisectionResult] = field(default_factory=dict, repr=False)
    epsilon: float = 0.0

    def summary(self) -> str:
        lines = [
            f"T* = {self.delivery_time_s:.6g} s  (rho* = {self.rho:.6g} 1/s)",
            f"region: {self.region}",
            f"order: {self.order[0]} ; {self.order[1]}",
            "p* = (" + ", ".join(f"{v:.6g}" for v in self.p_star) + ")",
            "r* = (" + ", ".join(f"{v:.6g}" for v in self.r_star) + ") bit/s/Hz",
        ]
        return "\n".join(lines)


def min_delivery_time(ch: ChannelState, load: DeliveryLoad,
                      cfg: Optional[BisectionConfig] = None) -> DeliverySolution:
    """Best region by bisection; rates are the smallest ones meeting the deadline.

    ``rho*`` is re-evaluated at the winning witness, so ``r* = rho* beta / W``
    fits inside the region's bounds and at least one bound is tight.
    """
    _check_load(load)
    cfg = cfg or default_bracket(ch, load)
    results = {reg: rho_star_region(reg, ch, load, cfg) for reg in ALL_REGIONS}
    best_reg, best_rho, best_p = None, 0.0, None
    for reg, res in results.items():
        if res.witness is None:
            continue
        rho = achieved_rho(reg, res.witness, ch, load)
        if rho > best_rho:
            best_reg, best_rho, best_p = reg, rho, res.witness
    if best_reg is None or best_rho <= 0:
        raise NoSolutionError("no region supports a positive delivery rate")
    beta = load.as_array()
    r_star = best_rho * beta / ch.bandwidth_hz
    p_star = np.where(beta > 0, best_p, 0.0)
    return DeliverySolution(
        delivery_time_s=1.0 / best_rho,
        rho=best_rho,
        region=best_reg,
        order=decoding_order(best_reg),
        p_star=p_star,
        r_star=r_star,
        per_region=results,
        epsilon=cfg.epsilon,
    )


# -- baselines -------------------------------------------------------------

@dataclass(frozen=True)
class OmaSolution:
    delivery_time_s: float
    tau: float


def oma_min_delivery_time(ch: ChannelState, beta_i: float, beta_j: float,
                          form: str = "max") -> OmaSolution:
    """TDMA: UE i gets a fraction ``tau`` of the time at full power.

    With ``mu_k = beta_k / (W C(P/alpha_k))``:

    * ``form="max"``: both UEs are served concurrently over time-shared
      slots, ``T(tau) = max(mu_i / tau, mu_j / (1 - tau))``, minimized at
      ``tau = mu_i / (mu_i + mu_j)`` with ``T = mu_i + mu_j``.
    * ``form="sum"``: ``T(tau) = mu_i / tau + mu_j / (1 - tau)``, minimized at
      ``tau = sqrt(mu_i) / (sqrt(mu_i) + sqrt(mu_j))`` with
      ``T = (sqrt(mu_i) + sqrt(mu_j))**2``.
    """
    if beta_i < 0 or beta_j < 0:
        raise ValueError("bit loads must be non-negative")
    if form not in ("max", "sum"):
        raise ValueError(f"unknown TDMA form {form!r}")
    W = ch.bandwidth_hz
    mu_i = beta_i / (W * capacity(ch.power_budget / ch.alpha_i))
    mu_j = beta_j / (W * capacity(ch.power_budget / ch.alpha_j))
    if mu_i + mu_j == 0:
        return OmaSolution(0.0, 0.5)
    if form == "max":
        return OmaSolution(mu_i + mu_j, mu_i / (mu_i + mu_j))
    si, sj = math.sqrt(mu_i), math.sqrt(mu_j)
    return OmaSolution((si + sj) ** 2, si / (si + sj))


@dataclass(frozen=True)
class NomaSolution:
    delivery_time_s: float
    p_i: float
    p_j: float
    rho: float


def noma_system(ch: ChannelState, beta_i: float, beta_j: float, rho: float) -> lp.HalfspaceSystem:
    # two-codeword NOMA on the (i2, j2) slots; the *1 slots are pinned to zero
    W = ch.bandwidth_hz
    hs = [lp.Halfspace((-1.0, 0.0, 0.0, 0.0), 0.0), lp.Halfspace((0.0, 0.0, -1.0, 0.0), 0.0)]
    if beta_i > 0:
        hs.append(lp.linearize(lp.selector([1]), np.zeros(4), ch.alpha_i, rho * beta_i / W))
    else:
        hs.append(lp.Halfspace((0.0, -1.0, 0.0, 0.0), 0.0))
    if beta_j > 0:
        hs.append(lp.linearize(lp.selector([3]), lp.selector([1]), ch.alpha_j, rho * beta_j / W))
    else:
        hs.append(lp.Halfspace((0.0, 0.0, 0.0, -1.0), 0.0))
    return lp.HalfspaceSystem(tuple(hs), ch.power_budget)


def noma_min_delivery_time(ch: ChannelState, beta_i: float, beta_j: float,
                           cfg: Optional[BisectionConfig] = None) -> NomaSolution:
    """Conventional NOMA: UE i removes x_B by SIC, UE j treats x_A as noise.

    Pass cache-offloaded loads for the cached variant and full file sizes
    for the uncached one.
    """
    if beta_i < 0 or beta_j < 0:
        raise ValueError("bit loads must be non-negative")
    if beta_i == 0 and beta_j == 0:
        return NomaSolution(0.0, 0.0, 0.0, math.inf)
    cfg = cfg or default_bracket(ch, [beta_i, beta_j])
    res = bisect(lambda rho: noma_system(ch, beta_i, beta_j, rho), cfg)
    if res.witness is None:
        raise NoSolutionError("NOMA baseline infeasible")
    p = res.witness
    W = ch.bandwidth_hz
    rates = []
    if beta_i > 0:
        rates.append(W * capacity(p[1] / ch.alpha_i) / beta_i)
    if beta_j > 0:
        rates.append(W * capacity(p[3] / (p[1] + ch.alpha_j)) / beta_j)
    rho = min(rates)
    return NomaSolution(1.0 / rho, float(p[1]), float(p[3]), rho)
