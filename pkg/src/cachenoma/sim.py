"""Experiment harness: channel drops, Monte-Carlo delivery times, region
sweeps, and the closed-form vs. brute-force verification run."""
from __future__ import annotations

import csv
import io
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields, replace
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from . import oracle, regions
from .delivery import min_delivery_time, noma_min_delivery_time, oma_min_delivery_time
from .model import (
    DISTANCE_FLOOR_KM,
    CacheConfig,
    ChannelState,
    dbm_to_watt,
    effective_noise,
    offload_load,
    split_files,
)

SCHEMES = ("proposed", "b2_cache", "b2_nocache", "b1", "b1_sum")
REGION_HEADER = ("scheme", "r_i", "r_j")
MC_HEADER = ("r_j_km", "scheme", "mean_t_s", "ci95_s")


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class ScenarioConfig:
    cell_radius_km: float = 2.0
    r_i_km: float = 0.2
    r_j_km: float = 0.6
    bandwidth_hz: float = 5e6
    noise_psd_dbm_hz: float = -172.6
    tx_power_dbm: float = 35.0
    v_a_bits: float = 4e9
    v_b_bits: float = 4e9
    c_ia: float = 0.2
    c_ib: float = 0.8
    c_ja: float = 0.8
    c_jb: float = 0.2
    drops: int = 500
    seed: Optional[int] = None
    pathloss_const_db: float = 128.1
    pathloss_slope_db: float = 37.6
    placement: str = "disc"
    # optional fixed channel for single-instance runs
    alpha_i: Optional[float] = None
    alpha_j: Optional[float] = None

    def __post_init__(self):
        if self.placement not in ("disc", "ring"):
            raise ConfigError(f"placement must be 'disc' or 'ring', got {self.placement!r}")
        for name in ("cell_radius_km", "r_i_km", "r_j_km", "bandwidth_hz"):
            if not getattr(self, name) > 0:
                raise ConfigError(f"{name} must be positive")
        if self.r_i_km > self.cell_radius_km or self.r_j_km > self.cell_radius_km:
            raise ConfigError("user discs must lie inside the cell")
        if self.drops < 1:
            raise ConfigError("drops must be at least 1")

    @property
    def noise_power_w(self) -> float:
        return dbm_to_watt(self.noise_psd_dbm_hz) * self.bandwidth_hz

    @property
    def power_w(self) -> float:
        return dbm_to_watt(self.tx_power_dbm)

    def cache(self) -> CacheConfig:
        try:
            return CacheConfig(self.c_ia, self.c_ib, self.c_ja, self.c_jb, self.v_a_bits, self.v_b_bits)
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc

    @classmethod
    def from_json(cls, path: str, **overrides) -> "ScenarioConfig":
        try:
            with open(path, encoding="utf-8") as fh:
                data = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        if not isinstance(data, dict):
            raise ConfigError("config must be a JSON object")
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ConfigError(f"unknown config fields: {sorted(unknown)}")
        data.update({k: v for k, v in overrides.items() if v is not None})
        try:
            return cls(**data)
        except TypeError as exc:
            raise ConfigError(str(exc)) from exc


def pathloss_db(d_km: float, cfg: ScenarioConfig) -> float:
    d = max(d_km, DISTANCE_FLOOR_KM)
    return cfg.pathloss_const_db + cfg.pathloss_slope_db * math.log10(d)


def drop_rng(seed: int, index: int) -> np.random.Generator:
    # one independent stream per drop index, shared across every R_j value
    return np.random.default_rng(np.random.SeedSequence([seed, index]))


def _distance(radius_km: float, u: float, placement: str) -> float:
    if placement == "ring":
        return radius_km
    return radius_km * math.sqrt(u)


@dataclass(frozen=True)
class Drop:
    channel: ChannelState
    cache: CacheConfig
    swapped: bool
    d_i_km: float
    d_j_km: float


def gen_drop(cfg: ScenarioConfig, rng: np.random.Generator) -> Drop:
    """Place both UEs, draw Rayleigh fading, and form the effective noise levels.

    UEs are labelled so that ``i`` is the stronger one; when the draw says
    otherwise, users and files swap labels together (cache rows included).
    """
    u_i, u_j = rng.random(2)
    h_i, h_j = rng.exponential(1.0, 2)
    d_i = _distance(cfg.r_i_km, u_i, cfg.placement)
    d_j = _distance(cfg.r_j_km, u_j, cfg.placement)
    sigma2 = cfg.noise_power_w
    a_i = effective_noise(h_i * 10 ** (-pathloss_db(d_i, cfg) / 10), sigma2)
    a_j = effective_noise(h_j * 10 ** (-pathloss_db(d_j, cfg) / 10), sigma2)
    cache = cfg.cache()
    swapped = a_i >= a_j
    if swapped:
        a_i, a_j, d_i, d_j = a_j, a_i, d_j, d_i
        cache = cache.swapped()
    ch = ChannelState(a_i, a_j, cfg.power_w, cfg.bandwidth_hz)
    return Drop(ch, cache, swapped, d_i, d_j)


@dataclass
class DropResult:
    alpha_i: float
    alpha_j: float
    times: Dict[str, float]
    region: str


def solve_drop(ch: ChannelState, cache: CacheConfig) -> DropResult:
    sol = min_delivery_time(ch, split_files(cache))
    cached = offload_load(cache, cached=True)
    full = offload_load(cache, cached=False)
    times = {
        "proposed": sol.delivery_time_s,
        "b2_cache": noma_min_delivery_time(ch, *cached).delivery_time_s,
        "b2_nocache": noma_min_delivery_time(ch, *full).delivery_time_s,
        "b1": oma_min_delivery_time(ch, *cached, form="max").delivery_time_s,
        "b1_sum": oma_min_delivery_time(ch, *cached, form="sum").delivery_time_s,
    }
    return DropResult(ch.alpha_i, ch.alpha_j, times, str(sol.region))


def _drop_task(args) -> DropResult:
    cfg, index = args
    drop = gen_drop(cfg, drop_rng(cfg.seed, index))
    return solve_drop(drop.channel, drop.cache)


def simulate(cfg: ScenarioConfig, workers: int = 1) -> List[DropResult]:
    if cfg.seed is None:
        raise ConfigError("a seed is required for Monte-Carlo runs")
    tasks = [(cfg, k) for k in range(cfg.drops)]
    if workers <= 1:
        return [_drop_task(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        # map preserves drop order regardless of completion order
        return list(pool.map(_drop_task, tasks, chunksize=8))


def summarize(results: Sequence[DropResult]) -> Dict[str, Tuple[float, float]]:
    out = {}
    for s in SCHEMES:
        t = np.array([r.times[s] for r in results])
        mean = float(t.mean())
        ci = 1.96 * float(t.std(ddof=1)) / math.sqrt(len(t)) if len(t) > 1 else 0.0
        out[s] = (mean, ci)
    return out


def parse_sweep(text: str) -> List[float]:
    """``START:STOP:STEPS`` -> ``STEPS`` evenly spaced values, ends included."""
    try:
        start, stop, steps = text.split(":")
        start, stop, steps = float(start), float(stop), int(steps)
    except ValueError as exc:
        raise ConfigError(f"bad sweep {text!r}, expected START:STOP:STEPS") from exc
    if steps < 1:
        raise ConfigError("sweep needs at least one step")
    if steps == 1:
        return [start]
    return [float(v) for v in np.linspace(start, stop, steps)]


def run_montecarlo(cfg: ScenarioConfig, rj_sweep: Sequence[float], workers: int = 1):
    """CSV rows ``(r_j_km, scheme, mean_t_s, ci95_s)`` for each swept R_j."""
    rows = []
    for rj in rj_sweep:
        res = simulate(replace(cfg, r_j_km=rj), workers=workers)
        for scheme, (mean, ci) in summarize(res).items():
            rows.append((rj, scheme, mean, ci))
    return rows


def run_region_sweep(alpha_i: float, alpha_j: float, power: float, grid: int = 200):
    """CSV rows ``(scheme, r_i, r_j)`` for the OMA, NOMA, and proposed frontiers."""
    ch = ChannelState(alpha_i, alpha_j, power)
    rows = []
    for name, front in (
        ("oma", regions.oma_frontier(ch, grid)),
        ("noma", regions.noma_frontier(ch, grid)),
        ("proposed", regions.sweep_region_frontier(ch, grid)),
    ):
        rows.extend((name, a, b) for a, b in front)
    return rows


def write_csv(rows: Iterable[Sequence], header: Sequence[str], path: Optional[str] = None) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([repr(v) if isinstance(v, float) else v for v in row])
    text = buf.getvalue()
    if path is not None:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    return text


# -- verification ----------------------------------------------------------

VERIFY_CHANNEL = ChannelState(0.1, 1.0, 2.0)


@dataclass
class VerifyReport:
    samples: int
    checked: int
    skipped_near_boundary: int
    agreements: int
    closed_only: List[Tuple[np.ndarray, np.ndarray]] = field(default_factory=list)
    oracle_only: List[Tuple[np.ndarray, np.ndarray]] = field(default_factory=list)
    cross_first_feasible: int = 0
    cross_first_checked: int = 0

    @property
    def disagreements(self) -> int:
        return len(self.closed_only) + len(self.oracle_only)

    def render(self, max_dump: int = 5) -> str:
        lines = [
            f"samples: {self.samples}",
            f"checked: {self.checked}",
            f"skipped (within margin of a boundary): {self.skipped_near_boundary}",
            f"agreements: {self.agreements}",
            f"disagreements: {self.disagreements}",
            f"  closed form achievable, oracle not: {len(self.closed_only)}",
            f"  oracle achievable, closed form not: {len(self.oracle_only)}",
            f"cross-first SINR pair feasible: {self.cross_first_feasible} of {self.cross_first_checked}",
        ]
        for label, items in (("closed-only", self.closed_only), ("oracle-only", self.oracle_only)):
            for r, p in items[:max_dump]:
                lines.append(
                    f"  {label}: p=({', '.join(f'{v:.17g}' for v in p)}) "
                    f"r=({', '.join(f'{v:.17g}' for v in r)})"
                )
        return "\n".join(lines) + "\n"


def _sample_rate(rng: np.random.Generator, p: np.ndarray, ch: ChannelState) -> np.ndarray:
    """Half the draws inside a random containing region, half anywhere below the clean rates."""
    if rng.random() < 0.5:
        regs = regions.containing_regions(p, ch)
        reg = regs[rng.integers(len(regs))]
        bs = regions.evaluate_bounds(reg, p, ch)
        r = np.asarray(bs.per_signal) * rng.random(4)
        for user, (a, b) in (("i", (0, 1)), ("j", (2, 3))):
            s = bs.sum_bound(user)
            if s is not None and r[a] + r[b] > s:
                r[[a, b]] *= s / (r[a] + r[b])
        return r
    alphas = np.array([ch.alpha_i, ch.alpha_i, ch.alpha_j, ch.alpha_j])
    return np.log2(1.0 + p / alphas) * rng.random(4) * 1.05


def _near_boundary(r, p, ch, delta) -> bool:
    for reg in regions.ALL_REGIONS:
        for g, h in regions.predicates(reg, ch):
            if abs(float(g @ p) - h) < delta:
                return True
    if abs(regions.union_margin(r, p, ch)) < delta:
        return True
    return abs(oracle.oracle_margin(r, p, ch)) < delta


def run_verify(samples: int, seed: int, delta: float = 1e-6, ch: ChannelState = VERIFY_CHANNEL,
               corrupt: bool = False) -> VerifyReport:
    """Compare the closed-form union against the brute-force oracle on random points.

    ``corrupt`` inflates one closed-form bound so the comparison has something
    to catch; it exists for testing the detector.
    """
    if samples < 1:
        raise ConfigError("samples must be at least 1")
    rng = np.random.default_rng(np.random.SeedSequence([seed, 0x5EC]))
    rep = VerifyReport(samples, 0, 0, 0)
    saved = None
    if corrupt:
        saved = regions._BOUNDS[(1, None)]
        b0 = saved[0]
        regions._BOUNDS[(1, None)] = (regions.Bound("i", b0.target, b0.num, ()),) + saved[1:]
    try:
        for _ in range(samples):
            p = rng.dirichlet(np.ones(5))[:4] * ch.power_budget
            r = _sample_rate(rng, p, ch)
            rep.cross_first_checked += 1
            rep.cross_first_feasible += oracle.cross_first_pair_feasible(p, ch)
            if _near_boundary(r, p, ch, delta):
                rep.skipped_near_boundary += 1
                continue
            rep.checked += 1
            closed, _ = regions.achievable(r, p, ch)
            brute = oracle.oracle_achievable(r, p, ch)
            if closed == brute:
                rep.agreements += 1
            elif closed:
                rep.closed_only.append((r, p))
            else:
                rep.oracle_only.append((r, p))
    finally:
        if saved is not None:
            regions._BOUNDS[(1, None)] = saved
    return rep
