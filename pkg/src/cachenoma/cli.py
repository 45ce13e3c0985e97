"""Command-line entry point: ``cachenoma {region,delivery,mc,verify}``."""
from __future__ import annotations

import argparse
import sys
from dataclasses import replace
from typing import Optional, Sequence

from . import sim
from .delivery import min_delivery_time
from .model import CacheConfig, ChannelState, DegenerateChannelError, UnsupportedCaseError, split_files

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_DISAGREE = 3


def _parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="cachenoma", description="Cache-aided NOMA delivery tools")
    sub = ap.add_subparsers(dest="cmd", required=True)

    r = sub.add_parser("region", help="rate-region frontiers as CSV")
    r.add_argument("--alpha-i", type=float, required=True)
    r.add_argument("--alpha-j", type=float, required=True)
    r.add_argument("--power", type=float, required=True)
    r.add_argument("--grid", type=int, default=200)
    r.add_argument("--out", default=None, help="CSV path (stdout if omitted)")

    d = sub.add_parser("delivery", help="minimum delivery time for one channel")
    d.add_argument("--config", required=True)
    d.add_argument("--out", default=None)

    m = sub.add_parser("mc", help="Monte-Carlo mean delivery times over an R_j sweep")
    m.add_argument("--config", default=None)
    m.add_argument("--rj-sweep", required=True, help="START:STOP:STEPS in km")
    m.add_argument("--drops", type=int, default=None)
    m.add_argument("--seed", type=int, required=True)
    m.add_argument("--workers", type=int, default=1)
    m.add_argument("--out", default=None)

    v = sub.add_parser("verify", help="closed-form regions vs brute-force decoder")
    v.add_argument("--samples", type=int, default=10000)
    v.add_argument("--seed", type=int, required=True)
    v.add_argument("--delta", type=float, default=1e-6)
    return ap


def _emit(text: str, path: Optional[str]):
    if path is None:
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)


def _delivery_channel(cfg: sim.ScenarioConfig):
    """Fixed alphas from the config if both are given, else drop 0 of the seeded stream."""
    if cfg.alpha_i is not None and cfg.alpha_j is not None:
        ch = ChannelState(cfg.alpha_i, cfg.alpha_j, cfg.power_w, cfg.bandwidth_hz)
        return ch, cfg.cache()
    if cfg.seed is None:
        raise sim.ConfigError("delivery needs alpha_i and alpha_j, or a seed to draw a channel")
    drop = sim.gen_drop(cfg, sim.drop_rng(cfg.seed, 0))
    return drop.channel, drop.cache


def _run(args) -> int:
    if args.cmd == "region":
        if args.grid < 2:
            raise sim.ConfigError("grid must be at least 2")
        rows = sim.run_region_sweep(args.alpha_i, args.alpha_j, args.power, args.grid)
        _emit(sim.write_csv(rows, sim.REGION_HEADER), args.out)
        return EXIT_OK

    if args.cmd == "delivery":
        cfg = sim.ScenarioConfig.from_json(args.config)
        ch, cache = _delivery_channel(cfg)
        sol = min_delivery_time(ch, split_files(cache))
        head = f"alpha_i = {ch.alpha_i:.6g}, alpha_j = {ch.alpha_j:.6g}\n"
        _emit(head + sol.summary() + "\n", args.out)
        return EXIT_OK

    if args.cmd == "mc":
        if args.config is not None:
            cfg = sim.ScenarioConfig.from_json(args.config, drops=args.drops, seed=args.seed)
        else:
            cfg = sim.ScenarioConfig(seed=args.seed, **({"drops": args.drops} if args.drops else {}))
        sweep = sim.parse_sweep(args.rj_sweep)
        if max(sweep) > cfg.cell_radius_km or min(sweep) <= 0:
            raise sim.ConfigError("every R_j must lie in (0, cell radius]")
        rows = sim.run_montecarlo(cfg, sweep, workers=args.workers)
        _emit(sim.write_csv(rows, sim.MC_HEADER), args.out)
        return EXIT_OK

    if args.cmd == "verify":
        rep = sim.run_verify(args.samples, args.seed, delta=args.delta)
        sys.stdout.write(rep.render())
        return EXIT_DISAGREE if rep.disagreements else EXIT_OK

    raise AssertionError(args.cmd)


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = _parser().parse_args(argv)
    try:
        return _run(args)
    except (sim.ConfigError, UnsupportedCaseError, DegenerateChannelError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ValueError as exc:
        # bad numeric inputs (negative alphas, alpha_i >= alpha_j, ...) are config errors too
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
