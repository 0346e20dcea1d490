"""Command line entry point: ``tagsurface <subcommand> [options]``."""

from __future__ import annotations

import argparse
import logging
import sys
import tempfile
from pathlib import Path

import numpy as np

from . import experiments as ex
from .gen2 import (
    Gen2Timing,
    config_switch_time,
    configuration_commands,
    inventory_power_trace,
    random_population,
)
from .loads import modulation_alphabet
from .optimizer import (
    BRUTE_FORCE_LIMIT,
    ElementTerms,
    brute_force,
    dump_instance,
    load_instance,
    optimize,
)
from .scenario import ScenarioConfig, link_budget, load_config

log = logging.getLogger("tagsurface")


def _floats(text: str) -> list[float]:
    return [float(x) for x in text.split(",") if x.strip()]


def _ints(text: str) -> list[int]:
    return [int(x) for x in text.split(",") if x.strip()]


def _scenario(args) -> ScenarioConfig:
    overrides = {"seed": args.seed, "trials": args.trials}
    if args.config:
        return load_config(args.config, **overrides)
    return ScenarioConfig(**{k: v for k, v in overrides.items() if v is not None})


def _report_text(report: ex.GainReport) -> str:
    with tempfile.TemporaryDirectory() as tmp:
        return ex.emit_csv(report, Path(tmp) / "report.csv").read_text()


def cmd_gain_vs_distance(args) -> int:
    cfg = _scenario(args)
    if args.elements is not None:
        cfg = cfg.replace(num_elements=args.elements)
    report = ex.run_gain_vs_distance(cfg, _floats(args.distances))
    _emit(report, args.out)
    return 0


def cmd_gain_vs_elements(args) -> int:
    cfg = _scenario(args)
    cfg = cfg.replace(d_sd=args.d_sd, d_ris_sd=args.d_ris_sd)
    report = ex.run_gain_vs_elements(cfg, _ints(args.elements), args.spacing)
    _emit(report, args.out)
    return 0


def cmd_csi_impact(args) -> int:
    cfg = ex.csi_scenario(_scenario(args))
    report = ex.run_csi_impact(cfg, _ints(args.elements))
    _emit(report, args.out)
    return 0


def cmd_random_search(args) -> int:
    cfg = _scenario(args)
    if args.elements is not None:
        cfg = cfg.replace(num_elements=args.elements)
    report = ex.run_random_search_experiment(cfg, _ints(args.mu), args.configs, args.repetitions)
    _emit(report, args.out)
    return 0


def cmd_optimize(args) -> int:
    terms = load_instance(args.instance)
    solution = optimize(terms)
    report = ex.GainReport("element", np.arange(terms.num_elements))
    report.columns["load"] = solution.config.astype(int)
    _emit(report, args.out)
    print(f"amplitude {solution.amplitude:.12g}", file=sys.stderr)
    return 0


def cmd_oracle_check(args) -> int:
    """Compare the sweep against exhaustive search on random instances."""
    rng = np.random.default_rng(np.random.SeedSequence(args.seed or 0))
    rows = []
    failures = 0
    for i in range(args.instances):
        m = int(rng.integers(1, args.max_elements + 1))
        if args.loads**m > BRUTE_FORCE_LIMIT:
            raise ValueError(f"{args.loads}**{m} exceeds the exhaustive search limit")
        shape = (m, args.loads)
        terms = ElementTerms(
            complex(rng.standard_normal(), rng.standard_normal()),
            rng.standard_normal(shape) + 1j * rng.standard_normal(shape),
        )
        fast = optimize(terms).amplitude
        exact = brute_force(terms).amplitude
        rel = abs(fast - exact) / exact if exact else abs(fast)
        ok = rel <= args.tolerance
        if not ok:
            failures += 1
            if args.dump_dir:
                path = Path(args.dump_dir) / f"instance_{i:05d}.txt"
                dump_instance(terms, path)
                log.error("instance %d failed, dumped to %s", i, path)
        rows.append((i, m, fast, exact, rel, int(ok)))
    report = ex.GainReport("instance", np.array([r[0] for r in rows], dtype=int))
    report.columns["num_elements"] = np.array([r[1] for r in rows], dtype=int)
    report.columns["sweep_amplitude"] = np.array([r[2] for r in rows])
    report.columns["brute_amplitude"] = np.array([r[3] for r in rows])
    report.columns["rel_error"] = np.array([r[4] for r in rows])
    report.columns["ok"] = np.array([r[5] for r in rows], dtype=int)
    _emit(report, args.out)
    print(f"{args.instances - failures}/{args.instances} instances agree", file=sys.stderr)
    return 1 if failures else 0


def cmd_trace(args) -> int:
    cfg = _scenario(args)
    rng = np.random.default_rng(np.random.SeedSequence(cfg.seed))
    channels = cfg.draw(rng)
    budget = link_budget(cfg)
    loads = cfg.binary_loads()
    population = random_population(cfg.num_elements, rng)
    if args.mu > cfg.num_elements:
        raise ValueError(f"mu cannot exceed M = {cfg.num_elements}")
    selected = sorted(rng.choice(cfg.num_elements, size=args.mu, replace=False).tolist())
    timing = Gen2Timing(blf=args.blf if args.blf is not None else cfg.blf)
    commands = configuration_commands(selected, population)
    log.info("%d Select commands, switch time %.4g s", len(commands), config_switch_time(max(1, args.mu), timing))
    trace = inventory_power_trace(
        selected, channels, budget.g0, budget.element_gains(loads), modulation_alphabet(loads),
        cfg.power, rng=rng, rounds=args.rounds, timing=timing,
    )
    out = args.out or "/dev/stdout"
    trace.to_csv(out)
    return 0


def _emit(report: ex.GainReport, out) -> None:
    if out:
        ex.emit_csv(report, out)
        log.info("wrote %s", out)
    else:
        sys.stdout.write(_report_text(report))


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="scenario config file (key = value, per-module sections)")
    common.add_argument("--seed", type=int, help="64-bit unsigned seed")
    common.add_argument("--trials", type=int, help="Monte Carlo trials per sweep point")
    common.add_argument("--out", help="CSV output path (default: stdout)")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="tagsurface", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gain-vs-distance", parents=[common], help="average gain vs SD-line distance")
    p.add_argument("--distances", default="0.5,1,2,3,4,5,7.5,10")
    p.add_argument("--elements", type=int)
    p.set_defaults(func=cmd_gain_vs_distance)

    p = sub.add_parser("gain-vs-elements", parents=[common], help="average gain vs surface size")
    p.add_argument("--elements", default="1,10,25,50,100,150,200,250")
    p.add_argument("--spacing", choices=("dense", "half_lambda"), default="half_lambda")
    p.add_argument("--d-sd", type=float, default=3.0)
    p.add_argument("--d-ris-sd", type=float, default=1.0)
    p.set_defaults(func=cmd_gain_vs_elements)

    p = sub.add_parser("csi-impact", parents=[common], help="true vs estimated CSI gain")
    p.add_argument("--elements", default="1,10,25,50,100,150,200")
    p.set_defaults(func=cmd_csi_impact)

    p = sub.add_parser("random-search", parents=[common], help="running best of random configurations")
    p.add_argument("--mu", default="1,5,10,25,50")
    p.add_argument("--configs", type=int, default=50)
    p.add_argument("--repetitions", type=int, default=3)
    p.add_argument("--elements", type=int)
    p.set_defaults(func=cmd_random_search)

    p = sub.add_parser("optimize", parents=[common], help="optimal configuration of a dumped instance")
    p.add_argument("instance")
    p.set_defaults(func=cmd_optimize)

    p = sub.add_parser("oracle-check", parents=[common], help="sweep vs exhaustive search")
    p.add_argument("--instances", type=int, default=200)
    p.add_argument("--loads", type=int, default=2)
    p.add_argument("--max-elements", type=int, default=12)
    p.add_argument("--tolerance", type=float, default=1e-9)
    p.add_argument("--dump-dir")
    p.set_defaults(func=cmd_oracle_check)

    p = sub.add_parser("trace", parents=[common], help="destination power trace of one configuration")
    p.add_argument("--mu", type=int, default=10)
    p.add_argument("--rounds", type=int, default=10)
    p.add_argument("--blf", type=float)
    p.set_defaults(func=cmd_trace)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except (ValueError, OSError) as exc:
        print(f"tagsurface {args.command}: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
