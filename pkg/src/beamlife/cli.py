"""Command line front end: run ensembles, compare scenarios, list presets.

Outputs are CSV tables plus a JSON manifest that echoes the resolved
configuration and the per-run seeds; re-running the same configuration
reproduces the files byte for byte, and a manifest can be fed back in as
a config file.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path

from . import __version__
from .allocation import InfeasibleAllocationError
from .config import ConfigError, load_config, preset, preset_description, preset_names
from .ensemble import compare_strategies, run_ensemble

ROUNDS_COLUMNS = ["round", "alive_fraction", "snr_db", "rate_bits", "residual_total_j", "surviving_runs"]


def _resolve_scenario(args):
    if args.config and args.preset:
        raise ConfigError("give either --config or --preset, not both")
    if args.config:
        cfg = load_config(args.config)
    elif args.preset:
        cfg = preset(args.preset)
    else:
        cfg = preset("pa-uniform")
    return cfg


def _fmt(value):
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _write_rounds_csv(path, result):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(ROUNDS_COLUMNS)
        for t in range(result.rounds):
            writer.writerow(
                [
                    t + 1,
                    _fmt(float(result.alive_fraction[t])),
                    _fmt(float(result.snr_db[t])),
                    _fmt(float(result.rate_total[t])),
                    _fmt(float(result.residual_total[t])),
                    int(result.surviving_runs[t]),
                ]
            )


def _write_summary_csv(path, result):
    summary = result.summary()
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(list(summary))
        writer.writerow([_fmt(v) for v in summary.values()])


def _write_manifest(path, cfg, runs, master_seed):
    manifest = {
        "artifact_version": __version__,
        "config": cfg.to_dict(),
        "runs": runs,
        "master_seed": master_seed,
        "run_seeds": [[master_seed, i] for i in range(runs)],
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _cmd_run(args):
    cfg = _resolve_scenario(args)
    runs = args.runs if args.runs is not None else cfg.runs
    seed = args.seed if args.seed is not None else cfg.master_seed
    result = run_ensemble(cfg, runs=runs, master_seed=seed, workers=args.workers)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    _write_rounds_csv(out / "rounds.csv", result)
    _write_summary_csv(out / "summary.csv", result)
    _write_manifest(out / "manifest.json", cfg, runs, seed)
    summary = result.summary()
    print(
        f"{runs} runs: mean lifetime {summary['lifetime_mean_rounds']:.1f} rounds, "
        f"mean wasted energy {summary['wasted_pct_mean']:.1f}% -> {out}"
    )
    return 0


def _cmd_compare(args):
    sources = []
    for name in args.preset or []:
        sources.append((name, preset(name)))
    for path in args.config or []:
        sources.append((Path(path).stem, load_config(path)))
    if len(sources) < 2:
        raise ConfigError("compare needs at least two scenarios (--preset/--config, repeatable)")
    labels = [name for name, _ in sources]
    scenarios = [cfg for _, cfg in sources]
    seed = args.seed if args.seed is not None else scenarios[0].master_seed
    runs = args.runs if args.runs is not None else scenarios[0].runs
    comparison = compare_strategies(
        scenarios, runs=runs, master_seed=seed, workers=args.workers, labels=labels
    )
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    for label, cfg, ensemble in zip(labels, scenarios, comparison.ensembles):
        sub = out / label
        sub.mkdir(parents=True, exist_ok=True)
        _write_rounds_csv(sub / "rounds.csv", ensemble)
        _write_summary_csv(sub / "summary.csv", ensemble)
        _write_manifest(sub / "manifest.json", cfg, runs, seed)
    with open(out / "comparison.csv", "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(
            ["scenario", "lifetime_mean_rounds", "lifetime_ratio", "wasted_pct_mean", "wasted_pct_delta"]
        )
        for i, label in enumerate(labels):
            writer.writerow(
                [
                    label,
                    _fmt(float(comparison.lifetime_means[i])),
                    _fmt(float(comparison.lifetime_ratios[i])),
                    _fmt(float(comparison.wasted_pct_means[i])),
                    _fmt(float(comparison.wasted_pct_deltas[i])),
                ]
            )
    for i, label in enumerate(labels):
        print(
            f"{label}: mean lifetime {comparison.lifetime_means[i]:.1f} rounds "
            f"(ratio {comparison.lifetime_ratios[i]:.2f}), "
            f"wasted {comparison.wasted_pct_means[i]:.1f}%"
        )
    return 0


def _cmd_presets(_args):
    width = max(len(name) for name in preset_names())
    for name in preset_names():
        print(f"{name:<{width}}  {preset_description(name)}")
    return 0


def build_parser():
    parser = argparse.ArgumentParser(
        prog="beamlife",
        description="Monte Carlo lifetime simulator for beamforming sensor clusters.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="run one scenario ensemble and write CSV tables")
    run_p.add_argument("--config", help="scenario config JSON (or a previous run manifest)")
    run_p.add_argument("--preset", help="named preset scenario (see 'presets')")
    run_p.add_argument("--out", required=True, help="output directory")
    run_p.add_argument("--runs", type=int, help="override the configured run count")
    run_p.add_argument("--seed", type=int, help="override the configured master seed")
    run_p.add_argument("--workers", type=int, default=1, help="parallel workers (does not affect results)")
    run_p.set_defaults(func=_cmd_run)

    cmp_p = sub.add_parser("compare", help="paired-seed comparison of two or more scenarios")
    cmp_p.add_argument("--preset", action="append", help="preset name (repeatable)")
    cmp_p.add_argument("--config", action="append", help="config path (repeatable)")
    cmp_p.add_argument("--out", required=True, help="output directory")
    cmp_p.add_argument("--runs", type=int, help="override the run count")
    cmp_p.add_argument("--seed", type=int, help="override the master seed")
    cmp_p.add_argument("--workers", type=int, default=1, help="parallel workers (does not affect results)")
    cmp_p.set_defaults(func=_cmd_compare)

    presets_p = sub.add_parser("presets", help="list the built-in scenario presets")
    presets_p.set_defaults(func=_cmd_presets)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except InfeasibleAllocationError as exc:
        print(f"infeasible allocation: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
