"""Command-line interface for training, recall, and capacity benchmarks.

Exit codes: 0 success, 1 runtime or domain failure (with a diagnostic on
stderr), 2 usage errors such as unknown rules or invalid flag values.
Every run prints the fully resolved configuration, after merging built-in
defaults, an optional --preset, an optional --config file, and explicit
flags (later sources win), before doing any work.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import harness, rules
from .core import NetworkParams, as_pattern, distort, evolve, overlap, stability_margins
from .optim import DivergenceError
from .rules import DegenerateInputError, RuleSpec

__all__ = ["main", "build_parser"]

_EPILOG = """examples:
  hopnet train --rule hebbian --n 32 --p 3 --seed 7 --out net.json --patterns-out pats.json
  hopnet recall --net net.json --pattern pats.json --index 0 --flips 2 --seed 1
  hopnet grid --rule pseudo_inverse --preset desk --seed 0 --out grid.csv
  hopnet curve --grid grid.csv --eps 0.95 --out curve.csv
  hopnet compare --rules hebbian,krauth_mezard --preset desk --seed 0
"""


class UsageError(Exception):
    """Bad flag values or unreadable inputs; mapped to exit code 2."""


_HYPER_KEYS = ("lam", "alpha", "lr", "tol", "maxiter", "margin_k")
_PRESETS = {
    "desk": {"n": 32, "trials": 50, "p_min": 1, "p_max": 32, "k_min": 0, "k_max": 16, "eps": 0.95},
    "paper": {"n": 75, "trials": 100, "p_min": 1, "p_max": 75, "k_min": 1, "k_max": 37, "eps": 0.95},
}


def _on_off(value: str) -> bool:
    if value == "on":
        return True
    if value == "off":
        return False
    raise argparse.ArgumentTypeError("expected 'on' or 'off'")


def _add_rule_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--rule", help="learning rule (see 'hopnet train --help' for names)")
    p.add_argument("--sc", type=_on_off, default=None, metavar="on|off", help="self-coupling")
    p.add_argument("--lam", type=float, default=None, help="rule strength lambda")
    p.add_argument("--alpha", type=float, default=None, help="weight-decay coefficient")
    p.add_argument("--lr", type=float, default=None, help="learning rate")
    p.add_argument("--tol", type=float, default=None, help="stop when the last update max-norm falls below this")
    p.add_argument("--maxiter", type=int, default=None, help="iteration cap per pattern/batch/neuron")
    p.add_argument("--margin-k", type=float, default=None, help="normalized margin target (Gardner loop)")
    p.add_argument("--incremental", type=_on_off, default=None, metavar="on|off",
                   help="present patterns one at a time instead of full batches")
    p.add_argument("--newton", type=_on_off, default=None, metavar="on|off",
                   help="Newton-accelerate the squared-error rule")
    p.add_argument("--init-std", type=float, default=None, help="std of the random initial weights")


def _add_experiment_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--n", type=int, default=None, help="number of neurons")
    p.add_argument("--trials", type=int, default=None, help="trials per (p, k) cell")
    p.add_argument("--p-min", type=int, default=None)
    p.add_argument("--p-max", type=int, default=None)
    p.add_argument("--k-min", type=int, default=None)
    p.add_argument("--k-max", type=int, default=None)
    p.add_argument("--eps", type=float, default=None, help="mean-overlap threshold for the curve")
    p.add_argument("--seed", type=int, default=None, help="master seed")
    p.add_argument("--mode", choices=["async", "sync", "asynchronous", "synchronous"], default=None)
    p.add_argument("--max-sweeps", type=int, default=None)
    p.add_argument("--workers", type=int, default=None, help="worker processes (results are identical for any count)")
    p.add_argument("--config", default=None, help="JSON file of defaults for any of these flags")
    p.add_argument("--preset", choices=sorted(_PRESETS), default=None)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hopnet",
        description="Discrete Hopfield networks: train, recall, and benchmark learning rules.",
        epilog=_EPILOG,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    sub = parser.add_subparsers(dest="command", required=True)

    t = sub.add_parser("train", help="train one network and save it",
                       description="Train a network on sampled (or supplied) patterns and write it to a JSON file.")
    _add_rule_flags(t)
    t.add_argument("--n", type=int, default=None, help="number of neurons")
    t.add_argument("--p", type=int, default=None, help="number of patterns to sample")
    t.add_argument("--seed", type=int, default=None)
    t.add_argument("--patterns-in", default=None, help="JSON file of patterns to store instead of sampling")
    t.add_argument("--config", default=None, help="JSON file of defaults for any of these flags")
    t.add_argument("--out", required=True, help="output network JSON file")
    t.add_argument("--patterns-out", default=None, help="also save the stored patterns")

    r = sub.add_parser("recall", help="present a distorted pattern to a saved network",
                       description="Load a network, distort the reference pattern, evolve, and print the overlap.")
    r.add_argument("--net", required=True, help="network JSON file from 'hopnet train'")
    r.add_argument("--pattern", required=True, help="JSON pattern file (raw array or patterns document)")
    r.add_argument("--index", type=int, default=0, help="which pattern in the file")
    r.add_argument("--flips", type=int, default=0, help="distort the pattern by this many flips")
    r.add_argument("--seed", type=int, default=None, help="seed for the flip choice")
    r.add_argument("--mode", choices=["async", "sync", "asynchronous", "synchronous"], default="async")
    r.add_argument("--max-sweeps", type=int, default=100)
    r.add_argument("--state-out", default=None, help="save the final state as JSON")

    g = sub.add_parser("grid", help="run a (p, k) recall grid for one rule",
                       description="Run trials over every (p, k) cell and save all records.")
    _add_rule_flags(g)
    _add_experiment_flags(g)
    g.add_argument("--out", required=True, help="output file for the grid records")
    g.add_argument("--format", choices=["csv", "json"], default=None, help="default: from --out extension")

    c = sub.add_parser("curve", help="extract a capacity curve from a grid",
                       description="Extract p_eps(k) from a stored grid, or run a fresh one first.")
    _add_rule_flags(c)
    _add_experiment_flags(c)
    c.add_argument("--grid", default=None, help="stored grid file (otherwise a fresh grid is run)")
    c.add_argument("--out", default=None, help="output curve file")
    c.add_argument("--format", choices=["csv", "json"], default=None)

    m = sub.add_parser("compare", help="run the same grid for several rules",
                       description="Run one grid per rule on a shared configuration and tabulate curve areas.")
    _add_rule_flags(m)
    _add_experiment_flags(m)
    m.add_argument("--rules", required=True, help="comma-separated rule names")
    m.add_argument("--out-dir", default=None, help="write per-rule grid and curve CSV files here")

    return parser


def _load_json(path, what: str):
    try:
        with open(path) as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read {what} {path!r}: {exc}") from exc


def _merged_settings(args, flag_names) -> dict:
    """preset < config file < explicit flags; None means unset throughout."""
    merged: dict = {}
    preset = getattr(args, "preset", None)
    if preset:
        merged.update(_PRESETS[preset])
    config_path = getattr(args, "config", None)
    if config_path:
        doc = _load_json(config_path, "config file")
        if not isinstance(doc, dict):
            raise UsageError(f"config file {config_path!r} must hold a JSON object")
        unknown = set(doc) - set(flag_names)
        if unknown:
            raise UsageError(f"config file {config_path!r} has unknown keys: {sorted(unknown)}")
        merged.update(doc)
    for name in flag_names:
        value = getattr(args, name, None)
        if value is not None:
            merged[name] = value
    return merged


def _build_spec(settings) -> RuleSpec:
    rule = settings.get("rule")
    if not rule:
        raise UsageError("a --rule is required")
    try:
        kind = rules.normalize_rule_name(rule)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    overrides = {k: settings[k] for k in _HYPER_KEYS if settings.get(k) is not None}
    if settings.get("sc") is not None:
        overrides["self_coupling"] = settings["sc"]
    if settings.get("newton") is not None:
        overrides["newton"] = settings["newton"]
    return rules.default_spec(kind, incremental=settings.get("incremental"), **overrides)


_EXPERIMENT_KEYS = (
    "rule", "sc", "lam", "alpha", "lr", "tol", "maxiter", "margin_k", "incremental",
    "newton", "init_std", "n", "trials", "p_min", "p_max", "k_min", "k_max", "eps",
    "seed", "mode", "max_sweeps", "workers",
)


def _build_experiment(args) -> tuple[harness.ExperimentConfig, int]:
    settings = _merged_settings(args, _EXPERIMENT_KEYS)
    spec = _build_spec(settings)
    n = settings.get("n")
    if n is None:
        raise UsageError("--n is required (or use --preset / --config)")
    mode = {"sync": "synchronous", "async": "asynchronous"}.get(settings.get("mode"), settings.get("mode"))
    try:
        config = harness.ExperimentConfig(
            n=n,
            rule=spec,
            p_values=tuple(range(settings.get("p_min", 1), settings.get("p_max", n) + 1)),
            k_values=tuple(range(settings.get("k_min", 0), settings.get("k_max", n // 2) + 1)),
            trials=settings.get("trials", 50),
            epsilon=settings.get("eps", 0.95),
            master_seed=settings.get("seed", 0),
            mode=mode or "asynchronous",
            max_sweeps=settings.get("max_sweeps", 100),
            init_std=settings.get("init_std", 0.01),
        )
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    workers = settings.get("workers", 1)
    if workers < 1:
        raise UsageError("--workers must be at least 1")
    return config, workers


def _print_resolved(doc: dict) -> None:
    print("resolved configuration:")
    print(json.dumps(doc, indent=2, sort_keys=True))


def _experiment_doc(config: harness.ExperimentConfig, workers: int) -> dict:
    return {
        "rule": config.rule.to_dict(),
        "n": config.n,
        "p_values": [config.p_values[0], config.p_values[-1]],
        "k_values": [config.k_values[0], config.k_values[-1]],
        "trials": config.trials,
        "epsilon": config.epsilon,
        "master_seed": config.master_seed,
        "mode": config.mode,
        "max_sweeps": config.max_sweeps,
        "init_std": config.init_std,
        "workers": workers,
    }


def _save_network(path, params: NetworkParams, spec: RuleSpec) -> None:
    doc = {
        "kind": "hopnet-network-v1",
        "n": params.n,
        "self_coupling": params.self_coupling,
        "weights": params.weights.tolist(),
        "biases": params.biases.tolist(),
        "rule": spec.to_dict(),
    }
    with open(path, "w") as fh:
        json.dump(doc, fh, indent=1)
        fh.write("\n")


def _load_network(path) -> NetworkParams:
    doc = _load_json(path, "network file")
    try:
        params = NetworkParams(
            np.asarray(doc["weights"], dtype=np.float64),
            np.asarray(doc["biases"], dtype=np.float64),
            bool(doc["self_coupling"]),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise UsageError(f"network file {path!r} is malformed: {exc}") from exc
    return params.validate()


def _load_patterns_file(path) -> np.ndarray:
    doc = _load_json(path, "pattern file")
    if isinstance(doc, dict):
        doc = doc.get("patterns")
    arr = np.asarray(doc, dtype=np.float64)
    if arr.ndim == 1:
        arr = arr[None, :]
    if arr.ndim != 2:
        raise UsageError(f"pattern file {path!r} must hold a vector or a list of vectors")
    return arr


def cmd_train(args) -> int:
    keys = ("rule", "sc", "lam", "alpha", "lr", "tol", "maxiter", "margin_k",
            "incremental", "newton", "init_std", "n", "p", "seed")
    settings = _merged_settings(args, keys)
    spec = _build_spec(settings)
    seed = settings.get("seed", 0)
    init_std = settings.get("init_std", 0.01)
    rng = np.random.default_rng(seed)
    if args.patterns_in:
        patterns = _load_patterns_file(args.patterns_in)
        n = patterns.shape[1]
    else:
        n = settings.get("n")
        p = settings.get("p")
        if n is None or p is None:
            raise UsageError("--n and --p are required unless --patterns-in is given")
        if n < 1 or p < 1:
            raise UsageError("--n and --p must be positive")
        patterns = harness.sample_patterns(n, p, rng)
    _print_resolved({
        "rule": spec.to_dict(), "n": n, "p": int(patterns.shape[0]),
        "seed": seed, "init_std": init_std, "out": args.out,
    })
    params, report = rules.train(spec, patterns, n, seed=rng, init_std=init_std)
    _save_network(args.out, params, spec)
    if args.patterns_out:
        with open(args.patterns_out, "w") as fh:
            json.dump({"kind": "hopnet-patterns-v1", "patterns": patterns.tolist()}, fh, indent=1)
            fh.write("\n")
    margins = stability_margins(params, patterns)
    print(f"network written to {args.out}")
    print(f"converged: {report.converged}  sweeps_used: {report.sweeps_used}")
    print(f"min stability margin: {margins.min_raw!r}")
    return 0


def cmd_recall(args) -> int:
    if args.flips < 0:
        raise UsageError("--flips must be nonnegative")
    params = _load_network(args.net)
    patterns = _load_patterns_file(args.pattern)
    if not 0 <= args.index < patterns.shape[0]:
        raise UsageError(f"--index {args.index} out of range for {patterns.shape[0]} patterns")
    target = as_pattern(patterns[args.index], params.n)
    _print_resolved({
        "net": args.net, "pattern": args.pattern, "index": args.index,
        "flips": args.flips, "seed": args.seed, "mode": args.mode,
        "max_sweeps": args.max_sweeps,
    })
    probe = distort(target, args.flips, args.seed)
    outcome = evolve(params, probe, mode=args.mode, max_sweeps=args.max_sweeps)
    print(f"terminal: {outcome.terminal}  sweeps: {outcome.iterations}")
    print(f"overlap: {overlap(outcome.final_state, target)!r}")
    if args.state_out:
        with open(args.state_out, "w") as fh:
            json.dump({"kind": "hopnet-state-v1", "state": outcome.final_state.tolist()}, fh)
            fh.write("\n")
    return 0


def _output_format(path, explicit) -> str:
    if explicit:
        return explicit
    return "json" if str(path).endswith(".json") else "csv"


def cmd_grid(args) -> int:
    config, workers = _build_experiment(args)
    _print_resolved(_experiment_doc(config, workers))
    grid = harness.run_grid(config, workers=workers)
    fmt = _output_format(args.out, args.format)
    if fmt == "csv":
        harness.save_grid_csv(grid, args.out)
    else:
        harness.save_grid_json(grid, args.out)
    print(f"grid written to {args.out} ({len(grid.records)} records)")
    return 0


def cmd_curve(args) -> int:
    if args.grid:
        fmt = _output_format(args.grid, args.format)
        settings = _merged_settings(args, _EXPERIMENT_KEYS)
        epsilon = settings.get("eps", 0.95)
        _print_resolved({"grid": args.grid, "epsilon": epsilon, "out": args.out})
        try:
            grid = harness.load_grid_csv(args.grid) if fmt == "csv" else harness.load_grid_json(args.grid)
        except (OSError, ValueError) as exc:
            raise UsageError(f"cannot load grid {args.grid!r}: {exc}") from exc
    else:
        config, workers = _build_experiment(args)
        epsilon = config.epsilon
        _print_resolved(_experiment_doc(config, workers))
        grid = harness.run_grid(config, workers=workers)
    curve = harness.extract_curve(grid, epsilon)
    area = harness.curve_area(curve)
    print("k: " + " ".join(str(k) for k in curve.k_values))
    print("p_eps: " + " ".join(str(p) for p in curve.p_eps))
    print(f"curve area: {area}")
    if args.out:
        fmt = _output_format(args.out, args.format)
        if fmt == "csv":
            harness.save_curve_csv(curve, args.out)
        else:
            harness.save_curve_json(curve, args.out)
        print(f"curve written to {args.out}")
    return 0


def cmd_compare(args) -> int:
    names = [s for s in (part.strip() for part in args.rules.split(",")) if s]
    if not names:
        raise UsageError("--rules must list at least one rule")
    try:
        kinds = [rules.normalize_rule_name(name) for name in names]
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    base_config, workers = _build_experiment_for_compare(args, kinds[0])
    _print_resolved({**_experiment_doc(base_config, workers), "rules": kinds})
    rows = []
    for kind in kinds:
        args.rule = kind
        config, workers = _build_experiment_for_compare(args, kind)
        grid = harness.run_grid(config, workers=workers)
        curve = harness.extract_curve(grid, config.epsilon)
        rows.append((kind, harness.curve_area(curve)))
        if args.out_dir:
            import os

            os.makedirs(args.out_dir, exist_ok=True)
            harness.save_grid_csv(grid, os.path.join(args.out_dir, f"{kind}_grid.csv"))
            harness.save_curve_csv(curve, os.path.join(args.out_dir, f"{kind}_curve.csv"))
    width = max(len(kind) for kind, _ in rows)
    print(f"{'rule'.ljust(width)}  curve_area")
    for kind, area in rows:
        print(f"{kind.ljust(width)}  {area}")
    return 0


def _build_experiment_for_compare(args, kind: str) -> tuple[harness.ExperimentConfig, int]:
    args.rule = kind
    return _build_experiment(args)


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code else 0
    handlers = {
        "train": cmd_train,
        "recall": cmd_recall,
        "grid": cmd_grid,
        "curve": cmd_curve,
        "compare": cmd_compare,
    }
    try:
        return handlers[args.command](args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (DegenerateInputError, DivergenceError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (ValueError, OSError, np.linalg.LinAlgError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
