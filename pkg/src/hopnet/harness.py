"""Reproducible recall-capacity experiments.

One trial stores p random patterns with a configured rule, distorts the
first stored pattern by exactly k flips, lets the network evolve, and
records the overlap between the final state and the intended pattern.  A
grid sweeps (p, k) cells with a fixed number of trials per cell; the
recall-capacity curve p_eps(k) is the largest pattern count whose mean
overlap stays at or above the threshold eps for every smaller count.

Every trial derives its own seed as SHA-256 over the ASCII string
"master_seed:p:k:trial_index" (first 8 bytes, big-endian, top bit cleared),
so results do not depend on execution order or on how many worker
processes computed them.
"""

from __future__ import annotations

import csv
import hashlib
import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .core import distort, evolve, overlap
from .optim import DivergenceError
from .rules import DegenerateInputError, RuleSpec, train

__all__ = [
    "ExperimentConfig",
    "TrialRecord",
    "GridResult",
    "CurveResult",
    "desk_config",
    "paper_scale_config",
    "derive_trial_seed",
    "sample_patterns",
    "run_trial",
    "run_grid",
    "extract_curve",
    "curve_area",
    "save_grid_csv",
    "load_grid_csv",
    "save_grid_json",
    "load_grid_json",
    "save_curve_csv",
    "load_curve_csv",
    "save_curve_json",
    "load_curve_json",
]

GRID_CSV_HEADER = ("rule", "N", "p", "k", "trial", "seed", "overlap", "iterations", "converged")
CURVE_CSV_HEADER = ("k", "p_eps")


@dataclass
class ExperimentConfig:
    """Full description of one capacity experiment."""

    n: int
    rule: RuleSpec
    p_values: tuple[int, ...]
    k_values: tuple[int, ...]
    trials: int
    epsilon: float = 0.95
    master_seed: int = 0
    mode: str = "asynchronous"
    max_sweeps: int = 100
    init_std: float = 0.01

    def __post_init__(self):
        self.p_values = tuple(int(p) for p in self.p_values)
        self.k_values = tuple(int(k) for k in self.k_values)
        if self.n < 1:
            raise ValueError("n must be at least 1")
        if not self.p_values or not self.k_values:
            raise ValueError("p_values and k_values must be non-empty")
        if any(not 1 <= p <= self.n for p in self.p_values):
            raise ValueError(f"every p must lie in [1, {self.n}]")
        if any(not 0 <= k <= self.n // 2 for k in self.k_values):
            raise ValueError(f"every k must lie in [0, {self.n // 2}]")
        if self.trials < 1:
            raise ValueError("trials must be at least 1")
        if not 0.0 < self.epsilon <= 1.0:
            raise ValueError("epsilon must lie in (0, 1]")
        if self.master_seed < 0:
            raise ValueError("master_seed must be nonnegative")
        if self.max_sweeps < 1:
            raise ValueError("max_sweeps must be at least 1")
        if self.init_std < 0:
            raise ValueError("init_std must be nonnegative")


def desk_config(rule: RuleSpec, **overrides) -> ExperimentConfig:
    """Desk-scale defaults: N=32, 50 trials, p in 1..32, k in 0..16."""
    base = dict(
        n=32,
        rule=rule,
        p_values=tuple(range(1, 33)),
        k_values=tuple(range(0, 17)),
        trials=50,
        epsilon=0.95,
    )
    base.update(overrides)
    return ExperimentConfig(**base)


def paper_scale_config(rule: RuleSpec, **overrides) -> ExperimentConfig:
    """Publication-scale defaults: N=75, 100 trials, p in 1..75, k in 1..37."""
    base = dict(
        n=75,
        rule=rule,
        p_values=tuple(range(1, 76)),
        k_values=tuple(range(1, 38)),
        trials=100,
        epsilon=0.95,
    )
    base.update(overrides)
    return ExperimentConfig(**base)


def derive_trial_seed(master_seed: int, p: int, k: int, trial_index: int) -> int:
    """Splittable per-trial seed: SHA-256("master:p:k:t")[:8] as a 63-bit integer."""
    msg = f"{master_seed}:{p}:{k}:{trial_index}".encode("ascii")
    digest = hashlib.sha256(msg).digest()
    return int.from_bytes(digest[:8], "big") & ((1 << 63) - 1)


def sample_patterns(n: int, p: int, seed) -> np.ndarray:
    """p random patterns of length n, each spin +-1 with probability 1/2, as rows."""
    if n < 1 or p < 1:
        raise ValueError("n and p must be at least 1")
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    return rng.integers(0, 2, size=(p, n)).astype(np.float64) * 2.0 - 1.0


@dataclass
class TrialRecord:
    p: int
    k_flips: int
    trial_index: int
    seed: int
    overlap: float
    iterations: int
    converged: bool


@dataclass
class GridResult:
    """All trial records of one (p, k) sweep plus the per-cell mean overlaps."""

    rule: str
    n: int
    p_values: tuple[int, ...]
    k_values: tuple[int, ...]
    trials: int
    records: list[TrialRecord]
    mean_overlap: np.ndarray = field(init=False)

    def __post_init__(self):
        self.p_values = tuple(self.p_values)
        self.k_values = tuple(self.k_values)
        self.mean_overlap = self._compute_means()

    def _compute_means(self) -> np.ndarray:
        p_index = {p: i for i, p in enumerate(self.p_values)}
        k_index = {k: j for j, k in enumerate(self.k_values)}
        sums = np.zeros((len(self.p_values), len(self.k_values)))
        counts = np.zeros_like(sums)
        for rec in self.records:
            i, j = p_index[rec.p], k_index[rec.k_flips]
            sums[i, j] += rec.overlap
            counts[i, j] += 1
        if np.any(counts == 0):
            raise ValueError("grid records do not cover every (p, k) cell")
        return sums / counts

    def mean_overlap_at(self, p: int, k: int) -> float:
        return float(self.mean_overlap[self.p_values.index(p), self.k_values.index(k)])


@dataclass
class CurveResult:
    """p_eps per k: the recall-capacity curve extracted from a grid."""

    rule: str
    n: int
    epsilon: float | None
    k_values: tuple[int, ...]
    p_eps: tuple[int, ...]

    def __post_init__(self):
        self.k_values = tuple(int(k) for k in self.k_values)
        self.p_eps = tuple(int(p) for p in self.p_eps)


def run_trial(config: ExperimentConfig, p: int, k: int, trial_index: int) -> TrialRecord:
    """One store-distort-recall trial; deterministic in (config, p, k, trial_index).

    The per-trial generator drives pattern sampling, then weight
    initialization, then the distortion choice.  A rule that rejects its
    input (rank-deficient patterns, divergent series) yields a record with
    converged=False and the overlap of the unevolved probe rather than
    aborting the sweep.
    """
    seed = derive_trial_seed(config.master_seed, p, k, trial_index)
    rng = np.random.default_rng(seed)
    patterns = sample_patterns(config.n, p, rng)
    target = patterns[0]
    try:
        params, _ = train(config.rule, patterns, config.n, seed=rng, init_std=config.init_std)
    except (DegenerateInputError, DivergenceError, np.linalg.LinAlgError):
        return TrialRecord(
            p, k, trial_index, seed, 1.0 - 2.0 * k / config.n, 0, False
        )
    probe = distort(target, k, rng)
    outcome = evolve(params, probe, mode=config.mode, max_sweeps=config.max_sweeps)
    return TrialRecord(
        p,
        k,
        trial_index,
        seed,
        overlap(outcome.final_state, target),
        outcome.iterations,
        outcome.terminal == "fixed_point",
    )


def _run_cell(args) -> list[TrialRecord]:
    config, p, k = args
    return [run_trial(config, p, k, t) for t in range(config.trials)]


def run_grid(config: ExperimentConfig, workers: int = 1) -> GridResult:
    """Run every (p, k, trial) combination; identical output for any worker count."""
    if workers < 1:
        raise ValueError("workers must be at least 1")
    cells = [(config, p, k) for p in config.p_values for k in config.k_values]
    if workers == 1:
        per_cell = [_run_cell(cell) for cell in cells]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            per_cell = list(pool.map(_run_cell, cells, chunksize=4))
    records = [rec for cell in per_cell for rec in cell]
    return GridResult(
        rule=config.rule.kind,
        n=config.n,
        p_values=config.p_values,
        k_values=config.k_values,
        trials=config.trials,
        records=records,
    )


def extract_curve(grid: GridResult, epsilon: float) -> CurveResult:
    """First-crossing capacity: the largest p whose prefix of mean overlaps stays >= eps.

    For each k, walks the grid's p values in increasing order and stops at
    the first cell whose mean overlap falls below epsilon; the curve value
    is the previous p (0 if the smallest p already fails).
    """
    if not 0.0 < epsilon <= 1.0:
        raise ValueError("epsilon must lie in (0, 1]")
    p_sorted = sorted(grid.p_values)
    curve = []
    for k in grid.k_values:
        best = 0
        for p in p_sorted:
            if grid.mean_overlap_at(p, k) >= epsilon:
                best = p
            else:
                break
        curve.append(best)
    return CurveResult(grid.rule, grid.n, epsilon, tuple(grid.k_values), tuple(curve))


def curve_area(curve: CurveResult) -> int:
    """Sum of p_eps over k: a single-number summary used to compare rules."""
    return int(sum(curve.p_eps))


def _format_float(x: float) -> str:
    return format(float(x), ".17g")


def _canonical_records(grid: GridResult) -> list[TrialRecord]:
    return sorted(grid.records, key=lambda r: (r.p, r.k_flips, r.trial_index))


def save_grid_csv(grid: GridResult, path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(GRID_CSV_HEADER)
        for rec in _canonical_records(grid):
            writer.writerow(
                [
                    grid.rule,
                    grid.n,
                    rec.p,
                    rec.k_flips,
                    rec.trial_index,
                    rec.seed,
                    _format_float(rec.overlap),
                    rec.iterations,
                    "true" if rec.converged else "false",
                ]
            )


def load_grid_csv(path) -> GridResult:
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = tuple(next(reader))
        if header != GRID_CSV_HEADER:
            raise ValueError(f"unexpected grid CSV header {header!r}")
        rules = set()
        ns = set()
        records = []
        for row in reader:
            rule, n, p, k, t, seed, ov, iters, conv = row
            rules.add(rule)
            ns.add(int(n))
            records.append(
                TrialRecord(int(p), int(k), int(t), int(seed), float(ov), int(iters), conv == "true")
            )
    if len(rules) != 1 or len(ns) != 1:
        raise ValueError("grid CSV must describe exactly one rule and one network size")
    p_values = tuple(sorted({r.p for r in records}))
    k_values = tuple(sorted({r.k_flips for r in records}))
    trials = len({r.trial_index for r in records})
    return GridResult(rules.pop(), ns.pop(), p_values, k_values, trials, records)


def save_grid_json(grid: GridResult, path) -> None:
    doc = {
        "kind": "hopnet-grid-v1",
        "rule": grid.rule,
        "n": grid.n,
        "p_values": list(grid.p_values),
        "k_values": list(grid.k_values),
        "trials": grid.trials,
        "records": [
            {
                "p": rec.p,
                "k": rec.k_flips,
                "trial": rec.trial_index,
                "seed": rec.seed,
                "overlap": rec.overlap,
                "iterations": rec.iterations,
                "converged": rec.converged,
            }
            for rec in _canonical_records(grid)
        ],
    }
    with open(path, "w") as fh:
        json.dump(doc, fh, indent=1)
        fh.write("\n")


def load_grid_json(path) -> GridResult:
    with open(path) as fh:
        doc = json.load(fh)
    records = [
        TrialRecord(
            int(r["p"]),
            int(r["k"]),
            int(r["trial"]),
            int(r["seed"]),
            float(r["overlap"]),
            int(r["iterations"]),
            bool(r["converged"]),
        )
        for r in doc["records"]
    ]
    return GridResult(
        doc["rule"],
        int(doc["n"]),
        tuple(doc["p_values"]),
        tuple(doc["k_values"]),
        int(doc["trials"]),
        records,
    )


def save_curve_csv(curve: CurveResult, path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(CURVE_CSV_HEADER)
        for k, p in zip(curve.k_values, curve.p_eps):
            writer.writerow([k, p])


def load_curve_csv(path, rule: str = "", n: int = 0, epsilon: float | None = None) -> CurveResult:
    """Read back a curve CSV; metadata absent from the file comes from the arguments."""
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = tuple(next(reader))
        if header != CURVE_CSV_HEADER:
            raise ValueError(f"unexpected curve CSV header {header!r}")
        pairs = [(int(k), int(p)) for k, p in reader]
    return CurveResult(rule, n, epsilon, tuple(k for k, _ in pairs), tuple(p for _, p in pairs))


def save_curve_json(curve: CurveResult, path) -> None:
    doc = {
        "kind": "hopnet-curve-v1",
        "rule": curve.rule,
        "n": curve.n,
        "epsilon": curve.epsilon,
        "k_values": list(curve.k_values),
        "p_eps": list(curve.p_eps),
    }
    with open(path, "w") as fh:
        json.dump(doc, fh, indent=1)
        fh.write("\n")


def load_curve_json(path) -> CurveResult:
    with open(path) as fh:
        doc = json.load(fh)
    return CurveResult(
        doc["rule"],
        int(doc["n"]),
        doc["epsilon"],
        tuple(doc["k_values"]),
        tuple(doc["p_eps"]),
    )
