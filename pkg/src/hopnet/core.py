"""Discrete Hopfield network state, dynamics, and diagnostics.

A network over n binary neurons is described by a symmetric-by-convention
weight matrix ``W`` (shape ``(n, n)``), a bias vector ``b`` (shape ``(n,)``),
and a self-coupling flag that says whether the diagonal of ``W`` may be
nonzero.  States and stored patterns are vectors with entries in {-1, +1}.

The update rule per neuron is ``s_i <- sign(W[i] @ s + b_i)`` with the tie
convention that a zero net input keeps the previous spin.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "NetworkParams",
    "EvolutionOutcome",
    "StabilityReport",
    "as_pattern",
    "as_pattern_batch",
    "net_input",
    "activate",
    "evolve",
    "energy",
    "overlap",
    "hamming_distance",
    "distort",
    "stability_margins",
]

_ASYNC_MODES = ("asynchronous", "async")
_SYNC_MODES = ("synchronous", "sync")


def _as_rng(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


@dataclass
class NetworkParams:
    """Weights, biases, and the self-coupling flag of one network."""

    weights: np.ndarray
    biases: np.ndarray
    self_coupling: bool

    @property
    def n(self) -> int:
        return int(self.biases.shape[0])

    def copy(self) -> "NetworkParams":
        return NetworkParams(self.weights.copy(), self.biases.copy(), self.self_coupling)

    def validate(self) -> "NetworkParams":
        w, b = self.weights, self.biases
        if w.ndim != 2 or w.shape[0] != w.shape[1]:
            raise ValueError(f"weights must be square, got shape {w.shape}")
        if b.ndim != 1 or b.shape[0] != w.shape[0]:
            raise ValueError(f"biases must have shape ({w.shape[0]},), got {b.shape}")
        if not (np.all(np.isfinite(w)) and np.all(np.isfinite(b))):
            raise ValueError("weights and biases must be finite")
        if not self.self_coupling and np.any(np.diagonal(w) != 0.0):
            raise ValueError("self_coupling is off but the weight diagonal is nonzero")
        return self


@dataclass
class EvolutionOutcome:
    """Result of running the network dynamics.

    ``iterations`` counts full sweeps.  ``terminal`` is one of
    ``"fixed_point"``, ``"two_cycle"`` (synchronous mode only), or
    ``"max_iters"``.
    """

    final_state: np.ndarray
    iterations: int
    terminal: str


@dataclass
class StabilityReport:
    """Per-pattern, per-neuron stability margins.

    ``raw_margins[mu, i]`` is ``sigma_i^mu * (W sigma^mu + b)_i``; a stored
    pattern is a fixed point of the dynamics iff all of its raw margins are
    nonnegative under the zero-keeps-previous tie rule.
    ``normalized_margins`` divides each neuron's margins by the Euclidean
    norm of its augmented weight row ``(W[i], b_i)``; entries are NaN where
    that norm is zero, and ``undefined_normalization[i]`` flags those rows.
    """

    raw_margins: np.ndarray
    normalized_margins: np.ndarray
    undefined_normalization: np.ndarray

    @property
    def min_raw(self) -> float:
        return float(self.raw_margins.min())


def as_pattern(values, n: int | None = None) -> np.ndarray:
    """Coerce ``values`` to a float64 spin vector and validate entries are +-1."""
    arr = np.asarray(values, dtype=np.float64)
    if arr.ndim != 1:
        raise ValueError(f"pattern must be one-dimensional, got shape {arr.shape}")
    if n is not None and arr.shape[0] != n:
        raise ValueError(f"pattern has length {arr.shape[0]}, expected {n}")
    if not np.all(np.abs(arr) == 1.0):
        raise ValueError("pattern entries must be -1 or +1")
    return arr


def as_pattern_batch(patterns, n: int | None = None) -> np.ndarray:
    """Coerce a sequence of patterns to a (p, n) float64 array of +-1 spins."""
    arr = np.asarray(patterns, dtype=np.float64)
    if arr.ndim == 1:
        arr = arr[None, :]
    if arr.ndim != 2 or arr.shape[0] < 1:
        raise ValueError(f"expected a non-empty batch of patterns, got shape {arr.shape}")
    if n is not None and arr.shape[1] != n:
        raise ValueError(f"patterns have length {arr.shape[1]}, expected {n}")
    if not np.all(np.abs(arr) == 1.0):
        raise ValueError("pattern entries must be -1 or +1")
    return arr


def net_input(params: NetworkParams, state) -> np.ndarray:
    """Net input ``h = W @ s + b`` for every neuron at once."""
    state = np.asarray(state, dtype=np.float64)
    if state.shape != (params.n,):
        raise ValueError(f"state has shape {state.shape}, expected ({params.n},)")
    return params.weights @ state + params.biases


def activate(fields, previous) -> np.ndarray:
    """Sign activation with ties resolved to the previous state."""
    fields = np.asarray(fields, dtype=np.float64)
    previous = np.asarray(previous, dtype=np.float64)
    if fields.shape != previous.shape:
        raise ValueError("fields and previous state must have the same shape")
    return np.where(fields > 0, 1.0, np.where(fields < 0, -1.0, previous))


def evolve(
    params: NetworkParams,
    initial,
    mode: str = "asynchronous",
    max_sweeps: int = 100,
    order: str = "cyclic",
    rng=None,
) -> EvolutionOutcome:
    """Run the network dynamics from ``initial`` until it settles.

    Asynchronous mode updates neurons one at a time within a sweep, in index
    order 0..n-1 by default (``order="random"`` draws a fresh permutation per
    sweep from ``rng``).  Synchronous mode updates all neurons at once and
    additionally reports two-cycles, the only oscillation a symmetric network
    can sustain under parallel updates.

    Terminates at the first sweep that changes nothing (``fixed_point``), at
    the first state equal to the state two sweeps back (``two_cycle``,
    synchronous only), or after ``max_sweeps`` sweeps (``max_iters``).
    """
    if max_sweeps < 1:
        raise ValueError("max_sweeps must be at least 1")
    state = as_pattern(initial, params.n).copy()
    w, b = params.weights, params.biases
    n = params.n

    if mode in _SYNC_MODES:
        prev = None
        for sweep in range(1, max_sweeps + 1):
            new = activate(w @ state + b, state)
            if np.array_equal(new, state):
                return EvolutionOutcome(new, sweep, "fixed_point")
            if prev is not None and np.array_equal(new, prev):
                return EvolutionOutcome(new, sweep, "two_cycle")
            prev, state = state, new
        return EvolutionOutcome(state, max_sweeps, "max_iters")

    if mode not in _ASYNC_MODES:
        raise ValueError(f"unknown update mode {mode!r}")
    if order not in ("cyclic", "random"):
        raise ValueError(f"unknown update order {order!r}")
    gen = _as_rng(rng) if order == "random" else None

    # Maintain h = W @ state + b incrementally; a single flip of spin i
    # changes h by (new_i - old_i) * W[:, i].
    h = w @ state + b
    for sweep in range(1, max_sweeps + 1):
        indices = range(n) if gen is None else gen.permutation(n)
        changed = False
        for i in indices:
            hi = h[i]
            if hi == 0.0:
                continue
            new = 1.0 if hi > 0 else -1.0
            if new != state[i]:
                h += (new - state[i]) * w[:, i]
                state[i] = new
                changed = True
        if not changed:
            return EvolutionOutcome(state, sweep, "fixed_point")
    return EvolutionOutcome(state, max_sweeps, "max_iters")


def energy(params: NetworkParams, state) -> float:
    """E(s) = -1/2 s.W.s - b.s"""
    state = np.asarray(state, dtype=np.float64)
    return float(-0.5 * state @ params.weights @ state - params.biases @ state)


def overlap(a, b) -> float:
    """Normalized agreement (a . b) / n between two spin vectors; 1 means identical."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape or a.ndim != 1:
        raise ValueError("overlap requires two vectors of the same length")
    return float(a @ b / a.shape[0])


def hamming_distance(a, b) -> int:
    a = np.asarray(a)
    b = np.asarray(b)
    if a.shape != b.shape:
        raise ValueError("hamming_distance requires equal-length vectors")
    return int(np.count_nonzero(a != b))


def distort(pattern, k_flips: int, seed) -> np.ndarray:
    """Flip exactly ``k_flips`` distinct positions of ``pattern``, chosen by ``seed``."""
    pattern = as_pattern(pattern)
    n = pattern.shape[0]
    if not 0 <= k_flips <= n:
        raise ValueError(f"k_flips must lie in [0, {n}], got {k_flips}")
    out = pattern.copy()
    if k_flips == 0:
        return out
    rng = _as_rng(seed)
    idx = rng.choice(n, size=k_flips, replace=False)
    out[idx] = -out[idx]
    return out


def stability_margins(params: NetworkParams, patterns) -> StabilityReport:
    """Raw and row-normalized stability margins for a batch of patterns.

    Margins are invariant in sign under positive rescaling of any augmented
    row ``(W[i], b_i)``; the normalized form is invariant in value.
    """
    s = as_pattern_batch(patterns, params.n)
    fields = s @ params.weights.T + params.biases
    raw = s * fields
    row_norms = np.sqrt(np.sum(params.weights**2, axis=1) + params.biases**2)
    undefined = row_norms == 0.0
    safe = np.where(undefined, 1.0, row_norms)
    normalized = np.where(undefined[None, :], np.nan, raw / safe[None, :])
    return StabilityReport(raw, normalized, undefined)
