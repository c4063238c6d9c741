"""Catalog of learning rules for discrete Hopfield networks.

Every rule maps stored patterns to network parameters ``(W, b)``.  The
catalog spans three families:

* classical one-shot prescriptions (Hebbian, Storkey, pseudo-inverse),
* descent rules that lower a per-neuron objective by gradient steps
  (absolute-error, squared-error, exponential barrier, and a
  scale-invariant exponential barrier), with the squared-error rule
  optionally Newton-accelerated, and
* margin-driven perceptron-style loops (Krauth-Mezard and its
  Gardner variant with a normalized margin target).

Each rule updates the incoming weights and bias of every neuron; except for
Storkey's rule, whose update reads the symmetric partner synapse, row i of
the weight matrix is written using only row i, the bias b_i, and the
patterns.  When self-coupling is disabled the weight diagonal is held at
zero throughout.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import optim
from .core import NetworkParams, as_pattern, as_pattern_batch, stability_margins

__all__ = [
    "DegenerateInputError",
    "RULE_KINDS",
    "RuleSpec",
    "TrainReport",
    "normalize_rule_name",
    "default_spec",
    "init_params",
    "hebbian_step",
    "hebbian_train",
    "storkey_step",
    "pseudo_inverse_train",
    "descent_l1_step",
    "descent_l2_step",
    "exp_barrier_step",
    "exp_barrier_si_step",
    "krauth_mezard_train",
    "gardner_krauth_mezard_train",
    "rule_objective",
    "train",
]

# exponent ceiling inside the barrier rules; keeps exp() finite for badly
# violated constraints without affecting converged solutions
_EXP_CLAMP = 50.0


class DegenerateInputError(ValueError):
    """The stored patterns do not satisfy a rule's rank or count requirements."""


RULE_KINDS = (
    "hebbian",
    "storkey",
    "pseudo_inverse",
    "diederich_opper_i",
    "diederich_opper_ii",
    "descent_l1",
    "descent_l2",
    "descent_exp_barrier",
    "descent_exp_barrier_si",
    "krauth_mezard",
    "gardner_krauth_mezard",
)

# rules iterated pattern-by-pattern unless configured otherwise
_INCREMENTAL_BY_DEFAULT = ("diederich_opper_i", "diederich_opper_ii")

_DESCENT_KINDS = (
    "diederich_opper_i",
    "diederich_opper_ii",
    "descent_l1",
    "descent_l2",
    "descent_exp_barrier",
    "descent_exp_barrier_si",
)


def normalize_rule_name(name: str) -> str:
    """Map user spellings like 'PseudoInverse' or 'pseudoinverse' to catalog names."""
    key = str(name).strip().lower().replace("-", "_")
    squeezed = key.replace("_", "")
    for kind in RULE_KINDS:
        if key == kind or squeezed == kind.replace("_", ""):
            return kind
    raise ValueError(f"unknown rule {name!r}; valid rules: {', '.join(RULE_KINDS)}")


@dataclass
class RuleSpec:
    """A rule identifier plus its hyperparameters.

    Fields that a given rule does not use are stored but ignored.  ``tol``
    stops descent iterations once the max-norm of the most recent full
    update (at the configured ``lr``) falls below it; ``maxiter`` bounds
    iterations per pattern (incremental), per batch (non-incremental), or
    per neuron (Krauth-Mezard loops).
    """

    kind: str
    lam: float = 1.0
    alpha: float = 1e-3
    lr: float = 1e-2
    tol: float = 1e-3
    maxiter: int = 1000
    margin_k: float = 1.0
    self_coupling: bool = True
    incremental: bool = False
    newton: bool = False

    def __post_init__(self):
        self.kind = normalize_rule_name(self.kind)

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "lam": self.lam,
            "alpha": self.alpha,
            "lr": self.lr,
            "tol": self.tol,
            "maxiter": self.maxiter,
            "margin_k": self.margin_k,
            "self_coupling": self.self_coupling,
            "incremental": self.incremental,
            "newton": self.newton,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "RuleSpec":
        return cls(**data)


_KIND_DEFAULTS: dict[str, dict] = {
    "hebbian": {"lam": 1.0},
    "storkey": {"lam": 1.0},
    "pseudo_inverse": {},
    "diederich_opper_i": {"lam": 1.0, "lr": 1e-2, "tol": 0.1},
    "diederich_opper_ii": {"lam": 1.0, "lr": 1e-2, "tol": 0.1},
    "descent_l1": {"lam": 0.5, "alpha": 1e-3, "lr": 1e-2},
    "descent_l2": {"lam": 0.5, "alpha": 1e-3, "lr": 1e-2},
    "descent_exp_barrier": {"lam": 0.5, "alpha": 1e-3, "lr": 1e-2},
    "descent_exp_barrier_si": {"lam": 0.5, "alpha": 0.0, "lr": 1e-2},
    "krauth_mezard": {"lr": 1e-2, "maxiter": 200},
    "gardner_krauth_mezard": {"lr": 1e-2, "margin_k": 1.0, "maxiter": 100},
}


def default_spec(kind: str, incremental: bool | None = None, **overrides) -> RuleSpec:
    """Catalog defaults for ``kind``.

    ``incremental`` defaults to True for the Diederich-Opper rules and False
    elsewhere.  For the descent rules the stopping tolerance defaults to 0.1
    when training incrementally and 1e-3 for full-batch training, matching
    the benchmark configurations; any explicit override wins.
    """
    kind = normalize_rule_name(kind)
    params = dict(_KIND_DEFAULTS[kind])
    if incremental is None:
        incremental = kind in _INCREMENTAL_BY_DEFAULT
    if kind in ("descent_l1", "descent_l2", "descent_exp_barrier", "descent_exp_barrier_si"):
        params.setdefault("tol", 0.1 if incremental else 1e-3)
    params.update(overrides)
    return RuleSpec(kind=kind, incremental=incremental, **params)


@dataclass
class TrainReport:
    """Outcome summary of one training run.

    ``converged`` means the rule's own stopping criterion held at exit
    (one-shot rules always converge).  ``min_margin`` is the smallest raw
    stability margin over all stored patterns and neurons at exit;
    ``min_normalized_margin`` is filled by the Gardner loop, whose criterion
    is stated in normalized margins.  ``final_objective`` is the value of a
    descent rule's objective at exit and None for rules that do not descend
    an objective.
    """

    converged: bool
    sweeps_used: int
    min_margin: float
    final_objective: float | None = None
    min_normalized_margin: float | None = None
    notes: tuple[str, ...] = ()


def init_params(n: int, self_coupling: bool, init_std: float = 0.01, seed=None) -> NetworkParams:
    """Small random symmetric start: W from symmetrized N(0, init_std^2), b likewise."""
    if n < 1:
        raise ValueError("n must be at least 1")
    if init_std < 0:
        raise ValueError("init_std must be nonnegative")
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    raw = rng.normal(0.0, 1.0, size=(n, n)) * init_std
    weights = (raw + raw.T) / 2.0
    biases = rng.normal(0.0, 1.0, size=n) * init_std
    if not self_coupling:
        np.fill_diagonal(weights, 0.0)
    return NetworkParams(weights, biases, self_coupling)


def _mask_diagonal(delta_w: np.ndarray, self_coupling: bool) -> np.ndarray:
    if not self_coupling:
        np.fill_diagonal(delta_w, 0.0)
    return delta_w


def hebbian_step(params: NetworkParams, pattern, lam: float = 1.0) -> NetworkParams:
    """Add lam * sigma sigma^T to W (diagonal skipped without self-coupling) and lam * sigma to b."""
    sigma = as_pattern(pattern, params.n)
    dw = _mask_diagonal(lam * np.outer(sigma, sigma), params.self_coupling)
    return NetworkParams(params.weights + dw, params.biases + lam * sigma, params.self_coupling)


def hebbian_train(params: NetworkParams, patterns, lam: float = 1.0) -> NetworkParams:
    """All Hebbian increments at once; order-independent because the increments sum."""
    s = as_pattern_batch(patterns, params.n)
    dw = _mask_diagonal(lam * (s.T @ s), params.self_coupling)
    db = lam * s.sum(axis=0)
    return NetworkParams(params.weights + dw, params.biases + db, params.self_coupling)


def storkey_step(params: NetworkParams, pattern, lam: float = 1.0) -> NetworkParams:
    """One Storkey increment for ``pattern``.

    dW[i, j] = (lam/n) * (sigma_i sigma_j - sigma_i h_ji - h_ij sigma_j)
    with the partial local field h_ij = sum_{k not in {i, j}} W[i, k] sigma_k + b_i.
    The bias rides along as a synapse from a constant +1 unit outside the
    network: its partial field h_i,ext excludes the bias itself and the
    external unit receives no input, so db_i = (lam/n) * (sigma_i - h_i,ext).
    On blank parameters the increment reduces to Hebbian scaled by 1/n.
    """
    sigma = as_pattern(pattern, params.n)
    n = params.n
    w, b = params.weights, params.biases
    t_full = w @ sigma + b
    h_self = t_full - np.diagonal(w) * sigma  # field at i excluding k = i
    # h_partial[i, j] = h_ij for i != j; the diagonal needs h_ii = h_self
    h_partial = h_self[:, None] - w * sigma[None, :]
    np.fill_diagonal(h_partial, h_self)
    dw = (lam / n) * (
        np.outer(sigma, sigma) - sigma[:, None] * h_partial.T - h_partial * sigma[None, :]
    )
    _mask_diagonal(dw, params.self_coupling)
    db = (lam / n) * (sigma - (h_self - b))
    return NetworkParams(w + dw, b + db, params.self_coupling)


def pseudo_inverse_train(patterns, n: int, self_coupling: bool = True) -> NetworkParams:
    """Project onto the span of the patterns: W = Z (Z^T Z)^-1 Z^T, b = 0.

    Requires 1 <= p <= n linearly independent patterns; with self-coupling on
    every stored pattern satisfies W sigma = sigma exactly.  Computed as
    G^T G with G = L^-1 S for the Cholesky factor L of the Gram matrix, which
    keeps W symmetric to the bit.
    """
    s = as_pattern_batch(patterns, n)
    p = s.shape[0]
    if p > n:
        raise DegenerateInputError(f"pseudo-inverse rule needs p <= n, got p={p}, n={n}")
    gram = s @ s.T
    try:
        chol = np.linalg.cholesky(gram)
    except np.linalg.LinAlgError as exc:
        raise DegenerateInputError(
            "stored patterns are linearly dependent; the pseudo-inverse rule is undefined"
        ) from exc
    g = np.linalg.solve(chol, s)
    weights = g.T @ g
    if not self_coupling:
        np.fill_diagonal(weights, 0.0)
    return NetworkParams(weights, np.zeros(n), self_coupling)


def descent_l1_step(
    params: NetworkParams, pattern, lam: float, alpha: float, lr: float
) -> NetworkParams:
    """Signed-error step: dW[i, j] = lr * (lam * sign(sigma_i - lam h_i) sigma_j - alpha W[i, j]).

    sign(0) = 0, so an exactly satisfied residual contributes nothing.  The
    bias update replaces sigma_j by the constant input 1.
    """
    sigma = as_pattern(pattern, params.n)
    h = params.weights @ sigma + params.biases
    r = np.sign(sigma - lam * h)
    dw = _mask_diagonal(lr * (lam * np.outer(r, sigma) - alpha * params.weights), params.self_coupling)
    db = lr * (lam * r - alpha * params.biases)
    return NetworkParams(params.weights + dw, params.biases + db, params.self_coupling)


def descent_l2_step(
    params: NetworkParams, pattern, lam: float, alpha: float, lr: float
) -> NetworkParams:
    """Squared-error step: dW[i, j] = lr * (2 lam (sigma_i - lam h_i) sigma_j - alpha W[i, j])."""
    sigma = as_pattern(pattern, params.n)
    h = params.weights @ sigma + params.biases
    r = sigma - lam * h
    dw = _mask_diagonal(lr * (2.0 * lam * np.outer(r, sigma) - alpha * params.weights), params.self_coupling)
    db = lr * (2.0 * lam * r - alpha * params.biases)
    return NetworkParams(params.weights + dw, params.biases + db, params.self_coupling)


def exp_barrier_step(
    params: NetworkParams, patterns, lam: float, alpha: float, lr: float
) -> NetworkParams:
    """Exponential-barrier step over a batch (a single pattern is a batch of one).

    dW[i, j] = lr * (lam * sum_mu sigma_i^mu sigma_j^mu exp(-lam sigma_i^mu h_i^mu)
               - alpha W[i, j]); the exponent is clamped at +50 so a badly
    violated constraint cannot overflow.
    """
    s = as_pattern_batch(patterns, params.n)
    fields = s @ params.weights.T + params.biases
    e = np.exp(np.minimum(-lam * (s * fields), _EXP_CLAMP))
    se = s * e
    dw = _mask_diagonal(lr * (lam * (se.T @ s) - alpha * params.weights), params.self_coupling)
    db = lr * (lam * se.sum(axis=0) - alpha * params.biases)
    return NetworkParams(params.weights + dw, params.biases + db, params.self_coupling)


def exp_barrier_si_step(params: NetworkParams, patterns, lam: float, lr: float) -> NetworkParams:
    """Scale-invariant barrier step: descend sum_mu exp(-lam m_i^mu / |u_i|).

    Here u_i = (W[i], b_i) is the augmented row and m_i^mu its raw margin.
    The objective depends on u_i only through its direction, so the gradient
    is orthogonal to u_i and no weight-decay term applies.  A row of zero
    norm falls back to the plain barrier direction for that step.
    """
    s = as_pattern_batch(patterns, params.n)
    u = np.hstack([params.weights, params.biases[:, None]])
    z = np.hstack([s, np.ones((s.shape[0], 1))])
    norms = np.linalg.norm(u, axis=1)
    safe = np.where(norms == 0.0, 1.0, norms)
    margins = s * (z @ u.T)  # (p, n): m_i^mu
    e = np.exp(np.minimum(-lam * margins / safe[None, :], _EXP_CLAMP))
    coef = lam * s * e
    term1 = (coef.T @ z) / safe[:, None]
    # the radial correction vanishes automatically for zero-norm rows (u_i = 0)
    term2 = ((lam * margins * e).sum(axis=0) / safe**3)[:, None] * u
    du = lr * (term1 - term2)
    dw = _mask_diagonal(du[:, :-1], params.self_coupling)
    return NetworkParams(params.weights + dw, params.biases + du[:, -1], params.self_coupling)


def _margin_state(weights, biases, s):
    fields = s @ weights.T + biases
    return s * fields


def _krauth_mezard_loop(
    params: NetworkParams,
    patterns,
    lr: float,
    maxiter: int,
    margin_k: float | None,
) -> tuple[NetworkParams, TrainReport]:
    """Weak-pattern-first loop shared by the Krauth-Mezard rule and its Gardner variant.

    Each round, every unsatisfied neuron i reinforces its weakest pattern
    mu* = argmin_mu sigma_i^mu h_i^mu (ties to the lowest index) with a
    Hebbian-like increment at rate lr.  Plain mode stops a neuron once its
    raw margins are all positive; the Gardner variant (margin_k not None)
    stops once all normalized margins reach margin_k.  Neurons are
    independent, so the rounds advance all unsatisfied neurons at once.
    """
    if lr <= 0:
        raise ValueError("lr must be positive")
    if maxiter < 1:
        raise ValueError("maxiter must be at least 1")
    s = as_pattern_batch(patterns, params.n)
    n = params.n
    sc = params.self_coupling
    weights = params.weights.copy()
    biases = params.biases.copy()
    gram = s @ s.T
    margins = _margin_state(weights, biases, s)
    rounds = 0
    for _ in range(maxiter):
        mins = margins.min(axis=0)
        if margin_k is None:
            active = mins <= 0.0
        else:
            row_norms = np.sqrt(np.sum(weights**2, axis=1) + biases**2)
            # a zero row cannot satisfy a positive normalized margin
            active = np.where(row_norms > 0.0, mins < margin_k * row_norms, True)
        idx = np.flatnonzero(active)
        if idx.size == 0:
            break
        rounds += 1
        mu = margins[:, idx].argmin(axis=0)
        s_star = s[mu, idx]  # sigma_i^{mu*}
        weights[idx] += lr * s_star[:, None] * s[mu]
        delta_h = lr * s_star[None, :] * (gram[:, mu] + 1.0)
        if not sc:
            weights[idx, idx] = 0.0
            delta_h = delta_h - lr * s[:, idx]
        biases[idx] += lr * s_star
        margins[:, idx] += s[:, idx] * delta_h
    # report from freshly computed margins, not the incrementally tracked ones
    margins = _margin_state(weights, biases, s)
    mins = margins.min(axis=0)
    min_margin = float(mins.min())
    if margin_k is None:
        converged = bool(np.all(mins > 0.0))
        min_norm = None
    else:
        row_norms = np.sqrt(np.sum(weights**2, axis=1) + biases**2)
        with np.errstate(invalid="ignore"):
            normalized = np.where(row_norms > 0.0, mins / np.where(row_norms == 0, 1, row_norms), -np.inf)
        converged = bool(np.all(normalized >= margin_k))
        min_norm = float(normalized.min())
    report = TrainReport(
        converged=converged,
        sweeps_used=rounds,
        min_margin=min_margin,
        min_normalized_margin=min_norm,
    )
    return NetworkParams(weights, biases, sc), report


def krauth_mezard_train(
    params: NetworkParams, patterns, lr: float = 1e-2, maxiter: int = 200
) -> tuple[NetworkParams, TrainReport]:
    """Drive every raw margin positive by repeatedly reinforcing each neuron's weakest pattern."""
    return _krauth_mezard_loop(params, patterns, lr, maxiter, margin_k=None)


def gardner_krauth_mezard_train(
    params: NetworkParams,
    patterns,
    lr: float = 1e-2,
    margin_k: float = 1.0,
    maxiter: int = 100,
) -> tuple[NetworkParams, TrainReport]:
    """Krauth-Mezard loop that stops only once every normalized margin reaches margin_k."""
    if margin_k <= 0:
        raise ValueError("margin_k must be positive")
    return _krauth_mezard_loop(params, patterns, lr, maxiter, margin_k=margin_k)


def rule_objective(params: NetworkParams, patterns, spec: RuleSpec) -> float | None:
    """The objective a descent rule lowers, evaluated at ``params``.

    Per neuron and pattern the loss terms are |lam h - sigma| (L1),
    (lam h - sigma)^2 (L2), exp(-lam sigma h) (barrier), or
    exp(-lam sigma h / |u_i|) (scale-invariant barrier), summed over all
    neurons and patterns; all but the scale-invariant form add the weight
    decay alpha/2 * (|W|_F^2 + |b|^2).  Returns None for rules that do not
    descend an objective.
    """
    kind = spec.kind
    if kind not in _DESCENT_KINDS:
        return None
    s = as_pattern_batch(patterns, params.n)
    fields = s @ params.weights.T + params.biases
    reg = 0.5 * spec.alpha * (float(np.sum(params.weights**2)) + float(np.sum(params.biases**2)))
    if kind in ("descent_l1", "diederich_opper_i"):
        return float(np.sum(np.abs(spec.lam * fields - s))) + reg
    if kind in ("descent_l2", "diederich_opper_ii"):
        return float(np.sum((spec.lam * fields - s) ** 2)) + reg
    if kind == "descent_exp_barrier":
        return float(np.sum(np.exp(np.minimum(-spec.lam * (s * fields), _EXP_CLAMP)))) + reg
    # scale-invariant barrier: no weight decay, margins measured per unit row norm
    norms = np.sqrt(np.sum(params.weights**2, axis=1) + params.biases**2)
    safe = np.where(norms == 0.0, 1.0, norms)
    return float(np.sum(np.exp(np.minimum(-spec.lam * (s * fields) / safe[None, :], _EXP_CLAMP))))


def _update_norm(new: NetworkParams, old: NetworkParams) -> float:
    return max(
        float(np.abs(new.weights - old.weights).max()),
        float(np.abs(new.biases - old.biases).max()),
    )


def _descent_batch_step(params: NetworkParams, s: np.ndarray, spec: RuleSpec) -> NetworkParams:
    """One full-batch first-order update (summed per-pattern terms, one decay)."""
    kind = spec.kind
    lam, alpha, lr = spec.lam, spec.alpha, spec.lr
    if kind in ("descent_exp_barrier",):
        return exp_barrier_step(params, s, lam, alpha, lr)
    if kind == "descent_exp_barrier_si":
        return exp_barrier_si_step(params, s, lam, lr)
    fields = s @ params.weights.T + params.biases
    if kind in ("descent_l1", "diederich_opper_i"):
        r = np.sign(s - lam * fields)
        scale = lam
    else:
        r = s - lam * fields
        scale = 2.0 * lam
    dw = _mask_diagonal(
        lr * (scale * (r.T @ s) - alpha * params.weights), params.self_coupling
    )
    db = lr * (scale * r.sum(axis=0) - alpha * params.biases)
    return NetworkParams(params.weights + dw, params.biases + db, params.self_coupling)


def _descent_single_step(params: NetworkParams, sigma: np.ndarray, spec: RuleSpec) -> NetworkParams:
    kind = spec.kind
    if kind in ("descent_l1", "diederich_opper_i"):
        return descent_l1_step(params, sigma, spec.lam, spec.alpha, spec.lr)
    if kind in ("descent_l2", "diederich_opper_ii"):
        return descent_l2_step(params, sigma, spec.lam, spec.alpha, spec.lr)
    if kind == "descent_exp_barrier":
        return exp_barrier_step(params, sigma, spec.lam, spec.alpha, spec.lr)
    return exp_barrier_si_step(params, sigma, spec.lam, spec.lr)


def _newton_incremental(params: NetworkParams, s: np.ndarray, spec: RuleSpec):
    """Present patterns one at a time, jumping each quadratic subproblem to its minimum.

    The squared-error objective for a single pattern has the constant
    Hessian alpha I + lam^2 sigma' sigma'^T, inverted exactly in closed
    form, so each presentation converges in one Newton step plus the
    stopping check.
    """
    lam, alpha = spec.lam, spec.alpha
    u = np.hstack([params.weights, params.biases[:, None]])
    steps = 0
    hit_tol = True
    for sigma in s:
        z = np.append(sigma, 1.0)
        hinv = optim.hessian_inverse_rank_one(z, lam, alpha).matrix
        for _ in range(spec.maxiter):
            h = u @ z
            grad = lam * np.outer(lam * h - sigma, z) + alpha * u
            du = -grad @ hinv
            if not params.self_coupling:
                np.fill_diagonal(du[:, :-1], 0.0)
            u = u + du
            steps += 1
            if float(np.abs(du).max()) < spec.tol:
                break
        else:
            hit_tol = False
    out = NetworkParams(u[:, :-1].copy(), u[:, -1].copy(), params.self_coupling)
    return out, steps, hit_tol


def _train_descent(params: NetworkParams, s: np.ndarray, spec: RuleSpec):
    notes: list[str] = []
    if spec.kind == "descent_exp_barrier_si":
        row_norms = np.sqrt(np.sum(params.weights**2, axis=1) + params.biases**2)
        if np.any(row_norms == 0.0):
            notes.append("zero-norm rows fell back to the plain barrier direction")
    if spec.newton and spec.kind == "descent_l2" and not spec.incremental:
        # batch Newton relies on the truncated series inverse, valid only in
        # its convergence region; outside it this raises DivergenceError
        z = optim.augmented_pattern_matrix(s)
        hinv = optim.hessian_inverse_neumann(z, spec.lam, spec.alpha, terms=2).matrix
    else:
        hinv = None

    if spec.incremental:
        if spec.newton and spec.kind == "descent_l2":
            out, steps, hit_tol = _newton_incremental(params, s, spec)
        else:
            out = params
            steps = 0
            hit_tol = True
            for sigma in s:
                for _ in range(spec.maxiter):
                    new = _descent_single_step(out, sigma, spec)
                    delta = _update_norm(new, out)
                    out = new
                    steps += 1
                    if delta < spec.tol:
                        break
                else:
                    hit_tol = False
    else:
        out = params
        steps = 0
        hit_tol = False
        for _ in range(spec.maxiter):
            if hinv is not None:
                u = np.hstack([out.weights, out.biases[:, None]])
                z = optim.augmented_pattern_matrix(s)
                h = u @ z
                grad = spec.lam * (spec.lam * h - s.T) @ z.T + spec.alpha * u
                du = -grad @ hinv
                if not out.self_coupling:
                    np.fill_diagonal(du[:, :-1], 0.0)
                new = NetworkParams(
                    out.weights + du[:, :-1], out.biases + du[:, -1], out.self_coupling
                )
            else:
                new = _descent_batch_step(out, s, spec)
            delta = _update_norm(new, out)
            out = new
            steps += 1
            if delta < spec.tol:
                hit_tol = True
                break
    return out, steps, hit_tol, tuple(notes)


def train(
    spec: RuleSpec,
    patterns,
    n: int | None = None,
    seed=None,
    init_std: float = 0.01,
) -> tuple[NetworkParams, TrainReport]:
    """Train a fresh network on ``patterns`` according to ``spec``.

    Parameters start from ``init_params(n, spec.self_coupling, init_std,
    seed)`` except for the pseudo-inverse rule, which constructs its weights
    outright.  Incremental mode presents patterns one at a time in order,
    iterating the rule's step to its tol/maxiter criterion before moving on;
    non-incremental mode iterates full-batch steps.  The report carries the
    rule's convergence flag, iteration count, the worst raw stability margin
    over the stored patterns at exit, and the final objective value for
    descent rules.
    """
    s = as_pattern_batch(patterns, n)
    n = s.shape[1]
    kind = spec.kind

    if kind == "pseudo_inverse":
        params = pseudo_inverse_train(s, n, spec.self_coupling)
        report_extra = {"converged": True, "sweeps_used": 1}
    else:
        params = init_params(n, spec.self_coupling, init_std, seed)
        if kind == "hebbian":
            if spec.incremental:
                for sigma in s:
                    params = hebbian_step(params, sigma, spec.lam)
            else:
                params = hebbian_train(params, s, spec.lam)
            report_extra = {"converged": True, "sweeps_used": 1}
        elif kind == "storkey":
            if spec.incremental:
                for sigma in s:
                    params = storkey_step(params, sigma, spec.lam)
            else:
                # one-shot variant: all per-pattern increments evaluated at the
                # starting parameters, applied together
                base = params
                dw = np.zeros_like(base.weights)
                db = np.zeros_like(base.biases)
                for sigma in s:
                    stepped = storkey_step(base, sigma, spec.lam)
                    dw += stepped.weights - base.weights
                    db += stepped.biases - base.biases
                params = NetworkParams(base.weights + dw, base.biases + db, base.self_coupling)
            report_extra = {"converged": True, "sweeps_used": 1}
        elif kind == "krauth_mezard":
            params, km_report = krauth_mezard_train(params, s, spec.lr, spec.maxiter)
            report_extra = {
                "converged": km_report.converged,
                "sweeps_used": km_report.sweeps_used,
            }
        elif kind == "gardner_krauth_mezard":
            params, km_report = gardner_krauth_mezard_train(
                params, s, spec.lr, spec.margin_k, spec.maxiter
            )
            report_extra = {
                "converged": km_report.converged,
                "sweeps_used": km_report.sweeps_used,
                "min_normalized_margin": km_report.min_normalized_margin,
            }
        elif kind in _DESCENT_KINDS:
            params, steps, hit_tol, notes = _train_descent(params, s, spec)
            report_extra = {"converged": hit_tol, "sweeps_used": steps, "notes": notes}
        else:  # pragma: no cover - normalize_rule_name guards this
            raise ValueError(f"unknown rule kind {kind!r}")

    margins = stability_margins(params, s)
    report = TrainReport(
        min_margin=margins.min_raw,
        final_objective=rule_objective(params, s, spec),
        **report_extra,
    )
    return params, report
