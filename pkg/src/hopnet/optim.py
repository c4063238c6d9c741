"""Per-neuron quadratic training objective and Newton-style solvers.

Training a single neuron against p stored patterns reduces to fitting an
augmented weight vector ``w = (row of W, bias)`` of length n+1.  With
``Z`` the (n+1, p) matrix whose columns are augmented patterns (trailing
entry fixed to +1) and ``t`` the length-p vector of target spins for this
neuron, the regularized least-squares objective is

    f(w) = 1/2 sum_mu (lam * h_mu - t_mu)^2 + alpha/2 * |w|^2,
    h_mu = w . Z[:, mu]

Its Hessian ``alpha I + lam^2 Z Z^T`` is constant, so one exact Newton step
minimizes f.  Two inverse Hessian constructions are provided: an exact
closed form for the single-pattern (rank-one) case and a truncated Neumann
series for batches, valid only while the series converges.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "DivergenceError",
    "HessianInverse",
    "augment_pattern",
    "augmented_pattern_matrix",
    "correlation_matrix",
    "l2_objective",
    "l2_gradient",
    "hessian",
    "hessian_inverse_neumann",
    "hessian_inverse_rank_one",
    "newton_step",
]


class DivergenceError(RuntimeError):
    """A series approximation was requested outside its region of convergence."""


@dataclass
class HessianInverse:
    """An inverse (or approximate inverse) Hessian with its provenance tag."""

    matrix: np.ndarray
    method: str  # "neumann_truncated" or "rank_one_exact"
    terms: int | None = None


def augment_pattern(pattern) -> np.ndarray:
    """Append the constant +1 input that carries the bias."""
    pattern = np.asarray(pattern, dtype=np.float64)
    if pattern.ndim != 1:
        raise ValueError("pattern must be one-dimensional")
    return np.concatenate([pattern, [1.0]])


def augmented_pattern_matrix(patterns) -> np.ndarray:
    """Stack patterns as columns and append the all-ones bias row: shape (n+1, p)."""
    arr = np.asarray(patterns, dtype=np.float64)
    if arr.ndim == 1:
        arr = arr[None, :]
    if arr.ndim != 2 or arr.shape[0] < 1:
        raise ValueError("expected a non-empty batch of patterns")
    return np.vstack([arr.T, np.ones((1, arr.shape[0]))])


def correlation_matrix(z: np.ndarray) -> np.ndarray:
    """Gram matrix Z^T Z of the augmented patterns, shape (p, p)."""
    z = np.asarray(z, dtype=np.float64)
    return z.T @ z


def _check_z_w_targets(w, z, targets):
    w = np.asarray(w, dtype=np.float64)
    z = np.asarray(z, dtype=np.float64)
    t = np.asarray(targets, dtype=np.float64)
    if z.ndim != 2:
        raise ValueError("Z must be a 2-d matrix of augmented pattern columns")
    if w.shape != (z.shape[0],):
        raise ValueError(f"w has shape {w.shape}, expected ({z.shape[0]},)")
    if t.shape != (z.shape[1],):
        raise ValueError(f"targets have shape {t.shape}, expected ({z.shape[1]},)")
    return w, z, t


def l2_objective(w, z, targets, lam: float, alpha: float) -> float:
    w, z, t = _check_z_w_targets(w, z, targets)
    resid = lam * (z.T @ w) - t
    return float(0.5 * resid @ resid + 0.5 * alpha * w @ w)


def l2_gradient(w, z, targets, lam: float, alpha: float) -> np.ndarray:
    w, z, t = _check_z_w_targets(w, z, targets)
    return lam * (z @ (lam * (z.T @ w) - t)) + alpha * w


def hessian(z, lam: float, alpha: float) -> np.ndarray:
    """alpha I + lam^2 Z Z^T, independent of w and of the targets."""
    z = np.asarray(z, dtype=np.float64)
    d = z.shape[0]
    return alpha * np.eye(d) + lam**2 * (z @ z.T)


def hessian_inverse_neumann(z, lam: float, alpha: float, terms: int = 2) -> HessianInverse:
    """Truncated Neumann expansion of (alpha I + lam^2 Z Z^T)^-1.

    Writing H = alpha (I + beta Z Z^T) with beta = lam^2 / alpha, the series
    H^-1 = (1/alpha) sum_k (-beta Z Z^T)^k converges iff
    beta * lambda_max(Z Z^T) < 1; outside that region DivergenceError is
    raised.  ``terms`` counts retained powers, so terms=1 gives (1/alpha) I.
    """
    if alpha <= 0:
        raise ValueError("alpha must be positive")
    if terms < 1:
        raise ValueError("terms must be at least 1")
    z = np.asarray(z, dtype=np.float64)
    d, p = z.shape
    beta = lam**2 / alpha
    gram = z.T @ z
    lam_max = float(np.linalg.eigvalsh(gram).max()) if p > 0 else 0.0
    radius = beta * lam_max
    if radius >= 1.0:
        raise DivergenceError(
            f"Neumann series diverges: (lam^2/alpha) * lambda_max = {radius:.6g} >= 1"
        )
    # (Z Z^T)^k = Z (Z^T Z)^(k-1) Z^T keeps the accumulation p x p.
    acc = np.zeros((p, p))
    power = np.eye(p)
    for k in range(1, terms):
        acc = acc + (-beta) ** k * power
        power = power @ gram
    inv = (np.eye(d) + z @ acc @ z.T) / alpha
    return HessianInverse(inv, "neumann_truncated", terms)


def hessian_inverse_rank_one(sigma_aug, lam: float, alpha: float) -> HessianInverse:
    """Exact inverse of alpha I + lam^2 sigma sigma^T for one augmented pattern."""
    if alpha <= 0:
        raise ValueError("alpha must be positive")
    sigma = np.asarray(sigma_aug, dtype=np.float64)
    if sigma.ndim != 1:
        raise ValueError("sigma_aug must be one-dimensional")
    d = sigma.shape[0]
    coef = lam**2 / (alpha + lam**2 * float(sigma @ sigma))
    inv = (np.eye(d) - coef * np.outer(sigma, sigma)) / alpha
    return HessianInverse(inv, "rank_one_exact")


def newton_step(w, z, targets, lam: float, alpha: float, hess_inv: HessianInverse) -> np.ndarray:
    """w - H^-1 grad f(w); exact minimizer when hess_inv is the exact inverse."""
    grad = l2_gradient(w, z, targets, lam, alpha)
    return np.asarray(w, dtype=np.float64) - hess_inv.matrix @ grad
