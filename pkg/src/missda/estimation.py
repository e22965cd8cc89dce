"""Maximum-likelihood fitting of the mixture and selection parameters.

The complete-data estimate is closed form.  The ignore and full likelihoods
are maximized by a dense quasi-Newton method (BFGS with a Wolfe line search,
so accepted steps never decrease the objective) over the unconstrained
parameterization of params.py.  The objective is the negative log-likelihood
per observation, which makes the gradient tolerance meaningful across sample
sizes.  Non-converged fits are retried from jittered starts drawn from an
explicitly seeded stream, so fits are deterministic given (data, init,
config).
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, replace

import numpy as np
from scipy.optimize import minimize

from .dataset import Dataset
from .errors import DataError, DegenerateCovarianceError
from .likelihood import raw_value_and_grad
from .missingness import DISCRIMINANT_SQUARE, FullParams, MissParams
from .model import ThetaParams
from .params import pack_full, pack_theta, theta_dim, unpack_full, unpack_theta

_PENALTY = 1e100


@dataclass(frozen=True)
class FitConfig:
    """Optimizer contract: tolerance, budget, and restart policy."""

    gtol: float = 1e-6          # per-observation gradient sup-norm
    max_iter: int = 500
    restarts: int = 3
    restart_seed: int = 0
    restart_scale: float = 0.1
    fix_xi1: float | None = None


@dataclass(frozen=True)
class FitResult:
    params: ThetaParams | FullParams
    loglik: float
    iterations: int
    converged: bool
    gradient_norm: float
    restarts_used: int = 0


def fit_complete(data: Dataset) -> ThetaParams:
    """Closed-form ML estimate from a fully labeled sample.

    pi1 is the class-1 fraction, the means are class means, and sigma is the
    pooled within-class scatter with ML divisor n.
    """
    if data.n_unlabeled:
        raise DataError("fit_complete requires fully labeled data")
    if data.n <= data.p + 2:
        raise DataError(f"need n > p + 2 records, got n={data.n}, p={data.p}")
    y1 = data.y[data.labels == 1]
    y2 = data.y[data.labels == 2]
    if len(y1) < 2 or len(y2) < 2:
        raise DataError(
            f"need at least 2 records per class, got {len(y1)} and {len(y2)}"
        )
    mu1 = y1.mean(axis=0)
    mu2 = y2.mean(axis=0)
    dev1 = y1 - mu1
    dev2 = y2 - mu2
    sigma = (dev1.T @ dev1 + dev2.T @ dev2) / data.n
    return ThetaParams(pi1=len(y1) / data.n, mu1=mu1, mu2=mu2, sigma=sigma)


def _moment_start(data: Dataset) -> ThetaParams:
    """Fallback start when the labeled subset cannot anchor both classes."""
    y = data.y
    mean = y.mean(axis=0)
    cov = np.cov(y, rowvar=False, ddof=0).reshape(data.p, data.p)
    cov = cov + 1e-8 * (np.trace(cov) / data.p + 1.0) * np.eye(data.p)
    eigvals, eigvecs = np.linalg.eigh(cov)
    direction = eigvecs[:, -1]
    spread = 0.8 * np.sqrt(eigvals[-1])
    mu1 = mean + spread * direction
    mu2 = mean - spread * direction
    lab1 = data.y[data.labels == 1]
    if len(lab1) and np.linalg.norm(lab1.mean(axis=0) - mu1) > np.linalg.norm(
        lab1.mean(axis=0) - mu2
    ):
        mu1, mu2 = mu2, mu1
    return ThetaParams(pi1=0.5, mu1=mu1, mu2=mu2, sigma=cov)


def _default_theta_start(data: Dataset) -> ThetaParams:
    labeled = data.labeled_subset()
    try:
        return fit_complete(labeled)
    except (DataError, DegenerateCovarianceError):
        return _moment_start(data)


def _default_xi_start(data: Dataset) -> MissParams:
    rate = data.n_unlabeled / max(data.n, 1)
    rate = min(max(rate, 1e-12), 1.0 - 1e-12)
    xi0 = float(np.clip(np.log(rate / (1.0 - rate)), -5.0, 5.0))
    return MissParams(xi0=xi0, xi1=-1.0)


def _maximize(objective, x0: np.ndarray, config: FitConfig, free: np.ndarray):
    """Quasi-Newton maximization with jittered restarts on non-convergence.

    `objective(x_full)` returns (loglik, grad) for the full vector; frozen
    coordinates (free == False) are held at their x0 values.
    """
    x_fixed = x0.copy()

    def neg(x_free):
        x = x_fixed.copy()
        x[free] = x_free
        value, grad = objective(x)
        if not np.isfinite(value):
            return _PENALTY, np.zeros(free.sum())
        return -value, -grad[free]

    rng = np.random.default_rng(config.restart_seed)
    best = None
    total_iter = 0
    restarts_used = 0
    start = x0[free]
    for attempt in range(config.restarts + 1):
        res = minimize(
            neg,
            start,
            method="BFGS",
            jac=True,
            options={"gtol": config.gtol, "maxiter": config.max_iter},
        )
        total_iter += int(res.nit)
        gnorm = float(np.max(np.abs(res.jac))) if res.jac is not None else np.inf
        candidate = (float(res.fun), gnorm, res.x)
        if best is None or candidate[0] < best[0]:
            best = candidate
        if best[1] <= config.gtol:
            break
        restarts_used = attempt + 1
        scale = config.restart_scale * np.maximum(1.0, np.abs(x0[free]))
        start = x0[free] + rng.normal(0.0, scale)
    neg_value, gnorm, x_free = best
    x = x_fixed.copy()
    x[free] = x_free
    converged = bool(gnorm <= config.gtol) and neg_value < _PENALTY
    return x, -neg_value, total_iter, converged, gnorm, min(restarts_used, config.restarts)


def fit_ignore(
    data: Dataset, init: ThetaParams | None = None, config: FitConfig | None = None
) -> FitResult:
    """Maximize the ignore-missingness likelihood over theta."""
    config = config or FitConfig()
    theta0 = init if init is not None else _default_theta_start(data)
    x0 = np.concatenate([pack_theta(theta0), [0.0, 0.0]])
    free = np.ones(x0.size, dtype=bool)
    free[-2:] = False

    scale = 1.0 / max(data.n, 1)

    def objective(x):
        value, grad = raw_value_and_grad(
            x, data.p, data.y, data.labels, "ignore", DISCRIMINANT_SQUARE
        )
        return value * scale, (grad * scale if grad is not None else None)

    x, value, iters, converged, gnorm, restarts = _maximize(objective, x0, config, free)
    theta = unpack_theta(x[: theta_dim(data.p)], data.p)
    return FitResult(
        params=theta,
        loglik=value * data.n,
        iterations=iters,
        converged=converged,
        gradient_norm=gnorm,
        restarts_used=restarts,
    )


def fit_full(
    data: Dataset,
    init: FullParams | None = None,
    config: FitConfig | None = None,
    mechanism: str = DISCRIMINANT_SQUARE,
) -> FitResult:
    """Maximize the full likelihood over (theta, xi)."""
    config = config or FitConfig()
    if data.n_labeled == 0 or data.n_unlabeled == 0:
        warnings.warn(
            "full-likelihood fit works best with both labeled and unlabeled "
            f"records (got {data.n_labeled} labeled, {data.n_unlabeled} unlabeled)",
            stacklevel=2,
        )
    if init is not None:
        mechanism = init.mechanism
        psi0 = init
    else:
        psi0 = FullParams(
            theta=_default_theta_start(data),
            xi=_default_xi_start(data),
            mechanism=mechanism,
        )
    x0 = pack_full(psi0)
    free = np.ones(x0.size, dtype=bool)
    if config.fix_xi1 is not None:
        x0[-1] = config.fix_xi1
        free[-1] = False

    scale = 1.0 / max(data.n, 1)

    def objective(x):
        value, grad = raw_value_and_grad(
            x, data.p, data.y, data.labels, "full", mechanism
        )
        return value * scale, (grad * scale if grad is not None else None)

    x, value, iters, converged, gnorm, restarts = _maximize(objective, x0, config, free)
    psi = unpack_full(x, data.p, mechanism)
    return FitResult(
        params=psi,
        loglik=value * data.n,
        iterations=iters,
        converged=converged,
        gradient_norm=gnorm,
        restarts_used=restarts,
    )
