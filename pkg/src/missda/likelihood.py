"""Log-likelihoods for the partially classified Gaussian model.

Four likelihood surfaces are exposed: the complete-data likelihood (all
labels present), the ignore-missingness likelihood (labeled records
contribute their class density, unlabeled records the mixture density), the
missingness Bernoulli likelihood of the missing-label indicators, and the
full likelihood, which is exactly the sum of the last two on the log scale.

All densities are evaluated in log space; mixture terms use log-sum-exp and
the Bernoulli terms use softplus, so values stay finite for discriminant
values of several hundred.  Parameter configurations that evaluate to
non-finite numbers yield a -inf sentinel instead of raising, which lets line
searches reject a step and continue.

Gradients are analytic and are taken with respect to the unconstrained
parameter vector of params.py; a finite-difference validation suite in the
tests pins their accuracy.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import cho_solve, solve_triangular

from .dataset import Dataset
from .errors import DataError
from .missingness import (
    DISCRIMINANT_SQUARE,
    ENTROPY,
    MCAR,
    FullParams,
    MissParams,
    selection_argument,
)
from .model import ThetaParams, sigmoid
from .params import chain_sigma_gradient, factor_from_packed, theta_dim


@dataclass(frozen=True)
class LogLikValue:
    """A log-likelihood value with the record counts that produced it."""

    value: float
    n_labeled: int
    n_unlabeled: int


# ---------------------------------------------------------------------------
# raw cores: operate on (alpha, mu1, mu2, lower factor L with Sigma = L L'),
# never on validated parameter objects, so optimizers can probe freely.
# ---------------------------------------------------------------------------


def _ignore_core(alpha, mu1, mu2, factor, y, labels, want_grad):
    n, p = y.shape
    pi1 = sigmoid(alpha)
    pi2 = 1.0 - pi1
    logdet = 2.0 * float(np.sum(np.log(np.diag(factor))))
    const = -0.5 * (p * np.log(2.0 * np.pi) + logdet)

    dev1 = y - mu1
    dev2 = y - mu2
    half1 = solve_triangular(factor, dev1.T, lower=True).T
    half2 = solve_triangular(factor, dev2.T, lower=True).T
    logphi1 = const - 0.5 * np.einsum("ij,ij->i", half1, half1)
    logphi2 = const - 0.5 * np.einsum("ij,ij->i", half2, half2)

    l1 = np.log(pi1) + logphi1
    l2 = np.log(pi2) + logphi2
    lab1 = labels == 1
    lab2 = labels == 2
    unl = labels == 0
    lmix = np.logaddexp(l1, l2)
    value = float(l1[lab1].sum() + l2[lab2].sum() + lmix[unl].sum())
    if not want_grad:
        return value, None

    w1 = np.zeros(n)
    w1[lab1] = 1.0
    w1[unl] = np.exp(l1[unl] - lmix[unl])
    w2 = 1.0 - w1

    sol1 = solve_triangular(factor, half1.T, lower=True, trans="T").T
    sol2 = solve_triangular(factor, half2.T, lower=True, trans="T").T

    dalpha = float(np.sum(w1 * pi2 - w2 * pi1))
    dmu1 = sol1.T @ w1
    dmu2 = sol2.T @ w2
    sigma_inv = cho_solve((factor, True), np.eye(p))
    grad_sigma = 0.5 * (
        sol1.T @ (sol1 * w1[:, None]) + sol2.T @ (sol2 * w2[:, None])
    ) - 0.5 * n * sigma_inv
    return value, (dalpha, dmu1, dmu2, grad_sigma)


def _selection_slope(d, arg, xi1, mechanism):
    """Derivative of the logistic argument with respect to the discriminant."""
    if mechanism == DISCRIMINANT_SQUARE:
        return 2.0 * xi1 * d
    if mechanism == ENTROPY:
        tau1 = sigmoid(d)
        return -xi1 * d * tau1 * (1.0 - tau1)
    return np.zeros_like(d)


def _miss_core(alpha, mu1, mu2, factor, xi0, xi1, mechanism, y, miss, want_grad):
    n, p = y.shape
    diff = mu1 - mu2
    center = 0.5 * (mu1 + mu2)
    s_diff = cho_solve((factor, True), diff)
    d = alpha + (y - center) @ s_diff

    xi = MissParams(xi0=float(xi0), xi1=float(xi1))
    arg = selection_argument(d, xi, mechanism)
    log_q = -np.logaddexp(0.0, -arg)
    log_1mq = -np.logaddexp(0.0, arg)
    value = float(log_q[miss].sum() + log_1mq[~miss].sum())
    if not want_grad:
        return value, None

    q = sigmoid(arg)
    resid = miss.astype(float) - q
    dxi0 = float(resid.sum())
    if mechanism == DISCRIMINANT_SQUARE:
        dxi1 = float(resid @ (d**2))
    elif mechanism == ENTROPY:
        from .model import entropy_from_discriminant

        dxi1 = float(resid @ entropy_from_discriminant(d))
    else:
        dxi1 = 0.0

    c = resid * _selection_slope(d, arg, xi1, mechanism)
    c_sum = float(c.sum())
    t = cho_solve((factor, True), (y - center).T @ c)
    dalpha = c_sum
    dmu1 = -0.5 * c_sum * s_diff + t
    dmu2 = -0.5 * c_sum * s_diff - t
    grad_sigma = -np.outer(t, s_diff)
    return value, (dalpha, dmu1, dmu2, grad_sigma, dxi0, dxi1)


def _pack_theta_grad(pieces, factor) -> np.ndarray:
    dalpha, dmu1, dmu2, grad_sigma = pieces
    return np.concatenate(
        [[dalpha], dmu1, dmu2, chain_sigma_gradient(grad_sigma, factor)]
    )


def raw_value_and_grad(x, p, y, labels, which, mechanism, want_grad=True):
    """Log-likelihood and packed gradient at an unconstrained vector x.

    `which` selects the surface: "ignore", "miss" or "full".  The returned
    gradient always has the full-parameter length (theta block plus two xi
    slots); slots the surface does not depend on are zero.  Non-finite values
    collapse to (-inf, zeros).
    """
    x = np.asarray(x, dtype=float)
    dim = theta_dim(p) + 2
    alpha = x[0]
    mu1 = x[1 : 1 + p]
    mu2 = x[1 + p : 1 + 2 * p]
    factor = factor_from_packed(x[1 + 2 * p : theta_dim(p)], p)
    xi0, xi1 = x[theta_dim(p)], x[theta_dim(p) + 1]

    with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
        value = 0.0
        grad = np.zeros(dim) if want_grad else None
        miss = labels == 0
        if which in ("ignore", "full"):
            v, g = _ignore_core(alpha, mu1, mu2, factor, y, labels, want_grad)
            value += v
            if want_grad and g is not None:
                grad[: theta_dim(p)] += _pack_theta_grad(g, factor)
        if which in ("miss", "full"):
            v, g = _miss_core(
                alpha, mu1, mu2, factor, xi0, xi1, mechanism, y, miss, want_grad
            )
            value += v
            if want_grad and g is not None:
                grad[: theta_dim(p)] += _pack_theta_grad(g[:4], factor)
                grad[theta_dim(p)] += g[4]
                grad[theta_dim(p) + 1] += g[5]
    if not np.isfinite(value) or (want_grad and not np.all(np.isfinite(grad))):
        return -np.inf, (np.zeros(dim) if want_grad else None)
    return value, grad


# ---------------------------------------------------------------------------
# public likelihood surface on validated parameter objects
# ---------------------------------------------------------------------------


def _theta_primitives(theta: ThetaParams):
    factor = np.linalg.cholesky(theta.sigma)
    alpha = float(np.log(theta.pi1 / theta.pi2))
    return alpha, theta.mu1, theta.mu2, factor


def loglik_complete(theta: ThetaParams, data: Dataset) -> LogLikValue:
    """Classified-data log-likelihood; every record must carry a label."""
    if data.n_unlabeled:
        raise DataError(
            f"loglik_complete requires fully labeled data; {data.n_unlabeled} "
            "records are unlabeled"
        )
    return loglik_ignore(theta, data)


def loglik_ignore(theta: ThetaParams, data: Dataset) -> LogLikValue:
    """Log-likelihood that ignores the missing-label mechanism."""
    alpha, mu1, mu2, factor = _theta_primitives(theta)
    value, _ = _ignore_core(alpha, mu1, mu2, factor, data.y, data.labels, False)
    if not np.isfinite(value):
        value = -np.inf
    return LogLikValue(value, data.n_labeled, data.n_unlabeled)


def loglik_miss(
    beta, xi: MissParams, data: Dataset, mechanism: str = DISCRIMINANT_SQUARE
) -> LogLikValue:
    """Bernoulli log-likelihood of the missing-label indicators."""
    d_arg = selection_argument(beta.beta0 + data.y @ beta.beta1, xi, mechanism)
    log_q = -np.logaddexp(0.0, -d_arg)
    log_1mq = -np.logaddexp(0.0, d_arg)
    miss = data.m
    value = float(log_q[miss].sum() + log_1mq[~miss].sum())
    if not np.isfinite(value):
        value = -np.inf
    return LogLikValue(value, data.n_labeled, data.n_unlabeled)


def loglik_full(psi: FullParams, data: Dataset) -> LogLikValue:
    """Full log-likelihood: ignore part plus missingness part.

    The discriminant coefficients inside the missingness part are recomputed
    from psi.theta, so the two parts share parameters.
    """
    from .model import beta_from_theta

    ig = loglik_ignore(psi.theta, data)
    mi = loglik_miss(beta_from_theta(psi.theta), psi.xi, data, psi.mechanism)
    return LogLikValue(ig.value + mi.value, data.n_labeled, data.n_unlabeled)


def grad_loglik(psi: FullParams, data: Dataset, which: str = "full") -> np.ndarray:
    """Gradient of the selected log-likelihood in unconstrained coordinates.

    The vector covers the full parameterization [theta block, xi0, xi1];
    components the surface does not involve are identically zero.
    """
    if which not in ("ignore", "miss", "full"):
        raise ValueError(f"which must be 'ignore', 'miss' or 'full', got {which!r}")
    from .params import pack_full

    x = pack_full(psi)
    value, grad = raw_value_and_grad(
        x, data.p, data.y, data.labels, which, psi.mechanism
    )
    if not np.isfinite(value):
        raise ValueError("log-likelihood is not finite at the supplied parameters")
    return grad
