"""Two-class homoscedastic Gaussian model: posteriors, Bayes rule, error rates.

The canonical configuration places the class means at +/- delta/2 on the
first coordinate axis with identity covariance, so every population quantity
reduces to functions of (delta, pi1, p).  General mixtures are handled
through ThetaParams; the discriminant coefficients are

    beta0 = log(pi1/pi2) - (mu1 + mu2)' Sigma^{-1} (mu1 - mu2) / 2,
    beta1 = Sigma^{-1} (mu1 - mu2),

the intercept including the prior log-odds term so that the logistic of the
discriminant equals the exact class-1 posterior.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import cho_factor, cho_solve
from scipy.stats import norm

from .errors import DegenerateCovarianceError, UndefinedRuleError

# Relative floor for the smallest eigenvalue of a covariance matrix.
_EIG_GUARD = 1e-10


def _readonly(a: np.ndarray) -> np.ndarray:
    out = np.array(a, dtype=float)
    out.setflags(write=False)
    return out


@dataclass(frozen=True)
class CanonicalModel:
    """Canonical two-class configuration (delta, pi1, p)."""

    delta: float
    pi1: float
    p: int = 1

    def __post_init__(self):
        if not self.delta > 0:
            raise ValueError(f"delta must be positive, got {self.delta}")
        if not 0 < self.pi1 < 1:
            raise ValueError(f"pi1 must lie in (0, 1), got {self.pi1}")
        if self.p < 1:
            raise ValueError(f"p must be a positive integer, got {self.p}")

    @property
    def pi2(self) -> float:
        return 1.0 - self.pi1

    @property
    def log_odds(self) -> float:
        """Prior log-odds log(pi1/pi2)."""
        return float(np.log(self.pi1 / self.pi2))

    @property
    def delta_star(self) -> float:
        """Shifted half-separation delta/2 - log_odds/delta."""
        return self.delta / 2.0 - self.log_odds / self.delta


@dataclass(frozen=True)
class ThetaParams:
    """General mixture parameters (pi1, mu1, mu2, common Sigma)."""

    pi1: float
    mu1: np.ndarray
    mu2: np.ndarray
    sigma: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "mu1", _readonly(np.atleast_1d(self.mu1)))
        object.__setattr__(self, "mu2", _readonly(np.atleast_1d(self.mu2)))
        object.__setattr__(self, "sigma", _readonly(np.atleast_2d(self.sigma)))
        if not 0 < self.pi1 < 1:
            raise ValueError(f"pi1 must lie in (0, 1), got {self.pi1}")
        p = self.mu1.shape[0]
        if self.mu2.shape != (p,) or self.sigma.shape != (p, p):
            raise ValueError("mu1, mu2, sigma have inconsistent dimensions")
        if not np.allclose(self.sigma, self.sigma.T, atol=1e-12):
            raise DegenerateCovarianceError("sigma is not symmetric")
        eigvals = np.linalg.eigvalsh(self.sigma)
        if eigvals[0] <= _EIG_GUARD * max(eigvals[-1], 1e-300):
            raise DegenerateCovarianceError(
                f"sigma fails the positive-definiteness guard "
                f"(min eigenvalue {eigvals[0]:.3e}, max {eigvals[-1]:.3e})"
            )
        if np.allclose(self.mu1, self.mu2):
            raise ValueError("class means coincide; classes are not distinct")

    @property
    def p(self) -> int:
        return self.mu1.shape[0]

    @property
    def pi2(self) -> float:
        return 1.0 - self.pi1


@dataclass(frozen=True)
class DiscriminantCoeffs:
    """Linear discriminant coefficients (intercept beta0, slope vector beta1)."""

    beta0: float
    beta1: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "beta1", _readonly(np.atleast_1d(self.beta1)))
        if not np.any(self.beta1 != 0.0):
            raise UndefinedRuleError("beta1 is identically zero")

    @property
    def p(self) -> int:
        return self.beta1.shape[0]


def canonical_theta(model: CanonicalModel) -> ThetaParams:
    """Mixture parameters implied by the canonical configuration."""
    mu1 = np.zeros(model.p)
    mu1[0] = model.delta / 2.0
    return ThetaParams(pi1=model.pi1, mu1=mu1, mu2=-mu1, sigma=np.eye(model.p))


def beta_from_theta(theta: ThetaParams) -> DiscriminantCoeffs:
    """Discriminant coefficients of the Bayes rule for a general mixture."""
    diff = theta.mu1 - theta.mu2
    try:
        factor = cho_factor(theta.sigma, lower=True)
    except np.linalg.LinAlgError as exc:  # pragma: no cover - guarded upstream
        raise DegenerateCovarianceError(str(exc)) from exc
    beta1 = cho_solve(factor, diff)
    beta0 = float(
        np.log(theta.pi1 / theta.pi2) - 0.5 * (theta.mu1 + theta.mu2) @ beta1
    )
    return DiscriminantCoeffs(beta0=beta0, beta1=beta1)


def discriminant(beta: DiscriminantCoeffs, y: np.ndarray) -> np.ndarray | float:
    """beta0 + beta1' y, broadcast over rows when y is (n, p)."""
    y = np.asarray(y, dtype=float)
    if y.ndim == 1 and y.shape[0] == beta.p:
        return float(beta.beta0 + y @ beta.beta1)
    if y.ndim == 2 and y.shape[1] == beta.p:
        return beta.beta0 + y @ beta.beta1
    raise ValueError(f"feature dimension mismatch: expected p={beta.p}, got {y.shape}")


def sigmoid(x):
    """Numerically stable logistic function."""
    x = np.asarray(x, dtype=float)
    out = np.empty_like(x)
    pos = x >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-x[pos]))
    ex = np.exp(x[~pos])
    out[~pos] = ex / (1.0 + ex)
    if out.ndim == 0:
        return float(out)
    return out


def posterior(beta: DiscriminantCoeffs, y) -> np.ndarray | float:
    """Posterior probability of class 1: logistic of the discriminant."""
    return sigmoid(discriminant(beta, y))


def entropy_from_discriminant(d) -> np.ndarray | float:
    """Shannon entropy of the two posterior probabilities, as a function of d.

    Uses tau1*softplus(-d) + tau2*softplus(d), which saturates cleanly to 0
    for large |d| without producing 0*inf.
    """
    d = np.asarray(d, dtype=float)
    tau1 = sigmoid(d)
    sp_pos = np.logaddexp(0.0, d)
    sp_neg = np.logaddexp(0.0, -d)
    e = tau1 * sp_neg + (1.0 - tau1) * sp_pos
    if e.ndim == 0:
        return float(e)
    return e


def entropy(beta: DiscriminantCoeffs, y) -> np.ndarray | float:
    """Shannon entropy of the posterior class probabilities at y."""
    return entropy_from_discriminant(discriminant(beta, y))


def bayes_allocate(beta: DiscriminantCoeffs, y) -> np.ndarray | int:
    """Allocate to class 1 when the discriminant is >= 0, else class 2.

    The boundary d = 0 goes to class 1 by convention so allocations are
    deterministic.
    """
    d = discriminant(beta, y)
    if np.ndim(d) == 0:
        return 1 if d >= 0.0 else 2
    return np.where(np.asarray(d) >= 0.0, 1, 2)


def optimal_error(model: CanonicalModel) -> float:
    """Error rate of the true Bayes rule under the canonical model."""
    lam = model.log_odds
    return float(
        model.pi1 * norm.cdf(-model.delta / 2.0 - lam / model.delta)
        + model.pi2 * norm.cdf(-model.delta_star)
    )


def conditional_error(beta_hat: DiscriminantCoeffs, model: CanonicalModel) -> float:
    """Error rate of the plug-in rule d(y; beta_hat) under the canonical truth.

    Under class i the discriminant is normal with mean beta0 + beta1' mu_i
    and standard deviation ||beta1||, which gives a closed form for the two
    misallocation probabilities.
    """
    if beta_hat.p != model.p:
        raise ValueError(
            f"dimension mismatch: rule has p={beta_hat.p}, model has p={model.p}"
        )
    scale = float(np.linalg.norm(beta_hat.beta1))
    if scale == 0.0:  # pragma: no cover - excluded by DiscriminantCoeffs
        raise UndefinedRuleError("beta1 is identically zero")
    mean1 = beta_hat.beta0 + beta_hat.beta1[0] * model.delta / 2.0
    mean2 = beta_hat.beta0 - beta_hat.beta1[0] * model.delta / 2.0
    return float(
        model.pi1 * norm.cdf(-mean1 / scale) + model.pi2 * norm.cdf(mean2 / scale)
    )
