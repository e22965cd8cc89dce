"""Missing-label selection mechanism and its expected missing proportion.

The probability that a feature vector loses its label is a logistic function
of a scalar summary of classification difficulty: the squared discriminant
(the working choice for all exact computations), the posterior entropy, or a
constant (MCAR).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from .model import (
    DiscriminantCoeffs,
    ThetaParams,
    beta_from_theta,
    discriminant,
    entropy_from_discriminant,
    sigmoid,
)

DISCRIMINANT_SQUARE = "discriminant-square"
ENTROPY = "entropy"
MCAR = "mcar"
MECHANISMS = (DISCRIMINANT_SQUARE, ENTROPY, MCAR)


def _check_mechanism(mechanism: str) -> str:
    if mechanism not in MECHANISMS:
        raise ValueError(f"unknown mechanism {mechanism!r}; expected one of {MECHANISMS}")
    return mechanism


@dataclass(frozen=True)
class MissParams:
    """Logistic selection parameters (intercept xi0, slope xi1)."""

    xi0: float
    xi1: float

    def __post_init__(self):
        if not (np.isfinite(self.xi0) and np.isfinite(self.xi1)):
            raise ValueError("xi0 and xi1 must be finite")


@dataclass(frozen=True)
class FullParams:
    """Joint parameter bundle: mixture theta, selection xi, mechanism tag."""

    theta: ThetaParams
    xi: MissParams
    mechanism: str = DISCRIMINANT_SQUARE

    def __post_init__(self):
        _check_mechanism(self.mechanism)


def selection_argument(d, xi: MissParams, mechanism: str):
    """Logistic argument of the missing-label probability as a function of d."""
    d = np.asarray(d, dtype=float)
    if mechanism == DISCRIMINANT_SQUARE:
        return xi.xi0 + xi.xi1 * d**2
    if mechanism == ENTROPY:
        return xi.xi0 + xi.xi1 * entropy_from_discriminant(d)
    if mechanism == MCAR:
        return np.full_like(d, xi.xi0)
    raise ValueError(f"unknown mechanism {mechanism!r}")


def q_prob(
    beta: DiscriminantCoeffs,
    xi: MissParams,
    y,
    mechanism: str = DISCRIMINANT_SQUARE,
):
    """Probability that the label of y is missing."""
    _check_mechanism(mechanism)
    d = discriminant(beta, y)
    return sigmoid(selection_argument(d, xi, mechanism))


def q_breakpoints(xi: MissParams, mechanism: str) -> tuple[float, ...]:
    """Locations on the discriminant scale where the logistic argument crosses zero.

    These are the only steep features of the selection probability; quadrature
    panels are split there.
    """
    if mechanism == MCAR or xi.xi1 == 0.0:
        return ()
    if mechanism == DISCRIMINANT_SQUARE:
        ratio = -xi.xi0 / xi.xi1
        if ratio <= 0.0:
            return ()
        root = float(np.sqrt(ratio))
        return (-root, root)
    if mechanism == ENTROPY:
        target = -xi.xi0 / xi.xi1
        if not 0.0 < target < np.log(2.0):
            return ()
        root = float(brentq(lambda d: entropy_from_discriminant(d) - target, 0.0, 60.0))
        return (-root, root)
    raise ValueError(f"unknown mechanism {mechanism!r}")


def gamma(psi: FullParams) -> float:
    """Expected proportion of missing labels, E[q(Y)], under psi.

    The selection probability depends on Y only through the scalar
    discriminant d(Y), which is itself a two-component normal mixture under
    the fitted model, so the expectation reduces to a univariate quadrature
    on the discriminant scale.
    """
    from .quadrature import two_normal_expectation

    _check_mechanism(psi.mechanism)
    if psi.mechanism == MCAR or psi.xi.xi1 == 0.0:
        return float(sigmoid(psi.xi.xi0))
    beta = beta_from_theta(psi.theta)
    sd = float(np.sqrt(beta.beta1 @ psi.theta.sigma @ beta.beta1))
    means = (
        beta.beta0 + float(beta.beta1 @ psi.theta.mu1),
        beta.beta0 + float(beta.beta1 @ psi.theta.mu2),
    )
    return two_normal_expectation(
        lambda d: sigmoid(selection_argument(d, psi.xi, psi.mechanism)),
        means=means,
        sds=(sd, sd),
        weights=(psi.theta.pi1, psi.theta.pi2),
        breakpoints=q_breakpoints(psi.xi, psi.mechanism),
    )


def gamma_canonical(
    model, xi: MissParams, mechanism: str = DISCRIMINANT_SQUARE
) -> float:
    """gamma for the canonical configuration (delta, pi1)."""
    from .model import canonical_theta

    return gamma(FullParams(theta=canonical_theta(model), xi=xi, mechanism=mechanism))
