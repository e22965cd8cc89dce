"""Exact per-observation information matrices about the discriminant coefficients.

All matrices are (p+1) x (p+1), rows and columns indexed 0..p to match
(beta0, beta1_1, ..., beta1_p), and are evaluated under the canonical model.
Conditional independence of the trailing coordinates makes every matrix here
dense only in its leading 2x2 block, with a constant trailing diagonal:

    complete-data:          [[a0, a1], [a1, a2]],  tail a3
    conditional logistic:   [[d0, d1], [d1, d2]],  tail d0
    missing-label:          [[b0-w0, b1-w1], [b1-w1, b2-w2]],  tail b0
    full:                   [[h0, h1], [h1, h2]],  tail u0 = a3 - gamma*d0 + b0

The a-block comes from inverting the closed-form 2x2 covariance block; the
d, b, r and s scalars are mixture expectations of score products under the
squared-discriminant selection model, and the w-block is the R S^{-1} R'
correction for the selection parameters having to be estimated.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConditioningError
from .missingness import (
    DISCRIMINANT_SQUARE,
    MissParams,
    gamma_canonical,
    q_breakpoints,
    selection_argument,
)
from .model import CanonicalModel, sigmoid
from .quadrature import mixture_expectation

# Information matrices with a condition number beyond this are reported as
# near-singular instead of silently inverted.
MAX_CONDITION = 1e12


@dataclass(frozen=True)
class InfoBlocks:
    """Scalar building blocks of the information decomposition."""

    a0: float
    a1: float
    a2: float
    a3: float
    d0: float
    d1: float
    d2: float
    b0: float
    b1: float
    b2: float
    r0: float
    r1: float
    r2: float
    r3: float
    s0: float
    s1: float
    s2: float
    w0: float
    w1: float
    w2: float
    u0: float
    gamma: float


def _invert_2x2(m: np.ndarray) -> np.ndarray:
    det = m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0]
    if det == 0.0:
        raise ConditioningError("2x2 block is singular")
    return np.array([[m[1, 1], -m[0, 1]], [-m[1, 0], m[0, 0]]]) / det


def invert_info(matrix: np.ndarray) -> np.ndarray:
    """Inverse of an information matrix, refusing near-singular input."""
    cond = np.linalg.cond(matrix)
    if not np.isfinite(cond) or cond > MAX_CONDITION:
        raise ConditioningError(
            f"information matrix is near-singular (condition number {cond:.3e}); "
            "refusing to invert"
        )
    return np.linalg.inv(matrix)


def _assemble(top: np.ndarray, tail: float, p: int) -> np.ndarray:
    out = np.zeros((p + 1, p + 1))
    out[:2, :2] = top
    for j in range(2, p + 1):
        out[j, j] = tail
    return out


def _a_scalars(model: CanonicalModel) -> tuple[float, float, float, float]:
    pi1, pi2, delta = model.pi1, model.pi2, model.delta
    cov_block = (
        np.array(
            [
                [1.0 + delta**2 / 4.0, -(pi2 - pi1) * delta / 2.0],
                [-(pi2 - pi1) * delta / 2.0, 1.0 + 2.0 * pi1 * pi2 * delta**2],
            ]
        )
        / (pi1 * pi2)
    )
    a_block = _invert_2x2(cov_block)
    a3 = pi1 * pi2 / (1.0 + delta**2 * pi1 * pi2)
    return float(a_block[0, 0]), float(a_block[0, 1]), float(a_block[1, 1]), float(a3)


def info_cc_beta(model: CanonicalModel) -> np.ndarray:
    """Information about beta in a completely classified sample."""
    a0, a1, a2, a3 = _a_scalars(model)
    return _assemble(np.array([[a0, a1], [a1, a2]]), a3, model.p)


def _feature_breakpoints(model: CanonicalModel, xi: MissParams) -> tuple[float, ...]:
    """Selection-probability transitions mapped from the d scale to the y1 scale."""
    lam = model.log_odds
    return tuple(
        (d - lam) / model.delta
        for d in q_breakpoints(xi, DISCRIMINANT_SQUARE)
    )


def _tau_product(model: CanonicalModel):
    lam, delta = model.log_odds, model.delta
    def tt(y):
        tau1 = sigmoid(lam + delta * y)
        return tau1 * (1.0 - tau1)
    return tt


def logistic_regression_moments(model: CanonicalModel) -> tuple[float, float, float]:
    """Unconditional logistic-information entries: E[y1^k tau1 tau2], k = 0, 1, 2."""
    tt = _tau_product(model)
    return tuple(
        mixture_expectation(lambda y, k=k: y**k * tt(y), model.delta, model.pi1)
        for k in range(3)
    )


def info_clr_beta(model: CanonicalModel, xi: MissParams) -> np.ndarray:
    """Conditional logistic-regression information about beta given a missing label."""
    d0, d1, d2, _ = _d_scalars(model, xi)
    return _assemble(np.array([[d0, d1], [d1, d2]]), d0, model.p)


def _d_scalars(model: CanonicalModel, xi: MissParams):
    gam = gamma_canonical(model, xi)
    if gam <= 1e-300:
        raise ConditioningError(
            "expected missing proportion is zero; conditional information undefined"
        )
    lam, delta = model.log_odds, model.delta
    tt = _tau_product(model)
    bps = _feature_breakpoints(model, xi)

    def q1(y):
        return sigmoid(selection_argument(lam + delta * y, xi, DISCRIMINANT_SQUARE))

    dk = [
        mixture_expectation(
            lambda y, k=k: y**k * tt(y) * q1(y) / gam,
            model.delta,
            model.pi1,
            breakpoints=bps,
        )
        for k in range(3)
    ]
    return dk[0], dk[1], dk[2], gam


def info_miss_blocks(model: CanonicalModel, xi: MissParams) -> InfoBlocks:
    """All scalar blocks of the decomposition under the squared-discriminant model."""
    a0, a1, a2, a3 = _a_scalars(model)
    d0, d1, d2, gam = _d_scalars(model, xi)
    lam, delta = model.log_odds, model.delta
    xi1 = xi.xi1
    bps = _feature_breakpoints(model, xi)

    def q1(y):
        return sigmoid(selection_argument(lam + delta * y, xi, DISCRIMINANT_SQUARE))

    def qq(y):
        q = q1(y)
        return q * (1.0 - q)

    def dd(y):
        return lam + delta * y

    def expect(fn):
        return mixture_expectation(fn, model.delta, model.pi1, breakpoints=bps)

    # score products: the beta-score of the Bernoulli part is
    # (m - q) * 2*xi1*d * (1, y'), the xi-score is (m - q) * (1, d^2)
    b0 = expect(lambda y: 4.0 * xi1**2 * dd(y) ** 2 * qq(y))
    b1 = expect(lambda y: 4.0 * xi1**2 * dd(y) ** 2 * y * qq(y))
    b2 = expect(lambda y: 4.0 * xi1**2 * dd(y) ** 2 * y**2 * qq(y))
    r0 = expect(lambda y: 2.0 * xi1 * dd(y) * qq(y))
    r1 = expect(lambda y: 2.0 * xi1 * dd(y) ** 3 * qq(y))
    r2 = expect(lambda y: 2.0 * xi1 * dd(y) * y * qq(y))
    r3 = expect(lambda y: 2.0 * xi1 * dd(y) ** 3 * y * qq(y))
    s0 = expect(qq)
    s1 = expect(lambda y: dd(y) ** 2 * qq(y))
    s2 = expect(lambda y: dd(y) ** 4 * qq(y))

    if xi1 == 0.0:
        w0 = w1 = w2 = 0.0
    else:
        r_block = np.array([[r0, r1], [r2, r3]])
        s_block = np.array([[s0, s1], [s1, s2]])
        det = s_block[0, 0] * s_block[1, 1] - s_block[0, 1] ** 2
        if det <= 0.0:
            raise ConditioningError(
                "selection-parameter information block is not positive definite"
            )
        w_block = r_block @ _invert_2x2(s_block) @ r_block.T
        w0, w1, w2 = float(w_block[0, 0]), float(w_block[0, 1]), float(w_block[1, 1])

    u0 = a3 - gam * d0 + b0
    return InfoBlocks(
        a0=a0, a1=a1, a2=a2, a3=a3,
        d0=d0, d1=d1, d2=d2,
        b0=b0, b1=b1, b2=b2,
        r0=r0, r1=r1, r2=r2, r3=r3,
        s0=s0, s1=s1, s2=s2,
        w0=w0, w1=w1, w2=w2,
        u0=u0, gamma=gam,
    )


def info_miss_beta(model: CanonicalModel, xi: MissParams) -> np.ndarray:
    """Information about beta carried by the missing-label indicators."""
    bl = info_miss_blocks(model, xi)
    top = np.array(
        [[bl.b0 - bl.w0, bl.b1 - bl.w1], [bl.b1 - bl.w1, bl.b2 - bl.w2]]
    )
    return _assemble(top, bl.b0, model.p)


def full_info_top_block(blocks: InfoBlocks) -> np.ndarray:
    """Leading 2x2 block of the full-likelihood information about beta."""
    return np.array(
        [
            [
                blocks.a0 - blocks.gamma * blocks.d0 + blocks.b0 - blocks.w0,
                blocks.a1 - blocks.gamma * blocks.d1 + blocks.b1 - blocks.w1,
            ],
            [
                blocks.a1 - blocks.gamma * blocks.d1 + blocks.b1 - blocks.w1,
                blocks.a2 - blocks.gamma * blocks.d2 + blocks.b2 - blocks.w2,
            ],
        ]
    )


def info_full_beta(model: CanonicalModel, xi: MissParams) -> np.ndarray:
    """Full-likelihood information about beta in the partially classified sample.

    Equals info_cc_beta - gamma * info_clr_beta + info_miss_beta, assembled
    directly from the scalar blocks.
    """
    blocks = info_miss_blocks(model, xi)
    return _assemble(full_info_top_block(blocks), blocks.u0, model.p)


def info_ig_beta(model: CanonicalModel, gamma_bar: float) -> np.ndarray:
    """Information about beta when a fraction gamma_bar of labels is missing
    completely at random and the missingness is ignored."""
    if not 0.0 <= gamma_bar <= 1.0:
        raise ValueError(f"gamma_bar must lie in [0, 1], got {gamma_bar}")
    lr0, lr1, lr2 = logistic_regression_moments(model)
    lr_matrix = _assemble(np.array([[lr0, lr1], [lr1, lr2]]), lr0, model.p)
    return info_cc_beta(model) - gamma_bar * lr_matrix
