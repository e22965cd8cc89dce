"""Unconstrained parameter vector used by the likelihood optimizers.

Layout: [logit(pi1), mu1 (p), mu2 (p), lower Cholesky factor of Sigma packed
row-major with log-transformed diagonal (p(p+1)/2)] and, for joint fits,
[xi0, xi1] appended.  The map is a bijection onto valid parameters: pi1 stays
inside (0, 1) and Sigma stays positive definite for every real vector.
"""

from __future__ import annotations

import numpy as np

from .missingness import DISCRIMINANT_SQUARE, FullParams, MissParams
from .model import ThetaParams, sigmoid


def theta_dim(p: int) -> int:
    return 1 + 2 * p + p * (p + 1) // 2


def full_dim(p: int) -> int:
    return theta_dim(p) + 2


def _tril_rowmajor(p: int):
    rows, cols = [], []
    for i in range(p):
        for j in range(i + 1):
            rows.append(i)
            cols.append(j)
    return np.array(rows), np.array(cols)


def pack_theta(theta: ThetaParams) -> np.ndarray:
    p = theta.p
    factor = np.linalg.cholesky(theta.sigma)
    entries = factor[_tril_rowmajor(p)]
    diag_pos = np.cumsum(np.arange(1, p + 1)) - 1  # positions of L[i, i]
    entries = entries.copy()
    entries[diag_pos] = np.log(entries[diag_pos])
    alpha = np.log(theta.pi1 / (1.0 - theta.pi1))
    return np.concatenate([[alpha], theta.mu1, theta.mu2, entries])


def factor_from_packed(entries: np.ndarray, p: int) -> np.ndarray:
    factor = np.zeros((p, p))
    factor[_tril_rowmajor(p)] = entries
    idx = np.arange(p)
    factor[idx, idx] = np.exp(factor[idx, idx])
    return factor


def unpack_theta(vec: np.ndarray, p: int) -> ThetaParams:
    vec = np.asarray(vec, dtype=float)
    alpha = vec[0]
    mu1 = vec[1 : 1 + p]
    mu2 = vec[1 + p : 1 + 2 * p]
    factor = factor_from_packed(vec[1 + 2 * p :], p)
    return ThetaParams(
        pi1=float(sigmoid(alpha)), mu1=mu1, mu2=mu2, sigma=factor @ factor.T
    )


def pack_full(psi: FullParams) -> np.ndarray:
    return np.concatenate([pack_theta(psi.theta), [psi.xi.xi0, psi.xi.xi1]])


def unpack_full(vec: np.ndarray, p: int, mechanism: str = DISCRIMINANT_SQUARE) -> FullParams:
    vec = np.asarray(vec, dtype=float)
    theta = unpack_theta(vec[:-2], p)
    return FullParams(
        theta=theta, xi=MissParams(xi0=float(vec[-2]), xi1=float(vec[-1])), mechanism=mechanism
    )


def chain_sigma_gradient(grad_sigma: np.ndarray, factor: np.ndarray) -> np.ndarray:
    """Map d f / d Sigma (full-matrix convention) to the packed factor coordinates.

    For f(L L') the factor gradient is (G + G') L; the log-diagonal
    reparameterization multiplies each diagonal entry by L[i, i].
    """
    p = factor.shape[0]
    grad_factor = (grad_sigma + grad_sigma.T) @ factor
    idx = np.arange(p)
    grad_factor[idx, idx] *= factor[idx, idx]
    return grad_factor[_tril_rowmajor(p)]
