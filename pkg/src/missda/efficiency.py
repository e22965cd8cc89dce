"""Excess-error expansions and asymptotic relative efficiencies.

The expected error of a plug-in rule exceeds the optimal rate by c/n to
first order, where c depends on the asymptotic covariance V of the
coefficient estimator through

    c = pi1 * phi(delta_star) / (2 delta)
        * (v00 - (2 lam/delta) v01 + (lam/delta)^2 v11 + sum_{i>=2} v_ii).

Relative efficiencies are ratios of these coefficients.  For the
full-likelihood rule they reduce to closed forms in the scalar information
blocks: with equal priors ARE = 4 (1 + delta^2/4) u0 for every p, and in
general ARE = (Q1 + (p-1) Q2) / (Q3 + (p-1) Q4).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.stats import norm

from .errors import MissdaError
from .information import (
    InfoBlocks,
    _invert_2x2,
    full_info_top_block,
    info_cc_beta,
    info_ig_beta,
    info_miss_blocks,
    invert_info,
)
from .missingness import MissParams
from .model import CanonicalModel


@dataclass(frozen=True)
class AREResult:
    """Asymptotic relative efficiency with its excess-error ingredients."""

    are: float
    numerator_excess_coeff: float
    denominator_excess_coeff: float
    q1_: float | None = None
    q2_: float | None = None
    q3_: float | None = None
    q4_: float | None = None


def excess_error_coeff(V: np.ndarray, model: CanonicalModel) -> float:
    """First-order excess-error coefficient (per 1/n) for covariance V."""
    V = np.asarray(V, dtype=float)
    if V.shape != (model.p + 1, model.p + 1):
        raise ValueError(
            f"V must be ({model.p + 1}, {model.p + 1}) for p={model.p}, got {V.shape}"
        )
    lam, delta = model.log_odds, model.delta
    quad = (
        V[0, 0]
        - (2.0 * lam / delta) * V[0, 1]
        + (lam / delta) ** 2 * V[1, 1]
        + float(np.trace(V[2:, 2:]))
    )
    return float(model.pi1 * norm.pdf(model.delta_star) / (2.0 * delta) * quad)


def _q_constants(model: CanonicalModel, blocks: InfoBlocks):
    pi1, pi2, delta = model.pi1, model.pi2, model.delta
    lam = model.log_odds
    contrast = np.array([1.0, -lam / delta])
    cov_block = (
        np.array(
            [
                [1.0 + delta**2 / 4.0, -(pi2 - pi1) * delta / 2.0],
                [-(pi2 - pi1) * delta / 2.0, 1.0 + 2.0 * pi1 * pi2 * delta**2],
            ]
        )
        / (pi1 * pi2)
    )
    q1 = float(contrast @ cov_block @ contrast)
    q2 = float((1.0 + pi1 * pi2 * delta**2) / (pi1 * pi2))
    h_block = full_info_top_block(blocks)
    q3 = float(contrast @ _invert_2x2(h_block) @ contrast)
    q4 = 1.0 / blocks.u0
    return q1, q2, q3, q4


def general_prior_are(model: CanonicalModel, xi: MissParams) -> AREResult:
    """ARE of the full-likelihood rule via the general-prior Q constants."""
    blocks = info_miss_blocks(model, xi)
    q1, q2, q3, q4 = _q_constants(model, blocks)
    prefactor = model.pi1 * norm.pdf(model.delta_star) / (2.0 * model.delta)
    num = prefactor * (q1 + (model.p - 1) * q2)
    den = prefactor * (q3 + (model.p - 1) * q4)
    return AREResult(
        are=num / den,
        numerator_excess_coeff=float(num),
        denominator_excess_coeff=float(den),
        q1_=q1, q2_=q2, q3_=q3, q4_=q4,
    )


def are_full(model: CanonicalModel, xi: MissParams) -> AREResult:
    """ARE of the full-likelihood partially-classified rule versus the
    completely classified rule.

    With equal priors the ratio collapses to 4 (1 + delta^2/4) u0,
    independent of p; otherwise the general Q-constant form is used.
    """
    if model.pi1 == 0.5:
        blocks = info_miss_blocks(model, xi)
        scale = 4.0 * (1.0 + model.delta**2 / 4.0)
        are = scale * blocks.u0
        prefactor = model.pi1 * norm.pdf(model.delta_star) / (2.0 * model.delta)
        num = prefactor * model.p * scale
        den = prefactor * model.p / blocks.u0
        return AREResult(
            are=float(are),
            numerator_excess_coeff=float(num),
            denominator_excess_coeff=float(den),
            q1_=scale, q2_=scale, q3_=1.0 / blocks.u0, q4_=1.0 / blocks.u0,
        )
    return general_prior_are(model, xi)


def are_ignore_mcar(
    model: CanonicalModel, gamma_bar: float, p: int | None = None
) -> AREResult:
    """ARE of the ignore-missingness rule under MCAR labels versus the
    completely classified rule."""
    if p is not None and p != model.p:
        model = CanonicalModel(delta=model.delta, pi1=model.pi1, p=p)
    v_cc = invert_info(info_cc_beta(model))
    v_ig = invert_info(info_ig_beta(model, gamma_bar))
    num = excess_error_coeff(v_cc, model)
    den = excess_error_coeff(v_ig, model)
    return AREResult(
        are=num / den,
        numerator_excess_coeff=num,
        denominator_excess_coeff=den,
    )


# ---------------------------------------------------------------------------
# grid evaluation
# ---------------------------------------------------------------------------

def table_grid(
    cells, pi1: float = 0.5, p: int = 1, audit_pi1: bool = False
) -> list[dict]:
    """Evaluate ARE and gamma over (delta, xi0, xi1) cells.

    Per-cell failures are recorded in the row's 'error' field and the grid
    continues.  With audit_pi1, each row also reports the min and max ARE
    over priors 0.2..0.8 as a sensitivity audit.
    """
    rows = []
    for delta, xi0, xi1 in cells:
        row: dict = {"delta": delta, "xi0": xi0, "xi1": xi1,
                     "are": None, "gamma": None, "error": None}
        try:
            model = CanonicalModel(delta=delta, pi1=pi1, p=p)
            xi = MissParams(xi0=xi0, xi1=xi1)
            result = are_full(model, xi)
            from .missingness import gamma_canonical

            row["are"] = result.are
            row["gamma"] = gamma_canonical(model, xi)
            if audit_pi1:
                ares = [
                    are_full(CanonicalModel(delta=delta, pi1=q, p=p), xi).are
                    for q in (0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8)
                ]
                row["are_pi1_min"] = min(ares)
                row["are_pi1_max"] = max(ares)
        except MissdaError as exc:
            row["error"] = str(exc)
        rows.append(row)
    return rows


def mcar_grid(pi1_values, deltas, gamma_bar: float = 1.0, p: int = 1) -> list[dict]:
    """Evaluate the MCAR ignore-rule ARE over a (pi1, delta) grid."""
    rows = []
    for pi1 in pi1_values:
        for delta in deltas:
            row: dict = {"pi1": pi1, "delta": delta, "are": None, "error": None}
            try:
                model = CanonicalModel(delta=delta, pi1=pi1, p=p)
                row["are"] = are_ignore_mcar(model, gamma_bar).are
            except MissdaError as exc:
                row["error"] = str(exc)
            rows.append(row)
    return rows
