"""Figure rendering for the report paths: one PNG next to each result file."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

_PNG_META = {"Software": "missda"}


def _save(fig, path: str | Path) -> None:
    fig.savefig(path, dpi=130, metadata=_PNG_META)
    plt.close(fig)


def save_are_grid_figure(rows: list[dict], path: str | Path) -> None:
    """ARE against class separation, one panel per xi0, one line per xi1."""
    rows = [r for r in rows if r.get("are") is not None]
    if not rows:
        return
    xi0_values = sorted({r["xi0"] for r in rows})
    xi1_values = sorted({r["xi1"] for r in rows})
    fig, axes = plt.subplots(
        1, len(xi0_values), figsize=(4.2 * len(xi0_values), 3.6), squeeze=False,
        sharey=True,
    )
    for ax, xi0 in zip(axes[0], xi0_values):
        for xi1 in xi1_values:
            cells = sorted(
                (r for r in rows if r["xi0"] == xi0 and r["xi1"] == xi1),
                key=lambda r: r["delta"],
            )
            if not cells:
                continue
            ax.plot(
                [r["delta"] for r in cells],
                [r["are"] for r in cells],
                marker="o",
                markersize=3.5,
                label=f"$\\xi_1$={xi1:g}",
            )
        ax.axhline(1.0, color="grey", lw=0.8, ls="--")
        ax.set_yscale("log")
        ax.set_xlabel(r"$\Delta$")
        ax.set_title(f"$\\xi_0$={xi0:g}")
        ax.grid(alpha=0.3)
    axes[0][0].set_ylabel("asymptotic relative efficiency")
    axes[0][-1].legend(fontsize=8)
    fig.tight_layout()
    _save(fig, path)


def save_mcar_figure(rows: list[dict], path: str | Path) -> None:
    """MCAR ignore-rule ARE against class separation, one line per prior."""
    rows = [r for r in rows if r.get("are") is not None]
    if not rows:
        return
    fig, ax = plt.subplots(figsize=(5.0, 3.8))
    for pi1 in sorted({r["pi1"] for r in rows}):
        cells = sorted((r for r in rows if r["pi1"] == pi1), key=lambda r: r["delta"])
        ax.plot(
            [r["delta"] for r in cells],
            [r["are"] for r in cells],
            marker="o",
            markersize=3.5,
            label=f"$\\pi_1$={pi1:g}",
        )
    ax.set_xlabel(r"$\Delta$")
    ax.set_ylabel("asymptotic relative efficiency")
    ax.grid(alpha=0.3)
    ax.legend(fontsize=8)
    fig.tight_layout()
    _save(fig, path)


def save_dataset_figure(y: np.ndarray, labels: np.ndarray, path: str | Path, beta=None) -> None:
    """Scatter (p >= 2) or histogram (p = 1) of a generated dataset.

    Unlabeled records are black squares, class 1 red triangles, class 2 blue
    circles; for p = 2 the decision boundary of beta is drawn when supplied.
    """
    y = np.atleast_2d(np.asarray(y, dtype=float))
    labels = np.asarray(labels)
    fig, ax = plt.subplots(figsize=(5.2, 4.2))
    groups = (
        (0, "k", "s", "unlabeled"),
        (1, "tab:red", "^", "class 1"),
        (2, "tab:blue", "o", "class 2"),
    )
    if y.shape[1] == 1:
        bins = np.histogram_bin_edges(y[:, 0], bins=40)
        for lab, color, _, name in groups:
            vals = y[labels == lab, 0]
            if len(vals):
                ax.hist(vals, bins=bins, alpha=0.55, color=color, label=name)
        ax.set_xlabel("y1")
        ax.set_ylabel("count")
    else:
        for lab, color, marker, name in groups:
            pts = y[labels == lab]
            if len(pts):
                ax.scatter(pts[:, 0], pts[:, 1], s=14, c=color, marker=marker,
                           label=name, alpha=0.8, linewidths=0)
        if beta is not None and y.shape[1] == 2:
            x_lo, x_hi = ax.get_xlim()
            xs = np.linspace(x_lo, x_hi, 50)
            if abs(beta.beta1[1]) > 1e-12:
                ax.plot(xs, -(beta.beta0 + beta.beta1[0] * xs) / beta.beta1[1],
                        color="grey", lw=1.0, ls="--", label="boundary")
            else:
                ax.axvline(-beta.beta0 / beta.beta1[0], color="grey", lw=1.0,
                           ls="--", label="boundary")
            ax.set_xlim(x_lo, x_hi)
        ax.set_xlabel("y1")
        ax.set_ylabel("y2")
    ax.legend(fontsize=8)
    fig.tight_layout()
    _save(fig, path)


def save_simulation_figure(rows: list[dict], path: str | Path) -> None:
    """Simulated relative efficiencies with bootstrap bars against theory."""
    rows = [r for r in rows if r.get("re_hat") is not None]
    if not rows:
        return
    fig, ax = plt.subplots(figsize=(max(5.0, 0.55 * len(rows)), 4.0))
    xs = np.arange(len(rows))
    ax.errorbar(
        xs,
        [r["re_hat"] for r in rows],
        yerr=[r["bootstrap_se"] for r in rows],
        fmt="o",
        markersize=4,
        capsize=3,
        label="simulated RE",
    )
    ax.plot(xs, [r["are_theoretical"] for r in rows], "x", color="tab:red",
            markersize=6, label="asymptotic RE")
    ax.axhline(1.0, color="grey", lw=0.8, ls="--")
    ax.set_xticks(xs)
    ax.set_xticklabels(
        [f"$\\Delta$={r['delta']:g}\n$\\xi_0$={r['xi0']:g}\n$\\xi_1$={r['xi1']:g}"
         for r in rows],
        fontsize=7,
    )
    ax.set_ylabel("relative efficiency")
    ax.grid(alpha=0.3)
    ax.legend(fontsize=8)
    fig.tight_layout()
    _save(fig, path)
