"""Figure rendering for the report path (written next to the delimited output)."""

from __future__ import annotations

from pathlib import Path

import numpy as np

from .records import VerificationRecord


def _pyplot():
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    return plt


def render_report_figure(records: list[VerificationRecord], path: str | Path) -> Path:
    """Bar chart of the worst ratio per suite, colored by pass status."""
    plt = _pyplot()
    by_suite: dict[str, list[VerificationRecord]] = {}
    for r in records:
        by_suite.setdefault(r.suite, []).append(r)
    suites = sorted(by_suite)
    ratios = [max(r.ratio for r in by_suite[s]) for s in suites]
    ok = [all(r.passed for r in by_suite[s]) for s in suites]
    colors = ["#2a7e43" if flag else "#b03030" for flag in ok]
    fig, ax = plt.subplots(figsize=(max(6, 0.55 * len(suites) + 2), 4))
    shown = [max(r, 1e-16) for r in ratios]
    ax.bar(range(len(suites)), shown, color=colors)
    ax.set_yscale("log")
    ax.set_xticks(range(len(suites)))
    ax.set_xticklabels(suites, rotation=60, ha="right", fontsize=8)
    ax.set_ylabel("worst ratio (log scale)")
    ax.set_title("verification suites: worst observed ratio")
    ax.axhline(1.0, color="gray", lw=0.8, ls="--")
    fig.tight_layout()
    out = Path(path)
    fig.savefig(out, dpi=150)
    plt.close(fig)
    return out


def render_kernel_figure(index: np.ndarray, dirichlet: np.ndarray, fejer: np.ndarray,
                         spectrum: np.ndarray, n: int, path: str | Path) -> Path:
    """Kernel values and the Fejer spectrum for one order n."""
    plt = _pyplot()
    fig, axes = plt.subplots(1, 2, figsize=(9, 3.4))
    size = len(index)
    x = (index + 0.5) / size
    axes[0].step(x, dirichlet, where="mid", label=f"D_{n}", lw=1.0)
    axes[0].step(x, fejer, where="mid", label=f"K_{n}", lw=1.0)
    axes[0].set_xlabel("x")
    axes[0].set_title("kernel values")
    axes[0].legend(fontsize=8)
    axes[1].plot(index, spectrum, ".", ms=3)
    axes[1].set_xlabel("Walsh index k")
    axes[1].set_title(f"Fejer spectrum (n - k)+ / n, n = {n}")
    fig.tight_layout()
    out = Path(path)
    fig.savefig(out, dpi=150)
    plt.close(fig)
    return out
