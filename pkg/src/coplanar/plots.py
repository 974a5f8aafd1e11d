"""Figure rendering for the report paths.

Figures are written next to the delimited outputs and must be byte
reproducible: fixed backend, fixed dpi, metadata stripped.
"""

from __future__ import annotations

import math

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

_SAVE_KW = {"dpi": 120, "metadata": {"Software": None}}


def render_sweep(config, rows, summary, path):
    """Log-log silhouette of the sweep: trial scatter, per-p medians, and
    the two regime-boundary verticals."""
    fig, ax = plt.subplots(figsize=(7, 4.5))
    xs = [float(r.p) for r in rows if r.p > 0]
    ys = [max(r.alpha, 0.5) for r in rows if r.p > 0]
    ax.plot(xs, ys, ".", color="0.7", markersize=3, label="trials")
    med_x, med_y = [], []
    for p in config.p_grid:
        key = str(p)
        if p > 0 and key in summary["medians"]:
            med_x.append(float(p))
            med_y.append(max(summary["medians"][key], 0.5))
    ax.plot(med_x, med_y, "o-", color="C0", markersize=4, label="median")
    lo, hi = summary["regime_boundaries"]["low"], summary["regime_boundaries"]["high"]
    for v, name in ((lo, "density break"), (hi, "plateau break")):
        ax.axvline(v, color="C3", linestyle="--", linewidth=0.8)
    ax.set_xscale("log")
    ax.set_yscale("log")
    ax.set_xlabel("p")
    ax.set_ylabel("general-position maximum")
    ax.set_title(f"q={config.q}, d={config.d}, {config.trials} trials per p")
    ax.legend(loc="lower right", fontsize=8)
    fig.tight_layout()
    fig.savefig(path, **_SAVE_KW)
    plt.close(fig)


def render_bounds(report, path):
    """Co-degree constants c2(j) as bars with the size constant c1 inset."""
    bounds = report["bounds"]
    js = sorted(int(j) for j in bounds["c2"])
    vals = [bounds["c2"][str(j)] for j in js]
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.bar([str(j) for j in js], vals, color="C0", width=0.6)
    ax.set_xlabel("j")
    ax.set_ylabel("empirical co-degree constant")
    c1 = bounds["c1"]
    size = bounds["size"]
    ax.set_title(f"family size {size}; size constant {c1:.4g} "
                 f"({report.get('case', '?')})")
    if any(v > 0 for v in vals):
        ax.set_yscale("log")
    fig.tight_layout()
    fig.savefig(path, **_SAVE_KW)
    plt.close(fig)
