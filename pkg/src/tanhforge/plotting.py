"""Figure rendering for the CLI report paths; every figure sits next to a
CSV carrying the same data."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np


def save_error_curve(path, xs, errs, title: str):
    fig, ax = plt.subplots(figsize=(7, 4))
    ax.semilogy(xs, np.maximum(np.asarray(errs), 1e-300), lw=0.8)
    ax.set_xlabel("x")
    ax.set_ylabel("|f(x) - net(x)|")
    ax.set_title(title)
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def save_rate_plot(path, Ns, empirical, guaranteed, slope: float, title: str):
    fig, ax = plt.subplots(figsize=(6, 4.5))
    ax.loglog(Ns, empirical, "o-", label=f"empirical (slope {slope:.2f})")
    if any(g is not None for g in guaranteed):
        ax.loglog(Ns, guaranteed, "s--", label="guaranteed")
    ax.set_xlabel("N")
    ax.set_ylabel("sup error")
    ax.set_title(title)
    ax.grid(True, which="both", alpha=0.3)
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def save_width_plot(path, table):
    """table rows: (a, tolerance, s, N, width, variant)."""
    fig, ax = plt.subplots(figsize=(6, 4.5))
    for a in sorted({r[0] for r in table}):
        for variant, style in (("two_layer", "o-"), ("shallow", "s--")):
            pts = sorted((r[1], r[4]) for r in table
                         if r[0] == a and r[5] == variant and r[4] > 0)
            if pts:
                ax.semilogx([p[0] for p in pts], [p[1] for p in pts], style,
                            label=f"a={a:.3g} {variant}")
    ax.set_xlabel("tolerance")
    ax.set_ylabel("minimal width")
    ax.grid(True, which="both", alpha=0.3)
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def save_partition_plot(path, ys, rhos, near):
    fig, ax = plt.subplots(figsize=(7, 4))
    for j in range(rhos.shape[0]):
        ax.plot(ys, rhos[j], lw=0.9)
    ax.plot(ys, near, "k--", lw=1.2, label="near-neighbor sum")
    ax.set_xlabel("y")
    ax.set_ylabel("bump value")
    ax.grid(True, alpha=0.3)
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def save_ledger_plot(path, rows):
    fig, ax = plt.subplots(figsize=(8, 0.25 * len(rows) + 1.5))
    labels = [f"{r.check} {r.params}" for r in rows]
    margins = [max(r.margin, 0.0) + 1e-300 for r in rows]
    colors = ["tab:green" if r.passed else "tab:red" for r in rows]
    ax.barh(range(len(rows)), margins, color=colors)
    ax.set_yticks(range(len(rows)))
    ax.set_yticklabels(labels, fontsize=6)
    ax.set_xscale("log")
    ax.set_xlabel("certification margin")
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
