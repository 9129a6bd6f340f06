"""Figure rendering for experiment reports (written next to the JSON/CSV)."""
from __future__ import annotations

from pathlib import Path

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np


def plot_sweep(rows, path: str | Path):
    budgets = [r.budget for r in rows]
    rates = [r.rate for r in rows]
    lows = [r.rate - r.ci[0] for r in rows]
    highs = [r.ci[1] - r.rate for r in rows]
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.errorbar(budgets, rates, yerr=[lows, highs], fmt="o-", capsize=4)
    ax.set_xlabel("oracle-call budget")
    ax.set_ylabel("recovery rate")
    ax.set_ylim(-0.05, 1.05)
    ax.set_title("recovery rate vs depth budget")
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)


def plot_o2h(report, path: str | Path):
    p = np.array([r.p_find for r in report.records])
    b = np.array([r.bures for r in report.records])
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.scatter(p, b, s=8, alpha=0.4, label="samples")
    grid = np.linspace(0, max(p.max(), 1e-6), 200)
    ax.plot(grid, np.sqrt(2 * grid), "k--", label="sqrt(2 P_find)")
    ax.set_xlabel("P_find")
    ax.set_ylabel("Bures distance")
    ax.legend()
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)


def plot_bfp(report, path: str | Path):
    fig, ax = plt.subplots(figsize=(4, 4))
    ax.bar(["estimate", "bound p*q"], [report.estimate, report.bound],
           color=["tab:blue", "tab:gray"])
    ax.errorbar([0], [report.estimate], yerr=[3 * report.sigma], fmt="none",
                ecolor="black", capsize=6)
    ax.set_ylabel("finding probability")
    ax.set_title(f"q={report.q}, {report.family} queries")
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)


def plot_rates(rows, path: str | Path, title: str):
    """Bar chart of per-arm success rates with confidence intervals."""
    labels = [r["arm"] if isinstance(r, dict) else r.arm for r in rows]
    rates = [r["rate"] if isinstance(r, dict) else r.rate for r in rows]
    fig, ax = plt.subplots(figsize=(5, 4))
    ax.bar(labels, rates, color="tab:blue")
    ax.set_ylabel("rate")
    ax.set_ylim(0, 1.05)
    ax.set_title(title)
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)
