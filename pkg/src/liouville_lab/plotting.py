"""Figure rendering for report outputs.

Every function saves a PNG next to the delimited output and returns
the path.  The Agg backend keeps rendering headless.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np


def _finish(fig, path):
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path


def plot_profile(profile, path, title="radial profile"):
    r = profile.grid.nodes
    v = np.asarray(profile.value(r), dtype=float)
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.plot(r, v, lw=1.5)
    ax.set_xlabel("r")
    ax.set_ylabel("value")
    ax.set_title(title)
    ax.grid(True, alpha=0.3)
    return _finish(fig, path)


def plot_levels(levels, path):
    fig, axes = plt.subplots(1, 2, figsize=(9, 4))
    axes[0].plot(levels.thresholds, levels.k_of_t, label="mass k(t)")
    axes[0].plot(levels.thresholds, levels.mu_of_t, label="area mu(t)")
    axes[0].set_xlabel("t")
    axes[0].legend()
    axes[0].grid(True, alpha=0.3)
    axes[1].plot(levels.thresholds, levels.monotone_q)
    axes[1].set_xlabel("t")
    axes[1].set_ylabel("e^t mu - k + k^2/(8 pi)")
    axes[1].grid(True, alpha=0.3)
    return _finish(fig, path)


def plot_rearrangement(phi, star, path):
    fig, ax = plt.subplots(figsize=(6, 4))
    r1 = phi.grid.nodes
    ax.plot(r1, np.asarray(phi.value(r1), dtype=float), label="phi")
    r2 = star.profile.grid.nodes
    ax.plot(r2, np.asarray(star.profile.value(r2), dtype=float),
            label="phi* (rearranged)")
    ax.set_xlabel("r")
    ax.legend()
    ax.grid(True, alpha=0.3)
    return _finish(fig, path)


def plot_shoot(result, path):
    prof = result.profile
    r = prof.grid.nodes[1:]
    v = np.asarray(prof.value(r), dtype=float)
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.semilogx(r, v, lw=1.2)
    ax.set_xlabel("r")
    ax.set_ylabel("v")
    ax.set_title(f"beta = {result.beta:.6f}")
    ax.grid(True, alpha=0.3)
    return _finish(fig, path)


def plot_sweep(report, path):
    a0 = [row.a0 for row in report.rows]
    beta = [row.beta for row in report.rows]
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.plot(a0, beta, marker=".", lw=1.0)
    if report.expected_interval is not None:
        for level in report.expected_interval:
            ax.axhline(level, color="gray", ls="--", lw=0.8)
    ax.set_xlabel("a0")
    ax.set_ylabel("beta")
    ax.grid(True, alpha=0.3)
    return _finish(fig, path)
