"""Figure rendering for the CLI reports.

Every report subcommand that writes delimited output also renders a matching
PNG next to it; these helpers hold the figure code so the CLI stays thin.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np


def save_trajectory_figure(times, populations, path) -> None:
    populations = np.asarray(populations)
    fig, ax = plt.subplots(figsize=(6.4, 4.0))
    for n in range(populations.shape[1]):
        ax.plot(times, populations[:, n], lw=1.4, label=f"site {n + 1}")
    ax.set_xlabel("time (ns)")
    ax.set_ylabel("site population")
    ax.set_ylim(-0.02, 1.02)
    ax.grid(alpha=0.3)
    ax.legend(loc="best", fontsize=8, ncol=2 if populations.shape[1] > 6 else 1)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def save_spectrum_figure(omega_ghz, intensity, path) -> None:
    fig, ax = plt.subplots(figsize=(6.4, 4.0))
    ax.plot(omega_ghz, intensity, lw=1.2)
    ax.set_xlabel("frequency (GHz)")
    ax.set_ylabel("intensity")
    ax.grid(alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def save_frontier_figure(points, path) -> None:
    sizes = [p.n_sites for p in points]
    peaks = [p.n_peaks for p in points]
    fig, ax = plt.subplots(figsize=(6.4, 4.0))
    ax.step(sizes, peaks, where="mid", lw=1.6)
    ax.fill_between(sizes, peaks, step="mid", alpha=0.25)
    ax.set_xlabel("system size (sites)")
    ax.set_ylabel("max peaks per site within budget")
    ax.grid(alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def save_chain_figure(bath, path) -> None:
    fig, (ax_f, ax_c) = plt.subplots(2, 1, figsize=(6.4, 5.6), sharex=True)
    for idx, chain in enumerate(bath.chains):
        pos = np.arange(1, chain.length + 1)
        ax_f.plot(pos, chain.site_freq, marker="o", ms=3, lw=1.0, label=f"chain {idx + 1}")
        couplings = (chain.head_coupling,) + chain.link_coupling
        ax_c.plot(np.arange(chain.length), couplings, marker="s", ms=3, lw=1.0)
    ax_f.set_ylabel("oscillator frequency (GHz)")
    ax_f.grid(alpha=0.3)
    if len(bath.chains) <= 10:
        ax_f.legend(fontsize=7, ncol=2)
    ax_c.set_ylabel("coupling (GHz)")
    ax_c.set_xlabel("chain position (0 = head link)")
    ax_c.grid(alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
