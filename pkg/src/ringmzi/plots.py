"""Matplotlib figure rendering for the CLI report paths.

Every plotting function writes a PNG next to the delimited output and never
opens a window (Agg backend).
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

__all__ = [
    "plot_fringe",
    "plot_visibility_sweep",
    "plot_jsa",
    "plot_brightness_fit",
    "plot_fringe_fit",
    "plot_compensation",
]


def plot_fringe(phis, p4f_ind, p4f_dist, path):
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.plot(phis, p4f_ind, "o-", label="indistinguishable", ms=3)
    ax.plot(phis, p4f_dist, "s--", label="distinguishable", ms=3)
    ax.set_xlabel(r"MZI phase $\phi$ (rad)")
    ax.set_ylabel("four-fold probability")
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def plot_visibility_sweep(nbars, visibilities, path):
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.plot(nbars, visibilities, "o-", ms=3)
    ax.set_xlabel(r"source brightness $\bar{n}$ (pairs/pulse)")
    ax.set_ylabel("fringe visibility")
    ax.set_ylim(0, 1)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def plot_jsa(grid, path):
    fig, ax = plt.subplots(figsize=(5, 4.2))
    mag = np.abs(grid.amplitude)
    im = ax.pcolormesh(grid.idler_ghz, grid.signal_ghz, mag, shading="auto")
    ax.set_xlabel("idler detuning (GHz)")
    ax.set_ylabel("signal detuning (GHz)")
    fig.colorbar(im, ax=ax, label="|JSA|")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def plot_brightness_fit(samples, fit, path):
    from .calibration import model_counts

    p = np.array([s.p_in for s in samples])
    grid = np.linspace(p.min(), p.max(), 200)
    curves = np.array([model_counts(fit, v)[:3] for v in grid])
    fig, ax = plt.subplots(figsize=(6, 4))
    for idx, (label, data) in enumerate(
        [("signal singles", [s.c_s for s in samples]),
         ("idler singles", [s.c_i for s in samples]),
         ("coincidences", [s.cc for s in samples])]
    ):
        ax.plot(p, data, "o", ms=4, color=f"C{idx}", label=label)
        ax.plot(grid, curves[:, idx], "-", color=f"C{idx}", lw=1)
    ax.set_xlabel("input power (mW)")
    ax.set_ylabel("rate (counts/s)")
    ax.set_yscale("log")
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def plot_fringe_fit(phis, counts, fitted, path):
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.plot(phis, counts, "ko", ms=4, label="data")
    order = np.argsort(phis)
    ax.plot(np.asarray(phis)[order], np.asarray(fitted)[order], "C0-", label="fit")
    ax.set_xlabel(r"MZI phase $\phi$ (rad)")
    ax.set_ylabel("four-fold counts")
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def plot_compensation(powers, steps, path):
    fig, axes = plt.subplots(1, 2, figsize=(9, 4))
    rings = list(steps[0].corrections_mw)
    for name in rings:
        axes[0].plot(powers, [s.corrections_mw[name] for s in steps], label=name)
        axes[1].plot(powers, [s.residual_pm[name] for s in steps], label=name)
    axes[0].set_xlabel("MZI heater power (mW)")
    axes[0].set_ylabel("heater correction (mW)")
    axes[1].set_xlabel("MZI heater power (mW)")
    axes[1].set_ylabel("residual drift (pm)")
    for ax in axes:
        ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
