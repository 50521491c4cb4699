"""Figure rendering for CLI reports.

Each helper writes one PNG next to the delimited output. The Agg backend is
forced so headless runs work; figures are a visual aid and are excluded from
the byte-determinism guarantee that covers CSV/JSON.
"""

from __future__ import annotations

import os

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np


def _save(fig, out_dir, name: str) -> str:
    os.makedirs(out_dir, exist_ok=True)
    path = os.path.join(out_dir, f"{name}.png")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def pressure_figure(series, target, out_dir, name="pressure_convergence"):
    fig, ax = plt.subplots(figsize=(6, 4))
    ns = np.arange(1, series.n_max + 1)
    ax.plot(ns, series.per_n_estimates, "o-", label="log(Z_n)/n")
    ax.plot(ns[1:], series.diff_estimates, "s--", label="log Z_{n+1} - log Z_n")
    if target is not None:
        ax.axhline(target, color="k", lw=0.8, label="spectral target")
    ax.set_xlabel("n")
    ax.set_ylabel("pressure estimate")
    ax.set_title(f"partition-sum estimators, t={series.t:g}")
    ax.legend(frameon=False)
    return _save(fig, out_dir, name)


def ratio_figure(lengths, ratios, out_dir, name="gibbs_ratios"):
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.scatter(lengths, ratios, s=8, alpha=0.6)
    ax.set_yscale("log")
    ax.set_xlabel("word length |I|")
    ax.set_ylabel("mu[I] e^{nP} / ||A_I||^t")
    ax.set_title("Gibbs sandwich ratios")
    return _save(fig, out_dir, name)


def spectrum_figure(eigenvalues, out_dir, name="lift_spectrum"):
    eig = np.asarray(eigenvalues, dtype=complex)
    fig, ax = plt.subplots(figsize=(4.5, 4.5))
    ax.scatter(eig.real, eig.imag, s=18)
    lim = 1.1 * np.max(np.abs(eig))
    ax.set_xlim(-lim, lim)
    ax.set_ylim(-lim, lim)
    ax.axhline(0, color="k", lw=0.5)
    ax.axvline(0, color="k", lw=0.5)
    ax.set_xlabel("Re")
    ax.set_ylabel("Im")
    ax.set_title("lifted operator spectrum")
    ax.set_aspect("equal")
    return _save(fig, out_dir, name)


def transfer_figure(disc, out_dir, name="transfer_eigendata"):
    fig, axes = plt.subplots(1, 2, figsize=(9, 3.6))
    if disc.grid.dim == 2:
        ang = np.arange(disc.grid.resolution) * np.pi / disc.grid.resolution
        axes[0].plot(ang, disc.h, lw=1.0)
        axes[0].set_xlabel("angle on RP^1")
        axes[1].plot(ang, disc.nu * disc.grid.resolution, lw=1.0, color="C1")
        axes[1].set_xlabel("angle on RP^1")
    else:
        axes[0].plot(disc.h, lw=0.8)
        axes[0].set_xlabel("grid index")
        axes[1].plot(disc.nu * disc.grid.resolution, lw=0.8, color="C1")
        axes[1].set_xlabel("grid index")
    axes[0].set_ylabel("h_t")
    axes[0].set_title(f"eigenfunction, rho={disc.rho:.6g}")
    axes[1].set_ylabel("nu_t density (x R)")
    axes[1].set_title("stationary weights")
    return _save(fig, out_dir, name)


def decay_figure(curves, out_dir, name="mixing_decay"):
    """curves: list of (label, ns, values, fitted_rate)."""
    fig, ax = plt.subplots(figsize=(6, 4))
    for label, ns, values, rate in curves:
        vals = np.abs(np.asarray(values, dtype=float))
        keep = vals > 0
        ax.semilogy(np.asarray(ns)[keep], vals[keep], "o-",
                    label=f"{label} (rate {rate:.3f})" if np.isfinite(rate) else label)
    ax.set_xlabel("gap / shift n")
    ax.set_ylabel("dependence")
    ax.set_title("mixing decay")
    ax.legend(frameon=False, fontsize=8)
    return _save(fig, out_dir, name)
