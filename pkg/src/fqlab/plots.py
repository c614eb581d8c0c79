"""Figure rendering for the CLI report path (Agg backend, files only)."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .crystal import RootList
from .surface import CurveBranches, SpectrumTable


def render_curve(curve: CurveBranches, path: str) -> None:
    """Fundamental-domain picture of the traced curve, one color per strand."""
    fig, ax = plt.subplots(figsize=(5, 5))
    axis = curve.sweep_axis
    for i in range(curve.n_strands):
        solved = np.mod(curve.strands[i], 1.0)
        swept = curve.sweep
        # break the polyline at wrap-arounds so strands do not smear across
        jumps = np.nonzero(np.abs(np.diff(solved)) > 0.5)[0]
        start = 0
        for j in list(jumps) + [len(solved) - 1]:
            seg = slice(start, j + 1)
            x = solved[seg] if axis == 1 else swept[seg]
            y = swept[seg] if axis == 1 else solved[seg]
            ax.plot(x, y, lw=1.2, color=f"C{i % 10}")
            start = j + 1
    ax.set_xlim(0, 1)
    ax.set_ylim(0, 1)
    ax.set_xlabel("x1")
    ax.set_ylabel("x2")
    ax.set_title(f"torus curve, {curve.n_branches} branch(es)")
    ax.set_aspect("equal")
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)


def render_roots(roots: RootList, path: str) -> None:
    """Root positions on the line with the running gap underneath."""
    t = np.asarray(roots.roots)
    fig, (ax0, ax1) = plt.subplots(2, 1, figsize=(8, 4), sharex=True)
    ax0.eventplot(t, colors="C0", linelengths=0.8)
    ax0.set_yticks([])
    ax0.set_title(f"{len(t)} roots in [{roots.window[0]:g}, {roots.window[1]:g}]")
    if t.size >= 2:
        ax1.plot(t[1:], np.diff(t), ".", ms=3, color="C1")
        ax1.axhline(roots.min_gap, color="C3", lw=0.8, ls="--", label="min gap")
        ax1.legend(loc="upper right")
    ax1.set_xlabel("t")
    ax1.set_ylabel("gap")
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)


def render_spectrum(table: SpectrumTable, path: str) -> None:
    """Stem plot of coefficient magnitude against frequency."""
    freqs = []
    mags = []
    for k, val in table.entries.items():
        freqs.append(table.frequencies[k])
        mags.append(abs(val))
    fig, ax = plt.subplots(figsize=(8, 3.2))
    ax.stem(freqs, mags, markerfmt="C0.", basefmt="k-")
    ax.set_xlabel("frequency <ell, k>")
    ax.set_ylabel("|coefficient|")
    ax.set_title("directional-measure spectrum")
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)
