"""Figures written next to the TSV reports."""

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from .verify import histogram_pdf, EmpiricalDistribution  # noqa: E402

# product -> (color, linestyle); unknown products fall back to the cycle
STYLES = {
    "truth": ("black", "-"),
    "a": ("tab:blue", "--"),
    "b": ("tab:orange", "--"),
    "fused": ("tab:red", "-"),
    "interp": ("tab:green", "-."),
    "pyramid": ("tab:purple", ":"),
}

RC = {
    "font.size": 9,
    "axes.labelsize": 9,
    "legend.fontsize": 7,
    "xtick.labelsize": 8,
    "ytick.labelsize": 8,
    "axes.grid": True,
    "grid.alpha": 0.3,
}

# fixed PNG metadata so repeated runs give identical bytes
_META = {"Software": None}


def _style(name, i):
    color, ls = STYLES.get(name, (f"C{i % 10}", "-"))
    return dict(color=color, linestyle=ls, label=name)


def _save(fig, path):
    fig.savefig(path, dpi=110, metadata=_META)
    plt.close(fig)
    return Path(path).name


def plot_score_cdfs(path, cdfs, products):
    """One panel per detection score, one step curve per product."""
    with plt.rc_context(RC):
        fig, axes = plt.subplots(1, 3, figsize=(10, 3.2), sharey=True)
        for ax, score in zip(axes, ("pod", "far", "ts")):
            for i, prod in enumerate(products):
                dist = cdfs.get((prod, score))
                if dist is None:
                    continue
                xs, ps = dist.steps()
                xs = np.concatenate([[0.0], xs, [1.0]])
                ps = np.concatenate([[0.0], ps, [1.0]])
                ax.step(xs, ps, where="post", **_style(prod, i))
            ax.set_xlim(0, 1)
            ax.set_xlabel(score.upper())
        axes[0].set_ylabel("CDF")
        if axes[-1].get_legend_handles_labels()[0]:
            axes[-1].legend(loc="lower right")
        fig.tight_layout()
        return _save(fig, path)


def plot_intensity(path, pooled, bin_width=0.5, top=None):
    """PDF and CDF of intensity over the common-valid pixels."""
    with plt.rc_context(RC):
        fig, (ax_pdf, ax_cdf) = plt.subplots(1, 2, figsize=(9, 3.2))
        for i, (name, s) in enumerate(pooled.items()):
            if s.size == 0:
                continue
            edges, dens = histogram_pdf(s, bin_width, upper=top)
            centers = 0.5 * (edges[:-1] + edges[1:])
            ax_pdf.plot(centers, dens, **_style(name, i))
            xs, ps = EmpiricalDistribution(s).steps()
            ax_cdf.step(xs, ps, where="post", **_style(name, i))
        ax_pdf.set_yscale("log")
        ax_pdf.set_xlabel("rain intensity (mm/hr)")
        ax_pdf.set_ylabel("PDF")
        ax_cdf.set_xlabel("rain intensity (mm/hr)")
        ax_cdf.set_ylabel("CDF")
        if ax_cdf.get_legend_handles_labels()[0]:
            ax_cdf.legend(loc="lower right")
        fig.tight_layout()
        return _save(fig, path)


def plot_sample(path, grids, title=None):
    """Side-by-side maps of named grids; missing pixels drawn in grey."""
    names = list(grids)
    vmax = max((float(np.nanmax(g.masked())) for g in grids.values() if g.valid.any()), default=1.0)
    cmap = plt.get_cmap("jet").copy()
    cmap.set_bad("0.6")
    with plt.rc_context(RC):
        fig, axes = plt.subplots(1, len(names), figsize=(2.1 * len(names), 2.4))
        axes = np.atleast_1d(axes)
        for ax, name in zip(axes, names):
            im = ax.imshow(grids[name].masked(), cmap=cmap, vmin=0, vmax=max(vmax, 1e-9))
            ax.set_title(name)
            ax.set_xticks([])
            ax.set_yticks([])
            ax.grid(False)
        fig.colorbar(im, ax=list(axes), shrink=0.8, label="mm/hr")
        if title:
            fig.suptitle(title)
        return _save(fig, path)
