"""Static figure rendering for the report command."""

from __future__ import annotations

import math
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

RC = {
    "font.size": 9,
    "axes.labelsize": 9,
    "axes.titlesize": 10,
    "legend.fontsize": 7,
    "xtick.labelsize": 8,
    "ytick.labelsize": 8,
    "axes.spines.top": False,
    "axes.spines.right": False,
    "lines.linewidth": 1.2,
    "savefig.dpi": 150,
}


def new_figure(width=6.0, height=None, ncols=1):
    golden = (math.sqrt(5) - 1.0) / 2.0
    height = height or width * golden
    with plt.rc_context(RC):
        fig, axes = plt.subplots(1, ncols, figsize=(width, height), squeeze=False)
    return fig, axes[0]


def line_panel(path, series, xlabel, ylabel, title=None, logx=False):
    """One axes, one line per ``(label, x, y)`` entry of ``series``."""
    with plt.rc_context(RC):
        fig, (ax,) = new_figure()
        for label, x, y in series:
            ax.plot(x, y, label=label)
        if logx:
            ax.set_xscale("log")
        ax.set_xlabel(xlabel)
        ax.set_ylabel(ylabel)
        if title:
            ax.set_title(title)
        ax.legend(frameon=False, ncol=2)
        fig.tight_layout()
        fig.savefig(Path(path))
    plt.close(fig)
    return Path(path)


def long_short_panels(path, long_series, short_series, xlabel, ylabel, title=None):
    """Long positions on the left, short on the right, shared y axis."""
    with plt.rc_context(RC):
        fig, axes = new_figure(width=8.0, height=3.2, ncols=2)
        for ax, series, side in zip(axes, (long_series, short_series), ("long", "short")):
            for label, x, y in series:
                ax.plot(x, y, label=label)
            ax.set_xlabel(xlabel)
            ax.set_title(f"{side} position")
        axes[0].set_ylabel(ylabel)
        ymax = max(ax.get_ylim()[1] for ax in axes)
        for ax in axes:
            ax.set_ylim(top=ymax)
        axes[0].legend(frameon=False)
        if title:
            fig.suptitle(title)
        fig.tight_layout()
        fig.savefig(Path(path))
    plt.close(fig)
    return Path(path)
