"""
Static figures for reports.  SVG output is made deterministic (fixed hash
salt, no date metadata) so identical inputs give identical files.
"""
from __future__ import annotations

import math
from pathlib import Path
from typing import Optional

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from .series import NewtonPolygonReport  # noqa: E402

matplotlib.rcParams["svg.hashsalt"] = "qsplit"
matplotlib.rcParams["svg.fonttype"] = "none"


def newton_polygon_figure(report: NewtonPolygonReport, title: str = "", log_guide: Optional[float] = None):
    """Points (k, val_p c_k), the lower hull, and optionally log_p(k) - gamma."""
    fig, ax = plt.subplots(figsize=(6, 4))
    if report.points:
        ks, vs = zip(*report.points)
        ax.plot(ks, vs, "o", ms=3, color="0.45", label="(k, val)")
    if len(report.hull) > 1:
        hk, hv = zip(*report.hull)
        ax.plot(hk, hv, "-", lw=1.5, color="C3", label="lower hull")
    if log_guide is not None and report.points:
        kmax = max(k for k, _ in report.points)
        xs = [k for k in range(1, kmax + 1)]
        ax.plot(xs, [math.log(k, report.p) - log_guide for k in xs], "--", lw=1,
                color="C0", label=f"log_p k - {log_guide:g}")
    ax.set_xlabel("k")
    ax.set_ylabel(f"val_{report.p}(c_k)")
    ax.set_title(title or f"Newton polygon, p = {report.p}")
    ax.legend(loc="upper left", frameon=False, fontsize=8)
    fig.tight_layout()
    return fig


def save_svg(fig, path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)
    return path
