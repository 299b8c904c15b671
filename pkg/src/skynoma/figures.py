"""Figure rendering for the report commands.

Each report command writes its CSV first and then, unless figures are
disabled, renders a companion PNG next to it. Figures are a reading aid;
the CSV remains the authoritative (and byte-deterministic) output.
"""

import math
from collections import defaultdict
from typing import List, Sequence

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .trajectory import TrajectoryPoint

__all__ = [
    "coverage_figure",
    "min_height_figure",
    "trajectory_figure",
    "los_figure",
]

_STYLE = {
    "figure.figsize": (6.0, 4.2),
    "figure.dpi": 120,
    "axes.grid": True,
    "grid.alpha": 0.3,
    "grid.linestyle": "--",
    "lines.linewidth": 1.2,
    "lines.markersize": 4.5,
    "legend.fontsize": 8,
}


def _save(fig, path):
    fig.savefig(path, bbox_inches="tight")
    plt.close(fig)


def coverage_figure(rows: List[dict], path) -> None:
    """Joint coverage vs point index, one curve per threshold pair.

    Analytic values are lines; Monte Carlo values, when present, are
    overlaid as markers.
    """
    with plt.rc_context(_STYLE):
        fig, ax = plt.subplots()
        groups = defaultdict(list)
        for row in rows:
            groups[(row["theta_a_db"], row["theta_t_db"], row["method"])].append(row)
        for (ta, tt, method) in sorted(groups, key=lambda k: (k[0], k[1], k[2])):
            rws = sorted(groups[(ta, tt, method)], key=lambda r: r["n"])
            ns = [r["n"] for r in rws]
            pt = [r["p_tot"] for r in rws]
            if method == "monte_carlo":
                ax.plot(ns, pt, "o", mfc="none", label=f"MC {ta:g}/{tt:g} dB")
            else:
                ax.plot(ns, pt, label=f"{ta:g}/{tt:g} dB")
        ax.set_xlabel("transmission point n")
        ax.set_ylabel("joint coverage probability")
        ax.set_ylim(-0.02, 1.02)
        ax.legend(title="thresholds (AUE/TUE)", ncols=2)
        _save(fig, path)


def min_height_figure(rows: List[dict], path) -> None:
    """Minimum QoS-satisfying height vs point index, per environment.

    Infeasible points are drawn as crosses pinned at the top of the axis.
    """
    with plt.rc_context(_STYLE):
        fig, ax = plt.subplots()
        groups = defaultdict(list)
        top = 0.0
        for row in rows:
            groups[(row["env"], row["theta_a_db"], row["theta_t_db"])].append(row)
            if row["min_height_m"] is not None:
                top = max(top, row["min_height_m"])
            top = max(top, row["best_height_m"])
        for (env, ta, tt) in sorted(groups):
            rws = sorted(groups[(env, ta, tt)], key=lambda r: r["n"])
            ns = [r["n"] for r in rws]
            hs = [r["min_height_m"] for r in rws]
            label = f"{env} {ta:g} dB"
            line, = ax.plot([n for n, h in zip(ns, hs) if h is not None],
                            [h for h in hs if h is not None], marker="o", label=label)
            bad = [n for n, h in zip(ns, hs) if h is None]
            if bad:
                ax.plot(bad, [top * 1.05] * len(bad), "x", color=line.get_color())
        ax.set_xlabel("transmission point n")
        ax.set_ylabel("minimum height (m)")
        ax.legend(fontsize=7)
        _save(fig, path)


def trajectory_figure(points: Sequence[TrajectoryPoint], cell_radius: float, path) -> None:
    with plt.rc_context(_STYLE):
        fig, ax = plt.subplots(figsize=(4.8, 4.8))
        angles = [2 * math.pi * k / 256 for k in range(257)]
        ax.plot([cell_radius * math.cos(a) for a in angles],
                [cell_radius * math.sin(a) for a in angles], "k-", lw=0.8)
        ax.plot([p.x for p in points], [p.y for p in points], "-", color="0.6", lw=0.8)
        ax.plot([p.x for p in points], [p.y for p in points], "r*", ms=8)
        for p in points:
            ax.annotate(str(p.n), (p.x, p.y), textcoords="offset points",
                        xytext=(4, 4), fontsize=7)
        ax.plot([0], [0], "b^", ms=9)
        ax.set_aspect("equal")
        ax.set_xlabel("x (m)")
        ax.set_ylabel("y (m)")
        _save(fig, path)


def los_figure(rows: List[dict], path) -> None:
    with plt.rc_context(_STYLE):
        fig, ax = plt.subplots()
        groups = defaultdict(list)
        for row in rows:
            groups[(row["env"], row["h_m"])].append(row)
        for (env, h) in sorted(groups):
            rws = sorted(groups[(env, h)], key=lambda r: r["r_a_m"])
            ax.plot([r["r_a_m"] for r in rws], [r["p_los"] for r in rws],
                    label=f"{env}, h = {h:g} m")
        ax.set_xlabel("horizontal distance (m)")
        ax.set_ylabel("LoS probability")
        ax.set_ylim(-0.02, 1.02)
        ax.legend()
        _save(fig, path)
