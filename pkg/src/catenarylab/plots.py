"""Figure rendering for the report path: curves, radius graphs, phase portraits.

All figures save to self-contained SVG (glyphs as paths, no external
references); Cartesian views always carry the unit circle as a reference
stroke.
"""

from __future__ import annotations

import math
import os
import tempfile
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .dynamics import integrate
from .model import PowerParams, to_cartesian
from .trajectory import SolverConfig, Trajectory, mirrored_samples

__all__ = ["curve_figure", "radius_figure", "phase_figure", "save_figure"]


def _unit_circle(ax) -> None:
    theta = np.linspace(0.0, 2.0 * math.pi, 361)
    (line,) = ax.plot(np.cos(theta), np.sin(theta), color="crimson", lw=1.0, zorder=1)
    line.set_gid("unit-circle")


def curve_figure(trajectories: list[Trajectory], title: str | None = None):
    """Cartesian view of the mirrored curves with the unit circle."""
    fig, ax = plt.subplots(figsize=(6.0, 6.0))
    _unit_circle(ax)
    for traj in trajectories:
        xy = to_cartesian(mirrored_samples(traj))
        ax.plot(xy[:, 0], xy[:, 1], lw=1.2,
                label=f"$r_0$ = {traj.r0:g}")
    ax.set_aspect("equal")
    ax.set_xlabel("x")
    ax.set_ylabel("y")
    if title:
        ax.set_title(title)
    if trajectories:
        ax.legend(loc="best", fontsize=8)
    fig.tight_layout()
    return fig


def radius_figure(trajectories: list[Trajectory], title: str | None = None):
    """Radius against angle for the mirrored curves."""
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    for traj in trajectories:
        full = mirrored_samples(traj)
        ax.plot(full[:, 0], full[:, 1], lw=1.2, label=f"$r_0$ = {traj.r0:g}")
    ax.axhline(1.0, color="crimson", lw=0.8)
    ax.set_xlabel("s")
    ax.set_ylabel("r")
    if title:
        ax.set_title(title)
    if trajectories:
        ax.legend(loc="best", fontsize=8)
    fig.tight_layout()
    return fig


def phase_figure(
    params: PowerParams,
    seeds: list[float] | None = None,
    solver: SolverConfig | None = None,
    u_max: float = 3.0,
    title: str | None = None,
    trajectories: list[Trajectory] | None = None,
):
    """Phase portrait (r, r'): seed trajectories, barrier line, equilibrium.

    Closed inner orbits appear as loops via the (u, v) -> (u, -v) mirror;
    outer curves leave through the top of the window.  Pass `trajectories`
    to portray already-integrated curves instead of fresh seeds.
    """
    from .dynamics import equilibrium

    fig, ax = plt.subplots(figsize=(6.0, 4.5))
    cfg = solver or SolverConfig()
    eq = equilibrium(params)
    if trajectories is None:
        if seeds is None:
            lo = 0.1 * (eq.point.u if eq else 0.5)
            seeds = list(np.linspace(max(lo, 0.05), 0.95, 4)) + [1.2, 1.6, 2.0]
        trajectories = []
        for r0 in seeds:
            try:
                trajectories.append(integrate(params, r0, cfg))
            except ValueError:
                continue
    v_win = 0.0
    for traj in trajectories:
        m = traj.r <= u_max
        u, v = traj.r[m], traj.dr[m]
        (line,) = ax.plot(u, v, lw=1.0)
        ax.plot(u, -v, lw=1.0, color=line.get_color())
        if v.size:
            v_win = max(v_win, float(np.percentile(np.abs(v), 98)))
    ax.axvline(1.0, color="black", lw=1.0)
    if eq is not None:
        marker = "o" if eq.kind.value == "Center" else "x"
        ax.plot([eq.point.u], [0.0], marker, color="black", ms=6)
    ax.set_xlim(0.0, u_max)
    v_win = max(v_win, 1.0)
    ax.set_ylim(-1.1 * v_win, 1.1 * v_win)
    ax.set_xlabel("u = r")
    ax.set_ylabel("v = r'")
    ax.set_title(title or f"alpha = {params.alpha:g}")
    fig.tight_layout()
    return fig


def save_figure(fig, path) -> None:
    """Atomic SVG (or other matplotlib-supported) save, then release the figure."""
    path = Path(path)
    suffix = path.suffix or ".svg"
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=path.name, suffix=suffix)
    os.close(fd)
    try:
        fig.savefig(tmp, format=suffix.lstrip("."))
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    finally:
        plt.close(fig)
