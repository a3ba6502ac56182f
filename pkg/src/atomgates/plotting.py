"""Static figures for optimizer runs and fringe scans.

Rendered with the Agg backend to PNG files. PNG metadata is pinned so
repeated renders of the same data are byte-identical.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

RC = {
    "font.size": 9,
    "axes.labelsize": 9,
    "legend.fontsize": 8,
    "xtick.labelsize": 8,
    "ytick.labelsize": 8,
    "lines.linewidth": 1.2,
    "axes.grid": True,
    "grid.alpha": 0.3,
    "savefig.dpi": 120,
}

_PNG_METADATA = {"Software": None}


def _save(fig, path) -> Path:
    path = Path(path)
    fig.savefig(path, format="png", metadata=_PNG_METADATA)
    plt.close(fig)
    return path


def _sphere_wireframe(ax):
    u = np.linspace(0, 2 * np.pi, 25)
    v = np.linspace(0, np.pi, 13)
    ax.plot_wireframe(
        np.outer(np.cos(u), np.sin(v)),
        np.outer(np.sin(u), np.sin(v)),
        np.outer(np.ones_like(u), np.cos(v)),
        color="0.8",
        linewidth=0.3,
    )
    ax.set_box_aspect((1, 1, 1))
    ax.set_xlim(-1, 1)
    ax.set_ylim(-1, 1)
    ax.set_zlim(-1, 1)
    ax.set_xlabel("x")
    ax.set_ylabel("y")
    ax.set_zlabel("z")


def plot_run(record, path) -> Path:
    """Four panels: Rabi frequency, detuning, fidelity per step, Bloch trajectories."""
    k = np.array([e.k for e in record.entries])
    us = record.config.dt * 1e6
    t = (k + 1) * us
    with plt.rc_context(RC):
        fig = plt.figure(figsize=(9, 6.5))
        ax_om = fig.add_subplot(2, 2, 1)
        ax_om.step(t, [e.omega for e in record.entries], where="post")
        ax_om.set_xlabel("time (us)")
        ax_om.set_ylabel("Rabi frequency (rad/s)")

        ax_de = fig.add_subplot(2, 2, 2)
        ax_de.step(t, [e.delta for e in record.entries], where="post", color="C1")
        ax_de.set_xlabel("time (us)")
        ax_de.set_ylabel("detuning (rad/s)")

        ax_f = fig.add_subplot(2, 2, 3)
        ax_f.plot(t, [e.f_trace for e in record.entries], label="|Tr|/2")
        ax_f.plot(t, [e.f_squared for e in record.entries], "--", label="|Tr|^2/4")
        ax_f.axhline(record.config.fidelity_threshold, color="0.5", linewidth=0.8, linestyle=":")
        ax_f.set_xlabel("time (us)")
        ax_f.set_ylabel("gate fidelity")
        ax_f.set_ylim(0, 1.02)
        ax_f.legend(loc="lower right")

        ax_b = fig.add_subplot(2, 2, 4, projection="3d")
        _sphere_wireframe(ax_b)
        for i, (label, traj) in enumerate(sorted(record.bloch_trajectories.items())):
            xyz = np.array(traj)
            ax_b.plot(xyz[:, 0], xyz[:, 1], xyz[:, 2], color=f"C{i}", label=f"from {label}")
            ax_b.scatter(*xyz[-1], color=f"C{i}", s=12)
        if record.bloch_trajectories:
            ax_b.legend(loc="upper left")
        fig.suptitle(f"{record.config.target.value}: f = {record.final.f_trace:.4f} after {record.steps_used} steps")
        fig.tight_layout()
        return _save(fig, path)


def plot_fringe(scan, path) -> Path:
    with plt.rc_context(RC):
        fig, ax = plt.subplots(figsize=(5, 3.2))
        ax.plot(scan.phases, scan.transfer_probabilities, ".-", markersize=3)
        ax.set_xlabel("interferometer phase (rad)")
        ax.set_ylabel("transfer probability")
        ax.set_ylim(-0.02, 1.02)
        ax.set_title(f"visibility {scan.visibility:.4f}")
        fig.tight_layout()
        return _save(fig, path)
