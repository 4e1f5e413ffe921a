"""
Plot Export

PNG figures for annealing energy traces, heat-flow norm traces, scaling
curves and retained hole edges. Uses the non-interactive Agg backend.
"""

import logging
from pathlib import Path
from typing import Optional, Union

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402
import pandas as pd  # noqa: E402

from .chains import Chain  # noqa: E402
from .complex import SimplicialComplex, periodic_displacement  # noqa: E402

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]


def _save(fig, path: PathLike):
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    logger.info(f"🖼️ 図を保存しました: {path}")


def plot_energy_trace(trace: pd.DataFrame, path: PathLike, title: Optional[str] = None):
    """Energy (left axis) and temperature (right axis) per annealing step"""
    fig, ax = plt.subplots(figsize=(8, 4))
    ax.plot(trace["step"], trace["energy"], color="tab:blue", linewidth=1.0, label="U")
    ax.set_xlabel("step")
    ax.set_ylabel("energy U")
    twin = ax.twinx()
    twin.plot(trace["step"], trace["temperature"], color="tab:orange", linewidth=0.8, label="T")
    twin.set_ylabel("temperature")
    twin.set_yscale("log")
    ax.set_title(title or "Annealing energy trace")
    ax.grid(True, alpha=0.3)
    _save(fig, path)


def plot_norm_trace(trace: pd.DataFrame, path: PathLike):
    """Heat-flow norm and energy against time"""
    fig, ax = plt.subplots(figsize=(8, 4))
    ax.plot(trace["t"], trace["norm"], marker="o", markersize=3, label="||omega(t)||")
    ax.plot(trace["t"], trace["energy"], marker="s", markersize=3, label="<omega, L omega>")
    ax.set_xlabel("t")
    ax.set_yscale("symlog", linthresh=1e-12)
    ax.legend()
    ax.grid(True, alpha=0.3)
    _save(fig, path)


def plot_scaling(frame: pd.DataFrame, path: PathLike):
    """Log-log curves of lambda_min and generator errors against n"""
    fig, (left, right) = plt.subplots(1, 2, figsize=(10, 4))
    per_n = frame.drop_duplicates("n").sort_values("n")
    left.loglog(per_n["n"], per_n["lambda_min"], marker="o", label="lambda_min")
    reference = per_n["lambda_min"].iloc[0] * (per_n["n"].iloc[0] / per_n["n"]) ** 2
    left.loglog(per_n["n"], reference, linestyle="--", color="gray", label="n^-2")
    left.set_xlabel("n")
    left.legend()
    left.grid(True, which="both", alpha=0.3)

    for (form, cycle), group in frame.groupby(["form", "cycle"]):
        group = group.sort_values("n")
        errors = np.maximum(group["generator_error"].to_numpy(), 1e-300)
        right.loglog(group["n"], errors, marker="o", label=f"{form} / {cycle}")
    right.set_xlabel("n")
    right.set_ylabel("generator error")
    right.legend()
    right.grid(True, which="both", alpha=0.3)
    _save(fig, path)


def plot_retained_edges(complex_: SimplicialComplex, sigma: Chain, path: PathLike, title: Optional[str] = None):
    """All edges in light grey, the retained chain coloured by |lambda_e|"""
    if complex_.coordinates is None:
        raise ValueError("座標を持たない複体は描画できません")
    coords = complex_.coordinates[:, :2]
    fig, ax = plt.subplots(figsize=(6, 6))

    def segment(a: int, b: int):
        start = coords[a]
        delta = coords[b] - coords[a]
        if complex_.metric == "torus":
            delta = periodic_displacement(delta)
        return start, start + delta

    for a, b in complex_.simplices(1):
        p, q = segment(a, b)
        ax.plot([p[0], q[0]], [p[1], q[1]], color="lightgray", linewidth=0.5)
    if not sigma.is_zero():
        scale = float(sigma.max_abs())
        cmap = plt.get_cmap("viridis")
        for edge_id, value in sigma.items():
            a, b = complex_.simplex(1, edge_id)
            p, q = segment(a, b)
            ax.plot([p[0], q[0]], [p[1], q[1]], color=cmap(abs(value) / scale), linewidth=2.0)
    ax.set_aspect("equal")
    ax.set_title(title or "Retained edges")
    _save(fig, path)
