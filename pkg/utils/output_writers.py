"""
CSV, SVG and JSON writers for curves, censuses and phase diagrams.

All writers are deterministic: identical inputs give identical bytes.
"""

import json
import math
from pathlib import Path
from typing import Any, Dict, Iterable, List, Optional, Union

import matplotlib
import numpy as np
import pandas as pd
from matplotlib.figure import Figure

from class_defs.census_def import CensusResult
from class_defs.phasegrid_def import EmpiricalCurve, PhaseDiagram
from class_defs.threshold_def import ThresholdCurve
from config import Config
from infrastructure.logger import get_logger

logger = get_logger(__name__)

PathLike = Union[str, Path]

CURVE_COLUMNS = ["model", "param", "delta", "rho"]
CENSUS_COLUMNS = ["N", "n", "k", "restriction", "instances", "faces", "survived", "loss_fraction", "stderr", "seed"]
DIAGRAM_COLUMNS = ["N", "model", "param", "delta", "rho", "n", "k", "trials", "successes", "mean_rel_err", "seed"]
EMPIRICAL_COLUMNS = ["delta", "rho_hat", "ci_lo", "ci_hi", "method"]

_SVG_RC = {"svg.hashsalt": Config.SVG_HASH_SALT, "svg.fonttype": "path"}


def curve_to_frame(curves: Iterable[ThresholdCurve]) -> pd.DataFrame:
    rows = [
        {"model": c.model.tag, "param": c.model.param, "delta": p.delta, "rho": p.rho}
        for c in curves
        for p in c.points
    ]
    return pd.DataFrame(rows, columns=CURVE_COLUMNS)


def census_to_frame(results: Iterable[CensusResult]) -> pd.DataFrame:
    return pd.DataFrame([r.to_row() for r in results], columns=CENSUS_COLUMNS)


def diagram_to_frame(diagram: PhaseDiagram) -> pd.DataFrame:
    spec = diagram.spec
    rows = [
        {
            "N": spec.N,
            "model": spec.model.tag,
            "param": spec.model.param,
            "delta": c.delta,
            "rho": c.rho,
            "n": c.n,
            "k": c.k,
            "trials": c.trials,
            "successes": c.successes,
            "mean_rel_err": c.mean_rel_err,
            "seed": c.seed,
        }
        for c in sorted(diagram.cells, key=lambda c: (c.i_delta, c.i_rho))
    ]
    return pd.DataFrame(rows, columns=DIAGRAM_COLUMNS)


def empirical_to_frame(curve: EmpiricalCurve) -> pd.DataFrame:
    rows = [
        {"delta": c.delta, "rho_hat": c.rho_hat, "ci_lo": c.ci_lo, "ci_hi": c.ci_hi, "method": c.method}
        for c in curve.crossings
    ]
    return pd.DataFrame(rows, columns=EMPIRICAL_COLUMNS)


def write_csv(frame: pd.DataFrame, path: PathLike) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    frame.to_csv(path, index=False, float_format=Config.CSV_FLOAT_FORMAT, lineterminator="\n")
    logger.info("Wrote %d rows to %s", len(frame), path)
    return path


def _json_safe(value: Any) -> Any:
    if isinstance(value, dict):
        return {str(k): _json_safe(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_json_safe(v) for v in value]
    if isinstance(value, (np.integer,)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        value = float(value)
        return None if math.isnan(value) or math.isinf(value) else float(f"{value:.12g}")
    return value


def write_json_report(payload: Dict[str, Any], path: PathLike) -> Path:
    """JSON with sorted keys, 12 significant digits, and null for nan/inf."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as f:
        json.dump(_json_safe(payload), f, sort_keys=True, indent=2)
        f.write("\n")
    logger.info("Wrote report to %s", path)
    return path


def _save_svg(fig: Figure, path: PathLike, command: str) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with matplotlib.rc_context(_SVG_RC):
        fig.savefig(
            path,
            format="svg",
            metadata={"Date": None, "Creator": "ptlab", "Description": command, "Title": path.stem},
        )
    logger.info("Wrote plot to %s", path)
    return path


def plot_threshold_curves(curves: List[ThresholdCurve], path: PathLike, command: str = "") -> Path:
    """Log-x plot of rho against delta, one line per curve."""
    fig = Figure(figsize=(6.4, 4.8))
    ax = fig.add_subplot(1, 1, 1)
    for curve in curves:
        if not curve.points:
            continue
        label = f"{curve.model.tag} {curve.model.param}".strip()
        ax.plot(curve.deltas, curve.rhos, label=label, linewidth=1.4)
    ax.set_xscale("log")
    ax.set_xlabel("delta = n/N")
    ax.set_ylabel("rho = k/n")
    ax.set_title("Strong thresholds")
    ax.grid(True, which="both", alpha=0.25)
    if any(c.points for c in curves):
        ax.legend(loc="upper left", fontsize=8)
    return _save_svg(fig, path, command)


def plot_phase_diagram(
    diagram: PhaseDiagram,
    path: PathLike,
    command: str = "",
    theory: Optional[ThresholdCurve] = None,
    empirical: Optional[EmpiricalCurve] = None,
) -> Path:
    """Heat map of empirical success rates with optional theory and crossing overlays."""
    spec = diagram.spec
    rates = np.full(spec.shape, np.nan)
    for c in diagram.cells:
        if c.error is None:
            rates[c.i_delta, c.i_rho] = c.success_rate

    fig = Figure(figsize=(6.4, 4.8))
    ax = fig.add_subplot(1, 1, 1)
    mesh = ax.pcolormesh(
        np.asarray(spec.deltas), np.asarray(spec.rhos), rates.T,
        shading="nearest", cmap="viridis", vmin=0.0, vmax=1.0,
    )
    fig.colorbar(mesh, ax=ax, label="success rate")
    if theory is not None and theory.points:
        ax.plot(theory.deltas, theory.rhos, color="white", linewidth=1.6, label="strong threshold")
    if empirical is not None and empirical.crossings:
        points = [c for c in empirical.crossings if not c.is_bound]
        ax.plot([c.delta for c in points], [c.rho_hat for c in points], "o--", color="red",
                markersize=3, linewidth=1.0, label="empirical 50%")
    ax.set_xlabel("delta = n/N")
    ax.set_ylabel("rho = k/n")
    ax.set_title(f"N={spec.N} {spec.model.tag} {spec.model.param}".strip())
    if theory is not None or empirical is not None:
        ax.legend(loc="upper right", fontsize=8)
    return _save_svg(fig, path, command)
