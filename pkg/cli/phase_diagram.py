from typing import List, Optional, Tuple

import click
import numpy as np

from class_defs.phasegrid_def import ROUNDING_NOTE, GridSpec
from class_defs.problem_def import ModelVariant, TreeRegime
from class_defs.run_config import PhaseDiagramConfig
from class_defs.threshold_def import INV_SQRT_PI, ThresholdCurve
from cli.common import command_line, echo_kv, resolve_jobs_option
from config import Config
from infrastructure.errors import EXIT_STATISTICAL_FAILURE, DomainError, handle_cli_errors
from infrastructure.logger import get_logger
from services.phasegrid_service import compare_to_theory, fit_empirical_transition, run_phase_diagram
from services.threshold_service import sample_curve
from utils.output_writers import (
    diagram_to_frame,
    empirical_to_frame,
    plot_phase_diagram,
    write_csv,
    write_json_report,
)

logger = get_logger(__name__)


def default_grids(rows: int, cols: int) -> Tuple[Tuple[float, ...], Tuple[float, ...]]:
    """delta = linspace(1/rows, 1, rows); rho = linspace(0, DEFAULT_GRID_RHO_MAX, cols)."""
    deltas = np.linspace(1.0 / rows, 1.0, rows)
    rhos = np.linspace(0.0, Config.DEFAULT_GRID_RHO_MAX, cols)
    return tuple(float(d) for d in deltas), tuple(float(r) for r in rhos)


def theory_curve(spec: GridSpec, warnings: List[str]) -> Optional[ThresholdCurve]:
    """
    Strong-threshold curve over the grid's delta range, or None when the model
    has no curve there. Tree AUTO resolves with the largest k on the grid.
    """
    model = spec.model
    if model.variant == ModelVariant.BLOCK and model.zeta is None:
        warnings.append("no theoretical curve for a fixed cluster count; use --zeta to compare")
        return None
    if model.variant == ModelVariant.TREE and model.regime == TreeRegime.AUTO:
        k_max = max(spec.cell_dims(d, r)[1] for d in spec.deltas for r in spec.rhos)
        model = model.resolve(spec.N, max(k_max, 1))
        warnings.append(f"tree regime resolved to {model.regime.value} at k={k_max}")

    low = spec.deltas[0]
    high = min(spec.deltas[-1], INV_SQRT_PI * (1.0 - 1e-9))
    if not low < high:
        warnings.append(f"delta grid starts at {low:.6g}, beyond the range of the threshold formulas")
        return None
    curve = sample_curve(model, low, high, max(2, len(spec.deltas)), spacing="linear")
    if not curve.points:
        warnings.append("theoretical curve has no samples inside its validity range")
        return None
    if curve.dropped:
        warnings.append(f"{curve.dropped} theory samples beyond the validity edge were dropped")
    return curve


@click.command("phase-diagram")
@click.option("--N", "N", type=int, required=True, help="Ambient dimension.")
@click.option("--grid", default="12x12", show_default=True, help="delta columns x rho levels.")
@click.option("--trials", type=int, default=25, show_default=True)
@click.option("--model", type=click.Choice(["simple", "block", "tree"]), default="simple", show_default=True)
@click.option("--zeta", default=None, help="Cluster fraction for --model block.")
@click.option("--c", "clusters", type=int, default=None, help="Fixed cluster count for --model block.")
@click.option("--regime", type=click.Choice(["small_k", "large_k", "auto"]), default="auto", show_default=True)
@click.option("--seed", type=int, default=Config.DEFAULT_SEED, show_default=True)
@click.option("--jobs", type=int, default=None, help="Parallel workers (overrides PTLAB_JOBS).")
@click.option("--out", type=click.Path(dir_okay=False), required=True, help="Diagram CSV.")
@click.option("--curve-out", type=click.Path(dir_okay=False), default=None, help="Empirical-curve CSV.")
@click.option("--report", type=click.Path(dir_okay=False), default=None, help="Comparison report (JSON).")
@click.option("--svg", type=click.Path(dir_okay=False), default=None, help="Heat map with theory overlay.")
@click.option("--yes", is_flag=True, help="Proceed with grids above the solver-call budget.")
@click.pass_context
@handle_cli_errors
def phase_diagram_command(ctx, N, grid, trials, model, zeta, clusters, regime, seed, jobs, out, curve_out, report, svg, yes):
    """
    Monte Carlo phase diagram, empirical 50% curve and comparison with the strong threshold.
    """
    config = PhaseDiagramConfig(
        N=N, grid=grid, trials=trials, model=model, zeta=zeta, clusters=clusters, regime=regime,
        out=out, curve_out=curve_out, report=report, svg=svg, yes=yes, seed=seed,
        jobs=resolve_jobs_option(ctx, jobs), command=command_line(ctx),
    )
    deltas, rhos = default_grids(*config.grid)
    spec = GridSpec(config.N, deltas, rhos, config.trials, config.sparsity_model(), config.tolerance, config.seed)

    click.echo(f"estimate: {spec.solver_calls} solver calls over {len(deltas)}x{len(rhos)} cells", err=True)
    if spec.solver_calls > Config.SOLVER_CALL_WARNING and not config.yes:
        raise click.UsageError(
            f"{spec.solver_calls} solver calls exceed {Config.SOLVER_CALL_WARNING}; pass --yes to proceed"
        )

    diagram = run_phase_diagram(spec, n_jobs=config.jobs)
    empirical = fit_empirical_transition(diagram)

    warnings: List[str] = []
    curve = theory_curve(spec, warnings)
    comparison = None
    if curve is not None:
        try:
            comparison = compare_to_theory(empirical, curve)
            warnings.extend(comparison.warnings)
        except DomainError as e:
            warnings.append(e.message)
    for message in warnings:
        logger.warning(message)

    curve_path, report_path = config.resolved_paths()
    write_csv(diagram_to_frame(diagram), config.out)
    write_csv(empirical_to_frame(empirical), curve_path)
    write_json_report(
        {
            "command": config.command,
            "grid": spec.to_dict(),
            "rounding": ROUNDING_NOTE,
            "diagram": diagram.metadata,
            "theory_model": curve.model.to_dict() if curve is not None else None,
            "comparison": comparison.to_dict() if comparison is not None else None,
            "cell_errors": [
                {"delta": c.delta, "rho": c.rho, "error": c.error} for c in diagram.cells if c.error is not None
            ],
            "warnings": warnings,
        },
        report_path,
    )
    if config.svg is not None:
        plot_phase_diagram(diagram, config.svg, config.command, theory=curve, empirical=empirical)

    compared = len(comparison.rows) if comparison is not None else 0
    passed = comparison.passed if comparison is not None else True
    echo_kv(
        cells=len(diagram.cells),
        columns=len(empirical.crossings),
        compared=compared,
        min_margin=comparison.min_margin if comparison is not None else float("nan"),
        passed=passed,
    )
    if not passed:
        ctx.exit(EXIT_STATISTICAL_FAILURE)
