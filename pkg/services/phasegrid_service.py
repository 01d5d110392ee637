"""
Monte Carlo phase diagrams: per-cell recovery experiments on a (delta, rho)
grid, empirical 50% transition estimates, and comparison against the
theoretical strong-threshold curves.
"""

import math
import warnings
from typing import List, Optional, Sequence, Tuple

import numpy as np
from scipy.stats import norm
from sklearn.exceptions import ConvergenceWarning
from sklearn.isotonic import IsotonicRegression
from sklearn.linear_model import LogisticRegression

from class_defs.phasegrid_def import (
    ROUNDING_NOTE,
    CellResult,
    ColumnCrossing,
    ComparisonRow,
    EmpiricalCurve,
    GridSpec,
    PhaseDiagram,
    TheoryComparison,
    cell_dimensions,
)
from class_defs.problem_def import ModelVariant, ProblemSize, SparsityModel, TreeRegime
from class_defs.sensing_def import Signal
from class_defs.threshold_def import ThresholdCurve
from config import Config
from infrastructure.errors import DomainError, NonConvergenceError, PtlabError
from infrastructure.logger import get_logger
from infrastructure.seeds import derive_seed
from infrastructure.tasks import run_parallel
from services.l1_service import (
    basis_pursuit,
    gaussian_instance,
    recovery_error,
    sample_block_signal,
    sample_sparse_signal,
    sample_tree_signal,
)
from services.threshold_service import comparable_delta, rho_of_delta

logger = get_logger(__name__)

_Z_95 = float(norm.ppf(0.975))
_MIN_LOGISTIC_LEVELS = 4


def _sample_signal(model: SparsityModel, N: int, k: int, clusters: int, seed: int) -> Signal:
    if model.variant == ModelVariant.BLOCK:
        return sample_block_signal(N, k, clusters, seed)
    if model.variant == ModelVariant.TREE:
        return sample_tree_signal(N.bit_length() - 1, k, seed, model.regime)
    return sample_sparse_signal(N, k, seed)


def run_cell(
    N: int,
    delta: float,
    rho: float,
    model: SparsityModel,
    trials: int,
    cell_seed: int,
    tolerance: float = Config.SUCCESS_TOLERANCE,
    i_delta: int = 0,
    i_rho: int = 0,
) -> CellResult:
    """
    Run `trials` recovery experiments at one grid point.

    Trial t draws its signal from derive_seed(cell_seed, t, 0) and its matrix
    from derive_seed(cell_seed, t, 1), measures, solves basis pursuit and
    scores a success when the relative error is within tolerance. A solver
    that hits its iteration cap counts as a failure and is tallied in
    `nonconverged`.
    """
    n, k, clusters = cell_dimensions(N, delta, rho, model)
    if k > n:
        raise DomainError(f"rho={rho} gives k={k} > n={n}")
    size = ProblemSize(N, n, k)

    successes = nonconverged = 0
    errors: List[float] = []
    for trial in range(trials):
        signal = _sample_signal(model, N, k, clusters, derive_seed(cell_seed, trial, 0))
        instance = gaussian_instance(size, derive_seed(cell_seed, trial, 1))
        try:
            x_hat = basis_pursuit(instance, signal.measure(instance))
        except NonConvergenceError as e:
            logger.warning("delta=%g rho=%g trial %d did not converge: %s", delta, rho, trial, e.diagnostics)
            nonconverged += 1
            continue
        error = recovery_error(signal.coefficients, x_hat)
        errors.append(error)
        if error <= tolerance:
            successes += 1

    return CellResult(
        i_delta=i_delta,
        i_rho=i_rho,
        delta=float(delta),
        rho=float(rho),
        n=n,
        k=k,
        clusters=clusters,
        trials=trials,
        successes=successes,
        nonconverged=nonconverged,
        mean_rel_err=float(np.mean(errors)) if errors else math.nan,
        seed=int(cell_seed),
    )


def _run_grid_cell(task: Tuple[GridSpec, int, int]) -> CellResult:
    spec, i_delta, i_rho = task
    delta, rho = spec.deltas[i_delta], spec.rhos[i_rho]
    cell_seed = derive_seed(spec.seed, i_delta, i_rho)
    try:
        return run_cell(spec.N, delta, rho, spec.model, spec.trials, cell_seed, spec.tolerance, i_delta, i_rho)
    except PtlabError as e:
        logger.error("Cell delta=%g rho=%g failed: %s", delta, rho, e.message)
        n, k, clusters = cell_dimensions(spec.N, delta, rho, spec.model)
        return CellResult(
            i_delta, i_rho, delta, rho, n, k, clusters, spec.trials,
            successes=0, nonconverged=0, mean_rel_err=math.nan, seed=cell_seed, error=e.message,
        )


def run_phase_diagram(spec: GridSpec, n_jobs: Optional[int] = None) -> PhaseDiagram:
    """
    Evaluate every cell of the grid.

    Cells are independent and seeded by (master seed, delta index, rho
    index), so the result does not depend on scheduling. Cell failures are
    embedded in the diagram rather than aborting the sweep.
    """
    if spec.solver_calls > Config.SOLVER_CALL_WARNING:
        logger.warning("Phase diagram needs %d solver calls (> %d)", spec.solver_calls, Config.SOLVER_CALL_WARNING)
    tasks = [(spec, i, j) for i in range(len(spec.deltas)) for j in range(len(spec.rhos))]
    logger.info(
        "Phase diagram N=%d %s %s: %dx%d grid, %d trials per cell",
        spec.N, spec.model.tag, spec.model.param, *spec.shape, spec.trials,
    )
    cells = run_parallel(_run_grid_cell, tasks, n_jobs)
    metadata = {
        "rounding": ROUNDING_NOTE,
        "solver_calls": spec.solver_calls,
        "nonconverged": sum(c.nonconverged for c in cells),
        "cell_errors": sum(1 for c in cells if c.error is not None),
    }
    if metadata["nonconverged"]:
        logger.warning("%d trials did not converge and were scored as failures", metadata["nonconverged"])
    return PhaseDiagram(spec=spec, cells=list(cells), metadata=metadata)


def _column_arrays(diagram: PhaseDiagram, i_delta: int) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    cells = [c for c in diagram.column(i_delta) if c.error is None]
    rhos = np.array([c.rho for c in cells], dtype=float)
    successes = np.array([c.successes for c in cells], dtype=float)
    trials = np.array([c.trials for c in cells], dtype=float)
    return rhos, successes, trials


def _isotonic_column(rhos: np.ndarray, successes: np.ndarray, trials: np.ndarray) -> np.ndarray:
    model = IsotonicRegression(increasing=False, y_min=0.0, y_max=1.0)
    return model.fit_transform(rhos, successes / trials, sample_weight=trials)


def isotonic_success(diagram: PhaseDiagram) -> np.ndarray:
    """
    Per-column success probabilities, smoothed to be non-increasing in rho.

    Returns:
        Array of shape (len(deltas), len(rhos)); cells that failed to run are nan.
    """
    fitted = np.full(diagram.spec.shape, np.nan)
    for i_delta in range(len(diagram.spec.deltas)):
        cells = [c for c in diagram.column(i_delta) if c.error is None]
        if not cells:
            continue
        rhos, successes, trials = _column_arrays(diagram, i_delta)
        fitted[i_delta, [c.i_rho for c in cells]] = _isotonic_column(rhos, successes, trials)
    return fitted


def _separated(rhos: np.ndarray, successes: np.ndarray, trials: np.ndarray) -> bool:
    # complete or quasi-complete separation: the logistic MLE does not exist
    with_success = rhos[successes > 0]
    with_failure = rhos[successes < trials]
    return with_success.max() <= with_failure.min() or with_failure.max() <= with_success.min()


def _logistic_crossing(rhos: np.ndarray, successes: np.ndarray, trials: np.ndarray) -> Optional[Tuple[float, float, float]]:
    # one weighted row per (level, outcome)
    x = np.concatenate([rhos, rhos]).reshape(-1, 1)
    y = np.concatenate([np.ones_like(rhos), np.zeros_like(rhos)])
    w = np.concatenate([successes, trials - successes])
    keep = w > 0
    model = LogisticRegression(penalty=None, solver="lbfgs", max_iter=2000, tol=1e-10)
    with warnings.catch_warnings():
        warnings.simplefilter("error", ConvergenceWarning)
        try:
            model.fit(x[keep], y[keep], sample_weight=w[keep])
        except ConvergenceWarning:
            return None
    b0, b1 = float(model.intercept_[0]), float(model.coef_[0, 0])
    if b1 >= 0.0:
        return None
    rho_hat = -b0 / b1

    # Wald interval through the delta method on -b0/b1
    p = 1.0 / (1.0 + np.exp(-(b0 + b1 * rhos)))
    weight = trials * p * (1.0 - p)
    fisher = np.array([
        [weight.sum(), (weight * rhos).sum()],
        [(weight * rhos).sum(), (weight * rhos ** 2).sum()],
    ])
    try:
        covariance = np.linalg.inv(fisher)
    except np.linalg.LinAlgError:
        return None
    gradient = np.array([-1.0 / b1, b0 / b1 ** 2])
    spread = math.sqrt(max(float(gradient @ covariance @ gradient), 0.0))
    return rho_hat, rho_hat - _Z_95 * spread, rho_hat + _Z_95 * spread


def _interpolated_crossing(delta: float, rhos: np.ndarray, smoothed: np.ndarray) -> ColumnCrossing:
    below = np.flatnonzero(smoothed < 0.5)
    if below.size == 0:
        return ColumnCrossing(delta, float(rhos[-1]), float(rhos[-1]), math.nan, "lower_bound")
    j = int(below[0])
    if j == 0:
        return ColumnCrossing(delta, float(rhos[0]), math.nan, float(rhos[0]), "upper_bound")
    r0, r1 = float(rhos[j - 1]), float(rhos[j])
    p0, p1 = float(smoothed[j - 1]), float(smoothed[j])
    rho_hat = r0 + (p0 - 0.5) / (p0 - p1) * (r1 - r0)
    return ColumnCrossing(delta, rho_hat, r0, r1, "interpolation")


def _column_crossing(delta: float, rhos: np.ndarray, successes: np.ndarray, trials: np.ndarray) -> ColumnCrossing:
    if np.all(successes == trials):
        return ColumnCrossing(delta, float(rhos.max()), float(rhos.max()), math.nan, "lower_bound")
    if np.all(successes == 0):
        return ColumnCrossing(delta, float(rhos.min()), math.nan, float(rhos.min()), "upper_bound")

    if len(rhos) >= _MIN_LOGISTIC_LEVELS and not _separated(rhos, successes, trials):
        fit = _logistic_crossing(rhos, successes, trials)
        if fit is not None:
            rho_hat, lo, hi = fit
            extrapolated = not rhos.min() <= rho_hat <= rhos.max()
            return ColumnCrossing(delta, rho_hat, lo, hi, "logistic", extrapolated)
        logger.debug("Logistic fit degenerate at delta=%g; interpolating", delta)
    return _interpolated_crossing(delta, rhos, _isotonic_column(rhos, successes, trials))


def fit_empirical_transition(diagram: PhaseDiagram) -> EmpiricalCurve:
    """
    50% success crossing per delta column.

    A weighted maximum-likelihood logistic fit of success against rho gives
    the crossing and a Wald 95% interval. Columns with fewer than four rho
    levels, or whose outcomes are separated (no finite MLE), fall back to
    linear interpolation of the isotonic staircase, with the bracketing rho
    pair as the interval. One-sided columns are reported as bounds.
    """
    curve = EmpiricalCurve(model=diagram.spec.model)
    for i_delta, delta in enumerate(diagram.spec.deltas):
        rhos, successes, trials = _column_arrays(diagram, i_delta)
        if rhos.size == 0:
            logger.warning("No usable cells at delta=%g", delta)
            continue
        curve.crossings.append(_column_crossing(delta, rhos, successes, trials))
    return curve


def crossing_from_counts(rhos: Sequence[float], successes: Sequence[int], trials: Sequence[int], delta: float = 0.0) -> ColumnCrossing:
    """Crossing estimate for a single column of counts."""
    return _column_crossing(
        delta,
        np.asarray(rhos, dtype=float),
        np.asarray(successes, dtype=float),
        np.asarray(trials, dtype=float),
    )


def _models_match(empirical: SparsityModel, theory: SparsityModel) -> bool:
    if empirical.variant != theory.variant:
        return False
    if empirical.variant == ModelVariant.BLOCK:
        return empirical.zeta == theory.zeta and empirical.clusters == theory.clusters
    if empirical.variant == ModelVariant.TREE:
        return empirical.regime in (TreeRegime.AUTO, theory.regime)
    return True


def compare_to_theory(
    empirical: EmpiricalCurve, curve: ThresholdCurve, log_z: float = Config.COMPARABLE_LOG_Z,
) -> TheoryComparison:
    """
    Per-column check that the empirical crossing lies on or above the strong threshold.

    Columns outside the curve's delta range, beyond the model's validity
    edge, or above `comparable_delta(log_z)` (where the leading-order
    threshold is not yet accurate) are skipped. Upper-bound columns cannot
    establish the inequality and fail.

    Raises:
        DomainError: the curve is empty or no empirical column lies in its
            comparable range.
    """
    if curve.delta_range is None:
        raise DomainError("theoretical curve has no samples")
    lo, hi = curve.delta_range
    in_range = [c for c in empirical.crossings if lo - 1e-12 <= c.delta <= hi + 1e-12]
    if not in_range:
        raise DomainError(f"empirical deltas do not overlap the curve range [{lo:.6g}, {hi:.6g}]")
    edge = comparable_delta(log_z)
    comparable = [c for c in in_range if c.delta <= edge + 1e-12]
    if not comparable:
        raise DomainError(f"no empirical column lies at or below the comparable delta {edge:.6g}")

    report = TheoryComparison()
    if not _models_match(empirical.model, curve.model):
        report.warnings.append(
            f"model mismatch: empirical {empirical.model.tag} {empirical.model.param} "
            f"vs theory {curve.model.tag} {curve.model.param}"
        )
    report.skipped.extend(c.delta for c in empirical.crossings if c not in comparable)
    if len(comparable) < len(in_range):
        report.warnings.append(
            f"{len(in_range) - len(comparable)} columns above delta={edge:.6g} (ln z < {log_z:g}) not compared"
        )

    for crossing in comparable:
        try:
            rho_theory = rho_of_delta(curve.model, crossing.delta, curve.params)
        except DomainError:
            report.skipped.append(crossing.delta)
            continue
        margin = crossing.rho_hat - rho_theory
        passed = crossing.method != "upper_bound" and margin >= 0.0
        if crossing.method == "upper_bound":
            report.warnings.append(f"delta={crossing.delta:.6g}: all trials failed; crossing only bounded above")
        report.rows.append(ComparisonRow(crossing.delta, rho_theory, crossing.rho_hat, margin, crossing.method, passed))

    report.skipped.sort()
    logger.info(
        "Theory comparison: %d columns, %d skipped, %s",
        len(report.rows), len(report.skipped), "pass" if report.passed else "fail",
    )
    return report
