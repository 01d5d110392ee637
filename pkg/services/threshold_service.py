"""
Strong-threshold curves for simple, block and tree sparsity.

The leading-order net exponent is

    M(delta, rho) = delta/2 * [a*rho + ln rho + ln ln z + ln tau],  z = 1/(delta*sqrt(pi)),

with a model-specific rate a and tau >= 2e (2e by default). Its first zero in
rho is the strong threshold; in closed form
rho = exp(b*rho) / |tau * ln(delta*sqrt(pi))| with b = -a.
"""

import math
from typing import Callable, Optional

import numpy as np
from scipy.optimize import bisect, minimize_scalar

from class_defs.problem_def import ModelVariant, SparsityModel, TreeRegime
from class_defs.threshold_def import (
    INV_SQRT_PI,
    ExponentPoint,
    PhasePoint,
    ThresholdCurve,
    ThresholdParams,
)
from config import Config
from infrastructure.errors import DomainError, NonConvergenceError, NoTransitionError, require
from infrastructure.logger import get_logger

logger = get_logger(__name__)

_RHO_FLOOR = 1e-12
_DEFAULT_PARAMS = ThresholdParams()


def rate_coefficient(model: SparsityModel) -> float:
    """
    Coefficient a of the linear structure term a*rho inside the net exponent.
    """
    if model.variant == ModelVariant.SIMPLE:
        return 0.0
    if model.variant == ModelVariant.BLOCK:
        if model.zeta is None:
            raise DomainError("block thresholds are parametrized by zeta, not by a fixed C")
        return 2.0 * (model.zeta - 1.0)
    if model.regime == TreeRegime.SMALL_K:
        return 2.0 * math.log(2.0)
    if model.regime == TreeRegime.LARGE_K:
        return 2.0 * (math.log(4.0) - 1.0)
    raise DomainError("tree regime must be resolved (small_k or large_k) before computing thresholds")


def structure_rate(model: SparsityModel, rho: float) -> float:
    """
    The model-specific linear term a*rho of the net exponent.

    Block: 2(zeta-1)rho; tree small-k: 2 ln2 rho; tree large-k: 2(ln4-1)rho; simple: 0.
    """
    return rate_coefficient(model) * rho


def threshold_exponent(model: SparsityModel) -> float:
    """Coefficient b in rho = exp(b*rho)/|tau ln(delta sqrt(pi))|; always -a."""
    return -rate_coefficient(model)


def _log_log_z(delta: float) -> float:
    z = INV_SQRT_PI / delta
    if z <= 1.0:
        raise DomainError(f"ln ln z undefined for delta={delta} >= 1/sqrt(pi)")
    return math.log(math.log(z))


def _net_exponent(a: float, delta: float, rho: float, tau: float) -> float:
    return 0.5 * delta * (a * rho + math.log(rho) + _log_log_z(delta) + math.log(tau))


def net_exponent_leading(model: SparsityModel, point: PhasePoint, params: ThresholdParams = _DEFAULT_PARAMS) -> float:
    """
    Leading-order net exponent at (delta, rho); remainder terms are dropped.
    """
    require(point.delta < params.delta_max, f"delta={point.delta} is beyond delta_max={params.delta_max}")
    return _net_exponent(rate_coefficient(model), point.delta, point.rho, params.tau)


def maximize_exponent(
    psi: Callable[[ExponentPoint], float],
    delta: float,
    rho: float,
    grid: int = Config.MAX_OPERATOR_GRID,
    sweeps: int = 4,
) -> float:
    """
    Maximum-value operator: sup of psi over v in [delta, 1], gamma in [0, rho].

    A coarse grid scan locates the best cell; bounded golden-section/Brent line
    searches then refine v and gamma alternately inside the neighbouring cells.

    Args:
        psi: exponent function of an ExponentPoint
        delta: lower end of the v range
        rho: upper end of the gamma range
        grid: points per axis of the coarse scan
        sweeps: alternating refinement passes

    Returns:
        The supremum estimate.
    """
    require(0.0 < delta <= 1.0, f"delta must lie in (0, 1], got {delta}")
    require(rho >= 0.0, f"rho must be non-negative, got {rho}")
    v_axis = np.linspace(delta, 1.0, grid)
    g_axis = np.linspace(0.0, rho, grid)
    values = np.array([[psi(ExponentPoint(float(v), float(g))) for g in g_axis] for v in v_axis])
    i, j = np.unravel_index(int(np.argmax(values)), values.shape)
    best = float(values[i, j])
    v_best, g_best = float(v_axis[i]), float(g_axis[j])

    v_lo, v_hi = float(v_axis[max(i - 1, 0)]), float(v_axis[min(i + 1, grid - 1)])
    g_lo, g_hi = float(g_axis[max(j - 1, 0)]), float(g_axis[min(j + 1, grid - 1)])
    for _ in range(sweeps):
        if v_hi > v_lo:
            res = minimize_scalar(
                lambda v: -psi(ExponentPoint(v, g_best)),
                bounds=(v_lo, v_hi), method="bounded", options={"xatol": 1e-12},
            )
            if -res.fun > best:
                best, v_best = float(-res.fun), float(res.x)
        if g_hi > g_lo:
            res = minimize_scalar(
                lambda g: -psi(ExponentPoint(v_best, g)),
                bounds=(g_lo, g_hi), method="bounded", options={"xatol": 1e-12},
            )
            if -res.fun > best:
                best, g_best = float(-res.fun), float(res.x)
    return best


def threshold_first_zero(model: SparsityModel, delta: float, params: ThresholdParams = _DEFAULT_PARAMS) -> float:
    """
    First zero in rho of the leading net exponent at fixed delta, by bisection.

    Raises:
        NoTransitionError: the exponent does not change sign on (1e-12, rho_ceiling].
    """
    require(0.0 < delta < params.delta_max, f"delta must lie in (0, {params.delta_max}), got {delta}")
    a = rate_coefficient(model)

    def exponent(rho: float) -> float:
        return _net_exponent(a, delta, rho, params.tau)

    left, right = exponent(_RHO_FLOOR), exponent(params.rho_ceiling)
    if left >= 0.0:
        raise NoTransitionError(f"net exponent already non-negative at rho={_RHO_FLOOR} (delta={delta})")
    if right < 0.0:
        raise NoTransitionError(f"no transition in rho <= {params.rho_ceiling} at delta={delta}")
    if right == 0.0:
        return params.rho_ceiling
    return float(bisect(exponent, _RHO_FLOOR, params.rho_ceiling, xtol=1e-15, maxiter=500))


def delta_of_rho(model: SparsityModel, rho: float, params: ThresholdParams = _DEFAULT_PARAMS) -> float:
    """
    Closed-form threshold curve delta = (1/sqrt(pi)) exp(-exp(b*rho) / (tau*rho)).
    """
    if not 0.0 < rho <= params.rho_ceiling:
        raise DomainError(f"rho must lie in (0, {params.rho_ceiling}], got {rho}")
    b = threshold_exponent(model)
    return INV_SQRT_PI * math.exp(-math.exp(b * rho) / (params.tau * rho))


def validity_edge(model: SparsityModel, params: ThresholdParams = _DEFAULT_PARAMS) -> float:
    """Largest delta whose threshold still lies inside rho <= rho_ceiling."""
    return min(delta_of_rho(model, params.rho_ceiling, params), params.delta_max)


def comparable_delta(log_z: float = Config.COMPARABLE_LOG_Z) -> float:
    """
    Largest delta with ln z >= log_z, z = 1/(delta sqrt(pi)).

    The leading-order exponent drops terms that are small only for large z;
    at log_z = 1 this is where ln ln z turns negative, delta = 1/(e sqrt(pi)).
    """
    require(log_z > 0.0, f"log_z must be positive, got {log_z}")
    return INV_SQRT_PI * math.exp(-log_z)


def rho_of_delta(model: SparsityModel, delta: float, params: ThresholdParams = _DEFAULT_PARAMS) -> float:
    """
    Strong threshold rho at delta, solving rho = exp(b*rho) * c with
    c = 1/|tau ln(delta sqrt(pi))|.

    Damped fixed-point iteration first; bisection on the monotone branch when
    the iteration stalls or leaves the domain.

    Raises:
        NoTransitionError: the solution lies above rho_ceiling.
        NonConvergenceError: neither path reaches residual 1e-10.
    """
    require(0.0 < delta < params.delta_max, f"delta must lie in (0, {params.delta_max}), got {delta}")
    b = threshold_exponent(model)
    c = 1.0 / abs(params.tau * math.log(delta / INV_SQRT_PI))
    ceiling = params.rho_ceiling

    def residual(rho: float) -> float:
        return rho - c * math.exp(b * rho)

    if residual(ceiling) < 0.0:
        raise NoTransitionError(f"threshold at delta={delta} lies above rho={ceiling}")

    omega = Config.FIXED_POINT_DAMPING
    rho = min(c, ceiling)
    converged = False
    iterations = 0
    for iterations in range(1, Config.FIXED_POINT_MAX_ITER + 1):
        rho = (1.0 - omega) * rho + omega * c * math.exp(b * rho)
        if not 0.0 < rho <= ceiling:
            break
        if abs(residual(rho)) <= Config.FIXED_POINT_TOL:
            converged = True
            break

    if not converged:
        logger.debug("Fixed point stalled at delta=%g after %d iterations; bisecting", delta, iterations)
        rho = float(bisect(residual, 0.0, ceiling, xtol=1e-16, maxiter=500))

    final = abs(residual(rho))
    if final > 1e-10:
        raise NonConvergenceError(
            f"threshold solve failed at delta={delta}",
            {"delta": delta, "rho": rho, "residual": final, "iterations": iterations},
        )
    return rho


def simple_threshold(delta: float, params: ThresholdParams = _DEFAULT_PARAMS) -> float:
    return rho_of_delta(SparsityModel.simple(), delta, params)


def sample_curve(
    model: SparsityModel,
    delta_min: float,
    delta_max_req: float,
    points: int,
    params: ThresholdParams = _DEFAULT_PARAMS,
    spacing: str = "geometric",
) -> ThresholdCurve:
    """
    Sample the threshold curve of a model on a delta grid.

    The grid is fixed by (delta_min, delta_max_req, points, spacing) alone, so
    curves of different models share their delta samples. Samples above the
    model's validity edge are dropped and counted in the curve metadata.

    Args:
        model: sparsity model with a resolved tree regime
        delta_min, delta_max_req: grid end points, 0 < delta_min < delta_max_req <= delta_max
        points: grid size, >= 2
        params: threshold parameters
        spacing: "geometric" (default) or "linear"

    Returns:
        ThresholdCurve with strictly increasing delta.
    """
    require(points >= 2, f"need at least 2 points, got {points}")
    require(0.0 < delta_min < delta_max_req, f"need 0 < delta_min < delta_max, got [{delta_min}, {delta_max_req}]")
    require(delta_max_req <= params.delta_max, f"delta_max={delta_max_req} exceeds the validity cap {params.delta_max}")
    if spacing == "geometric":
        grid = np.geomspace(delta_min, delta_max_req, points)
    elif spacing == "linear":
        grid = np.linspace(delta_min, delta_max_req, points)
    else:
        raise DomainError(f"unknown spacing {spacing!r}")

    curve = ThresholdCurve(model=model, params=params, requested_points=points)
    for delta in grid:
        delta = float(delta)
        if delta >= params.delta_max:
            curve.dropped += 1
            continue
        try:
            rho = rho_of_delta(model, delta, params)
        except NoTransitionError:
            curve.dropped += 1
            continue
        except NonConvergenceError as e:
            raise NonConvergenceError(f"{e.message} while sampling {model.tag} {model.param}", e.diagnostics)
        curve.points.append(PhasePoint(delta, rho))

    if curve.dropped:
        logger.warning(
            "%s %s: %d of %d samples lie above the validity edge delta=%.6g and were dropped",
            model.tag, model.param, curve.dropped, points, validity_edge(model, params),
        )
    return curve
