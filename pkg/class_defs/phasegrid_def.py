"""
Defines dataclasses for Monte Carlo phase diagrams and their empirical transition curves.

GridSpec:
    N: int - ambient dimension.
    deltas: Tuple[float, ...] - undersampling grid, ascending, in (0, 1].
    rhos: Tuple[float, ...] - sparsity grid, ascending, in [0, 1].
    trials: int - trials per cell.
    model: SparsityModel - signal model.
    tolerance: float - relative l2 error counted as success.
    seed: int - master seed.

CellResult:
    i_delta, i_rho: int - grid coordinates.
    delta, rho: float - grid values.
    n, k, clusters: int - derived dimensions (clusters is 0 off the block model).
    trials: int
    successes: int - trials recovered within tolerance.
    nonconverged: int - trials whose solver hit its cap (counted as failures).
    mean_rel_err: float - mean relative error over converged trials (nan if none).
    seed: int - cell seed.
    error: Optional[str] - message when the cell could not be run.

PhaseDiagram:
    spec: GridSpec
    cells: List[CellResult] - delta-major order.
    metadata: Dict[str, Any] - rounding note, solver-call count.

ColumnCrossing:
    delta: float
    rho_hat: float - 50% crossing (or the bound for one-sided columns).
    ci_lo, ci_hi: float - 95% interval (nan on the open side of a bound).
    method: str - logistic, interpolation, lower_bound or upper_bound.
    extrapolated: bool - rho_hat outside the rho grid's hull.

EmpiricalCurve:
    model: SparsityModel
    crossings: List[ColumnCrossing]

ComparisonRow:
    delta, rho_theory, rho_hat, margin: float
    method: str
    passed: bool - rho_hat >= rho_theory.

TheoryComparison:
    rows: List[ComparisonRow]
    skipped: List[float] - empirical columns outside the curve's range or validity edge.
    warnings: List[str]
"""

import math
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Tuple

from class_defs.problem_def import ModelVariant, SparsityModel
from config import Config
from infrastructure.errors import DomainError

ROUNDING_NOTE = (
    "n = round(delta*N); k = max(1, round(rho*n)) for rho > 0, else 0; "
    "C = max(1, round(zeta*k)); rounding replaces the floors of the asymptotic notation"
)


def cell_dimensions(N: int, delta: float, rho: float, model: SparsityModel) -> Tuple[int, int, int]:
    """(n, k, C) for a grid point; C is 0 off the block model."""
    n = max(1, round(delta * N))
    k = max(1, round(rho * n)) if rho > 0.0 else 0
    clusters = 0
    if model.variant == ModelVariant.BLOCK and k > 0:
        if model.zeta is not None:
            clusters = max(1, round(model.zeta * k))
        else:
            clusters = min(model.clusters, k)
    return n, k, clusters


@dataclass(frozen=True)
class GridSpec:
    N: int
    deltas: Tuple[float, ...]
    rhos: Tuple[float, ...]
    trials: int
    model: SparsityModel
    tolerance: float = Config.SUCCESS_TOLERANCE
    seed: int = Config.DEFAULT_SEED

    def __post_init__(self):
        object.__setattr__(self, "deltas", tuple(float(d) for d in self.deltas))
        object.__setattr__(self, "rhos", tuple(float(r) for r in self.rhos))
        if self.N < 1:
            raise DomainError(f"N must be positive, got {self.N}")
        if not self.deltas or not self.rhos:
            raise DomainError("grids must not be empty")
        if list(self.deltas) != sorted(set(self.deltas)) or list(self.rhos) != sorted(set(self.rhos)):
            raise DomainError("grids must be strictly ascending")
        if not 0.0 < self.deltas[0] or self.deltas[-1] > 1.0:
            raise DomainError("delta grid must lie in (0, 1]")
        if self.rhos[0] < 0.0 or self.rhos[-1] > 1.0:
            raise DomainError("rho grid must lie in [0, 1]")
        if round(self.deltas[0] * self.N) < 1:
            raise DomainError(f"delta={self.deltas[0]} gives n < 1 at N={self.N}")
        if self.trials < 1:
            raise DomainError(f"trials must be positive, got {self.trials}")
        if self.tolerance <= 0.0:
            raise DomainError(f"success tolerance must be positive, got {self.tolerance}")
        if self.model.variant == ModelVariant.TREE and (self.N < 2 or self.N & (self.N - 1)):
            raise DomainError(f"tree phase diagrams need N a power of two, got {self.N}")

    @property
    def shape(self) -> Tuple[int, int]:
        return len(self.deltas), len(self.rhos)

    @property
    def solver_calls(self) -> int:
        return len(self.deltas) * len(self.rhos) * self.trials

    def cell_dims(self, delta: float, rho: float) -> Tuple[int, int, int]:
        return cell_dimensions(self.N, delta, rho, self.model)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "N": self.N,
            "deltas": list(self.deltas),
            "rhos": list(self.rhos),
            "trials": self.trials,
            "model": self.model.to_dict(),
            "tolerance": self.tolerance,
            "seed": self.seed,
        }


@dataclass(frozen=True)
class CellResult:
    i_delta: int
    i_rho: int
    delta: float
    rho: float
    n: int
    k: int
    clusters: int
    trials: int
    successes: int
    nonconverged: int
    mean_rel_err: float
    seed: int
    error: Optional[str] = None

    @property
    def success_rate(self) -> float:
        return self.successes / self.trials if self.trials else float("nan")


@dataclass
class PhaseDiagram:
    spec: GridSpec
    cells: List[CellResult] = field(default_factory=list)
    metadata: Dict[str, Any] = field(default_factory=dict)

    def column(self, i_delta: int) -> List[CellResult]:
        return sorted((c for c in self.cells if c.i_delta == i_delta), key=lambda c: c.i_rho)

    def cell(self, i_delta: int, i_rho: int) -> CellResult:
        for c in self.cells:
            if c.i_delta == i_delta and c.i_rho == i_rho:
                return c
        raise KeyError((i_delta, i_rho))


@dataclass(frozen=True)
class ColumnCrossing:
    delta: float
    rho_hat: float
    ci_lo: float
    ci_hi: float
    method: str
    extrapolated: bool = False

    @property
    def is_bound(self) -> bool:
        return self.method in ("lower_bound", "upper_bound")


@dataclass
class EmpiricalCurve:
    model: SparsityModel
    crossings: List[ColumnCrossing] = field(default_factory=list)

    @property
    def deltas(self) -> List[float]:
        return [c.delta for c in self.crossings]


@dataclass(frozen=True)
class ComparisonRow:
    delta: float
    rho_theory: float
    rho_hat: float
    margin: float
    method: str
    passed: bool


@dataclass
class TheoryComparison:
    rows: List[ComparisonRow] = field(default_factory=list)
    skipped: List[float] = field(default_factory=list)
    warnings: List[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return bool(self.rows) and all(r.passed for r in self.rows)

    @property
    def min_margin(self) -> float:
        return min((r.margin for r in self.rows), default=math.nan)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "passed": self.passed,
            "rows": [
                {
                    "delta": r.delta, "rho_theory": r.rho_theory, "rho_hat": r.rho_hat,
                    "margin": r.margin, "method": r.method, "passed": r.passed,
                }
                for r in self.rows
            ],
            "skipped_deltas": list(self.skipped),
            "warnings": list(self.warnings),
        }
