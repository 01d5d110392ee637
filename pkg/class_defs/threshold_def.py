"""
Defines dataclasses for phase-diagram coordinates and theoretical threshold curves.

PhasePoint:
    delta: float - undersampling ratio n/N in (0, 1).
    rho: float - sparsity ratio k/n in (0, 1).

ThresholdParams:
    tau: float - threshold constant, >= 2e (default 2e).
    delta_max: float - validity cap on delta, <= 1/sqrt(pi).
    rho_ceiling: float - upper end of the rho search range (1/2).

ExponentPoint:
    v: float - face-dimension ratio ell/N in [delta, 1].
    gamma: float - k/ell in [0, rho].

ThresholdCurve:
    model: SparsityModel - model the curve belongs to (regime resolved).
    points: List[PhasePoint] - samples with strictly increasing delta.
    params: ThresholdParams - parameters used to generate the samples.
    requested_points: int - size of the requested delta grid.
    dropped: int - grid samples beyond the model's validity edge.
"""

import math
from dataclasses import dataclass, field
from typing import Any, Dict, List

from class_defs.problem_def import SparsityModel
from config import Config
from infrastructure.errors import DomainError

INV_SQRT_PI = 1.0 / math.sqrt(math.pi)


@dataclass(frozen=True)
class PhasePoint:
    delta: float
    rho: float

    def __post_init__(self):
        if not 0.0 < self.delta < 1.0:
            raise DomainError(f"delta must lie in (0, 1), got {self.delta}")
        if not 0.0 < self.rho < 1.0:
            raise DomainError(f"rho must lie in (0, 1), got {self.rho}")


@dataclass(frozen=True)
class ThresholdParams:
    tau: float = Config.THRESHOLD_TAU
    delta_max: float = INV_SQRT_PI
    rho_ceiling: float = Config.RHO_CEILING

    def __post_init__(self):
        if self.tau < 2.0 * math.e - 1e-12:
            raise DomainError(f"tau must be >= 2e, got {self.tau}")
        if not 0.0 < self.delta_max <= INV_SQRT_PI:
            raise DomainError(f"delta_max must lie in (0, 1/sqrt(pi)], got {self.delta_max}")
        if not 0.0 < self.rho_ceiling <= 0.5:
            raise DomainError(f"rho_ceiling must lie in (0, 1/2], got {self.rho_ceiling}")

    def to_dict(self) -> Dict[str, float]:
        return {"tau": self.tau, "delta_max": self.delta_max, "rho_ceiling": self.rho_ceiling}


@dataclass(frozen=True)
class ExponentPoint:
    v: float
    gamma: float


@dataclass
class ThresholdCurve:
    model: SparsityModel
    points: List[PhasePoint] = field(default_factory=list)
    params: ThresholdParams = field(default_factory=ThresholdParams)
    requested_points: int = 0
    dropped: int = 0

    @property
    def deltas(self) -> List[float]:
        return [p.delta for p in self.points]

    @property
    def rhos(self) -> List[float]:
        return [p.rho for p in self.points]

    @property
    def delta_range(self):
        if not self.points:
            return None
        return self.points[0].delta, self.points[-1].delta

    def to_dict(self) -> Dict[str, Any]:
        return {
            "model": self.model.to_dict(),
            "points": [{"delta": p.delta, "rho": p.rho} for p in self.points],
            "params": self.params.to_dict(),
            "requested_points": self.requested_points,
            "dropped": self.dropped,
        }
