"""
Defines dataclasses for face-survival censuses of the projected cross-polytope.

FaceRestriction: which k-faces are censused - all faces, faces with block
    supports (exactly C runs), or faces with tree supports.

CensusSpec:
    N: int - ambient dimension.
    n: int - number of measurements.
    k: int - face dimension (supports have k+1 indices).
    restriction: FaceRestriction
    clusters: Optional[int] - run count C for block restrictions.
    instances: int - number of random matrices.
    seed: int - master seed.
    cap: Optional[int] - faces per instance when the enumeration is subsampled.

InstanceTally:
    index: int - instance number.
    seed: int - seed of the instance's matrix.
    examined: int - faces tested without solver errors.
    survived: int - faces that survived projection.
    errors: int - faces whose test raised a solver error (excluded from counts).

CensusResult:
    spec: CensusSpec
    examined: int - total faces examined.
    survived: int - total faces surviving.
    loss_fraction: float - 1 - survived/examined.
    stderr: float - standard error of the loss fraction.
    exact: bool - False when faces were subsampled.
    per_instance: List[InstanceTally]

LossComparison:
    all_faces: CensusResult - census over all faces.
    block_faces: CensusResult - census over block-support faces on the same matrices.
    difference: float - mean paired difference of loss fractions.
    z_statistic: float - paired z-statistic of the difference.
    passed: bool - |z| within the sigma bound.
"""

from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, List, Optional

from infrastructure.errors import DomainError


class FaceRestriction(str, Enum):
    ALL = "all"
    BLOCK = "block"
    TREE = "tree"


@dataclass(frozen=True)
class CensusSpec:
    N: int
    n: int
    k: int
    restriction: FaceRestriction = FaceRestriction.ALL
    clusters: Optional[int] = None
    instances: int = 1
    seed: int = 0
    cap: Optional[int] = None

    def __post_init__(self):
        if not 0 < self.n <= self.N:
            raise DomainError(f"need 0 < n <= N, got n={self.n}, N={self.N}")
        if not 0 <= self.k < self.N:
            raise DomainError(f"need 0 <= k < N, got k={self.k}, N={self.N}")
        if self.instances < 1:
            raise DomainError(f"need at least one instance, got {self.instances}")
        if self.cap is not None and self.cap < 1:
            raise DomainError(f"subsample cap must be positive, got {self.cap}")
        if self.restriction == FaceRestriction.BLOCK:
            if self.clusters is None or not 1 <= self.clusters <= self.k + 1:
                raise DomainError(f"block restriction needs 1 <= C <= k+1, got C={self.clusters}")

    @property
    def label(self) -> str:
        if self.restriction == FaceRestriction.BLOCK:
            return f"block(C={self.clusters})"
        return self.restriction.value

    def to_dict(self) -> Dict[str, Any]:
        return {
            "N": self.N, "n": self.n, "k": self.k,
            "restriction": self.restriction.value, "clusters": self.clusters,
            "instances": self.instances, "seed": self.seed, "cap": self.cap,
        }


@dataclass(frozen=True)
class InstanceTally:
    index: int
    seed: int
    examined: int
    survived: int
    errors: int = 0

    @property
    def loss_fraction(self) -> float:
        return 1.0 - self.survived / self.examined if self.examined else float("nan")


@dataclass
class CensusResult:
    spec: CensusSpec
    examined: int
    survived: int
    loss_fraction: float
    stderr: float
    exact: bool = True
    per_instance: List[InstanceTally] = field(default_factory=list)

    @property
    def errors(self) -> int:
        return sum(t.errors for t in self.per_instance)

    def to_row(self) -> Dict[str, Any]:
        return {
            "N": self.spec.N,
            "n": self.spec.n,
            "k": self.spec.k,
            "restriction": self.spec.label,
            "instances": self.spec.instances,
            "faces": self.examined,
            "survived": self.survived,
            "loss_fraction": self.loss_fraction,
            "stderr": self.stderr,
            "seed": self.spec.seed,
        }


@dataclass
class LossComparison:
    all_faces: CensusResult
    block_faces: CensusResult
    difference: float
    z_statistic: float
    passed: bool
    sigma: float = 3.0

    def to_dict(self) -> Dict[str, Any]:
        return {
            "fraction_all": self.all_faces.loss_fraction,
            "fraction_block": self.block_faces.loss_fraction,
            "difference": self.difference,
            "z_statistic": self.z_statistic,
            "sigma": self.sigma,
            "passed": self.passed,
        }
