"""
Defines dataclasses for sensing problems, structured signals and cross-polytope faces.

SensingInstance:
    size: ProblemSize - problem dimensions.
    matrix: np.ndarray - n x N measurement matrix, read-only.
    seed: int - seed the matrix was drawn from.
    ensemble: str - ensemble tag ("gaussian").

Signal:
    coefficients: np.ndarray - length-N coefficients, zero off the support.
    support: Tuple[int, ...] - sorted support indices.
    model: SparsityModel - model the support was drawn from.
    seed: int - seed of the draw.
    uniform_support: bool - False when the support sampler is not exactly uniform.

Face:
    support: Tuple[int, ...] - k+1 distinct indices in [0, N).
    signs: Tuple[int, ...] - +1/-1 per support index.

SurvivalVerdict:
    survives: bool - whether the projected face is a face of the projected polytope.
    rank_deficient: bool - support submatrix lacked full column rank.
    dual_norm: float - optimal off-support correlation of the certificate (inf if infeasible).
"""

from dataclasses import dataclass, field
from typing import Any, Dict, Tuple

import numpy as np

from class_defs.problem_def import ProblemSize, SparsityModel
from infrastructure.errors import DomainError


@dataclass(frozen=True)
class SensingInstance:
    size: ProblemSize
    matrix: np.ndarray = field(repr=False, compare=False)
    seed: int = 0
    ensemble: str = "gaussian"

    def __post_init__(self):
        if self.matrix.shape != (self.size.n, self.size.N):
            raise DomainError(f"matrix shape {self.matrix.shape} does not match n={self.size.n}, N={self.size.N}")
        self.matrix.setflags(write=False)

    def measure(self, x: np.ndarray) -> np.ndarray:
        return self.matrix @ x

    def to_dict(self) -> Dict[str, Any]:
        return {"size": self.size.to_dict(), "seed": self.seed, "ensemble": self.ensemble}


@dataclass(frozen=True)
class Signal:
    coefficients: np.ndarray = field(repr=False, compare=False)
    support: Tuple[int, ...] = ()
    model: SparsityModel = field(default_factory=SparsityModel.simple)
    seed: int = 0
    uniform_support: bool = True

    def __post_init__(self):
        off_support = np.ones(self.coefficients.shape[0], dtype=bool)
        off_support[list(self.support)] = False
        if np.any(self.coefficients[off_support] != 0.0):
            raise DomainError("signal has nonzero entries off its support")
        self.coefficients.setflags(write=False)

    @property
    def length(self) -> int:
        return int(self.coefficients.shape[0])

    @property
    def sparsity(self) -> int:
        return len(self.support)

    def measure(self, instance: SensingInstance) -> np.ndarray:
        return instance.measure(self.coefficients)


@dataclass(frozen=True)
class Face:
    support: Tuple[int, ...]
    signs: Tuple[int, ...]

    def __post_init__(self):
        if len(self.support) != len(self.signs):
            raise DomainError("face needs one sign per support index")
        if len(set(self.support)) != len(self.support):
            raise DomainError("face support indices must be distinct")
        if any(s not in (1, -1) for s in self.signs):
            raise DomainError("face signs must be +1 or -1")

    @property
    def dimension(self) -> int:
        return len(self.support) - 1

    def flipped(self) -> "Face":
        return Face(self.support, tuple(-s for s in self.signs))

    def indicator(self, N: int) -> np.ndarray:
        """Signed vertex sum of the face, a point on the ray through its barycenter."""
        x = np.zeros(N)
        x[list(self.support)] = self.signs
        return x


@dataclass(frozen=True)
class SurvivalVerdict:
    survives: bool
    rank_deficient: bool = False
    dual_norm: float = float("inf")

    def __bool__(self) -> bool:
        return self.survives
