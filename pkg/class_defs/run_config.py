"""
Defines the pydantic models that validate command-line flags before any computation.

RunConfig:
    seed: int - master seed, fixed default (never time-based).
    jobs: Optional[int] - worker override (None: PTLAB_JOBS).
    command: str - generating command, embedded in outputs.

ThresholdConfig: model, zetas, regime, delta range, points, spacing, tau, output paths.
SubspacesConfig: model, N / depth, k, C, enumerate flag.
CensusConfig: N, n, k, restriction, C, instances, cap, compare flag, output path.
PhaseDiagramConfig: N, grid shape, trials, model parameters, output paths, budget confirmation.
"""

import math
from pathlib import Path
from typing import List, Literal, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from class_defs.census_def import FaceRestriction
from class_defs.problem_def import SparsityModel, TreeRegime
from class_defs.threshold_def import INV_SQRT_PI
from config import Config
from utils.validation import parse_float_list, parse_grid, parse_range

ModelName = Literal["simple", "block", "tree"]


class RunConfig(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)

    seed: int = Field(default=Config.DEFAULT_SEED, ge=0)
    jobs: Optional[int] = None
    command: str = ""


class ThresholdConfig(RunConfig):
    model: ModelName = "simple"
    zetas: List[float] = Field(default_factory=list)
    regime: Literal["small_k", "large_k", "both", "auto"] = "both"
    delta_range: Tuple[float, float] = (1e-3, 0.5)
    points: int = Field(default=200, ge=2)
    linear: bool = False
    tau: float = Config.THRESHOLD_TAU
    out: Optional[Path] = None
    svg: Optional[Path] = None

    @field_validator("zetas", mode="before")
    @classmethod
    def _split_zetas(cls, value):
        if value is None or value == "":
            return []
        if isinstance(value, str):
            return parse_float_list(value)
        return value

    @field_validator("delta_range", mode="before")
    @classmethod
    def _parse_delta(cls, value):
        if isinstance(value, str):
            return parse_range(value)
        return value

    @model_validator(mode="after")
    def _check(self):
        low, high = self.delta_range
        if not 0.0 < low < high <= INV_SQRT_PI:
            raise ValueError(f"--delta must satisfy 0 < min < max <= {INV_SQRT_PI:.6f}")
        if self.tau < 2.0 * math.e - 1e-12:
            raise ValueError("--tau must be >= 2e")
        if self.model == "block":
            if not self.zetas:
                raise ValueError("--model block needs --zeta")
            if any(not 0.0 < z <= 1.0 for z in self.zetas):
                raise ValueError("--zeta values must lie in (0, 1]")
        if self.model == "tree" and self.regime == "auto":
            raise ValueError("--regime auto needs (N, k); use small_k, large_k or both for curves")
        return self

    def models(self) -> List[SparsityModel]:
        if self.model == "block":
            return [SparsityModel.block(zeta=z) for z in self.zetas]
        if self.model == "tree":
            if self.regime == "both":
                return [SparsityModel.tree(TreeRegime.SMALL_K), SparsityModel.tree(TreeRegime.LARGE_K)]
            return [SparsityModel.tree(TreeRegime(self.regime))]
        return [SparsityModel.simple()]


class SubspacesConfig(RunConfig):
    model: ModelName = "block"
    N: Optional[int] = Field(default=None, ge=1)
    depth: Optional[int] = Field(default=None, ge=1)
    k: int = Field(ge=0)
    clusters: Optional[int] = Field(default=None, ge=1)
    enumerate: bool = False

    @model_validator(mode="after")
    def _check(self):
        if self.model == "tree":
            if self.depth is None and self.N is None:
                raise ValueError("--model tree needs --depth (or --n, a power of two)")
            if self.depth is None and (self.N < 2 or self.N & (self.N - 1)):
                raise ValueError("tree length --n must be a power of two")
            if self.k < 1:
                raise ValueError("tree sparsity --k must be >= 1")
        else:
            if self.N is None:
                raise ValueError(f"--model {self.model} needs --n")
            if self.k > self.N:
                raise ValueError("--k must not exceed --n")
        if self.model == "block":
            if self.clusters is None:
                raise ValueError("--model block needs --c")
            if not 1 <= self.clusters <= self.k:
                raise ValueError("--c must satisfy 1 <= C <= k")
        return self

    @property
    def tree_depth(self) -> int:
        return self.depth if self.depth is not None else self.N.bit_length() - 1


class CensusConfig(RunConfig):
    N: int = Field(ge=1)
    n: int = Field(ge=1)
    k: int = Field(ge=0)
    restriction: FaceRestriction = FaceRestriction.ALL
    clusters: Optional[int] = Field(default=None, ge=1)
    instances: int = Field(default=1, ge=1)
    cap: Optional[int] = Field(default=None, ge=1)
    compare_block: bool = False
    out: Optional[Path] = None

    @model_validator(mode="after")
    def _check(self):
        if self.n > self.N:
            raise ValueError("--n must not exceed --N")
        if self.k >= self.N:
            raise ValueError("--k must be smaller than --N")
        needs_c = self.compare_block or self.restriction == FaceRestriction.BLOCK
        if needs_c and self.clusters is None:
            raise ValueError("block faces need --c")
        if needs_c and self.clusters > self.k + 1:
            raise ValueError("--c must not exceed k+1")
        return self


class PhaseDiagramConfig(RunConfig):
    N: int = Field(ge=2)
    grid: Tuple[int, int] = (12, 12)
    trials: int = Field(default=25, ge=1)
    model: ModelName = "simple"
    zeta: Optional[float] = None
    clusters: Optional[int] = Field(default=None, ge=1)
    regime: Literal["small_k", "large_k", "auto"] = "auto"
    tolerance: float = Field(default=Config.SUCCESS_TOLERANCE, gt=0.0)
    out: Path
    curve_out: Optional[Path] = None
    report: Optional[Path] = None
    svg: Optional[Path] = None
    yes: bool = False

    @field_validator("grid", mode="before")
    @classmethod
    def _parse_grid(cls, value):
        if isinstance(value, str):
            return parse_grid(value)
        return value

    @field_validator("zeta", mode="before")
    @classmethod
    def _single_zeta(cls, value):
        if isinstance(value, str):
            values = parse_float_list(value)
            if len(values) != 1:
                raise ValueError("phase diagrams take a single --zeta")
            return values[0]
        return value

    @model_validator(mode="after")
    def _check(self):
        if self.model == "block":
            if (self.zeta is None) == (self.clusters is None):
                raise ValueError("--model block needs exactly one of --zeta and --c")
            if self.zeta is not None and not 0.0 < self.zeta <= 1.0:
                raise ValueError("--zeta must lie in (0, 1]")
        if self.model == "tree" and self.N & (self.N - 1):
            raise ValueError("tree phase diagrams need --N a power of two")
        if round(self.N / self.grid[0]) < 1:
            raise ValueError("grid too fine for --N: the first column has n < 1")
        return self

    def sparsity_model(self) -> SparsityModel:
        if self.model == "block":
            return SparsityModel.block(clusters=self.clusters, zeta=self.zeta)
        if self.model == "tree":
            return SparsityModel.tree(TreeRegime(self.regime))
        return SparsityModel.simple()

    def resolved_paths(self) -> Tuple[Path, Path]:
        stem = self.out.with_suffix("")
        curve = self.curve_out or Path(f"{stem}_curve.csv")
        report = self.report or Path(f"{stem}_report.json")
        return curve, report
