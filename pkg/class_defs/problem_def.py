"""
Defines the dataclasses describing problem dimensions and sparsity structure.

ProblemSize:
    N: int - ambient dimension.
    n: int - number of measurements, 0 < n <= N.
    k: int - sparsity, 0 <= k <= n.

SparsityModel:
    variant: ModelVariant - simple, block or tree.
    clusters: Optional[int] - block cluster count C (fixed C).
    zeta: Optional[float] - block cluster fraction, C = max(1, floor(zeta * k)).
    regime: TreeRegime - tree regime; AUTO resolves per (N, k).

    cluster_count returns C for a given k.
    resolve returns a model with the tree regime fixed for given (N, k).
    to_dict / from_dict convert to and from plain dictionaries.

BlockPattern:
    runs: Tuple[int, ...] - alternating zero-run / nonzero-run lengths beta_1..beta_{2C+1}.

TreeSupport:
    depth: int - depth of the complete binary tree.
    nodes: Tuple[int, ...] - sorted heap-order node indices (root is 0).

CountValue:
    value: Optional[int] - exact count, None once it leaves the exact range.
    log_value: float - natural log of the count.
    overflow: bool - True when only log_value is meaningful.
"""

import math
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Any, Dict, Optional, Tuple

from config import Config
from infrastructure.errors import DomainError


class ModelVariant(str, Enum):
    SIMPLE = "simple"
    BLOCK = "block"
    TREE = "tree"


class TreeRegime(str, Enum):
    SMALL_K = "small_k"
    LARGE_K = "large_k"
    AUTO = "auto"


@dataclass(frozen=True)
class ProblemSize:
    N: int
    n: int
    k: int

    def __post_init__(self):
        if not 0 < self.n <= self.N:
            raise DomainError(f"need 0 < n <= N, got n={self.n}, N={self.N}")
        if not 0 <= self.k <= self.n:
            raise DomainError(f"need 0 <= k <= n, got k={self.k}, n={self.n}")

    @property
    def delta(self) -> float:
        return self.n / self.N

    @property
    def rho(self) -> float:
        return self.k / self.n

    def to_dict(self) -> Dict[str, int]:
        return {"N": self.N, "n": self.n, "k": self.k}

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "ProblemSize":
        return cls(N=int(data["N"]), n=int(data["n"]), k=int(data["k"]))


@dataclass(frozen=True)
class SparsityModel:
    variant: ModelVariant
    clusters: Optional[int] = None
    zeta: Optional[float] = None
    regime: TreeRegime = TreeRegime.AUTO

    def __post_init__(self):
        if self.variant == ModelVariant.BLOCK:
            if self.clusters is None and self.zeta is None:
                raise DomainError("block model needs a cluster count C or a cluster fraction zeta")
            if self.clusters is not None and self.clusters < 1:
                raise DomainError(f"block cluster count must be >= 1, got {self.clusters}")
            if self.zeta is not None and not 0.0 < self.zeta <= 1.0:
                raise DomainError(f"zeta must lie in (0, 1], got {self.zeta}")

    @classmethod
    def simple(cls) -> "SparsityModel":
        return cls(ModelVariant.SIMPLE)

    @classmethod
    def block(cls, clusters: Optional[int] = None, zeta: Optional[float] = None) -> "SparsityModel":
        return cls(ModelVariant.BLOCK, clusters=clusters, zeta=zeta)

    @classmethod
    def tree(cls, regime: TreeRegime = TreeRegime.AUTO) -> "SparsityModel":
        return cls(ModelVariant.TREE, regime=TreeRegime(regime))

    def cluster_count(self, k: int) -> int:
        """
        Cluster count C for sparsity k. A fixed C is used as given; zeta gives max(1, floor(zeta * k)).
        """
        if self.variant != ModelVariant.BLOCK:
            raise DomainError(f"{self.variant.value} model has no cluster count")
        if self.clusters is not None:
            return self.clusters
        return max(1, math.floor(self.zeta * k))

    def resolve(self, N: int, k: int) -> "SparsityModel":
        if self.variant != ModelVariant.TREE or self.regime != TreeRegime.AUTO:
            return self
        regime = TreeRegime.SMALL_K if k < math.log2(N) else TreeRegime.LARGE_K
        return replace(self, regime=regime)

    @property
    def tag(self) -> str:
        return self.variant.value

    @property
    def param(self) -> str:
        """Parameter label used in CSV rows and plot legends."""
        if self.variant == ModelVariant.BLOCK:
            if self.zeta is not None:
                return f"zeta={self.zeta:g}"
            return f"C={self.clusters}"
        if self.variant == ModelVariant.TREE:
            return f"regime={self.regime.value}"
        return ""

    def to_dict(self) -> Dict[str, Any]:
        return {
            "variant": self.variant.value,
            "clusters": self.clusters,
            "zeta": self.zeta,
            "regime": self.regime.value,
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "SparsityModel":
        return cls(
            variant=ModelVariant(data["variant"]),
            clusters=data.get("clusters"),
            zeta=data.get("zeta"),
            regime=TreeRegime(data.get("regime", TreeRegime.AUTO.value)),
        )


@dataclass(frozen=True)
class BlockPattern:
    runs: Tuple[int, ...]

    def __post_init__(self):
        if len(self.runs) % 2 == 0 or len(self.runs) < 3:
            raise DomainError(f"block pattern needs 2C+1 runs, got {len(self.runs)}")
        if any(r < 0 for r in self.runs):
            raise DomainError("run lengths must be non-negative")
        if any(r < 1 for r in self.runs[1:-1]):
            raise DomainError("interior runs must be non-empty")

    @property
    def clusters(self) -> int:
        return len(self.runs) // 2

    @property
    def length(self) -> int:
        return sum(self.runs)

    @property
    def sparsity(self) -> int:
        return sum(self.runs[1::2])

    @property
    def support(self) -> Tuple[int, ...]:
        indices = []
        position = 0
        for i, run in enumerate(self.runs):
            if i % 2 == 1:
                indices.extend(range(position, position + run))
            position += run
        return tuple(indices)

    @classmethod
    def from_support(cls, support, length: int) -> "BlockPattern":
        """Run-length encoding of a sorted support on a length-`length` signal."""
        runs = []
        position = 0
        previous = None
        for index in sorted(support):
            if previous is None or index != previous + 1:
                runs.append(index - position)
                runs.append(1)
            else:
                runs[-1] += 1
            position = index + 1
            previous = index
        if not runs:
            raise DomainError("empty support has no block pattern")
        runs.append(length - position)
        return cls(tuple(runs))


@dataclass(frozen=True)
class TreeSupport:
    depth: int
    nodes: Tuple[int, ...] = field(default_factory=tuple)

    def __post_init__(self):
        if self.nodes and self.nodes[0] != 0:
            raise DomainError("tree support must contain the root")
        members = set(self.nodes)
        for node in self.nodes[1:]:
            if (node - 1) // 2 not in members:
                raise DomainError(f"node {node} is not connected to the root")
        if self.nodes and self.nodes[-1] >= 2 ** self.depth - 1:
            raise DomainError(f"node {self.nodes[-1]} outside a depth-{self.depth} tree")

    @property
    def size(self) -> int:
        return len(self.nodes)

    def signal_indices(self) -> Tuple[int, ...]:
        """Positions in the coefficient vector; index 0 holds the scaling coefficient."""
        return tuple(node + 1 for node in self.nodes)


@dataclass(frozen=True)
class CountValue:
    value: Optional[int]
    log_value: float
    overflow: bool = False

    @classmethod
    def from_int(cls, count: int) -> "CountValue":
        log_value = math.log(count) if count > 0 else float("-inf")
        if count >= Config.EXACT_COUNT_LIMIT:
            return cls(value=None, log_value=log_value, overflow=True)
        return cls(value=count, log_value=log_value)

    @classmethod
    def from_log(cls, log_value: float) -> "CountValue":
        return cls(value=None, log_value=log_value, overflow=True)

    def to_dict(self) -> Dict[str, Any]:
        return {"value": self.value, "log_value": self.log_value, "overflow": self.overflow}
