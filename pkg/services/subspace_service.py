"""
Subspace and face counting for simple, block and tree sparsity.

Closed forms are evaluated in the log domain; the brute-force enumerators
exist as oracles for the closed forms and as the source of exact uniform
sampling through count-indexed unranking.
"""

import math
from functools import lru_cache
from itertools import combinations
from typing import Iterator, List, Tuple

from scipy.special import betaln

from class_defs.problem_def import (
    BlockPattern,
    CountValue,
    ModelVariant,
    SparsityModel,
    TreeRegime,
    TreeSupport,
)
from config import Config
from infrastructure.errors import DomainError, SizeError, require
from infrastructure.logger import get_logger
from utils.combinatorics import unrank_combination

logger = get_logger(__name__)

_EXACT_LOG_BINOMIAL_MAX_N = 2048
_LOG_EXACT_LIMIT = math.log(Config.EXACT_COUNT_LIMIT)


def log_binomial(n: int, k: int) -> float:
    """
    Natural log of the binomial coefficient C(n, k).

    Exact big-integer evaluation for small n, log-beta evaluation beyond it.

    Args:
        n: ground set size, n >= 0
        k: subset size, 0 <= k <= n

    Returns:
        ln C(n, k)
    """
    if n < 0 or k < 0 or k > n:
        raise DomainError(f"log_binomial needs 0 <= k <= n, got n={n}, k={k}")
    if k == 0 or k == n:
        return 0.0
    if n <= _EXACT_LOG_BINOMIAL_MAX_N:
        return math.log(math.comb(n, k))
    return float(-math.log1p(n) - betaln(n - k + 1, k + 1))


def _count_from_log(log_value: float, exact) -> CountValue:
    if log_value >= _LOG_EXACT_LIMIT:
        logger.debug("Count exp(%.3f) exceeds the exact range; reporting log value", log_value)
        return CountValue.from_log(log_value)
    return CountValue.from_int(exact())


def simple_face_count(N: int, k: int) -> CountValue:
    """
    Number of k-faces of the N-dimensional cross-polytope, 2^(k+1) * C(N, k+1).
    """
    require(0 <= k < N, f"simple_face_count needs 0 <= k < N, got N={N}, k={k}")
    log_value = (k + 1) * math.log(2.0) + log_binomial(N, k + 1)
    return _count_from_log(log_value, lambda: 2 ** (k + 1) * math.comb(N, k + 1))


def _check_block_dims(N: int, k: int, C: int) -> None:
    require(1 <= C <= k <= N, f"block model needs 1 <= C <= k <= N, got N={N}, k={k}, C={C}")


def block_log_count(N: int, k: int, C: int) -> float:
    _check_block_dims(N, k, C)
    if N + 1 - k < C:
        return float("-inf")
    return log_binomial(N + 1 - k, C) + log_binomial(k - 1, C - 1)


def block_subspace_count(N: int, k: int, C: int) -> CountValue:
    """
    Number of length-N supports of size k forming exactly C maximal runs,
    C(N+1-k, C) * C(k-1, C-1).
    """
    log_value = block_log_count(N, k, C)
    if log_value == float("-inf"):
        return CountValue(value=0, log_value=log_value)
    return _count_from_log(log_value, lambda: math.comb(N + 1 - k, C) * math.comb(k - 1, C - 1))


def _count_runs(support: Tuple[int, ...]) -> int:
    runs = 0
    previous = -2
    for index in support:
        if index != previous + 1:
            runs += 1
        previous = index
    return runs


def enumerate_block_supports(N: int, k: int, C: int) -> List[BlockPattern]:
    """
    Brute-force listing of every size-k support with exactly C maximal runs.
    Scans all C(N, k) supports, so it is independent of the closed form.
    """
    _check_block_dims(N, k, C)
    if N > Config.BLOCK_ENUM_MAX_N:
        raise SizeError(f"block enumeration is limited to N <= {Config.BLOCK_ENUM_MAX_N}, got N={N}")
    return [
        BlockPattern.from_support(support, N)
        for support in combinations(range(N), k)
        if _count_runs(support) == C
    ]


def unrank_block_support(N: int, k: int, C: int, index: int) -> BlockPattern:
    """
    The index-th (K, C) block pattern for 0 <= index < block_subspace_count(N, k, C).

    The count factors into gap placements (C(N+1-k, C)) times run-length
    compositions (C(k-1, C-1)); index is split accordingly.
    """
    _check_block_dims(N, k, C)
    gap_choices = math.comb(N + 1 - k, C) if N + 1 - k >= C else 0
    length_choices = math.comb(k - 1, C - 1)
    if not 0 <= index < gap_choices * length_choices:
        raise DomainError(f"pattern index {index} out of range")
    gap_index, length_index = divmod(index, length_choices)

    # compositions of k into C positive parts via C-1 cut points in 1..k-1
    cuts = (0,) + tuple(c + 1 for c in unrank_combination(k - 1, C - 1, length_index)) + (k,)
    lengths = [cuts[i + 1] - cuts[i] for i in range(C)]

    # zeros N-k into C+1 gaps, interior gaps >= 1: C markers among N-k+1 slots
    markers = unrank_combination(N + 1 - k, C, gap_index)
    zeros = [markers[0]]
    zeros.extend(markers[i] - markers[i - 1] for i in range(1, C))
    zeros.append(N - k - markers[-1])

    runs = []
    for i in range(C):
        runs.append(zeros[i])
        runs.append(lengths[i])
    runs.append(zeros[C])
    return BlockPattern(tuple(runs))


def _tree_bound_log(k: int, regime: TreeRegime) -> float:
    if regime == TreeRegime.SMALL_K:
        return k * math.log(2.0 * math.e) - math.log(k + 1)
    return (k + 4) * math.log(4.0) - math.log(k) - 2.0


def tree_subspace_bound(N: int, k: int) -> Tuple[float, TreeRegime]:
    """
    Upper bound on the number of tree-sparse supports of size k in a
    length-N wavelet tree, in log scale.

    Args:
        N: signal length, a power of two
        k: sparsity, k >= 1

    Returns:
        (log bound, regime) where the regime is SMALL_K when k < log2(N).
    """
    require(k >= 1, f"tree bound needs k >= 1, got {k}")
    require(N >= 2 and N & (N - 1) == 0, f"tree bound needs N a power of two, got {N}")
    depth = N.bit_length() - 1
    regime = TreeRegime.SMALL_K if k < depth else TreeRegime.LARGE_K
    return _tree_bound_log(k, regime), regime


@lru_cache(maxsize=64)
def _tree_count_table(depth: int, k: int) -> Tuple[Tuple[int, ...], ...]:
    # table[d][j]: rooted connected subtrees with j nodes in a depth-d complete binary tree
    table = [tuple([1] + [0] * k)]
    for d in range(1, depth + 1):
        below = table[-1]
        row = [1]
        for j in range(1, k + 1):
            row.append(sum(below[left] * below[j - 1 - left] for left in range(j)))
        table.append(tuple(row))
    return tuple(table)


def _check_tree_dims(depth: int, k: int) -> int:
    require(depth >= 1, f"tree depth must be >= 1, got {depth}")
    node_count = 2 ** depth - 1
    require(0 <= k <= node_count, f"tree support size {k} exceeds {node_count} nodes")
    return node_count


def count_tree_supports(depth: int, k: int) -> int:
    """Exact number of root-containing connected subtrees of size k (Catalan(k) once depth >= k)."""
    _check_tree_dims(depth, k)
    return _tree_count_table(depth, k)[depth][k]


def _subtrees(node: int, depth: int, size: int, table) -> Iterator[Tuple[int, ...]]:
    if size == 0:
        yield ()
        return
    if depth == 0:
        return
    below = table[depth - 1]
    for left_size in range(size):
        right_size = size - 1 - left_size
        if below[left_size] == 0 or below[right_size] == 0:
            continue
        for left in _subtrees(2 * node + 1, depth - 1, left_size, table):
            for right in _subtrees(2 * node + 2, depth - 1, right_size, table):
                yield (node,) + left + right


def enumerate_tree_supports(depth: int, k: int) -> List[TreeSupport]:
    """
    Every root-containing connected subtree with k nodes of the complete binary tree of given depth.
    """
    node_count = _check_tree_dims(depth, k)
    if node_count > Config.TREE_ENUM_MAX_NODES:
        raise SizeError(f"tree enumeration is limited to {Config.TREE_ENUM_MAX_NODES} nodes, got {node_count}")
    table = _tree_count_table(depth, k)
    total = table[depth][k]
    if total > Config.TREE_ENUM_MAX_COUNT:
        raise SizeError(f"{total} tree supports exceed the enumeration cap {Config.TREE_ENUM_MAX_COUNT}")
    return [TreeSupport(depth, tuple(sorted(nodes))) for nodes in _subtrees(0, depth, k, table)]


def unrank_tree_support(depth: int, k: int, index: int) -> TreeSupport:
    """The index-th support in enumerate_tree_supports order, without enumerating."""
    _check_tree_dims(depth, k)
    table = _tree_count_table(depth, k)
    if not 0 <= index < table[depth][k]:
        raise DomainError(f"subtree index {index} out of range")
    nodes: List[int] = []
    pending = [(0, depth, k, index)]
    while pending:
        node, level, size, rank = pending.pop()
        if size == 0:
            continue
        nodes.append(node)
        below = table[level - 1]
        for left_size in range(size):
            right_size = size - 1 - left_size
            block = below[left_size] * below[right_size]
            if rank < block:
                left_rank, right_rank = divmod(rank, below[right_size])
                pending.append((2 * node + 1, level - 1, left_size, left_rank))
                pending.append((2 * node + 2, level - 1, right_size, right_rank))
                break
            rank -= block
    return TreeSupport(depth, tuple(sorted(nodes)))


def subspace_log_count(model: SparsityModel, N: int, k: int) -> float:
    """
    ln m_k, the model's count of admissible supports of size k.

    Simple: C(N, k). Block: B(K, C). Tree: the upper bound for the resolved regime.
    """
    if model.variant == ModelVariant.SIMPLE:
        return log_binomial(N, k)
    if model.variant == ModelVariant.BLOCK:
        return block_log_count(N, k, min(model.cluster_count(k), k))
    resolved = model.resolve(N, k)
    require(k >= 1, "tree count needs k >= 1")
    return _tree_bound_log(k, resolved.regime)


def combinatorial_prefactor(model: SparsityModel, N: int, k: int, ell: int) -> float:
    """
    Log of the face-pair counting factor for k-faces inside ell-faces.

    Simple: ln(2^(ell+1) C(N, k+1) C(N-k-1, ell-k)).
    Structured: ln(2^(ell+1) m_k C(N-k-1, ell-k)).
    """
    require(ell >= k, f"prefactor needs ell >= k, got k={k}, ell={ell}")
    require(0 <= k and ell < N, f"prefactor needs k <= ell < N, got N={N}, ell={ell}")
    tail = (ell + 1) * math.log(2.0) + log_binomial(N - k - 1, ell - k)
    if model.variant == ModelVariant.SIMPLE:
        return tail + log_binomial(N, k + 1)
    return tail + subspace_log_count(model, N, k)


def delta_diff(N: int, k: int, C: int, mode: str = "exact") -> float:
    """
    Per-dimension log ratio of block to simple prefactors.

    Args:
        N, k, C: block model dimensions, 1 <= C <= k <= N
        mode: "exact" for (1/N) ln(B_(K,C) / C(N, k+1)), "asymptotic" for (C - k)/N

    Returns:
        Delta_diff value
    """
    _check_block_dims(N, k, C)
    if mode == "asymptotic":
        return (C - k) / N
    if mode != "exact":
        raise DomainError(f"unknown delta_diff mode {mode!r}")
    require(k + 1 <= N, f"exact delta_diff needs k < N, got N={N}, k={k}")
    return (block_log_count(N, k, C) - log_binomial(N, k + 1)) / N
