"""
Gaussian sensing ensembles, structured signal generation, basis pursuit and
exact face-survival certification.
"""

import math
from typing import Optional, Sequence, Set, Tuple

import numpy as np
from scipy.linalg import cho_factor, cho_solve
from scipy.optimize import linprog

from class_defs.problem_def import ProblemSize, SparsityModel, TreeRegime
from class_defs.sensing_def import Face, SensingInstance, Signal, SurvivalVerdict
from config import Config
from infrastructure.errors import DomainError, NonConvergenceError, SizeError, require
from infrastructure.logger import get_logger
from infrastructure.seeds import make_rng
from services.subspace_service import (
    block_subspace_count,
    count_tree_supports,
    unrank_block_support,
    unrank_tree_support,
)

logger = get_logger(__name__)

_INT64_LIMIT = 2 ** 63


def gaussian_instance(size: ProblemSize, seed: int) -> SensingInstance:
    """
    n x N matrix with i.i.d. N(0, 1/n) entries, reproducible from the seed.
    """
    rng = make_rng(seed)
    matrix = rng.standard_normal((size.n, size.N)) / math.sqrt(size.n)
    return SensingInstance(size=size, matrix=matrix, seed=int(seed))


def _uniform_index(rng: np.random.Generator, total: int) -> int:
    if total < _INT64_LIMIT:
        return int(rng.integers(total))
    # rejection sampling on raw bytes for counts beyond int64
    width = (total.bit_length() + 7) // 8
    limit = (256 ** width // total) * total
    while True:
        candidate = int.from_bytes(rng.bytes(width), "little")
        if candidate < limit:
            return candidate % total


def sample_sparse_signal(N: int, k: int, seed: int) -> Signal:
    """k-sparse signal with a uniformly random support and standard normal values."""
    require(0 <= k <= N, f"need 0 <= k <= N, got k={k}, N={N}")
    rng = make_rng(seed)
    support = tuple(sorted(int(j) for j in rng.choice(N, size=k, replace=False)))
    coefficients = np.zeros(N)
    coefficients[list(support)] = rng.standard_normal(k)
    return Signal(coefficients, support, SparsityModel.simple(), int(seed))


def sample_block_signal(N: int, k: int, C: int, seed: int) -> Signal:
    """
    Block-sparse signal whose support is uniform over all (K, C) patterns of
    length N; nonzero values are i.i.d. standard normal. k = 0 gives the zero signal.
    """
    model = SparsityModel.block(clusters=max(C, 1))
    if k == 0:
        return Signal(np.zeros(N), (), model, int(seed))
    require(1 <= C <= k <= N, f"block signal needs 1 <= C <= k <= N, got N={N}, k={k}, C={C}")
    total = block_subspace_count(N, k, C)
    if total.overflow:
        raise SizeError(f"block pattern count exp({total.log_value:.1f}) is too large to unrank")
    require(total.value > 0, f"no (K={k}, C={C}) pattern fits in length {N}")
    rng = make_rng(seed)
    pattern = unrank_block_support(N, k, C, _uniform_index(rng, total.value))
    support = pattern.support
    coefficients = np.zeros(N)
    coefficients[list(support)] = rng.standard_normal(k)
    return Signal(coefficients, support, model, int(seed))


def _grow_tree_support(rng: np.random.Generator, node_count: int, k: int) -> Tuple[int, ...]:
    nodes = [0]
    frontier = [c for c in (1, 2) if c < node_count]
    while len(nodes) < k:
        pick = int(rng.integers(len(frontier)))
        node = frontier.pop(pick)
        nodes.append(node)
        frontier.extend(c for c in (2 * node + 1, 2 * node + 2) if c < node_count)
    return tuple(sorted(nodes))


def sample_tree_signal(depth: int, k: int, seed: int, regime: TreeRegime = TreeRegime.AUTO) -> Signal:
    """
    Tree-sparse signal on the wavelet layout of length 2^depth: index 0 is the
    scaling coefficient (zero), tree node i sits at index i+1.

    Supports are exactly uniform over connected root subtrees (count-indexed
    unranking) up to Config.TREE_UNIFORM_MAX_K nodes; larger supports are
    grown by random attachment and flagged non-uniform.
    """
    require(depth >= 1, f"tree depth must be >= 1, got {depth}")
    node_count = 2 ** depth - 1
    if node_count > Config.TREE_ENUM_MAX_NODES:
        raise SizeError(f"tree signals are limited to {Config.TREE_ENUM_MAX_NODES} nodes, got {node_count}")
    require(0 <= k <= node_count, f"tree support size {k} exceeds {node_count} nodes")
    N = node_count + 1
    model = SparsityModel.tree(regime)
    if k == 0:
        return Signal(np.zeros(N), (), model, int(seed))

    rng = make_rng(seed)
    uniform = k <= Config.TREE_UNIFORM_MAX_K
    if uniform:
        total = count_tree_supports(depth, k)
        nodes = unrank_tree_support(depth, k, _uniform_index(rng, total)).nodes
    else:
        logger.info("Tree support of size %d drawn by random growth (not exactly uniform)", k)
        nodes = _grow_tree_support(rng, node_count, k)
    support = tuple(node + 1 for node in nodes)
    coefficients = np.zeros(N)
    coefficients[list(support)] = rng.standard_normal(k)
    return Signal(coefficients, support, model, int(seed), uniform_support=uniform)


def recovery_error(x_true: np.ndarray, x_hat: np.ndarray) -> float:
    """Relative l2 error; absolute when x_true is zero."""
    scale = float(np.linalg.norm(x_true))
    error = float(np.linalg.norm(np.asarray(x_hat) - np.asarray(x_true)))
    return error / scale if scale > 0.0 else error


def face_indicator(face: Face, N: int) -> np.ndarray:
    """Signed indicator of a face as a length-N vector."""
    require(all(0 <= j < N for j in face.support), f"face support {face.support} outside [0, {N})")
    return face.indicator(N)


def _certificate_norm(A: np.ndarray, support: Sequence[int], signs: Sequence[float]) -> float:
    """
    Smallest max off-support |a_j^T w| over all w with A_S^T w = signs.

    inf when no such w exists; 0 when the support covers every column.
    """
    n, N = A.shape
    off = np.ones(N, dtype=bool)
    off[list(support)] = False
    if not off.any():
        return 0.0
    A_S = A[:, list(support)]
    A_off = A[:, off]
    m = A_off.shape[1]

    # variables: w (n, free) and t >= 0; minimize t
    cost = np.zeros(n + 1)
    cost[-1] = 1.0
    A_ub = np.vstack([
        np.hstack([A_off.T, -np.ones((m, 1))]),
        np.hstack([-A_off.T, -np.ones((m, 1))]),
    ])
    b_ub = np.zeros(2 * m)
    A_eq = np.hstack([A_S.T, np.zeros((len(support), 1))])
    b_eq = np.asarray(signs, dtype=float)
    bounds = [(None, None)] * n + [(0.0, None)]

    result = linprog(cost, A_ub=A_ub, b_ub=b_ub, A_eq=A_eq, b_eq=b_eq, bounds=bounds, method="highs")
    if result.status == 2:
        return float("inf")
    if result.status != 0:
        raise NonConvergenceError(
            "certificate linear program failed",
            {"status": int(result.status), "message": result.message, "support": tuple(support)},
        )
    return float(result.fun)


def _lp_certified(A: np.ndarray, x: np.ndarray, tried: Set[Tuple[int, ...]]) -> bool:
    """Whether the feasible point x satisfies the l1 optimality conditions, by LP."""
    support = tuple(int(j) for j in np.flatnonzero(x))
    if not support or support in tried:
        return False
    tried.add(support)
    return _certificate_norm(A, support, np.sign(x[list(support)])) <= 1.0 + Config.SURVIVAL_MARGIN


def _soft_threshold(v: np.ndarray, level: float) -> np.ndarray:
    return np.sign(v) * np.maximum(np.abs(v) - level, 0.0)


def _polish(A: np.ndarray, b: np.ndarray, z: np.ndarray, tol: float) -> Tuple[Optional[np.ndarray], bool]:
    """
    Least-squares refit on the support of z.

    Returns the refit (or None when it is infeasible) and whether a
    least-squares dual certificate proves it is the unique l1 minimizer.
    """
    n, N = A.shape
    peak = float(np.max(np.abs(z)))
    if peak == 0.0:
        return None, False
    support = np.flatnonzero(np.abs(z) > Config.BP_POLISH_THRESHOLD * peak)
    if support.size > n:
        return None, False
    A_S = A[:, support]
    coef, _, rank, _ = np.linalg.lstsq(A_S, b, rcond=None)
    if rank < support.size:
        return None, False
    x = np.zeros(N)
    x[support] = coef
    if np.linalg.norm(A @ x - b) > tol * max(np.linalg.norm(b), 1.0):
        return None, False
    if np.any(coef == 0.0):
        return x, False
    signs = np.sign(coef)
    w, *_ = np.linalg.lstsq(A_S.T, signs, rcond=None)
    off = np.ones(N, dtype=bool)
    off[support] = False
    if np.max(np.abs(A_S.T @ w - signs)) > 1e-10:
        return x, False
    certified = not off.any() or float(np.max(np.abs(A[:, off].T @ w))) < 1.0 - 1e-10
    return x, certified


def basis_pursuit(
    instance: SensingInstance,
    y: np.ndarray,
    tol: float = Config.BP_RESIDUAL_TOL,
    max_iter: int = Config.BP_MAX_ITER,
    check_every: int = 25,
) -> np.ndarray:
    """
    Solve min ||x||_1 subject to A x = y.

    ADMM splitting of the affine constraint and the l1 norm, with the
    measurements normalized to unit norm (the program is positively
    homogeneous). Every `check_every` iterations, and once more at
    convergence, the current support is refit by least squares; a refit that
    carries a dual certificate (least-squares, or the certificate LP once the
    primal residual is small) ends the iteration early. A square system is
    solved directly.

    Args:
        instance: sensing instance providing A
        y: length-n measurements in the column space of A
        tol: relative primal/dual residual tolerance
        max_iter: iteration cap

    Returns:
        Length-N minimizer.

    Raises:
        NonConvergenceError: the cap was reached; diagnostics carry the residuals.
    """
    A = instance.matrix
    n, N = A.shape
    y = np.asarray(y, dtype=float)
    if y.shape != (n,):
        raise DomainError(f"measurement length {y.shape} does not match n={n}")
    y_norm = float(np.linalg.norm(y))
    if y_norm == 0.0:
        return np.zeros(N)
    if n == N:
        # the only feasible point of an invertible square system
        try:
            return np.linalg.solve(A, y)
        except np.linalg.LinAlgError:
            raise DomainError("square sensing matrix is singular")
    b = y / y_norm

    gram = cho_factor(A @ A.T)
    tried: Set[Tuple[int, ...]] = set()

    def project(v: np.ndarray) -> np.ndarray:
        return v - A.T @ cho_solve(gram, A @ v - b)

    penalty = Config.BP_PENALTY
    x = project(np.zeros(N))
    z = x.copy()
    u = np.zeros(N)
    primal = dual = float("inf")
    for iteration in range(1, max_iter + 1):
        x = project(z - u)
        z_old = z
        z = _soft_threshold(x + u, 1.0 / penalty)
        u = u + x - z

        scale = max(float(np.linalg.norm(x)), float(np.linalg.norm(z)), 1e-300)
        primal = float(np.linalg.norm(x - z)) / scale
        change = float(np.linalg.norm(z - z_old)) / scale
        dual = penalty * change

        if iteration % check_every == 0:
            refit, certified = _polish(A, b, z, tol)
            if not certified and refit is not None and primal <= Config.BP_CERTIFY_RESIDUAL:
                certified = _lp_certified(A, refit, tried)
            if certified:
                logger.debug("Basis pursuit certified after %d iterations", iteration)
                return refit * y_norm

        if primal <= tol and (dual <= tol or change <= Config.BP_CHANGE_TOL):
            feasible = project(z)
            refit, _ = _polish(A, b, z, tol)
            if refit is not None and np.abs(refit).sum() <= np.abs(feasible).sum() + tol:
                return refit * y_norm
            return feasible * y_norm

    refit, certified = _polish(A, b, z, tol)
    if refit is not None and (certified or _lp_certified(A, refit, set())):
        logger.info("Basis pursuit stalled at primal residual %.3g; returning the certified refit", primal)
        return refit * y_norm

    diagnostics = {"iterations": max_iter, "primal_residual": primal, "dual_residual": dual}
    logger.warning("Basis pursuit hit the iteration cap: %s", diagnostics)
    raise NonConvergenceError("basis pursuit did not converge", diagnostics)


def face_survives(instance: SensingInstance, face: Face, margin: float = Config.SURVIVAL_MARGIN) -> SurvivalVerdict:
    """
    Decide whether the projected face A F is a face of the projected cross-polytope.

    Equivalent to unique l1 recovery of the face's signed indicator: the
    support submatrix must have full column rank and some w must satisfy
    A_S^T w = signs with max off-support |a_j^T w| < 1 - margin. The smallest
    such off-support norm is found by a linear program.
    """
    A = instance.matrix
    n, N = A.shape
    support = list(face.support)
    if any(not 0 <= j < N for j in support):
        raise DomainError(f"face support {face.support} outside [0, {N})")
    if len(support) > n:
        return SurvivalVerdict(False, rank_deficient=True)
    A_S = A[:, support]
    if np.linalg.matrix_rank(A_S) < len(support):
        return SurvivalVerdict(False, rank_deficient=True)

    dual_norm = _certificate_norm(A, support, face.signs)
    return SurvivalVerdict(dual_norm < 1.0 - margin, dual_norm=dual_norm)
