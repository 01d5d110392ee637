"""
Face-survival censuses: how many k-faces of the cross-polytope survive a
random Gaussian projection, over all faces or over structured ones.
"""

import math
from dataclasses import dataclass
from typing import Callable, Iterator, List, Optional, Tuple

import numpy as np

from class_defs.census_def import CensusResult, CensusSpec, FaceRestriction, InstanceTally, LossComparison
from class_defs.problem_def import ProblemSize
from class_defs.sensing_def import Face
from config import Config
from infrastructure.errors import DomainError, NonConvergenceError, SizeError
from infrastructure.logger import get_logger
from infrastructure.seeds import derive_seed, make_rng
from infrastructure.tasks import run_parallel
from services.l1_service import face_survives, gaussian_instance
from services.subspace_service import block_subspace_count, enumerate_tree_supports, unrank_block_support
from utils.combinatorics import sign_pattern, unrank_combination

logger = get_logger(__name__)


@dataclass(frozen=True)
class _SupportSource:
    count: int
    support_at: Callable[[int], Tuple[int, ...]]


def _support_source(N: int, k: int, restriction: FaceRestriction, clusters: Optional[int]) -> _SupportSource:
    size = k + 1
    if restriction == FaceRestriction.ALL:
        return _SupportSource(math.comb(N, size), lambda i: unrank_combination(N, size, i))

    if restriction == FaceRestriction.BLOCK:
        if clusters is None or not 1 <= clusters <= size:
            raise DomainError(f"block restriction needs 1 <= C <= k+1, got C={clusters}")
        total = block_subspace_count(N, size, clusters)
        if total.overflow:
            raise SizeError(f"block support count exp({total.log_value:.1f}) is too large to census")
        return _SupportSource(total.value, lambda i: unrank_block_support(N, size, clusters, i).support)

    # tree node i sits at signal index i+1; keep supports that fit inside length N
    depth = max(1, (N - 1).bit_length())
    if size > 2 ** depth - 1:
        return _SupportSource(0, lambda i: ())
    supports = [
        tree.signal_indices()
        for tree in enumerate_tree_supports(depth, size)
        if tree.nodes[-1] + 1 < N
    ]
    return _SupportSource(len(supports), supports.__getitem__)


def _face_at(source: _SupportSource, width: int, index: int) -> Face:
    support_index, bits = divmod(index, 2 ** width)
    return Face(source.support_at(support_index), sign_pattern(bits, width))


def _sample_indices(rng: np.random.Generator, total: int, cap: int) -> List[int]:
    chosen = set()
    while len(chosen) < cap:
        if total < 2 ** 62:
            chosen.add(int(rng.integers(total)))
        else:
            chosen.add(int.from_bytes(rng.bytes((total.bit_length() + 7) // 8 + 8), "little") % total)
    return sorted(chosen)


def face_total(N: int, k: int, restriction: FaceRestriction, clusters: Optional[int] = None) -> int:
    """Number of signed k-faces admitted by the restriction."""
    return _support_source(N, k, restriction, clusters).count * 2 ** (k + 1)


def enumerate_faces(
    N: int,
    k: int,
    restriction: FaceRestriction = FaceRestriction.ALL,
    clusters: Optional[int] = None,
    cap: Optional[int] = None,
    seed: int = 0,
) -> Iterator[Face]:
    """
    Stream the signed k-faces admitted by a restriction.

    Faces are ordered by support (lexicographic, block pattern rank or
    subtree rank) and then by sign bits. Beyond Config.FACE_ENUM_BUDGET faces
    a cap is required; `cap` faces are then drawn without replacement,
    seeded by `seed`.

    Raises:
        SizeError: the face count exceeds the budget and no cap was given.
    """
    if not 0 <= k < N:
        raise DomainError(f"need 0 <= k < N, got k={k}, N={N}")
    source = _support_source(N, k, restriction, clusters)
    width = k + 1
    total = source.count * 2 ** width
    if total <= Config.FACE_ENUM_BUDGET or (cap is not None and cap >= total):
        for support_index in range(source.count):
            support = source.support_at(support_index)
            for bits in range(2 ** width):
                yield Face(support, sign_pattern(bits, width))
        return
    if cap is None:
        raise SizeError(f"{total} faces exceed the enumeration budget {Config.FACE_ENUM_BUDGET}; pass a cap")
    for index in _sample_indices(make_rng(seed), total, cap):
        yield _face_at(source, width, index)


def _census_instance(task: Tuple[CensusSpec, int]) -> InstanceTally:
    spec, index = task
    instance_seed = derive_seed(spec.seed, index)
    size = ProblemSize(spec.N, spec.n, min(spec.k, spec.n))
    instance = gaussian_instance(size, instance_seed)
    source = _support_source(spec.N, spec.k, spec.restriction, spec.clusters)
    width = spec.k + 1
    total = source.count * 2 ** width
    flip = 2 ** width - 1

    examined = survived = errors = 0
    if total <= Config.FACE_ENUM_BUDGET or (spec.cap is not None and spec.cap >= total):
        # (S, s) and (S, -s) survive together: test even bit patterns, count twice
        for support_index in range(source.count):
            support = source.support_at(support_index)
            for bits in range(0, 2 ** width, 2):
                try:
                    verdict = face_survives(instance, Face(support, sign_pattern(bits, width)))
                except NonConvergenceError as e:
                    logger.warning("Face %s skipped on instance %d: %s", support, index, e.message)
                    errors += 2
                    continue
                examined += 2
                survived += 2 if verdict.survives else 0
        return InstanceTally(index, instance_seed, examined, survived, errors)

    verdicts = {}
    rng = make_rng(derive_seed(spec.seed, index, 1))
    for face_index in _sample_indices(rng, total, spec.cap):
        support_index, bits = divmod(face_index, 2 ** width)
        key = (support_index, bits ^ flip if bits & 1 else bits)
        if key not in verdicts:
            try:
                face = Face(source.support_at(support_index), sign_pattern(key[1], width))
                verdicts[key] = face_survives(instance, face).survives
            except NonConvergenceError as e:
                logger.warning("Face %d skipped on instance %d: %s", face_index, index, e.message)
                verdicts[key] = None
        if verdicts[key] is None:
            errors += 1
            continue
        examined += 1
        survived += 1 if verdicts[key] else 0
    return InstanceTally(index, instance_seed, examined, survived, errors)


def _loss_stderr(tallies: List[InstanceTally], loss: float, examined: int) -> float:
    fractions = [t.loss_fraction for t in tallies if t.examined]
    if len(fractions) >= 2:
        return float(np.std(fractions, ddof=1) / math.sqrt(len(fractions)))
    return math.sqrt(max(loss * (1.0 - loss), 0.0) / examined)


def run_census(spec: CensusSpec, n_jobs: Optional[int] = None) -> CensusResult:
    """
    Census of surviving faces over `spec.instances` Gaussian matrices.

    Instance i uses the matrix seeded by derive_seed(spec.seed, i), so two
    censuses with the same seed and dimensions share their matrices. Faces
    whose certificate LP fails are excluded and logged.

    Args:
        spec: dimensions, restriction, instance count and seed
        n_jobs: worker count (None: Config.PTLAB_JOBS)

    Returns:
        CensusResult with the pooled loss fraction and its standard error
        (spread across instances, binomial for a single instance).

    Raises:
        SizeError: the face count exceeds the budget and spec.cap is unset.
        DomainError: the restriction admits no faces.
    """
    total = face_total(spec.N, spec.k, spec.restriction, spec.clusters)
    if total == 0:
        raise DomainError(f"restriction {spec.label} admits no {spec.k}-faces in dimension {spec.N}")
    exact = total <= Config.FACE_ENUM_BUDGET or (spec.cap is not None and spec.cap >= total)
    if not exact and spec.cap is None:
        raise SizeError(f"{total} faces exceed the enumeration budget {Config.FACE_ENUM_BUDGET}; set a subsample cap")

    logger.info(
        "Census N=%d n=%d k=%d %s: %d faces x %d instances%s",
        spec.N, spec.n, spec.k, spec.label, total, spec.instances,
        "" if exact else f" (subsampled to {spec.cap})",
    )
    tallies = run_parallel(_census_instance, [(spec, i) for i in range(spec.instances)], n_jobs)

    examined = sum(t.examined for t in tallies)
    survived = sum(t.survived for t in tallies)
    errors = sum(t.errors for t in tallies)
    if errors:
        logger.warning("Census %s: %d faces excluded after solver errors", spec.label, errors)
    if examined == 0:
        raise NonConvergenceError("every face test failed", {"errors": errors})
    loss = 1.0 - survived / examined
    return CensusResult(
        spec=spec,
        examined=examined,
        survived=survived,
        loss_fraction=loss,
        stderr=_loss_stderr(tallies, loss, examined),
        exact=exact,
        per_instance=list(tallies),
    )


def compare_loss_fractions(
    N: int,
    n: int,
    k: int,
    C: int,
    instances: int,
    seed: int,
    cap: Optional[int] = None,
    sigma: float = Config.CENSUS_SIGMA,
    n_jobs: Optional[int] = None,
) -> LossComparison:
    """
    Compare the loss fraction over all k-faces with the loss fraction over
    faces with C-run block supports, on the same matrices.

    The test is paired: per-instance differences give the z-statistic, and
    the comparison passes when |z| <= sigma. Identical per-instance
    fractions give z = 0.
    """
    all_faces = run_census(CensusSpec(N, n, k, FaceRestriction.ALL, None, instances, seed, cap), n_jobs)
    block_faces = run_census(CensusSpec(N, n, k, FaceRestriction.BLOCK, C, instances, seed, cap), n_jobs)

    diffs = np.array([
        a.loss_fraction - b.loss_fraction
        for a, b in zip(all_faces.per_instance, block_faces.per_instance)
        if a.examined and b.examined
    ])
    difference = float(diffs.mean()) if diffs.size else 0.0
    if diffs.size >= 2:
        spread = float(np.std(diffs, ddof=1)) / math.sqrt(diffs.size)
    else:
        spread = math.hypot(all_faces.stderr, block_faces.stderr)

    if spread > 0.0:
        z = difference / spread
    else:
        z = 0.0 if difference == 0.0 else math.copysign(math.inf, difference)
    passed = abs(z) <= sigma
    logger.info(
        "Loss fractions all=%.6g block(C=%d)=%.6g diff=%.3g z=%.3g -> %s",
        all_faces.loss_fraction, C, block_faces.loss_fraction, difference, z, "pass" if passed else "fail",
    )
    return LossComparison(all_faces, block_faces, difference, z, passed, sigma)
