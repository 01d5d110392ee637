from collections import Counter

import numpy as np
import pytest
from scipy.stats import chisquare

from class_defs.problem_def import BlockPattern, ProblemSize, SparsityModel
from class_defs.sensing_def import Face, SensingInstance
from config import Config
from infrastructure.errors import DomainError
from infrastructure.seeds import derive_seed, make_rng
from services.l1_service import (
    basis_pursuit,
    face_indicator,
    face_survives,
    gaussian_instance,
    recovery_error,
    sample_block_signal,
    sample_sparse_signal,
    sample_tree_signal,
)
from services.phasegrid_service import run_cell
from services.subspace_service import block_subspace_count, count_tree_supports


def test_gaussian_instance_is_reproducible_and_scaled():
    size = ProblemSize(400, 50, 5)
    first = gaussian_instance(size, 11)
    second = gaussian_instance(size, 11)
    other = gaussian_instance(size, 12)
    assert first.matrix.shape == (50, 400)
    assert np.array_equal(first.matrix, second.matrix)
    assert not np.array_equal(first.matrix, other.matrix)
    assert np.var(first.matrix) == pytest.approx(1.0 / 50, rel=0.05)
    with pytest.raises(ValueError):
        first.matrix[0, 0] = 1.0


def test_block_signal_has_c_runs():
    for seed in range(20):
        signal = sample_block_signal(32, 6, 3, seed)
        assert signal.sparsity == 6
        assert BlockPattern.from_support(signal.support, 32).clusters == 3
        assert np.count_nonzero(signal.coefficients) == 6


def test_block_signal_support_is_uniform():
    N, k, C = 8, 3, 2
    total = block_subspace_count(N, k, C).value
    draws = Counter(sample_block_signal(N, k, C, derive_seed(5, i)).support for i in range(3000))
    assert len(draws) == total
    _, p_value = chisquare(list(draws.values()))
    assert p_value > 1e-3


def test_zero_sparsity_gives_zero_signal():
    assert not sample_block_signal(10, 0, 0, 3).coefficients.any()
    assert not sample_tree_signal(3, 0, 3).coefficients.any()
    assert not sample_sparse_signal(10, 0, 3).coefficients.any()


def test_tree_signal_layout():
    for seed in range(20):
        signal = sample_tree_signal(5, 7, seed)
        assert signal.length == 32
        assert signal.coefficients[0] == 0.0
        nodes = {j - 1 for j in signal.support}
        assert 0 in nodes
        assert all((i - 1) // 2 in nodes for i in nodes if i > 0)
        assert signal.uniform_support


def test_tree_signal_support_is_uniform():
    depth, k = 3, 3
    draws = Counter(sample_tree_signal(depth, k, derive_seed(9, i)).support for i in range(1000))
    assert len(draws) == count_tree_supports(depth, k)
    _, p_value = chisquare(list(draws.values()))
    assert p_value > 1e-3


def test_tree_signal_rejects_oversized_support():
    with pytest.raises(DomainError):
        sample_tree_signal(2, 4, 0)


def test_basis_pursuit_recovers_sparse_signal():
    signal = sample_sparse_signal(64, 4, 21)
    instance = gaussian_instance(ProblemSize(64, 32, 4), 22)
    x_hat = basis_pursuit(instance, signal.measure(instance))
    assert recovery_error(signal.coefficients, x_hat) <= 1e-4


def test_basis_pursuit_is_scale_equivariant():
    signal = sample_block_signal(40, 5, 2, 4)
    instance = gaussian_instance(ProblemSize(40, 20, 5), 5)
    y = signal.measure(instance)
    base = basis_pursuit(instance, y)
    scaled = basis_pursuit(instance, 1e3 * y)
    assert np.allclose(scaled, 1e3 * base, rtol=1e-6, atol=1e-6)


def test_basis_pursuit_edge_cases():
    instance = gaussian_instance(ProblemSize(12, 12, 3), 2)
    assert not basis_pursuit(instance, np.zeros(12)).any()

    x = np.zeros(12)
    x[[1, 4, 9]] = [1.0, -2.0, 0.5]
    assert recovery_error(x, basis_pursuit(instance, instance.measure(x))) <= 1e-8

    with pytest.raises(DomainError):
        basis_pursuit(instance, np.zeros(5))


def test_basis_pursuit_inverts_ill_conditioned_square_system():
    rng = make_rng(41)
    left, _ = np.linalg.qr(rng.standard_normal((48, 48)))
    right, _ = np.linalg.qr(rng.standard_normal((48, 48)))
    matrix = left @ np.diag(np.geomspace(1.0, 1e-5, 48)) @ right.T
    instance = SensingInstance(ProblemSize(48, 48, 12), matrix)
    signal = sample_sparse_signal(48, 12, 42)
    x_hat = basis_pursuit(instance, signal.measure(instance))
    assert recovery_error(signal.coefficients, x_hat) <= 1e-6


def test_basis_pursuit_returns_certified_refit_at_iteration_cap():
    signal = sample_sparse_signal(64, 4, 31)
    instance = gaussian_instance(ProblemSize(64, 32, 4), 32)
    x_hat = basis_pursuit(instance, signal.measure(instance), tol=1e-13, max_iter=3000, check_every=10 ** 6)
    assert recovery_error(signal.coefficients, x_hat) <= 1e-8


def test_recovery_error_is_absolute_for_zero_signal():
    assert recovery_error(np.zeros(3), np.array([0.0, 3.0, 4.0])) == pytest.approx(5.0)


def test_face_survives_trivial_cases():
    square = gaussian_instance(ProblemSize(8, 8, 2), 1)
    assert face_survives(square, Face((0, 3), (1, -1)))

    wide = gaussian_instance(ProblemSize(9, 3, 3), 1)
    verdict = face_survives(wide, Face((0, 1, 2, 3), (1, 1, 1, 1)))
    assert not verdict
    assert verdict.rank_deficient


def test_face_verdict_is_sign_symmetric():
    instance = gaussian_instance(ProblemSize(9, 5, 2), 17)
    rng = make_rng(3)
    for _ in range(20):
        support = tuple(sorted(int(j) for j in rng.choice(9, size=3, replace=False)))
        signs = tuple(int(s) for s in rng.choice([-1, 1], size=3))
        face = Face(support, signs)
        assert face_survives(instance, face).survives == face_survives(instance, face.flipped()).survives


def test_face_indicator():
    x = face_indicator(Face((1, 4), (1, -1)), 6)
    assert x.tolist() == [0.0, 1.0, 0.0, 0.0, -1.0, 0.0]
    with pytest.raises(DomainError):
        face_indicator(Face((1, 7), (1, -1)), 6)


def _oracle_disagreements(pairs: int, seed: int) -> int:
    N, n = 9, 6
    rng = make_rng(seed)
    disagreements = 0
    for trial in range(pairs):
        instance = gaussian_instance(ProblemSize(N, n, 0), derive_seed(seed, trial))
        dim = int(rng.integers(0, 4))
        support = tuple(sorted(int(j) for j in rng.choice(N, size=dim + 1, replace=False)))
        signs = tuple(int(s) for s in rng.choice([-1, 1], size=dim + 1))
        face = Face(support, signs)
        verdict = face_survives(instance, face)
        if abs(verdict.dual_norm - 1.0) < Config.SURVIVAL_MARGIN:
            continue
        x = face_indicator(face, N)
        recovered = recovery_error(x, basis_pursuit(instance, instance.measure(x))) <= 1e-4
        disagreements += int(recovered != verdict.survives)
    return disagreements


def test_certificate_agrees_with_basis_pursuit():
    assert _oracle_disagreements(60, 101) == 0


@pytest.mark.slow
def test_certificate_agrees_with_basis_pursuit_full():
    assert _oracle_disagreements(500, 2024) == 0


@pytest.mark.slow
def test_block_recovery_rate_at_desk_scale():
    cell = run_cell(64, 0.5, 0.125, SparsityModel.block(clusters=2), 200, 7)
    assert cell.n == 32 and cell.k == 4
    assert cell.successes >= 190
