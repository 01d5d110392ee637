import math

import pytest

from class_defs.problem_def import BlockPattern, SparsityModel, TreeRegime, TreeSupport
from infrastructure.errors import DomainError, SizeError
from services.subspace_service import (
    block_subspace_count,
    combinatorial_prefactor,
    count_tree_supports,
    delta_diff,
    enumerate_block_supports,
    enumerate_tree_supports,
    log_binomial,
    simple_face_count,
    subspace_log_count,
    tree_subspace_bound,
    unrank_block_support,
    unrank_tree_support,
)
from utils.combinatorics import catalan, unrank_combination


def test_block_count_example():
    count = block_subspace_count(10, 4, 2)
    assert count.value == 63
    assert not count.overflow


def test_block_count_single_cluster_is_n_minus_k_plus_one():
    for N in range(1, 15):
        for k in range(1, N + 1):
            assert block_subspace_count(N, k, 1).value == N - k + 1


def test_block_count_matches_enumeration():
    for N in range(1, 15):
        for k in range(1, N + 1):
            for C in range(1, k + 1):
                enumerated = enumerate_block_supports(N, k, C)
                assert len(enumerated) == block_subspace_count(N, k, C).value, (N, k, C)


def test_block_count_is_zero_when_runs_do_not_fit():
    # 3 runs need at least 2 separating zeros
    assert block_subspace_count(4, 3, 3).value == 0
    assert enumerate_block_supports(4, 3, 3) == []


def test_block_count_rejects_bad_dimensions():
    with pytest.raises(DomainError):
        block_subspace_count(10, 3, 4)
    with pytest.raises(DomainError):
        block_subspace_count(10, 0, 1)


def test_block_enumeration_guard():
    with pytest.raises(SizeError):
        enumerate_block_supports(40, 3, 2)


def test_block_count_overflows_to_log_scale():
    count = block_subspace_count(100_000, 50_000, 20_000)
    assert count.overflow
    assert count.value is None
    assert count.log_value > 1000.0


def test_unrank_block_support_covers_every_pattern_once():
    N, k, C = 9, 4, 2
    total = block_subspace_count(N, k, C).value
    unranked = [unrank_block_support(N, k, C, i).support for i in range(total)]
    assert len(set(unranked)) == total
    assert set(unranked) == {p.support for p in enumerate_block_supports(N, k, C)}


def test_block_pattern_round_trip_and_runs():
    pattern = BlockPattern.from_support((1, 2, 5, 6, 7), 10)
    assert pattern.clusters == 2
    assert pattern.sparsity == 5
    assert pattern.length == 10
    assert pattern.support == (1, 2, 5, 6, 7)


def test_tree_count_is_catalan_once_depth_reaches_k():
    for k in range(1, 11):
        assert count_tree_supports(10, k) == catalan(k)
        assert count_tree_supports(k, k) == catalan(k)


def test_tree_count_is_truncated_by_depth():
    # depth 2 has 3 nodes: only the full tree has 3 nodes
    assert count_tree_supports(2, 3) == 1
    assert count_tree_supports(2, 2) == 2


def test_tree_enumeration_matches_count_and_is_connected():
    for depth in range(1, 6):
        for k in range(1, min(2 ** depth - 1, 7) + 1):
            supports = enumerate_tree_supports(depth, k)
            assert len(supports) == count_tree_supports(depth, k)
            assert len({s.nodes for s in supports}) == len(supports)
            for support in supports:
                nodes = set(support.nodes)
                assert 0 in nodes
                assert all((i - 1) // 2 in nodes for i in nodes if i > 0)


def test_unrank_tree_support_follows_enumeration_order():
    depth, k = 5, 5
    supports = enumerate_tree_supports(depth, k)
    assert [unrank_tree_support(depth, k, i) for i in range(len(supports))] == supports


def test_tree_support_rejects_disconnected_nodes():
    with pytest.raises(DomainError):
        TreeSupport(3, (0, 3))
    with pytest.raises(DomainError):
        TreeSupport(3, (1, 3))


def test_tree_bound_example():
    log_bound, regime = tree_subspace_bound(16, 3)
    assert regime == TreeRegime.SMALL_K
    assert math.exp(log_bound) == pytest.approx(40.17, abs=0.01)
    assert len(enumerate_tree_supports(4, 3)) == 5


def test_tree_bound_respects_exact_counts():
    for depth in range(2, 9):
        for k in range(1, 11):
            if k > 2 ** depth - 1:
                continue
            log_bound, regime = tree_subspace_bound(2 ** depth, k)
            assert regime == (TreeRegime.SMALL_K if k < depth else TreeRegime.LARGE_K)
            assert count_tree_supports(depth, k) <= math.exp(log_bound)


def test_tree_bound_needs_power_of_two():
    with pytest.raises(DomainError):
        tree_subspace_bound(12, 3)


def test_log_binomial_exact_and_asymptotic_agree():
    assert log_binomial(10, 3) == pytest.approx(math.log(120))
    assert log_binomial(7, 0) == 0.0
    n, k = 5000, 2500
    reference = math.lgamma(n + 1) - math.lgamma(k + 1) - math.lgamma(n - k + 1)
    assert log_binomial(n, k) == pytest.approx(reference, rel=1e-10)


def test_simple_face_count():
    assert simple_face_count(5, 1).value == 40
    assert simple_face_count(10, 3).value == 16 * math.comb(10, 4)


def test_subspace_log_count_by_model():
    assert subspace_log_count(SparsityModel.simple(), 10, 3) == pytest.approx(math.log(120))
    assert subspace_log_count(SparsityModel.block(clusters=2), 10, 4) == pytest.approx(math.log(63))
    small = subspace_log_count(SparsityModel.tree(), 16, 3)
    assert small == pytest.approx(tree_subspace_bound(16, 3)[0])


def test_delta_diff_gap_shrinks_with_n():
    gaps = []
    for N in (1_000, 10_000, 100_000):
        k, C = N // 10, N // 100
        gaps.append(abs(delta_diff(N, k, C) - delta_diff(N, k, C, mode="asymptotic")))
    assert gaps[0] > gaps[1] > gaps[2]


def test_delta_diff_asymptotic_form():
    assert delta_diff(100, 10, 4, mode="asymptotic") == pytest.approx(-0.06)
    with pytest.raises(DomainError):
        delta_diff(100, 10, 4, mode="other")


def test_unrank_combination_matches_itertools_order():
    from itertools import combinations

    expected = list(combinations(range(7), 3))
    assert [unrank_combination(7, 3, i) for i in range(len(expected))] == expected


def test_combinatorial_prefactor():
    simple = SparsityModel.simple()
    assert combinatorial_prefactor(simple, 6, 1, 2) == pytest.approx(math.log(480))
    assert combinatorial_prefactor(simple, 6, 1, 1) == pytest.approx(math.log(2 ** 2 * math.comb(6, 2)))
    assert combinatorial_prefactor(SparsityModel.block(clusters=1), 6, 1, 2) <= combinatorial_prefactor(simple, 6, 1, 2)
    with pytest.raises(DomainError):
        combinatorial_prefactor(simple, 6, 2, 1)
