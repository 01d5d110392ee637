"""
Ranking helpers over combinations, used for count-indexed unranking of supports and faces.
"""

from math import comb
from typing import Tuple


def unrank_combination(n: int, r: int, index: int) -> Tuple[int, ...]:
    """
    The index-th r-subset of range(n) in lexicographic order, i.e. the same
    order itertools.combinations(range(n), r) produces.

    Args:
        n: ground set size
        r: subset size
        index: 0 <= index < comb(n, r)

    Returns:
        Sorted tuple of r distinct integers.
    """
    total = comb(n, r)
    if not 0 <= index < total:
        raise IndexError(f"index {index} out of range for C({n},{r})={total}")
    chosen = []
    start = 0
    for slots_left in range(r, 0, -1):
        element = start
        while True:
            block = comb(n - element - 1, slots_left - 1)
            if index < block:
                break
            index -= block
            element += 1
        chosen.append(element)
        start = element + 1
    return tuple(chosen)


def catalan(k: int) -> int:
    return comb(2 * k, k) // (k + 1)


def sign_pattern(bits: int, width: int) -> Tuple[int, ...]:
    """Bit b set means a negative sign at position b; bits=0 is all positive."""
    return tuple(-1 if (bits >> position) & 1 else 1 for position in range(width))
