"""Relation sets as integer bitmasks.

A relation set is a plain Python ``int`` whose bit ``i`` is set when relation
``i`` is a member.  Python integers are arbitrary precision, so the same
representation serves the exact optimizers (which cap the query at
:data:`EXACT_CAPACITY` relations) and the heuristics (thousands of relations).
The numeric order of the integers is the total order used for tie-breaking;
it coincides with lexicographic order on the bit words, most significant word
first.

k-subsets are ranked in colexicographic order (the combinadic number system):
the subset ``{c_1 < c_2 < ... < c_k}`` has rank ``sum(C(c_j, j))``.  In colex
order the bitmasks of a fixed popcount appear in increasing numeric order, so
the successor of a set is the next larger integer with the same popcount.
"""

from __future__ import annotations

from collections.abc import Iterable, Iterator
from math import comb

import numpy as np

from .errors import ContractViolation

RelSet = int

#: Largest query the exact dynamic programs accept (one machine word).
EXACT_CAPACITY = 64


def popcount(s: RelSet) -> int:
    return s.bit_count()


def members(s: RelSet) -> list[int]:
    """Indices of the set bits of ``s`` in increasing order."""
    out = []
    while s:
        low = s & -s
        out.append(low.bit_length() - 1)
        s ^= low
    return out


def from_members(indices: Iterable[int]) -> RelSet:
    s = 0
    for i in indices:
        s |= 1 << i
    return s


def lowest(s: RelSet) -> int:
    """Index of the lowest member; ``s`` must be nonempty."""
    return (s & -s).bit_length() - 1


def full_set(n: int) -> RelSet:
    return (1 << n) - 1


def format_relset(s: RelSet) -> str:
    return "{" + ",".join(str(i) for i in members(s)) + "}"


def unrank_combination(rank: int, k: int, n: int) -> RelSet:
    """Return the ``rank``-th ``k``-subset of ``{0..n-1}`` in colex order."""
    if not 0 <= k <= n:
        raise ContractViolation(f"subset size k={k} outside [0, n={n}]")
    total = comb(n, k)
    if not 0 <= rank < total:
        raise ContractViolation(f"rank {rank} outside [0, C({n},{k})={total})")
    s = 0
    c = n
    for j in range(k, 0, -1):
        # largest c with C(c, j) <= rank, strictly below the previous choice
        c -= 1
        while comb(c, j) > rank:
            c -= 1
        s |= 1 << c
        rank -= comb(c, j)
    return s


def rank_combination(s: RelSet) -> int:
    """Inverse of :func:`unrank_combination` (the size is implied by ``s``)."""
    return sum(comb(c, j) for j, c in enumerate(members(s), start=1))


def next_combination(s: RelSet) -> RelSet:
    """Next larger integer with the same popcount (the colex successor)."""
    low = s & -s
    ripple = s + low
    return ripple | (((s ^ ripple) >> 2) // low)


def deposit_subset(mask: int, superset: RelSet) -> RelSet:
    """Scatter the low bits of ``mask`` onto the set bits of ``superset``.

    Bit ``j`` of ``mask`` selects the ``j``-th lowest member of ``superset``
    (the software equivalent of the PDEP instruction).
    """
    m = superset.bit_count()
    if m == 0:
        raise ContractViolation("deposit into an empty superset")
    if not 0 < mask < (1 << m):
        raise ContractViolation(f"mask {mask} outside [1, 2^{m} - 1]")
    out = 0
    rest = superset
    while mask:
        low = rest & -rest
        if mask & 1:
            out |= low
        rest ^= low
        mask >>= 1
    return out


def iter_subsets(superset: RelSet) -> Iterator[RelSet]:
    """Yield ``deposit_subset(mask, superset)`` for masks ``1 .. 2^m - 1``.

    Deposit is monotone in the mask, so the masks' images are exactly the
    nonempty subsets in increasing numeric order; ``(sub - superset) & superset``
    steps from one to the next without re-depositing.
    """
    sub = superset & -superset
    while sub:
        yield sub
        sub = (sub - superset) & superset


def iter_proper_subsets(superset: RelSet) -> Iterator[RelSet]:
    """Like :func:`iter_subsets` but stops before the full set (mask ``2^m - 1``)."""
    sub = superset & -superset
    while sub != superset:
        yield sub
        sub = (sub - superset) & superset


_BINOM_CACHE: dict[int, np.ndarray] = {}


def _binomial_table(n: int) -> np.ndarray:
    table = _BINOM_CACHE.get(n)
    if table is None:
        table = np.array(
            [[comb(c, j) for c in range(n + 1)] for j in range(n + 1)], dtype=np.int64
        )
        _BINOM_CACHE[n] = table
    return table


def unrank_combinations(ranks: np.ndarray, k: int, n: int) -> np.ndarray:
    """Vectorised :func:`unrank_combination` for ``n <= 64``; returns uint64 masks."""
    if n > EXACT_CAPACITY:
        raise ContractViolation(f"vectorised unranking supports n <= {EXACT_CAPACITY}")
    table = _binomial_table(n)
    rank = np.asarray(ranks, dtype=np.int64).copy()
    if rank.size and (rank.min() < 0 or rank.max() >= table[k, n]):
        raise ContractViolation(f"rank outside [0, C({n},{k}))")
    out = np.zeros(rank.shape, dtype=np.uint64)
    for j in range(k, 0, -1):
        # column j is nondecreasing in c; pick the last c with C(c, j) <= rank
        c = np.searchsorted(table[j], rank, side="right") - 1
        out |= np.left_shift(np.uint64(1), c.astype(np.uint64))
        rank -= table[j][c]
    return out
