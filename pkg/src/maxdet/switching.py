"""Switching: quadruple location, column typing, and neighbor generation.

A switchable quadruple is four rows whose elementwise product is the all-ones
vector or its negation.  Relative to such a quadruple, columns fall into at
most four types (a column and its negation count as one type); negating all
columns of one type preserves |det| and usually changes the equivalence
class.  Column quadruples are handled by transposing and reusing the row
machinery.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .core import SignMatrix
from .errors import PreconditionError

__all__ = [
    "SwitchQuadruple",
    "ColumnTypePartition",
    "find_quadruples",
    "column_types",
    "apply_switch",
    "switch_neighbors",
]


@dataclass(frozen=True)
class SwitchQuadruple:
    """Four row indices whose elementwise product is sign * (all-ones)."""

    rows: tuple[int, int, int, int]
    sign: int


@dataclass(frozen=True)
class ColumnTypePartition:
    """Columns grouped by their +-pattern on a quadruple, up to negation.

    Types are ordered by smallest member column index; patterns hold one
    representative sign vector (the pattern of the smallest member).
    """

    types: tuple[tuple[int, ...], ...]
    patterns: tuple[tuple[int, int, int, int], ...]


def _minus_masks(a: np.ndarray) -> list[int]:
    """Per-row bitmask with bit j set when entry (i, j) is -1."""
    bits = np.packbits(a == -1, axis=1, bitorder="little")
    return [int.from_bytes(row.tobytes(), "little") for row in bits]


def find_quadruples(m: SignMatrix, axis: str = "rows") -> list[SwitchQuadruple]:
    """All switchable quadruples on the chosen axis, sorted by index tuple.

    Complete over all C(n,4) index sets: a quadruple qualifies exactly when
    the XOR of its rows' minus-masks is zero (product = all ones, sign +1) or
    the full mask (product = negated all ones, sign -1).  Search is
    meet-in-the-middle over row pairs keyed by pairwise XOR.
    """
    if axis == "columns":
        return find_quadruples(m.transpose(), "rows")
    if axis != "rows":
        raise PreconditionError(f"axis must be 'rows' or 'columns', got {axis!r}")
    a = m.array
    n, w = a.shape
    if n < 4:
        return []
    masks = _minus_masks(a)
    full = (1 << w) - 1
    pairs: dict[int, list[tuple[int, int]]] = {}
    for i, j in combinations(range(n), 2):
        pairs.setdefault(masks[i] ^ masks[j], []).append((i, j))

    found: set[tuple[int, int, int, int]] = set()
    results: list[SwitchQuadruple] = []

    def collect(plist_a, plist_b, sign):
        for pa in plist_a:
            for pb in plist_b:
                quad = (*pa, *pb)
                if len(set(quad)) == 4:
                    key = tuple(sorted(quad))
                    if key not in found:
                        found.add(key)
                        results.append(SwitchQuadruple(key, sign))

    for x, plist in pairs.items():
        collect(plist, plist, +1)
        y = x ^ full
        if x < y and y in pairs:
            collect(plist, pairs[y], -1)
        elif x == y:
            collect(plist, plist, -1)

    results.sort(key=lambda q: q.rows)
    return results


def _check_quadruple(m: SignMatrix, quad: SwitchQuadruple) -> None:
    rows = quad.rows
    if len(set(rows)) != 4 or not all(0 <= r < m.n_rows for r in rows):
        raise PreconditionError(f"invalid quadruple rows {rows}")
    prod = m.array[list(rows), :].prod(axis=0)
    if not np.all(prod == quad.sign):
        raise PreconditionError(f"rows {rows} do not multiply to {quad.sign} * all-ones")


def column_types(m: SignMatrix, quad: SwitchQuadruple) -> ColumnTypePartition:
    """Partition all columns into at most 4 nonempty types for the quadruple."""
    _check_quadruple(m, quad)
    sub = m.array[list(quad.rows), :]
    groups: dict[tuple, list[int]] = {}
    reps: dict[tuple, tuple] = {}
    for j in range(m.n_cols):
        pat = tuple(int(x) for x in sub[:, j])
        canon = pat if pat[0] == 1 else tuple(-x for x in pat)
        if canon not in groups:
            groups[canon] = []
            reps[canon] = pat
        groups[canon].append(j)
    order = sorted(groups, key=lambda c: groups[c][0])
    return ColumnTypePartition(
        types=tuple(tuple(groups[c]) for c in order),
        patterns=tuple(reps[c] for c in order),
    )


def apply_switch(m: SignMatrix, quad: SwitchQuadruple, type_index: int) -> SignMatrix:
    """Negate all columns of one type; |det| is preserved."""
    partition = column_types(m, quad)
    if not 0 <= type_index < len(partition.types):
        raise PreconditionError(
            f"type_index {type_index} out of range ({len(partition.types)} types)"
        )
    a = m.array.copy()
    cols = list(partition.types[type_index])
    a[:, cols] = -a[:, cols]
    return SignMatrix(a)


def switch_neighbors(m: SignMatrix) -> list[SignMatrix]:
    """One switched matrix per row quadruple and per column quadruple.

    A single type per quadruple suffices (the four type-switches are pairwise
    equivalent), cutting canonicalization work fourfold.  Duplicates are not
    removed here.
    """
    out = [apply_switch(m, q, 0) for q in find_quadruples(m, "rows")]
    mt = m.transpose()
    out.extend(
        apply_switch(mt, q, 0).transpose() for q in find_quadruples(mt, "rows")
    )
    return out
