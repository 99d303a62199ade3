"""Generative constructions for maximal-determinant designs.

Covers Paley/Kronecker Hadamard seeds, the two-circulant search for orders
n = 2 mod 4, doubling of the order-13 design to order 26, the all-ones
bordering of a regular order-16 core to order 17, and the three-row
normalization route from order-20 Hadamard matrices to order-21 designs.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations, permutations

import numpy as np

from .canon import canonical_key
from .core import SignMatrix, determinant, gram
from .errors import PreconditionError, StructureError
from .gramforms import (
    BORDERED_FIVES,
    BORDERED_MINUS3,
    EHLICH_EVEN,
    classify_gram,
    is_hadamard,
    is_regular_hadamard,
)

__all__ = [
    "CirculantSpec",
    "DoublingSpec",
    "NormalizationTriple",
    "paley_hadamard",
    "kronecker",
    "regular_hadamard_16",
    "border_regular_16",
    "circulant_search",
    "assemble_circulant",
    "double",
    "double_saturate",
    "standard_three_rows",
    "three_normalizations",
    "maximal_excess_21",
    "enumerate_order21",
]


# ---------------------------------------------------------------------------
# Hadamard seeds


def _is_prime(q: int) -> bool:
    if q < 2:
        return False
    d = 2
    while d * d <= q:
        if q % d == 0:
            return False
        d += 1
    return True


def paley_hadamard(q: int) -> SignMatrix:
    """Hadamard matrix of order q+1 from quadratic residues, q prime = 3 mod 4."""
    if not _is_prime(q) or q % 4 != 3:
        raise PreconditionError(f"q must be a prime congruent to 3 mod 4, got {q}")
    residues = {(k * k) % q for k in range(1, q)}
    chi = [0] + [1 if x in residues else -1 for x in range(1, q)]
    n = q + 1
    h = np.ones((n, n), dtype=np.int8)
    for i in range(1, n):
        h[i, 0] = -1
        for j in range(1, n):
            h[i, j] = 1 if i == j else chi[(j - i) % q]
    m = SignMatrix(h)
    if not is_hadamard(m):
        raise StructureError(f"Paley construction failed for q={q}")
    return m


def kronecker(h1: SignMatrix, h2: SignMatrix) -> SignMatrix:
    """Kronecker product of two Hadamard matrices (row sums multiply)."""
    for h in (h1, h2):
        if not is_hadamard(h):
            raise PreconditionError("kronecker needs Hadamard inputs")
    return SignMatrix(np.kron(h1.array, h2.array))


def regular_hadamard_16() -> SignMatrix:
    """Regular order-16 Hadamard core with all row and column sums 4."""
    k = np.ones((4, 4), dtype=np.int8) - 2 * np.eye(4, dtype=np.int8)
    return kronecker(SignMatrix(k), SignMatrix(k))


def border_regular_16(core: SignMatrix) -> SignMatrix:
    """All-ones border around a regular order-16 Hadamard core: an order-17 design.

    The core is negated if needed so that all its line sums are -4; the
    result's Gram matrices then both carry -3 in the border row and column.
    """
    if core.n_rows != 16 or core.n_cols != 16:
        raise PreconditionError("core must have order 16")
    if not is_regular_hadamard(core):
        raise PreconditionError("core must be a regular Hadamard matrix")
    a = core.array.astype(np.int8)
    if a.sum(axis=1)[0] == 4:
        a = -a
    out = np.ones((17, 17), dtype=np.int8)
    out[1:, 1:] = a
    m = SignMatrix(out)
    for side in ("left", "right"):
        if classify_gram(gram(m, side)).tag != BORDERED_MINUS3:
            raise StructureError("bordered design does not match the -3 form")
    return m


# ---------------------------------------------------------------------------
# two-circulant construction (Construction 1)


@dataclass(frozen=True)
class CirculantSpec:
    """First rows of the circulant half-order blocks A and B."""

    half_order: int
    first_row_a: tuple[int, ...]
    first_row_b: tuple[int, ...]

    def __post_init__(self):
        v = self.half_order
        if len(self.first_row_a) != v or len(self.first_row_b) != v:
            raise PreconditionError("first rows must have length half_order")
        n = 2 * v
        ra, rb = abs(sum(self.first_row_a)), abs(sum(self.first_row_b))
        big, small = max(ra, rb), min(ra, rb)
        if big * big + small * small != 2 * n - 2:
            raise PreconditionError(
                f"row sums ({ra},{rb}) do not satisfy a^2+b^2=2n-2 at n={n}"
            )


def _circulant(first_row: np.ndarray) -> np.ndarray:
    v = len(first_row)
    out = np.empty((v, v), dtype=np.int8)
    for i in range(v):
        out[i] = np.roll(first_row, i)
    return out


def assemble_circulant(spec: CirculantSpec) -> SignMatrix:
    """R = [A B; B^T -A^T] from the circulant first rows."""
    a = _circulant(np.asarray(spec.first_row_a, dtype=np.int8))
    b = _circulant(np.asarray(spec.first_row_b, dtype=np.int8))
    top = np.hstack([a, b])
    bottom = np.hstack([b.T, -a.T])
    return SignMatrix(np.vstack([top, bottom]))


def _paf(x: np.ndarray) -> tuple[int, ...]:
    """Periodic autocorrelation at shifts 1..v-1."""
    return tuple(int(x @ np.roll(x, s)) for s in range(1, len(x)))


def _necklace_rep(row: tuple[int, ...]) -> bool:
    return all(row <= row[s:] + row[:s] for s in range(1, len(row)))


def _rows_with_sum(v: int, total: int):
    """All +-1 rows of length v with the given sum (as tuples)."""
    if (v - total) % 2 != 0 or not -v <= total <= v:
        return
    k = (v - total) // 2
    for minus_at in combinations(range(v), k):
        row = [1] * v
        for p in minus_at:
            row[p] = -1
        yield tuple(row)


def two_square_targets(n: int) -> list[tuple[int, int]]:
    """Decompositions 2n-2 = a^2 + b^2 with a >= b >= 0."""
    need = 2 * n - 2
    out = []
    a = 0
    while a * a <= need:
        b2 = need - a * a
        b = int(round(b2**0.5))
        if b * b == b2 and a >= b:
            out.append((a, b))
        a += 1
    return out


def circulant_search(n: int) -> list[SignMatrix]:
    """Exhaustive two-circulant search at order n = 2 mod 4.

    Searches first rows of A and B pruned by row-sum targets and rotation
    (necklace representatives for A; simultaneous rotation is an
    equivalence), keeps assemblies whose Gram matrices both achieve the even
    optimal form, and returns one representative per canonical key, sorted
    by key.  Returns [] when 2n-2 is not a sum of two squares.
    """
    if n % 4 != 2:
        raise PreconditionError(f"two-circulant construction needs n = 2 mod 4, got {n}")
    targets = two_square_targets(n)
    if not targets:
        return []
    v = n // 2
    sum_pairs = set()
    for a, b in targets:
        sum_pairs.add((a, b))
        sum_pairs.add((b, a))

    found: dict[str, SignMatrix] = {}
    for ra, rb in sorted(sum_pairs):
        # group candidate B rows by their PAF vector for O(1) partner lookup
        by_paf: dict[tuple, list[tuple[int, ...]]] = {}
        for row in _rows_with_sum(v, rb):
            by_paf.setdefault(_paf(np.array(row, dtype=np.int64)), []).append(row)
        for alpha in _rows_with_sum(v, ra):
            if not _necklace_rep(alpha):
                continue
            want = tuple(2 - p for p in _paf(np.array(alpha, dtype=np.int64)))
            for beta in by_paf.get(want, ()):
                m = assemble_circulant(CirculantSpec(v, alpha, beta))
                if any(
                    classify_gram(gram(m, side)).tag != EHLICH_EVEN
                    for side in ("left", "right")
                ):
                    continue
                key = canonical_key(m)
                found.setdefault(key, m)
    return [found[k] for k in sorted(found)]


# ---------------------------------------------------------------------------
# doubling (Construction 2)


@dataclass(frozen=True)
class DoublingSpec:
    """Order-13 base design plus the row permutation applied to the copy B."""

    base: SignMatrix
    row_permutation: tuple[int, ...]

    def __post_init__(self):
        if sorted(self.row_permutation) != list(range(self.base.n_rows)):
            raise PreconditionError("row_permutation must be a bijection on the base rows")


def _check_double_base(base: SignMatrix) -> None:
    n = base.n_rows
    if not base.is_square or n != 13:
        raise PreconditionError("doubling base must have order 13")
    target = (n - 1) * np.eye(n, dtype=np.int64) + 1
    if not (
        np.array_equal(gram(base, "left"), target)
        and np.array_equal(gram(base, "right"), target)
    ):
        raise PreconditionError("doubling base must have both Gram matrices 12 I + J")


def double(spec: DoublingSpec, variant: str = "R") -> SignMatrix:
    """Order-26 design [A B; A -B] (variant R) or [A A; B -B] (variant R')."""
    _check_double_base(spec.base)
    m = _double_raw(spec.base.array, list(spec.row_permutation), variant)
    if classify_gram(gram(m, "left")).tag != EHLICH_EVEN:
        raise StructureError("doubled design does not achieve the even optimal form")
    return m


def _double_raw(a: np.ndarray, perm: list[int], variant: str) -> SignMatrix:
    b = a[perm, :]
    if variant == "R":
        stacked = np.vstack([np.hstack([a, b]), np.hstack([a, -b])])
    elif variant == "R'":
        stacked = np.vstack([np.hstack([a, a]), np.hstack([b, -b])])
    else:
        raise PreconditionError(f"variant must be \"R\" or \"R'\", got {variant!r}")
    return SignMatrix(stacked)


def double_saturate(
    base: SignMatrix,
    rng_seed: int = 0,
    stop_no_new: int = 10_000,
    max_samples: int | None = None,
) -> tuple[dict[str, SignMatrix], int]:
    """Sample doubling permutations (plus transposes) until keys saturate.

    Stops after stop_no_new consecutive samples add no new canonical key.
    Returns (key -> representative, number of samples drawn).
    """
    _check_double_base(base)
    rng = np.random.default_rng(rng_seed)
    a = base.array
    det_abs = abs(determinant(_double_raw(a, list(range(13)), "R")))
    seen: dict[str, SignMatrix] = {}
    samples = 0
    dry = 0
    while dry < stop_no_new and (max_samples is None or samples < max_samples):
        perm = list(rng.permutation(13))
        samples += 1
        fresh = False
        r = _double_raw(a, perm, "R")
        for candidate in (r, r.transpose()):
            key = canonical_key(candidate, det_abs=det_abs)
            if key not in seen:
                seen[key] = candidate
                fresh = True
        dry = 0 if fresh else dry + 1
    return seen, samples


# ---------------------------------------------------------------------------
# order 21 from order-20 Hadamard matrices

# column classes on a normalized row triple, in fixed order
_CLASS_PATTERNS = ((-1, -1, -1), (-1, 1, 1), (1, -1, 1), (1, 1, -1))


def standard_three_rows() -> np.ndarray:
    """The 3 x 20 standard row pattern: 4 leading columns then 4 blocks of 4."""
    rows = np.empty((3, 20), dtype=np.int8)
    for m, pat in enumerate(_CLASS_PATTERNS):
        for r in range(3):
            rows[r, m] = pat[r]
            rows[r, 4 + 4 * m : 8 + 4 * m] = pat[r]
    return rows


@dataclass(frozen=True)
class NormalizationTriple:
    """Row triple and column arrangement of one 3-normalization."""

    rows: tuple[int, int, int]
    col_order: tuple[int, ...]
    col_negated: tuple[int, ...]


def _normalize_triple(h: np.ndarray, triple: tuple[int, int, int]):
    """Standardize one ordered row triple; returns (NormalizationTriple, matrix)."""
    sub = h[list(triple), :]
    negate = sub.prod(axis=0) == 1  # make each column pattern odd-parity
    cols = np.where(negate, -sub, sub)
    classes: list[list[int]] = [[], [], [], []]
    lookup = {pat: m for m, pat in enumerate(_CLASS_PATTERNS)}
    for j in range(20):
        classes[lookup[tuple(int(x) for x in cols[:, j])]].append(j)
    if any(len(c) != 5 for c in classes):
        raise StructureError("row triple does not split columns 5+5+5+5")
    order = [c[0] for c in classes]
    for c in classes:
        order.extend(c[1:])
    full = np.where(negate[None, :], -h, h)
    row_rest = [i for i in range(20) if i not in triple]
    arranged = full[list(triple) + row_rest, :][:, order]
    info = NormalizationTriple(
        rows=triple,
        col_order=tuple(order),
        col_negated=tuple(int(j) for j in np.flatnonzero(negate)),
    )
    return info, SignMatrix(arranged)


def three_normalizations(h: SignMatrix):
    """Standard 3-normalizations of an order-20 Hadamard matrix.

    Every ordered row triple admits one (the four column pattern classes
    always have size 5), so this yields 20*19*18 normalized matrices, each
    verified to have row sums {0,0,0,12} plus sixteen 4s.
    """
    if h.n_rows != 20 or not is_hadamard(h):
        raise PreconditionError("input must be a Hadamard matrix of order 20")
    out = []
    a = h.array
    for triple in permutations(range(20), 3):
        info, norm = _normalize_triple(a, triple)
        sums = sorted(int(s) for s in norm.array.astype(np.int64).sum(axis=1))
        if sums != [0, 0, 0] + [4] * 16 + [12]:
            raise StructureError(f"triple {triple}: row sums {sums} not (0,0,0,12,4^16)")
        out.append((info, norm))
    return out


def maximal_excess_21(normalized: SignMatrix) -> SignMatrix:
    """Order-21 design from a 3-normalized order-20 Hadamard matrix.

    Deletes the three standard rows, inserts the four block-indicator rows,
    and prepends the signed first column; the result is arranged so that the
    1+4+16 row and column segmentation applies positionally.
    """
    if normalized.n_rows != 20 or normalized.n_cols != 20:
        raise PreconditionError("input must have order 20")
    a = normalized.array
    if not np.array_equal(a[:3], standard_three_rows()):
        raise StructureError("rows 0-2 are not the standard three rows")
    if not is_hadamard(normalized):
        raise PreconditionError("input must be a Hadamard matrix")
    retained = a[3:, :].copy()
    sums = retained.astype(np.int64).sum(axis=1)
    heavy = np.flatnonzero(sums == 12)
    if len(heavy) != 1:
        raise StructureError("expected exactly one row of sum 12")
    w = retained[heavy[0]].copy()
    rest = np.delete(retained, heavy[0], axis=0)

    # rotate each class so the heavy row's single -1 sits on the lead column
    col_order = list(range(20))
    for m in range(4):
        members = [m] + list(range(4 + 4 * m, 8 + 4 * m))
        minus = [j for j in members if w[j] == -1]
        if len(minus) != 1:
            raise StructureError("heavy row must have one -1 per column class")
        if minus[0] != m:
            col_order[m], col_order[minus[0]] = col_order[minus[0]], col_order[m]
    w = w[col_order]
    rest = rest[:, col_order]

    out = np.ones((21, 21), dtype=np.int8)
    out[0, 1:] = w
    for m in range(4):
        out[1 + m, 0] = -1
        out[1 + m, 1:] = 1
        out[1 + m, 1 + m] = -1
        out[1 + m, 5 + 4 * m : 9 + 4 * m] = -1
    out[5:, 1:] = rest
    design = SignMatrix(out)
    form = classify_gram(gram(design, "left"))
    if form.tag != BORDERED_FIVES or form.fives != 4:
        raise StructureError("constructed design does not have the four-fives form")
    return design


def enumerate_order21(h20_classes: list[SignMatrix]) -> dict[str, SignMatrix]:
    """Distinct order-21 designs from all 3-normalizations of the inputs.

    Feeding representatives of all three order-20 Hadamard classes yields
    the complete census.  Returns canonical key -> representative.
    """
    out: dict[str, SignMatrix] = {}
    for h in h20_classes:
        if h.n_rows != 20 or not is_hadamard(h):
            raise PreconditionError("inputs must be Hadamard matrices of order 20")
        a = h.array
        for triple in permutations(range(20), 3):
            _, norm = _normalize_triple(a, triple)
            design = maximal_excess_21(norm)
            out.setdefault(canonical_key(design), design)
    return dict(sorted(out.items()))
