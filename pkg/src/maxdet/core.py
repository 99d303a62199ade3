"""Exact arithmetic and bookkeeping for {-1,+1} matrices.

Entries are stored as int8 signs; all determinant work is done in exact
(arbitrary precision) integer arithmetic, never floating point.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionError, PreconditionError, StructureError

__all__ = [
    "SignMatrix",
    "BlockProfile",
    "determinant",
    "gram",
    "excess",
    "block_profile",
    "apply_equivalence_op",
    "row_sum_triples",
    "random_sign_matrix",
    "random_equivalent",
]


class SignMatrix:
    """Immutable rectangular matrix with entries in {-1, +1}."""

    __slots__ = ("_a",)

    def __init__(self, entries):
        a = np.asarray(entries, dtype=np.int8)
        if a.ndim != 2 or a.shape[0] < 1 or a.shape[1] < 1:
            raise DimensionError(f"need a 2-d matrix, got shape {a.shape}")
        if not np.all(np.abs(a) == 1):
            raise StructureError("entries must be exactly -1 or +1")
        a = a.copy()
        a.flags.writeable = False
        self._a = a

    @property
    def array(self) -> np.ndarray:
        """Read-only int8 view of the entries."""
        return self._a

    @property
    def n_rows(self) -> int:
        return self._a.shape[0]

    @property
    def n_cols(self) -> int:
        return self._a.shape[1]

    @property
    def is_square(self) -> bool:
        return self._a.shape[0] == self._a.shape[1]

    def transpose(self) -> "SignMatrix":
        return SignMatrix(self._a.T)

    def __eq__(self, other):
        return (
            isinstance(other, SignMatrix)
            and self._a.shape == other._a.shape
            and bool(np.array_equal(self._a, other._a))
        )

    def __hash__(self):
        return hash((self._a.shape, self._a.tobytes()))

    def __repr__(self):
        return f"SignMatrix({self.n_rows}x{self.n_cols})"

    def to_text(self) -> str:
        """Serialize: header line "n_rows n_cols", then one '+'/'-' string per row."""
        lines = [f"{self.n_rows} {self.n_cols}"]
        for row in self._a:
            lines.append("".join("+" if x == 1 else "-" for x in row))
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "SignMatrix":
        """Parse the serialization produced by :meth:`to_text`."""
        lines = [ln.strip() for ln in text.splitlines() if ln.strip()]
        if not lines:
            raise StructureError("empty matrix text")
        try:
            n_rows, n_cols = map(int, lines[0].split())
        except ValueError:
            raise StructureError(f"bad header line: {lines[0]!r}") from None
        if len(lines) != n_rows + 1:
            raise StructureError(f"expected {n_rows} rows, got {len(lines) - 1}")
        rows = []
        for ln in lines[1:]:
            if len(ln) != n_cols or set(ln) - {"+", "-"}:
                raise StructureError(f"bad row line: {ln!r}")
            rows.append([1 if ch == "+" else -1 for ch in ln])
        return cls(rows)

    @classmethod
    def from_signs(cls, rows: list[str]) -> "SignMatrix":
        """Build from '+'/'-' strings (no header), e.g. ["++-", "-+-"]."""
        return cls([[1 if ch == "+" else -1 for ch in r] for r in rows])


@dataclass(frozen=True)
class BlockProfile:
    """Row/column sums of the half-order blocks A, B, C, -D of an even-order design.

    `a` is the larger and `b` the smaller of the two distinct sums; for a
    design achieving the optimal even Gram form they satisfy a^2 + b^2 = 2n - 2.
    """

    half: int
    sums: tuple[int, int, int, int]  # constant sums of A, B, C, -D
    a: int
    b: int
    sum_of_squares_ok: bool


def determinant(m: SignMatrix) -> int:
    """Exact determinant by fraction-free (Bareiss) elimination.

    Raises DimensionError for non-square input.  The result is an exact
    Python integer; no rounding occurs at any order.
    """
    if not m.is_square:
        raise DimensionError(f"determinant needs a square matrix, got {m.n_rows}x{m.n_cols}")
    return bareiss_determinant(m.array.tolist())


def bareiss_determinant(rows: list[list[int]]) -> int:
    """Bareiss fraction-free elimination on a list-of-lists of Python ints."""
    a = [list(map(int, r)) for r in rows]
    n = len(a)
    sign = 1
    prev = 1
    for k in range(n - 1):
        if a[k][k] == 0:
            for i in range(k + 1, n):
                if a[i][k] != 0:
                    a[k], a[i] = a[i], a[k]
                    sign = -sign
                    break
            else:
                return 0
        akk = a[k][k]
        for i in range(k + 1, n):
            aik = a[i][k]
            ri = a[i]
            rk = a[k]
            for j in range(k + 1, n):
                # exact division: Bareiss guarantees divisibility by the previous pivot
                ri[j] = (akk * ri[j] - aik * rk[j]) // prev
            ri[k] = 0
        prev = akk
    return sign * a[n - 1][n - 1]


def gram(m: SignMatrix, side: str = "left") -> np.ndarray:
    """Gram matrix of a square design: left -> m m^T, right -> m^T m.

    Returned as an int64 array (entries are bounded by the order, so this
    is exact).
    """
    if not m.is_square:
        raise DimensionError(f"gram needs a square matrix, got {m.n_rows}x{m.n_cols}")
    a = m.array.astype(np.int64)
    if side == "left":
        return a @ a.T
    if side == "right":
        return a.T @ a
    raise PreconditionError(f"side must be 'left' or 'right', got {side!r}")


def excess(m: SignMatrix) -> int:
    """Sum of all entries."""
    return int(m.array.astype(np.int64).sum())


def block_profile(m: SignMatrix) -> BlockProfile:
    """Block row/column sums of an even-order design split into half-order blocks.

    The four blocks A, B, C, -D must each have constant row and column sums;
    otherwise a StructureError names the offending block.
    """
    if not m.is_square:
        raise DimensionError("block_profile needs a square matrix")
    n = m.n_rows
    if n % 2 != 0:
        raise DimensionError(f"block_profile needs even order, got {n}")
    h = n // 2
    a = m.array.astype(np.int64)
    blocks = {
        "A": a[:h, :h],
        "B": a[:h, h:],
        "C": a[h:, :h],
        "-D": -a[h:, h:],
    }
    sums = []
    for name, blk in blocks.items():
        rs = blk.sum(axis=1)
        cs = blk.sum(axis=0)
        if not (np.all(rs == rs[0]) and np.all(cs == rs[0])):
            raise StructureError(f"block {name} does not have constant row/column sums")
        sums.append(int(rs[0]))
    s_a, s_b, s_c, s_negd = sums
    big, small = max(abs(s_a), abs(s_b)), min(abs(s_a), abs(s_b))
    return BlockProfile(
        half=h,
        sums=(s_a, s_b, s_c, s_negd),
        a=big,
        b=small,
        sum_of_squares_ok=(big * big + small * small == 2 * n - 2),
    )


def apply_equivalence_op(m: SignMatrix, kind: str, arg) -> SignMatrix:
    """Apply one Hadamard-equivalence operation and return the new matrix.

    kind is one of "permute_rows", "permute_cols" (arg: a permutation of the
    index range) or "negate_rows", "negate_cols" (arg: an iterable of
    indices).  |determinant| is unchanged for square matrices.
    """
    a = m.array.copy()
    if kind == "permute_rows":
        perm = _check_perm(arg, m.n_rows)
        a = a[perm, :]
    elif kind == "permute_cols":
        perm = _check_perm(arg, m.n_cols)
        a = a[:, perm]
    elif kind == "negate_rows":
        for i in _check_indices(arg, m.n_rows):
            a[i, :] = -a[i, :]
    elif kind == "negate_cols":
        for j in _check_indices(arg, m.n_cols):
            a[:, j] = -a[:, j]
    else:
        raise PreconditionError(f"unknown equivalence op kind {kind!r}")
    return SignMatrix(a)


def _check_perm(perm, n: int) -> list[int]:
    perm = list(perm)
    if sorted(perm) != list(range(n)):
        raise PreconditionError(f"not a permutation of range({n}): {perm}")
    return perm


def _check_indices(idx, n: int) -> list[int]:
    idx = [int(i) for i in idx]
    for i in idx:
        if not 0 <= i < n:
            raise PreconditionError(f"index {i} out of range({n})")
    return idx


def row_sum_triples(m: SignMatrix) -> list[tuple[int, int, int]]:
    """Per-row segment sums for an order-21 design partitioned 1+4+16.

    The segmentation is positional: columns 0, 1-4, 5-20 of the matrix as
    stored.  Callers must pre-normalize the design into that layout.
    """
    if m.n_rows != 21 or m.n_cols != 21:
        raise DimensionError(f"row_sum_triples is defined for order 21, got {m.n_rows}x{m.n_cols}")
    a = m.array.astype(np.int64)
    return [(int(r[0]), int(r[1:5].sum()), int(r[5:21].sum())) for r in a]


def random_sign_matrix(n_rows: int, n_cols: int, rng: np.random.Generator) -> SignMatrix:
    """Uniformly random sign matrix."""
    return SignMatrix(rng.integers(0, 2, size=(n_rows, n_cols)) * 2 - 1)


def random_equivalent(m: SignMatrix, rng: np.random.Generator, n_ops: int = 8) -> SignMatrix:
    """Apply a random sequence of equivalence operations (for tests)."""
    out = m
    for _ in range(n_ops):
        match rng.integers(0, 4):
            case 0:
                out = apply_equivalence_op(out, "permute_rows", rng.permutation(out.n_rows))
            case 1:
                out = apply_equivalence_op(out, "permute_cols", rng.permutation(out.n_cols))
            case 2:
                k = int(rng.integers(0, out.n_rows))
                out = apply_equivalence_op(out, "negate_rows", [k])
            case _:
                k = int(rng.integers(0, out.n_cols))
                out = apply_equivalence_op(out, "negate_cols", [k])
    return out
