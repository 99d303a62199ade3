"""Classification of Gram matrices against the known optimal forms.

A Gram matrix is matched structurally, up to simultaneous row/column
permutation and negation: entry magnitudes locate the template and a sign
ratio must then factor as s_i * s_j over the template's support, which is
checked by propagation instead of backtracking over permutations.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import SignMatrix, block_profile, bareiss_determinant, determinant, gram
from .errors import DimensionError, InvariantError, StructureError

__all__ = [
    "GramForm",
    "DesignReport",
    "check_gram",
    "classify_gram",
    "verify_design",
    "is_hadamard",
    "is_regular_hadamard",
    "even_design_type",
    "HADAMARD",
    "BARBA",
    "EHLICH_EVEN",
    "BORDERED_MINUS3",
    "BORDERED_FIVES",
    "UNKNOWN",
]

HADAMARD = "Hadamard"
BARBA = "Barba"
EHLICH_EVEN = "EhlichEven"
BORDERED_MINUS3 = "BorderedMinus3"
BORDERED_FIVES = "BorderedFives"
UNKNOWN = "Unknown"


@dataclass(frozen=True)
class GramForm:
    """Matched optimal form: tag plus order-dependent parameters.

    fives is the count of off-diagonal 5s in the border row (BorderedFives
    only).  ab is the block-sum pair of the design, filled by verify_design
    for EhlichEven designs; it is not derivable from the Gram matrix alone.
    """

    tag: str
    order: int
    fives: int | None = None
    ab: tuple[int, int] | None = None


def check_gram(m: np.ndarray) -> np.ndarray:
    """Validate Gram-matrix invariants; returns the matrix as int64.

    Checks symmetry, the constant diagonal equal to the order, and
    nonnegativity of all leading principal minors under exact elimination.
    """
    m = np.asarray(m)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise DimensionError(f"Gram matrix must be square, got {m.shape}")
    m = m.astype(np.int64)
    n = m.shape[0]
    if not np.array_equal(m, m.T):
        raise InvariantError("Gram matrix must be symmetric")
    if not np.all(np.diag(m) == n):
        raise InvariantError(f"Gram diagonal must equal the order {n}")
    rows = m.tolist()
    for k in range(1, n + 1):
        if bareiss_determinant([r[:k] for r in rows[:k]]) < 0:
            raise InvariantError(f"leading principal minor of order {k} is negative")
    return m


def _consistent_signs(ratio: np.ndarray, support: np.ndarray) -> bool:
    """True if ratio[i,j] factors as s_i*s_j on the support graph."""
    n = ratio.shape[0]
    signs = np.zeros(n, dtype=np.int64)
    for start in range(n):
        if signs[start]:
            continue
        signs[start] = 1
        stack = [start]
        while stack:
            i = stack.pop()
            for j in np.flatnonzero(support[i]):
                want = ratio[i, j] * signs[i]
                if signs[j] == 0:
                    signs[j] = want
                    stack.append(int(j))
                elif signs[j] != want:
                    return False
    return True


def _match_template(m: np.ndarray, template: np.ndarray) -> bool:
    """Match m against template up to simultaneous negations (no permutation)."""
    if not np.array_equal(np.abs(m), np.abs(template)):
        return False
    support = template != 0
    np.fill_diagonal(support, False)
    ratio = np.ones_like(m)
    ratio[support] = m[support] // template[support]
    return _consistent_signs(ratio, support)


def _is_barba_order(n: int) -> bool:
    k = 0
    while k * k + (k + 1) * (k + 1) <= n:
        if k * k + (k + 1) * (k + 1) == n:
            return True
        k += 1
    return False


def classify_gram(m: np.ndarray) -> GramForm:
    """Classify a Gram matrix against the catalogued optimal forms.

    Returns the matching form after accounting for simultaneous row/column
    permutation and negation; Unknown is a valid outcome for record-holding
    but suboptimal Gram matrices.
    """
    m = check_gram(m)
    n = m.shape[0]
    off = m.copy()
    np.fill_diagonal(off, 0)
    absoff = np.abs(off)

    if not off.any():
        return GramForm(HADAMARD, n)

    offdiag_mask = ~np.eye(n, dtype=bool)
    if np.all(absoff[offdiag_mask] == 1):
        if _is_barba_order(n) and _match_template(m, (n - 1) * np.eye(n, dtype=np.int64) + 1):
            return GramForm(BARBA, n)
        return GramForm(UNKNOWN, n)

    vals = set(np.unique(absoff[offdiag_mask]).tolist())
    if vals == {0, 2} and n % 2 == 0:
        # support graph of the 2-entries must be two disjoint half-cliques
        half = n // 2
        comp = _components(absoff == 2)
        if (
            len(comp) == 2
            and all(len(c) == half for c in comp)
            and all(np.all(absoff[np.ix_(c, c)] + 2 * np.eye(half, dtype=np.int64) == 2) for c in comp)
        ):
            if _consistent_signs(np.sign(off), absoff == 2):
                return GramForm(EHLICH_EVEN, n)
        return GramForm(UNKNOWN, n)

    if vals == {1, 3} and n == 17:
        border = [i for i in range(n) if np.all(absoff[i, [j for j in range(n) if j != i]] == 3)]
        if len(border) == 1:
            p = border[0]
            template = np.ones((n, n), dtype=np.int64)
            template[p, :] = -3
            template[:, p] = -3
            np.fill_diagonal(template, n)
            if _match_template(m, template):
                return GramForm(BORDERED_MINUS3, n)
        return GramForm(UNKNOWN, n)

    if vals == {1, 5} and n in (9, 21):
        fives = 1 if n == 9 else 4
        for p in range(n):
            others = [j for j in range(n) if j != p]
            if np.count_nonzero(absoff[p, others] == 5) != fives:
                continue
            if not np.all((absoff[p, others] == 5) | (absoff[p, others] == 1)):
                continue
            template = np.ones((n, n), dtype=np.int64)
            special = np.flatnonzero(absoff[p] == 5)
            template[p, special] = 5
            template[special, p] = 5
            np.fill_diagonal(template, n)
            if np.array_equal(np.abs(m), np.abs(template)) and _match_template(m, template):
                return GramForm(BORDERED_FIVES, n, fives=fives)
        return GramForm(UNKNOWN, n)

    return GramForm(UNKNOWN, n)


def _components(adj: np.ndarray) -> list[list[int]]:
    n = adj.shape[0]
    seen = np.zeros(n, dtype=bool)
    comps = []
    for start in range(n):
        if seen[start]:
            continue
        comp = []
        stack = [start]
        seen[start] = True
        while stack:
            i = stack.pop()
            comp.append(i)
            for j in np.flatnonzero(adj[i]):
                if not seen[j]:
                    seen[j] = True
                    stack.append(int(j))
        comps.append(sorted(comp))
    return comps


@dataclass(frozen=True)
class DesignReport:
    """Structural report of verify_design."""

    order: int
    det: int
    form_left: GramForm
    form_right: GramForm
    m_equals_mprime: bool
    block: object | None  # BlockProfile for well-structured even designs

    def lines(self) -> list[str]:
        out = [
            f"order: {self.order}",
            f"det: {self.det}",
            f"det_factored: {_factor2(self.det)}",
            f"form_left: {_form_str(self.form_left)}",
            f"form_right: {_form_str(self.form_right)}",
            f"m_equals_mprime: {str(self.m_equals_mprime).lower()}",
        ]
        if self.block is not None:
            out.append(f"block_sums: {self.block.sums}")
            out.append(f"block_ab: ({self.block.a}, {self.block.b})")
            out.append(f"sum_of_squares_ok: {str(self.block.sum_of_squares_ok).lower()}")
        return out


def _form_str(form: GramForm) -> str:
    extra = ""
    if form.fives is not None:
        extra = f" fives={form.fives}"
    if form.ab is not None:
        extra += f" ab={form.ab}"
    return f"{form.tag}{extra}"


def _factor2(value: int) -> str:
    if value == 0:
        return "0"
    odd, exp = abs(value), 0
    while odd % 2 == 0:
        odd //= 2
        exp += 1
    sign = "-" if value < 0 else ""
    return f"{sign}{odd} x 2^{exp}"


def verify_design(m: SignMatrix) -> DesignReport:
    """Full structural report of a square design; never mutates the input."""
    if not m.is_square:
        raise DimensionError("verify_design needs a square matrix")
    left = gram(m, "left")
    right = gram(m, "right")
    form_left = classify_gram(left)
    form_right = classify_gram(right)
    block = None
    if m.n_rows % 2 == 0:
        try:
            block = block_profile(m)
        except StructureError:
            block = None
        if form_left.tag == EHLICH_EVEN:
            ab = even_design_type(m)
            form_left = GramForm(form_left.tag, form_left.order, ab=ab)
        if form_right.tag == EHLICH_EVEN:
            ab = even_design_type(m.transpose())
            form_right = GramForm(form_right.tag, form_right.order, ab=ab)
    return DesignReport(
        order=m.n_rows,
        det=determinant(m),
        form_left=form_left,
        form_right=form_right,
        m_equals_mprime=bool(np.array_equal(left, right)),
        block=block,
    )


def is_hadamard(m: SignMatrix) -> bool:
    """True iff m is square with m m^T = n I."""
    if not m.is_square:
        return False
    g = gram(m, "left")
    return bool(np.array_equal(g, m.n_rows * np.eye(m.n_rows, dtype=np.int64)))


def is_regular_hadamard(m: SignMatrix) -> bool:
    """True iff m is Hadamard with constant row and column sums."""
    if not is_hadamard(m):
        return False
    a = m.array.astype(np.int64)
    rs, cs = a.sum(axis=1), a.sum(axis=0)
    return bool(np.all(rs == rs[0]) and np.all(cs == rs[0]))


def _clique_normalization(g: np.ndarray) -> tuple[list[int], np.ndarray] | None:
    """Half-clique order and sign vector bringing an EhlichEven Gram to template."""
    n = g.shape[0]
    off = g.copy()
    np.fill_diagonal(off, 0)
    comp = _components(np.abs(off) == 2)
    if len(comp) != 2 or any(len(c) != n // 2 for c in comp):
        return None
    order = comp[0] + comp[1]
    signs = np.zeros(n, dtype=np.int64)
    for c in comp:
        signs[c[0]] = 1
        stack = [c[0]]
        while stack:
            i = stack.pop()
            for j in c:
                if signs[j] == 0 and abs(off[i, j]) == 2:
                    signs[j] = signs[i] * (off[i, j] // 2)
                    stack.append(j)
    if np.any(signs == 0):
        return None
    return order, signs


def even_design_type(m: SignMatrix) -> tuple[int, int] | None:
    """Block-sum pair (a, b) of a design whose Grams achieve the even optimal form.

    Renormalizes the design (row/column order and signs from the Gram
    half-cliques) into the standard block layout and reads the profile;
    returns None when the design does not achieve the form.
    """
    if not m.is_square or m.n_rows % 2 != 0:
        return None
    left = gram(m, "left")
    right = gram(m, "right")
    norm_l = _clique_normalization(left)
    norm_r = _clique_normalization(right)
    if norm_l is None or norm_r is None:
        return None
    row_order, row_signs = norm_l
    col_order, col_signs = norm_r
    a = m.array.astype(np.int64)
    a = (a[row_order, :][:, col_order] * row_signs[row_order, None]) * col_signs[col_order][None, :]
    try:
        profile = block_profile(SignMatrix(a))
    except StructureError:
        return None
    return (profile.a, profile.b)
