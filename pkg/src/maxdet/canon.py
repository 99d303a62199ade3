"""Hadamard equivalence via canonical labeling of a colored design graph.

A design R maps to a simple vertex-colored graph: two sign vertices per row
and per column (v+ and v-), plus one pairing vertex per line tying v+ and v-
together.  Row vertex i (sign s) is adjacent to column vertex j (sign t)
exactly when s*t*R[i][j] = +1.  Color-preserving graph isomorphisms then
correspond one-to-one with signed row/column permutation pairs, so a
canonical labeling of the graph is a complete invariant for Hadamard
equivalence.

The labeler is a partition-refinement backtracker in the McKay style:
equitable refinement (vectorized one-dimensional Weisfeiler-Leman rounds,
escalating to common-neighbor counts when plain degree rounds stall, which
they always do on these walk-regular graphs), individualization of the first
non-singleton cell, pruning by a path invariant, orbit pruning by discovered
automorphisms, and backjumping to the deepest shared ancestor whenever a
leaf certificate matches an earlier fully-explored branch.  Cells only ever
split in place, so a vertex never crosses an initial-cell boundary and leaf
certificates of graphs with equal initial cell layouts are directly
comparable.  Self-contained and adequate for the orders handled here
(designs up to order 50, graphs of at most 300 vertices).
"""

from __future__ import annotations

import hashlib

import numpy as np

from .core import SignMatrix, determinant
from .errors import DimensionError

__all__ = [
    "canonical_key",
    "are_equivalent",
    "duality_status",
    "automorphism_count",
    "SELF_DUAL",
    "DUAL_PAIR",
]

SELF_DUAL = "self-dual"
DUAL_PAIR = "dual-pair"


def _digest(data: bytes) -> bytes:
    return hashlib.blake2b(data, digest_size=12).digest()


def _digest_int(data: bytes) -> int:
    return int.from_bytes(_digest(data), "big")


# ---------------------------------------------------------------------------
# cheap equivalence invariants


def _gram_abs_signature(m: SignMatrix) -> bytes:
    """Digest of the sorted |entry| multisets of both Gram products.

    Signed permutations conjugate R R^T and R^T R and can flip entry signs,
    so only absolute values survive; sorting within rows and then sorting the
    rows removes the permutation.  Defined for rectangular matrices too.
    """
    parts = []
    a = m.array.astype(np.int64)
    for g in (a @ a.T, a.T @ a):
        rows = np.sort(np.abs(g), axis=1)
        order = np.lexsort(rows.T[::-1])
        parts.append(rows[order].tobytes())
    return _digest(b"|".join(parts))


def _line_invariants(a: np.ndarray) -> list[bytes]:
    """Per-row invariant from 4-row correlations.

    For rows i,k,l,m the value sum_j R[i,j]R[k,j]R[l,j]R[m,j] is unchanged
    by column permutation and negation and only changes sign under row
    negations, so the multiset of absolute values with one index pinned is
    an equivalence-respecting row label.  Entries are bounded by n_cols, so
    float32 BLAS products are exact.
    """
    n, w = a.shape
    af = a.astype(np.float32)
    pairs = (af[:, None, :] * af[None, :, :]).reshape(n * n, w)
    corr = np.abs(pairs @ pairs.T).astype(np.int32).reshape(n, -1)
    out = []
    for i in range(n):
        counts = np.bincount(corr[i], minlength=w + 1)
        out.append(_digest(counts.tobytes()))
    return out


# ---------------------------------------------------------------------------
# design graph


class _DesignGraph:
    """Colored-graph encoding of a sign matrix (see module docstring)."""

    __slots__ = ("n_vertices", "adj_bool", "cells", "cell_signature", "flip")

    def __init__(self, m: SignMatrix):
        r, c = m.n_rows, m.n_cols
        V = 3 * (r + c)
        # vertex ids: row+ i, row- r+i, col+ 2r+j, col- 2r+c+j,
        # row pair 2r+2c+i, col pair 2r+2c+r+j
        adj = np.zeros((V, V), dtype=bool)
        pos = m.array == 1
        adj[0:r, 2 * r : 2 * r + c] = pos
        adj[r : 2 * r, 2 * r + c : 2 * r + 2 * c] = pos
        adj[0:r, 2 * r + c : 2 * r + 2 * c] = ~pos
        adj[r : 2 * r, 2 * r : 2 * r + c] = ~pos
        base_pair = 2 * r + 2 * c
        for i in range(r):
            adj[base_pair + i, i] = adj[base_pair + i, r + i] = True
        for j in range(c):
            adj[base_pair + r + j, 2 * r + j] = adj[base_pair + r + j, 2 * r + c + j] = True
        adj |= adj.T
        self.adj_bool = adj
        self.n_vertices = V

        # initial cells: sign vertices grouped by line invariants (a cell
        # always contains both signs of its lines), then all pair vertices
        row_inv = _line_invariants(m.array)
        col_inv = _line_invariants(m.array.T)
        cells = []
        signature = [r, c]
        for inv, size, off_plus, off_minus in (
            (row_inv, r, 0, r),
            (col_inv, c, 2 * r, 2 * r + c),
        ):
            for val in sorted(set(inv)):
                idx = [i for i in range(size) if inv[i] == val]
                cells.append([off_plus + i for i in idx] + [off_minus + i for i in idx])
                signature.append((val.hex(), len(idx)))
        cells.append(list(range(base_pair, V)))
        self.cells = cells
        self.cell_signature = _digest(repr(signature).encode())

        # swapping v+ and v- on every line is always an automorphism
        flip = list(range(V))
        for i in range(r):
            flip[i], flip[r + i] = r + i, i
        for j in range(c):
            flip[2 * r + j], flip[2 * r + c + j] = 2 * r + c + j, 2 * r + j
        self.flip = tuple(flip)


# ---------------------------------------------------------------------------
# canonical labeling


class _Canonizer:
    def __init__(self, graph: _DesignGraph):
        self.g = graph
        V = graph.n_vertices
        self.V = V
        self.af = graph.adj_bool.astype(np.float32)
        a2 = self.af @ self.af  # common-neighbor counts; exact in float32
        self.a2f = a2
        self.first = None  # (inv_seq, cert, perm)
        self.first_fixed: tuple[int, ...] = ()
        self.best = None
        self.best_fixed: tuple[int, ...] = ()
        self.gens: list[tuple[int, ...]] = [graph.flip]
        cid = np.empty(V, dtype=np.int64)
        for idx, cell in enumerate(graph.cells):
            cid[cell] = idx
        self.cid0 = cid

    def run(self):
        cid, trace = self._refine(self.cid0)
        empty = np.zeros(0, dtype=bool)
        self._explore(cid, (trace,), (), empty, 0)
        return self.best, self.gens

    # -- refinement: vectorized 1-WL rounds with a common-neighbor escalation

    def _one_round(self, cid, ncells, mat, pieces):
        onehot = np.zeros((self.V, ncells), dtype=np.float32)
        onehot[np.arange(self.V), cid] = 1.0
        sig = (mat @ onehot).astype(np.int64)
        comb = np.column_stack([cid, sig])
        order = np.lexsort(comb.T[::-1])
        sc = comb[order]
        change = np.any(sc[1:] != sc[:-1], axis=1)
        ranks = np.concatenate([[0], np.cumsum(change)])
        new = np.empty(self.V, dtype=np.int64)
        new[order] = ranks
        n_new = int(ranks[-1]) + 1
        if n_new != ncells:
            pieces.append(sc.tobytes())
        return (new, n_new) if n_new != ncells else (cid, ncells)

    def _refine(self, cid):
        """Refine to the coarsest stable partition; returns (cid, trace hash)."""
        pieces = [np.bincount(cid).tobytes()]
        ncells = int(cid.max()) + 1
        while ncells < self.V:
            cid2, n2 = self._one_round(cid, ncells, self.af, pieces)
            if n2 != ncells:
                cid, ncells = cid2, n2
                continue
            # degree rounds stalled: escalate to common-neighbor counts
            cid2, n2 = self._one_round(cid, ncells, self.a2f, pieces)
            if n2 == ncells:
                break
            pieces.append(b"w2")
            cid, ncells = cid2, n2
        return cid, _digest_int(b"|".join(pieces))

    @staticmethod
    def _individualize(cid, v):
        new = cid * 2
        new[v] -= 1
        _, compact = np.unique(new, return_inverse=True)
        return compact.astype(np.int64)

    @staticmethod
    def _cmp_prefix(prefix, full) -> int:
        """-1 if prefix is lexicographically below full, +1 above, 0 equal so far."""
        for x, y in zip(prefix, full):
            if x < y:
                return -1
            if x > y:
                return 1
        return 0

    @staticmethod
    def _cmp_bits(a: np.ndarray, b: np.ndarray) -> int:
        """Lexicographic comparison of a against the same-length prefix of b."""
        b = b[: a.size]
        if a.size == 0 or np.array_equal(a, b):
            return 0
        idx = int(np.argmax(a != b))
        return 1 if a[idx] else -1

    def _extend_tri(self, tri, perm, p_old, p_new):
        """Append triangle rows p_old..p_new-1 of the partial certificate.

        The certificate is the strict lower triangle of the relabeled
        adjacency matrix read row by row, so the bits of the first p
        positions form a proper prefix of every completion's certificate.
        """
        parts = [tri]
        adj = self.g.adj_bool
        for q in range(p_old, p_new):
            parts.append(adj[perm[q], perm[:q]])
        return np.concatenate(parts)

    def _explore(self, cid, inv_seq, fixed, tri, p_old):
        """Returns None, or a depth to backjump to after an automorphism."""
        counts = np.bincount(cid)
        fat = np.flatnonzero(counts > 1)
        p_new = int(fat[0]) if fat.size else self.V
        perm = np.argsort(cid)
        tri = self._extend_tri(tri, perm, p_old, p_new)

        track_first = track_best = True
        if self.best is not None:
            c_inv = self._cmp_prefix(inv_seq, self.first[0])
            track_first = c_inv == 0 and self._cmp_bits(tri, self.first[3]) == 0
            c_inv = self._cmp_prefix(inv_seq, self.best[0])
            if c_inv < 0:
                track_best = False
            elif c_inv == 0:
                track_best = self._cmp_bits(tri, self.best[3]) >= 0
            if not (track_first or track_best):
                return None

        if fat.size == 0:
            cert = np.packbits(tri).tobytes()
            leaf = (inv_seq, cert, tuple(int(x) for x in perm), tri)
            if self.first is None:
                self.first = leaf
                self.first_fixed = fixed
                self.best = leaf
                self.best_fixed = fixed
                return None
            # matching an earlier leaf yields an automorphism mapping this
            # branch into a fully explored one: unwind to the deepest node
            # shared with that leaf's path
            jumps = []
            for ref, ref_fixed in ((self.first, self.first_fixed), (self.best, self.best_fixed)):
                if cert == ref[1]:
                    self._record_automorphism(ref[2], leaf[2])
                    depth = 0
                    while (
                        depth < len(fixed)
                        and depth < len(ref_fixed)
                        and fixed[depth] == ref_fixed[depth]
                    ):
                        depth += 1
                    jumps.append(depth)
            if (inv_seq, cert) > (self.best[0], self.best[1]):
                self.best = leaf
                self.best_fixed = fixed
            return min(jumps) if jumps else None

        cell = [int(v) for v in np.flatnonzero(cid == fat[0])]
        explored: list[int] = []
        orbit_stamp = -1
        parent: dict[int, int] = {}

        def find(x):
            root = x
            while parent.get(root, root) != root:
                root = parent[root]
            while parent.get(x, x) != x:
                parent[x], x = root, parent[x]
            return root

        depth = len(fixed)
        for v in cell:
            if len(self.gens) != orbit_stamp:
                # orbits of the subgroup fixing the current path pointwise
                parent = {}
                for gen in self.gens:
                    if all(gen[f] == f for f in fixed):
                        for x in cell:
                            rx, ry = find(x), find(gen[x])
                            if rx != ry:
                                parent[rx] = ry
                orbit_stamp = len(self.gens)
            if any(find(v) == find(u) for u in explored):
                continue
            explored.append(v)
            child_cid, trace = self._refine(self._individualize(cid, v))
            jump = self._explore(child_cid, inv_seq + (trace,), fixed + (v,), tri, p_new)
            if jump is not None and jump < depth:
                return jump
        return None

    def _record_automorphism(self, perm_a, perm_b):
        V = self.V
        g = [0] * V
        for p in range(V):
            g[perm_a[p]] = perm_b[p]
        g = tuple(g)
        if g != tuple(range(V)) and g not in self.gens:
            self.gens.append(g)


# ---------------------------------------------------------------------------
# permutation group order (deterministic Schreier-Sims)


def _group_order(gens, n: int) -> int:
    identity = tuple(range(n))
    gens = [tuple(g) for g in gens if tuple(g) != identity]
    if not gens:
        return 1

    def compose(a, b):
        return tuple(a[b[i]] for i in range(n))

    def inverse(a):
        inv = [0] * n
        for i, ai in enumerate(a):
            inv[ai] = i
        return tuple(inv)

    bases: list[int] = []
    level_gens: list[list] = []  # gens assigned to level l fix bases[:l]
    trees: list[dict] = []

    def gens_at(level):
        return [g for lv in range(level, len(level_gens)) for g in level_gens[lv]]

    def rebuild_tree(level):
        b = bases[level]
        tree = {b: identity}
        stack = [b]
        gl = gens_at(level)
        while stack:
            x = stack.pop()
            tx = tree[x]
            for g in gl:
                y = g[x]
                if y not in tree:
                    tree[y] = compose(g, tx)
                    stack.append(y)
        trees[level] = tree

    def extend_base(g):
        bases.append(next(i for i in range(n) if g[i] != i))
        level_gens.append([])
        trees.append({})

    def strip(g, start):
        level = start
        while level < len(bases):
            y = g[bases[level]]
            tree = trees[level]
            if y not in tree:
                return g, level
            g = compose(inverse(tree[y]), g)
            level += 1
        return g, level

    def add_generator(g, level):
        h, lv = strip(g, level)
        if h == identity:
            return None
        if lv == len(bases):
            extend_base(h)
        level_gens[lv].append(h)
        for j in range(level, lv + 1):
            rebuild_tree(j)
        return lv

    extend_base(gens[0])
    rebuild_tree(0)
    for g in gens:
        add_generator(g, 0)

    level = len(bases) - 1
    while level >= 0:
        clean = True
        tree = trees[level]
        gl = gens_at(level)
        for x in list(tree):
            ux = tree[x]
            for g in gl:
                schreier = compose(inverse(tree[g[x]]), compose(g, ux))
                if schreier == identity:
                    continue
                added = add_generator(schreier, level + 1)
                if added is not None:
                    clean = False
                    level = added
                    break
            if not clean:
                break
        if clean:
            level -= 1

    order = 1
    for tree in trees:
        order *= len(tree)
    return order


# ---------------------------------------------------------------------------
# public operations

_KEY_CACHE_MAX = 1 << 15
_key_cache: dict = {}


def canonical_key(m: SignMatrix, det_abs: int | None = None) -> str:
    """Canonical key of a design's Hadamard-equivalence class (lowercase hex).

    Two designs have equal keys exactly when they are Hadamard equivalent.
    The key is the canonically relabeled design-graph adjacency bitmap
    prefixed with cheap invariants (shape, |det|, Gram multiset digest, cell
    layout).  det_abs may pass a precomputed |determinant| to avoid one
    exact elimination.
    """
    token = (m.array.shape, m.array.tobytes())
    hit = _key_cache.get(token)
    if hit is not None:
        return hit
    if det_abs is None:
        det_abs = abs(determinant(m)) if m.is_square else 0
    graph = _DesignGraph(m)
    best, _ = _Canonizer(graph).run()
    prefix = (
        f"{m.n_rows},{m.n_cols},{abs(det_abs)},".encode()
        + _gram_abs_signature(m)
        + graph.cell_signature
    )
    key = (prefix + best[1]).hex()
    if len(_key_cache) >= _KEY_CACHE_MAX:
        _key_cache.clear()
    _key_cache[token] = key
    return key


def are_equivalent(m1: SignMatrix, m2: SignMatrix) -> bool:
    """True iff the designs are Hadamard equivalent.

    Cheap invariants (shape, |det|, Gram multisets) short-circuit most
    inequivalent pairs before any canonical labeling runs.
    """
    if (m1.n_rows, m1.n_cols) != (m2.n_rows, m2.n_cols):
        return False
    if m1.is_square and abs(determinant(m1)) != abs(determinant(m2)):
        return False
    if _gram_abs_signature(m1) != _gram_abs_signature(m2):
        return False
    return canonical_key(m1) == canonical_key(m2)


def duality_status(m: SignMatrix) -> str:
    """SELF_DUAL if the design is equivalent to its transpose, else DUAL_PAIR."""
    if not m.is_square:
        raise DimensionError("duality is defined for square designs")
    return SELF_DUAL if canonical_key(m) == canonical_key(m.transpose()) else DUAL_PAIR


def automorphism_count(m: SignMatrix) -> int:
    """Number of distinct design self-maps under signed row/column pairs.

    Counts transformations, not pairs: the pair group acts with kernel
    {(I,I), (-I,-I)}, so this is (number of fixing pairs) / 2.
    """
    if not m.is_square:
        raise DimensionError("automorphism_count is defined for square designs")
    graph = _DesignGraph(m)
    _, gens = _Canonizer(graph).run()
    return _group_order(gens, graph.n_vertices) // 2
