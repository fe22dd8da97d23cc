"""Ordered forests, admissible pairs, weight-constraint spaces, and
Gelfand-Tsetlin pattern utilities.

An ordered forest is what remains of a network graph after splitting its
source into degree-one ordered sources and its sink into degree-one
ordered sinks.  The constraint space W(Z) collects the endpoint weight
vectors (x, y) that equalize x_i + d_Z(p_i, q_j) + y_j over admissible
pairs; it is affine, slide-invariant, and has dimension c + 1 where c is
the number of forest components.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .layout import plan_layout
from .netgraph import NetworkGraph, check_rules

__all__ = [
    "OrderedForest",
    "AffineSubspace",
    "GTPattern",
    "interior_forest",
    "admissible_pairs",
    "weight_constraint_space",
    "validate_gt",
    "gt_stats",
]


@dataclass(frozen=True)
class OrderedForest:
    """Forest with ordered degree-1 sources/sinks and optional edge weights."""

    vertices: tuple[int, ...]
    edges: tuple[tuple[int, int], ...]
    sources: tuple[int, ...]
    sinks: tuple[int, ...]
    weights: dict[tuple[int, int], object] | None = None

    def __post_init__(self):
        vset = set(self.vertices)
        if len(set(self.edges)) != len(self.edges):
            raise ValueError("a forest has no parallel edges")
        for t, h in self.edges:
            if t == h or t not in vset or h not in vset:
                raise ValueError(f"bad edge ({t}, {h})")
            if (h, t) in set(self.edges):
                raise ValueError("antiparallel edges form an undirected cycle")
        if not _is_forest(self.vertices, self.edges):
            raise ValueError("underlying undirected graph must be a forest")
        indeg = {v: 0 for v in self.vertices}
        outdeg = {v: 0 for v in self.vertices}
        for t, h in self.edges:
            outdeg[t] += 1
            indeg[h] += 1
        in0 = {v for v in self.vertices if indeg[v] == 0}
        out0 = {v for v in self.vertices if outdeg[v] == 0}
        if set(self.sources) != in0 or set(self.sinks) != out0:
            raise ValueError("sources/sinks must list the degree-0 ends")
        for s in self.sources:
            if outdeg[s] != 1:
                raise ValueError("sources must have degree 1")
        for s in self.sinks:
            if indeg[s] != 1:
                raise ValueError("sinks must have degree 1")
        if self.weights is not None and set(self.weights) != set(self.edges):
            raise ValueError("weights must cover exactly the edge set")
        if not _orders_are_planar(self):
            raise ValueError("source/sink orders admit no planar embedding")

    @property
    def num_sources(self) -> int:
        return len(self.sources)

    @property
    def num_sinks(self) -> int:
        return len(self.sinks)

    def num_components(self) -> int:
        return len(self._components())

    def _components(self) -> list[set[int]]:
        parent = {v: v for v in self.vertices}

        def find(v):
            while parent[v] != v:
                parent[v] = parent[parent[v]]
                v = parent[v]
            return v

        for t, h in self.edges:
            parent[find(t)] = find(h)
        comps: dict[int, set[int]] = {}
        for v in self.vertices:
            comps.setdefault(find(v), set()).add(v)
        return sorted(comps.values(), key=min)

    def with_weights(self, weights) -> "OrderedForest":
        return OrderedForest(
            self.vertices, self.edges, self.sources, self.sinks, dict(weights)
        )

    def with_orders(self, sources, sinks) -> "OrderedForest":
        """Re-ordered copy; validation rejects non-planar orders."""
        return OrderedForest(
            self.vertices, self.edges, tuple(sources), tuple(sinks),
            self.weights,
        )

    def to_json_dict(self) -> dict:
        return {
            "vertices": list(self.vertices),
            "edges": [[t, h] for t, h in self.edges],
            "sources": list(self.sources),
            "sinks": list(self.sinks),
            "weights": None if self.weights is None else {
                f"{t},{h}": str(w) for (t, h), w in sorted(self.weights.items())
            },
        }


def _is_forest(vertices, edges) -> bool:
    parent = {v: v for v in vertices}

    def find(v):
        while parent[v] != v:
            parent[v] = parent[parent[v]]
            v = parent[v]
        return v

    for t, h in edges:
        rt, rh = find(t), find(h)
        if rt == rh:
            return False
        parent[rt] = rh
    return True


def _orders_are_planar(f: OrderedForest) -> bool:
    """A forest embeds in the strip with the given boundary orders iff
    component blocks are contiguous and consistently ordered, and within
    each tree every edge splits the boundary leaves into cyclic intervals.
    """
    src_pos = {v: i for i, v in enumerate(f.sources)}
    sink_pos = {v: i for i, v in enumerate(f.sinks)}
    comps = f._components()
    blocks = []
    for comp in comps:
        s_idx = sorted(src_pos[v] for v in comp if v in src_pos)
        t_idx = sorted(sink_pos[v] for v in comp if v in sink_pos)
        if s_idx != list(range(s_idx[0], s_idx[-1] + 1)):
            return False
        if t_idx != list(range(t_idx[0], t_idx[-1] + 1)):
            return False
        blocks.append((s_idx[0], t_idx[0]))
    blocks.sort()
    if [b[1] for b in blocks] != sorted(b[1] for b in blocks):
        return False
    # within each tree: boundary walk = sources left-to-right, then sinks
    # right-to-left; every edge must split the walk into cyclic intervals
    for comp in comps:
        walk = [v for v in f.sources if v in comp]
        walk += [v for v in reversed(f.sinks) if v in comp]
        index = {v: i for i, v in enumerate(walk)}
        adj: dict[int, set[int]] = {v: set() for v in comp}
        for t, h in f.edges:
            if t in comp:
                adj[t].add(h)
                adj[h].add(t)
        for t, h in f.edges:
            if t not in comp:
                continue
            side = _leaves_on_side(adj, index, t, h)
            if not _cyclically_contiguous(sorted(side), len(walk)):
                return False
    return True


def _leaves_on_side(adj, index, cut_a, cut_b) -> set[int]:
    seen = {cut_a}
    stack = [cut_a]
    leaves = set()
    while stack:
        v = stack.pop()
        if v in index:
            leaves.add(index[v])
        for w in adj[v]:
            if w == cut_b and v == cut_a:
                continue
            if w not in seen:
                seen.add(w)
                stack.append(w)
    return leaves


def _cyclically_contiguous(idx: list[int], n: int) -> bool:
    if len(idx) <= 1 or len(idx) == n:
        return True
    gaps = sum(
        1
        for a, b in zip(idx, idx[1:] + [idx[0] + n])
        if (b - a) % n > 1
    )
    return gaps <= 1


def interior_forest(g: NetworkGraph) -> OrderedForest:
    """Split the source into ordered degree-1 sources and the sink into
    ordered degree-1 sinks; the orders follow the lanes of the planar
    lattice drawing of g."""
    if not check_rules(g).all:
        raise ValueError("interior forests are defined for catalog graphs")
    layout = plan_layout(g)
    next_id = max(g.vertices) + 1
    sources, sinks = [], []
    edges = []
    src_edges = layout.source_edge_order()
    sink_edges = layout.sink_edge_order()
    new_tail: dict[tuple, int] = {}
    for e in src_edges:
        new_tail[e] = next_id
        sources.append(next_id)
        next_id += 1
    new_head: dict[tuple, int] = {}
    for e in sink_edges:
        new_head[e] = next_id
        sinks.append(next_id)
        next_id += 1
    for e in layout.lane:
        t, h, _ = e
        tail = new_tail.get(e, t)
        head = new_head.get(e, h)
        edges.append((tail, head))
    vertices = tuple(sorted(set(g.interior()) | set(sources) | set(sinks)))
    return OrderedForest(
        vertices, tuple(sorted(edges)), tuple(sources), tuple(sinks)
    )


def admissible_pairs(f: OrderedForest) -> set[tuple[int, int]]:
    """1-based (source index, sink index) pairs joined by a directed path."""
    out_adj: dict[int, list[int]] = {}
    for t, h in f.edges:
        out_adj.setdefault(t, []).append(h)
    sink_index = {v: j + 1 for j, v in enumerate(f.sinks)}
    pairs = set()
    for i, s in enumerate(f.sources, start=1):
        stack = [s]
        seen = {s}
        while stack:
            v = stack.pop()
            if v in sink_index:
                pairs.add((i, sink_index[v]))
            for w in out_adj.get(v, ()):
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
    return pairs


@dataclass(frozen=True)
class AffineSubspace:
    """offset + span(basis) inside R^ambient_dim."""

    ambient_dim: int
    offset: tuple
    basis: tuple[tuple, ...] = field(default_factory=tuple)

    @property
    def dimension(self) -> int:
        return len(self.basis)

    def _basis_matrix(self) -> np.ndarray:
        if not self.basis:
            return np.zeros((0, self.ambient_dim))
        return np.array([[float(x) for x in b] for b in self.basis])

    def contains_direction(self, v, tol: float = 1e-9) -> bool:
        v = np.array([float(x) for x in v])
        norm = np.linalg.norm(v)
        if norm == 0:
            return True
        B = self._basis_matrix()
        if B.shape[0] == 0:
            return False
        coeff, *_ = np.linalg.lstsq(B.T, v, rcond=None)
        return bool(np.linalg.norm(B.T @ coeff - v) <= tol * max(1.0, norm))

    def contains_point(self, p, tol: float = 1e-9) -> bool:
        p = np.array([float(x) for x in p])
        off = np.array([float(x) for x in self.offset])
        return self.contains_direction(p - off, tol=tol)

    def is_same_space(self, other: "AffineSubspace", tol: float = 1e-9) -> bool:
        """Mutual containment on unit-normalized residuals."""
        if self.ambient_dim != other.ambient_dim:
            return False
        if self.dimension != other.dimension:
            return False
        return (
            other.contains_point(self.offset, tol)
            and self.contains_point(other.offset, tol)
            and all(other.contains_direction(b, tol) for b in self.basis)
            and all(self.contains_direction(b, tol) for b in other.basis)
        )

    def translate(self, shift) -> "AffineSubspace":
        off = tuple(o + s for o, s in zip(self.offset, shift))
        return AffineSubspace(self.ambient_dim, off, self.basis)

    def to_json_dict(self) -> dict:
        return {
            "ambient_dim": self.ambient_dim,
            "offset": [str(x) for x in self.offset],
            "basis": [[str(x) for x in b] for b in self.basis],
        }


def _path_weight_between(f: OrderedForest, src: int, dst: int):
    """Weight of the unique directed path src -> dst, None if absent."""
    out_adj: dict[int, list[tuple[int, int]]] = {}
    for t, h in f.edges:
        out_adj.setdefault(t, []).append((t, h))

    def dfs(v, acc):
        if v == dst:
            return acc
        for t, h in out_adj.get(v, ()):
            w = f.weights[(t, h)]
            res = dfs(h, acc + w)
            if res is not None:
                return res
        return None

    return dfs(src, 0)


def _exact_rref(rows: list[list[Fraction]]):
    """Reduced row echelon form over Fractions; returns (rref, pivot cols)."""
    rows = [list(r) for r in rows]
    pivots = []
    r = 0
    ncols = len(rows[0]) if rows else 0
    for c in range(ncols):
        pivot = next((i for i in range(r, len(rows)) if rows[i][c] != 0), None)
        if pivot is None:
            continue
        rows[r], rows[pivot] = rows[pivot], rows[r]
        inv = rows[r][c]
        rows[r] = [x / inv for x in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][c] != 0:
                factor = rows[i][c]
                rows[i] = [a - factor * b for a, b in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
        if r == len(rows):
            break
    return rows[:r], pivots


def _solve_affine_exact(A: list[list[Fraction]], b: list[Fraction], n: int):
    aug = [row + [rhs] for row, rhs in zip(A, b)]
    rref, pivots = _exact_rref(aug) if aug else ([], [])
    if n in pivots:
        raise ValueError("inconsistent linear system")
    offset = [Fraction(0)] * n
    for row, c in zip(rref, pivots):
        offset[c] = row[n]
    free = [c for c in range(n) if c not in pivots]
    basis = []
    for fcol in free:
        vec = [Fraction(0)] * n
        vec[fcol] = Fraction(1)
        for row, c in zip(rref, pivots):
            vec[c] = -row[fcol]
        basis.append(tuple(vec))
    return tuple(offset), tuple(basis)


def _solve_affine_float(A: np.ndarray, b: np.ndarray, n: int):
    if A.shape[0] == 0:
        return tuple(np.zeros(n)), tuple(map(tuple, np.eye(n)))
    offset, *_ = np.linalg.lstsq(A, b, rcond=None)
    if np.linalg.norm(A @ offset - b) > 1e-9 * max(1.0, np.linalg.norm(b)):
        raise ValueError("inconsistent linear system")
    _, s, vh = np.linalg.svd(A)
    rank = int(np.sum(s > 1e-9 * max(1.0, s[0] if len(s) else 0.0)))
    basis = tuple(map(tuple, vh[rank:]))
    return tuple(offset), basis


def weight_constraint_space(f: OrderedForest) -> AffineSubspace:
    """W(Z): endpoint vectors (x, y) with x_i + d_Z(p_i, q_j) + y_j equal
    over all admissible pairs.

    Exact over rational weights, floating point (tolerance 1e-9) otherwise.
    The space always contains the two slide directions (1^k, 0) and
    (0, 1^l).
    """
    if f.weights is None:
        raise ValueError("weight_constraint_space needs edge weights")
    k, l = f.num_sources, f.num_sinks
    n = k + l
    pairs = sorted(admissible_pairs(f))
    dvals = {}
    for i, j in pairs:
        dvals[(i, j)] = _path_weight_between(
            f, f.sources[i - 1], f.sinks[j - 1]
        )
    exact = all(
        isinstance(w, (int, Fraction)) for w in f.weights.values()
    )
    base = pairs[0]
    rows, rhs = [], []
    for pair in pairs[1:]:
        row = [0] * n
        row[base[0] - 1] += 1
        row[k + base[1] - 1] += 1
        row[pair[0] - 1] -= 1
        row[k + pair[1] - 1] -= 1
        rows.append(row)
        rhs.append(dvals[pair] - dvals[base])
    if exact:
        A = [[Fraction(x) for x in row] for row in rows]
        b = [Fraction(x) for x in rhs]
        offset, basis = _solve_affine_exact(A, b, n)
    else:
        A = np.array(rows, dtype=float).reshape(len(rows), n)
        b = np.array(rhs, dtype=float)
        offset, basis = _solve_affine_float(A, b, n)
    return AffineSubspace(n, offset, basis)


@dataclass(frozen=True)
class GTPattern:
    """Triangular array w indexed by {(i, j): i + j <= k + 1}, 1-based."""

    entries: dict[tuple[int, int], float]

    def __post_init__(self):
        idx = set(self.entries)
        if not idx:
            return
        k = self.level
        want = {(i, j) for i in range(1, k + 1) for j in range(1, k + 2 - i)}
        if idx != want:
            raise ValueError("entries must fill a triangular index set")
        for i, j in want:
            if i + j <= k:
                a, b, c = (
                    self.entries[(i, j)],
                    self.entries[(i + 1, j)],
                    self.entries[(i, j + 1)],
                )
                if not (a <= b <= c):
                    raise ValueError(
                        f"interlacing fails at ({i}, {j}): {a}, {b}, {c}"
                    )

    @property
    def level(self) -> int:
        if not self.entries:
            return 0
        return max(i + j for i, j in self.entries) - 1

    @staticmethod
    def empty() -> "GTPattern":
        return GTPattern({})


def validate_gt(w: GTPattern, x) -> bool:
    """True iff (w, x) interlaces as a pattern with x as the bottom row."""
    x = list(x)
    k = w.level
    if len(x) != k + 1:
        raise ValueError(
            f"bottom row must have length {k + 1}, got {len(x)}"
        )
    if any(a > b for a, b in zip(x, x[1:])):
        raise ValueError("bottom row must be nondecreasing")
    merged = {(1, j): x[j - 1] for j in range(1, k + 2)}
    for (i, j), val in w.entries.items():
        merged[(i + 1, j)] = val
    try:
        GTPattern(merged)
    except ValueError:
        return False
    return True


def gt_stats(w: GTPattern):
    """(number of distinct entries, minimum gap between distinct values)."""
    values = sorted(set(w.entries.values()))
    if not values:
        return 0, float("inf")
    if len(values) == 1:
        return 1, float("inf")
    min_gap = min(b - a for a, b in zip(values, values[1:]))
    return len(values), min_gap
