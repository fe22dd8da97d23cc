"""Finite directed multigraphs with a designated source and sink.

A network graph is a loop-free directed multigraph together with one
source vertex p (no incoming edges) and one sink vertex q (no outgoing
edges).  This module holds the graph type, the five admissibility rules,
transpose isomorphism with canonical codes, planarity, and the derived
per-graph invariants (face count, geodesic count, dimension value,
density flag).
"""

from __future__ import annotations

import itertools
import json
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction

import networkx as nx

__all__ = [
    "NetworkGraph",
    "RuleReport",
    "CanonicalCode",
    "GraphInvariants",
    "check_rules",
    "transpose",
    "canonical_code",
    "is_planar",
    "face_count",
    "count_geodesics",
    "d_value",
    "is_dense_class",
    "compute_invariants",
    "graph_to_json",
    "graph_from_json",
    "graph_to_dot",
]

# Brute-force canonicalization permutes interior vertices only; beyond this
# many interior vertices the factorial blows up and we refuse.
MAX_INTERIOR_FOR_CANONICAL = 9


class VertexBudgetError(ValueError):
    """Graph too large for brute-force canonicalization."""


@dataclass(frozen=True)
class NetworkGraph:
    """Immutable directed multigraph with designated source and sink.

    Edges are an ordered tuple of (tail, head) pairs; repeated pairs encode
    parallel edges.  Construction enforces loop-freeness, in-degree 0 at the
    source and out-degree 0 at the sink.  Connectivity (every vertex on a
    source-to-sink path) is a property of catalog members, not of the type.
    """

    vertices: tuple[int, ...]
    source: int
    sink: int
    edges: tuple[tuple[int, int], ...]

    def __post_init__(self):
        vset = set(self.vertices)
        if len(vset) != len(self.vertices):
            raise ValueError("duplicate vertex ids")
        if self.source not in vset or self.sink not in vset:
            raise ValueError("source/sink must be vertices")
        if self.source == self.sink:
            raise ValueError("source and sink must differ")
        for t, h in self.edges:
            if t == h:
                raise ValueError(f"loop edge at vertex {t}")
            if t not in vset or h not in vset:
                raise ValueError(f"edge ({t}, {h}) uses unknown vertex")
            if h == self.source:
                raise ValueError("source must have in-degree 0")
            if t == self.sink:
                raise ValueError("sink must have out-degree 0")
        # normalize edge order so equal multisets compare equal
        object.__setattr__(self, "edges", tuple(sorted(self.edges)))
        object.__setattr__(self, "vertices", tuple(sorted(self.vertices)))

    @staticmethod
    def build(edges, source=0, sink=None, extra_vertices=()):
        """Build from an edge list, inferring the vertex set."""
        vs = {source} | set(extra_vertices)
        for t, h in edges:
            vs.add(t)
            vs.add(h)
        if sink is None:
            sink = max(vs)
        vs.add(sink)
        return NetworkGraph(tuple(sorted(vs)), source, sink, tuple(edges))

    @property
    def num_vertices(self) -> int:
        return len(self.vertices)

    @property
    def num_edges(self) -> int:
        return len(self.edges)

    def out_edges(self, v) -> list[tuple[int, int]]:
        return [e for e in self.edges if e[0] == v]

    def in_edges(self, v) -> list[tuple[int, int]]:
        return [e for e in self.edges if e[1] == v]

    def out_degree(self, v) -> int:
        return sum(1 for t, _ in self.edges if t == v)

    def in_degree(self, v) -> int:
        return sum(1 for _, h in self.edges if h == v)

    def degree(self, v) -> int:
        return self.in_degree(v) + self.out_degree(v)

    @property
    def source_degree(self) -> int:
        return self.out_degree(self.source)

    @property
    def sink_degree(self) -> int:
        return self.in_degree(self.sink)

    def interior(self) -> tuple[int, ...]:
        return tuple(v for v in self.vertices if v not in (self.source, self.sink))

    def edge_multiset(self) -> Counter:
        return Counter(self.edges)


@dataclass(frozen=True)
class RuleReport:
    rule1_planar_loopfree: bool
    rule2_unique_source_sink: bool
    rule3_interior_forest: bool
    rule4_interior_degree3: bool
    rule5_endpoint_degree_le3: bool

    @property
    def all(self) -> bool:
        return (
            self.rule1_planar_loopfree
            and self.rule2_unique_source_sink
            and self.rule3_interior_forest
            and self.rule4_interior_degree3
            and self.rule5_endpoint_degree_le3
        )


@dataclass(frozen=True)
class CanonicalCode:
    code: bytes

    def hex(self) -> str:
        return self.code.hex()


@dataclass(frozen=True)
class GraphInvariants:
    k: int
    l: int
    num_vertices: int
    num_edges: int
    num_faces: int
    d_value: Fraction
    geodesic_count: int
    dense: bool


def transpose(g: NetworkGraph) -> NetworkGraph:
    """Reverse every edge and swap the source/sink roles."""
    return NetworkGraph(
        g.vertices, g.sink, g.source, tuple((h, t) for t, h in g.edges)
    )


def _underlying_simple_subdivided(g: NetworkGraph) -> nx.Graph:
    """Undirected simple graph with every parallel edge copy subdivided.

    Subdivision preserves planarity, so a plain simple-graph planarity test
    applies to the multigraph.
    """
    G = nx.Graph()
    G.add_nodes_from(g.vertices)
    next_id = max(g.vertices) + 1
    seen = set()
    for t, h in g.edges:
        key = (min(t, h), max(t, h))
        if key not in seen and not G.has_edge(t, h):
            G.add_edge(t, h)
            seen.add(key)
        else:
            G.add_edge(t, next_id)
            G.add_edge(next_id, h)
            next_id += 1
    return G


def is_planar(g: NetworkGraph) -> bool:
    """Planarity of the underlying undirected multigraph."""
    return nx.check_planarity(_underlying_simple_subdivided(g), counterexample=False)[0]


def _undirected_connected(vertices, edges) -> bool:
    if not vertices:
        return True
    adj = {v: set() for v in vertices}
    for t, h in edges:
        adj[t].add(h)
        adj[h].add(t)
    seen = {vertices[0]}
    stack = [vertices[0]]
    while stack:
        v = stack.pop()
        for w in adj[v]:
            if w not in seen:
                seen.add(w)
                stack.append(w)
    return len(seen) == len(vertices)


def _interior_is_forest(g: NetworkGraph) -> bool:
    """No undirected cycles among interior vertices; parallel interior edges
    count as a 2-cycle."""
    interior = set(g.interior())
    parent = {v: v for v in interior}

    def find(v):
        while parent[v] != v:
            parent[v] = parent[parent[v]]
            v = parent[v]
        return v

    for t, h in g.edges:
        if t in interior and h in interior:
            rt, rh = find(t), find(h)
            if rt == rh:
                return False
            parent[rt] = rh
    return True


def check_rules(g: NetworkGraph) -> RuleReport:
    """Evaluate the five admissibility rules.  Total: never raises."""
    rule1 = is_planar(g)  # loop-freeness is enforced by the type
    sources = [v for v in g.vertices if g.in_degree(v) == 0]
    sinks = [v for v in g.vertices if g.out_degree(v) == 0]
    rule2 = sources == [g.source] and sinks == [g.sink]
    rule3 = _interior_is_forest(g)
    rule4 = all(g.degree(v) == 3 for v in g.interior())
    rule5 = g.source_degree in (1, 2, 3) and g.sink_degree in (1, 2, 3)
    return RuleReport(rule1, rule2, rule3, rule4, rule5)


def _serialize_under(g: NetworkGraph, perm: dict[int, int]) -> bytes:
    n = g.num_vertices
    edges = sorted((perm[t], perm[h]) for t, h in g.edges)
    parts = [n, perm[g.source], perm[g.sink]]
    for t, h in edges:
        parts.append(t)
        parts.append(h)
    return bytes(parts)


def _min_serialization(g: NetworkGraph) -> bytes:
    interior = g.interior()
    if len(interior) > MAX_INTERIOR_FOR_CANONICAL:
        raise VertexBudgetError(
            f"{len(interior)} interior vertices exceed the canonicalization budget"
        )
    # source and sink are distinguished, so only interior labels permute
    best = None
    slots = list(range(1, 1 + len(interior)))
    fixed = {g.source: 0, g.sink: g.num_vertices - 1}
    for assignment in itertools.permutations(slots):
        perm = dict(fixed)
        perm.update(zip(interior, assignment))
        s = _serialize_under(g, perm)
        if best is None or s < best:
            best = s
    return best


def canonical_code(g: NetworkGraph) -> CanonicalCode:
    """Label-independent code equal for g and for its transpose.

    Minimum over all interior relabelings of a fixed serialization, taken
    for both g and transpose(g).
    """
    return CanonicalCode(min(_min_serialization(g), _min_serialization(transpose(g))))


def face_count(g: NetworkGraph) -> int:
    """Number of faces (including the unbounded one) via Euler's formula."""
    if not _undirected_connected(g.vertices, g.edges):
        raise ValueError("face count requires a connected graph")
    if not is_planar(g):
        raise ValueError("face count requires a planar graph")
    return g.num_edges - g.num_vertices + 2


def count_geodesics(g: NetworkGraph) -> int:
    """Number of distinct source-to-sink paths, parallel edges distinct."""
    order = _topological_order(g)
    if order is None:
        raise ValueError("geodesic count requires an acyclic graph")
    paths = {v: 0 for v in g.vertices}
    paths[g.source] = 1
    for v in order:
        if paths[v] == 0:
            continue
        for _, h in g.out_edges(v):
            paths[h] += paths[v]
    return paths[g.sink]


def _topological_order(g: NetworkGraph):
    indeg = {v: g.in_degree(v) for v in g.vertices}
    ready = [v for v in g.vertices if indeg[v] == 0]
    order = []
    while ready:
        v = ready.pop()
        order.append(v)
        for _, h in g.out_edges(v):
            indeg[h] -= 1
            if indeg[h] == 0:
                ready.append(h)
    if len(order) != g.num_vertices:
        return None
    return order


def d_value(g: NetworkGraph) -> Fraction:
    """Dimension value 12 - (|V| + k^2 + l^2)/2 of a catalog graph.

    Also asserts the equivalent face form 11 - |F| - C(k,2) - C(l,2).
    Arithmetic is exact (Fraction), never floating point.
    """
    if not check_rules(g).all:
        raise ValueError("d_value is defined for rule-satisfying graphs only")
    k, l = g.source_degree, g.sink_degree
    d = 12 - Fraction(g.num_vertices + k * k + l * l, 2)
    f = face_count(g)
    alt = 11 - f - k * (k - 1) // 2 - l * (l - 1) // 2
    assert d == alt, f"dimension identities disagree: {d} != {alt}"
    return d


def _has_bridge(g: NetworkGraph) -> bool:
    mult = g.edge_multiset()
    for e, m in mult.items():
        if m > 1:
            continue  # a parallel edge copy can never be a bridge
        remaining = list(g.edges)
        remaining.remove(e)
        if not _undirected_connected(g.vertices, remaining):
            return True
    return False


def is_dense_class(g: NetworkGraph) -> bool:
    """True iff removing some single edge disconnects the underlying graph."""
    if not check_rules(g).all:
        raise ValueError("density flag is defined for rule-satisfying graphs only")
    return _has_bridge(g)


def compute_invariants(g: NetworkGraph) -> GraphInvariants:
    return GraphInvariants(
        k=g.source_degree,
        l=g.sink_degree,
        num_vertices=g.num_vertices,
        num_edges=g.num_edges,
        num_faces=face_count(g),
        d_value=d_value(g),
        geodesic_count=count_geodesics(g),
        dense=is_dense_class(g),
    )


def graph_to_json(g: NetworkGraph) -> str:
    payload = {
        "vertices": list(g.vertices),
        "source": g.source,
        "sink": g.sink,
        "edges": [[t, h] for t, h in g.edges],
    }
    return json.dumps(payload, sort_keys=True)


def graph_from_json(text: str) -> NetworkGraph:
    data = json.loads(text)
    return NetworkGraph(
        tuple(data["vertices"]),
        data["source"],
        data["sink"],
        tuple((t, h) for t, h in data["edges"]),
    )


def graph_to_dot(g: NetworkGraph, name: str = "network") -> str:
    lines = [f"digraph {name} {{"]
    lines.append("  rankdir=BT;")
    for v in g.vertices:
        if v == g.source:
            lines.append(f'  {v} [label="p", shape=square];')
        elif v == g.sink:
            lines.append(f'  {v} [label="q", shape=doublecircle];')
        else:
            lines.append(f"  {v} [shape=circle];")
    for t, h in g.edges:
        lines.append(f"  {t} -> {h};")
    lines.append("}")
    return "\n".join(lines)
