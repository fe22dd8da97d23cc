"""Lattice drawings of network graphs.

A drawing assigns each vertex a row (time runs upward, one row per vertex
in topological order) and each edge copy a column lane.  The vertex
occupies a horizontal run spanning its incident lanes; an edge is the
vertical segment of its lane between its endpoint rows.  Because a
horizontal run has zero time extent, the whole run represents a single
network vertex; this is what lets endpoints of degree 3 exist on a grid
that only offers two step directions per site.

Constraints for a valid drawing:

* at every interior vertex, each in-lane is <= each out-lane, so all
  source-to-sink routes are monotone staircases;
* edge copies may share a lane only when one ends where the other starts;
* an edge's vertical segment must not cross the run of an unrelated
  vertex at an intermediate row.

All catalog graphs are small, so the planner searches topological orders
and lane assignments by backtracking.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from .netgraph import NetworkGraph

__all__ = ["LatticeLayout", "LayoutError", "plan_layout", "edge_instances"]

EdgeInst = tuple[int, int, int]  # (tail, head, copy index)


class LayoutError(ValueError):
    """No admissible lattice drawing was found."""


def edge_instances(g: NetworkGraph) -> list[EdgeInst]:
    seen: dict[tuple[int, int], int] = {}
    out = []
    for t, h in g.edges:
        idx = seen.get((t, h), 0)
        seen[(t, h)] = idx + 1
        out.append((t, h, idx))
    return out


@dataclass(frozen=True)
class LatticeLayout:
    graph: NetworkGraph
    row: dict[int, int]
    lane: dict[EdgeInst, int]

    def vertex_extent(self, v: int) -> tuple[int, int]:
        lanes = [
            L for (t, h, _), L in self.lane.items() if v in (t, h)
        ]
        return min(lanes), max(lanes)

    def source_edge_order(self) -> list[EdgeInst]:
        """Out-edges of the source, left to right."""
        g = self.graph
        es = [e for e in self.lane if e[0] == g.source]
        return sorted(es, key=lambda e: self.lane[e])

    def sink_edge_order(self) -> list[EdgeInst]:
        """In-edges of the sink, left to right."""
        g = self.graph
        es = [e for e in self.lane if e[1] == g.sink]
        return sorted(es, key=lambda e: self.lane[e])

    def edge_paths(self) -> list[tuple[EdgeInst, ...]]:
        """All source-to-sink routes as edge-instance sequences."""
        g = self.graph
        by_tail: dict[int, list[EdgeInst]] = {}
        for e in sorted(self.lane, key=lambda e: (self.lane[e], e)):
            by_tail.setdefault(e[0], []).append(e)
        routes = []

        def walk(v, acc):
            if v == g.sink:
                routes.append(tuple(acc))
                return
            for e in by_tail.get(v, ()):
                acc.append(e)
                walk(e[1], acc)
                acc.pop()

        walk(g.source, [])
        return routes

    def route_sites(self, route: tuple[EdgeInst, ...]) -> list[tuple[int, int]]:
        """Lattice sites of one route, from the left end of the source run
        to the right end of the sink run."""
        g = self.graph
        x = min(self.lane[e] for e in self.lane if e[0] == g.source)
        y = self.row[g.source]
        sites = [(x, y)]
        for e in route:
            lx = self.lane[e]
            while x < lx:
                x += 1
                sites.append((x, y))
            ry = self.row[e[1]]
            while y < ry:
                y += 1
                sites.append((x, y))
        end = max(self.lane[e] for e in self.lane if e[1] == g.sink)
        while x < end:
            x += 1
            sites.append((x, y))
        return sites


def _interior_orders(g: NetworkGraph):
    interior = g.interior()
    interior_edges = {
        (t, h) for t, h in g.edges if t != g.source and h != g.sink
    }
    for perm in itertools.permutations(interior):
        pos = {v: i for i, v in enumerate(perm)}
        if all(pos[t] < pos[h] for t, h in interior_edges):
            yield perm


def _lanes_conflict(layout_row, e1, l1, e2, l2) -> bool:
    if l1 != l2:
        return False
    (t1, h1, _), (t2, h2, _) = e1, e2
    lo = max(layout_row[t1], layout_row[t2])
    hi = min(layout_row[h1], layout_row[h2])
    if lo > hi:
        return False
    if lo == hi:
        # touching at one row is fine exactly when it is a shared vertex
        # where one edge ends and the other starts
        if h1 == t2 and layout_row[h1] == lo:
            return False
        if h2 == t1 and layout_row[h2] == lo:
            return False
    return True


def _violates(g, row, assigned) -> bool:
    items = list(assigned.items())
    # pairwise lane sharing
    for i, (e1, l1) in enumerate(items):
        for e2, l2 in items[i + 1:]:
            if _lanes_conflict(row, e1, l1, e2, l2):
                return True
    # monotone transit through interior vertices
    for v in g.interior():
        ins = [l for (t, h, _), l in items if h == v]
        outs = [l for (t, h, _), l in items if t == v]
        if ins and outs and max(ins) > min(outs):
            return True
    # verticals must not cross unrelated vertex runs
    extent: dict[int, list[int]] = {}
    for (t, h, _), l in items:
        extent.setdefault(t, []).append(l)
        extent.setdefault(h, []).append(l)
    for (t, h, _), l in items:
        for v, lanes in extent.items():
            if v in (t, h):
                continue
            if row[t] < row[v] < row[h] and min(lanes) <= l <= max(lanes):
                return True
    return False


def plan_layout(g: NetworkGraph, max_extra_lanes: int = 2) -> LatticeLayout:
    """Find a lattice drawing of g; deterministic first solution."""
    insts = edge_instances(g)
    n_lanes = len(insts) + max_extra_lanes
    for perm in _interior_orders(g):
        row = {g.source: 0, g.sink: len(perm) + 1}
        row.update({v: i + 1 for i, v in enumerate(perm)})
        order = sorted(insts, key=lambda e: (row[e[0]], row[e[1]], e))
        assigned: dict[EdgeInst, int] = {}

        def assign(i):
            if i == len(order):
                return True
            e = order[i]
            for lane in range(n_lanes):
                assigned[e] = lane
                if not _violates(g, row, assigned) and assign(i + 1):
                    return True
                del assigned[e]
            return False

        if assign(0):
            return LatticeLayout(g, row, dict(assigned))
    raise LayoutError(f"no lattice drawing found for {g}")
