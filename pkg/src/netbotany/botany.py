"""Exhaustive enumeration of admissible network graphs.

Generates every loop-free planar multigraph with a unique source/sink,
degree-3 interior vertices and an interior forest, deduplicated up to
transpose isomorphism.  Endpoint degrees are bounded either by the fixed
rule (1..3) or by a configurable star-dimension profile, which also
filters candidates through the generalized dimension count.
"""

from __future__ import annotations

import csv
import io
import itertools
import json
from dataclasses import dataclass, field
from fractions import Fraction

from .netgraph import (
    CanonicalCode,
    GraphInvariants,
    NetworkGraph,
    _has_bridge,
    _min_serialization,
    canonical_code,
    check_rules,
    compute_invariants,
    count_geodesics,
    face_count,
    graph_to_dot,
)

__all__ = [
    "StarProfile",
    "Catalog",
    "CatalogMember",
    "SummaryTable",
    "enumerate_landscape",
    "enumerate_with_star_profile",
    "catalog_summary",
    "export_catalog",
    "parse_catalog_json",
    "parse_profile",
]

CATALOG_SCHEMA = "netbotany.catalog/1"


@dataclass(frozen=True)
class StarProfile:
    """Star-set dimension per order k; orders outside the domain are empty.

    The domain must be an initial segment {1..K} and the dimension values
    must be nonincreasing in k.
    """

    dims: dict[int, Fraction]

    def __post_init__(self):
        keys = sorted(self.dims)
        if keys != list(range(1, len(keys) + 1)):
            raise ValueError("profile domain must be an initial segment {1..K}")
        vals = [self.dims[k] for k in keys]
        if any(a < b for a, b in zip(vals, vals[1:])):
            raise ValueError("profile dimensions must be nonincreasing in k")
        object.__setattr__(
            self, "dims", {k: Fraction(v) for k, v in self.dims.items()}
        )

    @property
    def max_order(self) -> int:
        return len(self.dims)

    @staticmethod
    def landscape() -> "StarProfile":
        return StarProfile({1: Fraction(5), 2: Fraction(4), 3: Fraction(2)})

    @staticmethod
    def brownian_map() -> "StarProfile":
        return StarProfile({k: Fraction(5 - k) for k in range(1, 6)})

    @staticmethod
    def lqg(star4: Fraction | str | float) -> "StarProfile":
        return StarProfile(
            {1: Fraction(5), 2: Fraction(4), 3: Fraction(2), 4: Fraction(star4)}
        )

    def generalized_dimension(self, k: int, l: int, num_vertices: int) -> Fraction:
        return self.dims[k] + self.dims[l] + 2 - Fraction(num_vertices + k + l, 2)

    def endpoint_feasible(self, k: int, l: int) -> bool:
        """Per-endpoint face constraint, with |F*_p| lower-bounded by k-l."""
        return self.dims[k] >= max(k - l, 0) and self.dims[l] >= max(l - k, 0)

    def to_text(self) -> str:
        return "\n".join(f"star.{k}={self.dims[k]}" for k in sorted(self.dims))


def parse_profile(text: str) -> StarProfile:
    """Parse a plain-text profile: 'star.1=5, star.2=4' or one per line.

    Values may be integers, fractions like 3/2, or decimals.
    """
    dims: dict[int, Fraction] = {}
    for chunk in text.replace(",", "\n").splitlines():
        item = chunk.strip()
        if not item or item.startswith("#"):
            continue
        key, _, value = item.partition("=")
        key = key.strip()
        if not key.startswith("star."):
            raise ValueError(f"unrecognized profile key: {key!r}")
        order = int(key[len("star."):])
        dims[order] = Fraction(value.strip())
    if not dims:
        raise ValueError("empty profile")
    return StarProfile(dims)


@dataclass(frozen=True)
class CatalogMember:
    graph: NetworkGraph
    code: CanonicalCode
    invariants: GraphInvariants

    @property
    def kl_pair(self) -> tuple[int, int]:
        k, l = self.invariants.k, self.invariants.l
        return (min(k, l), max(k, l))


@dataclass(frozen=True)
class Catalog:
    members: tuple[CatalogMember, ...]
    profile: StarProfile | None
    generation_log: dict[str, int] = field(default_factory=dict)

    def __len__(self) -> int:
        return len(self.members)

    def codes(self) -> set[bytes]:
        return {m.code.code for m in self.members}

    def by_code(self, code: CanonicalCode) -> CatalogMember:
        for m in self.members:
            if m.code == code:
                return m
        raise KeyError("no member with that code")


def _decode_serialization(data: bytes) -> NetworkGraph:
    n, src, sink = data[0], data[1], data[2]
    edges = [(data[i], data[i + 1]) for i in range(3, len(data), 2)]
    return NetworkGraph(tuple(range(n)), src, sink, tuple(edges))


def _canonical_member_graph(g: NetworkGraph) -> NetworkGraph:
    """Deterministic representative: min serialization among the
    orientations with deg(p) <= deg(q)."""
    from .netgraph import transpose

    candidates = []
    if g.source_degree <= g.sink_degree:
        candidates.append(_min_serialization(g))
    if g.sink_degree <= g.source_degree:
        candidates.append(_min_serialization(transpose(g)))
    return _decode_serialization(min(candidates))


def _interior_degree_forests(degs: list[int]):
    """All simple undirected forests on range(len(degs)) with exact degrees."""
    m = len(degs)
    pairs = [(i, j) for i in range(m) for j in range(i + 1, m)]

    def rec(idx, remaining, chosen, parent):
        if all(r == 0 for r in remaining):
            yield list(chosen)
            return
        if idx == len(pairs):
            return
        # upper bound: each future pair can reduce total remaining by 2
        if sum(remaining) > 2 * (len(pairs) - idx):
            return
        i, j = pairs[idx]
        # skip this pair
        yield from rec(idx + 1, remaining, chosen, parent)
        # take this pair if degrees allow and no cycle forms
        if remaining[i] > 0 and remaining[j] > 0:
            ri, rj = _find(parent, i), _find(parent, j)
            if ri != rj:
                parent2 = dict(parent)
                parent2[ri] = rj
                remaining2 = list(remaining)
                remaining2[i] -= 1
                remaining2[j] -= 1
                chosen.append((i, j))
                yield from rec(idx + 1, remaining2, chosen, parent2)
                chosen.pop()

    yield from rec(0, list(degs), [], {i: i for i in range(m)})


def _find(parent, v):
    while parent[v] != v:
        v = parent[v]
    return v


def _compositions_capped(total: int, parts: int, cap: int):
    """All length-`parts` tuples of ints in [0, cap] summing to total."""
    if parts == 0:
        if total == 0:
            yield ()
        return
    for first in range(min(total, cap) + 1):
        for rest in _compositions_capped(total - first, parts - 1, cap):
            yield (first,) + rest


def _candidate_graphs(k: int, l: int, num_vertices: int):
    """All candidate multigraphs with the given endpoint degrees and vertex
    count, interior degree 3, interior forest, and no extra sources/sinks.

    Vertex 0 is the source, num_vertices-1 the sink.
    """
    m = num_vertices - 2
    p, q = 0, num_vertices - 1
    interior = list(range(1, num_vertices - 1))
    for a in range(min(k, l) + 1):
        if m == 0:
            if a == k == l:
                yield NetworkGraph(
                    (p, q), p, q, tuple((p, q) for _ in range(a))
                )
            continue
        for pin in _compositions_capped(k - a, m, 2):
            for qout in _compositions_capped(l - a, m, 2):
                degs = [3 - pin[i] - qout[i] for i in range(m)]
                if any(d < 0 for d in degs) or sum(degs) % 2:
                    continue
                for forest in _interior_degree_forests(degs):
                    for orient in itertools.product((0, 1), repeat=len(forest)):
                        edges = [(p, q)] * a
                        for i in range(m):
                            edges += [(p, interior[i])] * pin[i]
                            edges += [(interior[i], q)] * qout[i]
                        ok = True
                        indeg = list(pin)
                        outdeg = list(qout)
                        for (i, j), o in zip(forest, orient):
                            t, h = (i, j) if o == 0 else (j, i)
                            edges.append((interior[t], interior[h]))
                            outdeg[t] += 1
                            indeg[h] += 1
                        for i in range(m):
                            if indeg[i] == 0 or outdeg[i] == 0:
                                ok = False
                                break
                        if ok:
                            yield NetworkGraph(
                                tuple(range(num_vertices)), p, q, tuple(edges)
                            )


def _enumerate(profile: StarProfile | None, log: dict[str, int]):
    """Core generation; profile=None means the fixed endpoint rule 1..3."""
    max_order = 3 if profile is None else profile.max_order
    found: dict[bytes, NetworkGraph] = {}
    for k in range(1, max_order + 1):
        for l in range(k, max_order + 1):
            if profile is not None and not profile.endpoint_feasible(k, l):
                continue
            for nv in range(2, k + l + 1):
                if (k + l + 3 * (nv - 2)) % 2:
                    continue  # odd total degree
                if profile is not None and profile.generalized_dimension(
                    k, l, nv
                ) < 0:
                    continue
                for g in _candidate_graphs(k, l, nv):
                    log["candidates"] += 1
                    report = check_rules(g)
                    if not (
                        report.rule1_planar_loopfree
                        and report.rule2_unique_source_sink
                        and report.rule3_interior_forest
                        and report.rule4_interior_degree3
                    ):
                        continue
                    log["rules_pass"] += 1
                    code = canonical_code(g).code
                    if code not in found:
                        found[code] = g
    log["unique"] = len(found)
    return found


def _assemble(found: dict[bytes, NetworkGraph], profile: StarProfile | None,
              log: dict[str, int]) -> Catalog:
    members = []
    for code, g in found.items():
        rep = _canonical_member_graph(g)
        if profile is None:
            inv = compute_invariants(rep)
        else:
            # profile members may exceed endpoint degree 3, so the strict
            # catalog accessors do not apply; the dimension is d_gen
            k, l = rep.source_degree, rep.sink_degree
            inv = GraphInvariants(
                k=k,
                l=l,
                num_vertices=rep.num_vertices,
                num_edges=rep.num_edges,
                num_faces=face_count(rep),
                d_value=profile.generalized_dimension(k, l, rep.num_vertices),
                geodesic_count=count_geodesics(rep),
                dense=_has_bridge(rep),
            )
        members.append(CatalogMember(rep, CanonicalCode(code), inv))
    members.sort(
        key=lambda mb: (mb.kl_pair, mb.invariants.num_vertices, mb.code.code)
    )
    return Catalog(tuple(members), profile, dict(log))


def enumerate_landscape() -> Catalog:
    """The full catalog under the fixed endpoint-degree rule (1..3)."""
    log = {"candidates": 0, "rules_pass": 0, "unique": 0}
    found = _enumerate(None, log)
    return _assemble(found, None, log)


def enumerate_with_star_profile(profile: StarProfile) -> Catalog:
    """Catalog under a configurable star-dimension profile.

    Candidates satisfy the structural rules 1-4 with endpoint degrees in
    the profile domain, filtered by (i) nonnegative generalized dimension
    dims[k] + dims[l] + 2 - (|V|+k+l)/2 and (ii) the per-endpoint face
    constraint dims[k] >= max(k-l, 0) (and symmetrically).  Both filters
    depend only on (k, l, |V|), so they are applied before edge generation;
    the attached dimension value is the generalized one and may be
    fractional.
    """
    log = {"candidates": 0, "rules_pass": 0, "unique": 0}
    found = _enumerate(profile, log)
    return _assemble(found, profile, log)


@dataclass(frozen=True)
class SummaryTable:
    max_geodesics: int
    per_count: dict[int, dict]
    per_kl: dict[tuple[int, int], int]
    dense_signatures: tuple[tuple[int, int, int], ...]

    def lines(self) -> list[str]:
        out = ["T  members  max_d  countable"]
        for t in sorted(self.per_count):
            row = self.per_count[t]
            out.append(
                f"{t:<2} {row['count']:>7}  {str(row['max_d']):>5}  "
                f"{'yes' if row['countable'] else 'no'}"
            )
        out.append("")
        out.append("(k,l) counts: " + ", ".join(
            f"{kl}: {n}" for kl, n in sorted(self.per_kl.items())
        ))
        out.append("dense (k, l, T): " + ", ".join(
            str(s) for s in self.dense_signatures
        ))
        return out


def catalog_summary(catalog: Catalog) -> SummaryTable:
    per_count: dict[int, dict] = {}
    per_kl: dict[tuple[int, int], int] = {}
    dense = []
    for m in catalog.members:
        t = m.invariants.geodesic_count
        row = per_count.setdefault(
            t, {"count": 0, "max_d": None, "countable": True}
        )
        row["count"] += 1
        d = m.invariants.d_value
        if row["max_d"] is None or d > row["max_d"]:
            row["max_d"] = d
        if d != 0:
            row["countable"] = False
        per_kl[m.kl_pair] = per_kl.get(m.kl_pair, 0) + 1
        if m.invariants.dense:
            dense.append((m.kl_pair[0], m.kl_pair[1], t))
    return SummaryTable(
        max_geodesics=max(per_count) if per_count else 0,
        per_count=per_count,
        per_kl=per_kl,
        dense_signatures=tuple(sorted(dense)),
    )


def _member_record(m: CatalogMember) -> dict:
    return {
        "graph": {
            "vertices": list(m.graph.vertices),
            "source": m.graph.source,
            "sink": m.graph.sink,
            "edges": [[t, h] for t, h in m.graph.edges],
        },
        "code": m.code.hex(),
        "k": m.invariants.k,
        "l": m.invariants.l,
        "V": m.invariants.num_vertices,
        "E": m.invariants.num_edges,
        "F": m.invariants.num_faces,
        "d": str(m.invariants.d_value),
        "T": m.invariants.geodesic_count,
        "dense": m.invariants.dense,
    }


def export_catalog(catalog: Catalog, fmt: str) -> bytes:
    """Deterministic, order-stable serialization (json, csv, or dot)."""
    if fmt == "json":
        payload = {
            "schema": CATALOG_SCHEMA,
            "profile": None if catalog.profile is None
            else {str(k): str(v) for k, v in catalog.profile.dims.items()},
            "generation_log": catalog.generation_log,
            "members": [_member_record(m) for m in catalog.members],
        }
        return (json.dumps(payload, sort_keys=True, indent=1) + "\n").encode()
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["index", "k", "l", "V", "E", "F", "d", "T", "dense", "code"])
        for i, m in enumerate(catalog.members):
            inv = m.invariants
            writer.writerow([
                i, inv.k, inv.l, inv.num_vertices, inv.num_edges,
                inv.num_faces, str(inv.d_value), inv.geodesic_count,
                int(inv.dense), m.code.hex(),
            ])
        return buf.getvalue().encode()
    if fmt == "dot":
        blocks = []
        for i, m in enumerate(catalog.members):
            inv = m.invariants
            blocks.append(
                f"// member {i}: k={inv.k} l={inv.l} V={inv.num_vertices} "
                f"d={inv.d_value} T={inv.geodesic_count} "
                f"dense={int(inv.dense)}\n"
                + graph_to_dot(m.graph, name=f"network_{i}")
            )
        return ("\n\n".join(blocks) + "\n").encode()
    raise ValueError(f"unknown export format: {fmt!r}")


def parse_catalog_json(data: bytes) -> Catalog:
    payload = json.loads(data.decode())
    if payload.get("schema") != CATALOG_SCHEMA:
        raise ValueError("unknown catalog schema")
    profile = None
    if payload["profile"] is not None:
        profile = StarProfile(
            {int(k): Fraction(v) for k, v in payload["profile"].items()}
        )
    members = []
    for rec in payload["members"]:
        g = NetworkGraph(
            tuple(rec["graph"]["vertices"]),
            rec["graph"]["source"],
            rec["graph"]["sink"],
            tuple((t, h) for t, h in rec["graph"]["edges"]),
        )
        inv = GraphInvariants(
            k=rec["k"], l=rec["l"], num_vertices=rec["V"], num_edges=rec["E"],
            num_faces=rec["F"], d_value=Fraction(rec["d"]),
            geodesic_count=rec["T"], dense=rec["dense"],
        )
        members.append(
            CatalogMember(g, CanonicalCode(bytes.fromhex(rec["code"])), inv)
        )
    return Catalog(tuple(members), profile, dict(payload["generation_log"]))
