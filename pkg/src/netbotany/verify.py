"""Acceptance suite: every stated criterion as a pass/fail check.

The same functions back the `verify` CLI subcommand and the pytest
acceptance module.  All randomness derives from the master seed through
named substreams, and the canonical report text is a pure function of the
seed, so two runs with the same seed produce byte-identical reports (this
is itself the final criterion).
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .botany import (
    StarProfile,
    catalog_summary,
    enumerate_landscape,
    enumerate_with_star_profile,
    export_catalog,
)
from .bridges import (
    km_nonintersection_prob,
    mc_nonintersection_prob,
    near_max_exponent_experiment,
)
from .forest import interior_forest, weight_constraint_space
from .layout import plan_layout
from .lpp import (
    all_geodesics,
    backward_table,
    build_environment,
    disjoint_passage_value,
    extract_network,
    forward_table,
    passage_value,
    plant_fixture,
)
from .manifest import sha256_digest, substream_seed
from .netgraph import canonical_code, check_rules, count_geodesics, face_count
from .oracles import brute_disjoint, brute_geodesics, brute_passage

__all__ = ["CriterionResult", "run_criteria", "run_all", "canonical_report"]


@dataclass
class CriterionResult:
    index: int
    name: str
    passed: bool
    detail: str
    runtime: float
    limit: float | None = None

    @property
    def within_limit(self) -> bool:
        return self.limit is None or self.runtime < self.limit

    @property
    def ok(self) -> bool:
        return self.passed and self.within_limit


def _result(index, name, passed, detail, started, limit=None):
    return CriterionResult(
        index, name, bool(passed), detail, time.perf_counter() - started, limit
    )


def criterion_1_enumeration(seed: int) -> CriterionResult:
    t0 = time.perf_counter()
    cat = enumerate_landscape()
    counts: dict[tuple[int, int], int] = {}
    for m in cat.members:
        counts[m.kl_pair] = counts.get(m.kl_pair, 0) + 1
    want = {(1, 1): 1, (1, 2): 1, (1, 3): 1, (2, 2): 3, (2, 3): 6, (3, 3): 15}
    passed = len(cat) == 27 and counts == want
    detail = f"|catalog|={len(cat)} subcounts={sorted(counts.items())}"
    return _result(1, "enumeration-count", passed, detail, t0, limit=5.0)


def criterion_2_geodesic_table(seed: int) -> CriterionResult:
    t0 = time.perf_counter()
    s = catalog_summary(enumerate_landscape())
    max_d = [s.per_count[t]["max_d"] for t in range(1, 7)]
    high_countable = all(
        s.per_count[t]["countable"] and s.per_count[t]["max_d"] == 0
        for t in (7, 8, 9)
    )
    passed = (
        s.max_geodesics == 9
        and max_d == [10, 8, 6, 6, 3, 3]
        and high_countable
    )
    detail = f"max_T={s.max_geodesics} max_d(T=1..6)={[str(d) for d in max_d]}"
    return _result(2, "geodesic-count-table", passed, detail, t0)


def criterion_3_dimension_identities(seed: int) -> CriterionResult:
    t0 = time.perf_counter()
    ok = True
    for m in enumerate_landscape().members:
        g = m.graph
        k, l = g.source_degree, g.sink_degree
        d = m.invariants.d_value
        alt = 11 - face_count(g) - k * (k - 1) // 2 - l * (l - 1) // 2
        ok &= d == 12 - Fraction(g.num_vertices + k * k + l * l, 2)
        ok &= d == alt
        ok &= 0 <= d <= 10
        ok &= 2 + abs(k - l) <= g.num_vertices <= k + l
    return _result(
        3, "dimension-double-identity", ok, "both closed forms, bounds ok", t0
    )


def criterion_4_density(seed: int) -> CriterionResult:
    t0 = time.perf_counter()
    s = catalog_summary(enumerate_landscape())
    sigs = set(s.dense_signatures)
    pairs = [sig[:2] for sig in s.dense_signatures]
    want = {(1, 1, 1), (1, 2, 2), (1, 3, 3), (2, 2, 4), (2, 3, 6), (3, 3, 9)}
    passed = sigs == want and len(set(pairs)) == 6
    return _result(4, "density-classification", passed, f"dense={sorted(sigs)}", t0)


def criterion_5_star_profiles(seed: int) -> CriterionResult:
    t0 = time.perf_counter()
    land = enumerate_landscape()
    prof = enumerate_with_star_profile(StarProfile.landscape())
    ok = prof.codes() == land.codes() and len(prof) == 27
    bm = enumerate_with_star_profile(StarProfile.brownian_map())
    extras = [m for m in bm.members if m.code.code not in land.codes()]
    ok &= len(bm) == 28 and len(extras) == 1
    ok &= extras[0].kl_pair == (3, 4) and extras[0].invariants.num_vertices == 3
    lqg = enumerate_with_star_profile(StarProfile.lqg(Fraction(3, 2)))
    extras_lqg = sorted(
        (m for m in lqg.members if m.code.code not in land.codes()),
        key=lambda m: m.invariants.num_vertices,
    )
    ok &= len(lqg) == 29 and len(extras_lqg) == 2
    ok &= extras_lqg[0].kl_pair == (4, 4)
    ok &= extras_lqg[0].invariants.num_edges == 4
    ok &= extras_lqg[1].kl_pair == (3, 4)
    detail = f"landscape=27 identical, brownian_map={len(bm)}, lqg(3/2)={len(lqg)}"
    return _result(5, "star-profile-enumeration", ok, detail, t0)


def criterion_6_weight_space_dimension(seed: int) -> CriterionResult:
    t0 = time.perf_counter()
    rng = np.random.default_rng(substream_seed(seed, "weight-space"))
    ok = True
    for m in enumerate_landscape().members:
        g = m.graph
        f = interior_forest(g)
        want = (g.source_degree + g.sink_degree - g.num_vertices) // 2 + 2
        assert want == f.num_components() + 1
        for _ in range(10):
            weights = {
                e: Fraction(int(rng.integers(-30, 31)), int(rng.integers(1, 9)))
                for e in f.edges
            }
            space = weight_constraint_space(f.with_weights(weights))
            ok &= space.dimension == want
            k, l = f.num_sources, f.num_sinks
            ok &= space.contains_direction((1.0,) * k + (0.0,) * l)
            ok &= space.contains_direction((0.0,) * k + (1.0,) * l)
    return _result(
        6, "weight-space-dimension", ok,
        "dim W(Z) = (k+l-|V|)/2 + 2 = c+1 on 27 members x 10 weightings", t0,
    )


def criterion_7_lpp_oracles(seed: int, n_envs: int = 100) -> CriterionResult:
    t0 = time.perf_counter()
    ok = True
    checked = 0
    for i in range(n_envs):
        sub = substream_seed(seed, "lpp-oracle", i)
        rng = np.random.default_rng(sub)
        h = int(rng.integers(1, 8))
        w = int(rng.integers(1, 8))
        model = ["exponential", "geometric"][i % 2]
        env = build_environment(model, w, h, seed=sub)
        u, v = (0, 0), (w - 1, h - 1)
        ok &= passage_value(env, u, v) == brute_passage(env.weights, u, v)
        best, argmax = brute_geodesics(env.weights, u, v)
        gs = all_geodesics(env, u, v)
        ok &= gs.max_weight == best
        ok &= {p.sites for p in gs.paths} == argmax
        xs = sorted(int(c) for c in rng.integers(0, w, size=2))
        ys = sorted(int(c) for c in rng.integers(0, w, size=2))
        ok &= disjoint_passage_value(env, xs, ys) == brute_disjoint(
            env.weights, xs, ys
        )
        if xs[0] <= ys[0]:
            ok &= disjoint_passage_value(
                env, [xs[0]], [ys[0]]
            ) == passage_value(env, (xs[0], 0), (ys[0], h - 1))
        checked += 1
        if not ok:
            break
    detail = f"{checked}/{n_envs} environments, exact match"
    return _result(7, "lpp-oracle-equivalence", ok, detail, t0)


def criterion_8_deterministic_inequalities(seed: int) -> CriterionResult:
    t0 = time.perf_counter()
    env = build_environment(
        "exponential", 200, 200, seed=substream_seed(seed, "quadrangle")
    )
    rng = np.random.default_rng(substream_seed(seed, "quadrangle", 1))
    ok = True
    n_quad = 0
    for _ in range(100):
        s = int(rng.integers(0, 100))
        x1, x2 = sorted(int(c) for c in rng.integers(0, 100, size=2))
        f_x1 = forward_table(env.weights[s:, x1:])
        f_x2 = forward_table(env.weights[s:, x2:])
        for _ in range(100):
            t = int(rng.integers(s + 1, 200))
            y1, y2 = sorted(int(c) for c in rng.integers(100, 200, size=2))
            l11 = f_x1[t - s, y1 - x1]
            l12 = f_x1[t - s, y2 - x1]
            l21 = f_x2[t - s, y1 - x2]
            l22 = f_x2[t - s, y2 - x2]
            ok &= l12 + l21 <= l11 + l22
            n_quad += 1
    profiles_ok = True
    for i in range(50):
        sub = substream_seed(seed, "profile", i)
        rng_i = np.random.default_rng(sub)
        model = ["exponential", "geometric"][i % 2]
        penv = build_environment(model, 40, 30, seed=sub)
        x1, x2 = sorted(int(c) for c in rng_i.integers(10, 40, size=2))
        if x1 == x2:
            x2 += 1 if x2 < 39 else -1
            x1, x2 = min(x1, x2), max(x1, x2)
        b1 = backward_table(penv.weights[:, : x1 + 1])[0]
        b2 = backward_table(penv.weights[:, : x2 + 1])[0, : x1 + 1]
        diff = b1 - b2
        profiles_ok &= bool(np.all(np.diff(diff) <= 0))
    passed = ok and profiles_ok
    detail = f"{n_quad} quadruples all true; 50 difference profiles nonincreasing"
    return _result(8, "deterministic-inequalities", passed, detail, t0, limit=60.0)


def criterion_9_network_extraction(seed: int) -> CriterionResult:
    t0 = time.perf_counter()
    matches = 0
    cat = enumerate_landscape()
    for m in cat.members:
        env, u, v = plant_fixture(m.graph)
        gs = all_geodesics(env, u, v)
        net = extract_network(gs)
        if (
            canonical_code(net) == m.code
            and len(gs.paths) == m.invariants.geodesic_count
        ):
            matches += 1
    return _result(
        9, "network-extraction", matches == 27, f"{matches}/27 fixtures", t0
    )


def criterion_10_karlin_mcgregor(seed: int, trials: int = 100_000) -> CriterionResult:
    t0 = time.perf_counter()
    ok = km_nonintersection_prob([0.0], [0.0], 1.0) == 1.0
    details = ["k=1 exact"]
    for k in (2, 3):
        x = np.arange(k, 0, -1, dtype=float)  # unit gaps
        km = km_nonintersection_prob(x, x, 1.0)
        est, se = mc_nonintersection_prob(
            x, x, 1.0, step=1.0 / 64, trials=trials,
            seed=substream_seed(seed, "km-mc", k),
        )
        dev = abs(est - km) / se if se > 0 else float("inf")
        ok &= dev <= 3.0
        details.append(f"k={k} km={km:.6f} mc={est:.6f} dev={dev:.2f}se")
    return _result(
        10, "karlin-mcgregor", ok, "; ".join(details), t0, limit=120.0
    )


def criterion_11_near_max_exponent(seed: int, trials: int = 100_000) -> CriterionResult:
    t0 = time.perf_counter()
    res = near_max_exponent_experiment(
        trials=trials, seed=substream_seed(seed, "near-max")
    )
    s2, s3 = res["slopes"][2], res["slopes"][3]
    ok = abs(s2 - 1.0) <= 0.3 and abs(s3 - 2.0) <= 0.3
    detail = f"slope(k=2)={s2:.3f} slope(k=3)={s3:.3f}"
    return _result(11, "near-max-exponent", ok, detail, t0, limit=300.0)


CRITERIA = [
    criterion_1_enumeration,
    criterion_2_geodesic_table,
    criterion_3_dimension_identities,
    criterion_4_density,
    criterion_5_star_profiles,
    criterion_6_weight_space_dimension,
    criterion_7_lpp_oracles,
    criterion_8_deterministic_inequalities,
    criterion_9_network_extraction,
    criterion_10_karlin_mcgregor,
    criterion_11_near_max_exponent,
]


def run_criteria(seed: int, indices=None) -> list[CriterionResult]:
    results = []
    for fn in CRITERIA:
        res = fn(seed)
        if indices is None or res.index in indices:
            results.append(res)
    return results


def canonical_report(seed: int, results) -> str:
    """Deterministic report text: a pure function of the seed."""
    lines = [
        "netbotany acceptance report",
        f"seed: {seed}",
        f"criteria: {len(results)}",
    ]
    for r in results:
        flag = "PASS" if r.ok else "FAIL"
        lines.append(f"{r.index:2d} {flag} {r.name}: {r.detail}")
    lines.append(
        "result: " + ("ALL PASS" if all(r.ok for r in results) else "FAILURES")
    )
    return "\n".join(lines) + "\n"


def run_all(seed: int = 0, check_reproducibility: bool = True):
    """Run every criterion; the last one re-runs the suite and compares
    canonical report bytes."""
    results = run_criteria(seed)
    if check_reproducibility:
        t0 = time.perf_counter()
        first = canonical_report(seed, results)
        second = canonical_report(seed, run_criteria(seed))
        digest = sha256_digest(first.encode())
        passed = first == second
        results.append(
            CriterionResult(
                12,
                "reproducibility",
                passed,
                f"report digest {digest[:16]} identical on re-run",
                time.perf_counter() - t0,
            )
        )
    return results
