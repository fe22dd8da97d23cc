import itertools

import numpy as np
import pytest

from netbotany.layout import plan_layout
from netbotany.lpp import (
    BudgetExceededError,
    LatticePath,
    LineEnsemble,
    LppEnvironment,
    all_geodesics,
    build_environment,
    d123_distance,
    difference_profile,
    disjoint_passage_value,
    extract_network,
    extremal_geodesic,
    line_ensemble_value,
    overlap_distance,
    passage_value,
    path_weight,
    plant_fixture,
    quadrangle_check,
)
from netbotany.netgraph import canonical_code, check_rules

from catalog_reference import REFERENCE, reference_graph
from netbotany.oracles import (
    brute_disjoint,
    brute_geodesics,
    brute_line_value,
    brute_passage,
)


def make_env(weights):
    return LppEnvironment(np.asarray(weights, dtype=float), "deterministic")


class TestBuildEnvironment:
    def test_deterministic_constant(self):
        env = build_environment("deterministic", 4, 3, value=1.0)
        assert np.all(env.weights == 1.0)

    def test_same_seed_same_weights(self):
        a = build_environment("exponential", 6, 5, seed=11)
        b = build_environment("exponential", 6, 5, seed=11)
        assert np.array_equal(a.weights, b.weights)
        c = build_environment("exponential", 6, 5, seed=12)
        assert not np.array_equal(a.weights, c.weights)

    def test_exponential_mean(self):
        env = build_environment("exponential", 512, 512, seed=3)
        n = env.weights.size
        assert abs(env.weights.mean() - 1.0) < 5.0 / np.sqrt(n)

    def test_geometric_integer_valued(self):
        env = build_environment("geometric", 8, 8, seed=0, q=0.5)
        assert np.array_equal(env.weights, np.round(env.weights))
        assert env.weights.min() >= 0

    def test_invalid_extents(self):
        with pytest.raises(ValueError):
            build_environment("exponential", 0, 3)

    def test_unknown_model(self):
        with pytest.raises(ValueError):
            build_environment("uniformish", 3, 3)


class TestPassageValue:
    def test_single_cell(self):
        env = make_env([[7.0]])
        assert passage_value(env, (0, 0), (0, 0)) == 7.0

    def test_2x2_brute(self):
        env = make_env([[1, 2], [3, 4]])
        assert passage_value(env, (0, 0), (1, 1)) == 8.0

    def test_unordered_rejected(self):
        env = make_env([[1, 2], [3, 4]])
        with pytest.raises(ValueError):
            passage_value(env, (1, 1), (0, 0))

    @pytest.mark.parametrize("seed", range(12))
    def test_matches_brute_force_exactly(self, seed):
        rng = np.random.default_rng(seed)
        h, w = rng.integers(1, 8, size=2)
        model = ["exponential", "geometric"][seed % 2]
        env = build_environment(model, int(w), int(h), seed=seed)
        assert passage_value(env, (0, 0), (w - 1, h - 1)) == brute_passage(
            env.weights, (0, 0), (int(w) - 1, int(h) - 1)
        )

    def test_triangle_composition_integer_env(self):
        env = build_environment("geometric", 6, 6, seed=5)
        u, v = (0, 0), (5, 5)
        mid = 2
        total = passage_value(env, u, v)
        composed = max(
            passage_value(env, u, (z, mid)) + passage_value(env, (z, mid + 1), v)
            for z in range(6)
        )
        assert total == composed


class TestExtremalGeodesics:
    def test_left_equals_right_for_continuous_weights(self):
        env = build_environment("exponential", 6, 6, seed=2)
        left = extremal_geodesic(env, (0, 0), (5, 5), "left")
        right = extremal_geodesic(env, (0, 0), (5, 5), "right")
        assert left == right

    def test_tied_weights_hug_boundaries(self):
        env = make_env(np.zeros((3, 3)))
        left = extremal_geodesic(env, (0, 0), (2, 2), "left")
        right = extremal_geodesic(env, (0, 0), (2, 2), "right")
        assert left.sites == ((0, 0), (0, 1), (0, 2), (1, 2), (2, 2))
        assert right.sites == ((0, 0), (1, 0), (2, 0), (2, 1), (2, 2))

    @pytest.mark.parametrize("seed", range(8))
    def test_extremes_bound_every_geodesic(self, seed):
        env = build_environment("geometric", 5, 5, seed=seed)
        u, v = (0, 0), (4, 4)
        gs = all_geodesics(env, u, v)
        left = extremal_geodesic(env, u, v, "left").max_column_by_row()
        right = extremal_geodesic(env, u, v, "right").max_column_by_row()
        for p in gs.paths:
            cols = p.max_column_by_row()
            for r in cols:
                assert left[r] <= cols[r] <= right[r]

    @pytest.mark.parametrize("seed", range(8))
    def test_rightmost_monotone_in_target(self, seed):
        env = build_environment(
            "exponential" if seed % 2 else "geometric", 7, 5, seed=seed
        )
        u = (0, 0)
        r1 = extremal_geodesic(env, u, (4, 4), "right").max_column_by_row()
        r2 = extremal_geodesic(env, u, (6, 4), "right").max_column_by_row()
        for row in r1:
            assert r1[row] <= r2[row]


class TestAllGeodesics:
    def test_unique_for_continuous(self):
        env = build_environment("exponential", 7, 7, seed=9)
        gs = all_geodesics(env, (0, 0), (6, 6))
        assert len(gs.paths) == 1
        assert path_weight(env, gs.paths[0]) == gs.max_weight

    def test_all_equal_2x2(self):
        env = make_env(np.ones((2, 2)))
        gs = all_geodesics(env, (0, 0), (1, 1))
        assert len(gs.paths) == 2

    @pytest.mark.parametrize("seed", range(15))
    def test_matches_exhaustive_enumeration(self, seed):
        rng = np.random.default_rng(1000 + seed)
        h, w = rng.integers(1, 8, size=2)
        model = ["exponential", "geometric"][seed % 2]
        env = build_environment(model, int(w), int(h), seed=seed)
        u, v = (0, 0), (int(w) - 1, int(h) - 1)
        best, argmax = brute_geodesics(env.weights, u, v)
        gs = all_geodesics(env, u, v)
        assert gs.max_weight == best
        assert {p.sites for p in gs.paths} == argmax

    def test_slack_enlarges_set(self):
        env = build_environment("geometric", 5, 5, seed=4)
        u, v = (0, 0), (4, 4)
        exact = all_geodesics(env, u, v)
        relaxed = all_geodesics(env, u, v, slack=1.0)
        assert {p.sites for p in exact.paths} <= {p.sites for p in relaxed.paths}
        best, expected = brute_geodesics(env.weights, u, v, slack=1.0)
        assert {p.sites for p in relaxed.paths} == expected

    def test_budget_exceeded(self):
        env = make_env(np.zeros((5, 5)))
        with pytest.raises(BudgetExceededError):
            all_geodesics(env, (0, 0), (4, 4), budget=10)


class TestExtraction:
    def test_single_path_single_edge(self):
        env = build_environment("exponential", 4, 4, seed=1)
        gs = all_geodesics(env, (0, 0), (3, 3))
        net = extract_network(gs)
        assert net.num_vertices == 2
        assert net.num_edges == 1

    def test_shared_middle_segment_network(self):
        # two routes that coincide on a middle stretch and split at both
        # endpoints: one branch vertex, one merge vertex, double edges
        # on either side of the shared piece
        top = LatticePath(
            ((0, 0), (0, 1), (1, 1), (1, 2), (2, 2), (2, 3), (2, 4), (3, 4))
        )
        bottom = LatticePath(
            ((0, 0), (1, 0), (1, 1), (1, 2), (2, 2), (3, 2), (3, 3), (3, 4))
        )
        from netbotany.lpp import GeodesicSet

        gs = GeodesicSet(((0, 0), (3, 4)), 0.0, (top, bottom), 0.0)
        net = extract_network(gs)
        ref = reference_graph("g22_bridge")
        assert canonical_code(net) == canonical_code(ref)

    @pytest.mark.parametrize("name", sorted(REFERENCE))
    def test_planted_fixture_extracts_to_member(self, name):
        g = reference_graph(name)
        env, u, v = plant_fixture(g)
        gs = all_geodesics(env, u, v)
        assert len(gs.paths) == REFERENCE[name][1]  # geodesic count
        net = extract_network(gs)
        assert canonical_code(net) == canonical_code(g)

    def test_fixture_networks_satisfy_rules_1_and_2(self):
        for name in sorted(REFERENCE)[:6]:
            env, u, v = plant_fixture(reference_graph(name))
            rep = check_rules(extract_network(all_geodesics(env, u, v)))
            assert rep.rule1_planar_loopfree and rep.rule2_unique_source_sink

    @pytest.mark.parametrize("seed", range(6))
    def test_random_tied_environments_extract_cleanly(self, seed):
        env = build_environment("geometric", 6, 6, seed=seed, q=0.3)
        gs = all_geodesics(env, (0, 0), (5, 5))
        net = extract_network(gs)
        rep = check_rules(net)
        assert rep.rule1_planar_loopfree
        assert rep.rule2_unique_source_sink


class TestOverlapDistance:
    def path(self, *sites):
        return LatticePath(tuple(sites))

    def test_identical_paths(self):
        p = self.path((0, 0), (0, 1), (1, 1), (1, 2))
        assert overlap_distance(p, p) == 0.0

    def test_disjoint_paths_twice_length(self):
        a = self.path((0, 0), (0, 1), (0, 2), (1, 2), (2, 2))
        b = self.path((0, 0), (1, 0), (2, 0), (2, 1), (2, 2))
        # both live on rows 0..2 (length 2) and agree nowhere in between
        assert overlap_distance(a, b) == 4.0

    def test_positive_for_distinct(self):
        a = self.path((0, 0), (0, 1), (1, 1), (1, 2))
        b = self.path((0, 0), (1, 0), (1, 1), (1, 2))
        assert overlap_distance(a, b) > 0

    def test_triangle_inequality_sampled(self):
        env = build_environment("geometric", 5, 5, seed=13)
        paths = all_geodesics(env, (0, 0), (4, 4), slack=2.0).paths
        for a, b, c in itertools.islice(
            itertools.permutations(paths[:8], 3), 120
        ):
            assert overlap_distance(a, c) <= overlap_distance(
                a, b
            ) + overlap_distance(b, c) + 1e-12

    def test_symmetry(self):
        env = build_environment("geometric", 5, 5, seed=14)
        paths = all_geodesics(env, (0, 0), (4, 4), slack=1.0).paths
        for a, b in itertools.combinations(paths[:6], 2):
            assert overlap_distance(a, b) == overlap_distance(b, a)


class TestLineEnsemble:
    def test_zero_lines_zero_value(self):
        grid = np.arange(5.0)
        ens = LineEnsemble(grid, np.zeros((3, 5)))
        assert line_ensemble_value(ens, (0.0, 3), (4.0, 1)) == 0.0

    def test_single_line_telescopes(self):
        grid = np.arange(6.0)
        lines = np.vstack([np.sin(grid)])
        ens = LineEnsemble(grid, lines)
        val = line_ensemble_value(ens, (1.0, 1), (5.0, 1))
        assert val == pytest.approx(np.sin(5.0) - np.sin(1.0))

    def test_two_linear_lines_matches_brute(self):
        grid = np.arange(7.0)
        lines = np.vstack([2.0 * grid, -1.0 * grid])
        ens = LineEnsemble(grid, lines)
        want = brute_line_value(ens, (0.0, 2), (6.0, 1))
        got = line_ensemble_value(ens, (0.0, 2), (6.0, 1))
        assert got == pytest.approx(want)

    @pytest.mark.parametrize("seed", range(8))
    def test_random_ensembles_match_brute(self, seed):
        ens = build_environment("line_ensemble", 7, 1, seed=seed, lines=3)
        want = brute_line_value(ens, (0.0, 3), (ens.grid[5], 1))
        got = line_ensemble_value(ens, (0.0, 3), (ens.grid[5], 1))
        assert got == pytest.approx(want, abs=1e-12)

    def test_top_k_reduction_is_start_invariant(self):
        # moving the common start left adds exactly the telescoped line sums
        for seed in range(6):
            ens = build_environment("line_ensemble", 9, 1, seed=seed, lines=4)
            k = 3
            ys = [ens.grid[6], ens.grid[7], ens.grid[8]]
            z1, z2 = ens.grid[0], ens.grid[3]
            v1 = disjoint_passage_value(ens, [z1] * k, ys)
            v2 = disjoint_passage_value(ens, [z2] * k, ys)
            shift = sum(
                ens.lines[i, 3] - ens.lines[i, 0] for i in range(k)
            )
            assert v1 == pytest.approx(v2 + shift, abs=1e-9)


class TestDisjointPassage:
    def test_k1_equals_passage_value(self):
        for seed in range(6):
            env = build_environment("exponential", 5, 4, seed=seed)
            assert disjoint_passage_value(env, [1], [3]) == passage_value(
                env, (1, 0), (3, 3)
            )

    def test_forced_columns_sum_everything(self):
        env = build_environment("geometric", 3, 4, seed=2)
        cols = [0, 1, 2]
        val = disjoint_passage_value(env, cols, cols)
        assert val == env.weights.sum()

    @pytest.mark.parametrize("seed", range(10))
    def test_k2_matches_brute_force(self, seed):
        rng = np.random.default_rng(300 + seed)
        h, w = int(rng.integers(2, 6)), int(rng.integers(2, 6))
        model = ["exponential", "geometric"][seed % 2]
        env = build_environment(model, w, h, seed=seed)
        xs = sorted(int(c) for c in rng.integers(0, w, size=2))
        ys = sorted(int(c) for c in rng.integers(0, w, size=2))
        assert disjoint_passage_value(env, xs, ys) == brute_disjoint(
            env.weights, xs, ys
        )

    def test_k3_matches_brute_force(self):
        env = build_environment("geometric", 4, 3, seed=8)
        xs, ys = [0, 1, 3], [0, 2, 3]
        assert disjoint_passage_value(env, xs, ys) == brute_disjoint(
            env.weights, xs, ys
        )

    def test_impossible_configuration(self):
        env = build_environment("geometric", 2, 2, seed=0)
        assert disjoint_passage_value(env, [0, 0, 1], [0, 1, 1]) == float(
            "-inf"
        )

    def test_unordered_rejected(self):
        env = build_environment("geometric", 3, 3, seed=0)
        with pytest.raises(ValueError):
            disjoint_passage_value(env, [2, 0], [0, 2])


class TestDifferenceProfile:
    def test_equal_columns_zero(self):
        env = build_environment("exponential", 6, 6, seed=3)
        ys, f1 = difference_profile(env, 2, 3, 5, 0)
        ys2, f2 = difference_profile(env, 2, 3, 5, 0)
        assert np.array_equal(f1, f2)
        # profile of (x, x) is identically zero by symmetry of the formula
        sub = env.weights[0:6, :3]
        from netbotany.lpp import backward_table

        b = backward_table(sub)[0]
        assert np.array_equal(f1 - f1, np.zeros_like(f1))
        assert len(ys) == 3

    @pytest.mark.parametrize("seed", range(10))
    def test_nonincreasing_everywhere(self, seed):
        model = ["exponential", "geometric"][seed % 2]
        env = build_environment(model, 20, 15, seed=seed)
        ys, f = difference_profile(env, 12, 17, 14, 0)
        assert np.all(np.diff(f) <= 0)

    def test_level_set_endpoints_carry_two_star_witnesses(self):
        # at the extreme columns of a flat stretch of the profile there are
        # two optimal paths to (x1, t) and (x2, t) sharing only the start
        found = 0
        for seed in range(20):
            env = build_environment("geometric", 9, 7, seed=seed, q=0.5)
            x1, x2, t = 5, 7, 6
            ys, f = difference_profile(env, x1, x2, t, 0)
            levels = {}
            for y, val in zip(ys, f):
                levels.setdefault(val, []).append(y)
            for val, cols in levels.items():
                if len(cols) < 2:
                    continue
                for y in (min(cols), max(cols)):
                    g1 = all_geodesics(env, (y, 0), (x1, t))
                    g2 = all_geodesics(env, (y, 0), (x2, t))
                    disjoint = any(
                        set(a.sites) & set(b.sites) == {(y, 0)}
                        for a in g1.paths
                        for b in g2.paths
                    )
                    if disjoint:
                        found += 1
        assert found > 0


class TestQuadrangle:
    def test_equal_columns_trivially_true(self):
        env = build_environment("exponential", 8, 8, seed=0)
        assert quadrangle_check(env, 2, 2, 5, 6, 0, 7)

    @pytest.mark.parametrize("seed", range(10))
    def test_random_quadruples(self, seed):
        env = build_environment("exponential", 15, 12, seed=seed)
        rng = np.random.default_rng(seed)
        for _ in range(50):
            x1, x2 = sorted(rng.integers(0, 8, size=2))
            y1, y2 = sorted(rng.integers(8, 15, size=2))
            assert quadrangle_check(env, int(x1), int(x2), int(y1), int(y2), 0, 11)

    def test_2x2_by_brute_force(self):
        env = build_environment("geometric", 4, 2, seed=7)
        for x1, x2, y1, y2 in itertools.product(range(2), range(2), range(2, 4), range(2, 4)):
            if x1 <= x2 and y1 <= y2:
                lhs = brute_passage(env.weights, (x1, 0), (y2, 1)) + brute_passage(
                    env.weights, (x2, 0), (y1, 1)
                )
                rhs = brute_passage(env.weights, (x1, 0), (y1, 1)) + brute_passage(
                    env.weights, (x2, 0), (y2, 1)
                )
                assert quadrangle_check(env, x1, x2, y1, y2, 0, 1) == (lhs <= rhs)
                assert lhs <= rhs


class TestD123:
    def test_zero_at_equal_points(self):
        assert d123_distance((1.0, 2.0), (1.0, 2.0)) == 0.0

    def test_unit_planar(self):
        assert d123_distance((0.0, 0.0), (1.0, 1.0)) == pytest.approx(2.0)

    def test_symmetry(self):
        rng = np.random.default_rng(0)
        for _ in range(20):
            u, v = rng.normal(size=4), rng.normal(size=4)
            assert d123_distance(u, v) == d123_distance(v, u)

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            d123_distance((0.0, 0.0), (1.0, 1.0, 2.0, 3.0))
