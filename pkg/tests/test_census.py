import math

import numpy as np
import pytest

from geodigraph import (
    DensitySpec,
    MotifPattern,
    NormSpec,
    PointSet,
    SectorConfig,
    all_weakly_connected_patterns,
    brute_force_build,
    brute_force_census,
    build_radius_digraph,
    build_sector_digraph,
    canonical_code,
    census,
    count_induced,
    count_isolated,
    enumerate_weakly_connected_subsets,
    feasibility_probe,
    full_census,
    mutual_pair,
    parse_pattern,
    sample_orientations,
    sample_points,
    sample_radii,
    single_arc,
    single_vertex,
)
from geodigraph.census import PatternError
from geodigraph.model import RadiusLawSpec

TWO_PI = 2 * math.pi


def _pts(coords):
    return PointSet(coords=np.asarray(coords, dtype=float))


def _line_graph(r=0.6):
    # three collinear points with full disks: 1-2 and 2-3 mutual, 1-3 out of range
    pts = _pts([[0, 0], [0.5, 0], [1.0, 0]])
    return build_sector_digraph(pts, np.zeros(3), SectorConfig(TWO_PI, r))


class TestCanonicalCode:
    def test_arc_direction_irrelevant(self):
        a = MotifPattern(2, frozenset({(0, 1)}))
        b = MotifPattern(2, frozenset({(1, 0)}))
        assert canonical_code(a) == canonical_code(b)

    def test_mutual_vs_single(self):
        assert canonical_code(mutual_pair()) != canonical_code(single_arc())

    def test_cycle_reversal(self):
        cyc = MotifPattern(3, frozenset({(0, 1), (1, 2), (2, 0)}))
        rev = MotifPattern(3, frozenset({(1, 0), (2, 1), (0, 2)}))
        assert canonical_code(cyc) == canonical_code(rev)

    def test_exhaustive_relabeling_invariance(self):
        import itertools

        for pattern in all_weakly_connected_patterns(3):
            for p in itertools.permutations(range(3)):
                relabeled = MotifPattern(
                    3, frozenset((p[a], p[b]) for a, b in pattern.arcs)
                )
                assert canonical_code(relabeled) == canonical_code(pattern)

    def test_rejects_self_loop(self):
        with pytest.raises(PatternError):
            MotifPattern(2, frozenset({(0, 0)}))

    def test_rejects_disconnected(self):
        with pytest.raises(PatternError):
            MotifPattern(3, frozenset({(0, 1)}))


class TestParsePattern:
    def test_mutual(self):
        assert parse_pattern("k=2; arcs=0>1,1>0") == mutual_pair()

    def test_single_vertex(self):
        assert parse_pattern("k=1") == single_vertex()

    def test_path(self):
        p = parse_pattern("k=3; arcs=0>1,1>0,1>2")
        assert p.k == 3 and (1, 2) in p.arcs

    def test_bad_literals(self):
        for lit in ("arcs=0>1", "k=two", "k=2; arcs=0-1", "k=2; arcs=0>1; junk=3"):
            with pytest.raises(PatternError):
                parse_pattern(lit)


class TestPatternEnumeration:
    def test_counts_per_order(self):
        assert len(all_weakly_connected_patterns(1)) == 1
        assert len(all_weakly_connected_patterns(2)) == 2
        # weakly connected digraphs on 3 nodes up to isomorphism
        assert len(all_weakly_connected_patterns(3)) == 13


class TestSubsetEnumeration:
    def test_path_k3(self):
        g = _line_graph()
        assert list(enumerate_weakly_connected_subsets(g, 3)) == [(0, 1, 2)]

    def test_path_k2(self):
        g = _line_graph()
        assert sorted(enumerate_weakly_connected_subsets(g, 2)) == [(0, 1), (1, 2)]

    def test_empty_graph(self):
        pts = _pts([[0, 0], [5, 5]])
        g = build_sector_digraph(pts, np.zeros(2), SectorConfig(TWO_PI, 1.0))
        assert list(enumerate_weakly_connected_subsets(g, 2)) == []

    def test_each_connected_subset_once(self):
        import itertools

        pts = sample_points(DensitySpec("uniform-square"), 18, seed=3)
        ys = sample_orientations(18, seed=4)
        g = build_sector_digraph(pts, ys, SectorConfig(4.0, 0.4))
        und = [set(a.tolist()) for a in g.undirected_adjacency()]

        def connected(subset):
            seen = {subset[0]}
            stack = [subset[0]]
            s = set(subset)
            while stack:
                for u in und[stack.pop()] & s:
                    if u not in seen:
                        seen.add(u)
                        stack.append(u)
            return len(seen) == len(subset)

        for k in (2, 3, 4):
            got = sorted(enumerate_weakly_connected_subsets(g, k))
            expected = sorted(
                s for s in itertools.combinations(range(18), k) if connected(s)
            )
            assert got == expected


class TestCounts:
    def test_line_graph_mutual_pairs(self):
        g = _line_graph()
        assert count_induced(g, mutual_pair()) == 2

    def test_line_graph_path_pattern(self):
        g = _line_graph()
        path = MotifPattern(3, frozenset({(0, 1), (1, 0), (1, 2), (2, 1)}))
        assert count_induced(g, path) == 1

    def test_line_graph_no_triangle(self):
        g = _line_graph()
        tri = MotifPattern(
            3, frozenset({(0, 1), (1, 0), (1, 2), (2, 1), (0, 2), (2, 0)})
        )
        assert count_induced(g, tri) == 0

    def test_line_graph_isolated_mutual(self):
        # the middle vertex always has an out-arc leaving either candidate pair
        g = _line_graph()
        assert count_isolated(g, mutual_pair()) == 0

    def test_isolated_pair_with_far_vertex(self):
        pts = _pts([[0, 0], [0.5, 0], [10, 10]])
        g = build_sector_digraph(pts, np.zeros(3), SectorConfig(TWO_PI, 0.6))
        assert count_isolated(g, mutual_pair()) == 1

    def test_single_vertex_trivial(self):
        pts = _pts([[0.3, 0.3]])
        g = build_sector_digraph(pts, np.zeros(1), SectorConfig(TWO_PI, 0.5))
        assert count_isolated(g, single_vertex()) == 1

    def test_incoming_arcs_do_not_break_isolation(self):
        # third vertex covers both with a huge radius; pair stays isolated
        pts = _pts([[0, 0], [0.3, 0], [2, 0]])
        g = build_radius_digraph(pts, np.array([0.5, 0.5, 10.0]), NormSpec("L2"))
        assert g.has_arc(2, 0) and g.has_arc(2, 1)
        assert count_isolated(g, mutual_pair()) == 1

    def test_complete_mutual_4(self):
        coords = [[0, 0], [0.1, 0], [0, 0.1], [0.1, 0.1]]
        g = build_sector_digraph(_pts(coords), np.zeros(4), SectorConfig(TWO_PI, 1.0))
        r = census(g, mutual_pair())
        assert r.induced_count == 6 and r.isolated_count == 0

    def test_empty_digraph_singletons(self):
        pts = sample_points(DensitySpec("uniform-square", scale=100.0), 5, seed=1)
        g = build_sector_digraph(pts, np.zeros(5), SectorConfig(TWO_PI, 1e-6))
        r = brute_force_census(g, single_vertex())
        assert r.induced_count == 5 and r.isolated_count == 5


class TestOracleEquality:
    # full 100-seed suite lives in the acceptance module
    def test_fast_equals_brute_force(self):
        patterns = [p for k in (1, 2, 3) for p in all_weakly_connected_patterns(k)]
        for seed in range(15):
            pts = sample_points(DensitySpec("uniform-square"), 20, seed=seed)
            ys = sample_orientations(20, seed=seed + 500)
            g = build_sector_digraph(pts, ys, SectorConfig(4.0, 0.35))
            for pattern in patterns:
                fast = census(g, pattern)
                slow = brute_force_census(g, pattern)
                assert (fast.induced_count, fast.isolated_count) == (
                    slow.induced_count,
                    slow.isolated_count,
                )

    def test_full_census_matches_single_pattern_counts(self):
        pts = sample_points(DensitySpec("uniform-disk"), 22, seed=9)
        radii = sample_radii(RadiusLawSpec("scaled-uniform", 0.7), 22, seed=10)
        g = build_radius_digraph(pts, radii, NormSpec("Linf"))
        tally = full_census(g, 3)
        for pattern in all_weakly_connected_patterns(3):
            r = census(g, pattern)
            got = tally.get(pattern.canonical, (0, 0))
            assert got == (r.induced_count, r.isolated_count)

    def test_relabeling_invariance(self):
        pts = sample_points(DensitySpec("uniform-square"), 25, seed=17)
        ys = sample_orientations(25, seed=18)
        cfg = SectorConfig(3.0, 0.3)
        g = build_sector_digraph(pts, ys, cfg)
        perm = np.random.default_rng(5).permutation(25)
        g2 = brute_force_build(
            PointSet(coords=pts.coords[perm]), ys[perm], cfg
        )
        for pattern in all_weakly_connected_patterns(2):
            assert census(g, pattern).induced_count == census(g2, pattern).induced_count
            assert census(g, pattern).isolated_count == census(g2, pattern).isolated_count

    def test_sum_over_patterns_equals_connected_subsets(self):
        pts = sample_points(DensitySpec("uniform-square"), 24, seed=23)
        ys = sample_orientations(24, seed=24)
        g = build_sector_digraph(pts, ys, SectorConfig(5.0, 0.3))
        for k in (2, 3):
            total = sum(
                census(g, p).induced_count for p in all_weakly_connected_patterns(k)
            )
            assert total == len(list(enumerate_weakly_connected_subsets(g, k)))


class TestIsolationMonotonicity:
    def test_injecting_outgoing_arc_never_increases(self):
        # add an arc from inside a counted subset to outside via a radius bump
        pts = _pts([[0, 0], [0.3, 0], [1.0, 0]])
        g1 = build_radius_digraph(pts, np.array([0.5, 0.5, 0.1]), NormSpec("L2"))
        before = count_isolated(g1, mutual_pair())
        g2 = build_radius_digraph(pts, np.array([0.5, 0.8, 0.1]), NormSpec("L2"))
        after = count_isolated(g2, mutual_pair())
        assert before == 1 and after == 0
        assert after <= before


class TestFeasibilityProbe:
    def test_mutual_full_disk_feasible(self):
        feasible, rate = feasibility_probe(
            mutual_pair(), SectorConfig(TWO_PI, 1.0), trials=5000, seed=1
        )
        assert feasible
        # hit rate = P(|Z| <= 1), Z uniform in disk of radius 2 -> 1/4
        assert abs(rate - 0.25) < 0.03

    def test_single_arc_full_disk_infeasible(self):
        feasible, rate = feasibility_probe(
            single_arc(), SectorConfig(TWO_PI, 1.0), trials=10_000, seed=2
        )
        assert not feasible and rate == 0.0

    def test_single_arc_half_disk_feasible(self):
        feasible, rate = feasibility_probe(
            single_arc(), SectorConfig(math.pi, 1.0), trials=10_000, seed=3
        )
        assert feasible and rate > 0

    def test_radius_model_single_arc_feasible(self):
        feasible, _ = feasibility_probe(single_arc(), NormSpec("L2"), trials=5000, seed=4)
        assert feasible
