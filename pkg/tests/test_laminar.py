"""Laminar ladder construction and verification."""

import math

import pytest

from sparsecover.cover import SparseCover, cover_scheme
from sparsecover.generators import FamilySpec, generate
from sparsecover.graph import WeightedGraph, distance_extremes
from sparsecover.laminar import (
    LaminarError,
    LaminarHierarchy,
    build_ladders,
    scale_of,
    verify_ladders,
)

from oracles import floyd_warshall


def path(n, w=1.0):
    return WeightedGraph(n, [(i, i + 1, w) for i in range(n - 1)])


# ---------------------------------------------------------------------------
# frozen construction


def test_path10_ladders_frozen():
    # at a=6 the scale-6 cover has two-vertex blocks on alternating
    # supernode colors; everything above scale 6 is already one cluster
    g = path(10)
    scheme, beta = cover_scheme(g, r=3, q=1)
    assert beta == 56.0
    ladders = build_ladders(g, scheme, a=6.0, epsilon=0.5, beta=beta)
    assert len(ladders) == 2
    assert sorted(ladders[0].levels) == [-1, 0, 1, 2]
    lvl0 = [sorted(sorted(c) for c in lad.levels[0]) for lad in ladders]
    assert lvl0[0] == [[0, 1], [2], [3], [4, 5], [6], [7], [8, 9]]
    assert lvl0[1] == [[0], [1], [2, 3], [4], [5], [6, 7], [8], [9]]
    for lad in ladders:
        assert lad.levels[1] == [frozenset(range(10))]
        assert lad.levels[2] == [frozenset(range(10))]


def test_path10_ladders_verify():
    g = path(10)
    scheme, beta = cover_scheme(g, r=3, q=1)
    ladders = build_ladders(g, scheme, a=6.0, epsilon=0.5, beta=beta)
    rep = verify_ladders(g, ladders)
    assert rep.passed, rep.lines()
    assert rep.padding_by_level[-1] == 1.0
    assert rep.padding_by_level[1] == math.inf


def test_scale_ladder_values():
    assert scale_of(2.0, 4.0, 0.5, 0) == 2.0
    assert scale_of(2.0, 4.0, 0.5, 1) == 64.0
    assert scale_of(2.0, 4.0, 0.5, -1) == 0.0625


def test_singleton_graph_all_trivial():
    g = WeightedGraph(1, [])

    def scheme(target):
        return SparseCover(
            partitions=[[frozenset({0})]],
            beta=1.0,
            diam=0.0,
            q=1,
            delta_used=1.0,
            gamma=1.0,
        )

    ladders = build_ladders(g, scheme, a=1.0, epsilon=0.5, beta=2.0, tau=1)
    assert len(ladders) == 1
    assert ladders[0].levels == {-1: [frozenset({0})], 0: [frozenset({0})], 1: [frozenset({0})]}
    assert verify_ladders(g, ladders).passed


# ---------------------------------------------------------------------------
# scheme contract enforcement


def test_rejects_bad_parameters():
    g = path(4)
    scheme, beta = cover_scheme(g, r=3, q=1)
    for kwargs in (
        dict(a=1.0, epsilon=0.0, beta=beta),
        dict(a=1.0, epsilon=1.0, beta=beta),
        dict(a=1.0, epsilon=0.5, beta=0.5),
        dict(a=0.0, epsilon=0.5, beta=beta),
        dict(a=1.0, epsilon=0.5, beta=beta, tau=0),
    ):
        with pytest.raises(LaminarError):
            build_ladders(g, scheme, **kwargs)


def test_rejects_oversized_cover_diameter():
    g = path(6)

    def liar(target):
        return SparseCover(
            partitions=[[frozenset(range(6))]],
            beta=1.0,
            diam=2 * target,
            q=1,
            delta_used=1.0,
            gamma=1.0,
        )

    with pytest.raises(LaminarError, match="diameter"):
        build_ladders(g, liar, a=1.0, epsilon=0.5, beta=2.0, tau=1)


def test_rejects_too_many_partitions_for_tau():
    g = path(6)
    scheme, beta = cover_scheme(g, r=3, q=1)
    with pytest.raises(LaminarError, match="ladder count"):
        build_ladders(g, scheme, a=2.0, epsilon=0.5, beta=beta, tau=1)


def test_rejects_empty_cover():
    g = path(4)

    def empty(target):
        return SparseCover(
            partitions=[], beta=1.0, diam=0.0, q=1, delta_used=1.0, gamma=1.0
        )

    with pytest.raises(LaminarError, match="empty"):
        build_ladders(g, empty, a=1.0, epsilon=0.5, beta=2.0, tau=1)


# ---------------------------------------------------------------------------
# family matrix


FAMILY_CASES = [
    ("grid", 5, "unit", 1),
    ("grid", 5, "uniform", 2),
    ("tree", 40, "exponential-spread", 3),
    ("series-parallel", 40, "uniform", 4),
    ("planar-triangulation", 30, "unit", 5),
]


@pytest.mark.parametrize("family,size,mode,seed", FAMILY_CASES)
def test_ladder_family_matrix(family, size, mode, seed):
    g, r, _ = generate(FamilySpec(family=family, size=size, weight_mode=mode, seed=seed))
    dmin, _ = distance_extremes(g)
    scheme, beta = cover_scheme(g, r, q=1)
    ladders = build_ladders(g, scheme, a=dmin, epsilon=0.5, beta=beta)
    rep = verify_ladders(g, ladders)
    assert rep.passed, rep.lines()


def test_ladder_deterministic():
    spec = FamilySpec(family="series-parallel", size=40, weight_mode="uniform", seed=9)
    snaps = []
    for _ in range(2):
        g, r, _ = generate(spec)
        dmin, _ = distance_extremes(g)
        scheme, beta = cover_scheme(g, r, q=1)
        ladders = build_ladders(g, scheme, a=dmin, epsilon=0.5, beta=beta)
        snaps.append([sorted(lad.levels.items()) for lad in ladders])
    assert snaps[0] == snaps[1]


def test_refinement_cluster_count_monotone():
    g, r, _ = generate(FamilySpec(family="grid", size=5, weight_mode="uniform", seed=6))
    dmin, _ = distance_extremes(g)
    scheme, beta = cover_scheme(g, r, q=1)
    for lad in build_ladders(g, scheme, a=dmin, epsilon=0.5, beta=beta):
        counts = [len(lad.levels[i]) for i in sorted(lad.levels)]
        assert counts[0] == g.n
        assert counts[-1] == 1
        assert all(x >= y for x, y in zip(counts, counts[1:]))


def test_weak_diameter_oracle():
    # re-measure level diameters against the O(n^3) distance oracle
    g, r, _ = generate(FamilySpec(family="tree", size=30, weight_mode="uniform", seed=8))
    dmin, _ = distance_extremes(g)
    scheme, beta = cover_scheme(g, r, q=1)
    ladders = build_ladders(g, scheme, a=dmin, epsilon=0.5, beta=beta)
    dist = floyd_warshall(g.n, g.edges)
    for lad in ladders:
        for i, clusters in lad.levels.items():
            limit = (1 + lad.epsilon) * scale_of(lad.a, lad.beta, lad.epsilon, i)
            for cl in clusters:
                for u in cl:
                    for v in cl:
                        assert dist[u][v] <= limit + 1e-9


# ---------------------------------------------------------------------------
# the verifier must catch broken ladders


def hand_ladder(levels, a=10.0, epsilon=0.5, beta=1.0):
    return [LaminarHierarchy(j=1, levels=levels, a=a, epsilon=epsilon, beta=beta)]


def test_verify_catches_refinement_break():
    g = path(4)
    ladders = hand_ladder(
        {
            -1: [frozenset({v}) for v in range(4)],
            0: [frozenset({0, 1}), frozenset({2, 3})],
            1: [frozenset({0, 2}), frozenset({1, 3})],
            2: [frozenset(range(4))],
        }
    )
    rep = verify_ladders(g, ladders)
    ok, detail = rep.checks["refinement"]
    assert not ok
    assert "straddles" in detail


def test_verify_catches_fat_cluster():
    g = path(8)
    ladders = hand_ladder(
        {
            -1: [frozenset({v}) for v in range(8)],
            0: [frozenset(range(8))],
        },
        a=1.0,
        epsilon=0.5,
        beta=1.0,
    )
    rep = verify_ladders(g, ladders)
    ok, detail = rep.checks["diameter"]
    assert not ok
    assert "exceeds" in detail


def test_verify_catches_missing_padding():
    g = path(4)
    ladders = hand_ladder(
        {
            -1: [frozenset({v}) for v in range(4)],
            0: [frozenset({0, 1}), frozenset({2, 3})],
            1: [frozenset(range(4))],
        },
        a=8.0,
        epsilon=0.5,
        beta=1.0,
    )
    rep = verify_ladders(g, ladders)
    ok, detail = rep.checks["padding"]
    assert not ok
    assert "level 0" in detail


def test_verify_catches_broken_structure():
    g = path(4)
    ladders = hand_ladder(
        {
            -1: [frozenset({v}) for v in range(4)],
            0: [frozenset({0, 1}), frozenset({1, 2, 3})],  # overlap at 1
            1: [frozenset(range(4))],
        }
    )
    rep = verify_ladders(g, ladders)
    assert not rep.passed
    assert not rep.checks["structure"][0]
    assert "not a partition" in rep.checks["structure"][1]
