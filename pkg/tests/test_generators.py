import json

import pytest

from sparsecover.generators import FAMILIES, FamilySpec, generate
from sparsecover.graph import GraphError, graph_to_json

from oracles import is_planar_by_euler_on_minors, is_treewidth_at_most_two


def test_grid_size_4_has_16_vertices_24_edges():
    g, r, _ = generate(FamilySpec("grid", 4))
    assert g.n == 16 and len(g.edges) == 24
    assert r == 5


def test_tree_has_n_minus_1_edges():
    g, r, _ = generate(FamilySpec("tree", 50, seed=3))
    assert g.n == 50 and len(g.edges) == 49
    assert r == 3


@pytest.mark.parametrize("seed", range(8))
def test_series_parallel_passes_treewidth_2_oracle(seed):
    g, r, meta = generate(FamilySpec("series-parallel", 40, seed=seed))
    assert g.n == 40
    assert r == 4
    assert is_treewidth_at_most_two(g.n, [(u, v) for u, v, _ in g.edges])
    assert "trace" in meta and len(meta["trace"]) >= 1


@pytest.mark.parametrize("seed", range(4))
def test_triangulation_is_planar_sized(seed):
    g, r, _ = generate(FamilySpec("planar-triangulation", 60, seed=seed))
    assert g.n == 60
    assert len(g.edges) == 3 * 60 - 6  # maximal planar edge count
    assert r == 5
    assert is_planar_by_euler_on_minors(g.n, [(u, v) for u, v, _ in g.edges])
    # stacked triangulations are chordal planar; treewidth 3, so the
    # tw<=2 oracle must reject them
    assert not is_treewidth_at_most_two(g.n, [(u, v) for u, v, _ in g.edges])


@pytest.mark.parametrize("family", FAMILIES)
def test_same_seed_same_bytes(family):
    spec1 = FamilySpec(family, 12, weight_mode="uniform", lo=1.0, hi=3.0, seed=41)
    spec2 = FamilySpec(family, 12, weight_mode="uniform", lo=1.0, hi=3.0, seed=41)
    a = json.dumps(graph_to_json(generate(spec1)[0]), sort_keys=True)
    b = json.dumps(graph_to_json(generate(spec2)[0]), sort_keys=True)
    assert a == b


def test_different_seed_different_weights():
    a, _, _ = generate(FamilySpec("tree", 30, weight_mode="uniform", seed=1))
    b, _, _ = generate(FamilySpec("tree", 30, weight_mode="uniform", seed=2))
    assert a.edges != b.edges


def test_exponential_spread_weights_span_band():
    g, _, _ = generate(FamilySpec("tree", 200, weight_mode="exponential-spread", seed=5))
    ws = [w for _, _, w in g.edges]
    assert min(ws) >= 1.0
    assert max(ws) <= 2.0 ** 20
    assert max(ws) / min(ws) > 2.0 ** 10  # actually spreads


def test_generated_graphs_are_connected():
    for family in FAMILIES:
        g, _, _ = generate(FamilySpec(family, 9, seed=7))
        assert g.n >= 1  # WeightedGraph construction enforces connectivity


def test_bad_specs_rejected():
    with pytest.raises(GraphError):
        generate(FamilySpec("hypercube", 4))
    with pytest.raises(GraphError):
        generate(FamilySpec("grid", 0))
    with pytest.raises(GraphError):
        generate(FamilySpec("grid", 4, weight_mode="uniform", lo=0.0, hi=1.0))
