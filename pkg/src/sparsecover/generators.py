"""Deterministic generators for minor-free test families.

Four families, each tagged with the smallest r for which it is
guaranteed K_r-minor-free:

  grid                  planar, r = 5      (size k -> k*k vertices)
  tree                  K_3-minor-free, r = 3
  series-parallel       K_4-minor-free, r = 4  (treewidth <= 2)
  planar-triangulation  planar, r = 5      (stacked triangulations)

Weight modes: "unit", "uniform" (uniform floats in [lo, hi]), and
"exponential-spread" (2**U with U uniform in [0, 20], for aspect-ratio
stress).  All randomness flows through one random.Random(seed), so the
same spec yields byte-identical JSON.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field

from .graph import GraphError, WeightedGraph

FAMILIES = ("grid", "tree", "series-parallel", "planar-triangulation")
WEIGHT_MODES = ("unit", "uniform", "exponential-spread")

MINOR_FREE_R = {
    "grid": 5,
    "tree": 3,
    "series-parallel": 4,
    "planar-triangulation": 5,
}


@dataclass
class FamilySpec:
    family: str
    size: int
    weight_mode: str = "unit"
    lo: float = 1.0
    hi: float = 2.0
    seed: int = 0

    def validate(self) -> None:
        if self.family not in FAMILIES:
            raise GraphError(f"unknown family {self.family!r}; choose from {FAMILIES}")
        if self.weight_mode not in WEIGHT_MODES:
            raise GraphError(f"unknown weight mode {self.weight_mode!r}")
        if self.size < 1:
            raise GraphError("size must be a positive integer")
        if self.weight_mode == "uniform" and not (0 < self.lo <= self.hi):
            raise GraphError("uniform weights need 0 < lo <= hi")


def _grid_edges(k: int) -> list[tuple[int, int]]:
    edges = []
    for i in range(k):
        for j in range(k):
            v = i * k + j
            if j + 1 < k:
                edges.append((v, v + 1))
            if i + 1 < k:
                edges.append((v, v + k))
    return edges


def _tree_edges(n: int, rng: random.Random) -> list[tuple[int, int]]:
    # each vertex attaches to a uniformly random earlier vertex
    return [(rng.randrange(v), v) for v in range(1, n)]


def _series_parallel_edges(n: int, rng: random.Random) -> tuple[list[tuple[int, int]], list[str]]:
    """Two-terminal series-parallel graph on exactly n vertices.

    Start from the path 0-2-1 (terminals 0 and 1).  Each step picks a
    random existing edge (u, v) and either subdivides it (series) or
    adds a disjoint two-edge path u-x-v (parallel with a fresh midpoint,
    which keeps the graph simple).  Both operations preserve
    two-terminal series-parallelness and add exactly one vertex.
    Returns the edge list and the construction trace.
    """
    if n == 1:
        return [], ["vertex"]
    if n == 2:
        return [(0, 1)], ["edge(0,1)"]
    edges = [(0, 2), (2, 1)]
    trace = ["path(0,2,1)"]
    nxt = 3
    while nxt < n:
        u, v = edges[rng.randrange(len(edges))]
        if rng.random() < 0.5:
            edges.remove((u, v))
            edges.append((u, nxt))
            edges.append((nxt, v))
            trace.append(f"series({u},{v};{nxt})")
        else:
            edges.append((u, nxt))
            edges.append((nxt, v))
            trace.append(f"parallel({u},{v};{nxt})")
        nxt += 1
    return edges, trace


def _triangulation_edges(n: int, rng: random.Random) -> list[tuple[int, int]]:
    """Stacked planar triangulation: repeatedly insert a vertex into a
    uniformly chosen triangular face and join it to the face's corners."""
    if n == 1:
        return []
    if n == 2:
        return [(0, 1)]
    edges = [(0, 1), (0, 2), (1, 2)]
    faces = [(0, 1, 2)]
    for v in range(3, n):
        idx = rng.randrange(len(faces))
        a, b, c = faces.pop(idx)
        edges.extend([(a, v), (b, v), (c, v)])
        faces.extend([(a, b, v), (a, c, v), (b, c, v)])
    return edges


def _weights(spec: FamilySpec, m: int, rng: random.Random) -> list[float]:
    if spec.weight_mode == "unit":
        return [1.0] * m
    if spec.weight_mode == "uniform":
        return [rng.uniform(spec.lo, spec.hi) for _ in range(m)]
    # exponential-spread: 2**U, U uniform in [0, 20]
    return [2.0 ** rng.uniform(0.0, 20.0) for _ in range(m)]


def generate(spec: FamilySpec) -> tuple[WeightedGraph, int, dict]:
    """Build the requested instance.

    Returns (graph, r, meta) where r is the family's K_r-minor-free
    parameter and meta carries provenance (the series-parallel trace in
    particular).
    """
    spec.validate()
    rng = random.Random(spec.seed)
    meta: dict = {"family": spec.family, "size": spec.size, "seed": spec.seed,
                  "weight_mode": spec.weight_mode}
    if spec.family == "grid":
        pairs = _grid_edges(spec.size)
    elif spec.family == "tree":
        pairs = _tree_edges(spec.size, rng)
    elif spec.family == "series-parallel":
        pairs, trace = _series_parallel_edges(spec.size, rng)
        meta["trace"] = trace
    else:
        pairs = _triangulation_edges(spec.size, rng)
    ws = _weights(spec, len(pairs), rng)
    n = spec.size * spec.size if spec.family == "grid" else spec.size
    g = WeightedGraph(n, [(u, v, w) for (u, v), w in zip(pairs, ws)])
    return g, MINOR_FREE_R[spec.family], meta
