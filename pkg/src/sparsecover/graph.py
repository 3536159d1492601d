"""Weighted graphs and exact metric queries.

Everything downstream (decompositions, covers, embeddings) consumes the
shortest-path metric of a connected undirected graph with non-negative
edge weights.  This module is the only place distances are computed, so
the conventions live here:

  * Vertices are integers 0..n-1.  Edges are (u, v, w) with u != v and
    w >= 0; zero-weight edges are legal and kept (they matter for the
    truncation scheme used by aspect-ratio removal).
  * Queries restricted to a vertex subset S operate on the induced
    subgraph G[S]; unreachable targets have distance +inf.
  * All threshold comparisons downstream use ``tolerance(g)``, an
    absolute slack of 1e-9 scaled by the largest edge weight.

Dijkstra is used throughout (weights are non-negative).  At the sizes
this toolkit targets (hundreds of vertices) repeated single-source runs
beat anything fancier, and they are exact.
"""

from __future__ import annotations

import heapq
import json
import math
from dataclasses import dataclass, field

import numpy as np

INF = math.inf


class GraphError(ValueError):
    """Raised for malformed or disconnected input graphs."""


class WeightedGraph:
    """Connected undirected graph with non-negative edge weights.

    Treated as immutable after construction; the adjacency list is built
    once.  Use ``load_graph``/``graph_to_json`` for the JSON form.
    """

    __slots__ = ("n", "edges", "_adj", "_maxw")

    def __init__(self, n: int, edges, check: bool = True):
        self.n = int(n)
        self.edges = tuple((int(u), int(v), float(w)) for u, v, w in edges)
        if check:
            self._validate()
        adj: list[list[tuple[int, float]]] = [[] for _ in range(self.n)]
        for u, v, w in self.edges:
            adj[u].append((v, w))
            adj[v].append((u, w))
        self._adj = adj
        self._maxw = max((w for _, _, w in self.edges), default=0.0)

    def _validate(self) -> None:
        if self.n <= 0:
            raise GraphError("graph needs at least one vertex")
        seen = set()
        for u, v, w in self.edges:
            if not (0 <= u < self.n and 0 <= v < self.n):
                raise GraphError(f"edge ({u},{v}) out of range for n={self.n}")
            if u == v:
                raise GraphError(f"self-loop at vertex {u}")
            if w < 0:
                raise GraphError(f"negative weight on edge ({u},{v})")
            key = (min(u, v), max(u, v))
            if key in seen:
                raise GraphError(f"duplicate edge ({u},{v})")
            seen.add(key)
        comps = connected_components(self.n, self.edges)
        if len(comps) > 1:
            listing = "; ".join(
                "{" + ",".join(map(str, sorted(c)[:8])) + (",..." if len(c) > 8 else "") + "}"
                for c in comps
            )
            raise GraphError(f"graph is disconnected: {len(comps)} components: {listing}")

    def adj(self, v: int) -> list[tuple[int, float]]:
        return self._adj[v]

    @property
    def max_weight(self) -> float:
        return self._maxw

    def __repr__(self) -> str:  # pragma: no cover
        return f"WeightedGraph(n={self.n}, m={len(self.edges)})"


@dataclass
class DistanceField:
    """Single-source distances; dist[v] = +inf when v is unreachable."""

    source: int
    dist: np.ndarray


def tolerance(g: WeightedGraph) -> float:
    """Absolute distance tolerance for this instance: 1e-9 * max weight."""
    return 1e-9 * (g.max_weight if g.max_weight > 0 else 1.0)


def connected_components(n: int, edges) -> list[set[int]]:
    adj: list[list[int]] = [[] for _ in range(n)]
    for u, v, *_ in edges:
        adj[u].append(v)
        adj[v].append(u)
    seen = [False] * n
    comps = []
    for s in range(n):
        if seen[s]:
            continue
        comp = {s}
        seen[s] = True
        stack = [s]
        while stack:
            x = stack.pop()
            for y in adj[x]:
                if not seen[y]:
                    seen[y] = True
                    comp.add(y)
                    stack.append(y)
        comps.append(comp)
    return comps


def _dijkstra(g: WeightedGraph, sources, restrict=None) -> tuple[np.ndarray, np.ndarray]:
    """Multi-source Dijkstra, optionally inside G[restrict].

    Returns (dist, parent); parent[v] = -1 for sources and unreached
    vertices.  Deterministic: the heap breaks ties on vertex id and a
    parent is only replaced on strict improvement.
    """
    # plain lists in the loop: numpy scalar indexing would dominate at
    # the small sizes this is called with, thousands of times per build
    dist = [INF] * g.n
    parent = [-1] * g.n
    inside = None if restrict is None else (
        restrict if isinstance(restrict, (set, frozenset)) else frozenset(restrict)
    )
    heap = []
    for s in sorted(set(int(x) for x in sources)):
        if inside is not None and s not in inside:
            continue
        dist[s] = 0.0
        heap.append((0.0, s))
    heapq.heapify(heap)
    done = [False] * g.n
    while heap:
        d, x = heapq.heappop(heap)
        if done[x]:
            continue
        done[x] = True
        for y, w in g.adj(x):
            if inside is not None and y not in inside:
                continue
            nd = d + w
            if nd < dist[y]:
                dist[y] = nd
                parent[y] = x
                heapq.heappush(heap, (nd, y))
    return np.asarray(dist), np.asarray(parent, dtype=np.int64)


def sssp(g: WeightedGraph, source: int, restrict=None) -> DistanceField:
    """Exact single-source distances from ``source`` (inside G[restrict])."""
    dist, _ = _dijkstra(g, [source], restrict)
    return DistanceField(source=source, dist=dist)


def ball(g: WeightedGraph, center: int, radius: float, restrict=None) -> set[int]:
    """Closed ball B(center, radius) in G[restrict], with tolerance slack."""
    dist, _ = _dijkstra(g, [center], restrict)
    tol = tolerance(g)
    return {v for v in range(g.n) if dist[v] <= radius + tol}


def set_ball(g: WeightedGraph, sources, radius: float, restrict=None) -> set[int]:
    """Closed ball around a vertex set, B(S, radius) in G[restrict]."""
    dist, _ = _dijkstra(g, sources, restrict)
    tol = tolerance(g)
    return {v for v in range(g.n) if dist[v] <= radius + tol}


def set_distance(g: WeightedGraph, v: int, target, restrict=None) -> float:
    """min over u in target of d(v, u) inside G[restrict]; +inf if empty."""
    target = set(target)
    if not target:
        return INF
    dist, _ = _dijkstra(g, target, restrict)
    return float(dist[v])


def nearest_other_label(g: WeightedGraph, labels) -> np.ndarray:
    """For every vertex, the distance to the nearest vertex whose label
    differs from its own.

    One two-label Dijkstra over the whole graph: each vertex settles at
    most two (label, distance) pairs with distinct labels, so it learns
    its own label at distance 0 and the closest foreign one.  Costs one
    Dijkstra pass instead of one per label class.
    """
    labels = list(labels)
    if len(labels) != g.n:
        raise GraphError(f"need {g.n} labels, got {len(labels)}")
    first_label: list = [None] * g.n
    first_dist = np.full(g.n, INF)
    second_dist = np.full(g.n, INF)
    settled = [0] * g.n
    best: dict[tuple[int, object], float] = {}
    heap = []
    for v in range(g.n):
        best[(v, labels[v])] = 0.0
        heap.append((0.0, v, labels[v]))
    heapq.heapify(heap)
    while heap:
        d, x, lab = heapq.heappop(heap)
        if settled[x] >= 2 or (settled[x] == 1 and lab == first_label[x]):
            continue
        if settled[x] == 0:
            first_label[x] = lab
            first_dist[x] = d
        else:
            second_dist[x] = d
        settled[x] += 1
        for y, w in g.adj(x):
            if settled[y] >= 2 or (settled[y] == 1 and lab == first_label[y]):
                continue
            nd = d + w
            key = (y, lab)
            if nd < best.get(key, INF):
                best[key] = nd
                heapq.heappush(heap, (nd, y, lab))
    out = np.empty(g.n)
    for v in range(g.n):
        out[v] = second_dist[v] if first_label[v] == labels[v] else first_dist[v]
    return out


def zero_classes(g: WeightedGraph) -> list[int]:
    """Label of the zero-distance class of each vertex.

    Two vertices are at distance zero iff a path of zero-weight edges
    joins them; the label is the smallest vertex id in the class.  On a
    graph with positive weights this is the identity labelling.
    """
    label = list(range(g.n))
    adj0: dict[int, list[int]] = {}
    for u, v, w in g.edges:
        if w == 0.0:
            adj0.setdefault(u, []).append(v)
            adj0.setdefault(v, []).append(u)
    for start in range(g.n):
        if label[start] != start or start not in adj0:
            continue
        stack = [start]
        while stack:
            x = stack.pop()
            for y in adj0.get(x, ()):
                if label[y] > start:
                    label[y] = start
                    stack.append(y)
    return label


def strong_diameter(g: WeightedGraph, cluster) -> float:
    """max pairwise distance inside G[cluster]; +inf when disconnected."""
    cl = sorted(set(cluster))
    if len(cl) <= 1:
        return 0.0
    sub = frozenset(cl)
    worst = 0.0
    for v in cl:
        dist, _ = _dijkstra(g, [v], sub)
        worst = max(worst, max(float(dist[u]) for u in cl))
        if worst == INF:
            return INF
    return worst


def all_pairs(g: WeightedGraph) -> np.ndarray:
    """Full distance matrix via repeated Dijkstra (exact)."""
    mat = np.full((g.n, g.n), INF)
    for v in range(g.n):
        dist, _ = _dijkstra(g, [v])
        mat[v] = dist
    return mat


def weak_diameter(g: WeightedGraph, cluster, apsp: np.ndarray | None = None) -> float:
    """max pairwise distance of cluster measured in the whole graph."""
    cl = sorted(set(cluster))
    if len(cl) <= 1:
        return 0.0
    if apsp is not None:
        sub = apsp[np.ix_(cl, cl)]
        return float(sub.max())
    worst = 0.0
    for v in cl:
        dist, _ = _dijkstra(g, [v])
        worst = max(worst, max(float(dist[u]) for u in cl))
    return worst


def distance_extremes(g: WeightedGraph) -> tuple[float, float]:
    """(min positive pairwise distance, max pairwise distance)."""
    dmin, dmax = INF, 0.0
    for v in range(g.n):
        dist, _ = _dijkstra(g, [v])
        dmax = max(dmax, float(dist.max()))
        pos = dist[(dist > 0) & np.isfinite(dist)]
        if pos.size:
            dmin = min(dmin, float(pos.min()))
    return dmin, dmax


def aspect_ratio(g: WeightedGraph) -> float:
    """max pairwise distance / min positive pairwise distance."""
    dmin, dmax = distance_extremes(g)
    if dmax == 0.0:
        return 1.0
    if dmin == INF:
        return INF
    return dmax / dmin


def truncate_weights(g: WeightedGraph, alpha: float, s: float) -> WeightedGraph:
    """Clamp the metric to the scale band around alpha.

    Per-edge map: weights >= alpha become alpha, weights <= alpha/s^2
    become 0, the band in between is kept.  Distances never increase.
    """
    lo = alpha / (s * s)
    edges = []
    for u, v, w in g.edges:
        if w >= alpha:
            nw = alpha
        elif w <= lo:
            nw = 0.0
        else:
            nw = w
        edges.append((u, v, nw))
    return WeightedGraph(g.n, edges, check=False)


def subdivide(g: WeightedGraph, pieces: int) -> tuple[WeightedGraph, list[int]]:
    """Replace each edge by a path of ``pieces`` equal-weight edges.

    Original vertices keep their ids; new path vertices are appended in
    edge order.  Returns (new graph, mapping old id -> new id), the
    mapping being the identity by construction.  Original pairwise
    distances are preserved (each edge's pieces sum to its weight).
    """
    if pieces < 1:
        raise GraphError("pieces must be >= 1")
    if pieces == 1:
        return WeightedGraph(g.n, g.edges, check=False), list(range(g.n))
    edges = []
    nxt = g.n
    for u, v, w in g.edges:
        step = w / pieces
        prev = u
        for _ in range(pieces - 1):
            edges.append((prev, nxt, step))
            prev = nxt
            nxt += 1
        edges.append((prev, v, step))
    return WeightedGraph(nxt, edges, check=False), list(range(g.n))


def load_graph(obj) -> WeightedGraph:
    """Parse the graph JSON form {"n": int, "edges": [[u,v,w], ...]}.

    ``obj`` may be a path, a JSON string, or an already-parsed dict.
    Rejects disconnected input with a diagnostic listing components.
    """
    if isinstance(obj, (str, bytes)):
        text = str(obj)
        if text.lstrip().startswith("{"):
            data = json.loads(text)
        else:
            with open(text, "r", encoding="utf-8") as fh:
                data = json.load(fh)
    else:
        data = obj
    if not isinstance(data, dict) or "n" not in data or "edges" not in data:
        raise GraphError('graph JSON needs keys "n" and "edges"')
    return WeightedGraph(data["n"], data["edges"], check=True)


def graph_to_json(g: WeightedGraph) -> dict:
    return {"n": g.n, "edges": [[u, v, w] for u, v, w in g.edges]}
