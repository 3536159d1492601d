"""Independent brute-force oracles the test suite checks the library against.

Nothing here imports from sparsecover's algorithm internals beyond the
graph container itself; distances are recomputed with Floyd-Warshall,
balls by scanning the matrix, DAG balls by exhaustive path enumeration.
"""

from __future__ import annotations

import itertools
import math

import numpy as np

INF = math.inf


def floyd_warshall(n: int, edges) -> np.ndarray:
    """All-pairs distances by the classic O(n^3) recurrence."""
    d = np.full((n, n), INF)
    np.fill_diagonal(d, 0.0)
    for u, v, w in edges:
        if w < d[u, v]:
            d[u, v] = w
            d[v, u] = w
    for k in range(n):
        d = np.minimum(d, d[:, [k]] + d[[k], :])
    return d


def induced_matrix(n: int, edges, subset) -> np.ndarray:
    """Floyd-Warshall on G[subset]; rows/cols indexed by sorted(subset)."""
    idx = sorted(subset)
    pos = {v: i for i, v in enumerate(idx)}
    sub = [(pos[u], pos[v], w) for u, v, w in edges if u in pos and v in pos]
    return floyd_warshall(len(idx), sub)


def brute_ball(apsp: np.ndarray, center: int, radius: float, tol: float = 0.0) -> set[int]:
    return {v for v in range(apsp.shape[0]) if apsp[center, v] <= radius + tol}


def brute_strong_diameter(n: int, edges, cluster) -> float:
    mat = induced_matrix(n, edges, cluster)
    return float(mat.max()) if mat.size else 0.0

def brute_set_distance(apsp: np.ndarray, v: int, target) -> float:
    target = list(target)
    if not target:
        return INF
    return float(min(apsp[v, u] for u in target))


def dag_ball_by_paths(arcs: dict[int, list[int]], start: int, q: int) -> set[int]:
    """Directed ball via exhaustive enumeration of arc paths of length <= q."""
    return {p[-1] for p in enumerate_paths(arcs, start, q)}


def enumerate_paths(arcs: dict[int, list[int]], start: int, q: int):
    """All directed paths from start using at most q arcs (for ball checks)."""
    paths = [[start]]
    out = [[start]]
    for _ in range(q):
        nxt = []
        for p in paths:
            for y in arcs.get(p[-1], ()):
                nxt.append(p + [y])
        out.extend(nxt)
        paths = nxt
    return out


def is_treewidth_at_most_two(n: int, pairs) -> bool:
    """Reduce by repeatedly removing degree-<=2 vertices (adding the fill
    edge for degree-2).  Succeeds exactly on treewidth <= 2 graphs."""
    adj: dict[int, set[int]] = {v: set() for v in range(n)}
    for u, v in pairs:
        adj[u].add(v)
        adj[v].add(u)
    alive = set(range(n))
    while alive:
        pick = next((v for v in sorted(alive) if len(adj[v]) <= 2), None)
        if pick is None:
            return False
        nbrs = sorted(adj[pick])
        if len(nbrs) == 2:
            a, b = nbrs
            adj[a].add(b)
            adj[b].add(a)
        for u in nbrs:
            adj[u].discard(pick)
        del adj[pick]
        alive.discard(pick)
    return True


def is_planar_by_euler_on_minors(n: int, pairs) -> bool:
    """Cheap necessary check: m <= 3n - 6 for every induced sub-sample.
    Used only as a sanity screen next to the constructive guarantee."""
    m = len(set(tuple(sorted(p)) for p in pairs))
    if n >= 3 and m > 3 * n - 6:
        return False
    return True


def naive_first_disagreement(wx, wy):
    for i, (a, b) in enumerate(zip(wx, wy)):
        if a != b:
            return i + 1, a, b
    return None


def linf(a: np.ndarray, b: np.ndarray) -> float:
    return float(np.max(np.abs(a - b))) if a.size else 0.0


def measured_distortion(coords: np.ndarray, apsp: np.ndarray):
    """(expansion, contraction) over all pairs by direct recomputation."""
    n = coords.shape[0]
    expansion = 0.0
    contraction = 0.0
    for x in range(n):
        for y in range(x + 1, n):
            d = apsp[x, y]
            e = linf(coords[x], coords[y])
            if d > 0:
                if e / d > expansion:
                    expansion = e / d
                if e == 0:
                    contraction = INF
                elif d / e > contraction:
                    contraction = d / e
    return expansion, contraction


def slow_distortion(d: np.ndarray, coords: np.ndarray):
    """Pure-loop distortion scan: (rho, xi, rho_pair, xi_pair).

    Same pair order and same IEEE operations as the library's report,
    so results must match bit for bit.
    """
    n = d.shape[0]
    rho, rho_pair = 0.0, None
    xi, xi_pair = 0.0, None
    for x in range(n):
        for y in range(x + 1, n):
            fd = float(np.abs(coords[x] - coords[y]).max()) if coords.shape[1] else 0.0
            dd = float(d[x, y])
            if dd > 0:
                e = fd / dd
                c = dd / fd if fd > 0 else INF
            else:
                e = INF if fd != 0 else 0.0
                c = 0.0
            if e > rho:
                rho, rho_pair = e, (x, y)
            if c > xi:
                xi, xi_pair = c, (x, y)
    return rho, xi, rho_pair, xi_pair
