"""Sparse partition covers built on buffered cop decompositions.

A (beta, s, diam)-cover is a family of s partitions of the vertex set
into clusters of strong diameter at most diam, such that around every
vertex some cluster of some partition contains the whole ball of radius
diam / beta.

The pipeline, given a decomposition with buffer gamma and width w and a
locality knob q >= 1:

  1. Supernodes are colored so that same-color supernodes are at
     directed distance > 2q - 1 in the supernode DAG; greedy smallest-
     missing-color in creation order needs at most C(w + 2q-1, w)
     colors because each forward ball is that small.
  2. Every supernode eta is enlarged to eta^ = B(eta, q * gamma) inside
     G[dom(eta)].
  3. A net of spacing Delta_used is chosen on the skeleton in its tree
     metric, net points are colored so that same-color points are more
     than 2R apart in G[eta^] (R = 2 * Delta_used + q * gamma), and each
     net color class yields one family of pairwise disjoint clusters:
     the G[eta^]-balls of radius R around its points.
  4. Partition (i, j) collects the j-th family of every color-i
     supernode and completes with singletons.

Delta_used = max(measured radius, gamma) keeps the formulas finite on
degenerate inputs (a decomposition of singleton supernodes has measured
radius 0).  The advertised numbers are

  beta = 4 * (2 * Delta_used / (q * gamma) + 1)
  diam = 2 * (2 * Delta_used + q * gamma)

so the padded radius diam / beta equals q * gamma / 2 exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .bcd import BufferedCopDecomposition, SupernodeDag, build_bcd, build_dag, directed_ball
from .graph import (
    WeightedGraph,
    _dijkstra,
    distance_extremes,
    nearest_other_label,
    strong_diameter,
    tolerance,
    zero_classes,
)


class CoverError(ValueError):
    """Raised when a stated cover bound fails during construction."""


def cover_bounds(w: int, q: int, gamma: float, delta_used: float):
    """(color bound, partition bound, beta, diam) for the given knobs."""
    k_bound = math.comb(w + 2 * q - 1, w)
    s_net_bound = 4 * w * (2 + q * gamma / delta_used)
    beta = 4 * (2 * delta_used / (q * gamma) + 1)
    diam = 2 * (2 * delta_used + q * gamma)
    return k_bound, k_bound * s_net_bound, beta, diam


def preset(r: int, eps: float | None = None) -> int:
    """The locality knob q for a K_r-minor-free input.

    Without eps: q = 1, the low-dimension regime (beta grows like 8r
    when gamma = delta / r).  With eps: q large enough that beta is at
    most 4 + eps.
    """
    if r < 2:
        raise CoverError("r must be at least 2")
    if eps is None:
        return 1
    if eps <= 0:
        raise CoverError("eps must be positive")
    return math.ceil(round(8 * r / eps, 9))


def color_supernodes(dag: SupernodeDag, q: int, w: int) -> list[list[int]]:
    """Split supernodes into groups with pairwise directed distance > 2q-1.

    Greedy smallest missing color in creation order: every node's
    forward ball is already colored (arcs point to ancestors, which have
    smaller ids), so the color count never exceeds C(w + 2q-1, w).
    """
    k_bound = math.comb(w + 2 * q - 1, w)
    color: dict[int, int] = {}
    for x in sorted(dag.arcs):
        forbidden = {
            color[y] for y in directed_ball(dag, x, 2 * q - 1) if y in color
        }
        c = 1
        while c in forbidden:
            c += 1
        if c > k_bound:
            raise CoverError(
                f"supernode coloring needs {c} colors, bound is {k_bound}"
            )
        color[x] = c
    k = max(color.values(), default=0)
    groups: list[list[int]] = [[] for _ in range(k)]
    for x in sorted(color):
        groups[color[x] - 1].append(x)
    return groups


def enlarge(g: WeightedGraph, d: BufferedCopDecomposition, eta: int, q: int) -> set[int]:
    """B(eta, q * gamma) inside G[dom(eta)]."""
    s = d.supernode(eta)
    dist, _ = _dijkstra(g, s.vertices, s.domain)
    reach = q * d.gamma + tolerance(g)
    return {v for v in s.domain if dist[v] <= reach}


@dataclass
class EnlargedPartition:
    """One supernode's clusters: net points, their colors, and for each
    color the family of pairwise disjoint radius-R balls."""

    eta: int
    hat: frozenset
    net: list  # net point vertex ids in selection order
    colors: list  # 1-based color per net point
    families: list  # families[j] = list of frozenset clusters of color j+1


def _skeleton_tree_distances(g: WeightedGraph, skparent: dict) -> dict:
    """All-pairs distances along the skeleton tree edges."""
    wmap = {}
    adj: dict[int, list] = {v: [] for v in skparent}
    for v, p in skparent.items():
        if p is None:
            continue
        w = None
        for y, wt in g.adj(v):
            if y == p:
                w = wt
                break
        adj[v].append((p, w))
        adj[p].append((v, w))
    dist: dict = {}
    for s in skparent:
        row = {s: 0.0}
        stack = [s]
        while stack:
            x = stack.pop()
            for y, w in adj[x]:
                if y not in row:
                    row[y] = row[x] + w
                    stack.append(y)
        dist[s] = row
    return dist


def partition_enlarged(
    g: WeightedGraph,
    d: BufferedCopDecomposition,
    eta: int,
    q: int,
    delta_used: float | None = None,
) -> EnlargedPartition:
    """Net, net coloring, and disjoint ball families for one supernode."""
    tol = tolerance(g)
    if delta_used is None:
        delta_used = max(d.delta_measured, d.gamma)
    s = d.supernode(eta)
    hat = frozenset(enlarge(g, d, eta, q))
    radius = 2 * delta_used + q * d.gamma

    tree = _skeleton_tree_distances(g, s.skeleton_parent)
    root_dist = tree[s.skeleton_root]
    order = sorted(s.skeleton_parent, key=lambda v: (root_dist[v], v))
    net: list[int] = []
    for v in order:
        if all(tree[v][u] > delta_used for u in net):
            net.append(v)

    # one restricted Dijkstra per net point, reused for coloring and balls
    fields = {x: _dijkstra(g, [x], hat)[0] for x in net}
    w = d.w_target
    s_bound = 4 * w * (2 + q * d.gamma / delta_used)
    colors: list[int] = []
    for i, x in enumerate(net):
        forbidden = {
            colors[j]
            for j in range(i)
            if fields[net[j]][x] <= 2 * radius + 2 * tol
        }
        c = 1
        while c in forbidden:
            c += 1
        if c > s_bound + 1e-9:
            raise CoverError(
                f"net coloring of supernode {eta} needs {c} colors, "
                f"bound is {s_bound:.6g}"
            )
        colors.append(c)

    families: list[list[frozenset]] = [[] for _ in range(max(colors, default=0))]
    claimed: dict[int, set[int]] = {}
    for x, c in zip(net, colors):
        dist = fields[x]
        cluster = frozenset(v for v in hat if dist[v] <= radius + tol)
        prev = claimed.setdefault(c, set())
        if prev & cluster:
            raise CoverError(
                f"same-color clusters overlap inside supernode {eta}; "
                "the net coloring separation failed"
            )
        prev |= cluster
        families[c - 1].append(cluster)
    return EnlargedPartition(eta=eta, hat=hat, net=net, colors=colors, families=families)


@dataclass
class SparseCover:
    partitions: list  # list of partitions; each a list of frozenset clusters
    beta: float
    diam: float
    q: int
    delta_used: float
    gamma: float
    meta: dict = field(default_factory=dict)

    @property
    def s(self) -> int:
        return len(self.partitions)


def build_cover(g: WeightedGraph, d: BufferedCopDecomposition, q: int) -> SparseCover:
    """Assemble the full cover; raises CoverError if a bound is exceeded.

    The result's beta and diam use the measured decomposition radius, so
    they are honest for the instance at hand even when the construction
    overshot its target radius.
    """
    if q < 1:
        raise CoverError("q must be at least 1")
    dag = build_dag(g, d)
    groups = color_supernodes(dag, q, d.w_target)
    delta_used = max(d.delta_measured, d.gamma)
    k_bound, s_bound, beta, diam = cover_bounds(d.w_target, q, d.gamma, delta_used)
    parts = {
        s.id: partition_enlarged(g, d, s.id, q, delta_used) for s in d.supernodes
    }
    zclass = zero_classes(g)

    partitions = []
    provenance = []
    for i, group in enumerate(groups, start=1):
        depth = max(len(parts[eta].families) for eta in group)
        for j in range(1, depth + 1):
            clusters = []
            used: set[int] = set()
            for eta in sorted(group):
                fam = parts[eta].families
                if len(fam) < j:
                    continue
                for cluster in fam[j - 1]:
                    overlap = used & cluster
                    if overlap:
                        raise CoverError(
                            f"clusters of partition ({i},{j}) overlap at "
                            f"vertex {min(overlap)}; same-color supernodes "
                            "are not far enough apart"
                        )
                    used |= cluster
                    clusters.append(cluster)
            # leftovers grouped by zero-distance class, so a pair at
            # distance zero is never split (clusters stay ball-shaped)
            leftover: dict[int, set] = {}
            for v in range(g.n):
                if v not in used:
                    leftover.setdefault(zclass[v], set()).add(v)
            clusters.extend(frozenset(s) for _, s in sorted(leftover.items()))
            partitions.append(clusters)
            provenance.append({"supernode_color": i, "net_color": j})
    if len(partitions) > s_bound + 1e-9:
        raise CoverError(
            f"cover has {len(partitions)} partitions, bound is {s_bound:.6g}"
        )
    return SparseCover(
        partitions=partitions,
        beta=beta,
        diam=diam,
        q=q,
        delta_used=delta_used,
        gamma=d.gamma,
        meta={
            "k": len(groups),
            "k_bound": k_bound,
            "s": len(partitions),
            "s_bound": s_bound,
            "provenance": provenance,
            "delta_measured": d.delta_measured,
            "w": d.w_target,
        },
    )


def cover_scheme(g: WeightedGraph, r: int, q: int, slack: float = 2.0):
    """(scheme, beta): scheme(D) builds a cover with diameter at most D
    and certified padded radius at least D / beta, for any D > 0.

    Scales at or above the graph diameter get the one-cluster cover,
    which pads every vertex at infinity.  Below that, the decomposition
    radius starts where the cover diameter would land exactly on D and
    shrinks by sqrt(2) on overshoot (repair merges can inflate the
    measured radius past the target).  Each shrink also shrinks the
    padding, so beta carries a slack factor covering the allowed loss;
    if padding drops below D / beta anyway, the scheme refuses loudly.
    Covers are cached per scale since callers probe the same ladder of
    scales repeatedly.
    """
    if r < 2:
        raise CoverError("r must be at least 2")
    if slack < 1:
        raise CoverError("slack must be at least 1")
    beta = slack * 4 * (2 * r / q + 1)
    tol = tolerance(g)
    _, phi = distance_extremes(g)
    whole = [frozenset(range(g.n))]
    cache: dict = {}

    def scheme(target: float) -> SparseCover:
        if target <= 0:
            raise CoverError("scale must be positive")
        if target in cache:
            return cache[target]
        if target >= phi - tol:
            c = SparseCover(
                partitions=[whole],
                beta=beta,
                diam=phi,
                q=q,
                delta_used=phi,
                gamma=0.0,
                meta={"trivial": True, "k": 1, "s": 1},
            )
            cache[target] = c
            return c
        delta = target * r / (2 * (2 * r + q))
        for _ in range(64):
            d = build_bcd(g, delta=delta, gamma=delta / r, w=r - 1)
            c = build_cover(g, d, q)
            if c.diam <= target + tol:
                if c.diam / c.beta < target / beta - tol:
                    break
                cache[target] = c
                return c
            delta /= math.sqrt(2)
        raise CoverError(
            f"no cover with diameter {target:.6g} and padded radius "
            f"{target / beta:.6g} reachable by shrinking"
        )

    return scheme, beta


# ---------------------------------------------------------------------------
# verification


@dataclass
class CoverReport:
    checks: dict  # name -> (ok, detail)
    rho_star: float
    max_diameter: float

    @property
    def passed(self) -> bool:
        return all(ok for ok, _ in self.checks.values())

    def lines(self) -> list[str]:
        return [
            f"{'pass' if ok else 'FAIL'} {name}: {detail}"
            for name, (ok, detail) in self.checks.items()
        ]


def verify_cover(g: WeightedGraph, cover: SparseCover) -> CoverReport:
    """Recheck every advertised cover property by direct computation.

    partition validity, strong cluster diameters against cover.diam, and
    the padding: every vertex must have, in some partition, its whole
    ball of radius diam / beta inside its own cluster.  rho_star is the
    worst padded radius actually available.
    """
    tol = tolerance(g)
    checks: dict = {}

    bad = None
    for p_idx, clusters in enumerate(cover.partitions):
        seen: dict[int, int] = {}
        for c_idx, cluster in enumerate(clusters):
            if not cluster:
                bad = (p_idx, c_idx, "empty cluster")
                break
            for v in cluster:
                if v in seen:
                    bad = (p_idx, c_idx, f"vertex {v} already in cluster {seen[v]}")
                    break
                seen[v] = c_idx
            if bad:
                break
        if bad is None and len(seen) != g.n:
            missing = next(v for v in range(g.n) if v not in seen)
            bad = (p_idx, -1, f"vertex {missing} uncovered")
        if bad:
            break
    checks["partition"] = (
        bad is None,
        "every partition splits the vertex set"
        if bad is None
        else f"partition {bad[0]}, cluster {bad[1]}: {bad[2]}",
    )

    max_diam = 0.0
    worst = None
    for p_idx, clusters in enumerate(cover.partitions):
        for c_idx, cluster in enumerate(clusters):
            if len(cluster) == 1:
                continue
            dm = strong_diameter(g, cluster)
            if dm > max_diam:
                max_diam = dm
                worst = (p_idx, c_idx)
            if dm > cover.diam + tol:
                break
    ok = max_diam <= cover.diam + tol
    checks["diameter"] = (
        ok,
        f"max strong diameter {max_diam:.6g} within {cover.diam:.6g}"
        if ok
        else f"cluster {worst[1]} of partition {worst[0]} has strong diameter "
        f"{max_diam:.6g} > {cover.diam:.6g}",
    )

    need = cover.diam / cover.beta
    best = None
    if checks["partition"][0]:
        for clusters in cover.partitions:
            labels = [0] * g.n
            for c_idx, cluster in enumerate(clusters):
                for v in cluster:
                    labels[v] = c_idx
            away = nearest_other_label(g, labels)
            best = away if best is None else np.maximum(best, away)
        rho_star = float(best.min())
        ok = rho_star >= need - tol
        checks["padding"] = (
            ok,
            f"padded radius {rho_star:.6g} >= diam/beta = {need:.6g}"
            if ok
            else f"vertex {int(best.argmin())} has padded radius {rho_star:.6g} "
            f"< diam/beta = {need:.6g}",
        )
    else:
        rho_star = 0.0
        checks["padding"] = (False, "skipped: partitions are broken")

    return CoverReport(checks=checks, rho_star=rho_star, max_diameter=max_diam)


# ---------------------------------------------------------------------------
# serialization


def cover_to_json(cover: SparseCover) -> dict:
    return {
        "beta": cover.beta,
        "diam": cover.diam,
        "q": cover.q,
        "delta_used": cover.delta_used,
        "gamma": cover.gamma,
        "meta": cover.meta,
        "partitions": [
            [sorted(cluster) for cluster in clusters]
            for clusters in cover.partitions
        ],
    }


def cover_from_json(data: dict) -> SparseCover:
    return SparseCover(
        partitions=[
            [frozenset(c) for c in clusters] for clusters in data["partitions"]
        ],
        beta=data["beta"],
        diam=data["diam"],
        q=data["q"],
        delta_used=data["delta_used"],
        gamma=data["gamma"],
        meta=data.get("meta", {}),
    )
