"""Sparse partitions and colorings derived from partition covers.

Two consumers of a cover live here.  The first flattens the s partitions
into a single partition by clipping clusters in order; the resulting
(alpha, tau) pair is measured on the instance, never asserted, because
the clip construction's worst case is not certified by anything in this
package.  The second colors the cover's clusters by partition index and
checks the coloring against the exact neighbor relation: clusters C1,
C2 are neighbors when some pair x in C1, y in C2 at distance at most
diam/beta is padded by its own cluster (the whole diam/beta-ball around
x sits inside C1, same for y).  Same-partition clusters are disjoint, so
they can never be neighbors and one color per partition always works;
the verifier recomputes this from scratch instead of trusting it.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .cover import SparseCover
from .graph import WeightedGraph, _dijkstra, nearest_other_label, tolerance


@dataclass
class SparsePartition:
    clusters: list  # disjoint frozensets covering V
    alpha: float
    tau: int  # measured: max clusters met by any ball of radius diam/alpha
    diam: float
    meta: dict = field(default_factory=dict)


def to_sparse_partition(g: WeightedGraph, cover: SparseCover) -> SparsePartition:
    """Clip clusters in (partition index, cluster index) order.

    Each cluster keeps only its not-yet-assigned vertices; empties are
    dropped.  alpha is inherited from the cover's beta, tau is the
    measured worst ball-intersection count at radius diam/alpha.
    """
    tol = tolerance(g)
    assigned: set[int] = set()
    clusters: list[frozenset] = []
    for parts in cover.partitions:
        for cluster in parts:
            clipped = cluster - assigned
            if clipped:
                assigned |= clipped
                clusters.append(frozenset(clipped))
        if len(assigned) == g.n:
            break

    alpha = cover.beta
    radius = cover.diam / alpha
    label = [0] * g.n
    for idx, cluster in enumerate(clusters):
        for v in cluster:
            label[v] = idx
    tau = 0
    worst = 0
    for v in range(g.n):
        dist, _ = _dijkstra(g, [v], None)
        met = {label[u] for u in range(g.n) if dist[u] <= radius + tol}
        if len(met) > tau:
            tau = len(met)
            worst = v
    return SparsePartition(
        clusters=clusters,
        alpha=alpha,
        tau=tau,
        diam=cover.diam,
        meta={
            "source_s": cover.s,
            "tau_within_s": tau <= cover.s,
            "worst_vertex": worst,
        },
    )


# ---------------------------------------------------------------------------
# cover coloring


@dataclass
class CoverColoring:
    """Colors keyed by (partition index, cluster index), 1-based colors."""

    color: dict
    k: int


def color_cover(cover: SparseCover) -> CoverColoring:
    """One color per partition; valid because same-partition clusters
    are disjoint and neighboring clusters always intersect."""
    color = {
        (p, c): p + 1
        for p, clusters in enumerate(cover.partitions)
        for c in range(len(clusters))
    }
    return CoverColoring(color=color, k=len(cover.partitions))


@dataclass
class ColoringReport:
    checks: dict
    satisfied_pairs: int  # (cluster, padded vertex) count
    neighbor_pairs: int  # distinct neighboring cluster pairs

    @property
    def passed(self) -> bool:
        return all(ok for ok, _ in self.checks.values())

    def lines(self) -> list[str]:
        return [
            f"{'pass' if ok else 'FAIL'} {name}: {detail}"
            for name, (ok, detail) in self.checks.items()
        ]


def verify_coloring(
    g: WeightedGraph, cover: SparseCover, coloring: CoverColoring
) -> ColoringReport:
    """Exact neighbor-relation check of a cluster coloring.

    A vertex is padded in a partition when its whole diam/beta-ball sits
    inside its own cluster there; two clusters are neighbors when padded
    vertices of each lie within diam/beta of one another.  Every
    neighboring pair must get distinct colors.  The radius is shrunk by
    the float tolerance on both sides so borderline arithmetic can
    neither invent nor hide a conflict deterministically.
    """
    tol = tolerance(g)
    radius = cover.diam / cover.beta

    missing = [
        (p, c)
        for p, clusters in enumerate(cover.partitions)
        for c in range(len(clusters))
        if (p, c) not in coloring.color
    ]
    checks: dict = {
        "complete": (
            not missing,
            "every cluster is colored"
            if not missing
            else f"cluster {missing[0]} has no color",
        )
    }
    if missing:
        checks["conflicts"] = (False, "skipped: coloring is incomplete")
        return ColoringReport(checks=checks, satisfied_pairs=0, neighbor_pairs=0)

    # padded[v] = clusters that beta-satisfy v and contain it
    padded: list[list[tuple]] = [[] for _ in range(g.n)]
    n_sat = 0
    for p, clusters in enumerate(cover.partitions):
        labels = [0] * g.n
        for c, cluster in enumerate(clusters):
            for v in cluster:
                labels[v] = c
        away = nearest_other_label(g, labels)
        for v in range(g.n):
            if away[v] > radius - tol:
                padded[v].append((p, labels[v]))
                n_sat += 1

    neighbors: set[tuple] = set()
    conflict = None
    for v in range(g.n):
        if not padded[v]:
            continue
        dist, _ = _dijkstra(g, [v], None)
        for u in range(v, g.n):
            if dist[u] > radius - tol or not padded[u]:
                continue
            for cv in padded[v]:
                for cu in padded[u]:
                    if cv == cu:
                        continue
                    pair = (min(cv, cu), max(cv, cu))
                    neighbors.add(pair)
                    if conflict is None and coloring.color[cv] == coloring.color[cu]:
                        conflict = (cv, cu, v, u)

    checks["conflicts"] = (
        conflict is None,
        f"{len(neighbors)} neighboring cluster pairs, all differently colored"
        if conflict is None
        else f"clusters {conflict[0]} and {conflict[1]} share color "
        f"{coloring.color[conflict[0]]} but are neighbors via vertices "
        f"{conflict[2]} and {conflict[3]}",
    )
    return ColoringReport(
        checks=checks, satisfied_pairs=n_sat, neighbor_pairs=len(neighbors)
    )


# ---------------------------------------------------------------------------
# serialization


def partition_to_json(sp: SparsePartition) -> dict:
    return {
        "alpha": sp.alpha,
        "tau": sp.tau,
        "diam": sp.diam,
        "meta": sp.meta,
        "clusters": [sorted(c) for c in sp.clusters],
    }


def partition_from_json(data: dict) -> SparsePartition:
    return SparsePartition(
        clusters=[frozenset(c) for c in data["clusters"]],
        alpha=data["alpha"],
        tau=data["tau"],
        diam=data["diam"],
        meta=data.get("meta", {}),
    )
