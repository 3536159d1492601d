"""Laminar partition ladders built from a cover scheme.

A cover scheme hands back, for any target scale D, a partition cover
with cluster diameter at most D and padded radius D/beta.  From it we
build tau hierarchies ("ladders"): ladder j stacks, over the scales
Delta_i = a * (4*beta/epsilon)^i, partitions that refine one another.
Level i is produced from the scheme's j-th partition at scale Delta_i by
clipping clusters in min-vertex order against the mass already taken
and then rounding each clipped cluster outward to a union of level-(i-1)
clusters.  The rounding costs a (1+epsilon) factor on the diameter and
on the padded radius, nothing more.

Materialized levels run from -1 (zero-distance classes; singletons
when weights are positive) to I+1 (one cluster), with
I = ceil(log_{4 beta/eps}(Phi / a)) for diameter Phi; outside that range
the hierarchy is constant so nothing is stored.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .cover import SparseCover
from .graph import (
    WeightedGraph,
    all_pairs,
    distance_extremes,
    nearest_other_label,
    tolerance,
    zero_classes,
)


class LaminarError(ValueError):
    """Raised when the scheme's covers cannot support the ladder."""


def scale_of(a: float, beta: float, epsilon: float, i: int) -> float:
    return a * (4 * beta / epsilon) ** i


@dataclass
class LaminarHierarchy:
    j: int  # ladder index, 1-based
    levels: dict  # level index -> list of frozenset clusters
    a: float
    epsilon: float
    beta: float

    @property
    def top(self) -> int:
        return max(self.levels)


def build_ladders(
    g: WeightedGraph,
    scheme,
    a: float,
    epsilon: float,
    beta: float,
    tau: int | None = None,
) -> list[LaminarHierarchy]:
    """tau laminar hierarchies from scheme(D) -> SparseCover.

    The scheme's covers must have diameter within the requested scale
    and at most tau partitions; short covers are padded by cycling
    through their partitions.  tau=None means use the largest partition
    count any scale produces.
    """
    if not 0 < epsilon < 1:
        raise LaminarError("epsilon must be in (0, 1)")
    if beta < 1:
        raise LaminarError("beta must be at least 1")
    if a <= 0:
        raise LaminarError("a must be positive")
    if tau is not None and tau < 1:
        raise LaminarError("tau must be at least 1")
    tol = tolerance(g)

    if g.n <= 1:
        top_i = 0
    else:
        _, phi = distance_extremes(g)
        ratio = math.log(phi / a) / math.log(4 * beta / epsilon)
        top_i = max(0, math.ceil(round(ratio, 9)))

    covers: dict[int, SparseCover] = {}
    for i in range(top_i + 1):
        d_i = scale_of(a, beta, epsilon, i)
        cover = scheme(d_i)
        if not cover.partitions:
            raise LaminarError(f"scheme returned an empty cover at scale {d_i:.6g}")
        if cover.diam > d_i + tol:
            raise LaminarError(
                f"cover at scale {d_i:.6g} has diameter {cover.diam:.6g}"
            )
        covers[i] = cover
    if tau is None:
        tau = max(len(c.partitions) for c in covers.values())
    for i, cover in covers.items():
        if len(cover.partitions) > tau:
            raise LaminarError(
                f"cover at scale {scale_of(a, beta, epsilon, i):.6g} has "
                f"{len(cover.partitions)} partitions, ladder count is {tau}"
            )

    everything = frozenset(range(g.n))
    # bottom level: one cluster per zero-distance class (plain singletons
    # on positive weights); a positive-diameter bottom could not be padded
    zcl = zero_classes(g)
    bottom_sets: dict[int, set] = {}
    for v in range(g.n):
        bottom_sets.setdefault(zcl[v], set()).add(v)
    bottom = [frozenset(s) for _, s in sorted(bottom_sets.items())]
    ladders = []
    for j in range(1, tau + 1):
        levels: dict[int, list] = {-1: list(bottom)}
        for i in range(top_i + 1):
            parts = covers[i].partitions
            chosen = parts[(j - 1) % len(parts)]
            prev = levels[i - 1]
            owner = {v: t for t, cl in enumerate(prev) for v in cl}
            unassigned = set(range(g.n))
            new_level = []
            for cluster in sorted(chosen, key=min):
                clipped = cluster & unassigned
                if not clipped:
                    continue
                pieces = sorted({owner[v] for v in clipped})
                merged = frozenset().union(*(prev[t] for t in pieces))
                unassigned -= merged
                new_level.append(merged)
            if unassigned:
                raise LaminarError(
                    f"level {i} of ladder {j} left vertex {min(unassigned)} behind"
                )
            levels[i] = new_level
        levels[top_i + 1] = [everything]
        ladders.append(
            LaminarHierarchy(j=j, levels=levels, a=a, epsilon=epsilon, beta=beta)
        )
    return ladders


# ---------------------------------------------------------------------------
# verification


@dataclass
class LaminarReport:
    checks: dict
    padding_by_level: dict  # level -> worst padded radius over vertices

    @property
    def passed(self) -> bool:
        return all(ok for ok, _ in self.checks.values())

    def lines(self) -> list[str]:
        return [
            f"{'pass' if ok else 'FAIL'} {name}: {detail}"
            for name, (ok, detail) in self.checks.items()
        ]


def verify_ladders(g: WeightedGraph, ladders: list[LaminarHierarchy]) -> LaminarReport:
    """Recheck the three ladder guarantees with exact distances.

    structure: every level of every ladder is a true partition, bottom
    is the zero-distance classes, top is one cluster, all ladders span
    the same levels.
    refinement: each cluster sits inside one cluster of the next level.
    diameter: weak diameter of level-i clusters within (1+eps) Delta_i.
    padding: for every vertex and level, some ladder keeps the ball of
    radius Delta_i / (beta (1+eps)) inside one cluster.
    """
    tol = tolerance(g)
    checks: dict = {}
    a, eps, beta = ladders[0].a, ladders[0].epsilon, ladders[0].beta
    level_set = set(ladders[0].levels)
    zcl = zero_classes(g)

    bad = None
    for lad in ladders:
        if set(lad.levels) != level_set:
            bad = f"ladder {lad.j} spans different levels"
            break
        for i, clusters in lad.levels.items():
            seen: set[int] = set()
            for cl in clusters:
                if not cl or cl & seen:
                    bad = f"ladder {lad.j} level {i} is not a partition"
                    break
                seen |= cl
            if bad is None and len(seen) != g.n:
                bad = f"ladder {lad.j} level {i} misses vertices"
            if bad:
                break
        if bad:
            break
        bottom = lad.levels[min(level_set)]
        if len(bottom) != len(set(zcl)) or any(
            len({zcl[v] for v in cl}) != 1 for cl in bottom
        ):
            bad = f"ladder {lad.j} bottom level is not the zero-diameter classes"
            break
        if len(lad.levels[max(level_set)]) != 1:
            bad = f"ladder {lad.j} top level is not a single cluster"
            break
    checks["structure"] = (bad is None, bad or "all levels are partitions, classes to whole set")
    if bad:
        checks["refinement"] = (False, "skipped: structure is broken")
        checks["diameter"] = (False, "skipped: structure is broken")
        checks["padding"] = (False, "skipped: structure is broken")
        return LaminarReport(checks=checks, padding_by_level={})

    bad = None
    for lad in ladders:
        for i in sorted(level_set)[:-1]:
            owner = {}
            for t, cl in enumerate(lad.levels[i + 1]):
                for v in cl:
                    owner[v] = t
            for cl in lad.levels[i]:
                hosts = {owner[v] for v in cl}
                if len(hosts) != 1:
                    bad = (
                        f"ladder {lad.j}: cluster {sorted(cl)[:4]}... of level {i} "
                        f"straddles {len(hosts)} clusters of level {i + 1}"
                    )
                    break
            if bad:
                break
        if bad:
            break
    checks["refinement"] = (bad is None, bad or "every level refines the next")

    dist = all_pairs(g)
    bad = None
    worst = 0.0
    for lad in ladders:
        for i, clusters in lad.levels.items():
            limit = (1 + eps) * scale_of(a, beta, eps, i)
            for cl in clusters:
                if len(cl) == 1:
                    continue
                members = sorted(cl)
                diam = max(
                    dist[u][v] for u in members for v in members
                )
                worst = max(worst, diam / limit)
                if diam > limit + tol:
                    bad = (
                        f"ladder {lad.j} level {i}: weak diameter {diam:.6g} "
                        f"exceeds (1+eps) Delta_i = {limit:.6g}"
                    )
                    break
            if bad:
                break
        if bad:
            break
    checks["diameter"] = (
        bad is None,
        bad or f"worst diameter at {worst:.3f} of the (1+eps) Delta_i budget",
    )

    padding_by_level: dict = {}
    bad = None
    for i in sorted(level_set):
        need = scale_of(a, beta, eps, i) / (beta * (1 + eps))
        best = None
        for lad in ladders:
            labels = [0] * g.n
            for t, cl in enumerate(lad.levels[i]):
                for v in cl:
                    labels[v] = t
            away = nearest_other_label(g, labels)
            best = away if best is None else np.maximum(best, away)
        padding_by_level[i] = float(best.min())
        if bad is None and padding_by_level[i] < need - tol:
            v = int(best.argmin())
            bad = (
                f"vertex {v} at level {i}: no ladder pads radius "
                f"{need:.6g} (best {padding_by_level[i]:.6g})"
            )
    checks["padding"] = (bad is None, bad or "every vertex padded at every level")
    return LaminarReport(checks=checks, padding_by_level=padding_by_level)
