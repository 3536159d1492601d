"""Buffered cop decompositions.

A decomposition with target parameters (delta, gamma, w) partitions the
vertices into supernodes arranged in a rooted partition tree.  Each
supernode eta carries a skeleton tree T_eta such that

  * eta is contained in the ball of radius delta' around T_eta in the
    induced graph G[eta] (delta' is measured and may exceed the target),
  * T_eta is a shortest-path tree inside G[dom(eta)] with at most w
    leaves (the root does not count), where dom(eta) is the union of
    eta's subtree in the partition tree,
  * at most w ancestor supernodes have an edge from dom(eta), and
  * the buffer holds with parameter exactly gamma: for every supernode
    and every non-adjacent ancestor eta', all of dom(eta) stays at
    distance greater than gamma from eta' inside G[dom(eta')].

Construction carves supernodes out of a component queue: the component's
lowest-id vertex roots a shortest-path skeleton reaching one contact
vertex per adjacent ancestor, and the supernode is the ball of radius
delta around that skeleton inside the component.  The buffer is then
enforced by a repair loop: while some vertex v sits within gamma of an
ancestor eta (inside dom(eta)) with a non-adjacent supernode somewhere
on v's chain up to eta, the last offending vertex on v's witness path is
promoted into the supernode of its path successor, together with any
donor vertices its removal would cut off from the donor's skeleton.  The
receiver is provably a strict ancestor of the donor, so every vertex
only ever travels up the tree and the loop terminates after at most
n * depth <= n^2 relocations.  If the promoted vertex belongs to the
donor's skeleton the whole donor is merged into the receiver instead (a
hole in a skeleton cannot be repaired locally).

Everything is re-measured at the end; verify_bcd is the ground truth
the construction is held against.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

import numpy as np

from .graph import WeightedGraph, _dijkstra, tolerance


class BcdError(ValueError):
    """Raised for malformed decompositions (broken tree, bad skeleton)."""


class RepairLoopError(RuntimeError):
    """Repair exceeded its move cap; carries the pair it was stuck on."""

    def __init__(self, ancestor: int, descendant: int, vertex: int):
        super().__init__(
            f"repair move cap exceeded while fixing vertex {vertex} of "
            f"supernode {descendant} against ancestor {ancestor}"
        )
        self.pair = (descendant, ancestor)
        self.vertex = vertex


@dataclass
class Supernode:
    id: int
    vertices: frozenset
    skeleton_root: int
    skeleton_parent: dict  # skeleton vertex -> parent vertex (root -> None)
    parent: int | None
    domain: frozenset
    adjacent_ancestors: frozenset

    @property
    def skeleton(self) -> frozenset:
        return frozenset(self.skeleton_parent)

    def skeleton_leaves(self) -> int:
        """Leaf count of the skeleton tree, root excluded."""
        parents = {p for p in self.skeleton_parent.values() if p is not None}
        return sum(
            1
            for v in self.skeleton_parent
            if v not in parents and v != self.skeleton_root
        )


@dataclass
class BufferedCopDecomposition:
    supernodes: list  # creation order
    delta_target: float
    gamma: float
    w_target: int
    delta_measured: float
    w_measured: int

    def __post_init__(self):
        self._by_id = {s.id: s for s in self.supernodes}

    def supernode(self, sid: int) -> Supernode:
        return self._by_id[sid]

    def supernode_of(self, v: int) -> Supernode:
        if not hasattr(self, "_vmap"):
            self._vmap = {}
            for s in self.supernodes:
                for x in s.vertices:
                    self._vmap[x] = s.id
        return self._by_id[self._vmap[v]]

    def ancestors(self, sid: int):
        """Supernode ids on the chain strictly above sid, bottom up."""
        cur = self._by_id[sid].parent
        while cur is not None:
            yield cur
            cur = self._by_id[cur].parent


# ---------------------------------------------------------------------------
# construction


class _Builder:
    def __init__(self, g: WeightedGraph, delta: float, gamma: float, w: int):
        self.g = g
        self.delta = float(delta)
        self.gamma = float(gamma)
        self.w = int(w)
        self.tol = tolerance(g)
        self.vertices: dict[int, set[int]] = {}
        self.root: dict[int, int] = {}
        self.skparent: dict[int, dict] = {}
        self.parent: dict[int, int | None] = {}
        self.children: dict[int, list[int]] = {}
        self.order: list[int] = []
        self.dead: set[int] = set()
        self.vsn = [-1] * g.n

    # -- carving ------------------------------------------------------

    def carve(self) -> None:
        g = self.g
        queue: deque[frozenset] = deque([frozenset(range(g.n))])
        while queue:
            comp = queue.popleft()
            root = min(comp)
            dist, par = _dijkstra(g, [root], comp)
            # one frontier pass: the neighbouring supernodes and, for each,
            # the closest-to-root member of comp that touches it
            contact_of: dict[int, int] = {}
            for y in comp:
                dy = dist[y]
                for z, _ in g.adj(y):
                    if z in comp:
                        continue
                    anc = self.vsn[z]
                    best = contact_of.get(anc)
                    if best is None or (dy, y) < (dist[best], best):
                        contact_of[anc] = y
            kset = sorted(contact_of)
            skeleton = {root}
            skparent: dict = {root: None}
            for anc in kset:
                contact = contact_of[anc]
                cur = contact
                chain = []
                while cur not in skeleton:
                    chain.append(cur)
                    cur = int(par[cur])
                for v in chain:
                    skeleton.add(v)
                for v in chain:
                    skparent[v] = int(par[v])
            sdist, _ = _dijkstra(g, skeleton, comp)
            members = {v for v in comp if sdist[v] <= self.delta + self.tol}
            sid = len(self.order)
            self.vertices[sid] = members
            self.root[sid] = root
            self.skparent[sid] = skparent
            self.parent[sid] = max(kset) if kset else None
            self.children[sid] = []
            if kset:
                self.children[max(kset)].append(sid)
            self.order.append(sid)
            for v in members:
                self.vsn[v] = sid
            rest = comp - members
            if rest:
                for sub in sorted(connected_components_of(g, rest), key=min):
                    queue.append(frozenset(sub))

    # -- repair -------------------------------------------------------

    def live(self) -> list[int]:
        return [i for i in self.order if i not in self.dead]

    def domain(self, sid: int) -> set[int]:
        out: set[int] = set()
        stack = [sid]
        while stack:
            i = stack.pop()
            out |= self.vertices[i]
            stack.extend(self.children[i])
        return out

    def adjacency_pairs(self) -> set[tuple[int, int]]:
        pairs = set()
        for u, v, _ in self.g.edges:
            a, b = self.vsn[u], self.vsn[v]
            if a != b:
                pairs.add((min(a, b), max(a, b)))
        return pairs

    def _chain_blocked(self, low: int, high: int, pairs) -> bool:
        """True when some supernode on low..high (exclusive of high) is
        not adjacent to high."""
        cur = low
        while cur != high:
            if (min(cur, high), max(cur, high)) not in pairs:
                return True
            cur = self.parent[cur]
            if cur is None:
                raise BcdError(f"{high} is not an ancestor of {low}")
        return False

    def repair(self) -> int:
        cap = self.g.n * self.g.n
        moves = 0
        swept = True
        while swept:
            swept = False
            for eta in self.live():
                if eta in self.dead:
                    continue
                moves, any_move = self._repair_one(eta, moves, cap)
                swept = swept or any_move
        return moves

    def _repair_one(self, eta: int, moves: int, cap: int) -> tuple[int, bool]:
        """Fix all currently visible buffer violations against ancestor
        eta."""
        dom = self.domain(eta)
        if len(dom) == len(self.vertices[eta]):
            return moves, False
        dist, par = _dijkstra(self.g, self.vertices[eta], dom)
        pairs = self.adjacency_pairs()
        candidates = sorted(
            (
                v
                for v in dom
                if self.vsn[v] != eta and dist[v] <= self.gamma + self.tol
            ),
            key=lambda v: (dist[v], v),
        )
        any_move = False
        for v in candidates:
            if self.vsn[v] == eta:
                continue
            if not self._chain_blocked(self.vsn[v], eta, pairs):
                continue
            # walk the witness path toward eta, find the last offender
            path = [v]
            while self.vsn[path[-1]] != eta:
                path.append(int(par[path[-1]]))
            j = 1
            while j < len(path):
                p = path[j]
                if self.vsn[p] == eta or not self._chain_blocked(self.vsn[p], eta, pairs):
                    break
                j += 1
            mover = path[j - 1]
            target = self.vsn[path[j]]
            donor = self.vsn[mover]
            if mover in self.skparent[donor]:
                # tearing a hole in a skeleton is not repairable locally
                moved = self._merge(donor, target)
            else:
                moved = self._move(donor, mover, target)
            moves += moved
            any_move = True
            if moves > cap:
                raise RepairLoopError(donor, eta, mover)
            pairs = self.adjacency_pairs()
        return moves, any_move

    def _move(self, donor: int, mover: int, target: int) -> int:
        """Promote mover into target, along with every donor vertex that
        the removal of mover would cut off from the donor's skeleton."""
        keep = set(self.skparent[donor])
        stack = list(keep)
        body = self.vertices[donor]
        while stack:
            x = stack.pop()
            for y, _ in self.g.adj(x):
                if y != mover and y in body and y not in keep:
                    keep.add(y)
                    stack.append(y)
        group = body - keep
        for x in group:
            self.vsn[x] = target
        self.vertices[donor] = keep
        self.vertices[target] |= group
        return len(group)

    def _merge(self, donor: int, target: int) -> int:
        """Absorb all of donor into target (a strict ancestor)."""
        verts = self.vertices.pop(donor)
        for x in verts:
            self.vsn[x] = target
        self.vertices[target] |= verts
        dp = self.parent[donor]
        self.children[dp].remove(donor)
        for ch in self.children.pop(donor):
            self.parent[ch] = dp
            self.children[dp].append(ch)
        self.dead.add(donor)
        return len(verts)

    def _depths(self) -> dict[int, int]:
        depth: dict[int, int] = {}
        for sid in self.live():  # creation order puts parents first
            p = self.parent[sid]
            depth[sid] = 0 if p is None else depth[p] + 1
        return depth

    def _ancestor_sets(self) -> dict[int, set[int]]:
        """Ancestors with an edge from each supernode's current domain."""
        depth = self._depths()
        adj: dict[int, set[int]] = {sid: set() for sid in self.live()}
        for u, v, _ in self.g.edges:
            a, b = self.vsn[u], self.vsn[v]
            if a == b:
                continue
            if depth[a] < depth[b]:
                a, b = b, a
            cur = a
            while cur != b:
                adj[cur].add(b)
                cur = self.parent[cur]
                if cur is None:
                    raise BcdError(
                        f"edge ({u},{v}) joins unrelated supernodes; tree broken"
                    )
        return adj

    def enforce_width(self) -> bool:
        """Merge away supernodes whose adjacent-ancestor count exceeds w.

        Repair moves can, in rare cases, add ancestor adjacencies beyond
        the bound the carving stage guarantees.  Merging the offender
        into its parent leaves every domain in the tree unchanged, so no
        other count grows.  Returns True if anything merged.
        """
        merged = False
        while True:
            adj = self._ancestor_sets()
            depth = self._depths()
            bad = [sid for sid in self.live() if len(adj[sid]) > self.w]
            if not bad:
                return merged
            sid = max(bad, key=lambda s: (depth[s], -s))
            self._merge(sid, self.parent[sid])
            merged = True

    # -- finalize -----------------------------------------------------

    def finalize(self) -> BufferedCopDecomposition:
        g = self.g
        live = self.live()
        domains = {sid: frozenset(self.domain(sid)) for sid in live}
        adj_anc = self._ancestor_sets()
        delta_measured = 0.0
        supers = []
        w_measured = 0
        remap = {sid: k for k, sid in enumerate(live)}
        for sid in live:
            verts = frozenset(self.vertices[sid])
            sdist, _ = _dijkstra(g, self.skparent[sid].keys(), verts)
            radius = max(float(sdist[v]) for v in verts)
            delta_measured = max(delta_measured, radius)
            sn = Supernode(
                id=remap[sid],
                vertices=verts,
                skeleton_root=self.root[sid],
                skeleton_parent=dict(self.skparent[sid]),
                parent=None if self.parent[sid] is None else remap[self.parent[sid]],
                domain=domains[sid],
                adjacent_ancestors=frozenset(remap[a] for a in adj_anc[sid]),
            )
            w_measured = max(w_measured, len(sn.adjacent_ancestors), sn.skeleton_leaves())
            supers.append(sn)
        return BufferedCopDecomposition(
            supernodes=supers,
            delta_target=self.delta,
            gamma=self.gamma,
            w_target=self.w,
            delta_measured=delta_measured,
            w_measured=w_measured,
        )


def connected_components_of(g: WeightedGraph, subset) -> list[set[int]]:
    subset = set(subset)
    seen: set[int] = set()
    comps = []
    for s in sorted(subset):
        if s in seen:
            continue
        comp = {s}
        seen.add(s)
        stack = [s]
        while stack:
            x = stack.pop()
            for y, _ in g.adj(x):
                if y in subset and y not in seen:
                    seen.add(y)
                    comp.add(y)
                    stack.append(y)
        comps.append(comp)
    return comps


def build_bcd(g: WeightedGraph, delta: float, gamma: float, w: int) -> BufferedCopDecomposition:
    """Build a buffered cop decomposition with buffer parameter gamma.

    For a K_r-minor-free input call with gamma = delta / r and
    w = r - 1.  The measured radius delta' is reported on the result and
    may exceed delta; downstream formulas use the measured value.
    Raises RepairLoopError if the buffer repair exceeds n^2 moves.
    """
    if delta <= 0 or gamma <= 0 or gamma > delta + tolerance(g):
        raise BcdError(f"need 0 < gamma <= delta, got delta={delta}, gamma={gamma}")
    if w < 1:
        raise BcdError("w must be at least 1")
    b = _Builder(g, delta, gamma, w)
    b.carve()
    b.repair()
    while b.enforce_width():
        b.repair()
    return b.finalize()


# ---------------------------------------------------------------------------
# verification


@dataclass
class BcdReport:
    bullets: dict  # name -> (ok, detail string)
    delta_measured: float
    w_measured: int
    buffer_violations: list  # (descendant sid, ancestor sid, vertex, dist)

    @property
    def passed(self) -> bool:
        return all(ok for ok, _ in self.bullets.values())

    def lines(self) -> list[str]:
        out = []
        for name, (ok, detail) in self.bullets.items():
            out.append(f"{'pass' if ok else 'FAIL'} {name}: {detail}")
        return out


def verify_bcd(g: WeightedGraph, d: BufferedCopDecomposition) -> BcdReport:
    """Check Def-4.1 compliance with exact distance computations.

    Bullets: partition of V, radius (finite skeleton reach, measured
    delta'), skeleton (tree validity, SSSP property in the domain, leaf
    and ancestor-count bounds), buffer (every descendant/ancestor pair,
    parameter exactly gamma).
    """
    tol = tolerance(g)
    bullets: dict = {}
    wmap = {(min(u, v), max(u, v)): w for u, v, w in g.edges}

    # partition
    seen: dict[int, int] = {}
    dup = missing = None
    for s in d.supernodes:
        for v in s.vertices:
            if v in seen:
                dup = v
            seen[v] = s.id
    if len(seen) != g.n:
        missing = next(v for v in range(g.n) if v not in seen)
    ok = dup is None and missing is None
    bullets["partition"] = (
        ok,
        "supernodes partition the vertex set"
        if ok
        else f"vertex {dup if dup is not None else missing} "
        + ("appears twice" if dup is not None else "is uncovered"),
    )

    # radius
    delta_measured = 0.0
    unreachable = None
    for s in d.supernodes:
        if not s.skeleton_parent:
            unreachable = (s.id, None)
            break
        sdist, _ = _dijkstra(g, s.skeleton_parent.keys(), s.vertices)
        for v in s.vertices:
            if not np.isfinite(sdist[v]):
                unreachable = (s.id, v)
                break
            delta_measured = max(delta_measured, float(sdist[v]))
        if unreachable:
            break
    ok = unreachable is None
    if ok:
        note = f"measured radius {delta_measured:.6g}"
        if delta_measured > d.delta_target + tol:
            note += f" (exceeds target {d.delta_target:.6g})"
    elif unreachable[1] is None:
        note = f"supernode {unreachable[0]}: empty skeleton"
    else:
        note = (
            f"supernode {unreachable[0]}: vertex {unreachable[1]} "
            "cannot reach the skeleton in G[eta]"
        )
    bullets["radius"] = (ok, note)

    # recompute domains bottom-up from the parent pointers; do not trust
    # the stored fields
    children: dict[int, list[int]] = {s.id: [] for s in d.supernodes}
    tree_ok = True
    for s in d.supernodes:
        if s.parent is not None:
            if s.parent not in children:
                tree_ok = False
                break
            children[s.parent].append(s.id)
    by_id = {s.id: s for s in d.supernodes}
    dom_re: dict[int, set[int]] = {}
    pending = list(d.supernodes)
    while pending and tree_ok:
        rest = [s for s in pending if any(c not in dom_re for c in children[s.id])]
        if len(rest) == len(pending):
            tree_ok = False  # parent pointers contain a cycle
            break
        for s in pending:
            if s in rest:
                continue
            dom = set(s.vertices)
            for ch in children[s.id]:
                dom |= dom_re[ch]
            dom_re[s.id] = dom
        pending = rest

    # skeleton: tree validity + SSSP in domain + leaf bound + |A| bound
    sk_ok, sk_msg = tree_ok, "shortest-path skeletons, leaf and ancestor bounds hold"
    if not tree_ok:
        sk_msg = "parent pointers do not form a tree"
    w_measured = 0
    vsn = {v: sid for sid, s in by_id.items() for v in by_id[sid].vertices}
    anc_re: dict[int, set[int]] = {s.id: set() for s in d.supernodes}
    if bullets["partition"][0] and tree_ok:
        for u, v, _ in g.edges:
            a, b = vsn[u], vsn[v]
            if a == b:
                continue
            if v in dom_re[a]:  # a is the ancestor side, walk from b
                a, b = b, a
            elif u not in dom_re[b]:
                sk_ok, sk_msg = (
                    False,
                    f"edge ({u},{v}) joins supernodes {a},{b} that are not "
                    "in an ancestor relation",
                )
                break
            cur = a
            while cur != b:
                anc_re[cur].add(b)
                cur = by_id[cur].parent
    for s in d.supernodes if sk_ok else []:
        sk = set(s.skeleton_parent)
        if not sk or s.skeleton_root not in sk or not sk <= set(s.vertices):
            sk_ok, sk_msg = False, f"supernode {s.id}: skeleton not inside the supernode"
            break
        if s.skeleton_parent[s.skeleton_root] is not None:
            sk_ok, sk_msg = False, f"supernode {s.id}: skeleton root has a parent"
            break
        bad = next(
            (
                (v, p)
                for v, p in s.skeleton_parent.items()
                if v != s.skeleton_root
                and (p not in sk or (min(v, p), max(v, p)) not in wmap)
            ),
            None,
        )
        if bad:
            sk_ok, sk_msg = False, f"supernode {s.id}: skeleton edge {bad} is not a graph edge"
            break
        ddist, _ = _dijkstra(g, [s.skeleton_root], dom_re[s.id])
        for v in sk:
            length, cur, hops = 0.0, v, 0
            while s.skeleton_parent[cur] is not None:
                p = s.skeleton_parent[cur]
                length += wmap[(min(cur, p), max(cur, p))]
                cur = p
                hops += 1
                if hops > len(sk):
                    sk_ok, sk_msg = False, f"supernode {s.id}: skeleton parent cycle at {v}"
                    break
            if not sk_ok:
                break
            if abs(length - float(ddist[v])) > tol:
                sk_ok = False
                sk_msg = (
                    f"supernode {s.id}: skeleton path to {v} has length {length:.6g} "
                    f"but the domain distance is {float(ddist[v]):.6g}"
                )
                break
        if not sk_ok:
            break
        if set(s.domain) != dom_re[s.id] or set(s.adjacent_ancestors) != anc_re[s.id]:
            sk_ok, sk_msg = (
                False,
                f"supernode {s.id}: stored domain or ancestor set disagrees "
                "with the partition tree",
            )
            break
        leaves = s.skeleton_leaves()
        n_anc = len(anc_re[s.id])
        w_measured = max(w_measured, leaves, n_anc)
        if leaves > d.w_target:
            sk_ok, sk_msg = False, f"supernode {s.id}: {leaves} skeleton leaves > w={d.w_target}"
            break
        if n_anc > d.w_target:
            sk_ok, sk_msg = (
                False,
                f"supernode {s.id}: {n_anc} adjacent ancestors > w={d.w_target}",
            )
            break
    bullets["skeleton"] = (sk_ok, sk_msg)

    # buffer, every (descendant, ancestor) pair at parameter exactly gamma
    violations: list[tuple[int, int, int, float]] = []
    if tree_ok and bullets["partition"][0]:
        pairs = set()
        for u, v, _ in g.edges:
            a, b = vsn[u], vsn[v]
            if a != b:
                pairs.add((min(a, b), max(a, b)))
        for anc in d.supernodes:
            dom = dom_re[anc.id]
            if len(dom) == len(anc.vertices):
                continue
            dist, _ = _dijkstra(g, anc.vertices, dom)
            for v in dom:
                if vsn[v] == anc.id or dist[v] > d.gamma - tol:
                    continue
                cur = vsn[v]
                while cur is not None and cur != anc.id:
                    if (min(cur, anc.id), max(cur, anc.id)) not in pairs:
                        violations.append((cur, anc.id, v, float(dist[v])))
                    cur = by_id[cur].parent
        ok = not violations
        detail = (
            f"buffer holds at gamma={d.gamma:.6g}"
            if ok
            else "violated for (descendant, ancestor, vertex, dist): "
            + ", ".join(str(t) for t in violations[:5])
        )
    else:
        ok, detail = False, "skipped: partition or tree structure is broken"
    bullets["buffer"] = (ok, detail)

    return BcdReport(
        bullets=bullets,
        delta_measured=delta_measured,
        w_measured=w_measured,
        buffer_violations=violations,
    )


# ---------------------------------------------------------------------------
# the supernode DAG


@dataclass
class SupernodeDag:
    arcs: dict  # supernode id -> tuple of ancestor ids (sorted)

    def nodes(self) -> list[int]:
        return sorted(self.arcs)

    def out_degree(self, sid: int) -> int:
        return len(self.arcs[sid])


def build_dag(g: WeightedGraph, d: BufferedCopDecomposition) -> SupernodeDag:
    """Directed graph on supernodes: an arc to every adjacent ancestor.

    Verifies the transitive-DAG rule (two out-neighbours of a node are
    themselves connected by an arc) and the out-degree bound w; both
    failures signal a broken decomposition and raise BcdError.
    """
    vsn = {}
    for s in d.supernodes:
        for v in s.vertices:
            vsn[v] = s.id
    ancestors = {s.id: set(d.ancestors(s.id)) for s in d.supernodes}
    arcs: dict[int, set[int]] = {s.id: set() for s in d.supernodes}
    for u, v, _ in g.edges:
        a, b = vsn[u], vsn[v]
        if a == b:
            continue
        if b in ancestors[a]:
            arcs[a].add(b)
        elif a in ancestors[b]:
            arcs[b].add(a)
        else:
            raise BcdError(
                f"edge ({u},{v}) joins unrelated supernodes {a} and {b}; "
                "the partition tree is broken"
            )
    for x, outs in arcs.items():
        if len(outs) > d.w_target:
            raise BcdError(f"supernode {x} has out-degree {len(outs)} > w={d.w_target}")
        row = sorted(outs)
        for i, y in enumerate(row):
            for z in row[i + 1:]:
                if z not in arcs[y] and y not in arcs[z]:
                    raise BcdError(
                        f"transitive rule broken at {x}: out-neighbours {y},{z} unlinked"
                    )
    return SupernodeDag(arcs={x: tuple(sorted(v)) for x, v in arcs.items()})


def directed_ball(dag: SupernodeDag, eta: int, q: int) -> set[int]:
    """Supernodes reachable from eta along at most q arcs."""
    reached = {eta}
    frontier = [eta]
    for _ in range(q):
        nxt = []
        for x in frontier:
            for y in dag.arcs.get(x, ()):
                if y not in reached:
                    reached.add(y)
                    nxt.append(y)
        frontier = nxt
    return reached


def check_extended_buffer(
    g: WeightedGraph,
    d: BufferedCopDecomposition,
    dag: SupernodeDag,
    eta: int,
    q: int,
    _field_cache: dict | None = None,
) -> list[tuple[int, float, float, bool]]:
    """Ancestors outside the directed (2q+1)-ball must be far.

    For every ancestor eta' of eta not reachable within 2q+1 arcs, all of
    eta must sit at distance > (q+1) * gamma from eta' in G[dom(eta')].
    Returns rows (ancestor id, min distance, threshold, ok).
    """
    tol = tolerance(g)
    ball_ids = directed_ball(dag, eta, 2 * q + 1)
    threshold = (q + 1) * d.gamma
    rows = []
    sn = d.supernode(eta)
    for anc in d.ancestors(eta):
        if anc in ball_ids:
            continue
        a = d.supernode(anc)
        if _field_cache is not None and anc in _field_cache:
            dist = _field_cache[anc]
        else:
            dist, _ = _dijkstra(g, a.vertices, a.domain)
            if _field_cache is not None:
                _field_cache[anc] = dist
        dmin = min(float(dist[v]) for v in sn.vertices)
        rows.append((anc, dmin, threshold, dmin > threshold - tol))
    return rows


# ---------------------------------------------------------------------------
# serialization


def bcd_to_json(d: BufferedCopDecomposition) -> dict:
    return {
        "params_target": {"delta": d.delta_target, "gamma": d.gamma, "w": d.w_target},
        "params_measured": {"delta": d.delta_measured, "w": d.w_measured},
        "supernodes": [
            {
                "id": s.id,
                "vertices": sorted(s.vertices),
                "skeleton_root": s.skeleton_root,
                "skeleton_parent": {str(v): p for v, p in sorted(s.skeleton_parent.items())},
                "parent": s.parent,
                "domain": sorted(s.domain),
                "adjacent_ancestors": sorted(s.adjacent_ancestors),
            }
            for s in d.supernodes
        ],
    }


def bcd_from_json(data: dict) -> BufferedCopDecomposition:
    supers = [
        Supernode(
            id=s["id"],
            vertices=frozenset(s["vertices"]),
            skeleton_root=s["skeleton_root"],
            skeleton_parent={int(v): p for v, p in s["skeleton_parent"].items()},
            parent=s["parent"],
            domain=frozenset(s["domain"]),
            adjacent_ancestors=frozenset(s["adjacent_ancestors"]),
        )
        for s in data["supernodes"]
    ]
    return BufferedCopDecomposition(
        supernodes=supers,
        delta_target=data["params_target"]["delta"],
        gamma=data["params_target"]["gamma"],
        w_target=data["params_target"]["w"],
        delta_measured=data["params_measured"]["delta"],
        w_measured=data["params_measured"]["w"],
    )
