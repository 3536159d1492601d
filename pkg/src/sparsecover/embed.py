"""Low-dimensional ell_infinity embeddings from partition ladders.

The core map sends a vertex through a refinement chain of partitions:
at every level each cluster gets a +1/-1 prefix codeword (Huffman,
weighted by cluster size), and the vertex contributes the codeword
scaled by its boundary distance, the distance to the nearest vertex
outside its cluster.  Recursing inside clusters and reusing coordinate
positions across sibling clusters keeps the dimension at
2*ceil(log2 n) + 2k for k levels instead of growing with the number of
clusters.  The map never expands distances by more than 2, and two
vertices split at some level end up at least the sum of their boundary
distances apart.

On top of that sit three assemblies:

  embed_full        one hierarchy per (ladder, scale-grid shift); the
                    grid of anchors (1+eps)^q makes sure every pair is
                    seen at a scale proportional to its distance.
  remove_aspect     aspect-ratio reduction: embed truncated copies of
                    the graph scale by scale and let scales three apart
                    share coordinates, so the dimension depends on the
                    truncated aspect ratio rather than the global one.
  embed_minor_free_3eps
                    subdivide edges so that cluster boundaries fall on
                    short edge pieces, embed only the original vertices,
                    and certify a near-3 contraction bound when the
                    measured cover padding supports it.

Claimed guarantees are carried on the Embedding and are always stated
in terms of measured quantities, never of what the theory promises.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .cover import cover_scheme, preset
from .graph import (
    WeightedGraph,
    all_pairs,
    aspect_ratio,
    distance_extremes,
    nearest_other_label,
    subdivide,
    tolerance,
    truncate_weights,
)
from .laminar import scale_of, build_ladders
from .prefix_code import build_code, code_length_bound, padded_word

INF = float("inf")


class EmbedError(ValueError):
    """Raised on invalid embedding inputs or broken certificates."""


@dataclass
class Embedding:
    """coords: one row per vertex.  rho / xi are the claimed expansion
    and contraction factors: for every pair the construction promises
    ||f(x)-f(y)|| <= rho * d(x,y) and ||f(x)-f(y)|| >= d(x,y) / xi."""

    coords: np.ndarray
    rho: float
    xi: float
    meta: dict = field(default_factory=dict)

    @property
    def n(self) -> int:
        return int(self.coords.shape[0])

    @property
    def k(self) -> int:
        return int(self.coords.shape[1])


def _ceil_log2(n: int) -> int:
    return (n - 1).bit_length()


def hierarchy_dimension(n: int, k: int) -> int:
    """Coordinates needed for n points and k partition levels."""
    return 2 * _ceil_log2(n) + 2 * k


def boundary_distances(g: WeightedGraph, partition) -> np.ndarray:
    """Per-vertex distance to the nearest vertex outside its cluster.

    +inf where the partition has a single cluster (no outside).
    """
    labels = [-1] * g.n
    for t, cl in enumerate(partition):
        for v in cl:
            if labels[v] != -1:
                raise EmbedError(f"vertex {v} appears in two clusters")
            labels[v] = t
    if any(l == -1 for l in labels):
        raise EmbedError(
            f"vertex {labels.index(-1)} is not covered by the partition"
        )
    return nearest_other_label(g, labels)


def _check_chain(n: int, partitions) -> None:
    for idx, part in enumerate(partitions):
        seen: set[int] = set()
        for cl in part:
            if not cl:
                raise EmbedError(f"level {idx} contains an empty cluster")
            if cl & seen:
                raise EmbedError(f"level {idx} is not a partition")
            seen |= cl
        if seen != set(range(n)):
            raise EmbedError(f"level {idx} does not cover the vertex set")
    for idx in range(len(partitions) - 1):
        owner: dict[int, int] = {}
        for t, cl in enumerate(partitions[idx + 1]):
            for v in cl:
                owner[v] = t
        for cl in partitions[idx]:
            if len({owner[v] for v in cl}) != 1:
                raise EmbedError(
                    f"cluster {sorted(cl)[:4]}... of level {idx} straddles "
                    f"clusters of level {idx + 1}"
                )


def embed_hierarchy(g: WeightedGraph, partitions, boundaries=None) -> Embedding:
    """Embed one refinement chain (finest partition first).

    Produces exactly hierarchy_dimension(n, len(partitions)) coordinates.
    Expansion is at most 2.  If some level puts x and y in different
    clusters, then ||f(x)-f(y)|| is at least the sum of their boundary
    distances at that level.

    boundaries may carry precomputed boundary_distances arrays, one per
    level; they are recomputed otherwise.
    """
    n = g.n
    parts = [[frozenset(cl) for cl in p] for p in partitions]
    if not parts:
        raise EmbedError("need at least one partition level")
    _check_chain(n, parts)
    if boundaries is None:
        boundaries = [boundary_distances(g, p) for p in parts]
    k = len(parts)
    target = hierarchy_dimension(n, k)
    coords = np.zeros((n, target))

    def fill(ground: frozenset, level: int, off: int) -> None:
        if len(ground) <= 1 or level < 0:
            return
        sub = [cl for cl in parts[level] if cl <= ground]
        if sum(len(cl) for cl in sub) != len(ground):
            raise EmbedError(
                f"level {level} does not refine the cluster {sorted(ground)[:4]}..."
            )
        if len(sub) == 1:
            # trivial level: two budgeted coordinates stay zero
            fill(ground, level - 1, off)
            return
        code = build_code({j: len(cl) for j, cl in enumerate(sub)})
        n_ground = len(ground)
        for j, cl in enumerate(sub):
            width = code_length_bound(n_ground, len(cl))
            word = padded_word(code, j, width)
            # ceil(log2 a) + ceil(log2 b) <= ceil(log2 ab) + 1, so the
            # codeword plus the child block always fit this level's budget
            assert width + hierarchy_dimension(len(cl), level) <= target - off
            for v in cl:
                b = float(boundaries[level][v])
                if math.isinf(b):
                    raise EmbedError(
                        f"vertex {v} has an infinite boundary distance at "
                        f"level {level}; the graph must be connected"
                    )
                row = coords[v]
                for t, sgn in enumerate(word):
                    row[off + t] = sgn * b
            fill(cl, level - 1, off + width)

    fill(frozenset(range(n)), k - 1, 0)
    return Embedding(
        coords=coords,
        rho=2.0,
        xi=INF,
        meta={"levels": k, "dimension": target},
    )

# ---------------------------------------------------------------------------
# full embedding: one hierarchy per (ladder, anchor-grid shift)


def _grid_steps(ladder_ratio: float, spacing: float) -> int:
    """Largest anchor exponent: ceil(log_spacing(ladder_ratio))."""
    ratio = math.log(ladder_ratio) / math.log(spacing)
    return max(0, math.ceil(round(ratio, 9)))


def _full_core(g: WeightedGraph, r: int, epsilon: float, q: int, slack: float):
    """Shared builder: coordinates plus the measured padding certificate.

    Returns (coords, info).  The (1+epsilon) budget is split in two:
    ladders run at eps_lad = epsilon / 8 (their clusters have diameter
    at most (1+eps_lad) times the level scale), and the grid of anchors
    is spaced by (1+epsilon) / (1+eps_lad).  For any pair at distance d
    some shift then holds a level scale Delta with
    (1+eps_lad) * Delta < d <= (1+epsilon) * Delta: the pair is split at
    that level of every ladder of that shift, so the embedding separates
    it by that level's measured padding.  info["beta_measured"] is the
    worst ratio scale / padding over all shifts and levels, which makes
    d / ((1+epsilon) * beta_measured) a floor for every pair and
    (1+epsilon) * beta_measured the contraction certificate.
    """
    n = g.n
    eps_lad = epsilon / 8
    spacing = (1 + epsilon) / (1 + eps_lad)
    trivial_info = {
        "tau": 0, "grid": 0, "top_level": 0,
        "beta_scheme": 1.0, "beta_measured": 1.0,
        "dim_per_hierarchy": 0, "eps_ladder": eps_lad,
        "grid_spacing": spacing,
    }
    empty_detail = {"ladder_sets": [], "bounds": {}, "anchors": []}
    if n <= 1:
        return np.zeros((n, 0)), trivial_info, empty_detail
    tol = tolerance(g)
    dmin, phi = distance_extremes(g)
    if phi == 0:
        # every pair at distance zero: the empty embedding is exact
        return np.zeros((n, 0)), trivial_info, empty_detail
    if not math.isfinite(phi) or not math.isfinite(dmin):
        raise EmbedError("the graph must be connected")
    scheme, beta = cover_scheme(g, r, q, slack=slack)
    steps = _grid_steps(4 * beta / eps_lad, spacing)

    ladder_sets = []
    for shift in range(steps + 1):
        anchor = dmin * spacing**shift
        ladder_sets.append(
            build_ladders(g, scheme, a=anchor, epsilon=eps_lad, beta=beta)
        )
    tau = max(len(ls) for ls in ladder_sets)
    for shift in range(steps + 1):
        if len(ladder_sets[shift]) < tau:
            anchor = dmin * spacing**shift
            ladder_sets[shift] = build_ladders(
                g, scheme, a=anchor, epsilon=eps_lad, beta=beta, tau=tau
            )

    # grids anchored higher see fewer scales; the shift-0 grid is deepest
    top = ladder_sets[0][0].top - 1
    dim_per = hierarchy_dimension(n, top + 2)
    everything = [frozenset(range(n))]

    blocks = []
    beta_measured = 0.0
    anchors = [dmin * spacing**shift for shift in range(steps + 1)]
    bounds: dict = {}
    for shift, ladders in enumerate(ladder_sets):
        anchor = anchors[shift]
        pads = {}
        for j_idx, lad in enumerate(ladders):
            bnds = []
            for i in range(-1, top + 1):
                level = lad.levels.get(i, everything)
                bnds.append(boundary_distances(g, level))
                if i <= lad.top - 1:
                    prev = pads.get(i)
                    pads[i] = bnds[-1] if prev is None else np.maximum(prev, bnds[-1])
            bounds[(shift, j_idx)] = bnds
            partitions = [lad.levels.get(i, everything) for i in range(-1, top + 1)]
            emb = embed_hierarchy(g, partitions, boundaries=bnds)
            blocks.append(emb.coords)
        for i, best in pads.items():
            pad_min = float(best.min())
            scale = scale_of(anchor, beta, eps_lad, i)
            if pad_min <= 0:
                raise EmbedError(
                    f"no padding at level {i} of grid shift {shift}"
                )
            beta_measured = max(beta_measured, scale / pad_min)
    # the ladders certify padding scale / (beta (1+eps_lad)); anything
    # worse means a broken certificate, not just a loose one
    if beta_measured > beta * (1 + eps_lad) + tol:
        raise EmbedError(
            f"measured ladder padding supports only beta {beta_measured:.6g}, "
            f"scheme promised {beta * (1 + eps_lad):.6g}"
        )

    coords = np.hstack(blocks) if blocks else np.zeros((n, 0))
    info = {
        "tau": tau,
        "grid": steps + 1,
        "top_level": top,
        "beta_scheme": beta,
        "beta_measured": beta_measured,
        "dim_per_hierarchy": dim_per,
        "eps_ladder": eps_lad,
        "grid_spacing": spacing,
        "dmin": dmin,
        "phi": phi,
    }
    assert coords.shape[1] == tau * (steps + 1) * dim_per
    detail = {"ladder_sets": ladder_sets, "bounds": bounds, "anchors": anchors}
    return coords, info, detail


def full_claim_bound(r: int, epsilon: float, q: int | None = None,
                     slack: float = 4.0) -> tuple[float, float]:
    """(expansion, contraction) every embed_full with these parameters
    can claim, regardless of the input graph.  Used to plan aspect
    removal, where the per-scale claims must be bounded in advance."""
    if q is None:
        q = preset(r)
    beta_scheme = slack * 4 * (2 * r / q + 1)
    return 2.0, (1 + epsilon) * (1 + epsilon / 8) * beta_scheme


def embed_full(g: WeightedGraph, r: int, epsilon: float,
               q: int | None = None, slack: float = 4.0) -> Embedding:
    """Embed a graph with no K_r minor into ell_infinity.

    Claims expansion 2 and contraction (1+epsilon) * beta_measured,
    where beta_measured is the padding the built ladders actually
    achieved, at most (1+epsilon/8) times the scheme's formula beta.
    The slack default is looser than the cover scheme's own: the scale
    grid probes every regime of the graph, including the ones where
    repair merges inflate the decomposition radius the most.
    """
    if not 0 < epsilon <= 1:
        raise EmbedError("epsilon must be in (0, 1]")
    if q is None:
        q = preset(r)
    coords, info, _ = _full_core(g, r, epsilon, q, slack)
    xi = (1 + epsilon) * info["beta_measured"]
    meta = dict(info)
    meta.update({"epsilon": epsilon, "q": q, "slack": slack, "r": r})
    return Embedding(coords=coords, rho=2.0, xi=max(xi, 1 + epsilon), meta=meta)


# ---------------------------------------------------------------------------
# aspect-ratio removal: embed truncated copies, sum residue classes mod 3


@dataclass
class TruncationReport:
    """The three properties a weight-truncated graph must satisfy."""

    alpha: float
    s: float
    checks: dict  # name -> (ok, detail)

    @property
    def passed(self) -> bool:
        return all(ok for ok, _ in self.checks.values())

    def lines(self) -> list[str]:
        return [
            f"{'pass' if ok else 'FAIL'} {name}: {detail}"
            for name, (ok, detail) in self.checks.items()
        ]


def truncation_profile(g: WeightedGraph, alpha: float, s: float) -> TruncationReport:
    """Check, by exact distance computation, what truncating weights at
    alpha (cap above alpha, zero at or below alpha/s^2) does to the metric:

      upper:  truncated distances never exceed min(original, n * alpha);
      band:   pairs at original distance in [alpha/s, alpha] shrink by a
              factor of at most (1 - n/s);
      aspect: the truncated aspect ratio is at most n * s^2.
    """
    if alpha <= 0 or s <= 1:
        raise EmbedError("need alpha > 0 and s > 1")
    n = g.n
    tol = tolerance(g)
    gt = truncate_weights(g, alpha, s)
    d0 = all_pairs(g)
    d1 = all_pairs(gt)
    checks: dict = {}

    cap = np.minimum(d0, n * alpha)
    over = d1 - cap
    worst = float(over.max(initial=0.0))
    checks["upper"] = (
        worst <= tol,
        f"max excess over min(d, n*alpha) is {worst:.3g}"
        if worst <= tol
        else f"pair {np.unravel_index(int(over.argmax()), over.shape)} exceeds "
        f"min(d, n*alpha) by {worst:.6g}",
    )

    band = (d0 >= alpha / s) & (d0 <= alpha)
    floor = (1 - n / s) * d0 - tol
    bad = band & (d1 < floor)
    count = int(band.sum()) // 2
    checks["band"] = (
        not bad.any(),
        f"{count} pairs in [alpha/s, alpha] all keep (1 - n/s) of their distance"
        if not bad.any()
        else f"pair {np.unravel_index(int(bad.argmax()), bad.shape)} fell below "
        "(1 - n/s) of its original distance",
    )

    ar = aspect_ratio(gt)
    bound = n * s * s
    ok = ar <= bound * (1 + 1e-9) or not math.isfinite(bound)
    checks["aspect"] = (
        ok,
        f"aspect ratio {ar:.6g} within n*s^2 = {bound:.6g}"
        if ok
        else f"aspect ratio {ar:.6g} exceeds n*s^2 = {bound:.6g}",
    )

    return TruncationReport(alpha=alpha, s=s, checks=checks)


def remove_aspect(g: WeightedGraph, embed_at, rho: float, beta: float,
                  epsilon: float) -> Embedding:
    """Make an embedding's dimension independent of the aspect ratio.

    embed_at(graph) must return an Embedding claiming expansion at most
    rho and contraction at most beta on any weight-truncated copy of g.
    The graph is truncated at geometrically shrinking caps alpha_i
    (ratio s = 8 * rho * beta * n / epsilon), each copy embedded, and
    scales congruent mod 3 summed into shared coordinates, so the result
    has three blocks of the largest per-scale dimension.  For any pair
    there is one scale whose truncation preserves its distance almost
    exactly, and the two neighbors of its residue class are a factor s^3
    away, so the other scales in the class contribute only a geometric
    tail.  Claims expansion (1+epsilon) * rho and contraction
    (1+epsilon) * beta.
    """
    if not 0 < epsilon < 0.5:
        raise EmbedError("epsilon must be in (0, 0.5)")
    if rho < 1 or beta < 1:
        raise EmbedError("rho and beta must be at least 1")
    n = g.n
    rho_out = (1 + epsilon) * rho
    xi_out = (1 + epsilon) * beta
    s = 8 * rho * beta * n / epsilon
    dmin, phi = distance_extremes(g)
    if n <= 1 or phi == 0:
        return Embedding(
            coords=np.zeros((n, 0)), rho=rho_out, xi=xi_out,
            meta={"s": s, "scales": [], "kmax": 0, "epsilon": epsilon},
        )
    if not math.isfinite(phi):
        raise EmbedError("the graph must be connected")

    # smallest count with s^(deepest+1) above the aspect ratio, so the
    # per-scale bands (alpha_i / s, alpha_i] cover every distance
    deepest = max(0, math.floor(round(math.log(phi / dmin) / math.log(s), 9)))
    scales = [phi * s**-i for i in range(deepest + 1)]
    parts = []
    for i, alpha in enumerate(scales):
        gi = truncate_weights(g, alpha, s)
        fi = embed_at(gi)
        if fi.rho > rho + 1e-9 or fi.xi > beta + 1e-9:
            raise EmbedError(
                f"scale {i} (alpha {alpha:.6g}) claims expansion {fi.rho:.6g} "
                f"and contraction {fi.xi:.6g}, the plan allows {rho:.6g} "
                f"and {beta:.6g}"
            )
        parts.append(fi)

    kmax = max(fi.k for fi in parts)
    residues = [np.zeros((n, kmax)) for _ in range(3)]
    for i, fi in enumerate(parts):
        residues[i % 3][:, : fi.k] += fi.coords
    coords = np.hstack(residues)
    return Embedding(
        coords=coords,
        rho=rho_out,
        xi=xi_out,
        meta={
            "s": s,
            "scales": scales,
            "per_scale_dims": [fi.k for fi in parts],
            "kmax": kmax,
            "epsilon": epsilon,
            "rho_at": rho,
            "beta_at": beta,
        },
    )


# ---------------------------------------------------------------------------
# near-3 distortion: embed the subdivided graph, certify from measurements


def _near3_certificate(n_orig: int, d_orig: np.ndarray, info: dict,
                       detail: dict, r: int, q: int, tol: float):
    """Measured-contraction certificate over the subdivided ladders.

    beta_pad is the padding the unslacked cover formula would promise,
    (1+eps_lad) * 4 * (2r/q + 1).  The gate asks that at every grid
    shift, every level and every original vertex, some ladder pads the
    vertex to scale / beta_pad.  When it holds, any original pair at
    distance d can point at the largest available scale with
    kappa_eff * scale < d: the minimizing ladder's cluster around x is
    too small (in original-vertex eccentricity) to contain y, so the
    pair separates by at least scale / beta_pad, and the scale grid is
    dense enough that scale >= d / (kappa_eff * spacing).  Returns
    (certified, kappa_eff, beta_pad, xi, witness); witness names the
    first (shift, level, vertex) whose padding falls short.
    """
    eps_lad = info["eps_ladder"]
    beta_pad = (1 + eps_lad) * 4 * (2 * r / q + 1)
    beta_s = info["beta_scheme"]
    dmin, phi = info["dmin"], info["phi"]
    kappa = 0.0
    max_scale = 0.0
    for shift, ladders in enumerate(detail["ladder_sets"]):
        anchor = detail["anchors"][shift]
        native_top = ladders[0].top - 1
        for i in range(-1, native_top + 1):
            delta = dmin if i == -1 else scale_of(anchor, beta_s, eps_lad, i)
            if i >= 0:
                max_scale = max(max_scale, delta)
            floor = delta / beta_pad - tol
            best = np.full(n_orig, INF)
            for j, lad in enumerate(ladders):
                bnd = detail["bounds"][(shift, j)][i + 1][:n_orig]
                ecc = np.zeros(n_orig)
                for cl in lad.levels[i]:
                    mem = sorted(v for v in cl if v < n_orig)
                    if not mem:
                        continue
                    ecc[mem] = d_orig[np.ix_(mem, mem)].max(axis=1)
                qual = bnd >= floor
                best[qual] = np.minimum(best[qual], ecc[qual])
            short = np.isinf(best)
            if short.any():
                x = int(np.argmax(short))
                got = max(
                    float(detail["bounds"][(shift, j)][i + 1][x])
                    for j in range(len(ladders))
                )
                witness = {
                    "shift": shift, "level": i, "vertex": x,
                    "needed": delta / beta_pad, "got": got,
                }
                return False, kappa, beta_pad, INF, witness
            kappa = max(kappa, float((best / delta).max()))
    # the bump to >= phi / max_scale keeps the top of the scale grid
    # usable; raising kappa only weakens the claimed contraction
    kappa_eff = max(kappa, 1.0, phi / max_scale if max_scale > 0 else 1.0)
    xi = kappa_eff * info["grid_spacing"] * beta_pad
    return True, kappa_eff, beta_pad, xi, None


def embed_minor_free_3eps(g: WeightedGraph, r: int, epsilon: float,
                          size_cap: int = 2500) -> Embedding:
    """Embedding tuned for distortion near 3 instead of dimension.

    Every edge is subdivided into ceil(1/epsilon) pieces and the pieced
    graph is embedded with the preset cover count q = ceil(8r/epsilon);
    only the rows of the original vertices are kept.  On original pairs any
    cluster boundary is crossed on a short piece, so the claimed
    expansion drops to 1 + 1/pieces.  The claimed contraction is the
    generic (1+epsilon) * beta_measured unless the measured padding
    certificate fires (meta["near3_certified"]), in which case the
    smaller kappa_eff * spacing * beta_pad applies.

    Refuses graphs whose subdivision exceeds size_cap vertices; a larger
    epsilon subdivides less.
    """
    if not 0 < epsilon <= 0.5:
        raise EmbedError("epsilon must be in (0, 0.5]")
    if r < 3:
        raise EmbedError("r must be at least 3")
    pieces = math.ceil(round(1 / epsilon, 9))
    q3 = preset(r, epsilon)
    if g.n <= 1:
        return Embedding(
            coords=np.zeros((g.n, 0)), rho=1.0, xi=1.0,
            meta={"epsilon": epsilon, "r": r, "q": q3, "pieces": pieces,
                  "subdivided_n": g.n, "near3_certified": True},
        )
    gt, _ = subdivide(g, pieces)
    if gt.n > size_cap:
        raise EmbedError(
            f"subdividing into {pieces} pieces per edge needs {gt.n} "
            f"vertices, the cap is {size_cap}; a larger epsilon "
            f"subdivides less"
        )
    coords_all, info, detail = _full_core(gt, r, epsilon, q3, slack=4.0)
    coords = coords_all[: g.n].copy()
    rho = 1 + 1 / pieces
    xi_generic = max((1 + epsilon) * info["beta_measured"], 1 + epsilon)
    if detail["ladder_sets"]:
        certified, kappa, beta_pad, xi_near3, witness = _near3_certificate(
            g.n, all_pairs(g), info, detail, r, q3, tolerance(gt)
        )
    else:
        # subdivided graph had no positive distance: nothing to certify
        beta_pad = (1 + info["eps_ladder"]) * 4 * (2 * r / q3 + 1)
        certified, kappa, xi_near3, witness = True, 1.0, xi_generic, None
    xi = min(xi_generic, xi_near3) if certified else xi_generic
    meta = dict(info)
    meta.update({
        "epsilon": epsilon, "r": r, "q": q3, "pieces": pieces,
        "subdivided_n": gt.n, "near3_certified": certified,
        "kappa": kappa, "beta_pad": beta_pad,
        "xi_generic": xi_generic, "xi_near3": xi_near3,
        "gate_witness": witness,
    })
    return Embedding(coords=coords, rho=rho, xi=xi, meta=meta)


# ---------------------------------------------------------------------------
# measuring what an embedding actually does


@dataclass
class DistortionReport:
    """Exact per-pair comparison of an embedding against the metric.

    rho is the largest measured expansion ||f(x)-f(y)|| / d(x,y), xi the
    largest measured contraction d(x,y) / ||f(x)-f(y)||, and distortion
    their product.  A pair at distance zero whose rows differ shows up
    as rho = +inf, a pair at positive distance with identical rows as
    xi = +inf.  rho_pair and xi_pair name the first pair attaining each
    maximum in row order.
    """

    rho: float
    xi: float
    distortion: float
    pairs: int
    rho_pair: tuple | None
    xi_pair: tuple | None

    @property
    def passed(self) -> bool:
        return math.isfinite(self.rho) and math.isfinite(self.xi)

    def lines(self) -> list[str]:
        return [
            f"pairs      {self.pairs}",
            f"expansion  {self.rho:.6g}  worst {self.rho_pair}",
            f"contraction {self.xi:.6g}  worst {self.xi_pair}",
            f"distortion {self.distortion:.6g}",
        ]


def distortion_report(g: WeightedGraph, e: Embedding,
                      pairs="all") -> DistortionReport:
    """Measure e against g's shortest-path metric, pair by pair.

    pairs is "all" or a sample size; sampling draws a fixed-seed subset
    of vertex pairs, so repeated calls see the same pairs.
    """
    if e.n != g.n:
        raise EmbedError(
            f"embedding has {e.n} rows, the graph has {g.n} vertices"
        )
    d = all_pairs(g)
    iu, ju = np.triu_indices(g.n, k=1)
    if pairs != "all":
        m = int(pairs)
        if m < 0:
            raise EmbedError("pairs must be 'all' or a nonnegative count")
        if m < iu.size:
            sel = np.sort(np.random.default_rng(7).choice(
                iu.size, size=m, replace=False))
            iu, ju = iu[sel], ju[sel]
    total = int(iu.size)
    if total == 0:
        return DistortionReport(rho=1.0, xi=1.0, distortion=1.0, pairs=0,
                                rho_pair=None, xi_pair=None)

    coords = e.coords
    best_rho, rho_at = 0.0, -1
    best_xi, xi_at = 0.0, -1
    any_pos = False
    chunk = max(1, 262144 // max(1, e.k))
    for lo in range(0, total, chunk):
        ic, jc = iu[lo : lo + chunk], ju[lo : lo + chunk]
        fd = np.abs(coords[ic] - coords[jc]).max(axis=1) if e.k else \
            np.zeros(ic.size)
        dd = d[ic, jc]
        pos = dd > 0
        any_pos = any_pos or bool(pos.any())
        with np.errstate(divide="ignore", invalid="ignore"):
            exp = fd / dd       # d == 0: inf if rows differ, nan if equal
            con = dd / fd       # f == 0: inf when d positive
        exp[np.isnan(exp)] = 0.0
        con[~pos] = 0.0
        con[np.isnan(con)] = 0.0
        ce = float(exp.max())
        if ce > best_rho:
            best_rho = ce
            rho_at = lo + int(np.argmax(exp == ce))
        cc = float(con.max())
        if cc > best_xi:
            best_xi = cc
            xi_at = lo + int(np.argmax(con == cc))
        del exp, con, fd
    if not any_pos and rho_at < 0:
        # every pair at distance zero, matched exactly
        return DistortionReport(rho=1.0, xi=1.0, distortion=1.0, pairs=total,
                                rho_pair=None, xi_pair=None)
    rho = best_rho
    xi = best_xi
    dist = rho * xi if math.isfinite(rho) and math.isfinite(xi) else INF
    return DistortionReport(
        rho=rho, xi=xi, distortion=dist, pairs=total,
        rho_pair=(int(iu[rho_at]), int(ju[rho_at])) if rho_at >= 0 else None,
        xi_pair=(int(iu[xi_at]), int(ju[xi_at])) if xi_at >= 0 else None,
    )


def _jsonable(v):
    if isinstance(v, dict):
        return {str(k): _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    if isinstance(v, (bool, np.bool_)):
        return bool(v)
    if isinstance(v, (float, np.floating)):
        f = float(v)
        return f if math.isfinite(f) else repr(f)
    if isinstance(v, (int, np.integer)):
        return int(v)
    return v


def embedding_to_json(e: Embedding) -> dict:
    """Sidecar payload: dimension, claims, and build provenance."""
    return {
        "k": e.k,
        "rho": _jsonable(e.rho),
        "xi": _jsonable(e.xi),
        "provenance": _jsonable(e.meta),
    }
