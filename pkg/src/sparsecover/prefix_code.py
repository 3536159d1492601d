"""Weighted prefix-free codes over the alphabet {+1, -1}.

Huffman's procedure on a positive measure mu: repeatedly merge the two
lightest elements, labelling the first edge +1 and the second -1.  The
resulting word of x has length at most 2*ceil(log2(mu(X)/mu(x))), which
is what the embedding layer budgets for.

Determinism: ties are broken by element id (insertion order in the
input mapping), and a merged pseudo-element inherits the smaller id of
its parts.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass


@dataclass
class PrefixCode:
    """words: element -> tuple of +1/-1 ints.  mu: the input weights."""

    words: dict
    mu: dict

    @property
    def total(self) -> float:
        return sum(self.mu.values())

    def word(self, x):
        return self.words[x]


def build_code(weights: dict) -> PrefixCode:
    """Huffman code for a positive weight mapping.

    A single element gets the empty word.  Raises ValueError on empty
    input or non-positive weights.
    """
    if not weights:
        raise ValueError("cannot build a code for an empty weight mapping")
    for x, w in weights.items():
        if not (w > 0):
            raise ValueError(f"weight of {x!r} must be positive, got {w}")
    elems = list(weights)
    if len(elems) == 1:
        return PrefixCode(words={elems[0]: ()}, mu=dict(weights))

    # leaves are ids 0..k-1; internal nodes get fresh ids but sort by
    # the smallest leaf id they contain
    children: dict[int, tuple[int, int]] = {}
    heap = [(float(weights[x]), i, i) for i, x in enumerate(elems)]
    heapq.heapify(heap)
    nxt = len(elems)
    while len(heap) > 1:
        wa, ida, a = heapq.heappop(heap)
        wb, idb, b = heapq.heappop(heap)
        children[nxt] = (a, b)  # a took the +1 edge, b the -1 edge
        heapq.heappush(heap, (wa + wb, min(ida, idb), nxt))
        nxt += 1

    words: dict = {}
    root = heap[0][2]

    stack = [(root, ())]
    while stack:
        node, word = stack.pop()
        if node < len(elems):
            words[elems[node]] = word
            continue
        a, b = children[node]
        stack.append((a, word + (1,)))
        stack.append((b, word + (-1,)))
    return PrefixCode(words=words, mu=dict(weights))


def code_length_bound(mu_total: float, mu_x: float) -> int:
    """2 * ceil(log2(mu_total / mu_x)), computed robustly at boundaries."""
    ratio = mu_total / mu_x
    k = max(0, math.ceil(math.log2(ratio)))
    while 2.0 ** k < ratio and not math.isclose(2.0 ** k, ratio, rel_tol=1e-12):
        k += 1
    while k > 0 and (2.0 ** (k - 1) >= ratio or math.isclose(2.0 ** (k - 1), ratio, rel_tol=1e-12)):
        k -= 1
    return 2 * k


def first_disagreement(code: PrefixCode, x, y) -> tuple[int, int, int]:
    """First index (1-based) where the words of x and y differ, with the
    two symbols.  Prefix-freeness guarantees such an index exists for
    distinct elements; raises ValueError for identical words."""
    wx, wy = code.words[x], code.words[y]
    for i, (sx, sy) in enumerate(zip(wx, wy)):
        if sx != sy:
            return i + 1, sx, sy
    raise ValueError(f"words of {x!r} and {y!r} do not disagree")


def padded_word(code: PrefixCode, x, target_len: int) -> tuple[int, ...]:
    """Word of x padded with +1 entries to exactly target_len symbols."""
    w = code.words[x]
    if len(w) > target_len:
        raise ValueError(f"word of {x!r} has {len(w)} symbols > target {target_len}")
    return w + (1,) * (target_len - len(w))
