"""Signed simple-cycle census, cycle graphs and the signed Petersen graphs."""

from __future__ import annotations

import csv
import io
from collections import deque
from dataclasses import dataclass
from typing import Mapping, Optional

from .errors import GraphValidationError
from .graph import SignedGraph, petersen_edges

LMAX_GUARD = 12


@dataclass(frozen=True)
class CycleCensus:
    """``counts[length] = (positive, negative)`` for every length in 3..lmax."""

    lmax: int
    counts: Mapping[int, tuple[int, int]]

    def positive(self, length: int) -> int:
        return self.counts.get(length, (0, 0))[0]

    def negative(self, length: int) -> int:
        return self.counts.get(length, (0, 0))[1]

    def total(self, length: int) -> int:
        return sum(self.counts.get(length, (0, 0)))

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["length", "positive", "negative"])
        for length in range(3, self.lmax + 1):
            w.writerow([length, *self.counts[length]])
        return buf.getvalue()


def cycle_census(g: SignedGraph, lmax: int, allow_large: bool = False) -> CycleCensus:
    """Count simple cycles of length 3..lmax by the sign product of their edges.

    Each cycle is found once: DFS from an anchor vertex through larger vertices
    only, and the two orientations are told apart by requiring the second
    vertex to be smaller than the last.
    """
    if lmax < 3:
        raise GraphValidationError(f"lmax must be >= 3, got {lmax}")
    if lmax > LMAX_GUARD and not allow_large:
        raise GraphValidationError(
            f"lmax={lmax} exceeds the guard of {LMAX_GUARD}; pass allow_large=True to override"
        )
    adj = g.neighbors()
    pos = [0] * (lmax + 1)
    neg = [0] * (lmax + 1)
    on_path = [False] * g.n

    for anchor in range(g.n):
        on_path[anchor] = True

        def dfs(v: int, depth: int, sign: int, second: int):
            for w, s in adj[v]:
                if w == anchor:
                    if depth >= 3 and second < v:
                        if sign * s > 0:
                            pos[depth] += 1
                        else:
                            neg[depth] += 1
                    continue
                if w < anchor or on_path[w] or depth == lmax:
                    continue
                on_path[w] = True
                dfs(w, depth + 1, sign * s, second)
                on_path[w] = False

        for w, s in adj[anchor]:
            if w < anchor:
                continue
            on_path[w] = True
            dfs(w, 2, s, w)
            on_path[w] = False
        on_path[anchor] = False

    return CycleCensus(lmax, {k: (pos[k], neg[k]) for k in range(3, lmax + 1)})


def cycle_graph(n: int, negative_edges: int = 1) -> SignedGraph:
    """Ring 0-1-...-(n-1)-0 whose first ``negative_edges`` ring edges are negative."""
    if n < 3:
        raise GraphValidationError(f"cycle length must be >= 3, got {n}")
    if not 0 <= negative_edges <= n:
        raise GraphValidationError(f"negative_edges must be in [0, {n}], got {negative_edges}")
    ring = [(i, (i + 1) % n) for i in range(n)]
    return SignedGraph(n, tuple((u, v, -1 if i < negative_edges else 1) for i, (u, v) in enumerate(ring)))


# ---------------------------------------------------------------------------
# signed Petersen graphs
#
# Target censuses: (C5-, C6-) for every letter; (C8-, C9-) are also pinned for
# c and d.  Length 7 is not constrained (the Petersen graph has no 7-cycles).
PETERSEN_TARGETS: dict[str, dict[int, int]] = {
    "a": {5: 4, 6: 4},
    "b": {5: 6, 6: 6},
    "c": {5: 8, 6: 4, 8: 8, 9: 8},
    "d": {5: 6, 6: 10, 8: 0, 9: 10},
    "e": {5: 12, 6: 0},
}

# Negative edges of each signing, produced by ``search_petersen_signings`` with
# the BFS spanning tree rooted at 0 kept all-positive.
PETERSEN_NEGATIVE_EDGES: dict[str, tuple[tuple[int, int], ...]] = {
    "a": ((2, 3),),
    "b": ((2, 7), (3, 8)),
    "c": ((2, 7), (6, 8)),
    "d": ((2, 7), (3, 8), (6, 9)),
    "e": ((2, 3), (2, 7), (3, 8), (6, 8), (6, 9), (7, 9)),
}


def petersen_spanning_tree() -> tuple[list[tuple[int, int]], list[tuple[int, int]]]:
    """(tree edges, co-tree edges) for the BFS tree rooted at vertex 0."""
    edges = petersen_edges()
    adj: dict[int, list[int]] = {v: [] for v in range(10)}
    for u, v in edges:
        adj[u].append(v)
        adj[v].append(u)
    seen = {0}
    tree = set()
    queue = deque([0])
    while queue:
        x = queue.popleft()
        for y in sorted(adj[x]):
            if y not in seen:
                seen.add(y)
                tree.add((min(x, y), max(x, y)))
                queue.append(y)
    return sorted(tree), [e for e in edges if e not in tree]


def _signed_petersen(negative: set[tuple[int, int]]) -> SignedGraph:
    return SignedGraph(10, tuple((u, v, -1 if (u, v) in negative else 1) for u, v in petersen_edges()))


def search_petersen_signings(targets: Optional[Mapping[str, Mapping[int, int]]] = None) -> dict[str, SignedGraph]:
    """Exhaustive search over the 2^6 co-tree sign patterns.

    Every signing of the Petersen graph is switching equivalent to one with an
    all-positive spanning tree, so the co-tree patterns cover all switching
    classes.  For each letter the smallest matching pattern (co-tree edges in
    sorted order, bit i set = edge i negative) is returned.
    """
    targets = targets if targets is not None else PETERSEN_TARGETS
    _, cotree = petersen_spanning_tree()
    found: dict[str, SignedGraph] = {}
    for bits in range(1 << len(cotree)):
        neg = {e for i, e in enumerate(cotree) if bits >> i & 1}
        g = _signed_petersen(neg)
        census = cycle_census(g, 9)
        for letter, want in targets.items():
            if letter not in found and all(census.negative(k) == c for k, c in want.items()):
                found[letter] = g
    missing = sorted(set(targets) - set(found))
    if missing:
        raise LookupError(f"no signing matches the census targets for {missing}")
    return found


def petersen_signings() -> dict[str, SignedGraph]:
    """The five unbalanced signed Petersen graphs, keyed 'a'..'e'."""
    return {k: _signed_petersen(set(v)) for k, v in PETERSEN_NEGATIVE_EDGES.items()}
