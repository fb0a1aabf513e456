"""Signed graphs: data model, edge-list I/O, matrices, switching, balance test."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Optional, Sequence

import numpy as np

from .errors import EdgeListParseError, GraphValidationError

_SIGN_TOKENS = {"+1": 1, "-1": -1, "+": 1, "-": -1}

Edge = tuple[int, int, int]


@dataclass(frozen=True)
class SignedGraph:
    """Undirected simple graph on vertices ``0..n-1`` with edge signs in {+1, -1}.

    ``edges`` is stored canonically: every triple has ``u < v`` and the tuple is
    sorted by ``(u, v)``.  ``labels`` maps vertex ids back to the names used in
    a label-mode edge list and is ``None`` for numeric input.
    """

    n: int
    edges: tuple[Edge, ...]
    labels: Optional[tuple[str, ...]] = None

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 1:
            raise GraphValidationError(f"vertex count must be an integer >= 1, got {self.n!r}")
        canon = []
        seen = set()
        for u, v, s in self.edges:
            u, v = int(u), int(v)
            if u == v:
                raise GraphValidationError(f"self-loop at vertex {u}")
            if not (0 <= u < self.n and 0 <= v < self.n):
                raise GraphValidationError(f"edge ({u}, {v}) has a vertex outside [0, {self.n})")
            if s not in (1, -1):
                raise GraphValidationError(f"edge ({u}, {v}) has sign {s!r}; expected +1 or -1")
            if u > v:
                u, v = v, u
            if (u, v) in seen:
                raise GraphValidationError(f"duplicate edge ({u}, {v})")
            seen.add((u, v))
            canon.append((u, v, int(s)))
        object.__setattr__(self, "edges", tuple(sorted(canon)))
        if self.labels is not None:
            if len(self.labels) != self.n:
                raise GraphValidationError("label table length must equal n")
            object.__setattr__(self, "labels", tuple(self.labels))

    @property
    def m(self) -> int:
        return len(self.edges)

    @property
    def negative_edges(self) -> tuple[tuple[int, int], ...]:
        return tuple((u, v) for u, v, s in self.edges if s < 0)

    def sign(self, u: int, v: int) -> int:
        """Sign of edge ``{u, v}``; 0 if absent."""
        if u > v:
            u, v = v, u
        return self._signs.get((u, v), 0)

    @cached_property
    def _signs(self) -> dict[tuple[int, int], int]:
        return {(u, v): s for u, v, s in self.edges}

    def neighbors(self) -> list[list[tuple[int, int]]]:
        """Adjacency lists of ``(neighbor, sign)`` pairs, neighbors ascending."""
        adj: list[list[tuple[int, int]]] = [[] for _ in range(self.n)]
        for u, v, s in self.edges:
            adj[u].append((v, s))
            adj[v].append((u, s))
        for row in adj:
            row.sort()
        return adj

    def degrees(self) -> np.ndarray:
        deg = np.zeros(self.n, dtype=int)
        for u, v, _ in self.edges:
            deg[u] += 1
            deg[v] += 1
        return deg

    def is_connected(self) -> bool:
        return len(connected_components(self)) == 1


def from_edges(n: int, edges: Iterable[Sequence[int]]) -> SignedGraph:
    return SignedGraph(n, tuple((int(u), int(v), int(s)) for u, v, s in edges))


def parse_edge_list(text: str) -> SignedGraph:
    """Parse ``u v s`` lines into a graph.

    Signs may be written ``+1``, ``-1``, ``+`` or ``-``; ``#`` starts a comment.
    Vertex tokens that are all non-negative integers are used as ids directly
    (n = 1 + max id).  Otherwise every vertex token is treated as a label and
    ids are assigned in order of first appearance.
    """
    rows = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 3:
            raise EdgeListParseError(lineno, f"expected 3 fields 'u v sign', got {len(parts)}")
        a, b, tok = parts
        if tok not in _SIGN_TOKENS:
            raise EdgeListParseError(lineno, f"bad sign {tok!r}; use +1, -1, + or -")
        rows.append((lineno, a, b, _SIGN_TOKENS[tok]))

    numeric = all(a.isdigit() and b.isdigit() for _, a, b, _ in rows)
    labels: Optional[list[str]] = None
    if numeric:
        ids = [(int(a), int(b)) for _, a, b, _ in rows]
        n = 1 + max((max(p) for p in ids), default=0)
    else:
        labels = []
        index: dict[str, int] = {}
        ids = []
        for _, a, b, _ in rows:
            for name in (a, b):
                if name not in index:
                    index[name] = len(labels)
                    labels.append(name)
            ids.append((index[a], index[b]))
        n = max(len(labels), 1)

    seen: dict[tuple[int, int], int] = {}
    edges = []
    for (lineno, a, b, s), (u, v) in zip(rows, ids):
        if u == v:
            raise GraphValidationError(f"line {lineno}: self-loop at {a!r}")
        key = (min(u, v), max(u, v))
        if key in seen:
            raise GraphValidationError(
                f"line {lineno}: duplicate edge {a} {b} (first seen on line {seen[key]})"
            )
        seen[key] = lineno
        edges.append((u, v, s))
    return SignedGraph(n, tuple(edges), tuple(labels) if labels is not None else None)


def read_edge_list(path) -> SignedGraph:
    with open(path, encoding="utf-8") as fh:
        return parse_edge_list(fh.read())


def format_edge_list(g: SignedGraph) -> str:
    """Canonical text form, sorted by (u, v) with signs written +1/-1."""
    name = (lambda i: g.labels[i]) if g.labels is not None else str
    lines = [f"{name(u)} {name(v)} {'+1' if s > 0 else '-1'}" for u, v, s in g.edges]
    return "".join(line + "\n" for line in lines)


def adjacency(g: SignedGraph) -> np.ndarray:
    A = np.zeros((g.n, g.n))
    for u, v, s in g.edges:
        A[u, v] = A[v, u] = s
    return A


def abs_adjacency(g: SignedGraph) -> np.ndarray:
    return np.abs(adjacency(g))


def signed_laplacian(g: SignedGraph) -> np.ndarray:
    """Unsigned degree on the diagonal, ``-A`` off the diagonal."""
    A = adjacency(g)
    return np.diag(np.abs(A).sum(axis=1)) - A


def lerman_ghosh_laplacian(g: SignedGraph, chi: float) -> np.ndarray:
    if chi < 0:
        raise ValueError(f"chi must be nonnegative, got {chi}")
    return chi * np.eye(g.n) - adjacency(g)


def switch(g: SignedGraph, subset: Iterable[int]) -> SignedGraph:
    """Flip the sign of every edge with exactly one endpoint in ``subset``."""
    S = set(subset)
    bad = [x for x in S if not (isinstance(x, (int, np.integer)) and 0 <= x < g.n)]
    if bad:
        raise GraphValidationError(f"switching set contains invalid vertices {sorted(map(str, bad))}")
    edges = tuple((u, v, -s if (u in S) != (v in S) else s) for u, v, s in g.edges)
    return SignedGraph(g.n, edges, g.labels)


def connected_components(g: SignedGraph) -> list[list[int]]:
    adj = g.neighbors()
    seen = [False] * g.n
    comps = []
    for root in range(g.n):
        if seen[root]:
            continue
        seen[root] = True
        comp = [root]
        queue = deque([root])
        while queue:
            x = queue.popleft()
            for y, _ in adj[x]:
                if not seen[y]:
                    seen[y] = True
                    comp.append(y)
                    queue.append(y)
        comps.append(sorted(comp))
    return comps


def is_balanced(g: SignedGraph) -> tuple[bool, Optional[tuple[int, ...]]]:
    """Harary test by signed BFS 2-coloring.

    Returns ``(True, coloring)`` where coloring[v] is 0 or 1, positive edges
    join equal colors and negative edges join different colors; otherwise
    ``(False, None)``.  Each component's root gets color 0.
    """
    adj = g.neighbors()
    color = [-1] * g.n
    for root in range(g.n):
        if color[root] >= 0:
            continue
        color[root] = 0
        queue = deque([root])
        while queue:
            x = queue.popleft()
            for y, s in adj[x]:
                want = color[x] if s > 0 else 1 - color[x]
                if color[y] < 0:
                    color[y] = want
                    queue.append(y)
                elif color[y] != want:
                    return False, None
    return True, tuple(color)


def all_positive(g: SignedGraph) -> SignedGraph:
    return SignedGraph(g.n, tuple((u, v, 1) for u, v, _ in g.edges), g.labels)


def petersen_edges() -> list[tuple[int, int]]:
    """Outer pentagon 0..4, spokes i--i+5, inner pentagram 5..9."""
    outer = [(i, (i + 1) % 5) for i in range(5)]
    spokes = [(i, i + 5) for i in range(5)]
    inner = [(5 + i, 5 + (i + 2) % 5) for i in range(5)]
    return sorted(tuple(sorted(e)) for e in outer + spokes + inner)


def random_signed_graph(n: int, p: float, neg_fraction: float, rng: np.random.Generator,
                        connected: bool = True, max_tries: int = 1000) -> SignedGraph:
    """Erdos-Renyi G(n, p) with each edge negative independently w.p. ``neg_fraction``.

    With ``connected=True`` samples are redrawn until connected.
    """
    for _ in range(max_tries):
        iu, ju = np.triu_indices(n, k=1)
        keep = rng.random(iu.size) < p
        signs = np.where(rng.random(iu.size) < neg_fraction, -1, 1)
        g = SignedGraph(n, tuple(zip(iu[keep].tolist(), ju[keep].tolist(), signs[keep].tolist())))
        if not connected or n == 1 or g.is_connected():
            return g
    raise RuntimeError(f"no connected G({n}, {p}) sample in {max_tries} tries")
