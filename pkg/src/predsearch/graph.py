"""Weighted (di)graphs, shortest paths, tours, Steiner trees and Euler walks."""

from __future__ import annotations

import hashlib
import heapq
import math
from collections import deque
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Iterator, Sequence

import numpy as np
from scipy.sparse import csgraph

from .errors import CapacityError, GraphValidationError, InfeasibleError, InputError

INF = math.inf
EXACT_TOUR_CAP = 12

Edge = tuple[int, int, float]


@dataclass(frozen=True)
class Graph:
    """Immutable weighted graph on vertices ``0..n-1``.

    Undirected edges are stored once and can be traversed both ways.
    """

    n: int
    edges: tuple[Edge, ...] = ()
    directed: bool = False

    def __post_init__(self) -> None:
        if self.n < 0:
            raise GraphValidationError(f"vertex count must be non-negative, got {self.n}")
        clean = []
        for k, e in enumerate(self.edges):
            if len(e) != 3:
                raise GraphValidationError(f"edge {k} must be (u, v, weight), got {e!r}")
            u, v, w = int(e[0]), int(e[1]), float(e[2])
            if not (0 <= u < self.n and 0 <= v < self.n):
                raise GraphValidationError(f"edge {k} ({u}, {v}) has a vertex outside [0, {self.n})")
            if u == v:
                raise GraphValidationError(f"edge {k} is a self-loop on {u}")
            if not (w >= 0) or math.isinf(w):
                raise GraphValidationError(f"edge {k} ({u}, {v}) has invalid weight {w}")
            clean.append((u, v, w))
        object.__setattr__(self, "edges", tuple(clean))

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[Sequence[float]], directed: bool = False) -> Graph:
        return cls(n, tuple((int(u), int(v), float(w)) for u, v, w in edges), directed)

    @cached_property
    def adjacency(self) -> list[list[tuple[int, float]]]:
        """Out-neighbour lists sorted by neighbour id."""
        adj: list[list[tuple[int, float]]] = [[] for _ in range(self.n)]
        for u, v, w in self.edges:
            adj[u].append((v, w))
            if not self.directed:
                adj[v].append((u, w))
        for row in adj:
            row.sort()
        return adj

    def neighbors(self, v: int) -> list[int]:
        return [u for u, _ in self.adjacency[v]]

    def reverse(self) -> Graph:
        if not self.directed:
            return self
        return Graph(self.n, tuple((v, u, w) for u, v, w in self.edges), True)

    @property
    def total_weight(self) -> float:
        return sum(w for _, _, w in self.edges)

    @cached_property
    def max_degree(self) -> int:
        return max((len(row) for row in self.adjacency), default=0)

    @cached_property
    def is_unweighted(self) -> bool:
        return all(w == 1.0 for _, _, w in self.edges)

    @cached_property
    def fingerprint(self) -> str:
        h = hashlib.sha1(f"{self.n}|{int(self.directed)}|".encode())
        for u, v, w in self.edges:
            h.update(f"{u},{v},{w!r};".encode())
        return h.hexdigest()

    def check_vertex(self, v: int) -> None:
        if not (isinstance(v, (int, np.integer)) and 0 <= v < self.n):
            raise InputError(f"vertex id {v!r} outside [0, {self.n})")


@dataclass(frozen=True)
class DistanceMatrix:
    """All-pairs distances; ``values[u, v]`` is the distance from u to v."""

    values: np.ndarray
    fingerprint: str

    def __getitem__(self, key):
        return self.values[key]

    @property
    def n(self) -> int:
        return self.values.shape[0]


@dataclass(frozen=True)
class Subtree:
    """A tree living inside some host graph."""

    vertices: frozenset[int]
    edges: tuple[Edge, ...] = ()

    @property
    def weight(self) -> float:
        return sum(w for _, _, w in self.edges)

    @cached_property
    def adjacency(self) -> dict[int, list[tuple[int, float]]]:
        adj: dict[int, list[tuple[int, float]]] = {v: [] for v in self.vertices}
        for u, v, w in self.edges:
            adj[u].append((v, w))
            adj[v].append((u, w))
        for row in adj.values():
            row.sort()
        return adj


def dijkstra(g: Graph, source: int) -> tuple[list[float], list[int]]:
    """Single-source distances and parent pointers (parent -1 at source/unreached).

    Ties between equal-length paths go to the smaller predecessor id.
    """
    adj = g.adjacency
    dist = [INF] * g.n
    parent = [-1] * g.n
    dist[source] = 0.0
    heap = [(0.0, source)]
    done = [False] * g.n
    while heap:
        d, x = heapq.heappop(heap)
        if done[x]:
            continue
        done[x] = True
        for y, w in adj[x]:
            nd = d + w
            if nd < dist[y] or (nd == dist[y] and not done[y] and x < parent[y]):
                dist[y] = nd
                parent[y] = x
                heapq.heappush(heap, (nd, y))
    return dist, parent


def _unwind(parent: list[int], source: int, target: int) -> list[int]:
    path = [target]
    while path[-1] != source:
        path.append(parent[path[-1]])
    path.reverse()
    return path


def shortest_path(g: Graph, u: int, v: int) -> tuple[float, list[int]]:
    g.check_vertex(u)
    g.check_vertex(v)
    dist, parent = dijkstra(g, u)
    if math.isinf(dist[v]):
        return INF, []
    return dist[v], _unwind(parent, u, v)


def all_pairs(g: Graph) -> DistanceMatrix:
    if g.n == 0:
        return DistanceMatrix(np.zeros((0, 0)), g.fingerprint)
    dense = np.full((g.n, g.n), np.inf)
    for u, v, w in g.edges:
        if w < dense[u, v]:
            dense[u, v] = w
            if not g.directed:
                dense[v, u] = w
    # null_value=inf keeps zero-weight edges as real edges
    sparse = csgraph.csgraph_from_dense(dense, null_value=np.inf)
    values = csgraph.shortest_path(sparse, method="D", directed=g.directed)
    values.setflags(write=False)
    return DistanceMatrix(values, g.fingerprint)


def _subset_distances(g: Graph, s: Sequence[int], dist: DistanceMatrix | None) -> np.ndarray:
    for v in s:
        g.check_vertex(v)
    if dist is None:
        dist = all_pairs(g)
    idx = np.asarray(s, dtype=int)
    return np.asarray(dist.values[np.ix_(idx, idx)], dtype=float)


def tour_cost(g: Graph, s: Iterable[int], dist: DistanceMatrix | None = None,
              cap: int = EXACT_TOUR_CAP) -> float:
    """Worst-start shortest covering walk: max over v in s of the cheapest walk
    from v that visits every vertex of s.

    Exact Held-Karp over (subset, endpoint), run for all starts at once.
    """
    verts = sorted(set(s))
    k = len(verts)
    if k == 0:
        raise InputError("tour_cost needs a non-empty vertex set")
    if k > cap:
        raise CapacityError(f"exact tour limited to {cap} vertices, got {k}")
    d = _subset_distances(g, verts, dist)
    if np.isinf(d).any():
        raise InfeasibleError("tour set is not mutually reachable")
    if k == 1:
        return 0.0
    full = (1 << k) - 1
    # dp[s, mask, j]: cheapest walk from start s covering mask, ending at j
    dp = np.full((k, 1 << k, k), np.inf)
    for s_ in range(k):
        dp[s_, 1 << s_, s_] = 0.0
    for mask in range(1, full):
        cur = dp[:, mask, :]
        if not np.isfinite(cur).any():
            continue
        # ext[s, t] = min_j cur[s, j] + d[j, t]
        ext = (cur[:, :, None] + d[None, :, :]).min(axis=1)
        for t in range(k):
            bit = 1 << t
            if mask & bit:
                continue
            col = dp[:, mask | bit, t]
            np.minimum(col, ext[:, t], out=col)
    return float(dp[:, full, :].min(axis=1).max())


def diameter(g: Graph, s: Iterable[int], dist: DistanceMatrix | None = None) -> float:
    verts = sorted(set(s))
    if not verts:
        raise InputError("diameter needs a non-empty vertex set")
    if len(verts) == 1:
        return 0.0
    return float(_subset_distances(g, verts, dist).max())


def is_connected(g: Graph) -> bool:
    if g.n <= 1:
        return True
    seen = [False] * g.n
    seen[0] = True
    queue = deque([0])
    adj = g.adjacency if not g.directed else Graph(g.n, g.edges, False).adjacency
    while queue:
        x = queue.popleft()
        for y, _ in adj[x]:
            if not seen[y]:
                seen[y] = True
                queue.append(y)
    return all(seen)


def is_tree(g: Graph) -> bool:
    return not g.directed and g.n >= 1 and len(g.edges) == g.n - 1 and is_connected(g)


def _prune_to_terminals(vertices: set[int], edges: list[Edge], terminals: set[int]) -> Subtree:
    """Repeatedly strip non-terminal leaves from a tree."""
    adj: dict[int, dict[int, float]] = {v: {} for v in vertices}
    for u, v, w in edges:
        adj[u][v] = w
        adj[v][u] = w
    leaves = deque(sorted(v for v in vertices if len(adj[v]) <= 1 and v not in terminals))
    while leaves:
        x = leaves.popleft()
        if x not in adj:
            continue
        for y in list(adj[x]):
            del adj[y][x]
            if len(adj[y]) == 1 and y not in terminals:
                leaves.append(y)
        del adj[x]
    kept = {(min(u, v), max(u, v), w) for u in adj for v, w in adj[u].items()}
    return Subtree(frozenset(adj), tuple(sorted(kept)))


def steiner_tree_exact_on_tree(g: Graph, terminals: Iterable[int]) -> Subtree:
    """Minimal subtree spanning ``terminals``: the union of their tree paths."""
    if not is_tree(g):
        raise GraphValidationError("steiner_tree_exact_on_tree needs an undirected tree")
    term = set(terminals)
    if not term:
        raise InputError("no terminals given")
    for v in term:
        g.check_vertex(v)
    return _prune_to_terminals(set(range(g.n)), list(g.edges), term)


def _kruskal(vertices: Iterable[int], edges: Iterable[Edge]) -> list[Edge]:
    parent = {v: v for v in vertices}

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    chosen = []
    for u, v, w in sorted(edges, key=lambda e: (e[2], e[0], e[1])):
        ru, rv = find(u), find(v)
        if ru != rv:
            parent[ru] = rv
            chosen.append((u, v, w))
    return chosen


def steiner_tree_approx(g: Graph, terminals: Iterable[int]) -> Subtree:
    """Metric-closure MST Steiner tree (within 2x of optimal).

    MST over terminal-to-terminal distances, each closure edge expanded to a
    shortest path, then an MST of the union with non-terminal leaves pruned.
    """
    if g.directed:
        raise InputError("steiner_tree_approx needs an undirected graph")
    term = sorted(set(terminals))
    if not term:
        raise InputError("no terminals given")
    for v in term:
        g.check_vertex(v)
    if len(term) == 1:
        return Subtree(frozenset(term))
    runs = {t: dijkstra(g, t) for t in term}
    closure = []
    for i, a in enumerate(term):
        da = runs[a][0]
        for b in term[i + 1:]:
            if math.isinf(da[b]):
                raise InfeasibleError(f"terminals {a} and {b} are not connected")
            closure.append((a, b, da[b]))
    host_weight = {}
    for u, v, w in g.edges:
        key = (min(u, v), max(u, v))
        host_weight[key] = min(w, host_weight.get(key, INF))
    union: dict[tuple[int, int], float] = {}
    for a, b, _ in _kruskal(term, closure):
        path = _unwind(runs[a][1], a, b)
        for x, y in zip(path, path[1:]):
            key = (min(x, y), max(x, y))
            union[key] = host_weight[key]
    verts = {x for key in union for x in key}
    tree_edges = _kruskal(verts, [(u, v, w) for (u, v), w in union.items()])
    return _prune_to_terminals(verts, tree_edges, set(term))


def steiner_tree(g: Graph, terminals: Iterable[int]) -> Subtree:
    """Exact on trees, metric-closure approximation elsewhere."""
    if is_tree(g):
        return steiner_tree_exact_on_tree(g, terminals)
    return steiner_tree_approx(g, terminals)


def euler_walk(tree: Subtree, start: int) -> Iterator[int]:
    """Depth-first double traversal of ``tree`` from ``start``, yielded lazily.

    The full walk returns to ``start``; children are entered in id order.
    """
    if start not in tree.vertices:
        raise InputError(f"start vertex {start} is not in the tree")
    adj = tree.adjacency
    yield start
    stack = [(start, -1, iter(adj[start]))]
    while stack:
        x, par, it = stack[-1]
        for y, _ in it:
            if y != par:
                yield y
                stack.append((y, x, iter(adj[y])))
                break
        else:
            stack.pop()
            if stack:
                yield stack[-1][0]


def walk_length(g: Graph | Subtree, walk: Sequence[int]) -> float:
    """Sum of edge weights along consecutive vertices of ``walk``."""
    adj = g.adjacency
    total = 0.0
    for x, y in zip(walk, walk[1:]):
        total += min(w for z, w in adj[x] if z == y)
    return total
