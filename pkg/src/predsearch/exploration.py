"""Fog-of-war exploration: the observed-graph environment and search strategies.

Every strategy moves the agent to a frontier vertex chosen from observed
information only, walking the shortest path known at decision time. Ties on
the objective go to the smallest vertex id.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Optional

import numpy as np

from .errors import (
    DisconnectedInstanceError,
    InputError,
    ModelViolationError,
    ProtocolViolation,
)
from .graph import INF, DistanceMatrix, Graph, all_pairs, dijkstra, is_tree

RADIUS_TOL = 1e-12


@dataclass
class SearchInstance:
    graph: Graph
    root: int
    goal: int
    f: np.ndarray
    integer_distance: bool = False
    embedding: Optional[object] = None

    def __post_init__(self) -> None:
        self.graph.check_vertex(self.root)
        self.graph.check_vertex(self.goal)
        self.f = np.asarray(self.f, dtype=float)
        if self.f.shape != (self.graph.n,):
            raise InputError(f"prediction vector has shape {self.f.shape}, expected ({self.graph.n},)")

    @cached_property
    def goal_distances(self) -> np.ndarray:
        """d(v, goal) for every v."""
        d, _ = dijkstra(self.graph.reverse(), self.goal)
        return np.asarray(d)

    @cached_property
    def distances(self) -> DistanceMatrix:
        return all_pairs(self.graph)

    @property
    def opt(self) -> float:
        return float(self.goal_distances[self.root])

    def with_predictions(self, f) -> SearchInstance:
        inst = SearchInstance(self.graph, self.root, self.goal, f, self.integer_distance, self.embedding)
        if "goal_distances" in self.__dict__:
            inst.__dict__["goal_distances"] = self.goal_distances
        return inst


@dataclass(frozen=True)
class ObservedState:
    """What the agent knows: visited vertices (in order), their frontier, and
    every edge incident to a visited vertex (out-edges when directed)."""

    _graph: Graph = field(repr=False)
    visited: tuple[int, ...]
    visited_set: frozenset[int]
    frontier: frozenset[int]

    @classmethod
    def start(cls, graph: Graph, root: int) -> ObservedState:
        graph.check_vertex(root)
        frontier = frozenset(v for v, _ in graph.adjacency[root] if v != root)
        return cls(graph, (root,), frozenset((root,)), frontier)

    @property
    def observed_edges(self) -> set[tuple[int, int, float]]:
        out = set()
        for u in self.visited:
            for v, w in self._graph.adjacency[u]:
                out.add((u, v, w) if self._graph.directed or u < v else (v, u, w))
        return out

    def distances_from(self, source: int) -> tuple[list[float], list[int]]:
        """Shortest distances within the observed subgraph, plus parents."""
        adj = self._graph.adjacency
        seen = self.visited_set
        directed = self._graph.directed
        dist = [INF] * self._graph.n
        parent = [-1] * self._graph.n
        dist[source] = 0.0
        heap = [(0.0, source)]
        done = set()
        while heap:
            d, x = heapq.heappop(heap)
            if x in done:
                continue
            done.add(x)
            x_seen = x in seen
            if directed and not x_seen:
                continue
            for y, w in adj[x]:
                if not x_seen and y not in seen:
                    continue
                nd = d + w
                if nd < dist[y]:
                    dist[y] = nd
                    parent[y] = x
                    heapq.heappush(heap, (nd, y))
        return dist, parent


def reveal(state: ObservedState, v: int, g: Graph | None = None) -> ObservedState:
    """Visit frontier vertex ``v``: it joins the visited set and its edges
    become observed."""
    graph = state._graph if g is None else g
    if v not in state.frontier:
        raise ProtocolViolation(f"vertex {v} is not on the frontier")
    seen = state.visited_set | {v}
    new = {u for u, _ in graph.adjacency[v] if u not in seen}
    return ObservedState(graph, state.visited + (v,), seen, (state.frontier - {v}) | new)


@dataclass
class SearchTrace:
    strategy: str
    visits: list[int]
    step_costs: list[float]
    opt: float
    deltas: list[float]

    @property
    def alg(self) -> float:
        return math.fsum(self.step_costs)

    @property
    def ratio(self) -> float:
        return self.alg / self.opt if self.opt > 0 else 1.0


def _finish(inst: SearchInstance, strategy: str, visits: list[int], costs: list[float]) -> SearchTrace:
    d = inst.goal_distances
    deltas = [float(d[a] - d[b]) for a, b in zip(visits, visits[1:])]
    return SearchTrace(strategy, visits, costs, inst.opt, deltas)


Score = Callable[[int, float], float]


def _explore(inst: SearchInstance, strategy: str, score: Score,
             allowed: Callable[[ObservedState, int], bool] | None = None,
             opportunistic: bool = False) -> SearchTrace:
    state = ObservedState.start(inst.graph, inst.root)
    current = inst.root
    visits, costs = [current], []
    while current != inst.goal:
        dist, parent = state.distances_from(current)
        best, best_key = -1, None
        for v in state.frontier:
            if math.isinf(dist[v]) or (allowed is not None and not allowed(state, v)):
                continue
            key = (score(v, dist[v]), v)
            if best_key is None or key < best_key:
                best, best_key = v, key
        if best < 0:
            if allowed is not None and any(not math.isinf(dist[v]) for v in state.frontier):
                raise ModelViolationError("no admissible frontier vertex left before reaching the goal")
            raise DisconnectedInstanceError("frontier exhausted before reaching the goal")
        if opportunistic:
            path = [best]
            while path[-1] != current:
                path.append(parent[path[-1]])
            path.reverse()
            walked = 0.0
            for x in path[1:]:
                walked_to = dist[x]
                if x in state.frontier:
                    state = reveal(state, x)
                    visits.append(x)
                    costs.append(walked_to - walked)
                    walked = walked_to
                    if x == inst.goal:
                        break
            current = visits[-1]
        else:
            state = reveal(state, best)
            visits.append(best)
            costs.append(dist[best])
            current = best
    return _finish(inst, strategy, visits, costs)


def run_greedy(inst: SearchInstance, opportunistic: bool = False) -> SearchTrace:
    """Move to the frontier vertex minimising observed distance + prediction."""
    f = inst.f
    return _explore(inst, "greedy", lambda v, d: d + f[v], opportunistic=opportunistic)


def run_beta_weighted(inst: SearchInstance, beta: float = 2 / 3) -> SearchTrace:
    """Greedy with the travel term scaled by ``beta``."""
    if not 0 < beta <= 1:
        raise InputError(f"beta must lie in (0, 1], got {beta}")
    f = inst.f
    return _explore(inst, "beta_weighted", lambda v, d: beta * d + f[v])


def run_smallest_prediction(inst: SearchInstance) -> SearchTrace:
    f = inst.f
    return _explore(inst, "smallest_prediction", lambda v, d: f[v])


def pruning_radius(inst: SearchInstance, eps: float) -> float:
    return float(inst.f[inst.root]) / (1 - eps)


def run_pruned_known_eps(inst: SearchInstance, eps: float) -> SearchTrace:
    """Greedy restricted to vertices within f(root)/(1-eps) of the root.

    Membership uses observed distance to the root, which is exact on trees;
    off trees the run is allowed but carries no guarantee.
    """
    if not 0 <= eps < 1:
        raise InputError(f"eps must lie in [0, 1), got {eps}")
    f = inst.f
    radius = pruning_radius(inst, eps) * (1 + RADIUS_TOL)
    cache: dict[int, list[float]] = {}

    def allowed(state: ObservedState, v: int) -> bool:
        key = len(state.visited)
        if key not in cache:
            cache.clear()
            cache[key] = state.distances_from(inst.root)[0]
        return cache[key][v] <= radius

    return _explore(inst, "pruned", lambda v, d: d + f[v], allowed)


def run_astar_order(inst: SearchInstance) -> SearchTrace:
    """A* with heuristic f on the full graph; the tour is the order of first
    expansions, costed with true distances (re-expansions are free)."""
    g = inst.graph
    f = inst.f
    gscore = [INF] * g.n
    gscore[inst.root] = 0.0
    heap = [(float(f[inst.root]), inst.root, 0.0)]
    expanded: set[int] = set()
    order: list[int] = []
    while heap:
        _, x, gx = heapq.heappop(heap)
        if gx > gscore[x]:
            continue
        if x not in expanded:
            expanded.add(x)
            order.append(x)
        if x == inst.goal:
            break
        for y, w in g.adjacency[x]:
            ny = gx + w
            if ny < gscore[y]:
                gscore[y] = ny
                heapq.heappush(heap, (ny + float(f[y]), y, ny))
    else:
        raise DisconnectedInstanceError("goal unreachable from root")
    D = inst.distances.values
    costs = [float(D[a, b]) for a, b in zip(order, order[1:])]
    return _finish(inst, "astar", order, costs)


STRATEGIES = {
    "greedy": run_greedy,
    "beta_weighted": run_beta_weighted,
    "smallest_prediction": run_smallest_prediction,
    "pruned": run_pruned_known_eps,
    "astar": run_astar_order,
}


def observed_matches_true(inst: SearchInstance, trace: SearchTrace) -> bool:
    """On trees, observed distances agree with true ones at every step."""
    if not is_tree(inst.graph):
        raise InputError("only meaningful on trees")
    D = inst.distances.values
    state = ObservedState.start(inst.graph, inst.root)
    for v in trace.visits[1:]:
        known = state.visited_set | state.frontier
        for u in state.visited:
            dist, _ = state.distances_from(u)
            if any(abs(dist[x] - D[u, x]) > 1e-9 for x in known):
                return False
        state = reveal(state, v)
    return True
