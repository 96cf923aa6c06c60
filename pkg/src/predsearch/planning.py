"""Full-information planning over implied-error sublevel sets.

The agent sees the whole graph and every prediction but cannot recognise the
goal until it stands on it. Round k gathers every vertex whose implied error
is at most 2**k, spans them with a Steiner tree and walks that tree.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import InputError
from .graph import (DistanceMatrix, Subtree, all_pairs, diameter, dijkstra, euler_walk, is_tree,
                    steiner_tree)
from .predictions import ImpliedError, implied_error


def sublevel_set(phi: ImpliedError | np.ndarray, threshold: float) -> frozenset[int]:
    values = phi.values if isinstance(phi, ImpliedError) else np.asarray(phi)
    return frozenset(int(v) for v in np.flatnonzero(values <= threshold))


@dataclass
class PlanningRound:
    threshold: float
    sublevel: frozenset[int]
    tree: Subtree
    entry: int
    transition_cost: float
    walk_cost: float

    @property
    def steiner_weight(self) -> float:
        return self.tree.weight

    @property
    def travel_cost(self) -> float:
        return self.transition_cost + self.walk_cost


@dataclass
class PlanningTrace:
    which: str
    rounds: list[PlanningRound] = field(default_factory=list)
    visits: list[int] = field(default_factory=list)
    alg: float = 0.0
    opt: float = 0.0

    @property
    def thresholds(self) -> list[float]:
        return [r.threshold for r in self.rounds]


def _check_scope(inst, which: str) -> None:
    g = inst.graph
    if g.directed:
        raise InputError("planning needs an undirected graph")
    if which == "phi0" and not g.is_unweighted:
        raise InputError("phi0 planning is only defined on unweighted graphs")
    if which == "phi1" and not inst.integer_distance:
        raise InputError("phi1 planning needs an instance flagged integer_distance")


def run_full_info(inst, which: str = "phi1", dist: Optional[DistanceMatrix] = None,
                  max_rounds: int = 64) -> PlanningTrace:
    """Doubling-threshold planning; returns the full trace.

    Between rounds the agent walks a shortest path to the nearest vertex of
    the new tree (lowest id on ties), then follows the tree's Euler walk from
    there. The run stops the moment the goal is stepped on.
    """
    _check_scope(inst, which)
    g = inst.graph
    D = (all_pairs(g) if dist is None else dist).values
    phi = implied_error(g, inst.f, which, dist=DistanceMatrix(D, g.fingerprint),
                        exact=inst.integer_distance)
    trace = PlanningTrace(which, visits=[inst.root], opt=float(D[inst.root, inst.goal]))
    if math.isinf(trace.opt):
        raise InputError("goal unreachable from root")
    current = inst.root
    found = current == inst.goal
    alg = 0.0
    k = 0
    while not found:
        if k >= max_rounds:
            raise RuntimeError("planning did not terminate within the round budget")
        threshold = float(2 ** k)
        k += 1
        level = sublevel_set(phi, threshold)
        if not level:
            continue
        tree = steiner_tree(g, level)
        entry = min(tree.vertices, key=lambda v: (D[current, v], v))
        transition = 0.0
        if entry != current:
            _, parent = dijkstra(g, current)
            path = [entry]
            while path[-1] != current:
                path.append(parent[path[-1]])
            path.reverse()
            for x, y in zip(path, path[1:]):
                transition += float(D[x, y])
                trace.visits.append(y)
                if y == inst.goal:
                    found = True
                    break
        walk_cost = 0.0
        if not found:
            adj = tree.adjacency
            walk = euler_walk(tree, entry)
            next(walk)
            x = entry
            for y in walk:
                walk_cost += min(w for z, w in adj[x] if z == y)
                trace.visits.append(y)
                x = y
                if y == inst.goal:
                    found = True
                    break
            current = x
        else:
            current = inst.goal
        alg += transition + walk_cost
        trace.rounds.append(PlanningRound(threshold, level, tree, entry, transition, walk_cost))
    trace.alg = alg
    return trace


def round_invariants(inst, trace: PlanningTrace, dist: Optional[DistanceMatrix] = None) -> list[dict]:
    """Per-round |C| <= threshold * max_degree and diam(C) <= threshold checks."""
    if not is_tree(inst.graph):
        raise InputError("round invariants are stated for trees")
    g = inst.graph
    dist = all_pairs(g) if dist is None else dist
    delta = g.max_degree
    out = []
    for r in trace.rounds:
        size = len(r.tree.vertices)
        diam = diameter(g, r.tree.vertices, dist)
        out.append({
            "threshold": r.threshold,
            "size": size,
            "size_bound": r.threshold * delta,
            "size_ok": size <= r.threshold * delta,
            "diameter": diam,
            "diameter_ok": diam <= r.threshold * (1 + 1e-9),
        })
    return out


def path_phi0_bound(opt: float, e0: int) -> float:
    return opt + 17 * e0 + 1


def tree_phi1_bound(opt: float, e1: float, delta: int) -> float:
    return opt + delta / 3 * (16 * e1 ** 2 - 1) + (e1 + 1) / 2
