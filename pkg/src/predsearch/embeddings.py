"""Distortion of given embeddings, doubling constants, and tour transfer."""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Iterable, Sequence

import numpy as np

from .errors import CapacityError, DegenerateMetricError, InputError
from .graph import DistanceMatrix, Graph, all_pairs, tour_cost

REL_TOL = 1e-9
EXACT_DOUBLING_CAP = 14


@dataclass(frozen=True)
class Embedding:
    source: Graph
    target: Graph
    map: tuple[int, ...]

    def __post_init__(self) -> None:
        m = tuple(int(x) for x in self.map)
        object.__setattr__(self, "map", m)
        if len(m) != self.source.n:
            raise InputError(f"embedding maps {len(m)} vertices, source has {self.source.n}")
        if any(not 0 <= x < self.target.n for x in m):
            raise InputError("embedding image outside the target vertex range")
        if len(set(m)) != len(m):
            raise InputError("embedding map is not injective")

    def __call__(self, v: int) -> int:
        return self.map[v]


@dataclass(frozen=True)
class DistortionReport:
    lip_forward: float
    lip_inverse: float
    distortion: float


def path_graph(n: int, weights: Sequence[float] | None = None) -> Graph:
    """Path 0 - 1 - ... - (n-1), unit weights unless given."""
    ws = [1.0] * (n - 1) if weights is None else list(weights)
    return Graph(n, tuple((i, i + 1, w) for i, w in enumerate(ws)))


def distortion(e: Embedding, src: DistanceMatrix | None = None,
               dst: DistanceMatrix | None = None) -> DistortionReport:
    src = all_pairs(e.source) if src is None else src
    dst = all_pairs(e.target) if dst is None else dst
    n = e.source.n
    if n < 2:
        return DistortionReport(1.0, 1.0, 1.0)
    iu = np.triu_indices(n, k=1)
    image = np.asarray(e.map)
    dx = np.asarray(src.values)[iu]
    dy = np.asarray(dst.values)[np.ix_(image, image)][iu]
    if np.isinf(dx).any() or np.isinf(dy).any():
        raise InputError("distortion needs finite distances between all mapped vertices")
    if (dx == 0).any() or (dy == 0).any():
        raise DegenerateMetricError("distinct vertices at distance zero")
    fwd = float(np.max(dy / dx))
    inv = float(np.max(dx / dy))
    return DistortionReport(fwd, inv, fwd * inv)


def _ball_masks(D: np.ndarray, radius_of_center: float) -> list[int]:
    n = D.shape[0]
    within = D <= radius_of_center * (1 + REL_TOL)
    return [sum(1 << j for j in range(n) if within[i, j]) for i in range(n)]


def _balls_to_check(D: np.ndarray):
    """(ball mask, radius) for every center and every realized positive radius,
    deduplicated."""
    n = D.shape[0]
    radii = np.unique(D[np.isfinite(D) & (D > 0)])
    seen = set()
    for R in radii:
        for u in range(n):
            mask = sum(1 << j for j in range(n) if D[u, j] <= R * (1 + REL_TOL))
            if (mask, R) not in seen:
                seen.add((mask, R))
                yield mask, float(R)


def _symmetric_distances(g: Graph, dist: DistanceMatrix | None) -> np.ndarray:
    if g.directed:
        raise InputError("doubling constants are defined here for undirected graphs")
    D = np.asarray((all_pairs(g) if dist is None else dist).values)
    if np.isinf(D).any():
        raise InputError("doubling constant needs a connected graph")
    return D


def doubling_constant_upper(g: Graph, dist: DistanceMatrix | None = None) -> int:
    """Upper bound on the doubling constant via greedy half-radius covers."""
    if g.n <= 1:
        return 1
    D = _symmetric_distances(g, dist)
    best = 1
    cache: dict[float, list[int]] = {}
    for target, R in _balls_to_check(D):
        if R not in cache:
            cache[R] = _ball_masks(D, R / 2)
        cover = [m & target for m in cache[R]]
        left, used = target, 0
        while left:
            k = max(range(len(cover)), key=lambda i: (bin(cover[i] & left).count("1"), -i))
            left &= ~cover[k]
            used += 1
        best = max(best, used)
    return best


def _min_cover(target: int, sets: list[int]) -> int:
    cands = sorted({s & target for s in sets if s & target}, key=lambda s: -bin(s).count("1"))
    # drop sets contained in another candidate
    cands = [s for i, s in enumerate(cands)
             if not any(t != s and (s | t) == t for t in cands[:i])]
    for k in range(1, len(cands) + 1):
        for combo in combinations(cands, k):
            acc = 0
            for s in combo:
                acc |= s
            if acc == target:
                return k
    raise AssertionError("balls of positive radius always cover their own centers")


def doubling_constant_exact(g: Graph, dist: DistanceMatrix | None = None,
                            cap: int = EXACT_DOUBLING_CAP) -> int:
    """Exact doubling constant: max over balls B(u, R) of the fewest R/2-balls
    (centred at any vertex) covering it."""
    if g.n > cap:
        raise CapacityError(f"exact doubling constant limited to {cap} vertices, got {g.n}")
    if g.n <= 1:
        return 1
    D = _symmetric_distances(g, dist)
    best = 1
    cache: dict[float, list[int]] = {}
    for target, R in _balls_to_check(D):
        if bin(target).count("1") <= best:
            continue
        if R not in cache:
            cache[R] = _ball_masks(D, R / 2)
        best = max(best, _min_cover(target, cache[R]))
    return best


def tour_transfer_check(e: Embedding, s: Iterable[int],
                        report: DistortionReport | None = None) -> tuple[float, float, bool]:
    """Check tour_G(S) <= lip(tau^-1) * tour_G'(tau(S))."""
    s = sorted(set(s))
    lhs = tour_cost(e.source, s)
    if report is None:
        report = distortion(e)
    rhs = report.lip_inverse * tour_cost(e.target, [e.map[v] for v in s])
    return lhs, rhs, lhs <= rhs * (1 + REL_TOL) + 1e-12
