"""Random graph families, adversarial constructions and the instance file format."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import networkx as nx
import numpy as np

from .embeddings import Embedding
from .errors import GenerationError, GraphValidationError, InputError, InstanceFormatError
from .exploration import SearchInstance
from .graph import Graph, all_pairs, is_connected

FAMILIES = ("random_tree", "random_lobster", "erdos_renyi", "circular_ladder")
LOWER_BOUNDS = ("lb_p3", "lb_star", "lb_relative_star", "lb_planning_tree")
LOBSTER_P1 = 0.5
LOBSTER_P2 = 0.5
ER_P = 0.1
ER_MAX_TRIES = 10_000


@dataclass(frozen=True)
class InstanceSpec:
    family: str
    params: dict[str, Any] = field(default_factory=dict)
    seed: int = 0


def _need(cond: bool, msg: str) -> None:
    if not cond:
        raise InputError(msg)


def random_tree(n: int, seed=None, weight_range: tuple[int, int] | None = None) -> Graph:
    """Uniform labelled tree from a random Pruefer sequence.

    With ``weight_range=(lo, hi)`` edges get independent integer weights in
    [lo, hi]; otherwise every edge has weight 1.
    """
    _need(n >= 1, f"random_tree needs n >= 1, got {n}")
    rng = np.random.default_rng(seed)
    if n == 1:
        return Graph(1)
    if n == 2:
        pairs = [(0, 1)]
    else:
        t = nx.from_prufer_sequence(rng.integers(0, n, size=n - 2).tolist())
        pairs = sorted((min(u, v), max(u, v)) for u, v in t.edges())
    if weight_range is None:
        ws = [1.0] * len(pairs)
    else:
        lo, hi = weight_range
        _need(1 <= lo <= hi, f"weight_range must satisfy 1 <= lo <= hi, got {weight_range}")
        ws = rng.integers(lo, hi + 1, size=len(pairs)).astype(float).tolist()
    return Graph(n, tuple((u, v, w) for (u, v), w in zip(pairs, ws)))


def random_lobster(n: int, seed=None, p1: float = LOBSTER_P1, p2: float = LOBSTER_P2) -> Graph:
    """Lobster on exactly ``n`` vertices.

    Backbone vertices are added one at a time. Each collects first-level
    leaves while a coin with bias ``p1`` keeps landing heads, and every such
    leaf collects second-level leaves the same way with ``p2``. Generation stops
    as soon as ``n`` vertices exist; labels are then shuffled.
    """
    _need(n >= 1, f"random_lobster needs n >= 1, got {n}")
    _need(0 < p1 < 1 and 0 < p2 < 1, "lobster probabilities must lie in (0, 1)")
    rng = np.random.default_rng(seed)
    pairs: list[tuple[int, int]] = []
    count = 1
    spine = 0
    while count < n:
        while count < n and rng.random() < p1:
            leaf = count
            pairs.append((spine, leaf))
            count += 1
            while count < n and rng.random() < p2:
                pairs.append((leaf, count))
                count += 1
        if count < n:
            pairs.append((spine, count))
            spine = count
            count += 1
    perm = rng.permutation(n)
    relabelled = sorted((min(perm[u], perm[v]), max(perm[u], perm[v])) for u, v in pairs)
    return Graph(n, tuple((int(u), int(v), 1.0) for u, v in relabelled))


def erdos_renyi(n: int, seed=None, p: float = ER_P, max_tries: int = ER_MAX_TRIES) -> Graph:
    """G(n, p) conditioned on connectivity, by rejection."""
    _need(n >= 1, f"erdos_renyi needs n >= 1, got {n}")
    _need(0 < p < 1, f"p must lie in (0, 1), got {p}")
    rng = np.random.default_rng(seed)
    iu, ju = np.triu_indices(n, k=1)
    for _ in range(max_tries):
        keep = rng.random(len(iu)) < p
        g = Graph(n, tuple((int(u), int(v), 1.0) for u, v in zip(iu[keep], ju[keep])))
        if is_connected(g):
            return g
    raise GenerationError(f"no connected G({n}, {p}) sample within {max_tries} tries")


def circular_ladder(n: int) -> Graph:
    """Two k-cycles 0..k-1 and k..2k-1 joined by rungs (i, k+i); n = 2k."""
    _need(n % 2 == 0 and n >= 6, f"circular_ladder needs an even n >= 6, got {n}")
    k = n // 2
    pairs = [(i, i + 1) for i in range(k - 1)]
    pairs += [(i, i + 1) for i in range(k, 2 * k - 1)]
    pairs += [(i, k + i) for i in range(k)]
    pairs += [(0, k - 1), (k, 2 * k - 1)]
    return Graph(n, tuple((u, v, 1.0) for u, v in sorted(pairs)))


def gen_family(spec: InstanceSpec) -> Graph:
    p = dict(spec.params)
    fam = spec.family
    if fam == "random_tree":
        wr = p.get("weight_range")
        return random_tree(int(p["n"]), spec.seed, tuple(wr) if wr else None)
    if fam == "random_lobster":
        return random_lobster(int(p["n"]), spec.seed, p.get("p1", LOBSTER_P1), p.get("p2", LOBSTER_P2))
    if fam == "erdos_renyi":
        return erdos_renyi(int(p["n"]), spec.seed, p.get("p", ER_P), p.get("max_tries", ER_MAX_TRIES))
    if fam == "circular_ladder":
        return circular_ladder(int(p["n"]))
    raise InputError(f"unknown graph family {fam!r}")


def gen_instance(spec: InstanceSpec) -> SearchInstance:
    """Any family or lower-bound construction as a SearchInstance.

    Random families get a root and goal drawn as distinct uniform vertices and
    perfect predictions; callers add noise with the predictions module.
    """
    p = dict(spec.params)
    fam = spec.family
    if fam == "lb_p3":
        worst, benign = gen_lb_p3(p.get("w", 5.0))
        return benign if p.get("placement") == "benign" else worst
    if fam == "lb_star":
        return gen_lb_star(int(p.get("n", 5)), p.get("einf", 4.0))
    if fam == "lb_relative_star":
        return gen_lb_relative_star(int(p.get("n", 6)), p.get("eps", 0.2), p.get("attach_to"))
    if fam == "lb_planning_tree":
        return gen_lb_planning_tree(int(p.get("delta", 3)), p.get("w", 4))
    g = gen_family(spec)
    rng = np.random.default_rng([spec.seed, 1])
    root, goal = (int(x) for x in rng.choice(g.n, size=2, replace=False))
    inst = SearchInstance(g, root, goal, np.zeros(g.n), integer_distance=_all_integer(g))
    return inst.with_predictions(inst.goal_distances)


def _all_integer(g: Graph) -> bool:
    return all(float(w).is_integer() for _, _, w in g.edges)


def has_integer_distances(g: Graph) -> bool:
    D = all_pairs(g).values
    finite = D[np.isfinite(D)]
    return bool(np.all(finite == np.round(finite)))


def gen_lb_p3(w: float = 5.0) -> tuple[SearchInstance, SearchInstance]:
    """Path v1 - v2 - v3 (ids 0, 1, 2) with root v2 and predictions (0, w, 0).

    Returns (worst, benign): goal at id 2, which the lowest-id tie-break visits
    last, and goal at id 0.
    """
    _need(w > 0, f"w must be positive, got {w}")
    g = Graph(3, ((0, 1, float(w)), (1, 2, float(w))))
    f = np.array([0.0, float(w), 0.0])
    integral = float(w).is_integer()
    return (SearchInstance(g, 1, 2, f, integral), SearchInstance(g, 1, 0, f.copy(), integral))


def gen_lb_star(n: int = 5, einf: float = 4.0) -> SearchInstance:
    """Star with centre 0 (root), leaves 1..n-1, goal n-1 and every leaf
    predicted at 2w where w = einf/2."""
    _need(n >= 4, f"star lower bound needs n >= 4, got {n}")
    _need(einf > 0, f"einf must be positive, got {einf}")
    w = einf / 2
    g = Graph(n, tuple((0, i, w) for i in range(1, n)))
    f = np.full(n, 2 * w)
    f[0] = w
    return SearchInstance(g, 0, n - 1, f, float(w).is_integer())


def gen_lb_relative_star(n: int = 6, eps: float = 0.2, attach_to: int | None = None) -> SearchInstance:
    """Star of weight-1 edges (centre 0, leaves 1..n-2) plus the goal n-1 hung
    off one leaf by an edge of weight (1-eps)/eps.

    Every leaf is predicted at (1-eps)(2 + w2), so the leaves look alike. The
    goal hangs off the highest-id leaf unless ``attach_to`` says otherwise.
    """
    _need(n >= 6, f"relative star needs n >= 6, got {n}")
    _need(0 < eps < 1, f"eps must lie in (0, 1), got {eps}")
    parent = n - 2 if attach_to is None else attach_to
    _need(1 <= parent <= n - 2, f"goal must hang off a leaf in [1, {n - 2}], got {parent}")
    w1, w2 = 1.0, (1 - eps) / eps
    edges = [(0, i, w1) for i in range(1, n - 1)] + [(parent, n - 1, w2)]
    g = Graph(n, tuple(edges))
    f = np.full(n, (1 - eps) * (2 * w1 + w2))
    f[0] = w1 + w2
    f[n - 1] = 0.0
    return SearchInstance(g, 0, n - 1, f)


def planning_tree_ids(delta: int) -> dict[str, Any]:
    """Vertex ids of the planning tree: r, v[i], u[i][j], w[i][j] (0-based i, j)."""
    m = delta - 1
    v = list(range(1, delta + 1))
    u = [[delta + 1 + i * m + j for j in range(m)] for i in range(delta)]
    base = delta + 1 + delta * m
    w = [[base + i * m + j for j in range(m)] for i in range(delta)]
    return {"r": 0, "v": v, "u": u, "w": w, "n": base + delta * m}


def gen_lb_planning_tree(delta: int = 3, w: float = 4) -> SearchInstance:
    """Root with ``delta`` children, each child with delta-1 grandchildren, each
    grandchild carrying a pendant leaf at distance ``w``. Goal: the first
    pendant under the first child.

    Predictions make every level look the same: off the first child's subtree
    they are exact, and inside it they copy the values of the other subtrees.
    """
    _need(delta >= 2, f"delta must be >= 2, got {delta}")
    _need(w > 0, f"w must be positive, got {w}")
    ids = planning_tree_ids(delta)
    edges = []
    for i in range(delta):
        edges.append((0, ids["v"][i], 1.0))
        for j in range(delta - 1):
            edges.append((ids["v"][i], ids["u"][i][j], 1.0))
            edges.append((ids["u"][i][j], ids["w"][i][j], float(w)))
    g = Graph(ids["n"], tuple(edges))
    f = np.empty(ids["n"])
    f[0] = w + 2
    f[ids["v"]] = w + 3
    f[[x for row in ids["u"] for x in row]] = w + 4
    f[[x for row in ids["w"] for x in row]] = 2 * w + 4
    return SearchInstance(g, 0, ids["w"][0][0], f, float(w).is_integer())


def planning_tree_tour_lower_bound(delta: int, w: float) -> float:
    """Shortest walk from the root through every vertex, ending at the goal."""
    return w * (2 * delta ** 2 - 2 * delta - 1) + 2 * (delta ** 2 - 1)


# instance files

def instance_to_dict(inst: SearchInstance) -> dict[str, Any]:
    g = inst.graph
    out: dict[str, Any] = {
        "n": g.n,
        "directed": g.directed,
        "edges": [[u, v, w] for u, v, w in g.edges],
        "root": inst.root,
        "goal": inst.goal,
        "predictions": [float(x) for x in inst.f],
        "flags": {"integer_distance": bool(inst.integer_distance)},
    }
    if isinstance(inst.embedding, Embedding):
        t = inst.embedding.target
        out["embedding"] = {
            "map": list(inst.embedding.map),
            "target": {"n": t.n, "directed": t.directed, "edges": [[u, v, w] for u, v, w in t.edges]},
        }
    return out


def _field(obj: dict, key: str, kind, where: str):
    if key not in obj:
        raise InstanceFormatError(f"{where}: missing field {key!r}")
    val = obj[key]
    if kind is int and (isinstance(val, bool) or not isinstance(val, int)):
        raise InstanceFormatError(f"{where}: field {key!r} must be an integer, got {val!r}")
    if kind is list and not isinstance(val, list):
        raise InstanceFormatError(f"{where}: field {key!r} must be a list")
    return val


def _graph_from(obj: dict, where: str) -> Graph:
    n = _field(obj, "n", int, where)
    raw = _field(obj, "edges", list, where)
    edges = []
    for k, e in enumerate(raw):
        if not isinstance(e, list) or len(e) != 3:
            raise InstanceFormatError(f"{where}: edges[{k}] must be [u, v, w], got {e!r}")
        u, v, w = e
        for name, x in (("u", u), ("v", v)):
            if isinstance(x, bool) or not isinstance(x, int):
                raise InstanceFormatError(f"{where}: edges[{k}].{name} must be an integer, got {x!r}")
            if not 0 <= x < n:
                raise InstanceFormatError(f"{where}: edges[{k}] references vertex {x} outside [0, {n})")
        if isinstance(w, bool) or not isinstance(w, (int, float)):
            raise InstanceFormatError(f"{where}: edges[{k}].w must be a number, got {w!r}")
        edges.append((u, v, float(w)))
    try:
        return Graph(n, tuple(edges), bool(obj.get("directed", False)))
    except GraphValidationError as exc:
        raise GraphValidationError(f"{where}: {exc}") from None


def instance_from_dict(obj: dict[str, Any]) -> SearchInstance:
    if not isinstance(obj, dict):
        raise InstanceFormatError("instance must be a JSON object")
    g = _graph_from(obj, "instance")
    root = _field(obj, "root", int, "instance")
    goal = _field(obj, "goal", int, "instance")
    for name, x in (("root", root), ("goal", goal)):
        if not 0 <= x < g.n:
            raise InstanceFormatError(f"instance: field {name!r} = {x} outside [0, {g.n})")
    preds = _field(obj, "predictions", list, "instance")
    if len(preds) != g.n:
        raise InstanceFormatError(f"instance: 'predictions' has {len(preds)} entries, expected {g.n}")
    flags = obj.get("flags", {}) or {}
    emb = None
    if obj.get("embedding") is not None:
        e = obj["embedding"]
        target = _graph_from(_field(e, "target", dict, "embedding"), "embedding.target")
        try:
            emb = Embedding(g, target, tuple(_field(e, "map", list, "embedding")))
        except InputError as exc:
            raise InstanceFormatError(f"embedding: {exc}") from None
    return SearchInstance(g, root, goal, np.asarray(preds, dtype=float),
                          bool(flags.get("integer_distance", False)), emb)


def dumps_instance(inst: SearchInstance) -> str:
    return json.dumps(instance_to_dict(inst), indent=1)


def loads_instance(text: str) -> SearchInstance:
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InstanceFormatError(f"line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    return instance_from_dict(obj)


def save_instance(inst: SearchInstance, path) -> None:
    Path(path).write_text(dumps_instance(inst) + "\n")


def load_instance(path) -> SearchInstance:
    return loads_instance(Path(path).read_text())
