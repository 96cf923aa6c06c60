"""Prediction vectors: error generators, error metrics and implied-error functions."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Literal

import numpy as np

from .errors import InputError
from .graph import DistanceMatrix, Graph, all_pairs

REL_TOL = 1e-9
ABS_TOL = 1e-12

Which = Literal["phi0", "phi1"]


@dataclass(frozen=True)
class ErrorProfile:
    e0: int
    e1: float
    e1_minus: float
    einf_plus: float
    eps_max: float


@dataclass(frozen=True)
class ImpliedError:
    which: str
    values: np.ndarray

    def __getitem__(self, v):
        return self.values[v]


def mismatch(a, b, exact: bool = False) -> np.ndarray:
    """Elementwise "a != b", exact or up to a 1e-9 relative tolerance."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if exact:
        return a != b
    return ~np.isclose(a, b, rtol=REL_TOL, atol=ABS_TOL)


def profile_vectors(f, d_to_goal, goal: int, exact: bool = False) -> ErrorProfile:
    f = np.asarray(f, dtype=float)
    d = np.asarray(d_to_goal, dtype=float)
    diff = f - d
    neg = np.maximum(0.0, -diff)
    pos = np.maximum(0.0, diff)
    others = np.arange(len(d)) != goal
    if f[goal] != 0.0:
        eps_max = float("inf")
    elif others.any():
        num, den = np.abs(diff[others]), d[others]
        with np.errstate(divide="ignore", invalid="ignore"):
            rel = np.where(den > 0, num / den, np.where(num > 0, np.inf, 0.0))
        eps_max = float(np.max(rel))
    else:
        eps_max = 0.0
    return ErrorProfile(
        e0=int(mismatch(f, d, exact).sum()),
        e1=float(np.abs(diff).sum()),
        e1_minus=float(neg.sum()),
        einf_plus=float(pos.max(initial=0.0)),
        eps_max=eps_max,
    )


def error_profile(inst) -> ErrorProfile:
    """Error metrics of ``inst.f`` against true distances to ``inst.goal``."""
    return profile_vectors(inst.f, inst.goal_distances, inst.goal, inst.integer_distance)


def _simplex(rng: np.random.Generator, n: int) -> np.ndarray:
    x = rng.exponential(size=n)
    return x / x.sum()


def gen_absolute_error(d_to_goal, e1: float, seed=None) -> np.ndarray:
    """f = d + sign * e, with e uniform on the simplex scaled to l1 norm ``e1``
    and independent fair signs. Not clamped at zero."""
    if e1 < 0:
        raise InputError(f"e1 must be non-negative, got {e1}")
    d = np.asarray(d_to_goal, dtype=float)
    rng = np.random.default_rng(seed)
    mags = _simplex(rng, len(d)) * e1
    signs = rng.integers(0, 2, size=len(d)) * 2 - 1
    return d + signs * mags


def gen_admissible_error(d_to_goal, e1: float, seed=None, direction=None) -> np.ndarray:
    """Underestimating predictions 0 <= f <= d with ||f - d||_1 = e1.

    A simplex sample (or the supplied ``direction``) is scaled to ``e1``; any
    mass above a vertex's cap d(v) is redistributed over the vertices that
    still have headroom, in proportion to their sampled weight.
    """
    d = np.asarray(d_to_goal, dtype=float)
    cap_total = d.sum()
    if e1 < 0 or e1 > cap_total * (1 + REL_TOL) + ABS_TOL:
        raise InputError(f"admissible e1 must lie in [0, {cap_total}], got {e1}")
    e1 = min(e1, cap_total)
    if direction is None:
        weights = _simplex(np.random.default_rng(seed), len(d))
    else:
        weights = np.asarray(direction, dtype=float)
        if weights.shape != d.shape or (weights < 0).any() or weights.sum() == 0:
            raise InputError("direction must be a non-negative, non-zero vector per vertex")
        weights = weights / weights.sum()
    err = np.zeros_like(d)
    remaining = e1
    open_ = d > 0
    while remaining > ABS_TOL * max(1.0, e1) and open_.any():
        w = np.where(open_, weights, 0.0)
        if w.sum() == 0:
            # sampled weights vanish on every open vertex; spread by headroom
            w = np.where(open_, d - err, 0.0)
        share = remaining * w / w.sum()
        room = d - err
        step = np.minimum(share, room)
        err += step
        remaining = e1 - err.sum()
        open_ = (d - err) > ABS_TOL * np.maximum(1.0, d)
    return d - err


def gen_relative_error(d_to_goal, eps: float, seed=None) -> np.ndarray:
    """f = (1 + e_v) d with e_v ~ N(0, (eps/2)^2) conditioned on |e_v| <= eps."""
    if not 0 < eps < 1:
        raise InputError(f"eps must lie in (0, 1), got {eps}")
    d = np.asarray(d_to_goal, dtype=float)
    return (1.0 + truncated_normal(np.random.default_rng(seed), eps, len(d))) * d


def truncated_normal(rng: np.random.Generator, eps: float, size: int) -> np.ndarray:
    """Rejection sampler for N(0, (eps/2)^2) restricted to [-eps, eps]."""
    out = rng.normal(0.0, eps / 2, size=size)
    bad = np.abs(out) > eps
    while bad.any():
        out[bad] = rng.normal(0.0, eps / 2, size=int(bad.sum()))
        bad = np.abs(out) > eps
    return out


def satisfies_relative(f, d_to_goal, eps: float, tol: float = REL_TOL) -> bool:
    f = np.asarray(f, dtype=float)
    d = np.asarray(d_to_goal, dtype=float)
    slack = tol * np.maximum(1.0, d)
    return bool(np.all((1 - eps) * d <= f + slack) and np.all(f <= (1 + eps) * d + slack))


def implied_error(g: Graph, f, which: Which, dist: DistanceMatrix | None = None,
                  exact: bool = False) -> ImpliedError:
    """phi0(v) = #{u : f(u) != d(u, v)};  phi1(v) = sum_u |f(u) - d(u, v)|.

    Both measure how inconsistent the predictions are with v being the goal.
    """
    f = np.asarray(f, dtype=float)
    if f.shape != (g.n,):
        raise InputError(f"prediction vector has shape {f.shape}, expected ({g.n},)")
    if dist is None:
        dist = all_pairs(g)
    D = dist.values  # D[u, v] = d(u, v)
    if which == "phi0":
        values = mismatch(f[:, None], D, exact).sum(axis=0).astype(float)
    elif which == "phi1":
        values = np.abs(f[:, None] - D).sum(axis=0)
    else:
        raise InputError(f"unknown implied error {which!r}")
    values.setflags(write=False)
    return ImpliedError(which, values)
