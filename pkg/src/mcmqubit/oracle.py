"""Brute-force cross-checks.

Nothing here uses the closed-form engine; only the qubit algebra is shared.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache
from typing import NamedTuple

import numpy as np

from .ensemble import Ensemble
from .qubit import bloch_of_operator, min_eigenvalue


class OracleError(RuntimeError):
    pass


@dataclass(frozen=True)
class GridSpec:
    """Sphere search settings.

    The default stops refining once the stencil is a few 1e-6 rad wide, so the
    search resolves the maximum to roughly 1e-10 but not to machine precision.
    """

    resolution: int = 720
    iterations: int = 12
    shrink: float = 0.5
    local: int = 4

    def __post_init__(self):
        if self.resolution < 36:
            raise ValueError("resolution must be at least 36")
        if self.iterations < 1:
            raise ValueError("need at least one refinement iteration")
        if not 0 < self.shrink < 1:
            raise ValueError("shrink factor must lie in (0, 1)")


@lru_cache(maxsize=8)
def sphere_grid(resolution: int) -> np.ndarray:
    """Unit vectors ordered by (theta, phi); ``cos(theta)`` uniformly spaced."""
    n_theta = resolution // 2
    cos_t = 1 - (np.arange(n_theta) + 0.5) * (2.0 / n_theta)
    theta = np.arccos(cos_t)
    phi = np.arange(resolution) * (2 * np.pi / resolution)
    t, p = np.meshgrid(theta, phi, indexing="ij")
    pts = np.stack([np.sin(t) * np.cos(p), np.sin(t) * np.sin(p), np.cos(t)], axis=-1).reshape(-1, 3)
    pts.flags.writeable = False
    return pts


class GridResult(NamedTuple):
    direction: np.ndarray
    value: float
    spread: float  # max - min over the final stencil: the achieved resolution


def _confidence(q, n_x, n, dirs):
    num = 1 + dirs @ n_x
    den = 1 + dirs @ n
    with np.errstate(divide="ignore", invalid="ignore"):
        val = q * num / den
    return np.where(den > 1e-13, val, -np.inf)


def _tangent_basis(m):
    helper = np.array([1.0, 0.0, 0.0]) if abs(m[0]) < 0.9 else np.array([0.0, 1.0, 0.0])
    e1 = np.cross(m, helper)
    e1 /= np.linalg.norm(e1)
    return e1, np.cross(m, e1)


def grid_max_confidence(ens: Ensemble, x: int, g: GridSpec = GridSpec()) -> GridResult:
    """Maximise ``q_x tr[rho_x Pi(m)] / tr[rho Pi(m)]`` over unit directions ``m``.

    Coarse sphere grid, then a shrinking square in the tangent plane of the
    incumbent, re-centred on the best point at every step.
    """
    q = ens.priors[x]
    n_x = bloch_of_operator(ens.states[x])
    n = bloch_of_operator(ens.avg)
    grid = sphere_grid(g.resolution)
    vals = _confidence(q, n_x, n, grid)
    k = int(np.argmax(vals))
    best, best_val = grid[k], float(vals[k])

    steps = np.linspace(-1, 1, 2 * g.local + 1)
    u, v = (a.ravel() for a in np.meshgrid(steps, steps, indexing="ij"))
    half = 4 * np.pi / g.resolution + 2.0 / (g.resolution // 2) ** 0.5
    spread = np.inf
    for _ in range(g.iterations):
        e1, e2 = _tangent_basis(best)
        cand = best + half * (u[:, None] * e1 + v[:, None] * e2)
        cand /= np.linalg.norm(cand, axis=1, keepdims=True)
        vals = _confidence(q, n_x, n, cand)
        k = int(np.argmax(vals))
        if vals[k] > best_val:
            best, best_val = cand[k], float(vals[k])
        finite = vals[np.isfinite(vals)]
        spread = float(finite.max() - finite.min()) if finite.size else np.inf
        half *= g.shrink
    return GridResult(best, best_val, spread)


def dual_feasibility(ens: Ensemble, x: int, lam: float) -> float:
    """Smallest eigenvalue of ``lam rho - q_x rho_x``; nonnegative iff ``lam`` bounds the confidence."""
    return min_eigenvalue(lam * ens.avg - ens.priors[x] * ens.states[x])


def _rank_one_solve(rest, K):
    """Solve the rank-one equality for the last weight given the others (it is linear in it)."""
    head = K[:-1, :-1]
    s = rest.sum(axis=1)
    const = 1 - s + 0.5 * np.einsum("ij,jk,ik->i", rest, head, rest)
    slope = -1 + rest @ K[:-1, -1]
    with np.errstate(divide="ignore", invalid="ignore"):
        last = -const / slope
    return last


def _brute_face(dirs, c, resolution, slack):
    n_dirs = len(dirs)
    K = 0.5 * (1 - dirs @ dirs.T)

    def evaluate(rest):
        rest = np.atleast_2d(rest)
        last = _rank_one_solve(rest, K) if n_dirs > 1 else np.ones(len(rest))
        a = np.column_stack([rest, last])
        resid = np.abs(1 - a.sum(axis=1) + 0.5 * np.einsum("ij,jk,ik->i", a, K, a))
        ok = np.isfinite(last) & np.all(a >= 0, axis=1) & (a.sum(axis=1) <= 2) & (resid <= slack)
        obj = np.where(ok, 1 - a @ c, np.inf)
        return a, obj

    axis = np.linspace(0, 2, resolution + 1)
    if n_dirs == 1:
        rest = np.zeros((1, 0))
    else:
        rest = np.stack(np.meshgrid(*([axis] * (n_dirs - 1)), indexing="ij"), axis=-1).reshape(-1, n_dirs - 1)
    a, obj = evaluate(rest)
    k = int(np.argmin(obj))
    if not np.isfinite(obj[k]):
        return None, np.inf
    best_rest, best_a, best_obj = rest[k].copy(), a[k], float(obj[k])

    step = 2.0 / resolution
    offsets = np.linspace(-1, 1, 9)
    if n_dirs > 1:
        local = np.stack(np.meshgrid(*([offsets] * (n_dirs - 1)), indexing="ij"), axis=-1).reshape(-1, n_dirs - 1)
        for _ in range(60):
            a, obj = evaluate(best_rest + step * local)
            k = int(np.argmin(obj))
            if obj[k] < best_obj:
                best_rest, best_a, best_obj = (best_rest + step * local)[k], a[k], float(obj[k])
            step *= 0.6
    return best_a, best_obj


def brute_min_inconclusive(ens: Ensemble, projectors, resolution: int = 400, slack: float = 1e-9):
    """Exhaustive search for the inconclusive-minimising weights (at most three directions).

    Every face of the weight orthant (each subset of directions held at nonzero
    weight) is searched on its own so optima on the boundary are hit exactly.
    On a face the first weights run over a uniform grid on ``[0, 2]`` and the
    rank-one equality, linear in the last weight, fixes that one. Points
    outside ``{a >= 0, sum(a) <= 2}`` or with residual above ``slack`` are
    dropped, then the best is polished by a shrinking coordinate search.
    Returns ``(weights, q_inc)``.
    """
    dirs = np.array([np.asarray(m, dtype=float) / np.linalg.norm(m) for m in projectors])
    n_dirs = len(dirs)
    if not 1 <= n_dirs <= 3:
        raise ValueError("exhaustive search supports one to three directions")
    n = bloch_of_operator(ens.avg)
    c = 0.5 * (1 + dirs @ n)
    best_a, best_obj = None, np.inf
    for size in range(1, n_dirs + 1):
        for face in itertools.combinations(range(n_dirs), size):
            idx = list(face)
            a, obj = _brute_face(dirs[idx], c[idx], resolution, slack)
            if obj < best_obj:
                best_a, best_obj = np.zeros(n_dirs), obj
                best_a[idx] = a
    if best_a is None:
        raise OracleError("no feasible grid point; raise the resolution or the slack")
    return best_a, best_obj


def grid_min_error(q0, rho0, q1, rho1, g: GridSpec = GridSpec()) -> float:
    """Smallest two-outcome error over projective measurements ``{Pi(m), Pi(-m)}`` and the trivial ones."""
    n0, n1 = bloch_of_operator(rho0), bloch_of_operator(rho1)

    def error(dirs):
        # guess 0 on Pi(m), 1 on Pi(-m)
        return q0 * 0.5 * (1 - dirs @ n0) + q1 * 0.5 * (1 + dirs @ n1)

    grid = sphere_grid(g.resolution)
    err = error(grid)
    k = int(np.argmin(err))
    best, best_val = grid[k], float(err[k])
    steps = np.linspace(-1, 1, 2 * g.local + 1)
    u, v = (a.ravel() for a in np.meshgrid(steps, steps, indexing="ij"))
    half = 4 * np.pi / g.resolution + 2.0 / (g.resolution // 2) ** 0.5
    for _ in range(g.iterations):
        e1, e2 = _tangent_basis(best)
        cand = best + half * (u[:, None] * e1 + v[:, None] * e2)
        cand /= np.linalg.norm(cand, axis=1, keepdims=True)
        err = error(cand)
        k = int(np.argmin(err))
        if err[k] < best_val:
            best, best_val = cand[k], float(err[k])
        half *= g.shrink
    return min(best_val, q0, q1)
