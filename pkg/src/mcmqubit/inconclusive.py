"""Completing maximum-confidence projectors into a POVM with the fewest inconclusive events.

Given unit directions ``m_x`` with projectors ``Pi_x = (I + m_x . sigma)/2``
the measurement ``{a_x Pi_x} + {M_phi}``, ``M_phi = I - sum_x a_x Pi_x``,
keeps every outcome's confidence for any ``a_x > 0``. The weights minimise

    tr[rho M_phi]   s.t.  a >= 0,  2 - sum(a) >= 0,
                          1 - sum(a) + 1/2 a^T K a = 0,  K_xy = 1 - tr[Pi_x Pi_y]

where the quadratic equality says ``det M_phi = 0`` (``M_phi`` rank one).
With ``c_x = tr[rho Pi_x]`` and a fixed support ``S`` the stationarity
condition ``K a = 1 + tau c`` plus the equality give, in closed form,

    a = K^-1 1 + tau K^-1 c,   tau^2 = (1^T K^-1 1 - 2) / (c^T K^-1 c)

so the optimum is found by enumerating supports. Supports with singular
``K`` (repeated directions, or more than four directions) are skipped; an
optimum with ``M_phi != 0`` always exists on a support of at most three.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .ensemble import Ensemble
from .qubit import IDENTITY, TOL_MAT, TOL_PSD, as_bloch, bloch_of_operator, bloch_to_density, eigen2

TOL_RANK1 = 1e-8
TOL_FEAS = 1e-10
TOL_REPAIR = 1e-6
MAX_COND = 1e12


class InconclusiveSolverError(RuntimeError):
    def __init__(self, message, best=None):
        super().__init__(message)
        self.best = best


@dataclass(frozen=True, eq=False)
class PovmCompletion:
    weights: np.ndarray
    directions: np.ndarray
    m_phi: np.ndarray
    q_inc: float
    complete: bool
    residual: float

    def elements(self) -> list[np.ndarray]:
        """POVM elements ``a_x Pi_x`` followed by ``M_phi``."""
        return [a * bloch_to_density(m) for a, m in zip(self.weights, self.directions)] + [self.m_phi]


def _directions(projectors) -> np.ndarray:
    dirs = np.array([as_bloch(m) for m in projectors], dtype=float).reshape(-1, 3)
    if len(dirs) == 0:
        raise ValueError("need at least one projector direction")
    norms = np.linalg.norm(dirs, axis=1)
    if np.any(np.abs(norms - 1) > 1e-9):
        raise ValueError("projector directions must be unit vectors")
    return dirs / norms[:, None]


def kernel_matrix(dirs) -> np.ndarray:
    """``K_xy = 1 - tr[Pi_x Pi_y] = (1 - m_x . m_y) / 2``."""
    dirs = np.asarray(dirs, dtype=float)
    return 0.5 * (1 - dirs @ dirs.T)


def rank_one_residual(weights, projectors) -> float:
    """``|1 - sum(a) + 1/2 sum_xy (1 - tr[Pi_x Pi_y]) a_x a_y|``, i.e. ``|det M_phi|``."""
    a = np.asarray(weights, dtype=float)
    dirs = _directions(projectors)
    return float(abs(1 - a.sum() + 0.5 * a @ kernel_matrix(dirs) @ a))


def _min_norm_nonneg(A: np.ndarray, b: np.ndarray, tol: float) -> np.ndarray | None:
    """Smallest-norm ``a >= 0`` with ``A a = b``, by support enumeration.

    On its support the optimum is interior, hence the pseudo-inverse solution
    of the restricted system, so checking every support is exhaustive.
    """
    n = A.shape[1]
    best, best_norm = None, np.inf
    for size in range(1, n + 1):
        for support in itertools.combinations(range(n), size):
            cols = list(support)
            sol, *_ = np.linalg.lstsq(A[:, cols], b, rcond=None)
            if np.any(sol < -tol) or np.linalg.norm(A[:, cols] @ sol - b) > tol:
                continue
            a = np.zeros(n)
            a[cols] = np.clip(sol, 0, None)
            norm = float(a @ a)
            if norm < best_norm - tol or (abs(norm - best_norm) <= tol and tuple(a) < tuple(best)):
                best, best_norm = a, norm
    return best


def _decompose(dirs: np.ndarray, target, tol: float) -> np.ndarray | None:
    # sum_x a_x Pi_x = target  <=>  sum a_x = tr(target), sum a_x m_x = bloch(target)
    A = np.vstack([dirs.T, np.ones(len(dirs))])
    b = np.append(bloch_of_operator(target), np.real(np.trace(target)))
    return _min_norm_nonneg(A, b, tol)


def identity_in_hull(projectors, tol: float = 1e-9) -> np.ndarray | None:
    """Weights ``a >= 0`` with ``sum_x a_x Pi_x = I``, or ``None`` if none exist.

    Among many solutions the one of smallest Euclidean norm is returned, which
    is unique and inherits any permutation symmetry of the directions.
    """
    return _decompose(_directions(projectors), IDENTITY, tol)


def _stationary_points(K: np.ndarray, c: np.ndarray):
    if np.linalg.cond(K) > MAX_COND:
        return
    alpha = np.linalg.solve(K, np.ones(len(c)))
    beta = np.linalg.solve(K, c)
    cb = float(c @ beta)
    if abs(cb) < 1e-15:
        return
    tau2 = (alpha.sum() - 2) / cb
    if tau2 < 0:
        if tau2 < -1e-12:
            return
        tau2 = 0.0
    tau = np.sqrt(tau2)
    yield alpha + tau * beta
    if tau > 0:
        yield alpha - tau * beta


def _candidates(dirs: np.ndarray, c: np.ndarray):
    n = len(dirs)
    K = kernel_matrix(dirs)
    for x in range(n):
        a = np.zeros(n)
        a[x] = 1.0
        yield a
    for size in range(2, min(n, 4) + 1):
        for support in itertools.combinations(range(n), size):
            cols = list(support)
            for sub in _stationary_points(K[np.ix_(cols, cols)], c[cols]):
                a = np.zeros(n)
                a[cols] = sub
                yield a


def _completion(rho, dirs, weights) -> PovmCompletion:
    m_phi = IDENTITY - sum(a * bloch_to_density(m) for a, m in zip(weights, dirs))
    m_phi = 0.5 * (m_phi + m_phi.conj().T)
    q_inc = float(np.real(np.trace(rho @ m_phi)))
    complete = bool(np.max(np.abs(m_phi)) <= TOL_MAT * 10)
    resid = float(abs(1 - weights.sum() + 0.5 * weights @ kernel_matrix(dirs) @ weights))
    return PovmCompletion(weights, dirs, m_phi, q_inc, complete, resid)


def minimize_inconclusive(ens: Ensemble | np.ndarray, projectors) -> PovmCompletion:
    """Optimal weights for the given projector directions.

    ``ens`` may be an :class:`Ensemble` or directly the ensemble state ``rho``.
    If the projectors can sum to the identity the inconclusive element
    vanishes; otherwise every support is searched for the closed-form
    stationary points. Ties in the optimum are resolved by the minimum-norm
    weight vector reproducing the optimal ``M_phi``.
    """
    rho = ens.avg if isinstance(ens, Ensemble) else np.asarray(ens, dtype=complex)
    dirs = _directions(projectors)
    hull = identity_in_hull(dirs)
    if hull is not None:
        out = _completion(rho, dirs, hull)
        return PovmCompletion(out.weights, dirs, out.m_phi, max(out.q_inc, 0.0), True, out.residual)

    n_rho = bloch_of_operator(rho)
    c = 0.5 * (1 + dirs @ n_rho)
    K = kernel_matrix(dirs)
    best, best_obj = None, -np.inf
    for a in _candidates(dirs, c):
        if np.any(a < -TOL_FEAS) or a.sum() > 2 + TOL_FEAS:
            continue
        a = np.clip(a, 0, None)
        # near-singular supports can produce points off the rank-one surface or outside the PSD cone
        if abs(1 - a.sum() + 0.5 * a @ K @ a) > TOL_RANK1:
            continue
        if eigen2(IDENTITY - sum(w * bloch_to_density(m) for w, m in zip(a, dirs))).values[1] < -TOL_REPAIR:
            continue
        obj = float(c @ a)
        if obj > best_obj + 1e-14:
            best, best_obj = a, obj
    if best is None:
        raise InconclusiveSolverError("no feasible stationary point")

    optimum = _completion(rho, dirs, best)
    low = eigen2(optimum.m_phi).values[1]
    if -TOL_REPAIR <= low < -TOL_PSD:
        # nearly antipodal directions: the identity is almost in the hull and the
        # stationary point overshoots; shrink the weights onto the PSD boundary
        optimum = _completion(rho, dirs, best / eigen2(IDENTITY - optimum.m_phi).values[0])
        low = eigen2(optimum.m_phi).values[1]
    if low < -TOL_PSD or optimum.residual > TOL_RANK1:
        raise InconclusiveSolverError("optimum violates the rank-one constraint", best=optimum)
    tied = _decompose(dirs, IDENTITY - optimum.m_phi, 1e-9)
    if tied is None:
        return optimum
    return _completion(rho, dirs, tied)
