"""Maximum-confidence measurements for qubit ensembles.

For a state of interest ``rho_x`` the ensemble state decomposes as

    rho = mu_x rho_x + (1 - mu_x) sigma_x

with a pure complementary state ``sigma_x``. The best achievable confidence
is ``q_x / mu_x`` and the optimal measurement element is the projector
orthogonal to ``sigma_x``. On the Bloch ball ``sigma_x`` sits where the ray
from ``n(rho_x)`` through ``n(rho)`` leaves the sphere:

    r(t) = n(rho) + t (n(rho) - n(rho_x)),   |r(t_x)| = 1,  t_x >= 0

and the confidence equals ``q_x (1 + 1/t_x)``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .ensemble import Ensemble
from .qubit import (
    TOL_PSD,
    as_operator,
    bloch_to_density,
    density_to_bloch,
    eigen2,
    is_psd,
    min_eigenvalue,
    overlap,
    purity,
    trace_distance,
    trace_norm,
)

TOL_PURITY = 1e-9
TOL_RANK = 1e-9
TOL_DEGENERATE = 1e-9
TOL_DETECT = 1e-12
TOL_FAR = 1e-15


class DegenerateEnsembleError(ValueError):
    """The ensemble state coincides with the state of interest."""


class UndefinedConfidenceError(ValueError):
    """The measurement element is never triggered by the ensemble."""


class RankDeficientError(ValueError):
    pass


class ConsistencyError(ArithmeticError):
    pass


@dataclass(frozen=True, eq=False)
class McmResult:
    """Maximum-confidence data for one state of the ensemble.

    ``sigma``, ``t`` and ``m_hat`` are ``None`` for a degenerate state of
    interest (``rho_x == rho``): then every measurement gives confidence
    ``q_x`` and no complementary state exists.
    """

    index: int
    prior: float
    mu: float
    confidence: float
    sigma: np.ndarray | None
    t: float | None
    m_hat: np.ndarray | None
    lam: float
    degenerate: bool = False

    @property
    def sigma_bloch(self) -> np.ndarray | None:
        return None if self.sigma is None else density_to_bloch(self.sigma)

    @property
    def element(self) -> np.ndarray | None:
        """Unit-weight measurement element (projector along ``m_hat``)."""
        return None if self.m_hat is None else bloch_to_density(self.m_hat)


def _check_index(ens: Ensemble, x: int) -> int:
    if not 0 <= x < len(ens):
        raise IndexError(f"state index {x} out of range for {len(ens)} states")
    return x


def confidence_of(ens: Ensemble, x: int, m, tol: float = TOL_DETECT) -> float:
    """Posterior probability ``q_x tr[rho_x M] / tr[rho M]`` of state ``x`` given outcome ``M``."""
    _check_index(ens, x)
    m = as_operator(m)
    if not is_psd(m):
        raise ValueError("measurement element is not positive semidefinite")
    rate = np.real(np.trace(ens.avg @ m))
    if rate <= tol:
        raise UndefinedConfidenceError(f"detection probability {rate:.3g} is zero")
    return float(ens.priors[x] * np.real(np.trace(ens.states[x] @ m)) / rate)


def _scalars(ens: Ensemble, x: int) -> tuple[float, float, float, float]:
    """``2(1 - tr rho^2)``, ``2(1 - tr[rho rho_x])``, ``2(1 - tr rho_x^2)`` and ``4 Det^2`` from Bloch vectors.

    With ``d = n(rho) - n(rho_x)`` the identities ``2(1 - F) = (|d|^2 + (1 - |n|^2) + (1 - |n_x|^2)) / 2``
    and ``4 Det^2 = |d|^2 - |n x d|^2`` avoid subtracting nearly equal traces.
    """
    n, n_x = ens.avg_bloch, ens.blochs[x]
    d = n - n_x
    a = float(d @ d)
    mixed = _one_minus_sq(n)
    impure = _one_minus_sq(n_x)
    far = 0.5 * (a + mixed + impure)
    cross = np.cross(n, d)
    return mixed, far, impure, a - float(cross @ cross)


def _one_minus_sq(r) -> float:
    norm = float(np.linalg.norm(r))
    return (1 - norm) * (1 + norm)


def mu_pure(ens: Ensemble, x: int) -> float:
    """Mixing weight for a pure state of interest: ``(1 - tr rho^2) / (2 (1 - tr[rho rho_x]))``."""
    _check_index(ens, x)
    mixed, far, impure, _ = _scalars(ens, x)
    if impure / 2 > TOL_PURITY:
        raise ValueError(f"state {x} is not pure (1 - purity = {impure / 2:.3g})")
    if far <= TOL_FAR:
        raise DegenerateEnsembleError(f"ensemble state equals pure state {x}")
    return mixed / (2 * far)


def mu_general(ens: Ensemble, x: int) -> float:
    """Mixing weight for an arbitrary state of interest.

    Evaluates the smaller root of ``(1 - P_x) mu^2 - 2 (1 - F) mu + (1 - P) = 0``
    (``P`` purities, ``F = tr[rho rho_x]``) in the rationalised form
    ``(1 - P) / ((1 - F) + Det)``, which is free of cancellation as
    ``P_x -> 1`` and reduces to the pure-state formula there.
    """
    _check_index(ens, x)
    mixed, far, impure, disc = _scalars(ens, x)
    if disc < -4 * TOL_PSD:
        raise ConsistencyError(f"negative discriminant {disc:.3g} for state {x}")
    denom = far + np.sqrt(max(disc, 0.0))
    if denom <= TOL_FAR:
        raise DegenerateEnsembleError(f"ensemble state equals pure state {x}")
    return float(mixed / denom)


def mu(ens: Ensemble, x: int) -> float:
    """Dispatch on purity of ``rho_x``: pure formula near purity 1, general otherwise."""
    if purity(ens.states[_check_index(ens, x)]) >= 1 - TOL_PURITY:
        return mu_pure(ens, x)
    return mu_general(ens, x)


def line_parameter(ens: Ensemble, x: int) -> float | None:
    """Nonnegative root ``t_x`` of ``|n(rho) + t (n(rho) - n(rho_x))| = 1``; ``None`` if degenerate."""
    n = ens.avg_bloch
    d = n - ens.blochs[_check_index(ens, x)]
    a = float(d @ d)
    if np.sqrt(a) <= TOL_DEGENERATE:
        return None
    b = float(d @ n)
    c = max(1.0 - float(n @ n), 0.0)
    root = np.sqrt(b * b + a * c)
    # roots have opposite signs (product -c/a); the stable form avoids -b + root cancelling
    if b > 0:
        return c / (b + root)
    return (root - b) / a


def mcm(ens: Ensemble, x: int) -> McmResult:
    _check_index(ens, x)
    q = ens.priors[x]
    t = line_parameter(ens, x)
    if t is not None:
        try:
            weight = mu(ens, x)
        except DegenerateEnsembleError:
            t = None
    if t is None:
        return McmResult(x, q, 1.0, q, None, None, None, q, degenerate=True)
    n = ens.avg_bloch
    r = n + t * (n - ens.blochs[x])
    r = r / np.linalg.norm(r)
    # q/mu can overshoot 1 by rounding when rho is almost pure
    conf = min(q / weight, 1.0)
    return McmResult(x, q, weight, conf, bloch_to_density(r), float(t), -r, conf)


def mcm_all(ens: Ensemble) -> list[McmResult]:
    return [mcm(ens, x) for x in range(len(ens))]


def inverse_sqrt(rho) -> np.ndarray:
    vals, vecs = eigen2(rho)
    if vals[1] <= 0:
        raise RankDeficientError("operator is singular")
    return (vecs * (1 / np.sqrt(vals))) @ vecs.conj().T


def mcm_opnorm(ens: Ensemble, x: int) -> float:
    """Maximum confidence as ``|| rho^{-1/2} q_x rho_x rho^{-1/2} ||_op``."""
    _check_index(ens, x)
    if np.linalg.norm(ens.avg_bloch) >= 1 - TOL_RANK:
        raise RankDeficientError("ensemble state is rank deficient; operator-norm route undefined")
    root = inverse_sqrt(ens.avg)
    return float(eigen2(root @ (ens.priors[x] * ens.states[x]) @ root).values[0])


def n_pure_confidence(psi0, others) -> float:
    """Maximum confidence for ``psi0`` against an equal-prior set of other pure states.

    Depends only on ``F = tr[rho_0 rho_M]`` and ``P = tr[rho_M^2]`` for the
    uniform mixture ``rho_M`` of the others::

        C = 2 (1 - F) / (N + 1 - (N - 1) P - 2 F)
    """
    states = [psi0, *others]
    if len(states) < 2:
        raise ValueError("need at least one other state")
    for k, s in enumerate(states):
        if purity(s) < 1 - TOL_PURITY:
            raise ValueError(f"state {k} is not pure")
    n = len(states)
    rho_m = sum(as_operator(s) for s in others) / (n - 1)
    f = overlap(psi0, rho_m)
    p = purity(rho_m)
    return 2 * (1 - f) / (n + 1 - (n - 1) * p - 2 * f)


def outcome_rate_bound(ens: Ensemble, x: int) -> float:
    """Upper bound ``1 + (mu tr[rho rho_x] - tr[rho^2]) / (1 - mu)`` on ``tr[rho M_x]`` (pure ``rho_x``)."""
    m = mu_pure(ens, x)
    if m >= 1 - TOL_DEGENERATE:
        raise DegenerateEnsembleError("mu = 1; outcome-rate bound undefined")
    f = overlap(ens.avg, ens.states[x])
    return 1 + (m * f - purity(ens.avg)) / (1 - m)


def ratio_confidence(ens: Ensemble, res: McmResult) -> float:
    """Confidence from the trace-norm ratio ``q_x ||rho_x - sigma_x||_1 / ||rho - sigma_x||_1``."""
    if res.sigma is None:
        raise DegenerateEnsembleError("no complementary state")
    x = res.index
    return res.prior * trace_distance(ens.states[x], res.sigma) / trace_distance(ens.avg, res.sigma)


def line_confidence(res: McmResult) -> float:
    if res.t is None:
        raise DegenerateEnsembleError("no line parameter")
    return res.prior * (1 + 1 / res.t)


def decomposition_residual(ens: Ensemble, res: McmResult) -> float:
    """``|| rho - mu rho_x - (1 - mu) sigma_x ||_1``."""
    if res.sigma is None:
        return trace_norm(ens.avg - ens.states[res.index])
    x = res.index
    return trace_norm(ens.avg - res.mu * ens.states[x] - (1 - res.mu) * res.sigma)


def dual_gap(ens: Ensemble, res: McmResult) -> float:
    """Smallest eigenvalue of ``lambda rho - q_x rho_x`` at the computed optimum."""
    return min_eigenvalue(res.lam * ens.avg - res.prior * ens.states[res.index])
