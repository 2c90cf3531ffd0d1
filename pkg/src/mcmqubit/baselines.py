"""Minimum-error and unambiguous discrimination references."""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .ensemble import TOL_PROB
from .mcm import TOL_PURITY
from .qubit import IDENTITY, TOL_MAT, as_state, eigen2, overlap, purity


class UsdRegimeWarning(UserWarning):
    """The two-state USD formula is evaluated outside the regime where it is optimal."""


@dataclass(frozen=True, eq=False)
class TwoStateProblem:
    q0: float
    q1: float
    rho0: np.ndarray
    rho1: np.ndarray

    def __post_init__(self):
        if self.q0 < 0 or self.q1 < 0 or abs(self.q0 + self.q1 - 1) > TOL_PROB:
            raise ValueError("priors must be nonnegative and sum to 1")
        object.__setattr__(self, "rho0", as_state(self.rho0))
        object.__setattr__(self, "rho1", as_state(self.rho1))

    @property
    def difference(self) -> np.ndarray:
        return self.q0 * self.rho0 - self.q1 * self.rho1


@dataclass(frozen=True, eq=False)
class HelstromMeasurement:
    """Optimal two-outcome measurement ``(M0, M1)``.

    ``null`` marks the regime where one element is the identity (always guess
    the same state); ``degenerate`` marks ``q0 rho0 == q1 rho1`` where every
    measurement is optimal and the computational basis is returned.
    """

    m0: np.ndarray
    m1: np.ndarray
    null: bool = False
    degenerate: bool = False


def helstrom_error(p: TwoStateProblem) -> float:
    """Minimum error ``1/2 - 1/2 ||q0 rho0 - q1 rho1||_1``."""
    vals = eigen2(p.difference).values
    return float(0.5 - 0.5 * np.sum(np.abs(vals)))


def helstrom_povm(p: TwoStateProblem, tol: float = TOL_MAT) -> HelstromMeasurement:
    vals, vecs = eigen2(p.difference)
    if np.all(np.abs(vals) <= tol):
        return HelstromMeasurement(np.diag([1.0, 0.0]).astype(complex), np.diag([0.0, 1.0]).astype(complex), degenerate=True)
    m0 = np.zeros((2, 2), dtype=complex)
    for val, vec in zip(vals, vecs.T):
        if val > tol:
            m0 += np.outer(vec, vec.conj())
    m1 = IDENTITY - m0
    null = bool(np.all(vals > tol) or np.all(vals <= tol))
    return HelstromMeasurement(m0, m1, null=null)


def error_probability(p: TwoStateProblem, m0, m1) -> float:
    return float(np.real(p.q0 * np.trace(p.rho0 @ m1) + p.q1 * np.trace(p.rho1 @ m0)))


def usd_inconclusive(q0: float, psi0, q1: float, psi1) -> float:
    """Two-pure-state USD failure rate ``2 sqrt(q0 q1) |<psi0|psi1>|``.

    The value is returned as given by the formula; a :class:`UsdRegimeWarning`
    is raised when ``|<psi0|psi1>|^2 > min(q)/max(q)``, where the optimal
    measurement no longer uses both conclusive outcomes.
    """
    if q0 <= 0 or q1 <= 0 or abs(q0 + q1 - 1) > TOL_PROB:
        raise ValueError("priors must be positive and sum to 1")
    for s in (psi0, psi1):
        if purity(s) < 1 - TOL_PURITY:
            raise ValueError("unambiguous discrimination of mixed qubit states is impossible")
    ov2 = overlap(psi0, psi1)
    if ov2 >= 1 - TOL_PURITY:
        raise ValueError("identical states cannot be discriminated unambiguously")
    if ov2 > min(q0, q1) / max(q0, q1):
        warnings.warn("priors too unbalanced for the symmetric USD formula", UsdRegimeWarning, stacklevel=2)
    return float(2 * np.sqrt(q0 * q1) * np.sqrt(max(ov2, 0.0)))


def med_symmetric_guess(n: int, theta: float) -> float:
    """Minimum-error success probability ``(1 + sin(theta)) / N`` for equiprobable geometrically uniform pure states."""
    if n < 2:
        raise ValueError("need at least two states")
    return (1 + np.sin(theta)) / n


def success_probability(priors, states, elements) -> float:
    """``sum_x q_x tr[rho_x E_x]`` for elements paired with states (extra elements ignored)."""
    return float(sum(q * np.real(np.trace(s @ e)) for q, s, e in zip(priors, states, elements)))
