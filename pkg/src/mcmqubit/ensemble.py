from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .qubit import as_state, bloch_to_density, density_to_bloch

TOL_PROB = 1e-10


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a)
    a.flags.writeable = False
    return a


@dataclass(frozen=True, eq=False)
class Ensemble:
    """Prior probabilities ``q_x > 0`` paired with qubit states ``rho_x``.

    ``avg`` is the ensemble state ``rho = sum_x q_x rho_x``. Arrays held by the
    ensemble are read-only.
    """

    priors: tuple[float, ...]
    states: tuple[np.ndarray, ...]
    label: str | None = None
    avg: np.ndarray = field(init=False, repr=False)
    blochs: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        priors = tuple(float(q) for q in self.priors)
        if len(priors) == 0:
            raise ValueError("ensemble needs at least one state")
        if len(priors) != len(self.states):
            raise ValueError("priors and states differ in length")
        if any(not np.isfinite(q) or q <= 0 for q in priors):
            raise ValueError("priors must be positive")
        if abs(sum(priors) - 1) > TOL_PROB:
            raise ValueError(f"priors sum to {sum(priors):.17g}, not 1")
        states = tuple(_frozen(as_state(s)) for s in self.states)
        blochs = np.array([density_to_bloch(s) for s in states])
        avg_bloch = np.asarray(priors) @ blochs
        norm = np.linalg.norm(avg_bloch)
        if norm > 1:
            avg_bloch = avg_bloch / norm
        object.__setattr__(self, "priors", priors)
        object.__setattr__(self, "states", states)
        object.__setattr__(self, "blochs", _frozen(blochs))
        object.__setattr__(self, "avg", _frozen(bloch_to_density(avg_bloch)))

    @classmethod
    def from_blochs(cls, priors, blochs, label=None) -> "Ensemble":
        return cls(tuple(priors), tuple(bloch_to_density(r) for r in blochs), label)

    @classmethod
    def uniform(cls, states, label=None) -> "Ensemble":
        n = len(states)
        return cls((1.0 / n,) * n, tuple(states), label)

    def __len__(self) -> int:
        return len(self.priors)

    @property
    def avg_bloch(self) -> np.ndarray:
        return density_to_bloch(self.avg)

    def same_as(self, other: "Ensemble", tol: float = 0.0) -> bool:
        if len(self) != len(other):
            return False
        dq = np.max(np.abs(np.subtract(self.priors, other.priors)))
        dr = np.max(np.abs(self.blochs - other.blochs))
        return bool(dq <= tol and dr <= tol)
