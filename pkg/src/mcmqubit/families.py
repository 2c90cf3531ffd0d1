"""Example ensembles, their closed-form maximum-confidence values, and the JSON exchange format.

JSON ensemble document::

    {"label": "optional text",
     "states": [{"q": 0.5, "bloch": [0, 0, 1]},
                {"q": 0.5, "matrix": [[[0.5, 0], [0.5, 0]], [[0.5, 0], [0.5, 0]]]}]}

Each state carries its prior ``q`` and either a Bloch vector or a 2x2 density
matrix given as ``[re, im]`` pairs. Priors whose sum is off by at most 1e-9 are
renormalised (sums already within 1e-10 of one are kept verbatim, so files
round-trip exactly); anything further off is rejected.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .ensemble import TOL_PROB, Ensemble
from .qubit import NotAStateError, NotHermitianError, bloch_to_density, density_to_bloch

PRIOR_SLACK = 1e-9

FAMILIES = {
    "two_noisy": ("p", "theta"),
    "geometric_uniform": ("n", "theta"),
    "tetrahedron": ("p",),
    "asymmetric_I": ("theta",),
    "asymmetric_II": ("theta",),
}

DESCRIPTIONS = {
    "two_noisy": "two depolarised pure states with <psi0|psi1> = cos(theta), visibility p",
    "geometric_uniform": "N pure states on a circle of polar angle theta, cyclic under z-rotation",
    "tetrahedron": "four depolarised SIC (tetrahedron) states, visibility p",
    "asymmetric_I": "trine with the first state tilted to polar angle theta",
    "asymmetric_II": "|+>, |-> and a third pure state at polar angle theta",
}


class EnsembleFormatError(ValueError):
    pass


@dataclass(frozen=True)
class FamilySpec:
    family: str
    p: float = 1.0
    theta: float = math.pi / 2
    n: int = 3

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"unknown family {self.family!r}; choose from {sorted(FAMILIES)}")
        params = FAMILIES[self.family]
        object.__setattr__(self, "p", float(self.p))
        object.__setattr__(self, "theta", float(self.theta))
        if "n" in params and (int(self.n) != self.n or self.n < 2):
            raise ValueError(f"n must be an integer >= 2, got {self.n}")
        object.__setattr__(self, "n", int(self.n))
        if "p" in params and not 0 <= self.p <= 1:
            raise ValueError(f"p must lie in [0, 1], got {self.p}")
        if "theta" in params and not 0 <= self.theta <= math.pi:
            raise ValueError(f"theta must lie in [0, pi], got {self.theta}")

    def params(self) -> dict:
        return {k: getattr(self, k) for k in FAMILIES[self.family]}


@dataclass(frozen=True)
class GoldenValues:
    """Closed-form values for a family; ``None`` wherever no closed form is available."""

    mu: list
    confidence: list
    t: list
    m_hat: list
    sigma: list
    q_inc: float | None


def _polar(theta, phi=0.0):
    return np.array([np.sin(theta) * np.cos(phi), np.sin(theta) * np.sin(phi), np.cos(theta)])


def tetrahedron_directions() -> np.ndarray:
    s = 2 * np.sqrt(2) / 3
    ang = 2 * np.pi * np.arange(1, 4) / 3
    rest = np.column_stack([s * np.cos(ang), s * np.sin(ang), np.full(3, -1 / 3)])
    return np.vstack([[0.0, 0.0, 1.0], rest])


def family_blochs(spec: FamilySpec) -> np.ndarray:
    th = spec.theta
    if spec.family == "two_noisy":
        return spec.p * np.array([[np.sin(th), 0, np.cos(th)], [-np.sin(th), 0, np.cos(th)]])
    if spec.family == "geometric_uniform":
        return np.array([_polar(th, 2 * np.pi * x / spec.n) for x in range(spec.n)])
    if spec.family == "tetrahedron":
        return spec.p * tetrahedron_directions()
    if spec.family == "asymmetric_I":
        h = np.sqrt(3) / 2
        return np.array([_polar(th), [h, 0, -0.5], [-h, 0, -0.5]])
    if spec.family == "asymmetric_II":
        return np.array([_polar(th), [1.0, 0, 0], [-1.0, 0, 0]])
    raise AssertionError(spec.family)


def build(spec: FamilySpec) -> Ensemble:
    blochs = family_blochs(spec)
    label = spec.family + "(" + ", ".join(f"{k}={v!r}" for k, v in spec.params().items()) + ")"
    return Ensemble.from_blochs([1.0 / len(blochs)] * len(blochs), blochs, label=label)


def golden(spec: FamilySpec) -> GoldenValues:
    th, p = spec.theta, spec.p
    size = len(family_blochs(spec))
    none = [None] * size
    if spec.family == "two_noisy":
        c, s = np.cos(th), np.sin(th)
        denom = np.sqrt(1 - p * p * c * c)
        if denom == 0:
            return GoldenValues(none, none, none, none, none, None)
        conf = 0.5 * (1 + p * s / denom)
        if p * s == 0:
            return GoldenValues(none, [conf] * 2, none, none, none, None)
        t = denom / (p * s)
        m = [p * np.array([(-1) ** x * t * s, 0, -c]) for x in range(2)]
        return GoldenValues(none, [conf] * 2, [t] * 2, m, [-v for v in m], p * abs(c))
    if spec.family == "geometric_uniform":
        if np.sin(th) == 0:
            return GoldenValues(none, none, none, none, none, None)
        m = [np.array([np.cos(2 * np.pi * x / spec.n) * np.sin(th), np.sin(2 * np.pi * x / spec.n) * np.sin(th), -np.cos(th)])
             for x in range(spec.n)]
        return GoldenValues([0.5] * size, [2 / spec.n] * size, none, m, [-v for v in m], abs(np.cos(th)))
    if spec.family == "tetrahedron":
        conf = [(1 + p) / 4] * 4
        weight = [1 / (1 + p)] * 4
        if p == 0:
            return GoldenValues(weight, conf, none, none, none, None)
        m = list(tetrahedron_directions())
        return GoldenValues(weight, conf, none, m, [-v for v in m], 0.0)
    if spec.family == "asymmetric_I":
        c = 1 - np.cos(th)
        t0 = (9 - 2 * c) / (9 - 4 * c)
        t = [t0] + [(9 - 2 * c) / (9 - c + 3 * np.sqrt(3) * (-1) ** x * np.sin(th)) for x in (1, 2)]
        return GoldenValues(none, [(1 + 1 / v) / 3 for v in t], t, none, none, None)
    if spec.family == "asymmetric_II":
        s, c = np.sin(th), np.cos(th)
        t = [2.0, 4 / (5 - 3 * s), 4 / (5 + 3 * s)]
        avg = np.array([s, 0, c]) / 3
        sigma = [-_polar(th),
                 np.array([s / 3 - 1, 0, c / 3]) * t[1] + avg,
                 np.array([s / 3 + 1, 0, c / 3]) * t[2] + avg]
        return GoldenValues(none, [(1 + 1 / v) / 3 for v in t], t, [-v for v in sigma], sigma, 0.0)
    raise AssertionError(spec.family)


def random_ensemble(n: int, rng, pure_fraction: float = 0.3, label: str | None = None) -> Ensemble:
    """``n`` states with Dirichlet(1) priors and Bloch vectors uniform in direction.

    A fraction of the states is pure; the rest have radii uniform in the ball volume.
    """
    rng = np.random.default_rng(rng)
    priors = rng.dirichlet(np.ones(n))
    priors = np.maximum(priors, 1e-6)
    priors /= priors.sum()
    dirs = rng.normal(size=(n, 3))
    dirs /= np.linalg.norm(dirs, axis=1, keepdims=True)
    radii = np.where(rng.random(n) < pure_fraction, 1.0, rng.random(n) ** (1 / 3))
    return Ensemble.from_blochs(priors, dirs * radii[:, None], label=label)


def _number(v, where) -> float:
    if isinstance(v, bool) or not isinstance(v, (int, float)) or not math.isfinite(v):
        raise EnsembleFormatError(f"{where}: expected a finite number, got {v!r}")
    return float(v)


def _state(entry, k) -> np.ndarray:
    where = f"states[{k}]"
    keys = set(entry) - {"q"}
    if keys == {"bloch"}:
        r = entry["bloch"]
        if not isinstance(r, list) or len(r) != 3:
            raise EnsembleFormatError(f"{where}.bloch: expected three numbers")
        return bloch_to_density([_number(v, f"{where}.bloch") for v in r])
    if keys == {"matrix"}:
        mat = entry["matrix"]
        try:
            vals = [[complex(_number(e[0], where), _number(e[1], where)) for e in row] for row in mat]
            arr = np.array(vals, dtype=complex)
        except (TypeError, IndexError, ValueError) as exc:
            raise EnsembleFormatError(f"{where}.matrix: expected 2x2 [re, im] pairs") from exc
        if arr.shape != (2, 2) or any(len(e) != 2 for row in mat for e in row):
            raise EnsembleFormatError(f"{where}.matrix: expected 2x2 [re, im] pairs")
        return bloch_to_density(density_to_bloch(arr))
    raise EnsembleFormatError(f"{where}: needs 'q' and exactly one of 'bloch' or 'matrix'")


def _reject_constant(name):
    raise EnsembleFormatError(f"non-finite number {name} in document")


def parse_ensemble(text: str | bytes) -> Ensemble:
    if isinstance(text, bytes):
        try:
            text = text.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise EnsembleFormatError("document is not valid UTF-8") from exc
    try:
        doc = json.loads(text, parse_constant=_reject_constant)
    except json.JSONDecodeError as exc:
        raise EnsembleFormatError(f"invalid JSON: {exc}") from exc
    if not isinstance(doc, dict) or not set(doc) <= {"states", "label"} or "states" not in doc:
        raise EnsembleFormatError("top level must be an object with 'states' and optional 'label'")
    label = doc.get("label")
    if label is not None and not isinstance(label, str):
        raise EnsembleFormatError("label must be a string")
    entries = doc["states"]
    if not isinstance(entries, list) or not entries:
        raise EnsembleFormatError("'states' must be a non-empty list")
    priors, states = [], []
    for k, entry in enumerate(entries):
        if not isinstance(entry, dict) or "q" not in entry:
            raise EnsembleFormatError(f"states[{k}]: expected an object with a prior 'q'")
        q = _number(entry["q"], f"states[{k}].q")
        if q <= 0:
            raise EnsembleFormatError(f"states[{k}].q: priors must be positive")
        priors.append(q)
        try:
            states.append(_state(entry, k))
        except (NotAStateError, NotHermitianError) as exc:
            raise EnsembleFormatError(f"states[{k}]: {exc}") from exc
    total = sum(priors)
    if abs(total - 1) > PRIOR_SLACK:
        raise EnsembleFormatError(f"priors sum to {total!r}, not 1")
    if abs(total - 1) > TOL_PROB:
        priors = [q / total for q in priors]
    return Ensemble(tuple(priors), tuple(states), label)


def ensemble_to_dict(ens: Ensemble) -> dict:
    doc = {"states": [{"q": q, "bloch": [float(v) for v in r]} for q, r in zip(ens.priors, ens.blochs)]}
    if ens.label is not None:
        doc = {"label": ens.label, **doc}
    return doc


def serialize_ensemble(ens: Ensemble) -> str:
    return json.dumps(ensemble_to_dict(ens), indent=2)
