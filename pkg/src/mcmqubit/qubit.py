"""Exact 2x2 Hermitian algebra and Bloch-vector geometry.

Convention used everywhere in the package::

    rho = (I + r . sigma) / 2,   sigma = (X, Y, Z)

so that ``r_i = tr[rho sigma_i]``. Pure states have ``|r| = 1``.
Density operators and Hermitian operators are plain ``(2, 2)`` complex
numpy arrays; Bloch vectors are real arrays of shape ``(3,)``.
"""

from __future__ import annotations

from typing import NamedTuple

import numpy as np

TOL_MAT = 1e-10
TOL_PSD = 1e-9
TOL_NORM = 1e-9

IDENTITY = np.eye(2, dtype=complex)
PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)
PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=complex)
PAULIS = (PAULI_X, PAULI_Y, PAULI_Z)


class NotHermitianError(ValueError):
    pass


class NotAStateError(ValueError):
    pass


class EigenPair2(NamedTuple):
    """Eigenvalues in descending order; ``vectors[:, i]`` belongs to ``values[i]``."""

    values: np.ndarray
    vectors: np.ndarray


def as_operator(h, tol: float = TOL_MAT) -> np.ndarray:
    h = np.asarray(h, dtype=complex)
    if h.shape != (2, 2):
        raise NotHermitianError(f"expected a 2x2 matrix, got shape {h.shape}")
    if not np.all(np.isfinite(h)):
        raise NotHermitianError("matrix has non-finite entries")
    if np.max(np.abs(h - h.conj().T)) > tol:
        raise NotHermitianError("matrix is not Hermitian")
    return 0.5 * (h + h.conj().T)


def as_bloch(r) -> np.ndarray:
    r = np.asarray(r, dtype=float)
    if r.shape != (3,):
        raise ValueError(f"expected a Bloch 3-vector, got shape {r.shape}")
    if not np.all(np.isfinite(r)):
        raise ValueError("Bloch vector has non-finite entries")
    return r


def bloch_to_density(r, tol: float = TOL_NORM) -> np.ndarray:
    r = as_bloch(r)
    norm = np.linalg.norm(r)
    if norm > 1 + tol:
        raise NotAStateError(f"Bloch vector norm {norm:.17g} exceeds 1")
    return 0.5 * (IDENTITY + r[0] * PAULI_X + r[1] * PAULI_Y + r[2] * PAULI_Z)


def bloch_of_operator(h) -> np.ndarray:
    """Coefficients ``tr[H sigma_i]`` of any Hermitian operator (no trace check)."""
    h = as_operator(h)
    return np.array([np.real(np.trace(h @ s)) for s in PAULIS])


def density_to_bloch(rho, tol: float = TOL_MAT, tol_psd: float = TOL_PSD) -> np.ndarray:
    """Bloch vector of a density operator.

    Slightly non-PSD input (smallest eigenvalue down to ``-tol_psd``) is accepted
    and its Bloch vector clamped onto the unit sphere.
    """
    rho = as_operator(rho, tol)
    tr = np.real(np.trace(rho))
    if abs(tr - 1) > tol:
        raise NotAStateError(f"trace {tr:.17g} is not 1")
    r = bloch_of_operator(rho)
    norm = np.linalg.norm(r)
    # smallest eigenvalue is (1 - |r|) / 2
    if (1 - norm) / 2 < -tol_psd:
        raise NotAStateError(f"operator is not positive semidefinite (|r| = {norm:.17g})")
    if norm > 1:
        r = r / norm
    return r


def as_state(rho, tol: float = TOL_MAT, tol_psd: float = TOL_PSD) -> np.ndarray:
    """Validated, symmetrised copy of ``rho`` (clamped if marginally non-PSD)."""
    return bloch_to_density(density_to_bloch(rho, tol, tol_psd))


def overlap(rho, sigma) -> float:
    """``tr[rho sigma] = (1 + r . s) / 2``."""
    r, s = density_to_bloch(rho), density_to_bloch(sigma)
    return 0.5 * (1 + float(r @ s))


def purity(rho) -> float:
    r = density_to_bloch(rho)
    return 0.5 * (1 + float(r @ r))


def trace_distance(rho, sigma) -> float:
    """Trace norm ``||rho - sigma||_1``; for qubits this is the Bloch distance."""
    return float(np.linalg.norm(density_to_bloch(rho) - density_to_bloch(sigma)))


def hs_distance(rho, sigma) -> float:
    """Hilbert-Schmidt distance ``sqrt(tr[(rho - sigma)^2])`` from the matrices."""
    d = as_operator(rho) - as_operator(sigma)
    return float(np.sqrt(max(np.real(np.trace(d @ d)), 0.0)))


def eigen2(h, tol: float = TOL_MAT) -> EigenPair2:
    """Closed-form eigendecomposition of a 2x2 Hermitian matrix.

    For ``H = [[a, b], [b*, d]]`` the eigenvalues are ``m +- r`` with
    ``m = (a + d)/2`` and ``r = hypot((a - d)/2, |b|)``. The eigenvector
    formula is picked per sign of ``a - d`` so that no component is formed
    by subtracting nearly equal numbers.
    """
    h = as_operator(h, tol)
    # exact power-of-two rescaling keeps tiny or huge entries away from under/overflow
    big = float(np.max(np.abs(h)))
    exp = np.frexp(big)[1] if big > 0 else 0
    h = np.ldexp(h.real, -exp) + 1j * np.ldexp(h.imag, -exp)
    a, d = h[0, 0].real, h[1, 1].real
    b = h[0, 1]
    mean = 0.5 * (a + d)
    half = 0.5 * (a - d)
    rad = float(np.hypot(half, abs(b)))
    values = np.ldexp(np.array([mean + rad, mean - rad]), exp)
    if rad == 0.0:
        return EigenPair2(values, np.eye(2, dtype=complex))
    if half >= 0:
        v1 = np.array([rad + half, np.conj(b)], dtype=complex)
    else:
        v1 = np.array([b, rad - half], dtype=complex)
    shift = -np.frexp(np.max(np.abs(v1)))[1]
    v1 = np.ldexp(v1.real, shift) + 1j * np.ldexp(v1.imag, shift)
    v1 /= np.linalg.norm(v1)
    v2 = np.array([-np.conj(v1[1]), np.conj(v1[0])])
    return EigenPair2(values, np.column_stack([v1, v2]))


def operator_norm(h) -> float:
    return float(np.max(np.abs(eigen2(h).values)))


def trace_norm(h) -> float:
    return float(np.sum(np.abs(eigen2(h).values)))


def min_eigenvalue(h) -> float:
    return float(eigen2(h).values[1])


def is_psd(h, tol: float = TOL_PSD) -> bool:
    return min_eigenvalue(h) >= -tol


def pure_state_from_angles(theta: float, phi: float) -> np.ndarray:
    """``|psi> = cos(theta/2)|0> + e^{i phi} sin(theta/2)|1>`` as a density operator."""
    return ket_to_density([np.cos(theta / 2), np.exp(1j * phi) * np.sin(theta / 2)])


def ket_to_density(psi) -> np.ndarray:
    psi = np.asarray(psi, dtype=complex).reshape(2)
    norm = np.linalg.norm(psi)
    if norm == 0:
        raise NotAStateError("zero vector")
    psi = psi / norm
    return np.outer(psi, psi.conj())


def projector(r_hat, tol: float = TOL_NORM) -> np.ndarray:
    """Rank-one projector ``(I + r_hat . sigma) / 2`` onto a unit Bloch direction."""
    r_hat = as_bloch(r_hat)
    norm = np.linalg.norm(r_hat)
    if abs(norm - 1) > tol:
        raise ValueError(f"direction must be a unit vector, norm is {norm:.17g}")
    return bloch_to_density(r_hat / norm)


def antipodal_projector(r_hat, tol: float = TOL_NORM) -> np.ndarray:
    """Projector onto the state orthogonal to ``r_hat`` (Bloch vector ``-r_hat``)."""
    return projector(-as_bloch(r_hat), tol)


def depolarize(rho, p: float) -> np.ndarray:
    """``p rho + (1 - p) I/2``."""
    if not 0 <= p <= 1:
        raise ValueError(f"noise parameter must lie in [0, 1], got {p}")
    return bloch_to_density(p * density_to_bloch(rho))
