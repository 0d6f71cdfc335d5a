"""Single-qubit density matrices and unitary operators.

Everything here is a thin, validated layer over 2x2 ``complex128`` numpy
arrays.  Index (0, 0) is the probability of measuring ``|0>`` (heads).
"""
from __future__ import annotations

from typing import Iterable, Sequence

import numpy as np

TOL = 1e-12

IDENTITY = np.eye(2, dtype=complex)
FLIP = np.array([[0, 1], [1, 0]], dtype=complex)


class InvalidStateError(ValueError):
    """A matrix violates a density-matrix or unitarity invariant."""


def as_mat2(a) -> np.ndarray:
    m = np.asarray(a, dtype=complex)
    if m.shape != (2, 2):
        raise InvalidStateError(f"expected a 2x2 matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise InvalidStateError("matrix has non-finite entries")
    return m


def mat_mul(a, b) -> np.ndarray:
    return as_mat2(a) @ as_mat2(b)


def conjugate_transpose(a) -> np.ndarray:
    return as_mat2(a).conj().T


def _frozen(m: np.ndarray) -> np.ndarray:
    m = np.array(m, dtype=complex)
    m.setflags(write=False)
    return m


class DensityMatrix:
    """Hermitian, unit-trace, positive semidefinite 2x2 matrix.

    Construction validates the invariants and refuses anything that breaks
    them; nothing is renormalised.
    """

    __slots__ = ("m",)

    def __init__(self, m, tol: float = TOL):
        m = as_mat2(m)
        if np.max(np.abs(m - m.conj().T)) > tol:
            raise InvalidStateError("density matrix is not Hermitian")
        if abs(np.trace(m) - 1.0) > tol:
            raise InvalidStateError(f"density matrix trace {np.trace(m)} != 1")
        diag = m.diagonal().real
        if np.any(diag < -tol) or np.any(diag > 1 + tol):
            raise InvalidStateError("diagonal entries outside [0, 1]")
        if np.linalg.det(m).real < -tol:
            raise InvalidStateError("density matrix is not positive semidefinite")
        self.m = _frozen(m)

    @classmethod
    def pure(cls, amplitudes: Sequence[complex]) -> "DensityMatrix":
        psi = np.asarray(amplitudes, dtype=complex).reshape(2)
        return cls(np.outer(psi, psi.conj()))

    def __array__(self, dtype=None, copy=None):
        return self.m if dtype is None else self.m.astype(dtype)

    def __eq__(self, other):
        if not isinstance(other, DensityMatrix):
            return NotImplemented
        return bool(np.array_equal(self.m, other.m))

    def __hash__(self):
        return hash(self.m.tobytes())

    def allclose(self, other, atol: float = TOL) -> bool:
        return bool(np.allclose(self.m, np.asarray(other), rtol=0, atol=atol))

    def __repr__(self):
        return f"DensityMatrix({np.array2string(self.m, precision=6)})"


class Unitary2:
    """2x2 unitary operator, validated on construction."""

    __slots__ = ("m",)

    def __init__(self, m, tol: float = TOL):
        m = as_mat2(m)
        if np.max(np.abs(m @ m.conj().T - IDENTITY)) > tol:
            raise InvalidStateError("matrix is not unitary")
        self.m = _frozen(m)

    @property
    def dagger(self) -> np.ndarray:
        return self.m.conj().T

    def __array__(self, dtype=None, copy=None):
        return self.m if dtype is None else self.m.astype(dtype)

    def __eq__(self, other):
        if not isinstance(other, Unitary2):
            return NotImplemented
        return bool(np.array_equal(self.m, other.m))

    def __hash__(self):
        return hash(self.m.tobytes())

    def __repr__(self):
        return f"Unitary2({np.array2string(self.m, precision=6)})"


def _unitary(u) -> Unitary2:
    return u if isinstance(u, Unitary2) else Unitary2(u)


def _density(rho) -> DensityMatrix:
    return rho if isinstance(rho, DensityMatrix) else DensityMatrix(rho)


def evolve_pure(rho, u) -> DensityMatrix:
    """Return ``U rho U^dagger``."""
    rho, u = _density(rho), _unitary(u)
    return DensityMatrix(u.m @ rho.m @ u.dagger)


def evolve_mixed(rho, branches: Iterable[tuple[float, object]]) -> DensityMatrix:
    """Return ``sum_j p_j U_j rho U_j^dagger`` for ``branches = [(p_j, U_j), ...]``."""
    rho = _density(rho)
    branches = [(float(p), _unitary(u)) for p, u in branches]
    if not branches:
        raise InvalidStateError("no branches given")
    probs = np.array([p for p, _ in branches])
    if np.any(probs < 0) or np.any(probs > 1):
        raise InvalidStateError("branch probability outside [0, 1]")
    if abs(probs.sum() - 1.0) > TOL:
        raise InvalidStateError(f"branch probabilities sum to {probs.sum()}, not 1")
    out = np.zeros((2, 2), dtype=complex)
    for p, u in branches:
        out += p * (u.m @ rho.m @ u.dagger)
    return DensityMatrix(out)


def measure_probs(rho) -> tuple[float, float]:
    """Probabilities of reading ``|0>`` and ``|1>``."""
    rho = _density(rho)
    return float(rho.m[0, 0].real), float(rho.m[1, 1].real)


PAULI = np.array([[[0, 1], [1, 0]], [[0, -1j], [1j, 0]], [[1, 0], [0, -1]]], dtype=complex)


def bloch_vector(rho) -> np.ndarray:
    """``(x, y, z)`` with ``rho = (I + x X + y Y + z Z) / 2``; batches on leading axes."""
    m = np.asarray(rho, dtype=complex)
    return np.stack([2 * m[..., 0, 1].real, -2 * m[..., 0, 1].imag,
                     (m[..., 0, 0] - m[..., 1, 1]).real], axis=-1)


def bloch_rotation(u) -> np.ndarray:
    """SO(3) action of ``rho -> U rho U^dagger`` on Bloch vectors.

    ``R[i, j] = tr(sigma_i U sigma_j U^dagger) / 2``; batches on leading axes.
    """
    u = np.asarray(u, dtype=complex)
    lead = u.shape[:-2]
    left = (PAULI @ u[..., None, :, :]).reshape(lead + (3, 4))
    right = (PAULI @ u.conj().swapaxes(-1, -2)[..., None, :, :]).swapaxes(-1, -2).reshape(lead + (3, 4))
    return 0.5 * (left @ right.swapaxes(-1, -2)).real


def zero_state() -> DensityMatrix:
    return DensityMatrix([[1, 0], [0, 0]])


def maximally_mixed() -> DensityMatrix:
    """The stuck state diag(1/2, 1/2)."""
    return DensityMatrix([[0.5, 0], [0, 0.5]])
