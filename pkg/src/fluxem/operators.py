"""Dense operator algebra on (qubit) x (photon Fock) x (phonon Fock).

Operators and states are plain ``complex128`` numpy arrays. Subsystems are
ordered (qubit, photon, phonon) and flattened row-major, so the product
state |q, n_a, n_b> sits at index ``(q * N_a + n_a) * N_b + n_b``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import reduce
from math import prod
from typing import Sequence

import numpy as np
import scipy.linalg

from .errors import (
    HermiticityViolation,
    InvalidDimension,
    InvalidLevel,
    InvalidOccupation,
    MissingSpace,
)

HERMITIAN_TOL = 1e-10
TRACE_TOL = 1e-12
QUBIT_LEVELS = 3


@dataclass(frozen=True)
class HilbertSpace:
    dims: tuple[int, ...]

    def __post_init__(self):
        dims = tuple(int(d) for d in self.dims)
        if not dims:
            raise InvalidDimension("a Hilbert space needs at least one subsystem")
        if any(d < 2 for d in dims):
            raise InvalidDimension(f"subsystem dimensions must be >= 2, got {dims}")
        object.__setattr__(self, "dims", dims)

    @property
    def total_dim(self) -> int:
        return prod(self.dims)

    def __len__(self):
        return len(self.dims)


def full_space(n_a: int, n_b: int) -> HilbertSpace:
    """Composite space of the three-level qubit and the two resonator modes."""
    return HilbertSpace((QUBIT_LEVELS, n_a, n_b))


def dagger(m: np.ndarray) -> np.ndarray:
    return m.conj().T


def identity(n: int) -> np.ndarray:
    return np.eye(n, dtype=complex)


def annihilation(n: int) -> np.ndarray:
    if n < 2:
        raise InvalidDimension(f"Fock truncation must be >= 2, got {n}")
    return np.diag(np.sqrt(np.arange(1, n, dtype=float)), k=1).astype(complex)


def number(n: int) -> np.ndarray:
    a = annihilation(n)
    return dagger(a) @ a


def _check_pair(l: int, k: int) -> None:
    if not (0 <= l < QUBIT_LEVELS and 0 <= k < QUBIT_LEVELS):
        raise InvalidLevel(f"qubit levels must lie in 0..{QUBIT_LEVELS - 1}, got ({l}, {k})")
    if l >= k:
        raise InvalidLevel(f"expected l < k, got ({l}, {k})")


def qubit_transition(l: int, k: int) -> np.ndarray:
    """Lowering operator |l><k| (l < k)."""
    _check_pair(l, k)
    m = np.zeros((QUBIT_LEVELS, QUBIT_LEVELS), dtype=complex)
    m[l, k] = 1.0
    return m


def qubit_z(l: int, k: int) -> np.ndarray:
    """|k><k| - |l><l| (l < k)."""
    _check_pair(l, k)
    m = np.zeros((QUBIT_LEVELS, QUBIT_LEVELS), dtype=complex)
    m[k, k] = 1.0
    m[l, l] = -1.0
    return m


def qubit_projector(k: int) -> np.ndarray:
    if not 0 <= k < QUBIT_LEVELS:
        raise InvalidLevel(f"qubit level must lie in 0..{QUBIT_LEVELS - 1}, got {k}")
    m = np.zeros((QUBIT_LEVELS, QUBIT_LEVELS), dtype=complex)
    m[k, k] = 1.0
    return m


def embed(op: np.ndarray, slot: int, space: HilbertSpace) -> np.ndarray:
    """Lift ``op`` acting on subsystem ``slot`` to the whole space."""
    if not 0 <= slot < len(space):
        raise InvalidDimension(f"slot {slot} outside space with {len(space)} subsystems")
    op = np.asarray(op, dtype=complex)
    d = space.dims[slot]
    if op.shape != (d, d):
        raise InvalidDimension(f"operator shape {op.shape} does not match subsystem dimension {d}")
    factors = [op if i == slot else identity(n) for i, n in enumerate(space.dims)]
    return reduce(np.kron, factors)


def basis_state(space: HilbertSpace, occupation: Sequence[int]) -> np.ndarray:
    """Column vector for the product state with the given per-subsystem indices."""
    occupation = tuple(int(i) for i in occupation)
    if len(occupation) != len(space):
        raise InvalidOccupation(f"need {len(space)} indices, got {occupation}")
    for i, d in zip(occupation, space.dims):
        if not 0 <= i < d:
            raise InvalidOccupation(f"occupation {occupation} out of range for dims {space.dims}")
    psi = np.zeros((space.total_dim, 1), dtype=complex)
    psi[np.ravel_multi_index(occupation, space.dims), 0] = 1.0
    return psi


def basis_density(space: HilbertSpace, occupation: Sequence[int]) -> np.ndarray:
    psi = basis_state(space, occupation)
    return psi @ dagger(psi)


def partial_trace(rho: np.ndarray, keep: Sequence[int], space: HilbertSpace | None) -> np.ndarray:
    """Reduced density matrix on the subsystems listed in ``keep``.

    Kept subsystems stay in their original order; tracing out everything
    returns the 1x1 matrix [Tr rho].
    """
    if space is None:
        raise MissingSpace("partial_trace needs the Hilbert space the matrix lives on")
    n = space.total_dim
    if rho.shape != (n, n):
        raise InvalidDimension(f"matrix shape {rho.shape} does not match space dimension {n}")
    keep = sorted(set(int(k) for k in keep))
    if any(not 0 <= k < len(space) for k in keep):
        raise InvalidDimension(f"keep indices {keep} outside space")
    nsub = len(space)
    t = rho.reshape(space.dims + space.dims)
    # einsum labels: row index i, column index nsub + i; traced slots share a label
    row = list(range(nsub))
    col = [nsub + i if i in keep else i for i in range(nsub)]
    out = [i for i in keep] + [nsub + i for i in keep]
    reduced = np.einsum(t, row + col, out)
    d = prod(space.dims[k] for k in keep)
    return reduced.reshape(d, d)


def expectation(op: np.ndarray, rho: np.ndarray) -> float:
    if op.shape != rho.shape:
        raise InvalidDimension(f"operator shape {op.shape} does not match state shape {rho.shape}")
    # Tr(op @ rho) without forming the product
    value = np.sum(op.T * rho)
    if abs(value.imag) > HERMITIAN_TOL:
        raise HermiticityViolation(f"expectation value has imaginary part {value.imag:.3e}")
    return float(value.real)


def hermiticity_residual(m: np.ndarray) -> float:
    return float(np.max(np.abs(m - dagger(m)))) if m.size else 0.0


def min_eigenvalue_hermitian(m: np.ndarray) -> float:
    scale = max(1.0, float(np.max(np.abs(m))))
    if hermiticity_residual(m) > HERMITIAN_TOL * scale:
        raise HermiticityViolation(
            f"matrix is not Hermitian (residual {hermiticity_residual(m):.3e})"
        )
    return float(np.linalg.eigvalsh(0.5 * (m + dagger(m)))[0])


def matrix_exponential(m: np.ndarray) -> np.ndarray:
    m = np.asarray(m)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise InvalidDimension(f"matrix exponential needs a square matrix, got {m.shape}")
    return scipy.linalg.expm(m.astype(complex))


def commutator(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return a @ b - b @ a
