"""Two-qubit spin algebra.

Operators are plain ``numpy`` complex arrays (2x2 for one spin, 4x4 for the
pair). The joint basis is ordered ``(up-up, up-down, down-up, down-down)``,
which is the row-major Kronecker convention: ``np.kron(mA, mB)``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
import math

import numpy as np

HERMITIAN_ATOL = 1e-12
INPUT_ATOL = 1e-9

IDENTITY2 = np.eye(2, dtype=complex)
IDENTITY4 = np.eye(4, dtype=complex)
SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)

UP = np.array([1, 0], dtype=complex)
DOWN = np.array([0, 1], dtype=complex)


def _frozen(arr):
    arr = np.array(arr, dtype=complex)
    arr.setflags(write=False)
    return arr


def is_hermitian(m, atol=HERMITIAN_ATOL):
    m = np.asarray(m)
    return m.ndim == 2 and m.shape[0] == m.shape[1] and bool(
        np.all(np.abs(m - m.conj().T) <= atol)
    )


@dataclass(frozen=True)
class Direction:
    """Unit vector in ordinary three-space.

    Construction rejects vectors whose norm differs from 1 by more than
    ``1e-9``; use :meth:`normalized` to rescale arbitrary input.
    """

    x: float
    y: float
    z: float

    def __post_init__(self):
        comps = (self.x, self.y, self.z)
        if not all(math.isfinite(c) for c in comps):
            raise ValueError(f"non-finite direction components {comps}")
        norm = math.sqrt(sum(c * c for c in comps))
        if abs(norm - 1.0) > INPUT_ATOL:
            raise ValueError(f"direction {comps} has norm {norm!r}, expected 1")

    @classmethod
    def normalized(cls, x, y, z) -> Direction:
        norm = math.sqrt(x * x + y * y + z * z)
        if norm == 0.0 or not math.isfinite(norm):
            raise ValueError(f"cannot normalize vector {(x, y, z)}")
        return cls(x / norm, y / norm, z / norm)

    @classmethod
    def from_vector(cls, v) -> Direction:
        x, y, z = (float(c) for c in v)
        return cls(x, y, z)

    @classmethod
    def from_angle(cls, degrees: float) -> Direction:
        """Direction in the xz-plane at ``degrees`` from +z towards +x."""
        t = math.radians(degrees)
        return cls(math.sin(t), 0.0, math.cos(t))

    @property
    def vector(self) -> np.ndarray:
        return np.array([self.x, self.y, self.z])

    def dot(self, other: Direction) -> float:
        return self.x * other.x + self.y * other.y + self.z * other.z

    def angle_to(self, other: Direction) -> float:
        """Angle to ``other`` in radians."""
        return math.acos(max(-1.0, min(1.0, self.dot(other))))

    def __neg__(self) -> Direction:
        return Direction(-self.x, -self.y, -self.z)


X = Direction(1.0, 0.0, 0.0)
Y = Direction(0.0, 1.0, 0.0)
Z = Direction(0.0, 0.0, 1.0)


@dataclass(frozen=True)
class TwoQubitState:
    """Normalized ket in the ``(uu, ud, du, dd)`` basis."""

    amplitudes: np.ndarray = field(repr=False)

    def __post_init__(self):
        amps = _frozen(self.amplitudes).reshape(-1)
        if amps.shape != (4,):
            raise ValueError(f"two-qubit state needs 4 amplitudes, got {amps.size}")
        if not np.all(np.isfinite(amps)):
            raise ValueError("state amplitudes must be finite")
        norm2 = float(np.vdot(amps, amps).real)
        if abs(norm2 - 1.0) > HERMITIAN_ATOL:
            raise ValueError(f"state is not normalized: sum |amp|^2 = {norm2!r}")
        object.__setattr__(self, "amplitudes", amps)

    @classmethod
    def normalized(cls, amplitudes) -> TwoQubitState:
        amps = np.asarray(amplitudes, dtype=complex).reshape(-1)
        norm = np.linalg.norm(amps)
        if norm == 0.0:
            raise ValueError("cannot normalize the zero vector")
        return cls(amps / norm)

    def swapped(self) -> TwoQubitState:
        """The same state with the roles of qubits A and B exchanged."""
        return TwoQubitState(self.amplitudes.reshape(2, 2).T.reshape(4))

    def same_ray(self, other: TwoQubitState, atol=INPUT_ATOL) -> bool:
        """True when the two kets differ at most by a global phase."""
        return abs(abs(np.vdot(self.amplitudes, other.amplitudes)) - 1.0) <= atol

    def __repr__(self):
        amps = ", ".join(f"{a:.6g}" for a in self.amplitudes)
        return f"TwoQubitState([{amps}])"


@dataclass(frozen=True)
class DensityMatrix:
    """4x4 Hermitian, unit-trace, positive semidefinite operator."""

    matrix: np.ndarray = field(repr=False)

    def __post_init__(self):
        m = _frozen(self.matrix)
        if m.shape != (4, 4):
            raise ValueError(f"density matrix must be 4x4, got {m.shape}")
        if not is_hermitian(m):
            raise ValueError("density matrix is not Hermitian")
        tr = np.trace(m).real
        if abs(tr - 1.0) > HERMITIAN_ATOL:
            raise ValueError(f"density matrix trace is {tr!r}, expected 1")
        lowest = np.linalg.eigvalsh(m)[0]
        if lowest < -1e-10:
            raise ValueError(f"density matrix has negative eigenvalue {lowest!r}")
        object.__setattr__(self, "matrix", m)

    @classmethod
    def maximally_mixed(cls) -> DensityMatrix:
        return cls(IDENTITY4 / 4)

    @classmethod
    def mixture(cls, states, weights) -> DensityMatrix:
        """Convex combination of pure states."""
        weights = np.asarray(weights, dtype=float)
        if np.any(weights < 0) or abs(weights.sum() - 1.0) > INPUT_ATOL:
            raise ValueError("mixture weights must be non-negative and sum to 1")
        m = sum(w * density_from_pure(s).matrix for s, w in zip(states, weights))
        return cls(m)


def pauli_dot(d: Direction) -> np.ndarray:
    """Spin operator ``sigma . d`` as a 2x2 Hermitian matrix."""
    return d.x * SIGMA_X + d.y * SIGMA_Y + d.z * SIGMA_Z


def tensor(mA, mB) -> np.ndarray:
    """Kronecker product of two single-spin operators."""
    mA = np.asarray(mA, dtype=complex)
    mB = np.asarray(mB, dtype=complex)
    if mA.shape != (2, 2) or mB.shape != (2, 2):
        raise ValueError(f"tensor expects two 2x2 operators, got {mA.shape} and {mB.shape}")
    return np.kron(mA, mB)


def singlet() -> TwoQubitState:
    """``(|ud> - |du>) / sqrt(2)``."""
    r = 1 / math.sqrt(2)
    return TwoQubitState(np.array([0, r, -r, 0], dtype=complex))


def spinor(d: Direction) -> np.ndarray:
    """Spin-up eigenvector of ``sigma . d``, with a real first component."""
    theta = math.acos(max(-1.0, min(1.0, d.z)))
    phi = math.atan2(d.y, d.x)
    return np.array(
        [math.cos(theta / 2), complex(math.cos(phi), math.sin(phi)) * math.sin(theta / 2)]
    )


def product_state(chiA, chiB) -> TwoQubitState:
    """``|chiA> (x) |chiB>`` for two normalized single-spin spinors."""
    chiA = np.asarray(chiA, dtype=complex).reshape(-1)
    chiB = np.asarray(chiB, dtype=complex).reshape(-1)
    for name, chi in (("chiA", chiA), ("chiB", chiB)):
        if chi.shape != (2,):
            raise ValueError(f"{name} must have 2 components, got {chi.size}")
        norm = np.linalg.norm(chi)
        if abs(norm - 1.0) > INPUT_ATOL:
            raise ValueError(f"{name} is not normalized (norm {norm!r})")
    amps = np.kron(chiA, chiB)
    # renormalize away the up-to-1e-9 slack admitted above
    return TwoQubitState(amps / np.linalg.norm(amps))


def expectation(state: TwoQubitState, op) -> float:
    """``<psi|op|psi>`` for a Hermitian 4x4 operator."""
    op = np.asarray(op, dtype=complex)
    if op.shape != (4, 4):
        raise ValueError(f"operator must be 4x4, got {op.shape}")
    if not is_hermitian(op):
        raise ValueError("operator is not Hermitian")
    psi = state.amplitudes
    value = np.vdot(psi, op @ psi)
    if abs(value.imag) >= 1e-10:
        raise ArithmeticError(f"expectation has imaginary residue {value.imag!r}")
    return float(value.real)


def density_from_pure(state: TwoQubitState) -> DensityMatrix:
    psi = state.amplitudes
    return DensityMatrix(np.outer(psi, psi.conj()))
