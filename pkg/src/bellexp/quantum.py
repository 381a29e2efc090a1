"""Quantum-mechanical spin correlations of a two-qubit system."""
from __future__ import annotations

from dataclasses import dataclass
import math

import numpy as np

from .spin import (
    IDENTITY2,
    DensityMatrix,
    Direction,
    TwoQubitState,
    expectation,
    pauli_dot,
    tensor,
)

DEFAULT_TOLERANCE = 1e-9


def qm_correlation(state: TwoQubitState, a: Direction, b: Direction) -> float:
    """Joint expectation ``<psi|(sigma_A . a)(sigma_B . b)|psi>``."""
    return expectation(state, tensor(pauli_dot(a), pauli_dot(b)))


def qm_marginal(state: TwoQubitState, d: Direction, side: str) -> float:
    """Single-spin expectation of ``sigma . d`` on side ``"A"`` or ``"B"``."""
    if side == "A":
        op = tensor(pauli_dot(d), IDENTITY2)
    elif side == "B":
        op = tensor(IDENTITY2, pauli_dot(d))
    else:
        raise ValueError(f"side must be 'A' or 'B', got {side!r}")
    return expectation(state, op)


def qm_correlation_density(rho: DensityMatrix, a: Direction, b: Direction) -> float:
    """``tr[rho (sigma_A . a)(sigma_B . b)]``."""
    if not isinstance(rho, DensityMatrix):
        rho = DensityMatrix(rho)
    value = np.trace(rho.matrix @ tensor(pauli_dot(a), pauli_dot(b)))
    if abs(value.imag) >= 1e-10:
        raise ArithmeticError(f"trace has imaginary residue {value.imag!r}")
    return float(value.real)


@dataclass(frozen=True)
class RearrangementReport:
    """Both sign variants of the rearranged correlation difference.

    ``lhs`` is ``E(a,b) - E(a,b2)``; ``rhs_plus`` / ``rhs_minus`` are
    ``E(a,b)[1 +/- E(a2,b2)] - E(a,b2)[1 +/- E(a2,b)]``.
    """

    lhs: float
    rhs_plus: float
    rhs_minus: float
    equal_plus: bool
    equal_minus: bool
    tolerance: float


def rearrangement_check(
    state: TwoQubitState,
    a: Direction,
    b: Direction,
    a2: Direction,
    b2: Direction,
    tolerance: float = DEFAULT_TOLERANCE,
) -> RearrangementReport:
    """Test whether the hidden-variable style rearrangement holds for ``state``.

    The rearrangement is an identity for products of local outcomes, but
    fails for operator expectations of entangled states.
    """
    if not tolerance > 0:
        raise ValueError(f"tolerance must be positive, got {tolerance!r}")
    e_ab = qm_correlation(state, a, b)
    e_ab2 = qm_correlation(state, a, b2)
    e_a2b2 = qm_correlation(state, a2, b2)
    e_a2b = qm_correlation(state, a2, b)
    lhs = e_ab - e_ab2
    rhs_plus = e_ab * (1 + e_a2b2) - e_ab2 * (1 + e_a2b)
    rhs_minus = e_ab * (1 - e_a2b2) - e_ab2 * (1 - e_a2b)
    return RearrangementReport(
        lhs=lhs,
        rhs_plus=rhs_plus,
        rhs_minus=rhs_minus,
        equal_plus=abs(lhs - rhs_plus) <= tolerance,
        equal_minus=abs(lhs - rhs_minus) <= tolerance,
        tolerance=tolerance,
    )


def coplanar_triple(ab_degrees: float = 60.0, bc_degrees: float = 60.0):
    """Directions ``a, b, c`` in the xz-plane with ``a`` along +z.

    ``b`` sits ``ab_degrees`` from ``a`` and ``c`` a further ``bc_degrees``
    beyond ``b``. The default is the 60/60 configuration used throughout the
    counterexample.
    """
    return (
        Direction.from_angle(0.0),
        Direction.from_angle(ab_degrees),
        Direction.from_angle(ab_degrees + bc_degrees),
    )


def singlet_closed_form(a: Direction, b: Direction) -> float:
    """``-a . b``, the singlet correlation in closed form."""
    return -a.dot(b)


def singlet_angle_closed_form(theta: float) -> float:
    return -math.cos(theta)
