"""
Constructors for the state families used throughout: Werner, Bell states,
products and classical-classical states.

Basis ordering is {|00>, |01>, |10>, |11>}.
"""
import logging

import numpy as np
from pydantic import ValidationError

from errors import DimensionMismatchError, ParameterRangeError
from matcore import DensityMatrix, tensor
from models import WernerParams

logger = logging.getLogger(__name__)

NORMALIZATION_TOL = 1e-10

_SQRT2 = np.sqrt(2.0)
KET_00 = np.array([1, 0, 0, 0], dtype=complex)
KET_01 = np.array([0, 1, 0, 0], dtype=complex)
KET_10 = np.array([0, 0, 1, 0], dtype=complex)
KET_11 = np.array([0, 0, 0, 1], dtype=complex)

SINGLET_KET = (KET_01 - KET_10) / _SQRT2
PHI_PLUS_KET = (KET_00 + KET_11) / _SQRT2
PHI_MINUS_KET = (KET_00 - KET_11) / _SQRT2


def singlet() -> DensityMatrix:
    """|s><s| with |s> = (|01> - |10>)/sqrt(2)."""
    return DensityMatrix.from_ket(SINGLET_KET, dims=(2, 2))


def bell_phi_plus() -> DensityMatrix:
    """|phi+><phi+| with |phi+> = (|00> + |11>)/sqrt(2)."""
    return DensityMatrix.from_ket(PHI_PLUS_KET, dims=(2, 2))


def bell_phi_minus() -> DensityMatrix:
    """|phi-><phi-| with |phi-> = (|00> - |11>)/sqrt(2)."""
    return DensityMatrix.from_ket(PHI_MINUS_KET, dims=(2, 2))


def maximally_mixed(dims=(2, 2)) -> DensityMatrix:
    n = int(np.prod(dims))
    return DensityMatrix(np.eye(n) / n, dims=dims)


def werner(mu: float) -> DensityMatrix:
    """
    Werner state (1 - mu) I/4 + mu |s><s|.

    Args:
        mu: Singlet weight in [0, 1]

    Returns:
        Two-qubit DensityMatrix with spectrum {(1+3mu)/4, (1-mu)/4 x3}
    """
    try:
        params = WernerParams(mu=mu)
    except ValidationError:
        raise ParameterRangeError(f"Werner weight mu must lie in [0, 1], got {mu}")
    singlet_projector = np.outer(SINGLET_KET, SINGLET_KET.conj())
    matrix = (1 - params.mu) * np.eye(4) / 4 + params.mu * singlet_projector
    return DensityMatrix(matrix, dims=(2, 2))


def product(rho_a: DensityMatrix, rho_b: DensityMatrix) -> DensityMatrix:
    """
    Uncorrelated state rho_A (x) rho_B.

    Args:
        rho_a: Single-system state of A
        rho_b: Single-system state of B
    """
    if rho_a.is_bipartite or rho_b.is_bipartite:
        raise DimensionMismatchError("product expects two single-system states")
    rho_a.validate()
    rho_b.validate()
    return DensityMatrix(tensor(rho_a.matrix, rho_b.matrix), dims=(rho_a.dim, rho_b.dim))


def classical_classical(p, basis_a, basis_b) -> DensityMatrix:
    """
    Classical-classical state sum_ab p_ab A_a (x) B_b.

    Args:
        p: Probability table with one row per A outcome and one column per B outcome
        basis_a: ProjectiveBasis of A
        basis_b: ProjectiveBasis of B
    """
    table = np.asarray(p, dtype=float)
    if table.shape != (basis_a.size, basis_b.size):
        raise DimensionMismatchError(
            f"Probability table shape {table.shape} does not match bases "
            f"({basis_a.size}, {basis_b.size})"
        )
    if np.any(table < -NORMALIZATION_TOL) or abs(table.sum() - 1.0) > NORMALIZATION_TOL:
        raise ParameterRangeError("Probability table must be non-negative and sum to 1")
    matrix = np.einsum("ab,aij,bkl->ikjl", table, basis_a.projectors, basis_b.projectors)
    d_a, d_b = basis_a.dim, basis_b.dim
    return DensityMatrix(matrix.reshape(d_a * d_b, d_a * d_b), dims=(d_a, d_b))
