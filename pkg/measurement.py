"""
Projective bases on the Bloch sphere, the unread-measurement (dephasing)
maps and the irreality of an observable.
"""
import logging
import math
from dataclasses import dataclass
from typing import Optional, Sequence, Tuple, Union

import numpy as np

from errors import DimensionMismatchError
from matcore import DensityMatrix, entropy
from models import MeasurementDirection, PauliAxis, Side

logger = logging.getLogger(__name__)

BASIS_TOL = 1e-10
NEGATIVE_CLAMP = 1e-9

_KET_PLUS = np.array([1, 1], dtype=complex) / np.sqrt(2)
_KET_MINUS = np.array([1, -1], dtype=complex) / np.sqrt(2)

PAULI_DIRECTIONS = {
    PauliAxis.X: MeasurementDirection(theta=0.0, phi=0.0),
    PauliAxis.Y: MeasurementDirection(theta=math.pi / 2, phi=3 * math.pi / 2),
    PauliAxis.Z: MeasurementDirection(theta=math.pi / 2, phi=0.0),
}


@dataclass(frozen=True, eq=False)
class ProjectiveBasis:
    """Complete set of orthogonal projectors on one subsystem."""

    projectors: np.ndarray
    labels: Tuple[str, ...]

    def __post_init__(self):
        projectors = np.array(self.projectors, dtype=complex, copy=True)
        if projectors.ndim != 3 or projectors.shape[1] != projectors.shape[2]:
            raise DimensionMismatchError(f"Projector stack has shape {projectors.shape}")
        if len(self.labels) != projectors.shape[0]:
            raise ValueError("One label per projector is required")
        dim = projectors.shape[1]
        if np.max(np.abs(projectors.sum(axis=0) - np.eye(dim))) > BASIS_TOL:
            raise ValueError("Projectors do not sum to the identity")
        products = np.einsum("iab,jbc->ijac", projectors, projectors)
        expected = np.einsum("ij,iac->ijac", np.eye(len(projectors)), projectors)
        if np.max(np.abs(products - expected)) > BASIS_TOL:
            raise ValueError("Projectors are not orthogonal and idempotent")
        projectors.setflags(write=False)
        object.__setattr__(self, "projectors", projectors)
        object.__setattr__(self, "labels", tuple(str(label) for label in self.labels))

    @property
    def dim(self) -> int:
        return self.projectors.shape[1]

    @property
    def size(self) -> int:
        return self.projectors.shape[0]

    @classmethod
    def from_kets(cls, kets: Sequence, labels: Optional[Sequence[str]] = None) -> "ProjectiveBasis":
        """Rank-1 basis from orthonormal kets."""
        vectors = np.asarray(kets, dtype=complex)
        projectors = np.einsum("ka,kb->kab", vectors, vectors.conj())
        labels = labels or tuple(str(i) for i in range(len(vectors)))
        return cls(projectors=projectors, labels=tuple(labels))

    def swapped(self) -> "ProjectiveBasis":
        return ProjectiveBasis(projectors=self.projectors[::-1], labels=self.labels[::-1])

    def same_projectors(self, other: "ProjectiveBasis", tol: float = BASIS_TOL) -> bool:
        return self.projectors.shape == other.projectors.shape and bool(
            np.max(np.abs(self.projectors - other.projectors)) <= tol
        )


def direction_kets(theta, phi) -> np.ndarray:
    """
    Eigenvectors |phi_+>, |phi_-> of the x-referenced Bloch parameterization.

    |phi_+> = cos(t/2)|+> + e^{i f} sin(t/2)|->
    |phi_-> = -sin(t/2)|+> + e^{i f} cos(t/2)|->

    Broadcasts over array-valued angles; the result has shape (..., 2, 2)
    indexed as [..., outcome, component] in the computational basis.
    """
    theta = np.asarray(theta, dtype=float)
    phi = np.asarray(phi, dtype=float)
    c = np.cos(theta / 2)[..., None]
    s = np.sin(theta / 2)[..., None]
    phase = np.exp(1j * phi)[..., None]
    plus = c * _KET_PLUS + phase * s * _KET_MINUS
    minus = -s * _KET_PLUS + phase * c * _KET_MINUS
    return np.stack([plus, minus], axis=-2)


def bloch_vector(direction: MeasurementDirection) -> np.ndarray:
    return np.array(direction.bloch_vector())


def qubit_basis(direction: MeasurementDirection) -> ProjectiveBasis:
    """Projectors onto |phi_+> and |phi_-> for the given direction."""
    kets = direction_kets(direction.theta, direction.phi)
    return ProjectiveBasis.from_kets(kets, labels=("+", "-"))


def pauli_direction(axis: Union[PauliAxis, str]) -> MeasurementDirection:
    return PAULI_DIRECTIONS[PauliAxis(axis)]


def pauli_basis(axis: Union[PauliAxis, str]) -> ProjectiveBasis:
    """Eigenbasis of sigma_x, sigma_y or sigma_z, +1 eigenvector first."""
    axis = PauliAxis(axis)
    if axis == PauliAxis.Z:
        kets = [[1, 0], [0, 1]]
    elif axis == PauliAxis.X:
        kets = [_KET_PLUS, _KET_MINUS]
    else:
        kets = np.array([[1, 1j], [1, -1j]]) / np.sqrt(2)
    return ProjectiveBasis.from_kets(kets, labels=("+1", "-1"))


def _dephase_tensor(t: np.ndarray, projectors: np.ndarray, side: Side) -> np.ndarray:
    if side == Side.A:
        return np.einsum("kax,xbyd,kyc->abcd", projectors, t, projectors)
    return np.einsum("kbx,axcy,kyd->abcd", projectors, t, projectors)


def dephase(
    rho: DensityMatrix,
    basis: ProjectiveBasis,
    side: Union[Side, str] = Side.A,
    basis_b: Optional[ProjectiveBasis] = None,
) -> DensityMatrix:
    """
    Non-selective projective measurement Phi(rho) = sum_k (P_k (x) 1) rho (P_k (x) 1).

    Args:
        rho: State to dephase
        basis: Basis measured on A (or on B when side is B)
        side: A, B, or AB for the pair; for AB `basis_b` is B's basis
        basis_b: B's basis when side is AB

    Returns:
        Post-measurement state with the same dimensions
    """
    side = Side(side)
    if not rho.is_bipartite:
        if side != Side.A or basis.dim != rho.dim:
            raise DimensionMismatchError("A single-system state can only be dephased on its own space")
        out = np.einsum("kax,xy,kyc->ac", basis.projectors, rho.matrix, basis.projectors)
        return DensityMatrix(out, dims=rho.dims, validate=False)

    t = rho.tensor()
    if side == Side.AB:
        if basis_b is None:
            raise DimensionMismatchError("Side AB needs a basis for each subsystem")
        if basis.dim != rho.dim_a or basis_b.dim != rho.dim_b:
            raise DimensionMismatchError("Basis dimensions do not match the subsystems")
        t = _dephase_tensor(t, basis.projectors, Side.A)
        t = _dephase_tensor(t, basis_b.projectors, Side.B)
    else:
        expected = rho.dim_a if side == Side.A else rho.dim_b
        if basis.dim != expected:
            raise DimensionMismatchError(
                f"Basis dimension {basis.dim} does not match subsystem {side.value} ({expected})"
            )
        t = _dephase_tensor(t, basis.projectors, side)
    return DensityMatrix(t.reshape(rho.dim, rho.dim), dims=rho.dims, validate=False)


def clamp_negative(value: float, label: str = "value") -> float:
    """Map values in [-1e-9, 0) to 0; larger violations are logged and kept."""
    if value < 0:
        if value >= -NEGATIVE_CLAMP:
            return 0.0
        logger.warning(f"{label} is negative beyond tolerance: {value:.3e}")
    return value


def irreality(basis: ProjectiveBasis, rho: DensityMatrix, side: Union[Side, str] = Side.A) -> float:
    """
    Irreality of the measured observable: S(Phi(rho)) - S(rho), in nats.

    Args:
        basis: Eigenbasis of the observable
        rho: State
        side: Subsystem the observable acts on (A or B)
    """
    side = Side(side)
    if side == Side.AB:
        raise DimensionMismatchError("Irreality is defined for a single side")
    value = entropy(dephase(rho, basis, side)) - entropy(rho)
    return clamp_negative(value, "irreality")


def local_irreality(basis: ProjectiveBasis, rho: DensityMatrix) -> float:
    """Irreality of an observable on a single-system state."""
    if rho.is_bipartite:
        raise DimensionMismatchError("local_irreality expects a single-system state")
    return irreality(basis, rho, Side.A)
