"""
Dense complex-matrix kernel: tensor products, partial trace, Hermitian
spectra, von Neumann entropy and validation predicates.

All matrices are small (at most 8x8), so everything is plain dense numpy.
"""
import logging
from typing import Optional, Sequence, Tuple, Union

import numpy as np
from scipy.special import entr

from errors import DimensionMismatchError, NonHermitianError, StateValidationError
from models import Side

logger = logging.getLogger(__name__)

ComplexMatrix = np.ndarray

HERMITIAN_TOL = 1e-10
TRACE_TOL = 1e-10
POSITIVITY_TOL = 1e-10
ZERO_EIGENVALUE = 1e-12

IDENTITY2 = np.eye(2, dtype=complex)
SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)
PAULI = {"x": SIGMA_X, "y": SIGMA_Y, "z": SIGMA_Z}

for _op in (IDENTITY2, SIGMA_X, SIGMA_Y, SIGMA_Z):
    _op.setflags(write=False)


def as_matrix(m) -> ComplexMatrix:
    """Coerce input into a 2-D complex array with at least one row and column."""
    arr = np.asarray(m, dtype=complex)
    if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
        raise DimensionMismatchError(f"Expected a non-empty 2-D matrix, got shape {arr.shape}")
    return arr


def hermitian_deviation(m: ComplexMatrix) -> float:
    """Largest entry of |M - M^dagger|."""
    m = as_matrix(m)
    if m.shape[0] != m.shape[1]:
        return float("inf")
    return float(np.max(np.abs(m - m.conj().T)))


def is_hermitian(m: ComplexMatrix, tol: float = HERMITIAN_TOL) -> bool:
    return hermitian_deviation(m) <= tol


class DensityMatrix:
    """
    Positive, unit-trace, Hermitian matrix with subsystem dimensions.

    `dims` is `(d,)` for a single system and `(dA, dB)` for a bipartite one.
    The stored matrix is read-only.
    """

    __slots__ = ("_matrix", "_dims")

    def __init__(
        self,
        matrix,
        dims: Optional[Sequence[int]] = None,
        validate: bool = True,
    ):
        m = np.array(as_matrix(matrix), dtype=complex, copy=True)
        n = m.shape[0]
        if dims is None:
            dims = (2, 2) if n == 4 else (n,)
        dims = tuple(int(d) for d in dims)
        if len(dims) not in (1, 2) or any(d < 1 for d in dims):
            raise DimensionMismatchError(f"Unsupported subsystem dimensions {dims}")
        if m.shape != (int(np.prod(dims)),) * 2:
            raise DimensionMismatchError(
                f"Matrix shape {m.shape} does not match subsystem dimensions {dims}"
            )
        m.setflags(write=False)
        self._matrix = m
        self._dims = dims
        if validate:
            self.validate()

    @property
    def matrix(self) -> ComplexMatrix:
        return self._matrix

    @property
    def dims(self) -> Tuple[int, ...]:
        return self._dims

    @property
    def dim(self) -> int:
        return self._matrix.shape[0]

    @property
    def is_bipartite(self) -> bool:
        return len(self._dims) == 2

    @property
    def dim_a(self) -> int:
        return self._dims[0]

    @property
    def dim_b(self) -> int:
        if not self.is_bipartite:
            raise DimensionMismatchError("Single-system state has no subsystem B")
        return self._dims[1]

    def tensor(self) -> np.ndarray:
        """Index view rho[a, b, a', b'] of a bipartite state."""
        if not self.is_bipartite:
            raise DimensionMismatchError("Single-system state has no bipartite view")
        d_a, d_b = self._dims
        return self._matrix.reshape(d_a, d_b, d_a, d_b)

    def validate(self) -> None:
        """Raise StateValidationError unless Hermitian, unit trace and positive."""
        if not np.all(np.isfinite(self._matrix)):
            raise StateValidationError("Matrix has non-finite entries")
        deviation = hermitian_deviation(self._matrix)
        if deviation > HERMITIAN_TOL:
            raise StateValidationError(f"Matrix is not Hermitian (deviation {deviation:.3e})")
        trace = np.trace(self._matrix)
        if abs(trace - 1.0) > TRACE_TOL:
            raise StateValidationError(f"Trace {trace.real:.12g} differs from 1")
        smallest = float(np.linalg.eigvalsh(self._matrix)[0])
        if smallest < -POSITIVITY_TOL:
            raise StateValidationError(f"Matrix has negative eigenvalue {smallest:.3e}")

    @classmethod
    def from_ket(cls, ket, dims: Optional[Sequence[int]] = None) -> "DensityMatrix":
        """Rank-1 state |psi><psi| of a (normalized) ket."""
        vec = np.asarray(ket, dtype=complex).reshape(-1)
        norm = np.linalg.norm(vec)
        if norm == 0:
            raise StateValidationError("Zero vector is not a state")
        vec = vec / norm
        return cls(np.outer(vec, vec.conj()), dims=dims)

    def allclose(self, other: Union["DensityMatrix", ComplexMatrix], atol: float = 1e-10) -> bool:
        other_matrix = other.matrix if isinstance(other, DensityMatrix) else as_matrix(other)
        return self._matrix.shape == other_matrix.shape and bool(
            np.max(np.abs(self._matrix - other_matrix)) <= atol
        )

    def __repr__(self) -> str:
        return f"DensityMatrix(dims={self._dims})"


def _matrix_of(m: Union[DensityMatrix, ComplexMatrix]) -> ComplexMatrix:
    return m.matrix if isinstance(m, DensityMatrix) else as_matrix(m)


def tensor(a: ComplexMatrix, b: ComplexMatrix) -> ComplexMatrix:
    """Kronecker product a (x) b."""
    return np.kron(_matrix_of(a), _matrix_of(b))


def conjugate(m: ComplexMatrix, u: ComplexMatrix) -> ComplexMatrix:
    """U M U^dagger."""
    u = as_matrix(u)
    return u @ _matrix_of(m) @ u.conj().T


def partial_trace(rho: DensityMatrix, keep: Union[Side, str]) -> DensityMatrix:
    """
    Reduced state on the kept subsystem.

    Args:
        rho: Bipartite state
        keep: Side.A or Side.B

    Returns:
        Single-system DensityMatrix
    """
    try:
        side = Side(keep)
    except ValueError:
        raise DimensionMismatchError(f"Invalid subsystem selector {keep!r}")
    t = rho.tensor()
    if side == Side.A:
        reduced = np.einsum("ijkj->ik", t)
    elif side == Side.B:
        reduced = np.einsum("ijil->jl", t)
    else:
        raise DimensionMismatchError("partial_trace keeps exactly one subsystem (A or B)")
    return DensityMatrix(reduced, dims=(reduced.shape[0],), validate=False)


def eigvals_hermitian(m: Union[DensityMatrix, ComplexMatrix]) -> np.ndarray:
    """
    Real eigenvalues of a Hermitian matrix in descending order.

    Raises:
        NonHermitianError: if the input is not Hermitian within tolerance
    """
    matrix = _matrix_of(m)
    scale = max(1.0, float(np.max(np.abs(matrix))))
    if not is_hermitian(matrix, HERMITIAN_TOL * scale):
        raise NonHermitianError("eigvals_hermitian requires a Hermitian matrix")
    return np.linalg.eigvalsh(matrix)[::-1]


def clamp_spectrum(values: np.ndarray) -> np.ndarray:
    """
    Clamp rounding negatives of a state spectrum to zero.

    Values in [-1e-10, 0) become 0; anything more negative is an error.
    """
    values = np.asarray(values, dtype=float)
    if values.size and float(np.min(values)) < -POSITIVITY_TOL:
        raise StateValidationError(f"Spectrum has negative value {float(np.min(values)):.3e}")
    values = np.where(values < ZERO_EIGENVALUE, 0.0, values)
    return values


def shannon_entropy(weights: np.ndarray, axis=None) -> np.ndarray:
    """Sum of -w ln w over the given axes, with 0 ln 0 = 0 (nats)."""
    return np.sum(entr(clamp_spectrum(weights)), axis=axis)


def entropy(rho: Union[DensityMatrix, ComplexMatrix]) -> float:
    """
    Von Neumann entropy S(rho) = -sum lambda ln lambda in nats.

    Args:
        rho: Density matrix

    Returns:
        Entropy in nats
    """
    return float(shannon_entropy(np.linalg.eigvalsh(_matrix_of(rho))))


def purity(rho: Union[DensityMatrix, ComplexMatrix]) -> float:
    m = _matrix_of(rho)
    return float(np.real(np.trace(m @ m)))


def is_unitary(m: ComplexMatrix, tol: float = 1e-10) -> bool:
    """True iff U^dagger U equals the identity within tol (max entry deviation)."""
    u = as_matrix(m)
    if u.shape[0] != u.shape[1]:
        return False
    deviation = np.max(np.abs(u.conj().T @ u - np.eye(u.shape[0])))
    return bool(deviation <= tol)


def random_unitary(dim: int, rng: np.random.Generator) -> ComplexMatrix:
    """Haar-random unitary from the QR decomposition of a complex Ginibre matrix."""
    z = (rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    phases = np.diag(r) / np.abs(np.diag(r))
    return q * phases


def random_density_matrix(
    dim: int,
    rng: np.random.Generator,
    rank: Optional[int] = None,
    dims: Optional[Sequence[int]] = None,
) -> DensityMatrix:
    """Random mixed state G G^dagger / Tr(G G^dagger) with a dim x rank Ginibre G."""
    rank = rank or dim
    g = rng.standard_normal((dim, rank)) + 1j * rng.standard_normal((dim, rank))
    m = g @ g.conj().T
    m = (m + m.conj().T) / 2
    return DensityMatrix(m / np.trace(m).real, dims=dims)
