"""
Data models for RBN Lab.
"""
import math
from enum import Enum
from typing import Optional, Dict, Any, List, Tuple

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator
from scipy.special import expit

NEGATIVE_TOLERANCE = 1e-9


class Side(str, Enum):
    """Subsystem selector."""
    A = "A"
    B = "B"
    AB = "AB"


class PauliAxis(str, Enum):
    """Pauli observable axis."""
    X = "x"
    Y = "y"
    Z = "z"


class ChannelName(str, Enum):
    """Canonical noise channel identifiers."""
    IB = "IB"
    IF = "IF"
    IBF = "IBF"
    DP = "DP"
    AD = "AD"


class Scenario(str, Enum):
    """Eavesdropping protocol scenario."""
    IDEAL = "ideal"
    EVE_RANDOM = "eve-random"
    EVE_ALIGNED = "eve-aligned"


class Sampling(str, Enum):
    """How the legitimate parties pick their measurement directions."""
    PAULI = "pauli"
    CONTINUOUS = "continuous"
    MIXED = "mixed"


class OutputFormat(str, Enum):
    """Output file format."""
    CSV = "csv"
    JSON = "json"


class MeasurementDirection(BaseModel):
    """Bloch-sphere angles of a qubit measurement basis."""
    model_config = ConfigDict(frozen=True)

    theta: float = Field(..., ge=0.0, le=math.pi, description="Polar angle in radians")
    phi: float = Field(..., ge=0.0, lt=2 * math.pi, description="Azimuthal angle in radians")

    @classmethod
    def normalized(cls, theta: float, phi: float) -> "MeasurementDirection":
        """Fold arbitrary real angles into the canonical ranges."""
        theta = math.fmod(theta, 2 * math.pi)
        if theta < 0:
            theta += 2 * math.pi
        if theta > math.pi:
            # (theta, phi) and (2 pi - theta, phi + pi) name the same ket up to phase
            theta = 2 * math.pi - theta
            phi = phi + math.pi
        phi = math.fmod(phi, 2 * math.pi)
        if phi < 0:
            phi += 2 * math.pi
        if phi >= 2 * math.pi:
            phi = 0.0
        return cls(theta=min(max(theta, 0.0), math.pi), phi=phi)

    def bloch_vector(self) -> Tuple[float, float, float]:
        """Bloch axis of the |phi_+> eigenvector (x-basis referenced parameterization)."""
        return (
            math.cos(self.theta),
            -math.sin(self.theta) * math.sin(self.phi),
            math.sin(self.theta) * math.cos(self.phi),
        )

    @classmethod
    def from_bloch(cls, vector) -> "MeasurementDirection":
        """Inverse of `bloch_vector` for any non-zero 3-vector."""
        x, y, z = (float(c) for c in vector)
        norm = math.sqrt(x * x + y * y + z * z)
        if norm == 0:
            raise ValueError("Bloch vector must be non-zero")
        theta = math.acos(max(-1.0, min(1.0, x / norm)))
        phi = math.atan2(-y, z) if (y or z) else 0.0
        return cls.normalized(theta, phi)


class WernerParams(BaseModel):
    """Werner-state mixing weight."""
    mu: float = Field(..., ge=0.0, le=1.0, description="Singlet weight")


class OptimizerConfig(BaseModel):
    """Multistart search settings for the observable-space optimizations."""
    model_config = ConfigDict(frozen=True)

    coarse_grid_per_angle: int = Field(12, ge=1, description="Grid subdivisions per angle")
    restarts: int = Field(32, ge=1, description="Simplex refinements from the best grid cells")
    refine_tolerance: float = Field(1e-9, gt=0.0, description="Objective tolerance of the refinement")
    max_evals: int = Field(20000, ge=1, description="Total refinement evaluation budget")
    seed: int = Field(0, ge=0, lt=2**64, description="Seed for the simplex orientation")


class OptimizerResult(BaseModel):
    """Located extremum of an observable-space search."""
    value: float = Field(..., description="Objective value in nats")
    angles_a: MeasurementDirection
    angles_b: MeasurementDirection
    evaluations: int = Field(..., ge=0)
    converged: bool

    @field_validator("value")
    @classmethod
    def check_value(cls, v: float) -> float:
        if v < -NEGATIVE_TOLERANCE:
            raise ValueError(f"optimized value {v} is negative beyond tolerance")
        return max(v, 0.0)


class ProtocolConfig(BaseModel):
    """Settings of an Alice/Bob/Eve protocol simulation."""
    samples: int = Field(100000, ge=1)
    mu_range: Tuple[float, float] = (0.0, 1.0)
    scenario: Scenario = Scenario.IDEAL
    sampling: Sampling = Sampling.MIXED
    seed: int = Field(0, ge=0, lt=2**64)

    @field_validator("mu_range")
    @classmethod
    def check_mu_range(cls, v: Tuple[float, float]) -> Tuple[float, float]:
        low, high = v
        if not 0.0 <= low <= high <= 1.0:
            raise ValueError("mu_range must satisfy 0 <= low <= high <= 1")
        return v


class ProtocolRecord(BaseModel):
    """One scatter point of the protocol simulation."""
    scenario: Scenario
    sampling: Sampling
    mu: float
    alice: MeasurementDirection
    bob: MeasurementDirection
    eve: Optional[MeasurementDirection] = None
    alice_axis: Optional[PauliAxis] = None
    bob_axis: Optional[PauliAxis] = None
    eta_value: float

    @field_validator("eta_value")
    @classmethod
    def check_eta(cls, v: float) -> float:
        if v < -NEGATIVE_TOLERANCE:
            raise ValueError(f"eta {v} is negative beyond tolerance")
        return max(v, 0.0)

    def as_row(self) -> Dict[str, Any]:
        """Flatten into the CSV column layout."""
        return {
            "mu": self.mu,
            "theta_a": self.alice.theta,
            "phi_a": self.alice.phi,
            "theta_b": self.bob.theta,
            "phi_b": self.bob.phi,
            "theta_e": self.eve.theta if self.eve else None,
            "phi_e": self.eve.phi if self.eve else None,
            "eta": self.eta_value,
            "scenario": self.scenario.value,
            "sampling": self.sampling.value,
        }


class ThermalParams(BaseModel):
    """Two-level Gibbs parameters with E0 = 0 and k_B = 1."""
    model_config = ConfigDict(frozen=True)

    E: float = Field(..., ge=0.0, description="Excited-level energy")
    kT: float = Field(..., gt=0.0, description="Temperature in energy units")

    @property
    def beta(self) -> float:
        return 1.0 / self.kT

    @property
    def q(self) -> float:
        """Ground-state population 1 / (1 + exp(-beta E))."""
        return float(expit(self.beta * self.E))


class RunManifest(BaseModel):
    """Provenance record written next to every output file."""
    command: str
    parameters: Dict[str, Any]
    seed: Optional[int] = None
    library_version: str
    rng_algorithm: str
    run_id: str
    outputs: List[str] = Field(default_factory=list)
    output_path: str
    duration_seconds: float = 0.0

    @model_validator(mode="after")
    def check_outputs(self) -> "RunManifest":
        if self.output_path not in self.outputs:
            self.outputs.insert(0, self.output_path)
        return self
