"""
Local Kraus noise channels: bit, phase and bit-phase inversion,
depolarization and generalized amplitude damping.
"""
import logging
from dataclasses import dataclass
from functools import partial
from typing import Dict, Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np

from correlations import concurrence, rbn, werner_rbn_closed_form
from errors import DimensionMismatchError, ParameterRangeError
from matcore import IDENTITY2, SIGMA_X, SIGMA_Y, SIGMA_Z, DensityMatrix
from models import ChannelName, OptimizerConfig, Side
from states import werner
from utils import sample_rng
from worker import run_parallel

logger = logging.getLogger(__name__)

COMPLETENESS_TOL = 1e-12
UNITAL_TOL = 1e-10
MONOTONICITY_TOL = 1e-6


@dataclass(frozen=True, eq=False)
class KrausChannel:
    """Named single-qubit channel with its Kraus operators and noise parameters."""

    name: ChannelName
    kraus_ops: Tuple[np.ndarray, ...]
    p: float
    gamma: Optional[float] = None

    def __post_init__(self):
        ops = tuple(np.array(k, dtype=complex, copy=True) for k in self.kraus_ops)
        for k in ops:
            k.setflags(write=False)
        object.__setattr__(self, "kraus_ops", ops)
        deviation = completeness_deviation(self)
        if deviation > COMPLETENESS_TOL:
            raise ValueError(f"Kraus operators of {self.name.value} are not complete ({deviation:.3e})")

    @property
    def dim(self) -> int:
        return self.kraus_ops[0].shape[0]

    @property
    def stack(self) -> np.ndarray:
        return np.stack(self.kraus_ops)

    @property
    def unital(self) -> bool:
        return is_unital(self)


def _check_probability(name: str, value: float) -> float:
    value = float(value)
    if not 0.0 <= value <= 1.0:
        raise ParameterRangeError(f"{name} must lie in [0, 1], got {value}")
    return value


def completeness_deviation(channel: KrausChannel) -> float:
    """Largest entry of |sum K^dagger K - I|."""
    total = sum(k.conj().T @ k for k in channel.kraus_ops)
    return float(np.max(np.abs(total - np.eye(channel.dim))))


def _inversion(name: ChannelName, sigma: np.ndarray, p: float) -> KrausChannel:
    p = _check_probability("p", p)
    return KrausChannel(
        name=name,
        kraus_ops=(np.sqrt(p) * IDENTITY2, np.sqrt(1 - p) * sigma),
        p=p,
    )


def bit_flip(p: float) -> KrausChannel:
    """IB: {sqrt(p) I, sqrt(1-p) sigma_1}."""
    return _inversion(ChannelName.IB, SIGMA_X, p)


def phase_flip(p: float) -> KrausChannel:
    """IF: {sqrt(p) I, sqrt(1-p) sigma_3}."""
    return _inversion(ChannelName.IF, SIGMA_Z, p)


def bit_phase_flip(p: float) -> KrausChannel:
    """IBF: {sqrt(p) I, sqrt(1-p) sigma_2}."""
    return _inversion(ChannelName.IBF, SIGMA_Y, p)


def depolarizing(p: float) -> KrausChannel:
    """DP: {sqrt(1 - 3p/4) I, sqrt(p/4) sigma_1,2,3}; p = 1 maps every input to I/2."""
    p = _check_probability("p", p)
    weight = np.sqrt(p / 4)
    return KrausChannel(
        name=ChannelName.DP,
        kraus_ops=(
            np.sqrt(1 - 3 * p / 4) * IDENTITY2,
            weight * SIGMA_X,
            weight * SIGMA_Y,
            weight * SIGMA_Z,
        ),
        p=p,
    )


def amplitude_damping(p: float, gamma: float) -> KrausChannel:
    """
    AD: generalized amplitude damping with mixing p and damping strength gamma.

    Kraus set sqrt(p) {[[1,0],[0,s]], [[0,t],[0,0]]} and
    sqrt(1-p) {[[s,0],[0,1]], [[0,0],[t,0]]}, s = sqrt(1-gamma), t = sqrt(gamma).
    """
    p = _check_probability("p", p)
    gamma = _check_probability("gamma", gamma)
    s = np.sqrt(1 - gamma)
    t = np.sqrt(gamma)
    delta = (
        np.array([[1, 0], [0, s]], dtype=complex),
        np.array([[0, t], [0, 0]], dtype=complex),
        np.array([[s, 0], [0, 1]], dtype=complex),
        np.array([[0, 0], [t, 0]], dtype=complex),
    )
    return KrausChannel(
        name=ChannelName.AD,
        kraus_ops=(
            np.sqrt(p) * delta[0],
            np.sqrt(p) * delta[1],
            np.sqrt(1 - p) * delta[2],
            np.sqrt(1 - p) * delta[3],
        ),
        p=p,
        gamma=gamma,
    )


def channel_name(name: Union[ChannelName, str]) -> ChannelName:
    try:
        return ChannelName(name)
    except ValueError:
        raise ParameterRangeError(f"Unknown channel name {name!r}")


def make_channel(name: Union[ChannelName, str], p: float, gamma: Optional[float] = None) -> KrausChannel:
    """
    Build a channel from its CLI identifier.

    Args:
        name: IB, IF, IBF, DP or AD
        p: Noise parameter
        gamma: Damping strength (AD only, defaults to 1)
    """
    name = channel_name(name)
    if name == ChannelName.AD:
        return amplitude_damping(p, 1.0 if gamma is None else gamma)
    builders = {
        ChannelName.IB: bit_flip,
        ChannelName.IF: phase_flip,
        ChannelName.IBF: bit_phase_flip,
        ChannelName.DP: depolarizing,
    }
    return builders[name](p)


def apply_local(channel: KrausChannel, rho: DensityMatrix, side: Union[Side, str] = Side.B) -> DensityMatrix:
    """
    Apply a channel to one subsystem: sum_i (1 (x) K_i) rho (1 (x) K_i^dagger) for side B.

    Args:
        channel: Single-subsystem channel
        rho: Bipartite state
        side: A or B (default B)
    """
    side = Side(side)
    if side == Side.AB:
        raise DimensionMismatchError("Channels act on one side at a time")
    expected = rho.dim_a if side == Side.A else rho.dim_b
    if channel.dim != expected:
        raise DimensionMismatchError(
            f"Channel dimension {channel.dim} does not match subsystem {side.value} ({expected})"
        )
    k = channel.stack
    t = rho.tensor()
    if side == Side.A:
        out = np.einsum("kax,xbyd,kcy->abcd", k, t, k.conj())
    else:
        out = np.einsum("kbx,axcy,kdy->abcd", k, t, k.conj())
    return DensityMatrix(out.reshape(rho.dim, rho.dim), dims=rho.dims)


def is_unital(channel: KrausChannel) -> bool:
    """True iff sum K K^dagger = I within 1e-10."""
    total = sum(k @ k.conj().T for k in channel.kraus_ops)
    return bool(np.max(np.abs(total - np.eye(channel.dim))) <= UNITAL_TOL)


def _monotonicity_sample(
    channels: Tuple[ChannelName, ...],
    seed: int,
    cfg: OptimizerConfig,
    index: int,
) -> Dict[str, object]:

    rng = sample_rng(seed, index)
    mu, p, gamma = rng.uniform(0.0, 1.0, size=3)
    name = channels[int(rng.integers(len(channels)))]
    channel = make_channel(name, p, gamma if name == ChannelName.AD else None)
    clean = werner_rbn_closed_form(mu)
    noisy = rbn(apply_local(channel, werner(mu)), cfg).value
    return {
        "channel": name.value,
        "mu": float(mu),
        "p": float(p),
        "gamma": float(gamma) if name == ChannelName.AD else None,
        "rbn_clean": clean,
        "rbn_noisy": noisy,
        "violation": noisy > clean + MONOTONICITY_TOL,
    }


def sample_monotonicity(
    samples: int,
    seed: int,
    cfg: OptimizerConfig,
    channels: Optional[Iterable[Union[ChannelName, str]]] = None,
    workers: Optional[int] = None,
) -> List[Dict[str, object]]:
    """
    Draw random (mu, p, gamma) and compare N_rb of the noisy Werner state with
    the noiseless closed form.

    Args:
        samples: Number of random points
        seed: Run seed (per-sample substreams)
        cfg: Optimizer settings for the noisy states
        channels: Channel names to draw from (default: all five)
        workers: Parallel worker cap

    Returns:
        One row per sample with a `violation` flag
    """

    names = tuple(channel_name(c) for c in (channels or list(ChannelName)))
    rows = run_parallel(
        partial(_monotonicity_sample, names, seed, cfg),
        range(samples),
        workers=workers,
        label="monotonicity",
    )
    violations = sum(1 for row in rows if row["violation"])
    if violations:
        logger.warning(f"Monotonicity violated in {violations} of {samples} samples")
    else:
        logger.info(f"Monotonicity holds on all {samples} samples")
    return rows


def _werner_point(
    channel: Optional[KrausChannel],
    cfg: OptimizerConfig,
    mu: float,
) -> Dict[str, object]:
    rho = werner(mu)
    c = concurrence(rho)
    return {
        "mu": float(mu),
        "rbn_analytic": werner_rbn_closed_form(mu),
        "rbn_numeric": rbn(rho, cfg).value,
        "concurrence": c,
        "separable": c == 0.0,
        "rbn_noisy": rbn(apply_local(channel, rho), cfg).value if channel is not None else None,
    }


def werner_curve(
    mu_grid: Sequence[float],
    cfg: OptimizerConfig,
    channel: Optional[KrausChannel] = None,
    workers: Optional[int] = None,
) -> List[Dict[str, object]]:
    """
    Noiseless Werner curve (closed form and optimizer), the concurrence
    separability marker and, for a fixed channel, the noisy curve.

    Returns:
        Rows (mu, rbn_analytic, rbn_numeric, concurrence, separable, rbn_noisy)
    """
    label = channel.name.value if channel is not None else "none"
    logger.info(f"Werner curve over {len(mu_grid)} points (channel {label})")
    return run_parallel(partial(_werner_point, channel, cfg), list(mu_grid), workers=workers, label="werner")
