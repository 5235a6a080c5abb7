"""
Thermally correlated two-qubit states: Gibbs qubits, the correlating
unitary U = V2 V1, the rho_X family and its temperature sweeps.

Units: k_B = 1, E and kT share one energy unit, E0 = 0.
"""
import logging
from functools import partial
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from pydantic import ValidationError

from channels import apply_local, make_channel
from correlations import eta, global_discord, rbn
from errors import ParameterRangeError
from matcore import DensityMatrix, conjugate, tensor
from measurement import pauli_basis
from models import ChannelName, OptimizerConfig, PauliAxis, ThermalParams
from states import KET_00, KET_01, KET_10, KET_11, PHI_MINUS_KET, PHI_PLUS_KET
from worker import run_parallel

logger = logging.getLogger(__name__)

DISCORD_MATCH_TOL = 1e-6
HIERARCHY_TOL = 1e-6

ThermalRow = Dict[str, object]


def thermal_params(E: float, kT: float) -> ThermalParams:
    """Validated ThermalParams; kT <= 0 or E < 0 raise ParameterRangeError."""
    try:
        return ThermalParams(E=E, kT=kT)
    except ValidationError:
        raise ParameterRangeError(f"Need E >= 0 and kT > 0, got E={E}, kT={kT}")


def gibbs_qubit(params: ThermalParams) -> DensityMatrix:
    """Local Gibbs state q|0><0| + (1 - q)|1><1|."""
    q = params.q
    return DensityMatrix(np.diag([q, 1 - q]), dims=(2,))


def correlating_unitary() -> np.ndarray:
    """U = V2 V1 with V1 the controlled bit swap and V2: |00> -> |phi+>, |11> -> |phi->."""
    v1 = (
        np.outer(KET_00, KET_00)
        + np.outer(KET_01, KET_01)
        + np.outer(KET_11, KET_10)
        + np.outer(KET_10, KET_11)
    )
    v2 = (
        np.outer(PHI_PLUS_KET, KET_00)
        + np.outer(KET_01, KET_01)
        + np.outer(KET_10, KET_10)
        + np.outer(PHI_MINUS_KET, KET_11)
    )
    return v2 @ v1


def rho_x(q: float) -> DensityMatrix:
    """
    Correlated X state from two Gibbs qubits with ground population q.

    Args:
        q: Ground-state population in [1/2, 1]

    Returns:
        Diagonal (q/2, q(1-q), (1-q)^2, q/2) with anti-diagonal corners q^2 - q/2
    """
    q = float(q)
    if not 0.5 <= q <= 1.0:
        raise ParameterRangeError(f"Ground population q must lie in [1/2, 1], got {q}")
    corner = q * q - q / 2
    matrix = np.diag([q / 2, q * (1 - q), (1 - q) ** 2, q / 2]).astype(complex)
    matrix[0, 3] = matrix[3, 0] = corner
    return DensityMatrix(matrix, dims=(2, 2))


def rho_x_from_gibbs(params: ThermalParams) -> DensityMatrix:
    """U (tau (x) tau) U^dagger built from the Gibbs qubits."""
    tau = gibbs_qubit(params)
    return DensityMatrix(conjugate(tensor(tau, tau), correlating_unitary()), dims=(2, 2))


def _thermal_point(cfg: OptimizerConfig, point: Tuple[float, float]) -> ThermalRow:
    E, kT = point
    params = thermal_params(E, kT)
    rho = rho_x(params.q)
    x_basis = pauli_basis(PauliAxis.X)
    z_basis = pauli_basis(PauliAxis.Z)
    row = {
        "E": float(E),
        "kT": float(kT),
        "q": params.q,
        "rbn": rbn(rho, cfg).value,
        "eta_xx": eta(x_basis, x_basis, rho),
        "eta_zz": eta(z_basis, z_basis, rho),
        "gd": global_discord(rho, cfg).value,
    }
    if abs(row["eta_zz"] - row["gd"]) > DISCORD_MATCH_TOL:
        logger.warning(f"eta_zz and global discord differ at E={E}, kT={kT}: {row['eta_zz']:.9g} vs {row['gd']:.9g}")
    if row["gd"] > row["rbn"] + HIERARCHY_TOL:
        logger.warning(f"Global discord exceeds RBN at E={E}, kT={kT}")
    return row


def thermal_sweep(
    E_list: Sequence[float],
    kT_grid: Sequence[float],
    cfg: OptimizerConfig,
    workers: Optional[int] = None,
) -> List[ThermalRow]:
    """
    RBN, same-axis contexts and global discord of rho_X over a temperature grid.

    Args:
        E_list: Excited-level energies
        kT_grid: Temperatures (all > 0)
        cfg: Optimizer settings
        workers: Parallel worker cap

    Returns:
        Rows (E, kT, q, rbn, eta_xx, eta_zz, gd), E-major in grid order
    """
    points = [(E, kT) for E in E_list for kT in kT_grid]
    for E, kT in points:
        thermal_params(E, kT)
    logger.info(f"Thermal sweep over {len(E_list)} energies and {len(kT_grid)} temperatures")
    return run_parallel(partial(_thermal_point, cfg), points, workers=workers, label="thermal")


def _noise_point(
    E: float,
    channel_name: ChannelName,
    param_grid: Tuple[Tuple[float, Optional[float]], ...],
    cfg: OptimizerConfig,
    kT: float,
) -> List[ThermalRow]:
    base = _thermal_point(cfg, (E, kT))
    rho = rho_x(base["q"])
    rows = []
    for p, gamma in param_grid:
        channel = make_channel(channel_name, p, gamma)
        rows.append({
            **base,
            "channel": channel_name.value,
            "p": float(p),
            "gamma": channel.gamma,
            "rbn_noisy": rbn(apply_local(channel, rho), cfg).value,
        })
    return rows


def thermal_noise_sweep(
    E: float,
    kT_grid: Sequence[float],
    channel_name: ChannelName,
    param_grid: Sequence[Tuple[float, Optional[float]]],
    cfg: OptimizerConfig,
    workers: Optional[int] = None,
) -> List[ThermalRow]:
    """
    N_rb of rho_X after local noise on B for every (kT, p[, gamma]).

    Args:
        E: Excited-level energy
        kT_grid: Temperatures
        channel_name: Channel identifier (DP and AD in the usual study)
        param_grid: (p, gamma) pairs; gamma is ignored by the non-AD channels
        cfg: Optimizer settings
        workers: Parallel worker cap

    Returns:
        Thermal rows extended with channel, p, gamma and rbn_noisy, kT-major
    """
    channel_name = ChannelName(channel_name)
    params = tuple((float(p), None if g is None else float(g)) for p, g in param_grid)
    for p, gamma in params:
        make_channel(channel_name, p, gamma)
    for kT in kT_grid:
        thermal_params(E, kT)
    logger.info(f"Thermal noise sweep with {channel_name.value} over {len(params)} noise settings")
    batches = run_parallel(
        partial(_noise_point, E, channel_name, params, cfg),
        list(kT_grid),
        workers=workers,
        label="thermal-noise",
    )
    return [row for batch in batches for row in batch]
