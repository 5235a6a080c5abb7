"""
Contextual nonlocality eta, realism-based nonlocality (RBN) with its
observable-space optimizer, global quantum discord and concurrence.

All entropies are in nats.
"""
import logging
import math
from functools import partial
from typing import Dict, List, Optional, Tuple

import numpy as np
from pydantic import ValidationError
from scipy.optimize import minimize
from scipy.special import entr, xlogy

from config import Config
from errors import DimensionMismatchError, ParameterRangeError
from matcore import (
    SIGMA_Y,
    DensityMatrix,
    conjugate,
    entropy,
    partial_trace,
    random_density_matrix,
    random_unitary,
    shannon_entropy,
    tensor,
)
from measurement import ProjectiveBasis, clamp_negative, dephase, direction_kets
from models import MeasurementDirection, OptimizerConfig, OptimizerResult, Side, WernerParams
from states import werner
from utils import sample_rng
from worker import run_parallel

logger = logging.getLogger(__name__)

SIMPLEX_XATOL = 1e-8
CONCURRENCE_ZERO = 1e-12
INVARIANCE_TOL = 1e-4

_SIGMA_YY = np.kron(SIGMA_Y, SIGMA_Y)


def eta(basis_a: ProjectiveBasis, basis_b: ProjectiveBasis, rho: DensityMatrix) -> float:
    """
    Contextual nonlocality S(Phi_A rho) + S(Phi_B rho) - S(Phi_AB rho) - S(rho).

    Args:
        basis_a: Measurement basis of A
        basis_b: Measurement basis of B
        rho: Bipartite state

    Returns:
        eta in nats, rounding negatives in [-1e-9, 0) clamped to 0
    """
    value = (
        entropy(dephase(rho, basis_a, Side.A))
        + entropy(dephase(rho, basis_b, Side.B))
        - entropy(dephase(rho, basis_a, Side.AB, basis_b=basis_b))
        - entropy(rho)
    )
    return clamp_negative(value, "eta")


def mutual_information(rho: DensityMatrix) -> float:
    """Total correlations S(rho_A) + S(rho_B) - S(rho)."""
    value = entropy(partial_trace(rho, Side.A)) + entropy(partial_trace(rho, Side.B)) - entropy(rho)
    return clamp_negative(value, "mutual information")


def direction_grid(points_per_angle: int) -> Tuple[np.ndarray, np.ndarray]:
    """
    Flattened grid of Bloch directions.

    theta_k = k pi / n (k = 0..n) and phi_j = 2 pi j / n (j = 0..n-1), so for
    even n the three Pauli axes are grid nodes.
    """
    n = int(points_per_angle)
    if n < 1:
        raise ParameterRangeError("points_per_angle must be at least 1")
    thetas = np.arange(n + 1) * math.pi / n
    phis = np.arange(n) * 2 * math.pi / n
    theta_grid, phi_grid = np.meshgrid(thetas, phis, indexing="ij")
    return theta_grid.ravel(), phi_grid.ravel()


class _ContextEvaluator:
    """
    Entropy terms of a two-qubit state for whole batches of qubit contexts.

    Dephasing A along |k> leaves the blocks <k|_A rho |k>_A, so S(Phi_A rho)
    is the entropy of the pooled block spectra and the doubly dephased state
    is the joint outcome distribution.
    """

    def __init__(self, rho: DensityMatrix):
        if rho.dims != (2, 2):
            raise DimensionMismatchError(f"Context optimization supports two-qubit states, got dims {rho.dims}")
        self._t = rho.tensor()
        self.s_rho = entropy(rho)
        self.s_rho_a = entropy(partial_trace(rho, Side.A))
        self.s_rho_b = entropy(partial_trace(rho, Side.B))

    def _side(self, kets: np.ndarray, side: Side):
        if side == Side.A:
            blocks = np.einsum("mkx,xyzw,mkz->mkyw", kets.conj(), self._t, kets)
        else:
            blocks = np.einsum("mky,xyzw,mkw->mkxz", kets.conj(), self._t, kets)
        blocks = (blocks + np.swapaxes(blocks, -1, -2).conj()) / 2
        dephased = shannon_entropy(np.linalg.eigvalsh(blocks), axis=(1, 2))
        local = shannon_entropy(np.real(np.trace(blocks, axis1=2, axis2=3)), axis=1)
        return blocks, dephased, local

    def terms(self, kets_a: np.ndarray, kets_b: np.ndarray) -> Dict[str, np.ndarray]:
        blocks_a, s_a, local_a = self._side(kets_a, Side.A)
        _, s_b, local_b = self._side(kets_b, Side.B)
        projectors_b = np.einsum("jby,jbw->jbyw", kets_b.conj(), kets_b)
        joint = np.real(blocks_a.reshape(-1, 4) @ projectors_b.reshape(-1, 4).T)
        joint = joint.reshape(len(kets_a), 2, len(kets_b), 2)
        return {
            "s_a": s_a,
            "s_b": s_b,
            "s_ab": shannon_entropy(joint, axis=(1, 3)),
            "local_a": local_a,
            "local_b": local_b,
        }

    def eta(self, kets_a: np.ndarray, kets_b: np.ndarray) -> np.ndarray:
        t = self.terms(kets_a, kets_b)
        return t["s_a"][:, None] + t["s_b"][None, :] - t["s_ab"] - self.s_rho

    def discord(self, kets_a: np.ndarray, kets_b: np.ndarray) -> np.ndarray:
        t = self.terms(kets_a, kets_b)
        return (
            (t["s_ab"] - self.s_rho)
            - (t["local_a"][:, None] - self.s_rho_a)
            - (t["local_b"][None, :] - self.s_rho_b)
        )

    def at(self, x: np.ndarray, kind: str) -> float:
        kets_a = direction_kets(x[0], x[1])[None]
        kets_b = direction_kets(x[2], x[3])[None]
        return float(getattr(self, kind)(kets_a, kets_b)[0, 0])


def eta_grid(rho: DensityMatrix, points_per_angle: int = 24) -> np.ndarray:
    """
    eta on every pair of grid directions.

    Returns:
        Array of shape (m, m) indexed in `direction_grid` order (A rows, B columns)
    """
    kets = direction_kets(*direction_grid(points_per_angle))
    return _ContextEvaluator(rho).eta(kets, kets)


def _grid_result(values: np.ndarray, flat: int, thetas, phis, evaluations: int) -> OptimizerResult:
    i, j = np.unravel_index(flat, values.shape)
    return OptimizerResult(
        value=float(values[i, j]),
        angles_a=MeasurementDirection.normalized(thetas[i], phis[i]),
        angles_b=MeasurementDirection.normalized(thetas[j], phis[j]),
        evaluations=evaluations,
        converged=True,
    )


def rbn_grid_oracle(rho: DensityMatrix, points_per_angle: int = 24) -> OptimizerResult:
    """Brute-force maximum of eta over the dense four-angle grid."""
    thetas, phis = direction_grid(points_per_angle)
    values = eta_grid(rho, points_per_angle)
    return _grid_result(values, int(np.argmax(values)), thetas, phis, values.size)


def _optimize(rho: DensityMatrix, cfg: OptimizerConfig, kind: str, maximize: bool) -> OptimizerResult:
    evaluator = _ContextEvaluator(rho)
    n = cfg.coarse_grid_per_angle
    thetas, phis = direction_grid(n)
    kets = direction_kets(thetas, phis)
    sign = 1.0 if maximize else -1.0
    scores = sign * getattr(evaluator, kind)(kets, kets)

    # stable sort keeps first-found order among ties
    order = np.argsort(-scores, axis=None, kind="stable")[: cfg.restarts]
    steps = np.array([math.pi / (2 * n), math.pi / n, math.pi / (2 * n), math.pi / n])
    signs = np.random.default_rng(cfg.seed).choice([-1.0, 1.0], size=(len(order), 4))

    def objective(x):
        return -sign * evaluator.at(x, kind)

    best_score = None
    best_x = None
    refine_evals = 0
    all_success = True
    exhausted = False
    for run, flat in enumerate(order):
        remaining = cfg.max_evals - refine_evals
        if remaining <= 0:
            exhausted = True
            break
        i, j = np.unravel_index(int(flat), scores.shape)
        x0 = np.array([thetas[i], phis[i], thetas[j], phis[j]])
        if best_x is None:
            best_score, best_x = float(scores[i, j]), x0
        simplex = np.vstack([x0, x0 + np.diag(signs[run] * steps)])
        res = minimize(
            objective,
            x0,
            method="Nelder-Mead",
            options={
                "initial_simplex": simplex,
                "xatol": SIMPLEX_XATOL,
                "fatol": cfg.refine_tolerance,
                "maxfev": remaining,
            },
        )
        refine_evals += int(res.nfev)
        all_success = all_success and bool(res.success)
        if -float(res.fun) > best_score:
            best_score, best_x = -float(res.fun), np.array(res.x)

    converged = all_success and not exhausted
    evaluations = scores.size + refine_evals
    if not converged:
        logger.warning(
            f"{kind} optimization did not converge within {cfg.max_evals} refinement evaluations"
        )
    logger.debug(f"{kind} optimum {sign * best_score:.12g} after {evaluations} evaluations")
    return OptimizerResult(
        value=sign * best_score,
        angles_a=MeasurementDirection.normalized(best_x[0], best_x[1]),
        angles_b=MeasurementDirection.normalized(best_x[2], best_x[3]),
        evaluations=evaluations,
        converged=converged,
    )


def rbn(rho: DensityMatrix, cfg: Optional[OptimizerConfig] = None) -> OptimizerResult:
    """
    Realism-based nonlocality N_rb(rho) = max over qubit contexts of eta.

    Args:
        rho: Two-qubit state
        cfg: Optimizer settings (defaults from the environment)

    Returns:
        OptimizerResult with the maximum and its arg-max angles
    """
    return _optimize(rho, cfg or Config.optimizer_defaults(), "eta", maximize=True)


def global_discord(rho: DensityMatrix, cfg: Optional[OptimizerConfig] = None) -> OptimizerResult:
    """
    Global quantum discord: minimum over local projective bases of
    [S(Phi_AB rho) - S(rho)] - [S(Phi_A rho_A) - S(rho_A)] - [S(Phi_B rho_B) - S(rho_B)].
    """
    return _optimize(rho, cfg or Config.optimizer_defaults(), "discord", maximize=False)


def _check_mu(mu: float) -> float:
    try:
        return WernerParams(mu=mu).mu
    except ValidationError:
        raise ParameterRangeError(f"Werner weight mu must lie in [0, 1], got {mu}")


def werner_f(mu: float) -> float:
    """F(mu) = (1 + mu) ln((1 + mu) / 4), with F(-1) = 0."""
    return float(xlogy(1 + mu, (1 + mu) / 4))


def werner_entropy(mu: float) -> float:
    """Von Neumann entropy of the Werner state from its spectrum."""
    mu = _check_mu(mu)
    return float(entr((1 + 3 * mu) / 4) + 3 * entr((1 - mu) / 4))


def werner_rbn_closed_form(mu: float) -> float:
    """
    N_rb of the Werner state: same-axis eta -1/2 [F(mu) + F(-mu)] - S(rho_mu).

    Args:
        mu: Singlet weight in [0, 1]
    """
    mu = _check_mu(mu)
    value = -0.5 * (werner_f(mu) + werner_f(-mu)) - werner_entropy(mu)
    return clamp_negative(value, "werner rbn")


def _psd_sqrt(m: np.ndarray) -> np.ndarray:
    w, v = np.linalg.eigh((m + m.conj().T) / 2)
    return (v * np.sqrt(np.clip(w, 0.0, None))) @ v.conj().T


def concurrence(rho: DensityMatrix) -> float:
    """
    Wootters concurrence max(0, l1 - l2 - l3 - l4).

    The l_i are the singular values of sqrt(rho) sqrt(rho~) with
    rho~ = (sy x sy) rho* (sy x sy), i.e. the square-rooted eigenvalues of rho rho~.
    """
    if rho.dims != (2, 2):
        raise DimensionMismatchError(f"Concurrence is defined for two qubits, got dims {rho.dims}")
    flipped = conjugate(rho.matrix.conj(), _SIGMA_YY)
    lambdas = np.linalg.svd(_psd_sqrt(rho.matrix) @ _psd_sqrt(flipped), compute_uv=False)
    value = float(lambdas[0] - lambdas[1] - lambdas[2] - lambdas[3])
    return value if value > CONCURRENCE_ZERO else 0.0


def _invariance_sample(seed: int, cfg: OptimizerConfig, index: int) -> Dict[str, object]:
    rng = sample_rng(seed, index)
    mu = float(rng.uniform(0.0, 1.0))
    if index % 2 == 0:
        kind, rho = "werner", werner(mu)
    else:
        kind, rho = "random", random_density_matrix(4, rng, dims=(2, 2))
        mu = None
    u = tensor(random_unitary(2, rng), random_unitary(2, rng))
    rotated = DensityMatrix(conjugate(rho.matrix, u), dims=(2, 2))
    before = rbn(rho, cfg).value
    after = rbn(rotated, cfg).value
    return {
        "index": index,
        "kind": kind,
        "mu": mu,
        "rbn": before,
        "rbn_rotated": after,
        "delta": abs(after - before),
    }


def invariance_check(
    samples: int,
    seed: int,
    cfg: OptimizerConfig,
    workers: Optional[int] = None,
) -> List[Dict[str, object]]:
    """
    Compare N_rb before and after random local unitaries U_A (x) U_B.

    Even samples use Werner states with random mu, odd samples random mixed states.

    Returns:
        One row per sample with the absolute change `delta`
    """
    rows = run_parallel(partial(_invariance_sample, seed, cfg), range(samples), workers=workers, label="invariance")
    worst = max((row["delta"] for row in rows), default=0.0)
    if worst > INVARIANCE_TOL:
        logger.warning(f"Local-unitary invariance off by {worst:.3e} (tolerance {INVARIANCE_TOL})")
    else:
        logger.info(f"Invariance holds on {samples} samples (max delta {worst:.3e})")
    return rows
