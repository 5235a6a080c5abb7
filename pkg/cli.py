"""
Command-line interface for RBN Lab.

Commands: state-rbn, werner-sweep, security, thermal, invariance,
monotonicity and replay. Exit codes: 0 success, 1 unexpected failure,
2 unreadable state file, 3 invalid state, 4 invalid flags.
"""
import argparse
import json
import logging
import sys
import time
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Sequence

import numpy as np
from pydantic import ValidationError

from channels import make_channel, sample_monotonicity, werner_curve
from config import Config
from correlations import concurrence, global_discord, invariance_check, mutual_information, rbn
from errors import DimensionMismatchError, ParameterRangeError, StateParseError, StateValidationError
from matcore import purity
from models import ChannelName, OptimizerConfig, OutputFormat, ProtocolConfig, RunManifest, Sampling, Scenario
from output_store import OutputStore, load_manifest, load_state
from security import analytic_envelopes, simulate_protocol
from thermal import thermal_noise_sweep, thermal_sweep
from utils import RNG_ALGORITHM, generate_run_id, nats_to_bits, parse_float_list, setup_logging

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_PARSE = 2
EXIT_INVALID_STATE = 3
EXIT_FLAGS = 4

WERNER_COLUMNS = ["mu", "rbn_analytic", "rbn_numeric", "concurrence", "separable", "rbn_noisy"]
SCATTER_COLUMNS = ["channel", "mu", "p", "gamma", "rbn_clean", "rbn_noisy", "violation"]
PROTOCOL_COLUMNS = [
    "mu", "theta_a", "phi_a", "theta_b", "phi_b", "theta_e", "phi_e", "eta", "scenario", "sampling",
]
ENVELOPE_COLUMNS = ["mu", "rbn_noiseless", "rbn_after_eve", "eta_distinct_pauli", "eve_grid_max", "flagged"]
THERMAL_COLUMNS = ["E", "kT", "q", "rbn", "eta_xx", "eta_zz", "gd"]
THERMAL_NOISE_COLUMNS = THERMAL_COLUMNS + ["channel", "p", "gamma", "rbn_noisy"]
INVARIANCE_COLUMNS = ["index", "kind", "mu", "rbn", "rbn_rotated", "delta"]
STATE_COLUMNS = [
    "units", "rbn", "theta_a", "phi_a", "theta_b", "phi_b", "evaluations", "converged",
    "concurrence", "mutual_information", "purity", "gd",
]


class FlagError(Exception):
    """Raised instead of exiting when argparse rejects the command line."""


class ArgumentParser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise FlagError(f"{self.prog}: error: {message}")


def _optimizer_config(args: argparse.Namespace) -> OptimizerConfig:
    return OptimizerConfig(
        coarse_grid_per_angle=args.grid,
        restarts=args.restarts,
        refine_tolerance=args.tol,
        max_evals=args.max_evals,
        seed=args.seed,
    )


def _store(args: argparse.Namespace) -> OutputStore:
    fmt = OutputFormat(args.format)
    out = args.out or str(Path(Config.OUTPUT_DIR) / f"{args.command}.{fmt.value}")
    return OutputStore(out, fmt)


def _unit_scale(args: argparse.Namespace) -> Callable[[Optional[float]], Optional[float]]:
    if args.units == "bits":
        return lambda v: None if v is None else nats_to_bits(v)
    return lambda v: v


def cmd_state_rbn(args: argparse.Namespace, store: OutputStore) -> Dict[str, Any]:
    """N_rb of a state file with its arg-max context and diagnostics."""
    rho = load_state(args.input)
    cfg = _optimizer_config(args)
    result = rbn(rho, cfg)
    scale = _unit_scale(args)
    report = {
        "units": args.units,
        "rbn": scale(result.value),
        "theta_a": result.angles_a.theta,
        "phi_a": result.angles_a.phi,
        "theta_b": result.angles_b.theta,
        "phi_b": result.angles_b.phi,
        "evaluations": result.evaluations,
        "converged": result.converged,
        "concurrence": concurrence(rho),
        "mutual_information": scale(mutual_information(rho)),
        "purity": purity(rho),
        "gd": scale(global_discord(rho, cfg).value) if args.discord else None,
    }
    print(json.dumps(report, indent=2))
    store.save_table(STATE_COLUMNS, [report])
    return report


def cmd_werner_sweep(args: argparse.Namespace, store: OutputStore) -> None:
    """Werner curve, separability marker and optional channel scatter."""
    if args.mu_steps < 2:
        raise ParameterRangeError("--mu-steps must be at least 2")
    cfg = _optimizer_config(args)
    mu_grid = np.linspace(0.0, 1.0, args.mu_steps)
    channel = None
    if args.channel != "none" and args.p is not None:
        channel = make_channel(args.channel, args.p, args.gamma)
    rows = werner_curve(mu_grid, cfg, channel=channel, workers=args.workers)
    store.save_table(WERNER_COLUMNS, rows)
    if args.channel != "none" and args.samples > 0:
        scatter = sample_monotonicity(args.samples, args.seed, cfg, channels=[args.channel], workers=args.workers)
        store.save_table(SCATTER_COLUMNS, scatter, suffix="scatter")


def cmd_security(args: argparse.Namespace, store: OutputStore) -> None:
    """Protocol scatter plus the analytic envelopes."""
    if args.envelope_steps < 1:
        raise ParameterRangeError("--envelope-steps must be at least 1")
    protocol = ProtocolConfig(
        samples=args.samples,
        mu_range=(args.mu_min, args.mu_max),
        scenario=Scenario(args.scenario),
        sampling=Sampling(args.sampling),
        seed=args.seed,
    )
    records = simulate_protocol(protocol, workers=args.workers)
    store.save_table(PROTOCOL_COLUMNS, [record.as_row() for record in records])
    mu_grid = np.linspace(0.0, 1.0, args.envelope_steps)
    envelopes = analytic_envelopes(mu_grid, points_per_angle=args.eve_grid)
    store.save_table(ENVELOPE_COLUMNS, envelopes, suffix="envelopes")


def _kt_grid(args: argparse.Namespace) -> np.ndarray:
    if args.kt_min <= 0 or args.kt_max < args.kt_min or args.steps < 1:
        raise ParameterRangeError("Need 0 < --kt-min <= --kt-max and --steps >= 1")
    return np.linspace(args.kt_min, args.kt_max, args.steps)


def cmd_thermal(args: argparse.Namespace, store: OutputStore) -> None:
    """Thermal sweep of rho_X, optionally under local noise."""
    cfg = _optimizer_config(args)
    energies = parse_float_list(args.E)
    if not energies:
        raise ParameterRangeError("--E needs at least one energy")
    kt_grid = _kt_grid(args)
    if args.channel == "none":
        store.save_table(THERMAL_COLUMNS, thermal_sweep(energies, kt_grid, cfg, workers=args.workers))
        return
    p_values = parse_float_list(args.p) or [1.0]
    if args.channel == ChannelName.AD.value:
        gammas = parse_float_list(args.gamma) or [1.0]
        param_grid = [(p, g) for p in p_values for g in gammas]
    else:
        param_grid = [(p, None) for p in p_values]
    rows = []
    for energy in energies:
        rows.extend(thermal_noise_sweep(energy, kt_grid, args.channel, param_grid, cfg, workers=args.workers))
    store.save_table(THERMAL_NOISE_COLUMNS, rows)


def cmd_invariance(args: argparse.Namespace, store: OutputStore) -> None:
    """N_rb before and after random local unitaries."""
    rows = invariance_check(args.samples, args.seed, _optimizer_config(args), workers=args.workers)
    store.save_table(INVARIANCE_COLUMNS, rows)


def cmd_monotonicity(args: argparse.Namespace, store: OutputStore) -> None:
    """Noisy-versus-noiseless N_rb over random (mu, p, gamma)."""
    channels = [c.strip() for c in args.channels.split(",") if c.strip()] if args.channels else None
    rows = sample_monotonicity(args.samples, args.seed, _optimizer_config(args), channels=channels, workers=args.workers)
    store.save_table(SCATTER_COLUMNS, rows)


def _add_common(parser: argparse.ArgumentParser, optimizer: bool = True) -> None:
    parser.add_argument("--seed", type=int, default=0, help="Run seed")
    parser.add_argument("--out", default=None, help="Primary output file")
    parser.add_argument("--format", choices=[f.value for f in OutputFormat], default=OutputFormat.CSV.value)
    parser.add_argument("--workers", type=int, default=None, help="Worker cap (default RBNLAB_THREADS)")
    if optimizer:
        parser.add_argument("--grid", type=int, default=Config.GRID_PER_ANGLE, help="Coarse grid per angle")
        parser.add_argument("--restarts", type=int, default=Config.RESTARTS)
        parser.add_argument("--tol", type=float, default=Config.REFINE_TOLERANCE, help="Refinement tolerance")
        parser.add_argument("--max-evals", type=int, default=Config.MAX_EVALS)


def build_parser() -> ArgumentParser:
    parser = ArgumentParser(prog="rbnlab", description="Realism-based nonlocality toolkit")
    parser.add_argument("--log-level", type=str.upper, choices=Config.LOG_LEVELS, default=None)
    sub = parser.add_subparsers(dest="command", required=True)

    state = sub.add_parser("state-rbn", help="RBN of a state file")
    state.add_argument("input", help="JSON state file")
    state.add_argument("--discord", action="store_true", help="Also report global discord")
    state.add_argument("--units", choices=["nats", "bits"], default="nats")
    _add_common(state)
    state.set_defaults(func=cmd_state_rbn)

    sweep = sub.add_parser("werner-sweep", help="Werner curve and noise scatter")
    sweep.add_argument("--mu-steps", type=int, default=101)
    sweep.add_argument("--channel", choices=["none"] + [c.value for c in ChannelName], default="none")
    sweep.add_argument("--p", type=float, default=None, help="Fixed noise parameter for the noisy curve")
    sweep.add_argument("--gamma", type=float, default=None, help="AD damping strength")
    sweep.add_argument("--samples", type=int, default=1000, help="Random (mu, p, gamma) scatter points")
    _add_common(sweep)
    sweep.set_defaults(func=cmd_werner_sweep)

    security = sub.add_parser("security", help="Alice/Bob/Eve protocol simulation")
    security.add_argument("--scenario", choices=[s.value for s in Scenario], default=Scenario.IDEAL.value)
    security.add_argument("--sampling", choices=[s.value for s in Sampling], default=Sampling.MIXED.value)
    security.add_argument("--samples", type=int, default=100000)
    security.add_argument("--mu-min", type=float, default=0.0)
    security.add_argument("--mu-max", type=float, default=1.0)
    security.add_argument("--envelope-steps", type=int, default=101)
    security.add_argument("--eve-grid", type=int, default=24, help="Eve-direction grid per angle")
    _add_common(security, optimizer=False)
    security.set_defaults(func=cmd_security)

    thermal = sub.add_parser("thermal", help="Thermal rho_X sweeps")
    thermal.add_argument("--E", default="1,2,3", help="Comma separated energies")
    thermal.add_argument("--kt-min", type=float, default=0.1)
    thermal.add_argument("--kt-max", type=float, default=20.0)
    thermal.add_argument("--steps", type=int, default=40)
    thermal.add_argument("--channel", choices=["none"] + [c.value for c in ChannelName], default="none")
    thermal.add_argument("--p", default=None, help="Comma separated noise parameters")
    thermal.add_argument("--gamma", default=None, help="Comma separated AD damping strengths")
    _add_common(thermal)
    thermal.set_defaults(func=cmd_thermal)

    invariance = sub.add_parser("invariance", help="Local-unitary invariance check")
    invariance.add_argument("--samples", type=int, default=100)
    _add_common(invariance)
    invariance.set_defaults(func=cmd_invariance)

    monotonicity = sub.add_parser("monotonicity", help="Noise monotonicity sampler")
    monotonicity.add_argument("--samples", type=int, default=10000)
    monotonicity.add_argument("--channels", default=None, help="Comma separated channel names (default all)")
    _add_common(monotonicity)
    monotonicity.set_defaults(func=cmd_monotonicity)

    replay = sub.add_parser("replay", help="Re-run a command from its manifest")
    replay.add_argument("manifest", help="Path to a .manifest.json file")
    replay.add_argument("--out", default=None, help="Write to a different primary output")
    replay.set_defaults(func=None)
    return parser


def _parameters(args: argparse.Namespace, argv: Sequence[str]) -> Dict[str, Any]:
    params = {k: v for k, v in vars(args).items() if k not in ("func", "log_level")}
    params["argv"] = list(argv)
    return params


def run(args: argparse.Namespace, argv: Sequence[str]) -> None:
    """Execute a parsed command and write its manifest."""
    store = _store(args)
    parameters = _parameters(args, argv)
    logger.info(f"Running {args.command}")
    started = time.perf_counter()
    args.func(args, store)
    manifest = RunManifest(
        command=args.command,
        parameters=parameters,
        seed=getattr(args, "seed", None),
        library_version=Config.VERSION,
        rng_algorithm=RNG_ALGORITHM,
        run_id=generate_run_id(args.command, {k: v for k, v in parameters.items() if k not in ("out", "argv")}),
        outputs=[str(p) for p in store.written],
        output_path=str(store.out_path),
        duration_seconds=time.perf_counter() - started,
    )
    store.save_manifest(manifest)
    logger.info(f"Finished {args.command} ({manifest.run_id}) in {manifest.duration_seconds:.2f}s")


def _replay(parser: ArgumentParser, args: argparse.Namespace) -> None:
    try:
        manifest = load_manifest(args.manifest)
    except ValueError as e:
        raise FlagError(str(e))
    argv = manifest.parameters.get("argv")
    if not isinstance(argv, list):
        raise FlagError(f"Manifest {args.manifest} does not record its command line")
    replayed = parser.parse_args(argv)
    if args.out:
        replayed.out = args.out
    logger.info(f"Replaying {manifest.run_id} from {args.manifest}")
    run(replayed, argv)


def main(argv: Optional[List[str]] = None) -> int:
    """
    Entry point.

    Args:
        argv: Command line without the program name (default sys.argv[1:])

    Returns:
        Process exit code
    """
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except FlagError as e:
        print(str(e), file=sys.stderr)
        return EXIT_FLAGS
    except SystemExit as e:
        return int(e.code or 0)

    try:
        Config.validate()
    except ValueError as e:
        print(f"Invalid configuration: {str(e)}", file=sys.stderr)
        return EXIT_FLAGS

    setup_logging(args.log_level)
    try:
        if args.command == "replay":
            _replay(parser, args)
        else:
            run(args, argv)
        return EXIT_OK
    except StateParseError as e:
        logger.error(f"Could not read state: {str(e)}")
        return EXIT_PARSE
    except (StateValidationError, DimensionMismatchError) as e:
        logger.error(f"Invalid state: {str(e)}")
        return EXIT_INVALID_STATE
    except (FlagError, ParameterRangeError, ValidationError) as e:
        logger.error(f"Invalid flags: {str(e)}")
        return EXIT_FLAGS
    except Exception as e:
        logger.error(f"Unhandled error in {args.command}: {str(e)}", exc_info=True)
        return EXIT_FAILURE


if __name__ == "__main__":
    sys.exit(main())
