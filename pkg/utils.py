"""
Utility functions for RBN Lab.
"""
import hashlib
import json
import logging
import math
from typing import Any, Dict, List, Optional

import numpy as np

from config import Config
from errors import ParameterRangeError

logger = logging.getLogger(__name__)

RNG_ALGORITHM = "numpy.random.Philox(SeedSequence(seed, spawn_key=(index,)))"


def sample_rng(seed: int, index: int = 0) -> np.random.Generator:
    """
    Build the random generator of one sample.

    Each sample owns a counter-based substream keyed by (seed, index), so
    results do not depend on execution order or worker count.

    Args:
        seed: Run seed
        index: Sample index

    Returns:
        numpy Generator over a Philox bit generator
    """
    sequence = np.random.SeedSequence(entropy=int(seed), spawn_key=(int(index),))
    return np.random.Generator(np.random.Philox(sequence))


def generate_run_id(command: str, params: Dict[str, Any]) -> str:
    """
    Generate a deterministic run identifier from the command and its parameters.

    Args:
        command: CLI command name
        params: Full parameter set

    Returns:
        Run ID string
    """
    payload = json.dumps({"command": command, "params": params}, sort_keys=True, default=str)
    return f"run-{hashlib.sha256(payload.encode('utf-8')).hexdigest()[:12]}"


def nats_to_bits(value: float) -> float:
    """Convert an entropy-like quantity from nats to bits."""
    return value / math.log(2)


def parse_float_list(text: Optional[str]) -> List[float]:
    """
    Parse a comma separated list of floats such as "1,2,3".

    Args:
        text: Raw flag value

    Returns:
        List of floats (empty for None or blank input)
    """
    if text is None or not str(text).strip():
        return []
    try:
        return [float(item) for item in str(text).split(",") if item.strip()]
    except ValueError as e:
        raise ParameterRangeError(f"Could not parse number list '{text}': {str(e)}")


def setup_logging(log_level: Optional[str] = None) -> None:
    """
    Configure logging for the application.

    Args:
        log_level: Logging level (DEBUG, INFO, WARNING, ERROR)
    """
    level = log_level or Config.LOG_LEVEL
    logging.basicConfig(
        level=getattr(logging, level.upper()),
        format="%(asctime)s - %(name)s - %(levelname)s - %(message)s",
        datefmt="%Y-%m-%d %H:%M:%S"
    )
