"""
Configuration management for RBN Lab.

"""
import os
from dotenv import load_dotenv

from models import OptimizerConfig

load_dotenv()


class Config:
    """Application configuration."""

    VERSION: str = "1.0.0"

    # Parallelism
    THREADS: int = int(os.getenv("RBNLAB_THREADS", str(os.cpu_count() or 1)))

    # Optimizer defaults
    GRID_PER_ANGLE: int = int(os.getenv("RBNLAB_GRID", "12"))
    RESTARTS: int = int(os.getenv("RBNLAB_RESTARTS", "32"))
    REFINE_TOLERANCE: float = float(os.getenv("RBNLAB_REFINE_TOL", "1e-9"))
    MAX_EVALS: int = int(os.getenv("RBNLAB_MAX_EVALS", "20000"))

    # Output
    CSV_DIGITS: int = int(os.getenv("RBNLAB_CSV_DIGITS", "12"))
    OUTPUT_DIR: str = os.getenv("RBNLAB_OUTPUT_DIR", "results")

    # Logging
    LOG_LEVEL: str = os.getenv("LOG_LEVEL", "INFO")
    LOG_LEVELS = ("DEBUG", "INFO", "WARNING", "ERROR")

    @classmethod
    def validate(cls) -> None:
        """Validate that configuration values are usable."""
        if cls.THREADS < 1:
            raise ValueError("RBNLAB_THREADS must be at least 1")
        if cls.GRID_PER_ANGLE < 1 or cls.RESTARTS < 1 or cls.MAX_EVALS < 1:
            raise ValueError("RBNLAB_GRID, RBNLAB_RESTARTS and RBNLAB_MAX_EVALS must be positive")
        if cls.REFINE_TOLERANCE <= 0:
            raise ValueError("RBNLAB_REFINE_TOL must be positive")
        if not 1 <= cls.CSV_DIGITS <= 17:
            raise ValueError("RBNLAB_CSV_DIGITS must be between 1 and 17")
        if cls.LOG_LEVEL.upper() not in cls.LOG_LEVELS:
            raise ValueError(f"LOG_LEVEL must be one of {', '.join(cls.LOG_LEVELS)}")

    @classmethod
    def optimizer_defaults(cls, seed: int = 0) -> OptimizerConfig:
        """Build an OptimizerConfig from the environment."""
        return OptimizerConfig(
            coarse_grid_per_angle=cls.GRID_PER_ANGLE,
            restarts=cls.RESTARTS,
            refine_tolerance=cls.REFINE_TOLERANCE,
            max_evals=cls.MAX_EVALS,
            seed=seed,
        )
