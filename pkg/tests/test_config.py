import pytest
from unittest.mock import patch

from config import Config
from models import OptimizerConfig


def test_defaults_validate():
    Config.validate()


@pytest.mark.parametrize(
    "name, value",
    [
        ("THREADS", 0),
        ("GRID_PER_ANGLE", 0),
        ("RESTARTS", 0),
        ("MAX_EVALS", 0),
        ("REFINE_TOLERANCE", 0.0),
        ("CSV_DIGITS", 18),
        ("LOG_LEVEL", "LOUD"),
    ],
)
def test_validate_rejects_bad_values(name, value):
    with patch.object(Config, name, value):
        with pytest.raises(ValueError):
            Config.validate()


def test_optimizer_defaults_follow_environment():
    with patch.object(Config, "GRID_PER_ANGLE", 6), patch.object(Config, "RESTARTS", 3):
        cfg = Config.optimizer_defaults(seed=42)

    assert isinstance(cfg, OptimizerConfig)
    assert cfg.coarse_grid_per_angle == 6
    assert cfg.restarts == 3
    assert cfg.seed == 42
    assert cfg.max_evals == Config.MAX_EVALS
