"""
Common pytest fixtures for testing.
"""
import sys
import pathlib
import logging

# Add the scripts directory to sys.path so scripts can import each other
scripts_dir = pathlib.Path(__file__).parent.parent / "scripts"
sys.path.insert(0, str(scripts_dir))

import pytest
import numpy as np

OUTPUT_ENV_VAR = "JK_OUTPUT_DIR"


@pytest.fixture
def rng():
    """Fixed generator for test grids."""
    return np.random.default_rng(20240611)


@pytest.fixture
def temp_output_dir(tmp_path, monkeypatch):
    """Point the output environment variable at a temporary directory."""
    out_dir = tmp_path / "results"
    monkeypatch.setenv(OUTPUT_ENV_VAR, str(out_dir))
    yield out_dir


@pytest.fixture
def temp_config(tmp_path):
    """A kernels.toml with a small sampler grid and a custom output format."""
    cfg_path = tmp_path / "kernels.toml"
    cfg_path.write_text(
        '[sampler]\nenvelope_grid = 1001\n\n[output]\nfloat_format = "%.10g"\n', encoding="utf-8"
    )
    yield cfg_path


@pytest.fixture(autouse=True)
def configure_logging():
    """Configure logging to ensure caplog fixtures work correctly."""
    # Configure root logger to use a basic format and INFO level
    logging.basicConfig(
        level=logging.INFO,
        format='%(levelname)s  %(name)s:%(module)s.py:%(lineno)d %(message)s',
        force=True  # Override any existing configuration
    )
    # This ensures logs will be captured by caplog fixture
    yield
