"""Pytest configuration and fixtures."""

import sys
from pathlib import Path

# Add parent directory to path for imports
sys.path.insert(0, str(Path(__file__).parent.parent))

import numpy as np  # noqa: E402
import pytest  # noqa: E402

from stringbeam.discretization import assemble_generator, build_grids  # noqa: E402
from stringbeam.model import S1, S2, MaterialParams, validate_params  # noqa: E402


@pytest.fixture
def params():
    """All constants 1, both lengths pi."""
    return validate_params(MaterialParams())


@pytest.fixture
def skewed_params():
    """Unequal constants and lengths, to catch swapped coefficients."""
    return validate_params(MaterialParams(
        alpha1=1.7, beta1=0.6, gamma1=1.3, delta1=0.8, tau1=0.4, kappa1=2.1,
        alpha2=0.9, beta2=1.4, gamma2=0.7, delta2=1.2, tau2=0.5, kappa2=1.6,
        ell1=2.0, ell2=3.5,
    ))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def s1_small(params):
    """S1 generator on 16 + 16 cells."""
    return assemble_generator(params, S1, build_grids(params, 16, 16))


@pytest.fixture
def s2_small(params):
    """S2 generator on 16 + 16 cells."""
    return assemble_generator(params, S2, build_grids(params, 16, 16))


@pytest.fixture
def small_generators(params, skewed_params):
    """Both systems, unit and skewed parameters, unequal cell counts."""
    return [
        assemble_generator(p, kind, build_grids(p, 12, 10))
        for p in (params, skewed_params)
        for kind in (S1, S2)
    ]


@pytest.fixture
def log_dir(tmp_path, monkeypatch):
    """Route CLI log files into a temporary directory."""
    directory = tmp_path / "logs"
    monkeypatch.setenv("STRINGBEAM_LOG_DIR", str(directory))
    monkeypatch.delenv("STRINGBEAM_OUTPUT_DIR", raising=False)
    return directory
