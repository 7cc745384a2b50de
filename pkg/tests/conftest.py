"""
Pytest configuration and shared fixtures
Provides parameter sets, named states and cached figure runs
"""
import math
import shutil
import sys
import tempfile
from pathlib import Path
from typing import Callable, Dict, Generator

import numpy as np
import pytest

# Add src directory to path
src_path = Path(__file__).parent.parent / 'src'
sys.path.insert(0, str(src_path))

from simulator.model import AmplitudeSet, InitialAmplitudes, SystemParams, preset  # noqa: E402
from simulator.oracle import random_reachable_states, stack_states  # noqa: E402
from simulator.runner import FigureBundle, figure  # noqa: E402

SQRT_HALF = 1.0 / math.sqrt(2.0)


def amplitudes(dC: complex, dB: complex, dA: complex, bath: float = 0.0, t: float = 0.0) -> AmplitudeSet:
    """Single-instant AmplitudeSet given in basis order [C, B, A]."""
    return AmplitudeSet(t=t, dA=complex(dA), dB=complex(dB), dC=complex(dC), bath_weight=bath)


@pytest.fixture
def temp_dir() -> Generator[Path, None, None]:
    """Create a temporary directory for test files"""
    temp_path = Path(tempfile.mkdtemp())
    yield temp_path
    # Cleanup
    if temp_path.exists():
        shutil.rmtree(temp_path)


@pytest.fixture
def strong_params() -> SystemParams:
    """Non-Markovian coupling used by most figures"""
    return SystemParams(kappa=1.0, gamma0=10.0, theta=0.5, delta=0.0)


@pytest.fixture
def weak_params() -> SystemParams:
    """Markovian coupling"""
    return SystemParams(kappa=1.0, gamma0=0.1, theta=0.5, delta=0.0)


@pytest.fixture
def detuned_params() -> SystemParams:
    """Parallel dipoles with detuning, where variance squeezing appears"""
    return SystemParams(kappa=1.0, gamma0=10.0, theta=1.0, delta=5.0)


@pytest.fixture
def s1() -> InitialAmplitudes:
    return preset('S1')


@pytest.fixture
def s2() -> InitialAmplitudes:
    return preset('S2')


@pytest.fixture
def dark_state() -> InitialAmplitudes:
    """Antisymmetric excitation that decouples at theta = 1"""
    return InitialAmplitudes(SQRT_HALF, -SQRT_HALF, 0.0)


@pytest.fixture
def ground_amplitudes() -> AmplitudeSet:
    """Pure |C>"""
    return amplitudes(1.0, 0.0, 0.0)


@pytest.fixture
def sz_plus_amplitudes() -> AmplitudeSet:
    """The S_z = +1 eigenstate (|C> + i|B>)/sqrt(2)"""
    return amplitudes(SQRT_HALF, 1j * SQRT_HALF, 0.0)


@pytest.fixture(scope='session')
def random_states() -> AmplitudeSet:
    """Seeded random reachable states packed into one AmplitudeSet"""
    return stack_states(random_reachable_states(1000, seed=7))


@pytest.fixture
def random_state_list():
    return random_reachable_states(200, seed=11)


_FIGURE_CACHE: Dict[str, FigureBundle] = {}


@pytest.fixture(scope='session')
def figure_bundle() -> Callable[[str], FigureBundle]:
    """Figure runs computed once per session"""
    def load(figure_id: str) -> FigureBundle:
        if figure_id not in _FIGURE_CACHE:
            _FIGURE_CACHE[figure_id] = figure(figure_id)
        return _FIGURE_CACHE[figure_id]

    return load


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(2024)


@pytest.fixture
def make_amplitudes() -> Callable[..., AmplitudeSet]:
    """Builder for single-instant states in basis order [C, B, A]"""
    return amplitudes
