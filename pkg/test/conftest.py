"""
Pytest configuration file for fixtures.
"""
import json

import numpy as np
import pytest

from source.models.generator_system import CoefArray
from source.models.phase_space import PhaseSpace
from source.models.sampling import SamplingScheme
from source.services import operator_service, phase_space_service, shift_invariant_service, timefreq_service


@pytest.fixture(scope="function")
def rng() -> np.random.Generator:
    """A fresh seeded generator for each test function."""
    return np.random.default_rng(20240611)


@pytest.fixture
def make_lattice():
    """Factory: separable lattice aZ_L x bZ_L."""
    def _make(L, a, b):
        return phase_space_service.build_lattice((a, b), PhaseSpace(L))
    return _make


@pytest.fixture
def make_system(make_lattice):
    """Factory: N random generators on aZ_L x bZ_L, seeded."""
    def _make(L=8, a=2, b=2, N=1, seed=0):
        rng = np.random.default_rng([seed, 0])
        generators = [operator_service.random_operator(L, rng) for _ in range(N)]
        return shift_invariant_service.build_system(make_lattice(L, a, b), generators)
    return _make


@pytest.fixture
def make_scheme():
    """Factory: M pairs of random unit-norm windows, seeded."""
    def _make(L=8, M=1, seed=0):
        rng = np.random.default_rng([seed, 1])
        pairs = [(timefreq_service.random_signal(L, rng, normalize=True),
                  timefreq_service.random_signal(L, rng, normalize=True)) for _ in range(M)]
        return SamplingScheme.from_windows(pairs)
    return _make


@pytest.fixture
def make_coefficients():
    """Factory: seeded complex coefficients on the system's lattice."""
    def _make(system, seed=0):
        rng = np.random.default_rng([seed, 2])
        shape = (system.N, len(system.lattice))
        return CoefArray(system.lattice, rng.standard_normal(shape) + 1j * rng.standard_normal(shape))
    return _make


@pytest.fixture
def write_config(tmp_path):
    """Factory: writes a config dict to tmp_path and returns the path."""
    def _write(config, name="config.json"):
        path = tmp_path / name
        path.write_text(json.dumps(config))
        return path
    return _write


@pytest.fixture
def gaussian_config():
    """L=8, Lambda=2Z x 2Z, one Gaussian rank-one generator, one Gaussian window pair."""
    gaussian = {"kind": "gaussian"}
    return {
        "L": 8,
        "seed": 7,
        "lattice": {"a": 2, "b": 2},
        "generators": [{"kind": "rank_one", "left": gaussian, "right": gaussian}],
        "scheme": {"kind": "windows", "pairs": [{"g": gaussian, "g_dual": gaussian}]},
    }


@pytest.fixture
def delta_config():
    """L=4, full lattice, S = delta_0 (x) delta_0 sampled with delta_0 windows."""
    delta = {"kind": "delta", "at": 0}
    return {
        "L": 4,
        "lattice": {"a": 1, "b": 1},
        "generators": [{"kind": "rank_one", "left": delta, "right": delta}],
        "scheme": {"kind": "windows", "pairs": [{"g": delta, "g_dual": delta}]},
    }
