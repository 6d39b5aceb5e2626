"""
Data models for signals on Z_L and functions on phase space.
"""
from dataclasses import dataclass

import numpy as np

from source.errors import ConfigurationError


@dataclass(frozen=True, eq=False)
class Signal:
    """
    A complex vector indexed by Z_L.
    Finite model of a square-integrable function (windows g_m, generators' factors).
    """
    samples: np.ndarray

    def __post_init__(self):
        samples = np.asarray(self.samples, dtype=complex)
        if samples.ndim != 1 or samples.shape[0] < 2:
            raise ConfigurationError(f"a signal must be a vector of length >= 2, got shape {samples.shape}")
        object.__setattr__(self, "samples", samples)

    @property
    def L(self) -> int:
        return self.samples.shape[0]

    def norm(self) -> float:
        return float(np.linalg.norm(self.samples))

    def inner(self, other: "Signal") -> complex:
        """<self, other>, linear in the first slot."""
        return complex(np.vdot(other.samples, self.samples))


@dataclass(frozen=True, eq=False)
class PhaseFn:
    """
    A complex function on Z_L x Z_L stored as values[x, w].
    Houses STFTs, Rihaczek/Wigner distributions and symbols.
    """
    values: np.ndarray

    def __post_init__(self):
        values = np.asarray(self.values, dtype=complex)
        if values.ndim != 2 or values.shape[0] != values.shape[1]:
            raise ConfigurationError(f"a phase-space function must be L x L, got shape {values.shape}")
        object.__setattr__(self, "values", values)

    @property
    def L(self) -> int:
        return self.values.shape[0]

    def inner(self, other: "PhaseFn") -> complex:
        return complex(np.vdot(other.values, self.values))

    def translate(self, x: int, w: int) -> "PhaseFn":
        """Cyclic translate T_z F(p) = F(p - z)."""
        return PhaseFn(np.roll(self.values, (x, w), axis=(0, 1)))
