"""
Data models for Lambda-shift-invariant operator spaces.
"""
from dataclasses import dataclass
from enum import Enum
from typing import Tuple

import numpy as np

from source.errors import ConfigurationError
from source.models.operator import HsOperator
from source.models.phase_space import Lattice, LatticeSeq


@dataclass(frozen=True, eq=False)
class GeneratorSystem:
    """
    A lattice plus ordered generators S_1..S_N.
    Spans V_S^2, the closed span of the translates alpha_lambda(S_n).
    """
    lattice: Lattice
    generators: Tuple[HsOperator, ...]

    def __post_init__(self):
        object.__setattr__(self, "generators", tuple(self.generators))
        if not self.generators:
            raise ConfigurationError("a generator system needs at least one generator")
        L = self.lattice.modulus
        for n, S in enumerate(self.generators, start=1):
            if S.L != L:
                raise ConfigurationError(f"generator S_{n} has size {S.L}, lattice lives in Z_{L}")

    @property
    def N(self) -> int:
        return len(self.generators)

    @property
    def L(self) -> int:
        return self.lattice.modulus

    @property
    def overcomplete(self) -> bool:
        """More translates than the dimension L^2 of the operator space."""
        return self.N * len(self.lattice) > self.L ** 2

    def kernels(self) -> np.ndarray:
        """Generator kernels stacked as (N, L, L)."""
        return np.stack([S.kernel for S in self.generators])


@dataclass(frozen=True, eq=False)
class CoefArray:
    """
    Coefficients (c_1, ..., c_N) in l^2_N(Lambda), stored as values[n, i].
    """
    lattice: Lattice
    values: np.ndarray

    def __post_init__(self):
        values = np.asarray(self.values, dtype=complex)
        if values.ndim != 2 or values.shape[1] != len(self.lattice):
            raise ConfigurationError(
                f"coefficients must have shape (N, {len(self.lattice)}), got {values.shape}")
        object.__setattr__(self, "values", values)

    @property
    def N(self) -> int:
        return self.values.shape[0]

    def component(self, n: int) -> LatticeSeq:
        """c_n for a zero-based n."""
        return LatticeSeq(self.lattice, self.values[n])

    def norm_sq(self) -> float:
        return float(np.vdot(self.values, self.values).real)

    @classmethod
    def delta(cls, lattice: Lattice, N: int, n: int = 0) -> "CoefArray":
        """delta at the origin in component n (zero-based)."""
        values = np.zeros((N, len(lattice)), dtype=complex)
        values[n, lattice.index[(0, 0)]] = 1.0
        return cls(lattice, values)


class RieszRoute(Enum):
    """Method used to bound the Gram operator."""
    FIBERS = "fibers"
    FOURIER_WIGNER = "fourier_wigner"
    BRUTE_FORCE = "brute_force"


@dataclass(frozen=True)
class RieszReport:
    """
    Outcome of a Riesz-sequence test.
    lower/upper are the optimal Riesz bounds m <= M.
    """
    is_riesz: bool
    lower: float
    upper: float
    route: RieszRoute
    diagnostic: str = ""
