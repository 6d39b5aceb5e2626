"""
Data models for sampling schemes, sample sets and reconstruction kits.
"""
from dataclasses import dataclass
from enum import Enum
from typing import Optional, Tuple

import numpy as np

from source.errors import ConfigurationError, SchemeError
from source.models.generator_system import GeneratorSystem
from source.models.operator import HsOperator
from source.models.phase_space import DualTransversal, Lattice, LatticeSeq
from source.models.signal import Signal


class SchemeKind(Enum):
    """Kind of sampling: window pairs or average operators."""
    WINDOWS = "windows"
    AVERAGE = "average"


class SymbolRoute(Enum):
    """Symbol calculus used to compute cross-correlation sequences."""
    KOHN_NIRENBERG = "kohn_nirenberg"
    WEYL = "weyl"


@dataclass(frozen=True, eq=False)
class SamplingScheme:
    """
    M window pairs (g_m, g~_m), or M average operators Q_m.
    A window pair is the average operator Q_m = g~_m (x) g_m.
    """
    kind: SchemeKind
    windows: Tuple[Tuple[Signal, Signal], ...] = ()
    operators: Tuple[HsOperator, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "windows", tuple(tuple(p) for p in self.windows))
        object.__setattr__(self, "operators", tuple(self.operators))
        if self.kind is SchemeKind.WINDOWS:
            if not self.windows:
                raise ConfigurationError("a window scheme needs at least one pair")
            sizes = {f.L for pair in self.windows for f in pair}
        else:
            if not self.operators:
                raise ConfigurationError("an average scheme needs at least one operator")
            sizes = {Q.L for Q in self.operators}
        if len(sizes) != 1:
            raise ConfigurationError(f"scheme mixes sizes {sorted(sizes)}")

    @classmethod
    def from_windows(cls, pairs) -> "SamplingScheme":
        return cls(SchemeKind.WINDOWS, windows=tuple(pairs))

    @classmethod
    def from_operators(cls, operators) -> "SamplingScheme":
        return cls(SchemeKind.AVERAGE, operators=tuple(operators))

    @property
    def M(self) -> int:
        return len(self.windows) if self.kind is SchemeKind.WINDOWS else len(self.operators)

    @property
    def L(self) -> int:
        if self.kind is SchemeKind.WINDOWS:
            return self.windows[0][0].L
        return self.operators[0].L

    def require_windows(self):
        if self.kind is not SchemeKind.WINDOWS:
            raise SchemeError("diagonal channel samples need window pairs; use average samples instead")

    def average_operators(self) -> Tuple[HsOperator, ...]:
        """Q_m, converting window pairs through Q_m = g~_m (x) g_m."""
        if self.kind is SchemeKind.AVERAGE:
            return self.operators
        return tuple(HsOperator(np.outer(g_dual.samples, g.samples.conj()))
                     for g, g_dual in self.windows)

    def as_average(self) -> "SamplingScheme":
        return SamplingScheme.from_operators(self.average_operators())


@dataclass(frozen=True, eq=False)
class SampleSet:
    """Samples s_{T,m}(lambda) stored as values[m, i]."""
    lattice: Lattice
    values: np.ndarray

    def __post_init__(self):
        values = np.asarray(self.values, dtype=complex)
        if values.ndim != 2 or values.shape[1] != len(self.lattice):
            raise ConfigurationError(
                f"samples must have shape (M, {len(self.lattice)}), got {values.shape}")
        object.__setattr__(self, "values", values)

    @property
    def M(self) -> int:
        return self.values.shape[0]

    def channel(self, m: int) -> LatticeSeq:
        return LatticeSeq(self.lattice, self.values[m])

    def norm_sq(self) -> float:
        return float(np.vdot(self.values, self.values).real)


@dataclass(frozen=True, eq=False)
class CrossSeqMatrix:
    """
    The M x N matrix A = [a_{m,n}] of sequences on the lattice,
    stored as values[m, n, i].
    """
    lattice: Lattice
    values: np.ndarray

    @property
    def M(self) -> int:
        return self.values.shape[0]

    @property
    def N(self) -> int:
        return self.values.shape[1]

    def entry(self, m: int, n: int) -> LatticeSeq:
        return LatticeSeq(self.lattice, self.values[m, n])


@dataclass(frozen=True, eq=False)
class TransferMatrix:
    """
    The M x N matrices A^(xi), one per transversal point: fibers[k, m, n].
    """
    transversal: DualTransversal
    fibers: np.ndarray

    @property
    def lattice(self) -> Lattice:
        return self.transversal.lattice

    @property
    def M(self) -> int:
        return self.fibers.shape[1]

    @property
    def N(self) -> int:
        return self.fibers.shape[2]


@dataclass(frozen=True)
class FrameBounds:
    """
    alpha_A / beta_A: extreme eigenvalues of A^(xi)* A^(xi) over all fibers.
    """
    alpha_a: float
    beta_a: float
    diagnostic: str = ""

    def __iter__(self):
        return iter((self.alpha_a, self.beta_a))


@dataclass(frozen=True, eq=False)
class ReconstructionKit:
    """
    Everything needed for the sampling formula T = sum_m sum_lambda s_m(lambda) alpha_lambda(H_m).
    b[n, m, i] holds the dual sequences b_{n,m}.
    """
    system: GeneratorSystem
    transfer: TransferMatrix
    alpha_a: float
    beta_a: float
    dual_fibers: np.ndarray
    b: np.ndarray
    recon_ops: Tuple[HsOperator, ...]
    perturbation: Optional[np.ndarray] = None

    @property
    def lattice(self) -> Lattice:
        return self.system.lattice

    @property
    def M(self) -> int:
        return len(self.recon_ops)
