"""
Data models for experiment configuration and metric reports.
"""
import dataclasses
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, Optional, Tuple

from source.models.phase_space import LatticeDescriptor
from source.models.sampling import SchemeKind


class WindowKind(Enum):
    GAUSSIAN = "gaussian"
    DELTA = "delta"
    RANDOM = "random"
    EXPLICIT = "explicit"


class GeneratorKind(Enum):
    RANK_ONE = "rank_one"
    EXPLICIT_KERNEL = "explicit_kernel"
    RANDOM = "random"


class Command(Enum):
    """The CLI sub-commands."""
    RIESZ_CHECK = "riesz-check"
    FRAME_CHECK = "frame-check"
    RECONSTRUCT = "reconstruct"
    CHANNEL_DEMO = "channel-demo"
    SWEEP = "sweep"


@dataclass(frozen=True)
class WindowSpec:
    """
    How to build a window on Z_L.
    A random window without its own seed draws from the experiment seed.
    """
    kind: WindowKind
    at: int = 0
    seed: Optional[int] = None
    real: Tuple[float, ...] = ()
    imag: Tuple[float, ...] = ()


@dataclass(frozen=True)
class GeneratorSpec:
    """
    How to build one operator: a rank-one left (x) right, an explicit
    kernel, or a random kernel.
    """
    kind: GeneratorKind
    left: Optional[WindowSpec] = None
    right: Optional[WindowSpec] = None
    seed: Optional[int] = None
    real: Tuple[Tuple[float, ...], ...] = ()
    imag: Tuple[Tuple[float, ...], ...] = ()


@dataclass(frozen=True)
class SchemeSpec:
    kind: SchemeKind
    pairs: Tuple[Tuple[WindowSpec, WindowSpec], ...] = ()
    operators: Tuple[GeneratorSpec, ...] = ()


@dataclass(frozen=True)
class Options:
    """
    Command options. tol and frame_tol are absolute thresholds on the lower
    bounds; absent means 1e-10 times the upper bound.
    c_seed draws a perturbation C for the left inverse; absent means Moore-Penrose.
    """
    tol: Optional[float] = None
    frame_tol: Optional[float] = None
    c_seed: Optional[int] = None
    coef_seed: Optional[int] = None
    channel: str = "synthesized"


@dataclass(frozen=True)
class SweepSpec:
    lattices: Tuple[Tuple[int, int], ...]
    schemes: Tuple[SchemeSpec, ...] = ()


@dataclass(frozen=True)
class ExperimentConfig:
    """
    A validated experiment: phase-space size, lattice, generators,
    sampling scheme and options.
    """
    L: int
    lattice: LatticeDescriptor
    generators: Tuple[GeneratorSpec, ...]
    seed: int = 0
    scheme: Optional[SchemeSpec] = None
    sublattice: Optional[LatticeDescriptor] = None
    options: Options = field(default_factory=Options)
    sweep: Optional[SweepSpec] = None

    def with_seed(self, seed: Optional[int]) -> "ExperimentConfig":
        """The same experiment under another seed (None keeps the current one)."""
        if seed is None:
            return self
        return dataclasses.replace(self, seed=seed)


@dataclass(frozen=True)
class MetricsReport:
    """
    Outcome of one CLI command.
    sections holds riesz / frame / reconstruction / ... dictionaries;
    tables names the CSV files written next to metrics.json.
    """
    command: Command
    sections: Dict[str, Dict[str, Any]]
    tables: Tuple[str, ...] = ()
    exit_code: int = 0
    timing: Dict[str, float] = field(default_factory=dict)

    def to_dict(self, include_timing: bool = False) -> Dict[str, Any]:
        payload = {
            "command": self.command.value,
            "exit_code": self.exit_code,
            "tables": list(self.tables),
        }
        payload.update(self.sections)
        if include_timing:
            payload["timing"] = dict(self.timing)
        return payload
