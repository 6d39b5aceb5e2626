"""
Data models for the finite phase space Z_L x Z_L and its lattices.
"""
from dataclasses import dataclass, field
from enum import Enum
from functools import cached_property
from typing import Dict, Iterator, Optional, Tuple

import numpy as np

from source.errors import ConfigurationError


@dataclass(frozen=True)
class PhaseSpace:
    """
    The phase space Z_L x Z_L.
    Time shifts and frequency shifts both live in Z_L.
    """
    modulus: int

    def __post_init__(self):
        if self.modulus < 2:
            raise ConfigurationError(f"phase-space modulus must be >= 2, got {self.modulus}")

    def point(self, x: int, w: int) -> "PhasePoint":
        return PhasePoint(x, w, self.modulus)

    def points(self) -> Iterator["PhasePoint"]:
        """All L^2 points in lexicographic order."""
        L = self.modulus
        for x in range(L):
            for w in range(L):
                yield PhasePoint(x, w, L)

    def grid(self) -> Tuple[np.ndarray, np.ndarray]:
        """Flat (x, w) coordinate arrays of all points, lexicographic."""
        xs, ws = np.divmod(np.arange(self.modulus ** 2), self.modulus)
        return xs, ws


@dataclass(frozen=True, order=True)
class PhasePoint:
    """
    A point z = (x, w): time shift x, frequency shift w, both mod L.
    Coordinates are reduced on construction.
    """
    x: int
    w: int
    modulus: int = field(compare=False)

    def __post_init__(self):
        object.__setattr__(self, "x", int(self.x) % self.modulus)
        object.__setattr__(self, "w", int(self.w) % self.modulus)

    def _check(self, other: "PhasePoint"):
        if other.modulus != self.modulus:
            raise ConfigurationError(
                f"phase points live in different spaces (L={self.modulus} vs L={other.modulus})")

    def __add__(self, other: "PhasePoint") -> "PhasePoint":
        self._check(other)
        return PhasePoint(self.x + other.x, self.w + other.w, self.modulus)

    def __sub__(self, other: "PhasePoint") -> "PhasePoint":
        self._check(other)
        return PhasePoint(self.x - other.x, self.w - other.w, self.modulus)

    def __neg__(self) -> "PhasePoint":
        return PhasePoint(-self.x, -self.w, self.modulus)

    def as_tuple(self) -> Tuple[int, int]:
        return (self.x, self.w)


class DescriptorKind(Enum):
    """How a lattice was described."""
    SEPARABLE = "separable"
    GENERATED = "generated"


@dataclass(frozen=True)
class LatticeDescriptor:
    """
    Either a separable pair (a, b), meaning aZ_L x bZ_L,
    or an explicit list of generators.
    """
    kind: DescriptorKind
    a: Optional[int] = None
    b: Optional[int] = None
    generators: Tuple[Tuple[int, int], ...] = ()

    @classmethod
    def separable(cls, a: int, b: int) -> "LatticeDescriptor":
        return cls(DescriptorKind.SEPARABLE, a=a, b=b)

    @classmethod
    def generated(cls, generators) -> "LatticeDescriptor":
        return cls(DescriptorKind.GENERATED, generators=tuple(tuple(g) for g in generators))


@dataclass(frozen=True, eq=False)
class Lattice:
    """
    A subgroup of Z_L x Z_L, elements in lexicographic order.
    Corresponds to the lattice Lambda (and also houses annihilators).
    """
    space: PhaseSpace
    elements: Tuple[PhasePoint, ...]
    descriptor: LatticeDescriptor

    def __len__(self) -> int:
        return len(self.elements)

    def __iter__(self) -> Iterator[PhasePoint]:
        return iter(self.elements)

    def __contains__(self, point: PhasePoint) -> bool:
        return point.as_tuple() in self.index

    @property
    def modulus(self) -> int:
        return self.space.modulus

    @cached_property
    def index(self) -> Dict[Tuple[int, int], int]:
        """Position of each element in the canonical ordering."""
        return {p.as_tuple(): i for i, p in enumerate(self.elements)}

    @cached_property
    def coords(self) -> Tuple[np.ndarray, np.ndarray]:
        xs = np.array([p.x for p in self.elements], dtype=np.int64)
        ws = np.array([p.w for p in self.elements], dtype=np.int64)
        return xs, ws

    @cached_property
    def difference_table(self) -> np.ndarray:
        """table[i, j] is the index of elements[i] - elements[j]."""
        L = self.modulus
        xs, ws = self.coords
        dx = (xs[:, None] - xs[None, :]) % L
        dw = (ws[:, None] - ws[None, :]) % L
        lookup = np.full(L * L, -1, dtype=np.int64)
        lookup[xs * L + ws] = np.arange(len(self))
        return lookup[dx * L + dw]

    def same_elements(self, other: "Lattice") -> bool:
        return self.modulus == other.modulus and set(self.index) == set(other.index)

    def is_subgroup_of(self, other: "Lattice") -> bool:
        return self.modulus == other.modulus and set(self.index) <= set(other.index)


@dataclass(frozen=True, eq=False)
class LatticeSeq:
    """A sequence c in l^2(Lambda); values[i] belongs to lattice.elements[i]."""
    lattice: Lattice
    values: np.ndarray

    def __post_init__(self):
        values = np.asarray(self.values, dtype=complex)
        if values.shape != (len(self.lattice),):
            raise ConfigurationError(
                f"sequence has shape {values.shape}, lattice has {len(self.lattice)} elements")
        object.__setattr__(self, "values", values)

    def at(self, point: PhasePoint) -> complex:
        return complex(self.values[self.lattice.index[point.as_tuple()]])

    def norm_sq(self) -> float:
        return float(np.vdot(self.values, self.values).real)

    @classmethod
    def delta(cls, lattice: Lattice, point: Optional[PhasePoint] = None) -> "LatticeSeq":
        """Unit impulse at point (the origin by default)."""
        values = np.zeros(len(lattice), dtype=complex)
        key = point.as_tuple() if point is not None else (0, 0)
        values[lattice.index[key]] = 1.0
        return cls(lattice, values)


@dataclass(frozen=True, eq=False)
class DualTransversal:
    """
    One representative per coset of the annihilator in Z_L x Z_L.
    Finite stand-in for the dual group of the lattice.
    """
    lattice: Lattice
    annihilator: Lattice
    points: Tuple[PhasePoint, ...]

    def __len__(self) -> int:
        return len(self.points)

    @cached_property
    def coords(self) -> Tuple[np.ndarray, np.ndarray]:
        xs = np.array([p.x for p in self.points], dtype=np.int64)
        ws = np.array([p.w for p in self.points], dtype=np.int64)
        return xs, ws


@dataclass(frozen=True, eq=False)
class DualSeq:
    """A function on the dual transversal; values[k] belongs to transversal.points[k]."""
    transversal: DualTransversal
    values: np.ndarray
