"""
Data model for Hilbert-Schmidt operators on C^L.
"""
from dataclasses import dataclass

import numpy as np

from source.errors import ConfigurationError
from source.models.signal import Signal


@dataclass(frozen=True, eq=False)
class HsOperator:
    """
    An operator given by its L x L kernel: (S f)(t) = sum_s kernel[t, s] f(s).
    Every operator on C^L is Hilbert-Schmidt (and trace class).
    The kernel is a private read-only copy of the array passed in.
    """
    kernel: np.ndarray

    def __post_init__(self):
        kernel = np.array(self.kernel, dtype=complex)
        if kernel.ndim != 2 or kernel.shape[0] != kernel.shape[1]:
            raise ConfigurationError(f"an operator kernel must be square, got shape {kernel.shape}")
        kernel.setflags(write=False)
        object.__setattr__(self, "kernel", kernel)

    @property
    def L(self) -> int:
        return self.kernel.shape[0]

    def apply(self, f: Signal) -> Signal:
        if f.L != self.L:
            raise ConfigurationError(f"operator of size {self.L} applied to a signal of length {f.L}")
        return Signal(self.kernel @ f.samples)

    def __add__(self, other: "HsOperator") -> "HsOperator":
        return HsOperator(self.kernel + other.kernel)

    def __sub__(self, other: "HsOperator") -> "HsOperator":
        return HsOperator(self.kernel - other.kernel)

    def scale(self, factor: complex) -> "HsOperator":
        return HsOperator(factor * self.kernel)

    def hs_norm(self) -> float:
        return float(np.linalg.norm(self.kernel))

    @classmethod
    def identity(cls, L: int) -> "HsOperator":
        return cls(np.eye(L, dtype=complex))

    @classmethod
    def zeros(cls, L: int) -> "HsOperator":
        return cls(np.zeros((L, L), dtype=complex))
