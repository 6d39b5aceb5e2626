"""
Service layer for time-frequency analysis on Z_L.
Unitary DFT, time-frequency shifts, STFT, Rihaczek and cross-Wigner
distributions, and the standard windows.
"""
import logging

import numpy as np

from source.errors import ConfigurationError, UnsupportedModulusError
from source.models.phase_space import PhasePoint
from source.models.signal import PhaseFn, Signal

logger = logging.getLogger(__name__)

# Periodization range of the Gaussian; the tail beyond |k| = 3 is below 1e-12 for L >= 4.
GAUSSIAN_PERIODS = 3


def _check_point(z: PhasePoint, L: int):
    if z.modulus != L:
        raise ConfigurationError(f"phase point mod {z.modulus} used on signals of length {L}")


def half(L: int) -> int:
    """2^{-1} mod L; only exists for odd L."""
    if L % 2 == 0:
        raise UnsupportedModulusError(f"2 is not invertible mod {L}; Weyl-side objects need odd L")
    return (L + 1) // 2


def dft(f: Signal) -> Signal:
    """f^(w) = L^{-1/2} sum_t f(t) exp(-2 pi i w t / L)."""
    return Signal(np.fft.fft(f.samples, norm="ortho"))


def idft(f: Signal) -> Signal:
    return Signal(np.fft.ifft(f.samples, norm="ortho"))


def tf_shift_matrix(z: PhasePoint, L: int) -> np.ndarray:
    """Matrix of pi(z): entry [t, s] = exp(2 pi i w t / L) when s = t - x."""
    _check_point(z, L)
    t = np.arange(L)
    P = np.zeros((L, L), dtype=complex)
    P[t, (t - z.x) % L] = np.exp(2j * np.pi * z.w * t / L)
    return P


def tf_shift(z: PhasePoint, f: Signal) -> Signal:
    """(pi(z) f)(t) = exp(2 pi i w t / L) f(t - x)."""
    L = f.L
    _check_point(z, L)
    t = np.arange(L)
    return Signal(np.exp(2j * np.pi * z.w * t / L) * np.roll(f.samples, z.x))


def tf_shift_adjoint(z: PhasePoint, f: Signal) -> Signal:
    """pi(z)* f = exp(-2 pi i x w / L) pi(-z) f."""
    L = f.L
    _check_point(z, L)
    return Signal(np.exp(-2j * np.pi * z.x * z.w / L) * tf_shift(-z, f).samples)


def composition_phase(z: PhasePoint, z_prime: PhasePoint) -> int:
    """
    Integer theta with pi(z) pi(z') = exp(2 pi i theta / L) pi(z + z').
    """
    return (-z.x * z_prime.w) % z.modulus


def stft(phi: Signal, psi: Signal) -> PhaseFn:
    """
    V_psi phi(x, w) = <phi, pi(x, w) psi> for every point of Z_L x Z_L.
    """
    if phi.L != psi.L:
        raise ConfigurationError(f"STFT of a length-{phi.L} signal with a length-{psi.L} window")
    L = phi.L
    # Row x: the unnormalized DFT of phi(t) * conj(psi(t - x)).
    products = np.stack([phi.samples * np.roll(psi.samples, x).conj() for x in range(L)])
    return PhaseFn(np.fft.fft(products, axis=1))


def rihaczek(psi: Signal, phi: Signal) -> PhaseFn:
    """R(psi, phi)(x, w) = psi(x) conj(phi^(w)) exp(-2 pi i x w / L)."""
    if phi.L != psi.L:
        raise ConfigurationError("Rihaczek distribution of signals of different lengths")
    L = psi.L
    x = np.arange(L)
    chirp = np.exp(-2j * np.pi * np.outer(x, x) / L)
    return PhaseFn(np.outer(psi.samples, dft(phi).samples.conj()) * chirp)


def cross_wigner(psi: Signal, phi: Signal) -> PhaseFn:
    """
    W(psi, phi)(x, w) = sum_t psi(x + t h) conj(phi(x - t h)) exp(-2 pi i w t / L),
    h = 2^{-1} mod L. Odd L only.
    """
    if phi.L != psi.L:
        raise ConfigurationError("cross-Wigner distribution of signals of different lengths")
    L = psi.L
    h = half(L)
    x = np.arange(L)[:, None]
    t = np.arange(L)[None, :]
    lag = psi.samples[(x + t * h) % L] * phi.samples[(x - t * h) % L].conj()
    return PhaseFn(np.fft.fft(lag, axis=1))


def gaussian_window(L: int) -> Signal:
    """
    Periodized L^2-normalized Gaussian with width sqrt(L).
    """
    t = np.arange(L)
    # centered representative in [-L/2, L/2)
    centered = ((t + L // 2) % L) - L // 2
    k = np.arange(-GAUSSIAN_PERIODS, GAUSSIAN_PERIODS + 1)[:, None]
    g = np.exp(-np.pi * ((centered[None, :] + k * L) / np.sqrt(L)) ** 2).sum(axis=0)
    return Signal(g / np.linalg.norm(g))


def delta_window(L: int, at: int = 0) -> Signal:
    samples = np.zeros(L, dtype=complex)
    samples[at % L] = 1.0
    return Signal(samples)


def random_signal(L: int, rng: np.random.Generator, normalize: bool = False) -> Signal:
    """Complex Gaussian vector drawn from rng."""
    samples = rng.standard_normal(L) + 1j * rng.standard_normal(L)
    if normalize:
        samples /= np.linalg.norm(samples)
    return Signal(samples)


def shifted_windows(g: Signal, points) -> np.ndarray:
    """Columns pi(lambda) g for the given points, as an L x len(points) matrix."""
    return np.stack([tf_shift(p, g).samples for p in points], axis=1)
