"""
Service layer for Hilbert-Schmidt operators on C^L.
Inner products, rank-one operators, operator translation, Kohn-Nirenberg
and Weyl symbols, the Fourier-Wigner transform, Gabor multipliers and
function-operator convolution.
"""
import logging

import numpy as np

from source.errors import ConfigurationError
from source.models.operator import HsOperator
from source.models.phase_space import LatticeSeq, PhasePoint
from source.models.signal import PhaseFn, Signal
from source.services import timefreq_service

logger = logging.getLogger(__name__)


def _check_sizes(*sizes: int):
    if len(set(sizes)) != 1:
        raise ConfigurationError(f"operator sizes do not match: {sizes}")


def hs_inner(S: HsOperator, T: HsOperator) -> complex:
    """<S, T>_HS = tr(S T*) = sum kernel_S conj(kernel_T)."""
    _check_sizes(S.L, T.L)
    return complex(np.vdot(T.kernel, S.kernel))


def rank_one(phi: Signal, psi: Signal) -> HsOperator:
    """(phi (x) psi) e = <e, psi> phi, kernel phi(t) conj(psi(s))."""
    _check_sizes(phi.L, psi.L)
    return HsOperator(np.outer(phi.samples, psi.samples.conj()))


def random_operator(L: int, rng: np.random.Generator) -> HsOperator:
    return HsOperator(rng.standard_normal((L, L)) + 1j * rng.standard_normal((L, L)))


def _translate_kernel(kernel: np.ndarray, x: int, w: int) -> np.ndarray:
    L = kernel.shape[-1]
    t = np.arange(L)
    phase = np.exp(2j * np.pi * w * (t[:, None] - t[None, :]) / L)
    return phase * np.roll(kernel, (x, x), axis=(-2, -1))


def op_translate(z: PhasePoint, S: HsOperator) -> HsOperator:
    """
    alpha_z(S) = pi(z) S pi(z)*, kernel exp(2 pi i w (t - u) / L) S(t - x, u - x).
    """
    _check_sizes(z.modulus, S.L)
    return HsOperator(_translate_kernel(S.kernel, z.x, z.w))


def translate_all(points, S: HsOperator) -> np.ndarray:
    """alpha_z(S) for every z in points, stacked as (len(points), L, L)."""
    return np.stack([_translate_kernel(S.kernel, p.x, p.w) for p in points])


def kn_symbol(S: HsOperator) -> PhaseFn:
    """
    sigma_S(t, v) = L^{-1/2} sum_s kernel(t, s) exp(-2 pi i v (t - s) / L).
    Unitary: <sigma_S, sigma_T> = <S, T>_HS.
    """
    L = S.L
    t = np.arange(L)
    # sum_s kernel(t, s) exp(2 pi i v s / L) is an inverse DFT along s
    inner = np.fft.ifft(S.kernel, axis=1, norm="ortho")
    return PhaseFn(inner * np.exp(-2j * np.pi * np.outer(t, t) / L))


def kn_operator(sigma: PhaseFn) -> HsOperator:
    """
    Inverse of kn_symbol: kernel(t, s) = L^{-1/2} sum_v sigma(t, v) exp(2 pi i v (t - s) / L).
    """
    L = sigma.L
    t = np.arange(L)
    inner = sigma.values * np.exp(2j * np.pi * np.outer(t, t) / L)
    return HsOperator(np.fft.fft(inner, axis=1, norm="ortho"))


def weyl_symbol(S: HsOperator) -> PhaseFn:
    """
    a_S(x, w) = L^{-1/2} sum_t kernel(x + t h, x - t h) exp(-2 pi i w t / L), h = 2^{-1} mod L.
    Odd L only.
    """
    L = S.L
    h = timefreq_service.half(L)
    x = np.arange(L)[:, None]
    t = np.arange(L)[None, :]
    lag = S.kernel[(x + t * h) % L, (x - t * h) % L]
    return PhaseFn(np.fft.fft(lag, axis=1, norm="ortho"))


def weyl_operator(a: PhaseFn) -> HsOperator:
    """Inverse of weyl_symbol (odd L)."""
    L = a.L
    h = timefreq_service.half(L)
    lag = np.fft.ifft(a.values, axis=1, norm="ortho")
    x = np.arange(L)[:, None]
    t = np.arange(L)[None, :]
    kernel = np.zeros((L, L), dtype=complex)
    kernel[(x + t * h) % L, (x - t * h) % L] = lag
    return HsOperator(kernel)


def fourier_wigner(S: HsOperator) -> PhaseFn:
    """
    Raw Fourier-Wigner transform F(x, w) = tr[pi(-z) S] = sum_t exp(-2 pi i w t / L) S(t + x, t).
    The half phase exp(-pi i x w) is left out; it cancels in every product
    F(S_n)(z) conj(F(S_n')(z)) taken at a common z.
    """
    L = S.L
    t = np.arange(L)
    diagonals = np.stack([S.kernel[(t + x) % L, t] for x in range(L)])
    return PhaseFn(np.fft.fft(diagonals, axis=1))


def gabor_multiplier(mask: LatticeSeq, psi: Signal, phi: Signal) -> HsOperator:
    """
    sum_lambda c(lambda) alpha_lambda(phi (x) psi), i.e. the operator
    eta -> sum_lambda c(lambda) V_psi eta(lambda) pi(lambda) phi.
    """
    _check_sizes(mask.lattice.modulus, psi.L, phi.L)
    stack = translate_all(mask.lattice.elements, rank_one(phi, psi))
    return HsOperator(np.tensordot(mask.values, stack, axes=1))


def fn_op_convolve(g: PhaseFn, S: HsOperator) -> HsOperator:
    """g * S = sum_z g(z) alpha_z(S) over all of Z_L x Z_L."""
    _check_sizes(g.L, S.L)
    L = S.L
    kernel = np.zeros((L, L), dtype=complex)
    for x in range(L):
        for w in range(L):
            if g.values[x, w] != 0:
                kernel += g.values[x, w] * _translate_kernel(S.kernel, x, w)
    return HsOperator(kernel)


def phase_convolve(f: PhaseFn, g: PhaseFn) -> PhaseFn:
    """Group convolution on Z_L x Z_L: (f * g)(p) = sum_z f(z) g(p - z)."""
    _check_sizes(f.L, g.L)
    return PhaseFn(np.fft.ifft2(np.fft.fft2(f.values) * np.fft.fft2(g.values)))
