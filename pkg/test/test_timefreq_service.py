"""
Tests for the time-frequency service.
"""
import numpy as np
import pytest
from numpy.testing import assert_allclose

from source.errors import UnsupportedModulusError
from source.models.phase_space import PhaseSpace
from source.models.signal import Signal
from source.services import timefreq_service


def _random(rng, L):
    return timefreq_service.random_signal(L, rng)


def test_dft_examples(rng):
    """delta_0 -> L^{-1/2}; constant -> L^{1/2} delta_0; Parseval."""
    L = 8
    delta = timefreq_service.delta_window(L)
    assert_allclose(timefreq_service.dft(delta).samples, np.full(L, L ** -0.5), atol=1e-12)
    expected = np.zeros(L)
    expected[0] = np.sqrt(L)
    assert_allclose(timefreq_service.dft(Signal(np.ones(L))).samples, expected, atol=1e-12)

    f = _random(rng, L)
    assert abs(timefreq_service.dft(f).norm() - f.norm()) < 1e-12 * f.norm()
    assert_allclose(timefreq_service.idft(timefreq_service.dft(f)).samples, f.samples, atol=1e-12)


def test_tf_shift_examples():
    """pi(0,0) is the identity and pi(1,0) moves delta_0 to delta_1."""
    space = PhaseSpace(4)
    f = Signal(np.array([1.0, 2.0, 3.0, 4.0]))
    assert_allclose(timefreq_service.tf_shift(space.point(0, 0), f).samples, f.samples)
    shifted = timefreq_service.tf_shift(space.point(1, 0), timefreq_service.delta_window(4))
    assert_allclose(shifted.samples, timefreq_service.delta_window(4, 1).samples)


def test_tf_shift_unitary_and_matches_matrix(rng):
    """pi(z) preserves norms and agrees with its matrix."""
    L = 6
    f = _random(rng, L)
    for z in PhaseSpace(L).points():
        shifted = timefreq_service.tf_shift(z, f)
        assert abs(shifted.norm() - f.norm()) < 1e-12
        assert_allclose(timefreq_service.tf_shift_matrix(z, L) @ f.samples, shifted.samples, atol=1e-12)


def test_composition_phase():
    """pi(z) pi(z') = exp(2 pi i theta / L) pi(z + z') for every pair."""
    L = 4
    space = PhaseSpace(L)
    for z in space.points():
        for z2 in space.points():
            theta = timefreq_service.composition_phase(z, z2)
            lhs = timefreq_service.tf_shift_matrix(z, L) @ timefreq_service.tf_shift_matrix(z2, L)
            rhs = np.exp(2j * np.pi * theta / L) * timefreq_service.tf_shift_matrix(z + z2, L)
            assert_allclose(lhs, rhs, atol=1e-12)


def test_tf_shift_adjoint(rng):
    """pi(1,1)* = -i pi(3,3) at L=4, and the adjoint is the conjugate transpose."""
    L = 4
    space = PhaseSpace(L)
    adjoint = timefreq_service.tf_shift_matrix(space.point(1, 1), L).conj().T
    assert_allclose(adjoint, -1j * timefreq_service.tf_shift_matrix(space.point(3, 3), L), atol=1e-12)

    f, g = _random(rng, L), _random(rng, L)
    for z in space.points():
        matrix = timefreq_service.tf_shift_matrix(z, L)
        assert_allclose(timefreq_service.tf_shift_adjoint(z, g).samples, matrix.conj().T @ g.samples, atol=1e-12)
        lhs = timefreq_service.tf_shift(z, f).inner(g)
        rhs = f.inner(timefreq_service.tf_shift_adjoint(z, g))
        assert abs(lhs - rhs) < 1e-12


def test_stft_examples(rng):
    """V(0,0) = <phi, psi>; delta_0 against itself is delta_{x,0}; direct definition."""
    L = 6
    phi, psi = _random(rng, L), _random(rng, L)
    V = timefreq_service.stft(phi, psi)
    assert abs(V.values[0, 0] - phi.inner(psi)) < 1e-12
    for z in PhaseSpace(L).points():
        assert abs(V.values[z.x, z.w] - phi.inner(timefreq_service.tf_shift(z, psi))) < 1e-12

    delta = timefreq_service.delta_window(4)
    expected = np.zeros((4, 4))
    expected[0, :] = 1.0
    assert_allclose(timefreq_service.stft(delta, delta).values, expected, atol=1e-12)


def test_stft_moyal(rng):
    """sum |V_psi phi|^2 = L ||phi||^2 ||psi||^2."""
    L = 10
    phi, psi = _random(rng, L), _random(rng, L)
    total = np.sum(np.abs(timefreq_service.stft(phi, psi).values) ** 2)
    expected = L * phi.norm() ** 2 * psi.norm() ** 2
    assert abs(total - expected) < 1e-10 * expected


def test_rihaczek_examples(rng):
    """delta_0 gives L^{-1/2} on the x=0 row; the origin carries no phase."""
    L = 4
    delta = timefreq_service.delta_window(L)
    expected = np.zeros((L, L))
    expected[0, :] = L ** -0.5
    assert_allclose(timefreq_service.rihaczek(delta, delta).values, expected, atol=1e-12)

    psi, phi = _random(rng, 6), _random(rng, 6)
    R = timefreq_service.rihaczek(psi, phi)
    assert abs(R.values[0, 0] - psi.samples[0] * np.conj(timefreq_service.dft(phi).samples[0])) < 1e-12


def test_cross_wigner_examples(rng):
    """Zero-frequency row and the delta_0 table at L=5."""
    L = 5
    psi, phi = _random(rng, L), _random(rng, L)
    W = timefreq_service.cross_wigner(psi, phi)
    h = timefreq_service.half(L)
    for x in range(L):
        direct = sum(psi.samples[(x + t * h) % L] * np.conj(phi.samples[(x - t * h) % L]) for t in range(L))
        assert abs(W.values[x, 0] - direct) < 1e-12

    delta = timefreq_service.delta_window(L)
    expected = np.zeros((L, L))
    expected[0, :] = 1.0
    assert_allclose(timefreq_service.cross_wigner(delta, delta).values, expected, atol=1e-12)


def test_cross_wigner_needs_odd_modulus():
    """2 has no inverse mod an even L."""
    delta = timefreq_service.delta_window(4)
    with pytest.raises(UnsupportedModulusError):
        timefreq_service.cross_wigner(delta, delta)


@pytest.mark.parametrize("L", [4, 8, 12, 15])
def test_gaussian_window_normalized_and_even(L):
    """Unit norm and g(t) = g(-t)."""
    g = timefreq_service.gaussian_window(L).samples
    assert abs(np.linalg.norm(g) - 1.0) < 1e-12
    assert_allclose(g, g[(-np.arange(L)) % L], atol=1e-12)


def test_gaussian_window_decays_to_antipode():
    """L=12: g(0) > g(1) > ... > g(6)."""
    g = timefreq_service.gaussian_window(12).samples.real
    assert all(g[t] > g[t + 1] for t in range(6))


def test_random_signal_normalized(rng):
    """normalize=True gives a unit vector."""
    assert abs(timefreq_service.random_signal(16, rng, normalize=True).norm() - 1.0) < 1e-12
