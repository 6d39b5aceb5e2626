"""
Tests for the shift-invariant space service.
"""
import gc
import weakref

import numpy as np
import pytest
from numpy.testing import assert_allclose

from source.errors import ConfigurationError, NotRieszError
from source.models.generator_system import CoefArray, RieszRoute
from source.models.operator import HsOperator
from source.models.phase_space import PhaseSpace
from source.services import operator_service, phase_space_service, shift_invariant_service, timefreq_service


def test_synthesize_deltas(make_system):
    """delta at the origin gives S_1; delta at lambda gives alpha_lambda(S_1)."""
    system = make_system(L=8, a=2, b=2, N=2)
    S1 = system.generators[0]
    assert_allclose(shift_invariant_service.synthesize(system, CoefArray.delta(system.lattice, 2)).kernel,
                    S1.kernel)
    lam = system.lattice.elements[5]
    c = np.zeros((2, len(system.lattice)), dtype=complex)
    c[0, 5] = 1.0
    assert_allclose(shift_invariant_service.synthesize(system, CoefArray(system.lattice, c)).kernel,
                    operator_service.op_translate(lam, S1).kernel, atol=1e-12)


def test_synthesize_linear(make_system, make_coefficients):
    """synthesize(c + d) = synthesize(c) + synthesize(d)."""
    system = make_system(L=6, a=2, b=3, N=2)
    c, d = make_coefficients(system, 1), make_coefficients(system, 2)
    total = shift_invariant_service.synthesize(system, CoefArray(system.lattice, c.values + d.values))
    parts = shift_invariant_service.synthesize(system, c) + shift_invariant_service.synthesize(system, d)
    assert_allclose(total.kernel, parts.kernel, atol=1e-12)


def test_synthesize_rejects_wrong_shape(make_system):
    """Coefficients must match N and the lattice."""
    system = make_system(N=2)
    with pytest.raises(ConfigurationError):
        shift_invariant_service.synthesize(system, CoefArray.delta(system.lattice, 1))


def test_gram_fibers_hermitian_psd(make_system):
    """Every Gram fiber is Hermitian positive semidefinite."""
    system = make_system(L=8, a=2, b=2, N=3, seed=4)
    _, fibers = shift_invariant_service.gram_fibers(system)
    assert fibers.shape == (len(system.lattice), 3, 3)
    assert_allclose(fibers, np.conj(np.transpose(fibers, (0, 2, 1))), atol=1e-10)
    assert np.linalg.eigvalsh(fibers).min() > -1e-10


def test_kn_correlations_match_direct(make_system):
    """Correlations from symbols equal HS inner products of translates."""
    system = make_system(L=6, a=1, b=3, N=2, seed=3)
    assert_allclose(shift_invariant_service.kn_correlations(system),
                    shift_invariant_service.correlations(system), atol=1e-10)


@pytest.mark.parametrize("seed", range(10))
def test_brute_gram_spectrum_equals_fiber_spectra(make_system, seed):
    """Sorted eigenvalues of the full Gram matrix are the union of the fiber spectra."""
    L, a, b = [(8, 2, 2), (6, 2, 3), (4, 1, 2), (9, 3, 1), (12, 3, 4)][seed % 5]
    N = 1 + seed % 3
    system = make_system(L=L, a=a, b=b, N=N, seed=seed)
    gram, lower, upper = shift_invariant_service.brute_gram(system)
    brute = np.sort(np.linalg.eigvalsh(gram))
    _, fibers = shift_invariant_service.gram_fibers(system)
    fibered = np.sort(np.linalg.eigvalsh(fibers).ravel())
    assert np.abs(brute - fibered).max() < 1e-9 * brute.max()
    assert abs(lower - brute[0]) < 1e-9 * brute.max()
    assert abs(upper - brute[-1]) < 1e-9 * brute.max()


@pytest.mark.parametrize("L, a, b", [(4, 2, 2), (6, 2, 3), (12, 3, 4), (4, 1, 2)])
def test_fourier_wigner_route_matches_fibers(make_system, L, a, b):
    """Periodized Fourier-Wigner products times |Lambda| / L equal the Gram fibers."""
    system = make_system(L=L, a=a, b=b, N=2, seed=L)
    _, fibers = shift_invariant_service.gram_fibers(system)
    _, gw = shift_invariant_service.gw_fibers(system)
    assert np.abs(gw - fibers).max() < 1e-9 * np.abs(fibers).max()


def test_riesz_routes_agree(make_system):
    """Fibers, Fourier-Wigner and brute force report the same bounds."""
    system = make_system(L=8, a=2, b=2, N=2, seed=11)
    reports = [shift_invariant_service.riesz_check(system, route=route) for route in RieszRoute]
    for report in reports:
        assert report.is_riesz
        assert abs(report.lower - reports[0].lower) < 1e-9 * reports[0].upper
        assert abs(report.upper - reports[0].upper) < 1e-9 * reports[0].upper
    assert [r.route for r in reports] == list(RieszRoute)


def test_riesz_check_delta_full_lattice(make_lattice):
    """delta_0 (x) delta_0 over the full lattice of Z_4 x Z_4 is not a Riesz sequence."""
    delta = timefreq_service.delta_window(4)
    system = shift_invariant_service.build_system(make_lattice(4, 1, 1), [operator_service.rank_one(delta, delta)])
    report = shift_invariant_service.riesz_check(system)
    assert not report.is_riesz
    assert report.lower < 1e-12
    assert report.upper > 0
    assert report.diagnostic


def test_riesz_check_gaussian_positive(make_lattice):
    """A Gaussian rank-one generator on 2Z x 2Z at L=8 has a positive lower bound."""
    g = timefreq_service.gaussian_window(8)
    system = shift_invariant_service.build_system(make_lattice(8, 2, 2), [operator_service.rank_one(g, g)])
    report = shift_invariant_service.riesz_check(system)
    assert report.is_riesz
    assert 0 < report.lower <= report.upper


def test_riesz_check_overcomplete(make_system):
    """N |Lambda| > L^2 cannot be a Riesz sequence."""
    report = shift_invariant_service.riesz_check(make_system(L=4, a=1, b=1, N=2))
    assert not report.is_riesz
    assert "exceeds the dimension" in report.diagnostic


def test_brute_gram_size_limit():
    """The brute-force route refuses oversized Gram matrices."""
    lattice = phase_space_service.build_lattice((1, 1), PhaseSpace(64))
    rng = np.random.default_rng(0)
    system = shift_invariant_service.build_system(
        lattice, [operator_service.random_operator(64, rng) for _ in range(2)])
    with pytest.raises(ConfigurationError):
        shift_invariant_service.brute_gram(system)


@pytest.mark.parametrize("seed", range(5))
def test_coefficients_recover_synthesis(make_system, make_coefficients, seed):
    """coefficients inverts synthesize on V_S^2."""
    system = make_system(L=8, a=2, b=2, N=1 + seed % 3, seed=seed)
    c = make_coefficients(system, seed)
    T = shift_invariant_service.synthesize(system, c)
    recovered = shift_invariant_service.coefficients(system, T)
    assert np.abs(recovered.values - c.values).max() < 1e-9 * np.abs(c.values).max()


def test_coefficients_project_orthogonally(make_system, rng):
    """T minus the synthesized projection is orthogonal to every translate."""
    system = make_system(L=6, a=2, b=3, N=2, seed=9)
    T = operator_service.random_operator(6, rng)
    projection = shift_invariant_service.synthesize(system, shift_invariant_service.coefficients(system, T))
    residual = T - projection
    stack = shift_invariant_service.translates(system)
    inner = np.einsum("ij,nlij->nl", residual.kernel, stack.conj())
    assert np.abs(inner).max() < 1e-9 * T.hs_norm()


def test_coefficients_need_riesz(make_lattice):
    """A dependent system has no unique coefficients."""
    delta = timefreq_service.delta_window(4)
    system = shift_invariant_service.build_system(make_lattice(4, 1, 1), [operator_service.rank_one(delta, delta)])
    with pytest.raises(NotRieszError):
        shift_invariant_service.coefficients(system, HsOperator.identity(4))


def test_riesz_check_given_tol_is_absolute(make_system):
    """A given tol is compared with m directly, not scaled by M."""
    system = make_system(L=8, a=2, b=2, N=1, seed=3)
    report = shift_invariant_service.riesz_check(system)
    assert report.upper > 1.0
    assert shift_invariant_service.riesz_check(system, tol=0.5 * report.lower).is_riesz
    above = shift_invariant_service.riesz_check(system, tol=2.0 * report.lower)
    assert not above.is_riesz
    assert above.lower == report.lower
    assert above.diagnostic


def test_translates_kept_on_system(make_system):
    """The translate stack is built once per system and is read-only."""
    system = make_system(L=6, a=2, b=3, N=2)
    stack = shift_invariant_service.translates(system)
    again = shift_invariant_service.translates(system)
    assert again is stack
    assert not stack.flags.writeable
    other = make_system(L=6, a=2, b=3, N=2, seed=1)
    assert not np.allclose(shift_invariant_service.translates(other), stack)


def test_translates_released_with_system(make_system):
    """Nothing outside the system keeps it or its translates alive."""
    system = make_system(L=6, a=2, b=3, N=2)
    shift_invariant_service.translates(system)
    shift_invariant_service.gram_fibers(system)
    ref = weakref.ref(system)
    del system
    gc.collect()
    assert ref() is None


@pytest.mark.parametrize("L, a, b, N", [
    (8, 2, 2, 1), (8, 2, 2, 3), (6, 2, 3, 2), (9, 3, 3, 2), (4, 1, 2, 1),
    (12, 3, 4, 2), (10, 5, 2, 2), (8, 2, 4, 2), (6, 3, 3, 3),
])
def test_riesz_bounds_sandwich_synthesis(make_system, make_coefficients, L, a, b, N):
    """m ||c||^2 <= ||synthesize(c)||_HS^2 <= M ||c||^2 for random c."""
    system = make_system(L=L, a=a, b=b, N=N, seed=L + N)
    report = shift_invariant_service.riesz_check(system)
    for seed in range(5):
        c = make_coefficients(system, seed)
        energy = shift_invariant_service.synthesize(system, c).hs_norm() ** 2
        slack = 1e-9 * report.upper * c.norm_sq()
        assert report.lower * c.norm_sq() - slack <= energy
        assert energy <= report.upper * c.norm_sq() + slack


def test_gw_matrix_full_lattice_single_generator(make_lattice, rng):
    """Over the full lattice with N = 1, G^W(xi) is |F(S)(xi)|^2."""
    L = 6
    S = operator_service.random_operator(L, rng)
    system = shift_invariant_service.build_system(make_lattice(L, 1, 1), [S])
    F = operator_service.fourier_wigner(S).values
    for xi in PhaseSpace(L).points():
        G = shift_invariant_service.gw_matrix(system, xi)
        assert G.shape == (1, 1)
        assert abs(G[0, 0] - abs(F[xi.x, xi.w]) ** 2) < 1e-10 * np.abs(F).max() ** 2


def test_gw_matrix_periodic_over_annihilator(make_system):
    """G^W(xi + mu) = G^W(xi) for every mu in the annihilator."""
    system = make_system(L=8, a=2, b=4, N=2, seed=5)
    annihilator = phase_space_service.annihilator(system.lattice)
    assert len(annihilator) == 64 // len(system.lattice)
    for xi in list(PhaseSpace(8).points())[::5]:
        G = shift_invariant_service.gw_matrix(system, xi)
        scale = np.abs(G).max()
        for mu in annihilator:
            assert_allclose(shift_invariant_service.gw_matrix(system, xi + mu), G, atol=1e-10 * scale)
