"""
Service layer for Lambda-shift-invariant operator spaces V_S^2.
Synthesis, three routes to the Riesz bounds (fiberized Gram, brute-force
Gram, periodized Fourier-Wigner outer products) and coefficient recovery.
"""
import logging
from typing import Optional, Sequence, Tuple

import numpy as np

from source.errors import ConfigurationError, NotRieszError
from source.models.generator_system import CoefArray, GeneratorSystem, RieszReport, RieszRoute
from source.models.operator import HsOperator
from source.models.phase_space import DualSeq, DualTransversal, Lattice, PhasePoint
from source.services import operator_service, phase_space_service

logger = logging.getLogger(__name__)

BRUTE_GRAM_LIMIT = 4096
RIESZ_RELATIVE_TOL = 1e-10


def build_system(lattice: Lattice, generators: Sequence[HsOperator]) -> GeneratorSystem:
    system = GeneratorSystem(lattice, tuple(generators))
    logger.debug("generator system: N=%d, |Lambda|=%d, L=%d", system.N, len(lattice), system.L)
    return system


def translates(system: GeneratorSystem) -> np.ndarray:
    """
    alpha_lambda(S_n) for all n and lambda, shape (N, |Lambda|, L, L).
    Built once per system and kept on it, read-only.
    """
    stack = system.__dict__.get("_translates")
    if stack is None:
        stack = np.stack([operator_service.translate_all(system.lattice.elements, S)
                          for S in system.generators])
        stack.setflags(write=False)
        object.__setattr__(system, "_translates", stack)
    return stack


def transversal_of(lattice: Lattice) -> DualTransversal:
    """The dual transversal of a lattice, built once and kept on it."""
    transversal = lattice.__dict__.get("_transversal")
    if transversal is None:
        transversal = phase_space_service.dual_transversal(lattice)
        object.__setattr__(lattice, "_transversal", transversal)
    return transversal


def synthesize(system: GeneratorSystem, c: CoefArray) -> HsOperator:
    """sum_n sum_lambda c_n(lambda) alpha_lambda(S_n)."""
    if c.N != system.N or not c.lattice.same_elements(system.lattice):
        raise ConfigurationError(
            f"coefficients of shape {c.values.shape} do not fit a system with N={system.N}, "
            f"|Lambda|={len(system.lattice)}")
    return HsOperator(np.einsum("nl,nlij->ij", c.values, translates(system)))


def correlations(system: GeneratorSystem) -> np.ndarray:
    """r[n, n', i] = <S_n, alpha_{lambda_i}(S_n')>_HS."""
    return np.einsum("nij,mlij->nml", system.kernels(), translates(system).conj())


def kn_correlations(system: GeneratorSystem) -> np.ndarray:
    """
    The same correlations computed on the symbol side:
    <sigma_{S_n}, T_lambda sigma_{S_n'}> with T_lambda the cyclic translate.
    """
    symbols = [operator_service.kn_symbol(S) for S in system.generators]
    N, lattice = system.N, system.lattice
    r = np.zeros((N, N, len(lattice)), dtype=complex)
    for i, lam in enumerate(lattice):
        for n in range(N):
            for n2 in range(N):
                r[n, n2, i] = symbols[n].inner(symbols[n2].translate(lam.x, lam.w))
    return r


def gram_fibers(system: GeneratorSystem) -> Tuple[DualTransversal, np.ndarray]:
    """
    G^(xi)[n, n'] = sum_lambda r_{n,n'}(lambda) exp(2 pi i sigma(lambda, xi) / L),
    one Hermitian PSD N x N matrix per transversal point, shape (|Lambda|, N, N).
    """
    transversal = transversal_of(system.lattice)
    E = phase_space_service.character_matrix(system.lattice, *transversal.coords)
    fibers = np.einsum("kl,nml->knm", E, correlations(system))
    return transversal, fibers


def brute_gram(system: GeneratorSystem) -> Tuple[np.ndarray, float, float]:
    """
    Gram matrix of the vectors alpha_lambda(S_n), ordered n-major, with its
    extreme eigenvalues.
    """
    size = system.N * len(system.lattice)
    if size > BRUTE_GRAM_LIMIT:
        raise ConfigurationError(f"brute-force Gram of size {size} exceeds the limit {BRUTE_GRAM_LIMIT}")
    vectors = translates(system).reshape(size, -1)
    gram = vectors.conj() @ vectors.T
    eigenvalues = np.linalg.eigvalsh(gram)
    return gram, float(eigenvalues[0]), float(eigenvalues[-1])


def gw_matrix(system: GeneratorSystem, xi: PhasePoint,
              annihilator=None, transforms: Optional[np.ndarray] = None) -> np.ndarray:
    """
    G^W(xi) = sum over the annihilator of F(xi + mu) conj(F(xi + mu))^T,
    F = (F(S_1), ..., F(S_N)) the raw Fourier-Wigner transforms.
    """
    if annihilator is None:
        annihilator = phase_space_service.annihilator(system.lattice)
    if transforms is None:
        transforms = np.stack([operator_service.fourier_wigner(S).values for S in system.generators])
    L = system.L
    ax, aw = annihilator.coords
    F = transforms[:, (xi.x + ax) % L, (xi.w + aw) % L]
    return F @ F.conj().T


def gw_fibers(system: GeneratorSystem) -> Tuple[DualTransversal, np.ndarray]:
    """
    The G^W matrices over the transversal, rescaled by |Lambda| / L so that
    they coincide with gram_fibers.
    """
    transversal = transversal_of(system.lattice)
    transforms = np.stack([operator_service.fourier_wigner(S).values for S in system.generators])
    scale = len(system.lattice) / system.L
    fibers = np.stack([scale * gw_matrix(system, xi, transversal.annihilator, transforms)
                       for xi in transversal.points])
    return transversal, fibers


def riesz_check(system: GeneratorSystem, tol: Optional[float] = None,
                route: RieszRoute = RieszRoute.FIBERS) -> RieszReport:
    """
    m = min_xi lambda_min(G^(xi)), M = max_xi lambda_max(G^(xi)); Riesz iff m > tol.
    A given tol is an absolute threshold; without one the threshold is 1e-10 * M.
    """
    if system.overcomplete:
        diagnostic = (f"N*|Lambda| = {system.N * len(system.lattice)} exceeds the dimension "
                      f"L^2 = {system.L ** 2}")
        logger.info("not a Riesz sequence: %s", diagnostic)
        return RieszReport(False, 0.0, 0.0, route, diagnostic)

    if route is RieszRoute.BRUTE_FORCE:
        _, lower, upper = brute_gram(system)
    else:
        _, fibers = gw_fibers(system) if route is RieszRoute.FOURIER_WIGNER else gram_fibers(system)
        eigenvalues = np.linalg.eigvalsh(fibers)
        lower, upper = float(eigenvalues[:, 0].min()), float(eigenvalues[:, -1].max())
    lower = max(lower, 0.0)

    threshold = RIESZ_RELATIVE_TOL * upper if tol is None else tol
    is_riesz = upper > 0 and lower > threshold
    diagnostic = "" if is_riesz else f"lower Riesz bound {lower:.3e} is not above {threshold:.3e}"
    logger.info("Riesz check (%s): m=%.6g M=%.6g riesz=%s", route.value, lower, upper, is_riesz)
    return RieszReport(is_riesz, lower, upper, route, diagnostic)


def coefficients(system: GeneratorSystem, T: HsOperator, tol: Optional[float] = None) -> CoefArray:
    """
    The unique c with synthesize(c) equal to the orthogonal projection of T onto V_S^2,
    solved fiber by fiber.
    """
    report = riesz_check(system, tol)
    if not report.is_riesz:
        raise NotRieszError(f"cannot recover coefficients: {report.diagnostic}",
                            report.lower, report.upper)
    transversal, fibers = gram_fibers(system)
    lattice = system.lattice
    # b_n(lambda) = <T, alpha_lambda(S_n)>; in the Fourier domain b^ = G^(xi)^T c^
    b = np.einsum("ij,nlij->nl", T.kernel, translates(system).conj())
    E = phase_space_service.character_matrix(lattice, *transversal.coords)
    b_hat = b @ E.T
    c_hat = np.linalg.solve(np.transpose(fibers, (0, 2, 1)), b_hat.T[:, :, None])[:, :, 0]
    c = np.stack([phase_space_service.inv_symp_fourier(DualSeq(transversal, c_hat[:, n])).values
                  for n in range(system.N)])
    return CoefArray(lattice, c)
