"""
Service layer for sampling operators in V_S^2.
Diagonal channel and average samples, the channel matrix, the transfer
matrix and its frame bounds, left inverses, reconstruction kits, the
sampling formula and sub-lattice inflation.
"""
import logging
from typing import Optional, Tuple

import numpy as np

from source.errors import ConfigurationError, NotAFrameError, NotRieszError
from source.models.generator_system import CoefArray, GeneratorSystem
from source.models.operator import HsOperator
from source.models.phase_space import Lattice, LatticeSeq, PhaseSpace
from source.models.sampling import (
    CrossSeqMatrix,
    FrameBounds,
    ReconstructionKit,
    SampleSet,
    SamplingScheme,
    SchemeKind,
    SymbolRoute,
    TransferMatrix,
)
from source.models.signal import PhaseFn, Signal
from source.services import operator_service, phase_space_service, shift_invariant_service, timefreq_service

logger = logging.getLogger(__name__)

PINV_RCOND = 1e-10
FRAME_RELATIVE_TOL = 1e-10


def _check_lattice(lattice: Lattice, L: int):
    if lattice.modulus != L:
        raise ConfigurationError(f"lattice lives in Z_{lattice.modulus}, operators have size {L}")


def diag_channel_samples(T: HsOperator, scheme: SamplingScheme, lattice: Lattice) -> SampleSet:
    """
    s_{T,m}(lambda) = <alpha_{-lambda}(T) g_m, g~_m> for every lambda and m.
    """
    scheme.require_windows()
    _check_lattice(lattice, T.L)
    values = np.zeros((scheme.M, len(lattice)), dtype=complex)
    for i, lam in enumerate(lattice):
        shifted = operator_service.op_translate(-lam, T).kernel
        for m, (g, g_dual) in enumerate(scheme.windows):
            values[m, i] = np.vdot(g_dual.samples, shifted @ g.samples)
    return SampleSet(lattice, values)


def avg_samples(T: HsOperator, scheme: SamplingScheme, lattice: Lattice) -> SampleSet:
    """
    s_{T,m}(lambda) = <T, alpha_lambda(Q_m)>_HS; window pairs use Q_m = g~_m (x) g_m.
    """
    _check_lattice(lattice, T.L)
    values = np.stack([
        np.einsum("ij,lij->l", T.kernel, operator_service.translate_all(lattice.elements, Q).conj())
        for Q in scheme.average_operators()
    ])
    return SampleSet(lattice, values)


def sample(T: HsOperator, scheme: SamplingScheme, lattice: Lattice) -> SampleSet:
    """Samples appropriate for the scheme kind."""
    if scheme.kind is SchemeKind.WINDOWS:
        return diag_channel_samples(T, scheme, lattice)
    return avg_samples(T, scheme, lattice)


def channel_matrix(H: HsOperator, g: Signal, g_dual: Signal, lattice: Lattice) -> np.ndarray:
    """a[lambda, mu] = <H pi(mu) g, pi(lambda) g~>, canonical lattice order on both axes."""
    _check_lattice(lattice, H.L)
    shifted = timefreq_service.shifted_windows(g, lattice.elements)
    shifted_dual = timefreq_service.shifted_windows(g_dual, lattice.elements)
    return shifted_dual.conj().T @ H.kernel @ shifted


def berezin(T: HsOperator, g: Signal, g_dual: Signal) -> PhaseFn:
    """B T(z) = <T pi(z) g, pi(z) g~> at every z in Z_L x Z_L."""
    L = T.L
    values = np.zeros((L, L), dtype=complex)
    for z in PhaseSpace(L).points():
        values[z.x, z.w] = np.vdot(timefreq_service.tf_shift(z, g_dual).samples,
                                   T.kernel @ timefreq_service.tf_shift(z, g).samples)
    return PhaseFn(values)


def cross_seq(system: GeneratorSystem, scheme: SamplingScheme) -> CrossSeqMatrix:
    """
    a_{m,n} = samples of the generator S_n in channel m.
    Equivalently a_{m,n}(mu) = <S_n, alpha_mu(Q_m)>_HS.
    """
    values = np.stack([sample(S, scheme, system.lattice).values for S in system.generators], axis=1)
    return CrossSeqMatrix(system.lattice, values)


def symbol_cross_seq(system: GeneratorSystem, scheme: SamplingScheme,
                     route: SymbolRoute = SymbolRoute.KOHN_NIRENBERG) -> CrossSeqMatrix:
    """
    a_{m,n}(mu) = <sym(S_n), T_mu sym(Q_m)> with sym the Kohn-Nirenberg
    or (odd L) Weyl symbol.
    """
    symbol = operator_service.weyl_symbol if route is SymbolRoute.WEYL else operator_service.kn_symbol
    gen_symbols = [symbol(S) for S in system.generators]
    avg_symbols = [symbol(Q) for Q in scheme.average_operators()]
    lattice = system.lattice
    values = np.zeros((scheme.M, system.N, len(lattice)), dtype=complex)
    for i, mu in enumerate(lattice):
        for m, q in enumerate(avg_symbols):
            shifted = q.translate(mu.x, mu.w)
            for n, s in enumerate(gen_symbols):
                values[m, n, i] = s.inner(shifted)
    return CrossSeqMatrix(lattice, values)


def involution(a: LatticeSeq) -> LatticeSeq:
    """a*(lambda) = conj(a(-lambda))."""
    lattice = a.lattice
    negated = [lattice.index[(-p).as_tuple()] for p in lattice]
    return LatticeSeq(lattice, a.values[negated].conj())


def convolve_system(A: CrossSeqMatrix, c: CoefArray) -> SampleSet:
    """(A * c)_m = sum_n a_{m,n} * c_n."""
    table = A.lattice.difference_table
    values = np.einsum("mnij,nj->mi", A.values[:, :, table], c.values)
    return SampleSet(A.lattice, values)


def convolution_system_matrix(A: CrossSeqMatrix) -> np.ndarray:
    """
    The (M |Lambda|) x (N |Lambda|) matrix of c -> A * c, both sides ordered
    component-major. Its squared singular values are bounded by alpha_A and beta_A.
    """
    table = A.lattice.difference_table
    blocks = A.values[:, :, table]  # (M, N, |Lambda|, |Lambda|)
    M, N, size, _ = blocks.shape
    return blocks.transpose(0, 2, 1, 3).reshape(M * size, N * size)


def transfer_matrix(A: CrossSeqMatrix, transversal=None) -> TransferMatrix:
    """A^(xi)[m, n] = F(a_{m,n})(xi) on the dual transversal."""
    if transversal is None:
        transversal = shift_invariant_service.transversal_of(A.lattice)
    E = phase_space_service.character_matrix(A.lattice, *transversal.coords)
    fibers = np.einsum("kl,mnl->kmn", E, A.values)
    return TransferMatrix(transversal, fibers)


def frame_bounds(transfer: TransferMatrix) -> FrameBounds:
    """
    alpha_A = min_xi lambda_min(A^* A^), beta_A = max_xi lambda_max(A^* A^).
    """
    gram = np.conj(np.transpose(transfer.fibers, (0, 2, 1))) @ transfer.fibers
    eigenvalues = np.linalg.eigvalsh(gram)
    beta = float(eigenvalues[:, -1].max())
    if transfer.M < transfer.N:
        return FrameBounds(0.0, beta, f"rank deficient: M<N (M={transfer.M}, N={transfer.N})")
    alpha = max(float(eigenvalues[:, 0].min()), 0.0)
    return FrameBounds(alpha, beta)


def determinant_bounds(transfer: TransferMatrix) -> Tuple[float, float]:
    """inf and sup of |det A^(xi)| for a square transfer matrix."""
    if transfer.M != transfer.N:
        raise ConfigurationError(f"determinant bounds need M = N, got M={transfer.M}, N={transfer.N}")
    dets = np.abs(np.linalg.det(transfer.fibers))
    return float(dets.min()), float(dets.max())


def is_frame(bounds: FrameBounds, tol: Optional[float] = None) -> bool:
    """alpha_A above tol, or above 1e-10 * beta_A when no tol is given."""
    threshold = FRAME_RELATIVE_TOL * bounds.beta_a if tol is None else tol
    return bounds.beta_a > 0 and bounds.alpha_a > threshold


def dual_left_inverse(transfer: TransferMatrix, C: Optional[np.ndarray] = None,
                      tol: Optional[float] = None) -> np.ndarray:
    """
    B^(xi) = A^(xi)^+ + C(xi) [I_M - A^(xi) A^(xi)^+], A^+ the Moore-Penrose
    pseudo-inverse (singular values below 1e-10 * max discarded).
    C has shape (|Lambda|, N, M) or (N, M); absent means C = 0.
    """
    bounds = frame_bounds(transfer)
    if not is_frame(bounds, tol):
        raise NotAFrameError(
            f"no left inverse: alpha_A = {bounds.alpha_a:.3e} {bounds.diagnostic}".strip(),
            bounds.alpha_a, bounds.beta_a)
    A = transfer.fibers
    pinv = np.linalg.pinv(A, rcond=PINV_RCOND)
    if C is None:
        return pinv
    C = np.broadcast_to(np.asarray(C, dtype=complex), pinv.shape)
    residual = np.eye(transfer.M) - A @ pinv
    return pinv + C @ residual


def reconstruction_kit(system: GeneratorSystem, scheme: SamplingScheme,
                       C: Optional[np.ndarray] = None, tol: Optional[float] = None,
                       frame_tol: Optional[float] = None) -> ReconstructionKit:
    """
    H_m = sum_n sum_lambda b_{n,m}(lambda) alpha_lambda(S_n), with b the
    inverse symplectic Fourier transform of the dual fibers.
    """
    report = shift_invariant_service.riesz_check(system, tol)
    if not report.is_riesz:
        raise NotRieszError(f"generators are not a Riesz sequence: {report.diagnostic}",
                            report.lower, report.upper)
    transfer = transfer_matrix(cross_seq(system, scheme))
    bounds = frame_bounds(transfer)
    dual = dual_left_inverse(transfer, C, frame_tol)

    transversal = transfer.transversal
    lattice = system.lattice
    E = phase_space_service.character_matrix(lattice, *transversal.coords)
    # b[n, m, :] = inverse transform of B^[:, n, m]
    b = np.einsum("kl,knm->nml", E.conj(), dual) / len(lattice)
    stack = shift_invariant_service.translates(system)
    recon_ops = tuple(HsOperator(np.einsum("nl,nlij->ij", b[:, m, :], stack)) for m in range(scheme.M))
    logger.info("reconstruction kit: M=%d N=%d alpha_A=%.6g beta_A=%.6g",
                scheme.M, system.N, bounds.alpha_a, bounds.beta_a)
    return ReconstructionKit(system, transfer, bounds.alpha_a, bounds.beta_a, dual, b, recon_ops,
                             None if C is None else np.asarray(C))


def reconstruct(samples: SampleSet, kit: ReconstructionKit) -> HsOperator:
    """T = sum_m sum_lambda s_{T,m}(lambda) alpha_lambda(H_m)."""
    if samples.M != kit.M or not samples.lattice.same_elements(kit.lattice):
        raise ConfigurationError("samples do not match the reconstruction kit")
    lattice = kit.lattice
    kernel = np.zeros((kit.system.L, kit.system.L), dtype=complex)
    for m, H in enumerate(kit.recon_ops):
        kernel += np.tensordot(samples.values[m], operator_service.translate_all(lattice.elements, H), axes=1)
    return HsOperator(kernel)


def coefficient_frame_expansion(samples: SampleSet, kit: ReconstructionKit) -> CoefArray:
    """c_n = sum_m s_m * b_{n,m} in l^2_N(Lambda)."""
    if samples.M != kit.M or not samples.lattice.same_elements(kit.lattice):
        raise ConfigurationError("samples do not match the reconstruction kit")
    table = kit.lattice.difference_table
    # c_n(i) = sum_m sum_j s_m(j) b_{n,m}(i - j)
    values = np.einsum("nmij,mj->ni", kit.b[:, :, table], samples.values)
    return CoefArray(kit.lattice, values)


def sample_norm(samples: SampleSet) -> float:
    return float(np.sqrt(samples.norm_sq()))


def norm_equivalence(system: GeneratorSystem, scheme: SamplingScheme) -> Tuple[float, float]:
    """
    Constants (k, K) with k ||T||^2 <= ||s_T||^2 <= K ||T||^2 on V_S^2:
    k = alpha_A / M_R, K = beta_A / m_R.
    """
    report = shift_invariant_service.riesz_check(system)
    if not report.is_riesz:
        raise NotRieszError("norm equivalence needs a Riesz system", report.lower, report.upper)
    bounds = frame_bounds(transfer_matrix(cross_seq(system, scheme)))
    return bounds.alpha_a / report.upper, bounds.beta_a / report.lower


def sublattice_inflate(system: GeneratorSystem, sublattice: Lattice) -> Tuple[GeneratorSystem, Tuple]:
    """
    Rewrites V_S^2 over a sub-lattice: generators S_{nl} = alpha_{lambda_l}(S_n)
    (n-major, l-minor) for the canonical coset representatives lambda_l.
    Returns the pair (inflated system, representatives): the representatives
    are the ones coset_representatives gives for (system lattice, sub-lattice)
    and inflate_coefficients needs them to map coefficients over.
    """
    lattice = system.lattice
    if not sublattice.is_subgroup_of(lattice):
        raise ConfigurationError("the sub-lattice is not a subgroup of the system lattice")
    reps = tuple(phase_space_service.coset_representatives(lattice.elements, sublattice))
    generators = [operator_service.op_translate(rep, S) for S in system.generators for rep in reps]
    logger.debug("inflated N=%d over index-%d sub-lattice to %d generators",
                 system.N, len(reps), len(generators))
    return GeneratorSystem(sublattice, tuple(generators)), reps


def inflate_coefficients(c: CoefArray, sublattice: Lattice, reps) -> CoefArray:
    """c_{nl}(mu) = c_n(lambda_l + mu), n-major, l-minor."""
    lattice = c.lattice
    rows = []
    for n in range(c.N):
        for rep in reps:
            idx = [lattice.index[(rep + mu).as_tuple()] for mu in sublattice]
            rows.append(c.values[n, idx])
    return CoefArray(sublattice, np.stack(rows))
