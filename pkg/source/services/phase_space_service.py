"""
Service layer for the finite phase space Z_L x Z_L.
Lattices, annihilators, dual transversals, symplectic Fourier series
and convolution over a lattice.
"""
import logging
from collections import deque
from typing import Iterable, List, Tuple, Union

import numpy as np

from source.errors import ConfigurationError, InvalidDescriptorError
from source.models.phase_space import (
    DescriptorKind,
    DualSeq,
    DualTransversal,
    Lattice,
    LatticeDescriptor,
    LatticeSeq,
    PhasePoint,
    PhaseSpace,
)

logger = logging.getLogger(__name__)


def symplectic_form(z: PhasePoint, z_prime: PhasePoint, L: int) -> int:
    """
    sigma(z, z') = w*x' - w'*x mod L.
    """
    if z.modulus != L or z_prime.modulus != L:
        raise ConfigurationError(
            f"symplectic form on Z_{L} called with points mod {z.modulus} and {z_prime.modulus}")
    return (z.w * z_prime.x - z_prime.w * z.x) % L


def _symplectic_table(xs_a, ws_a, xs_b, ws_b, L: int) -> np.ndarray:
    """table[i, j] = sigma(a_i, b_j) mod L, integer arithmetic."""
    return (np.outer(ws_a, xs_b) - np.outer(xs_a, ws_b)) % L


def build_lattice(descriptor: Union[LatticeDescriptor, Tuple[int, int]], space: PhaseSpace) -> Lattice:
    """
    Instantiates a lattice from a separable pair (a, b) or a generator list.
    Elements come out in lexicographic order of (x, w).
    """
    if isinstance(descriptor, tuple):
        descriptor = LatticeDescriptor.separable(*descriptor)
    L = space.modulus

    if descriptor.kind is DescriptorKind.SEPARABLE:
        a, b = descriptor.a, descriptor.b
        if not a or not b or a < 0 or b < 0 or L % a or L % b:
            raise InvalidDescriptorError(f"separable lattice needs a|L and b|L, got a={a}, b={b}, L={L}")
        points = [space.point(x, w) for x in range(0, L, a) for w in range(0, L, b)]
        return Lattice(space, tuple(points), descriptor)

    for g in descriptor.generators:
        if len(g) != 2 or not all(0 <= c < L for c in g):
            raise InvalidDescriptorError(f"generator {g} is not a point of Z_{L} x Z_{L}")
    gens = [space.point(*g) for g in descriptor.generators]

    # Closure under addition; finite group so this is the generated subgroup.
    origin = space.point(0, 0)
    seen = {origin.as_tuple()}
    queue = deque([origin])
    while queue:
        p = queue.popleft()
        for g in gens:
            q = p + g
            if q.as_tuple() not in seen:
                seen.add(q.as_tuple())
                queue.append(q)
    points = tuple(space.point(x, w) for x, w in sorted(seen))
    logger.debug("generated lattice of order %d in Z_%d^2", len(points), L)
    return Lattice(space, points, descriptor)


def annihilator(lattice: Lattice) -> Lattice:
    """
    All mu with sigma(mu, lambda) = 0 mod L for every lambda in the lattice,
    found by testing every one of the L^2 candidates.
    """
    space = lattice.space
    L = space.modulus
    cand_x, cand_w = space.grid()
    xs, ws = lattice.coords
    table = _symplectic_table(cand_x, cand_w, xs, ws, L)
    hits = np.flatnonzero(~table.any(axis=1))
    points = tuple(space.point(int(cand_x[k]), int(cand_w[k])) for k in hits)
    descriptor = LatticeDescriptor.generated(p.as_tuple() for p in points)
    logger.debug("annihilator of a lattice of order %d has order %d", len(lattice), len(points))
    return Lattice(space, points, descriptor)


def coset_representatives(group: Iterable[PhasePoint], subgroup: Lattice) -> List[PhasePoint]:
    """
    Smallest (lexicographic) representative of each coset of subgroup
    met while walking group in lexicographic order.
    """
    covered = set()
    reps = []
    for p in sorted(group):
        if p.as_tuple() in covered:
            continue
        reps.append(p)
        covered.update((p + q).as_tuple() for q in subgroup)
    return reps


def dual_transversal(lattice: Lattice) -> DualTransversal:
    """
    One representative per coset of the annihilator in Z_L x Z_L.
    There are exactly |Lambda| of them.
    """
    ann = annihilator(lattice)
    reps = coset_representatives(lattice.space.points(), ann)
    if len(reps) != len(lattice):
        raise ConfigurationError(
            f"transversal has {len(reps)} points but the lattice has {len(lattice)} elements")
    return DualTransversal(lattice, ann, tuple(reps))


def character_matrix(lattice: Lattice, xs: np.ndarray, ws: np.ndarray) -> np.ndarray:
    """E[k, i] = exp(2 pi i sigma(lambda_i, xi_k) / L) for the points xi_k = (xs[k], ws[k])."""
    L = lattice.modulus
    lx, lw = lattice.coords
    phase = _symplectic_table(lx, lw, np.asarray(xs), np.asarray(ws), L).T
    return np.exp(2j * np.pi * phase / L)


def symp_fourier(c: LatticeSeq, transversal: DualTransversal = None) -> DualSeq:
    """
    F(c)(xi) = sum_lambda c(lambda) exp(2 pi i sigma(lambda, xi) / L), no prefactor.
    """
    if transversal is None:
        transversal = dual_transversal(c.lattice)
    E = character_matrix(c.lattice, *transversal.coords)
    return DualSeq(transversal, E @ c.values)


def symp_fourier_at(c: LatticeSeq, xi: PhasePoint) -> complex:
    """Evaluates the symplectic Fourier series at any point of Z_L x Z_L."""
    E = character_matrix(c.lattice, np.array([xi.x]), np.array([xi.w]))
    return complex((E @ c.values)[0])


def inv_symp_fourier(F: DualSeq) -> LatticeSeq:
    """
    c(lambda) = 1/|Lambda| sum_xi F(xi) exp(-2 pi i sigma(lambda, xi) / L).
    """
    transversal = F.transversal
    lattice = transversal.lattice
    E = character_matrix(lattice, *transversal.coords)
    return LatticeSeq(lattice, E.conj().T @ np.asarray(F.values) / len(lattice))


def lattice_convolve(c: LatticeSeq, d: LatticeSeq) -> LatticeSeq:
    """(c * d)(lambda) = sum_mu c(mu) d(lambda - mu), cyclic over the lattice."""
    if not c.lattice.same_elements(d.lattice):
        raise ConfigurationError("convolution of sequences on different lattices")
    lattice = c.lattice
    return LatticeSeq(lattice, d.values[lattice.difference_table] @ c.values)
