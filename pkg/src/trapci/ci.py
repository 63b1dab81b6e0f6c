"""Bosonic two-particle configuration interaction.

Builds symmetric-pair configurations Phi_ab = phi_a phi_b + phi_b phi_a
(unnormalized; the generalized eigenproblem absorbs normalization), assembles
the Hamiltonian and overlap in that space, and solves the generalized
symmetric eigenproblem by two independent routes.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as sla

from .errors import AssemblyError, EigensolverError
from .model import BasisSet, D_HO
from .twobody import IntegralTensor, quartet_flat_index


@dataclass(frozen=True)
class ConfigurationSpace:
    """All unordered primitive pairs (a <= b) of an n-orbital basis."""

    n_basis: int
    pairs: np.ndarray  # (n_cf, 2) int64

    @property
    def n_cf(self) -> int:
        return len(self.pairs)


def enumerate_configurations(n_basis: int) -> ConfigurationSpace:
    if n_basis < 1:
        raise AssemblyError("basis must contain at least one orbital")
    pairs = [(a, b) for a in range(n_basis) for b in range(a, n_basis)]
    return ConfigurationSpace(n_basis, np.array(pairs, dtype=np.int64))


@dataclass
class CiMatrices:
    """Overlap and Hamiltonian blocks over configurations.

    h_one is the one-body part of H and h_two the interaction part, kept
    separate because the interaction block is exactly linear in the potential
    depth; H = h_one + h_two.
    """

    overlap: np.ndarray
    h_one: np.ndarray
    h_two: np.ndarray

    @property
    def hamiltonian(self) -> np.ndarray:
        return self.h_one + self.h_two


def assemble(space: ConfigurationSpace, s: np.ndarray, h: np.ndarray,
             tensor: IntegralTensor | None) -> CiMatrices:
    """Assemble S and H over symmetric pair configurations.

    S_(ab,cd) = 2 (s_ac s_bd + s_ad s_bc)
    one-body  = 2 (h_ac s_bd + h_bd s_ac + h_ad s_bc + h_bc s_ad)
    two-body  = 2 (I_(ab,cd) + I_(ab,dc)), I in <a(1) b(2)|U|c(1) d(2)> order
    """
    n = space.n_basis
    if s.shape != (n, n) or h.shape != (n, n):
        raise AssemblyError("one-particle matrix dimensions do not match the basis")
    if tensor is not None and tensor.n_basis != n:
        raise AssemblyError(
            f"integral tensor built for {tensor.n_basis} orbitals, basis has {n}")
    A = space.pairs[:, 0]
    B = space.pairs[:, 1]
    a1, a2 = A[:, None], A[None, :]
    b1, b2 = B[:, None], B[None, :]
    s_ac, s_bd = s[a1, a2], s[b1, b2]
    s_ad, s_bc = s[a1, b2], s[b1, a2]
    S = 2.0 * (s_ac * s_bd + s_ad * s_bc)
    H1 = 2.0 * (h[a1, a2] * s_bd + h[b1, b2] * s_ac
                + h[a1, b2] * s_bc + h[b1, a2] * s_ad)
    if tensor is None:
        H2 = np.zeros_like(S)
    else:
        i_direct = tensor.values[quartet_flat_index(a1, b1, a2, b2, n)]
        i_cross = tensor.values[quartet_flat_index(a1, b1, b2, a2, n)]
        H2 = 2.0 * (i_direct + i_cross)
    return CiMatrices(S, H1, H2)


@dataclass
class CiSolution:
    """Eigenpairs of the generalized problem after linear-dependence pruning."""

    energies: np.ndarray              # ascending, canonical-orthogonalization route
    coefficients: np.ndarray          # (n_cf, kept) eigenvectors, S-orthonormal
    kept_dim: int
    n_cf: int
    overlap_spectrum: np.ndarray
    energies_congruence: np.ndarray | None = None
    cluster_id: np.ndarray = field(default_factory=lambda: np.array([], dtype=int))
    l_guess: np.ndarray = field(default_factory=lambda: np.array([], dtype=int))


def solve(matrices: CiMatrices, lindep_threshold: float = 3e-8,
          degeneracy_tol: float = 1e-4, both_routes: bool = True) -> CiSolution:
    """Solve H c = E S c by canonical orthogonalization.

    Overlap eigendirections below lindep_threshold (relative to the largest
    overlap eigenvalue) are discarded before the ordinary symmetric solve.
    A congruence route (triangular factorization of S, LAPACK *sygvd) is run
    alongside as an independent cross-check whenever S is numerically
    definite.
    """
    S = matrices.overlap
    H = matrices.hamiltonian
    w, U = sla.eigh(S)
    wmax = w[-1]
    if w[0] < -lindep_threshold * wmax:
        raise EigensolverError(
            f"overlap matrix is indefinite: eigenvalue {w[0]:.3e} "
            f"(largest {wmax:.3e})")
    keep = w > lindep_threshold * wmax
    X = U[:, keep] / np.sqrt(w[keep])
    Ht = X.T @ H @ X
    Ht = 0.5 * (Ht + Ht.T)
    evals, V = sla.eigh(Ht)
    C = X @ V
    # deterministic eigenvector signs: largest-magnitude component positive
    piv = np.argmax(np.abs(C), axis=0)
    signs = np.sign(C[piv, np.arange(C.shape[1])])
    signs[signs == 0] = 1.0
    C = C * signs

    # Independent congruence route on the same kept subspace: project H and S
    # onto the kept overlap eigenvectors, Jacobi-equilibrate to unit diagonal,
    # and hand the numerically definite pencil to the LAPACK generalized
    # driver (Cholesky congruence inside).
    evals2 = None
    if both_routes:
        Uk = U[:, keep]
        Sp = Uk.T @ S @ Uk
        Hp = Uk.T @ H @ Uk
        d = np.sqrt(np.diagonal(Sp))
        Sp = Sp / d[:, None] / d[None, :]
        Hp = Hp / d[:, None] / d[None, :]
        try:
            evals2 = sla.eigh(0.5 * (Hp + Hp.T), 0.5 * (Sp + Sp.T),
                              eigvals_only=True)
        except np.linalg.LinAlgError:
            evals2 = None

    sol = CiSolution(energies=evals, coefficients=C, kept_dim=int(keep.sum()),
                     n_cf=S.shape[0], overlap_spectrum=w,
                     energies_congruence=evals2)
    sol.cluster_id, sol.l_guess = classify_states(evals, degeneracy_tol)
    return sol


def classify_states(energies: np.ndarray, degeneracy_tol: float = 1e-4):
    """Cluster near-degenerate energies and guess total angular momentum.

    Multiplicities 1 / 3 / 5 map to L = 0 / 1 / 2; anything else (including
    the merged L=0+L=2 sextets of an isotropic spectrum) is left at -1.
    The labels are advisory metadata only.
    """
    energies = np.asarray(energies)
    cluster = np.zeros(len(energies), dtype=int)
    for i in range(1, len(energies)):
        cluster[i] = cluster[i - 1] + (energies[i] - energies[i - 1] > degeneracy_tol)
    l_guess = np.full(len(energies), -1, dtype=int)
    for cid in np.unique(cluster):
        size = int((cluster == cid).sum())
        l_guess[cluster == cid] = {1: 0, 3: 1, 5: 2}.get(size, -1)
    return cluster, l_guess


@dataclass
class DensityCut:
    """|Psi|^2 on the [z1, z2] plane through the origin (x = y = 0)."""

    z: np.ndarray          # grid in d_ho
    psi: np.ndarray        # (nz, nz) wavefunction cut, d_ho^-3 units
    density: np.ndarray    # psi^2
    diag: np.ndarray       # density along z1 = z2
    antidiag: np.ndarray   # density along z1 = -z2
    energy: float = 0.0


def _pair_coefficient_matrix(space: ConfigurationSpace, coeffs: np.ndarray) -> np.ndarray:
    n = space.n_basis
    mat = np.zeros((n, n))
    A, B = space.pairs[:, 0], space.pairs[:, 1]
    np.add.at(mat, (A, B), coeffs)
    np.add.at(mat, (B, A), coeffs)
    return mat


def evaluate_density_cut(solution: CiSolution, state: int, basis: BasisSet,
                         z_grid_dho: np.ndarray,
                         space: ConfigurationSpace | None = None) -> DensityCut:
    """Wavefunction and density of one eigenstate on the [z1, z2] cut.

    The global sign is fixed so the wavefunction maximum on the z1 = z2
    diagonal is positive; densities are reported in d_ho units.
    """
    if not 0 <= state < solution.coefficients.shape[1]:
        raise AssemblyError(
            f"state {state} outside the kept spectrum (0..{solution.coefficients.shape[1]-1})")
    if space is None:
        space = enumerate_configurations(basis.n)
    z_abs = np.asarray(z_grid_dho, dtype=float) * D_HO
    pts = np.zeros((len(z_abs), 3))
    pts[:, 2] = z_abs
    V = np.stack([p.value(pts) for p in basis.primitives])  # (n, nz)
    cmat = _pair_coefficient_matrix(space, solution.coefficients[:, state])
    psi = V.T @ cmat @ V
    dvals = np.diagonal(psi)
    pivot = np.argmax(np.abs(dvals))
    if dvals[pivot] < 0:
        psi = -psi
    psi = psi * D_HO ** 3  # absolute -> d_ho normalization
    density = psi * psi
    return DensityCut(z=np.asarray(z_grid_dho, dtype=float), psi=psi,
                      density=density, diag=np.diagonal(density).copy(),
                      antidiag=np.diagonal(np.fliplr(density)).copy(),
                      energy=float(solution.energies[state]))


def mixed_cut_in_cluster(solution: CiSolution, cluster_states, basis: BasisSet,
                         z_grid_dho: np.ndarray, space=None,
                         reference: np.ndarray | None = None) -> DensityCut:
    """Best cut representative of a (near-)degenerate cluster.

    Degenerate eigenvectors come out in arbitrary internal mixtures, so the
    cut of a single member can carry an arbitrary weight.  Within the cluster
    span this picks the unit-norm combination maximizing the cut norm, or,
    when a reference cut is supplied, the overlap with that reference.
    """
    cluster_states = list(cluster_states)
    cuts = [evaluate_density_cut(solution, s, basis, z_grid_dho, space)
            for s in cluster_states]
    P = np.stack([c.psi.ravel() for c in cuts])  # (k, nz*nz)
    if reference is not None:
        g = P @ reference.ravel()
        G = P @ P.T
        try:
            d = np.linalg.solve(G + 1e-12 * np.trace(G) * np.eye(len(G)), g)
        except np.linalg.LinAlgError:
            d = g
    else:
        G = P @ P.T
        _, vecs = np.linalg.eigh(G)
        d = vecs[:, -1]
    nrm = np.linalg.norm(d)
    if nrm == 0:
        d = np.ones(len(cluster_states))
        nrm = np.linalg.norm(d)
    d = d / nrm
    psi = np.tensordot(d, np.stack([c.psi for c in cuts]), axes=(0, 0))
    dvals = np.diagonal(psi)
    pivot = np.argmax(np.abs(dvals))
    if dvals[pivot] < 0:
        psi = -psi
    density = psi * psi
    energy = float(np.mean([c.energy for c in cuts]))
    return DensityCut(z=cuts[0].z, psi=psi, density=density,
                      diag=np.diagonal(density).copy(),
                      antidiag=np.diagonal(np.fliplr(density)).copy(),
                      energy=energy)
