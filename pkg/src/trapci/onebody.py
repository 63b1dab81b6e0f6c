"""One-particle integrals between Cartesian Gaussians.

Overlap, kinetic energy, harmonic-trap, and Gaussian-well matrix elements via
McMurchie-Davidson Hermite expansion coefficients.  All quantities are in
absolute units (hbar = m = omega = 1).
"""

from __future__ import annotations

import math

import numpy as np

from .model import BasisSet, GaussianWell, GtoPrimitive, TrapParams, D_HO


def hermite_coeffs(i: int, j: int, tau: float, chi: float, Ax: float, Bx: float) -> np.ndarray:
    """Expansion coefficients E^{ij}_t of a 1D Gaussian product over Hermite
    Gaussians Lambda_t(x; p, P) = (d/dP)^t exp(-p (x-P)^2).

    Seeded by E^{00}_0 = exp(-(tau chi / p)(Ax-Bx)^2) and built with the
    standard index-raising recurrences.  Returns the array over t = 0..i+j.
    """
    p = tau + chi
    Px = (tau * Ax + chi * Bx) / p
    pa = Px - Ax
    pb = Px - Bx
    inv2p = 1.0 / (2.0 * p)
    # E[ii][jj] is an array over t of length ii+jj+1
    E = [[None] * (j + 1) for _ in range(i + 1)]
    E[0][0] = np.array([math.exp(-(tau * chi / p) * (Ax - Bx) ** 2)])
    for ii in range(1, i + 1):
        prev = E[ii - 1][0]
        cur = np.zeros(ii + 1)
        cur[1:] += inv2p * prev
        cur[:-1] += pa * prev
        cur[:-2] += np.arange(1, ii) * prev[1:]
        E[ii][0] = cur
    for ii in range(i + 1):
        for jj in range(1, j + 1):
            prev = E[ii][jj - 1]
            n = ii + jj
            cur = np.zeros(n + 1)
            cur[1:] += inv2p * prev
            cur[:-1] += pb * prev
            cur[:-2] += np.arange(1, n) * prev[1:]
            E[ii][jj] = cur
    return E[i][j]


def _s1d(i: int, j: int, tau: float, chi: float, Ax: float, Bx: float) -> float:
    """Unnormalized 1D overlap of x_A^i e^(-tau x_A^2) with x_B^j e^(-chi x_B^2)."""
    if i < 0 or j < 0:
        return 0.0
    p = tau + chi
    return hermite_coeffs(i, j, tau, chi, Ax, Bx)[0] * math.sqrt(math.pi / p)


def overlap(a: GtoPrimitive, b: GtoPrimitive) -> float:
    sx = _s1d(a.i, b.i, a.tau, b.tau, a.center[0], b.center[0])
    sy = _s1d(a.k, b.k, a.tau, b.tau, a.center[1], b.center[1])
    sz = _s1d(a.m, b.m, a.tau, b.tau, a.center[2], b.center[2])
    return a.norm * b.norm * sx * sy * sz


def _t1d(i: int, j: int, tau: float, chi: float, Ax: float, Bx: float) -> float:
    """<x_A^i e^(-tau x_A^2) | d^2/dx^2 | x_B^j e^(-chi x_B^2)> unnormalized.

    The second derivative of a Cartesian Gaussian is a combination of
    power-shifted Gaussians: j(j-1) x^(j-2) - 2 chi (2j+1) x^j + 4 chi^2 x^(j+2).
    """
    val = -2.0 * chi * (2 * j + 1) * _s1d(i, j, tau, chi, Ax, Bx)
    val += 4.0 * chi * chi * _s1d(i, j + 2, tau, chi, Ax, Bx)
    if j >= 2:
        val += j * (j - 1) * _s1d(i, j - 2, tau, chi, Ax, Bx)
    return val


def kinetic(a: GtoPrimitive, b: GtoPrimitive) -> float:
    """<a| -(1/2) nabla^2 |b> (hbar = m = 1)."""
    sx = _s1d(a.i, b.i, a.tau, b.tau, a.center[0], b.center[0])
    sy = _s1d(a.k, b.k, a.tau, b.tau, a.center[1], b.center[1])
    sz = _s1d(a.m, b.m, a.tau, b.tau, a.center[2], b.center[2])
    tx = _t1d(a.i, b.i, a.tau, b.tau, a.center[0], b.center[0])
    ty = _t1d(a.k, b.k, a.tau, b.tau, a.center[1], b.center[1])
    tz = _t1d(a.m, b.m, a.tau, b.tau, a.center[2], b.center[2])
    return -0.5 * a.norm * b.norm * (tx * sy * sz + sx * ty * sz + sx * sy * tz)


def _x2_1d(i: int, j: int, tau: float, chi: float, Ax: float, Bx: float) -> float:
    """<i| x^2 |j> unnormalized, expanding x^2 = (x_B + Bx)^2."""
    return (_s1d(i, j + 2, tau, chi, Ax, Bx)
            + 2.0 * Bx * _s1d(i, j + 1, tau, chi, Ax, Bx)
            + Bx * Bx * _s1d(i, j, tau, chi, Ax, Bx))


def trap_harmonic(a: GtoPrimitive, b: GtoPrimitive, omega: float = 1.0) -> float:
    """<a| (1/2) m omega^2 r^2 |b> (m = 1)."""
    sx = _s1d(a.i, b.i, a.tau, b.tau, a.center[0], b.center[0])
    sy = _s1d(a.k, b.k, a.tau, b.tau, a.center[1], b.center[1])
    sz = _s1d(a.m, b.m, a.tau, b.tau, a.center[2], b.center[2])
    x2 = _x2_1d(a.i, b.i, a.tau, b.tau, a.center[0], b.center[0])
    y2 = _x2_1d(a.k, b.k, a.tau, b.tau, a.center[1], b.center[1])
    z2 = _x2_1d(a.m, b.m, a.tau, b.tau, a.center[2], b.center[2])
    return 0.5 * omega * omega * a.norm * b.norm * (x2 * sy * sz + sx * y2 * sz + sx * sy * z2)


def _hermite_values(nmax: int, z: float) -> np.ndarray:
    """Physicists' Hermite polynomials H_0..H_nmax at z."""
    H = np.empty(nmax + 1)
    H[0] = 1.0
    if nmax >= 1:
        H[1] = 2.0 * z
    for n in range(1, nmax):
        H[n + 1] = 2.0 * z * H[n] - 2.0 * n * H[n - 1]
    return H


def _well_1d(i: int, j: int, tau: float, chi: float, Ax: float, Bx: float,
             g: float, cx: float) -> float:
    """1D three-Gaussian overlap: pair (i,j) against exp(-g (x - cx)^2).

    Expands the pair over Hermite Gaussians; each Lambda_t integrates against
    the well Gaussian to the t-th derivative (in the pair center P) of
    sqrt(pi/(p+g)) exp(-kappa (P-cx)^2) with kappa = p g / (p+g).
    """
    p = tau + chi
    Px = (tau * Ax + chi * Bx) / p
    kappa = p * g / (p + g)
    E = hermite_coeffs(i, j, tau, chi, Ax, Bx)
    z = math.sqrt(kappa) * (Px - cx)
    H = _hermite_values(len(E) - 1, z)
    t = np.arange(len(E))
    derivs = ((-1.0) ** t) * kappa ** (t / 2.0) * H * math.exp(-kappa * (Px - cx) ** 2)
    return math.sqrt(math.pi / (p + g)) * float(np.dot(E, derivs))


def trap_gaussian_well(a: GtoPrimitive, b: GtoPrimitive, well: GaussianWell) -> float:
    """<a| -depth exp(-(r-c)^2 / (2 width^2)) |b>, well given in d_ho units."""
    g = 1.0 / (2.0 * (well.width * D_HO) ** 2)
    c = tuple(ci * D_HO for ci in well.center)
    vx = _well_1d(a.i, b.i, a.tau, b.tau, a.center[0], b.center[0], g, c[0])
    vy = _well_1d(a.k, b.k, a.tau, b.tau, a.center[1], b.center[1], g, c[1])
    vz = _well_1d(a.m, b.m, a.tau, b.tau, a.center[2], b.center[2], g, c[2])
    return -well.depth * a.norm * b.norm * vx * vy * vz


def trap_potential(a: GtoPrimitive, b: GtoPrimitive, trap: TrapParams) -> float:
    if trap.kind == "harmonic_isotropic":
        return trap_harmonic(a, b, trap.omega)
    return sum(trap_gaussian_well(a, b, w) for w in trap.wells)


def _pair_matrix(basis: BasisSet, func) -> np.ndarray:
    n = basis.n
    out = np.empty((n, n))
    for ia, pa in enumerate(basis.primitives):
        for ib in range(ia, n):
            val = func(pa, basis.primitives[ib])
            out[ia, ib] = val
            out[ib, ia] = val
    return out


def overlap_matrix(basis: BasisSet) -> np.ndarray:
    return _pair_matrix(basis, overlap)


def kinetic_matrix(basis: BasisSet) -> np.ndarray:
    return _pair_matrix(basis, kinetic)


def trap_matrix(basis: BasisSet, trap: TrapParams) -> np.ndarray:
    return _pair_matrix(basis, lambda a, b: trap_potential(a, b, trap))


def core_hamiltonian(basis: BasisSet, trap: TrapParams) -> np.ndarray:
    """h = kinetic + trap, the one-particle Hamiltonian matrix."""
    return kinetic_matrix(basis) + trap_matrix(basis, trap)
