"""Quasi-exact reference physics for the trapped interacting pair.

The harmonic trap separates exactly into center-of-mass and relative motion,
so quasi-exact two-particle spectra follow from a one-dimensional radial
problem for the relative coordinate (finite differences with Richardson
extrapolation) composed with analytic center-of-mass oscillator levels.
Also provides the free-space s-wave scattering length by zero-energy Numerov
integration and the potential depths where it diverges.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import eigh_tridiagonal

from .errors import ConvergenceError, InvalidParameterError
from .model import D_HO, HBAR, MorseParams, OMEGA, REDUCED_MASS, morse_value_abs


@dataclass(frozen=True)
class RadialProblem:
    """Relative-motion radial equation setup (absolute units)."""

    morse: MorseParams
    ell: int = 0
    trapped: bool = True
    r_max: float = 12.0 * D_HO
    n_points: int = 20000

    def __post_init__(self):
        if self.ell < 0:
            raise InvalidParameterError("partial wave must be >= 0")
        if self.n_points < 5000:
            raise InvalidParameterError("radial grid needs at least 5000 points")
        if self.trapped and self.r_max < 10.0 * D_HO:
            raise InvalidParameterError("trapped spectra need r_max >= 10 d_ho")

    def potential(self, r: np.ndarray) -> np.ndarray:
        v = morse_value_abs(self.morse, r)
        if self.trapped:
            v = v + 0.5 * REDUCED_MASS * OMEGA ** 2 * r * r
        if self.ell:
            v = v + self.ell * (self.ell + 1) * HBAR ** 2 / (2.0 * REDUCED_MASS * r * r)
        return v


def _fd_levels(problem: RadialProblem, n_states: int, n_points: int) -> np.ndarray:
    h = problem.r_max / (n_points + 1)
    r = np.arange(1, n_points + 1) * h
    kin = HBAR ** 2 / (2.0 * REDUCED_MASS)
    diag = 2.0 * kin / (h * h) + problem.potential(r)
    off = np.full(n_points - 1, -kin / (h * h))
    vals = eigh_tridiagonal(diag, off, select="i",
                            select_range=(0, n_states - 1),
                            eigvals_only=True)
    return vals


def radial_spectrum(problem: RadialProblem, n_states: int = 6,
                    tol: float = 1e-5) -> np.ndarray:
    """Lowest relative-motion eigenvalues, Richardson-extrapolated in h^2.

    The grid is doubled (at most twice) until halving the step moves no
    requested level by more than tol; failing that, raises with the observed
    shift.
    """
    n = problem.n_points
    coarse = _fd_levels(problem, n_states, n // 2)
    for _ in range(3):
        fine = _fd_levels(problem, n_states, n)
        correction = (fine - coarse) / 3.0
        if np.max(np.abs(correction)) <= tol:
            return fine + correction
        coarse, n = fine, 2 * n
    raise ConvergenceError(
        "radial grid not converged: refine n_points",
        worst_shift=float(np.max(np.abs(correction))), n_points=n)


def radial_wavefunction(problem: RadialProblem, state: int = 0):
    """(r, u) of one radial eigenstate, normalized to int u^2 dr = 1."""
    n_points = problem.n_points
    h = problem.r_max / (n_points + 1)
    r = np.arange(1, n_points + 1) * h
    kin = HBAR ** 2 / (2.0 * REDUCED_MASS)
    diag = 2.0 * kin / (h * h) + problem.potential(r)
    off = np.full(n_points - 1, -kin / (h * h))
    vals, vecs = eigh_tridiagonal(diag, off, select="i",
                                  select_range=(state, state))
    u = vecs[:, 0]
    u = u / math.sqrt(np.sum(u * u) * h)
    imax = np.argmax(np.abs(u))
    if u[imax] < 0:
        u = -u
    return r, u, float(vals[0])


# -- scattering ---------------------------------------------------------------

@dataclass(frozen=True)
class ScatteringResult:
    as_dho: float
    De: float
    converged: bool
    match_radius: float


def _numerov_zero_energy(morse: MorseParams, r_max: float, h: float):
    """Outward Numerov integration of u'' = (2 mu / hbar^2) U(r) u at E = 0."""
    n = int(round(r_max / h))
    r = np.arange(1, n + 1) * h
    w = (2.0 * REDUCED_MASS / HBAR ** 2) * morse_value_abs(morse, r)
    f = 1.0 - (h * h / 12.0) * w
    u = np.empty(n)
    u[0] = h
    u[1] = (2.0 * (1.0 + 5.0 * h * h * w[0] / 12.0) * u[0]) / f[1]
    fu = f * u
    for i in range(1, n - 1):
        fu[i + 1] = (12.0 - 10.0 * f[i]) * u[i] - fu[i - 1]
        u[i + 1] = fu[i + 1] / f[i + 1]
    return r, u


def scattering_length(morse: MorseParams, r_max: float = 10.0,
                      h: float = 2.5e-4, pole_cut: float = 1e4) -> ScatteringResult:
    """s-wave scattering length from the zero-energy radial solution.

    Outside the potential u is exactly proportional to (r - a_s); a_s is read
    off a straight line through two matching radii beyond the Morse range.
    Result in d_ho.
    """
    if morse.De == 0:
        return ScatteringResult(0.0, 0.0, True, r_max)
    r, u = _numerov_zero_energy(morse, r_max, h)
    i2 = len(r) - 5
    i1 = int(len(r) * 0.85)
    tail = abs(morse_value_abs(morse, r[i1]))
    if tail > 1e-9 * morse.De:
        raise InvalidParameterError(
            f"matching radius {r[i1]:.2f} still inside the potential "
            f"(|U| = {tail:.2e})")
    slope = (u[i2] - u[i1]) / (r[i2] - r[i1])
    a_abs = r[i1] - u[i1] / slope
    a_dho = a_abs / D_HO
    return ScatteringResult(a_dho, morse.De, abs(a_dho) <= pole_cut, r[i1])


def _inv_as(de: float, rm: float, am: float) -> float:
    res = scattering_length(MorseParams(de, rm, am))
    return 1.0 / res.as_dho


def pole_positions(de_min: float, de_max: float, rm: float, am: float,
                   n_scan: int = 240, tol: float = 1e-4) -> list[float]:
    """Potential depths where the scattering length diverges.

    Scans 1/a_s(De) for sign changes with bounded magnitude on both sides
    (unbounded sign flips are zeros of a_s, not poles) and bisects each
    bracket.  Returns [] when the range contains no pole.
    """
    if not (0 <= de_min < de_max):
        raise InvalidParameterError("need 0 <= de_min < de_max")
    grid = np.linspace(max(de_min, 1e-3), de_max, n_scan)
    vals = np.array([_inv_as(d, rm, am) for d in grid])
    poles = []
    for i in range(len(grid) - 1):
        a, b = vals[i], vals[i + 1]
        if a == 0.0 or b == 0.0 or np.sign(a) == np.sign(b):
            continue
        lo, hi = grid[i], grid[i + 1]
        flo, froot = a, a
        while hi - lo > tol:
            mid = 0.5 * (lo + hi)
            froot = _inv_as(mid, rm, am)
            if froot == 0.0:
                lo = hi = mid
                break
            if np.sign(froot) == np.sign(flo):
                lo, flo = mid, froot
            else:
                hi = mid
        # 1/a_s passes through zero at a pole of a_s but through +-inf where
        # a_s itself crosses zero; only the former is a resonance position.
        if abs(froot) < 0.1:
            poles.append(0.5 * (lo + hi))
    return poles


def bound_state_count(morse: MorseParams, r_max: float = 10.0,
                      h: float = 2.5e-4) -> int:
    """Free-space s-wave bound states, by node count of the zero-energy solution."""
    if morse.De == 0:
        return 0
    r, u = _numerov_zero_energy(morse, r_max, h)
    inside = r < r_max - 0.5
    sign_changes = np.sum(np.abs(np.diff(np.sign(u[inside]))) > 1)
    return int(sign_changes)


# -- composed totals ----------------------------------------------------------

LABELS = ("MGS", "MS1", "MS2", "TS1", "TS2", "TS3")


@dataclass
class ReferenceResult:
    """Labeled quasi-exact total energies E = E_rel + E_com."""

    morse: MorseParams
    rel_energies: dict            # ell -> ascending relative energies
    entries: list = field(default_factory=list)  # (label, L, E_total)

    def energy(self, label: str) -> float:
        for lab, L, e in self.entries:
            if lab == label:
                return e
        raise KeyError(label)

    def angular_momentum(self, label: str) -> int:
        for lab, L, e in self.entries:
            if lab == label:
                return L
        raise KeyError(label)


def compose_totals(morse: MorseParams, n_rel_states: int = 4,
                   n_points: int = 20000) -> ReferenceResult:
    """Compose relative spectra with center-of-mass levels (N + 3/2) hbar omega.

    Emits the molecular ladder MGS/MS1/MS2 (relative ground state with 0, 1, 2
    center-of-mass quanta; exactly hbar*omega spaced by separability) and the
    trap states TS1/TS2 (first and second relative s-wave excitations) and TS3
    (lowest relative d-wave state).
    """
    rel = {}
    for ell in (0, 2):
        prob = RadialProblem(morse=morse, ell=ell, n_points=n_points)
        rel[ell] = radial_spectrum(prob, n_rel_states)
    e_com0 = 1.5 * HBAR * OMEGA
    entries = [
        ("MGS", 0, rel[0][0] + e_com0),
        ("MS1", 1, rel[0][0] + e_com0 + 1.0),
        ("MS2", 0, rel[0][0] + e_com0 + 2.0),
        ("TS1", 0, rel[0][1] + e_com0),
        ("TS2", 0, rel[0][2] + e_com0),
        ("TS3", 2, rel[2][0] + e_com0),
    ]
    return ReferenceResult(morse, rel, entries)


# -- reference densities ------------------------------------------------------

def _com_ground(Z: np.ndarray) -> np.ndarray:
    # 3D oscillator ground state of the pair's center of mass (M = 2m)
    M = 2.0
    return (M * OMEGA / (math.pi * HBAR)) ** 0.75 * np.exp(-M * OMEGA * Z * Z / (2 * HBAR))


def _com_excited_z(Z: np.ndarray, quanta: int) -> np.ndarray:
    """COM wavefunction on the z axis with `quanta` quanta in the z mode."""
    M = 2.0
    base = _com_ground(Z)
    x = np.sqrt(M * OMEGA / HBAR) * Z
    if quanta == 0:
        return base
    if quanta == 1:
        return math.sqrt(2.0) * x * base
    if quanta == 2:
        return (2.0 * x * x - 1.0) / math.sqrt(2.0) * base
    raise InvalidParameterError("only 0..2 center-of-mass quanta supported")


@dataclass
class ReferenceCut:
    z: np.ndarray
    psi: np.ndarray
    density: np.ndarray
    diag: np.ndarray
    antidiag: np.ndarray
    energy: float


def reference_density_cut(morse: MorseParams, label: str,
                          z_grid_dho: np.ndarray,
                          n_points: int = 20000) -> ReferenceCut:
    """Quasi-exact [z1, z2] density cut for a labeled state.

    Psi(r1, r2) = psi_rel(|r1 - r2|) * psi_com((r1 + r2)/2); on the cut the
    relative coordinate is (0, 0, z1 - z2) and the center of mass
    (0, 0, (z1 + z2)/2).  Sign fixed as in the CI cut (diagonal maximum > 0).
    """
    if label not in LABELS:
        raise InvalidParameterError(f"unknown label {label!r}; expected one of {LABELS}")
    ell = 2 if label == "TS3" else 0
    rel_index = {"TS1": 1, "TS2": 2}.get(label, 0)
    com_quanta = {"MS1": 1, "MS2": 2}.get(label, 0)
    prob = RadialProblem(morse=morse, ell=ell, n_points=n_points)
    r, u, e_rel = radial_wavefunction(prob, rel_index)

    z_abs = np.asarray(z_grid_dho, dtype=float) * D_HO
    z1 = z_abs[:, None]
    z2 = z_abs[None, :]
    rrel = np.abs(z1 - z2)
    Zcom = 0.5 * (z1 + z2)

    g = u / r  # radial factor of psi_rel up to Y_00
    rr = rrel.ravel()
    psi_rel = np.interp(rr, r, g, left=g[0], right=0.0).reshape(rrel.shape)
    psi_rel = psi_rel / math.sqrt(4.0 * math.pi)
    psi = psi_rel * _com_excited_z(Zcom, com_quanta)

    dvals = np.diagonal(psi)
    pivot = np.argmax(np.abs(dvals))
    if dvals[pivot] < 0:
        psi = -psi
    psi = psi * D_HO ** 3
    density = psi * psi
    return ReferenceCut(z=np.asarray(z_grid_dho, dtype=float), psi=psi,
                        density=density, diag=np.diagonal(density).copy(),
                        antidiag=np.diagonal(np.fliplr(density)).copy(),
                        energy=e_rel + (com_quanta + 1.5))
