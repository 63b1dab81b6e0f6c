"""Trap units, interaction parameters, and Cartesian Gaussian basis sets.

Unit convention
---------------
All *computation* happens in trap-absolute units hbar = m = omega = 1 for a
single particle of mass m, so the reduced mass of the atom pair is mu = 1/2
and the relative-motion oscillator length is d_ho = sqrt(hbar/(mu*omega))
= sqrt(2).  Configuration input and all reported output use (d_ho, hbar*omega)
units instead; the converters live in this module.  Primitives stored in a
:class:`BasisSet` always carry absolute-unit exponents and centers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigurationError, InvalidParameterError

HBAR = 1.0
MASS = 1.0
OMEGA = 1.0
REDUCED_MASS = MASS / 2.0
D_HO = math.sqrt(HBAR / (REDUCED_MASS * OMEGA))  # = sqrt(2) in absolute units


@dataclass(frozen=True)
class UnitSystem:
    """Fixed constants of the working unit system."""

    hbar: float = HBAR
    mass: float = MASS
    omega: float = OMEGA

    @property
    def mu(self) -> float:
        return self.mass / 2.0

    @property
    def d_ho(self) -> float:
        return math.sqrt(self.hbar / (self.mu * self.omega))


UNITS = UnitSystem()


def length_to_abs(x_dho: float) -> float:
    return x_dho * D_HO


def length_to_dho(x_abs: float) -> float:
    return x_abs / D_HO


@dataclass(frozen=True)
class GaussianWell:
    """One attractive Gaussian well: -depth * exp(-(r-center)^2 / (2 width^2)).

    center is in d_ho, depth in hbar*omega, width in d_ho.
    """

    center: tuple[float, float, float]
    depth: float
    width: float


@dataclass(frozen=True)
class TrapParams:
    """External trapping potential: harmonic or a sum of Gaussian wells."""

    kind: str = "harmonic_isotropic"
    omega: float = OMEGA
    wells: tuple[GaussianWell, ...] = ()

    def __post_init__(self):
        if self.kind not in ("harmonic_isotropic", "gaussian_wells"):
            raise InvalidParameterError(f"unknown trap kind {self.kind!r}")
        if self.kind == "harmonic_isotropic" and self.wells:
            raise InvalidParameterError("harmonic trap takes no wells")
        if self.kind == "gaussian_wells":
            if not self.wells:
                raise InvalidParameterError("gaussian_wells trap needs at least one well")
            for w in self.wells:
                if w.depth <= 0 or w.width <= 0:
                    raise InvalidParameterError("well depths and widths must be positive")


@dataclass(frozen=True)
class MorseParams:
    """Morse interaction U(r) = De (exp(-2 am (r-Rm)) - 2 exp(-am (r-Rm))).

    De is in hbar*omega, Rm in d_ho, am in 1/d_ho (the paper-facing units).
    Absolute-unit views for the integral engine are exposed as properties.
    """

    De: float
    Rm: float
    am: float

    def __post_init__(self):
        if self.De < 0:
            raise InvalidParameterError(f"De must be >= 0, got {self.De}")
        if self.am <= 0:
            raise InvalidParameterError(f"am must be > 0, got {self.am}")
        if self.Rm < 0:
            raise InvalidParameterError(f"Rm must be >= 0, got {self.Rm}")

    @property
    def rm_abs(self) -> float:
        return self.Rm * D_HO

    @property
    def am_abs(self) -> float:
        return self.am / D_HO

    def with_de(self, de: float) -> "MorseParams":
        return MorseParams(De=de, Rm=self.Rm, am=self.am)


# Interaction parameters of the validation study: a fixed Morse shape whose
# depth tunes the s-wave scattering length.  Rm is 0.3 absolute units; the
# three-digit rounding 0.212 d_ho of the same quantity shifts the computed
# scattering lengths by a few 1e-3 d_ho.
STANDARD_RM_DHO = 0.3 / D_HO
STANDARD_AM_DHO = math.sqrt(20.0)


def standard_morse(de: float) -> MorseParams:
    """Morse parameters of the validation study at depth de (hbar*omega)."""
    return MorseParams(De=de, Rm=STANDARD_RM_DHO, am=STANDARD_AM_DHO)


def morse_value(p: MorseParams, r: float) -> float:
    """Morse potential at separation r (r in d_ho, result in hbar*omega)."""
    x = np.exp(-p.am * (np.asarray(r, dtype=float) - p.Rm))
    out = p.De * (x * x - 2.0 * x)
    return float(out) if np.isscalar(r) or np.ndim(r) == 0 else out


def morse_value_abs(p: MorseParams, r_abs):
    """Morse potential at absolute-unit separation (vectorized)."""
    x = np.exp(-p.am_abs * (np.asarray(r_abs, dtype=float) - p.rm_abs))
    return p.De * (x * x - 2.0 * x)


def double_factorial(n: int) -> int:
    """(n)!! with the conventions (-1)!! = 0!! = 1."""
    if n < -1:
        raise InvalidParameterError(f"double factorial undefined for {n}")
    out = 1
    k = n
    while k > 1:
        out *= k
        k -= 2
    return out


def normalization_constant(i: int, k: int, m: int, tau: float) -> float:
    """Normalization of a Cartesian Gaussian x^i y^k z^m exp(-tau r^2)."""
    if tau <= 0:
        raise InvalidParameterError(f"exponent must be positive, got {tau}")
    if min(i, k, m) < 0:
        raise InvalidParameterError("Cartesian powers must be non-negative")
    sigma = i + k + m
    dd = double_factorial(2 * i - 1) * double_factorial(2 * k - 1) * double_factorial(2 * m - 1)
    return (2.0 * tau / math.pi) ** 0.75 * math.sqrt((4.0 * tau) ** sigma / dd)


@dataclass(frozen=True)
class GtoPrimitive:
    """One Cartesian Gaussian primitive, stored in absolute units."""

    i: int
    k: int
    m: int
    tau: float
    center: tuple[float, float, float] = (0.0, 0.0, 0.0)
    norm: float = 0.0

    @property
    def sigma(self) -> int:
        return self.i + self.k + self.m

    def value(self, xyz: np.ndarray) -> np.ndarray:
        """Evaluate the normalized primitive on points of shape (..., 3)."""
        xyz = np.asarray(xyz, dtype=float)
        d = xyz - np.asarray(self.center)
        poly = d[..., 0] ** self.i * d[..., 1] ** self.k * d[..., 2] ** self.m
        return self.norm * poly * np.exp(-self.tau * np.sum(d * d, axis=-1))


def make_primitive(i: int, k: int, m: int, tau: float,
                   center=(0.0, 0.0, 0.0)) -> GtoPrimitive:
    return GtoPrimitive(i, k, m, float(tau), tuple(float(c) for c in center),
                        normalization_constant(i, k, m, tau))


def cartesian_powers(sigma: int) -> list[tuple[int, int, int]]:
    """All (i, k, m) with i+k+m = sigma, descending in i then k.

    sigma = 2 yields xx, xy, xz, yy, yz, zz; the ordering fixes matrix
    layouts and keeps eigenvector signs reproducible.
    """
    out = []
    for i in range(sigma, -1, -1):
        for k in range(sigma - i, -1, -1):
            out.append((i, k, sigma - i - k))
    return out


@dataclass(frozen=True)
class ShellSpec:
    """One shell: every Cartesian power of degree sigma for each exponent.

    Exponents and the center are in configuration units (1/d_ho^2 and d_ho)
    unless ``absolute_units`` is set, which is how the built-in named bases
    are defined.
    """

    sigma: int
    exponents: tuple[float, ...]
    center: tuple[float, float, float] = (0.0, 0.0, 0.0)
    absolute_units: bool = False

    def __post_init__(self):
        if self.sigma < 0:
            raise InvalidParameterError("shell degree must be >= 0")
        if not self.exponents or any(t <= 0 for t in self.exponents):
            raise InvalidParameterError("shell exponents must be positive")

    @property
    def n_primitives(self) -> int:
        return (self.sigma + 1) * (self.sigma + 2) // 2 * len(self.exponents)


@dataclass
class BasisSet:
    """Ordered list of primitives plus the shells they came from."""

    primitives: tuple[GtoPrimitive, ...]
    provenance: tuple[ShellSpec, ...] = ()
    name: str = "custom"

    def __post_init__(self):
        seen = {}
        for idx, p in enumerate(self.primitives):
            key = (p.i, p.k, p.m, p.tau, p.center)
            if key in seen:
                raise ConfigurationError(
                    f"duplicate primitive at positions {seen[key]} and {idx}: "
                    f"powers=({p.i},{p.k},{p.m}) tau={p.tau} center={p.center}")
            seen[key] = idx

    def __len__(self) -> int:
        return len(self.primitives)

    @property
    def n(self) -> int:
        return len(self.primitives)

    @property
    def powers(self) -> np.ndarray:
        return np.array([[p.i, p.k, p.m] for p in self.primitives], dtype=np.int64)

    @property
    def taus(self) -> np.ndarray:
        return np.array([p.tau for p in self.primitives])

    @property
    def centers(self) -> np.ndarray:
        return np.array([p.center for p in self.primitives])

    @property
    def norms(self) -> np.ndarray:
        return np.array([p.norm for p in self.primitives])

    @property
    def single_center(self) -> bool:
        c = self.centers
        return bool(np.all(c == c[0]))

    @property
    def max_sigma(self) -> int:
        return max(p.sigma for p in self.primitives)

    def content_hash(self) -> bytes:
        """sha256 over the primitive list; used as integral-cache key."""
        import hashlib

        h = hashlib.sha256()
        for p in self.primitives:
            h.update(np.array([p.i, p.k, p.m], dtype=np.int64).tobytes())
            h.update(np.array([p.tau, *p.center], dtype=np.float64).tobytes())
        return h.digest()


def expand_shells(specs, name: str = "custom") -> BasisSet:
    """Expand shell specifications into a deterministic basis set.

    Ordering is by shell, then exponent, then descending-lexicographic
    Cartesian powers.  Exponents given in configuration units are converted
    to absolute units here (1/d_ho^2 -> absolute inverse length squared).
    """
    prims = []
    for spec in specs:
        powers = cartesian_powers(spec.sigma)
        for tau in spec.exponents:
            if spec.absolute_units:
                tau_abs = float(tau)
                center_abs = tuple(float(c) for c in spec.center)
            else:
                tau_abs = float(tau) / (D_HO * D_HO)
                center_abs = tuple(float(c) * D_HO for c in spec.center)
            for (i, k, m) in powers:
                prims.append(make_primitive(i, k, m, tau_abs, center_abs))
    return BasisSet(tuple(prims), tuple(specs), name=name)


# Built-in basis sets.  Exponents are quoted in absolute units (the units in
# which tau = 0.5 is exactly the single-particle trap ground state); the
# cross-checks against the quasi-exact reference spectra pin this convention.
GTO_EXPONENTS = (0.3, 0.5, 1.0, 2.2)
GTO2_EXPONENTS = (1.0, 1.7, 2.3)


def named_basis(name: str) -> BasisSet:
    """Built-in bases: "GTO" (sigma 0-3 x 4 exponents, N=80) and "GTO-2"
    (sigma 0-3 x 3 exponents plus sigma 4, 5 at tau=1.0, N=96)."""
    if name == "GTO":
        specs = [ShellSpec(s, GTO_EXPONENTS, absolute_units=True) for s in range(4)]
        return expand_shells(specs, name="GTO")
    if name == "GTO-2":
        specs = [ShellSpec(s, GTO2_EXPONENTS, absolute_units=True) for s in range(4)]
        specs += [ShellSpec(4, (1.0,), absolute_units=True),
                  ShellSpec(5, (1.0,), absolute_units=True)]
        return expand_shells(specs, name="GTO-2")
    raise ConfigurationError(f"unknown basis name {name!r} (expected GTO or GTO-2)")


def basis_ladder(name: str = "GTO") -> list[BasisSet]:
    """Cumulative shell ladder s, sp, spd, spdf of the named basis."""
    if name != "GTO":
        raise ConfigurationError("ladder is defined for the GTO basis")
    rungs = []
    for smax in range(4):
        specs = [ShellSpec(s, GTO_EXPONENTS, absolute_units=True)
                 for s in range(smax + 1)]
        rungs.append(expand_shells(specs, name=f"GTO[s..{'spdf'[smax]}]"))
    return rungs
