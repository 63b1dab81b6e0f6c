"""Two-particle Morse interaction integrals over Cartesian Gaussian quartets.

The six-dimensional integral <ab|U|cd> is reduced, McMurchie-Davidson style,
to Hermite expansion coefficients contracted against a Cartesian derivative
tensor of a radial kernel

    B(Q) = (pi/(p+q))^(3/2) * int U(|s|) exp(-xi |s - Qvec|^2) d^3s,

where p, q are the combined exponents of the bra-ket pair of each particle,
Qvec the separation of their composite centers, and xi = p q / (p + q).
Expanding the angular part gives B as a series over Gaussian-damped radial
moments of the potential; the Morse case of those moments has a closed form
in half-line moment integrals.  Coincident centers (Qvec = 0, the dominant
case for single-well traps) use a dedicated closed-form fast path.
"""

from __future__ import annotations

import math
import struct
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy.special import roots_hermite

from .errors import AssemblyError, ConvergenceError
from .model import BasisSet, GtoPrimitive, MorseParams, double_factorial
from .special import exp_gauss_moment, spherical_average_monomial

CACHE_MAGIC = b"TCI1"
CACHE_VERSION = 1
# Beyond this value of xi*Q^2 the Taylor-derivative series is traded for
# direct Gauss-Hermite quadrature of the kernel with the derivatives applied
# to the explicit Gaussian factors under the integral sign.
SERIES_QMAX = 30.0
SERIES_NMAX = 200


def morse_gauss_moment(lam: int, xi: float, morse: MorseParams) -> float:
    """Gaussian-damped radial moment int_0^inf r^lam U(r) exp(-xi r^2) dr.

    For the Morse potential this reduces to two half-line moment integrals;
    linear in De by construction.
    """
    if xi <= 0:
        raise AssemblyError(f"xi must be positive, got {xi}")
    if morse.De == 0.0:
        return 0.0
    # U(r) = De (e^(2 a Rm) e^(-2 a r) - 2 e^(a Rm) e^(-a r)); the moment is
    # the matching combination of half-line integrals, linear in De.
    a, rm = morse.am_abs, morse.rm_abs
    w = math.exp(a * rm)
    return morse.De * w * (w * exp_gauss_moment(lam, -2.0 * a, xi)
                           - 2.0 * exp_gauss_moment(lam, -a, xi))


class _MomentCache:
    """Memoized radial moments for one Morse parameter set."""

    def __init__(self, morse: MorseParams):
        self.morse = morse
        self._store: dict[tuple[int, float], float] = {}

    def __call__(self, lam: int, xi: float) -> float:
        key = (lam, xi)
        val = self._store.get(key)
        if val is None:
            val = morse_gauss_moment(lam, xi, self.morse)
            self._store[key] = val
        return val


def radial_factor_vector(p: float, q: float, morse: MorseParams, n_max: int,
                         moments: _MomentCache | None = None) -> np.ndarray:
    """Degree-resolved radial factor G_N of the coincident-center tensor.

    The derivative tensor at Qvec = 0 factorizes into a parity product of
    double factorials times G_N with 2N the total derivative degree:

        G_N = 4 pi^(5/2) / (p+q)^(3/2) *
              sum_n (-1)^(N-n) C(N,n) (2 xi)^(N+n) / (2n+1)!! * Pi_(2n+2)(xi)
    """
    xi = p * q / (p + q)
    mom = moments if moments is not None else _MomentCache(morse)
    pref = 4.0 * math.pi ** 2.5 / (p + q) ** 1.5
    out = np.zeros(n_max + 1)
    for N in range(n_max + 1):
        acc = 0.0
        for n in range(N + 1):
            term = (math.comb(N, n) * (2.0 * xi) ** (N + n)
                    / double_factorial(2 * n + 1) * mom(2 * n + 2, xi))
            acc += term if (N - n) % 2 == 0 else -term
        out[N] = pref * acc
    return out


def hermite_tensor_q0(t: int, u: int, v: int, p: float, q: float,
                      morse: MorseParams) -> float:
    """Derivative tensor of the radial kernel at coincident centers.

    Vanishes unless t, u, v are all even (equivalently whenever the sphere
    average of the corresponding monomial vanishes).
    """
    avg = spherical_average_monomial(t, u, v)
    if avg == 0.0:
        return 0.0
    ltot = t + u + v
    g = radial_factor_vector(p, q, morse, ltot // 2)
    # avg * (ltot+1)!! == (t-1)!!(u-1)!!(v-1)!!
    return avg * double_factorial(ltot + 1) * g[ltot // 2]


def _hermite_values(nmax: int, z: float) -> np.ndarray:
    H = np.empty(nmax + 1)
    H[0] = 1.0
    if nmax >= 1:
        H[1] = 2.0 * z
    for n in range(1, nmax):
        H[n + 1] = 2.0 * z * H[n] - 2.0 * n * H[n - 1]
    return H


def _scaled_derivative_poly(t: int, s: int, xt: float, H: np.ndarray) -> float:
    """xi^((s-t)/2) e^(xi x^2) d^t/dx^t [x^s e^(-xi x^2)] at x = xt/sqrt(xi).

    Expanded over derivatives of the Gaussian: the j-th term differentiates
    x^s j times and the Gaussian t-j times, the latter giving Hermite values.
    """
    acc = 0.0
    for j in range(min(t, s) + 1):
        c = math.comb(t, j) * math.perm(s, j)
        pw = xt ** (s - j) if s != j else 1.0
        h = H[t - j] if (t - j) % 2 == 0 else -H[t - j]
        acc += c * pw * h
    return acc


def _hermite_tensor_series(t: int, u: int, v: int, xi: float, pq_sum: float,
                           qvec: np.ndarray, morse: MorseParams,
                           moments: _MomentCache) -> float:
    """Taylor-derivative evaluation of the general-separation tensor.

    Each series term is a polynomial times Gaussian in Qvec, so the Cartesian
    derivatives are exact; truncation is adaptive with an n_max cap.
    """
    xs = math.sqrt(xi) * qvec  # scaled components, |xs|^2 = xi Q^2
    q2 = float(np.dot(qvec, qvec))
    hx = _hermite_values(t, xs[0])
    hy = _hermite_values(u, xs[1])
    hz = _hermite_values(v, xs[2])
    ltot = t + u + v
    pref = (4.0 * math.pi * (math.pi / pq_sum) ** 1.5 * math.exp(-xi * q2)
            * xi ** (ltot / 2.0))

    acc = 0.0
    peak = 0.0
    coeff = 1.0  # (4 xi)^n / (2n+1)!
    for n in range(SERIES_NMAX + 1):
        if n > 0:
            coeff *= 4.0 * xi / ((2 * n) * (2 * n + 1))
        part = 0.0
        for a in range(n + 1):
            dx = _scaled_derivative_poly(t, 2 * a, xs[0], hx)
            if dx == 0.0:
                continue
            for b in range(n - a + 1):
                c = n - a - b
                mult = math.factorial(n) // (math.factorial(a) * math.factorial(b)
                                             * math.factorial(c))
                part += mult * dx \
                    * _scaled_derivative_poly(u, 2 * b, xs[1], hy) \
                    * _scaled_derivative_poly(v, 2 * c, xs[2], hz)
        try:
            term = coeff * moments(2 * n + 2, xi) * part
        except OverflowError as err:
            raise ConvergenceError(
                f"radial moment overflow at order {2 * n + 2} before truncation",
                xi_q2=xi * q2, t=t, u=u, v=v, partial=pref * acc) from err
        acc += term
        peak = max(peak, abs(term))
        if n >= 1 and abs(term) < 1e-15 * max(abs(acc), 1e-300) and \
           n * n > 4.0 * xi * q2:
            return pref * acc
    raise ConvergenceError(
        f"derivative-tensor series did not settle within {SERIES_NMAX} terms",
        xi_q2=xi * q2, t=t, u=u, v=v, partial=pref * acc, peak_term=peak)


_GH_NODES: dict[int, tuple[np.ndarray, np.ndarray]] = {}


def _gh_rule(n: int):
    rule = _GH_NODES.get(n)
    if rule is None:
        rule = roots_hermite(n)
        _GH_NODES[n] = rule
    return rule


def _hermite_tensor_quadrature(t: int, u: int, v: int, xi: float, pq_sum: float,
                               qvec: np.ndarray, morse: MorseParams,
                               n_nodes: int = 64) -> float:
    """Gauss-Hermite product quadrature of the kernel derivatives.

    Used where the series would need too many terms (xi Q^2 > SERIES_QMAX):
    the derivatives act on the explicit shifted Gaussian, giving Hermite
    polynomials under a 3D integral with Gaussian weight.
    """
    from .model import morse_value_abs

    z, w = _gh_rule(n_nodes)
    hx = np.polynomial.hermite.hermval(z, [0] * t + [1]) if t else np.ones_like(z)
    hy = np.polynomial.hermite.hermval(z, [0] * u + [1]) if u else np.ones_like(z)
    hz = np.polynomial.hermite.hermval(z, [0] * v + [1]) if v else np.ones_like(z)
    s = 1.0 / math.sqrt(xi)
    X = qvec[0] + s * z
    Y = qvec[1] + s * z
    Z = qvec[2] + s * z
    R = np.sqrt(X[:, None, None] ** 2 + Y[None, :, None] ** 2 + Z[None, None, :] ** 2)
    U = morse_value_abs(morse, R)
    wx = w * hx
    wy = w * hy
    wz = w * hz
    core = np.einsum("i,j,k,ijk->", wx, wy, wz, U)
    ltot = t + u + v
    return (math.pi / pq_sum) ** 1.5 * xi ** (ltot / 2.0 - 1.5) * core


def hermite_tensor(t: int, u: int, v: int, p: float, q: float, qvec,
                   morse: MorseParams,
                   moments: _MomentCache | None = None) -> float:
    """Cartesian derivative tensor of the radial kernel at separation qvec."""
    qvec = np.asarray(qvec, dtype=float)
    xi = p * q / (p + q)
    if morse.De == 0.0:
        return 0.0
    mom = moments if moments is not None else _MomentCache(morse)
    if xi * float(np.dot(qvec, qvec)) > SERIES_QMAX:
        return _hermite_tensor_quadrature(t, u, v, xi, p + q, qvec, morse)
    return _hermite_tensor_series(t, u, v, xi, p + q, qvec, morse, mom)


# -- quartets -----------------------------------------------------------------

def canonical_key(a: int, b: int, c: int, d: int) -> tuple[int, int, int, int]:
    """Canonical representative of <ab|U|cd> under the 8 real-orbital symmetries.

    The bra-ket column of each particle is sorted, then the two columns are
    ordered lexicographically (smallest index first).
    """
    p1 = (a, c) if a <= c else (c, a)
    p2 = (b, d) if b <= d else (d, b)
    if p1 > p2:
        p1, p2 = p2, p1
    return (p1[0], p2[0], p1[1], p2[1])


def _pair_axis_coeffs(pa: GtoPrimitive, pb: GtoPrimitive) -> list[np.ndarray]:
    from .onebody import hermite_coeffs

    return [hermite_coeffs(pow_a, pow_b, pa.tau, pb.tau, ca, cb)
            for pow_a, pow_b, ca, cb in zip((pa.i, pa.k, pa.m), (pb.i, pb.k, pb.m),
                                            pa.center, pb.center)]


def two_particle_integral(a: GtoPrimitive, b: GtoPrimitive, c: GtoPrimitive,
                          d: GtoPrimitive, morse: MorseParams,
                          moments: _MomentCache | None = None) -> float:
    """<a(1) b(2) | U(r12) | c(1) d(2)> over normalized primitives.

    Contracts the Hermite coefficient products of the particle-1 pair (a,c)
    and particle-2 pair (b,d), with the parity sign on the particle-1 side,
    against the derivative tensor; uses the coincident-center fast path when
    the composite centers agree.
    """
    if morse.De == 0.0:
        return 0.0
    mom = moments if moments is not None else _MomentCache(morse)
    p = a.tau + c.tau
    q = b.tau + d.tau
    P1 = (np.asarray(a.center) * a.tau + np.asarray(c.center) * c.tau) / p
    Q2 = (np.asarray(b.center) * b.tau + np.asarray(d.center) * d.tau) / q
    qvec = Q2 - P1
    scale = 1.0 + float(np.abs(P1).max() + np.abs(Q2).max())
    qvec[np.abs(qvec) < 1e-14 * scale] = 0.0
    E1 = _pair_axis_coeffs(a, c)
    E2 = _pair_axis_coeffs(b, d)
    at_origin = bool(np.all(qvec == 0.0))

    tensor_cache: dict[tuple[int, int, int], float] = {}

    def tensor(T, U, V):
        key = (T, U, V)
        val = tensor_cache.get(key)
        if val is None:
            if at_origin:
                val = hermite_tensor_q0(T, U, V, p, q, morse)
            else:
                val = hermite_tensor(T, U, V, p, q, qvec, morse, mom)
            tensor_cache[key] = val
        return val

    acc = 0.0
    for t1, e1x in enumerate(E1[0]):
        for u1, e1y in enumerate(E1[1]):
            for v1, e1z in enumerate(E1[2]):
                w1 = e1x * e1y * e1z
                if w1 == 0.0:
                    continue
                sign = -1.0 if (t1 + u1 + v1) % 2 else 1.0
                for t2, e2x in enumerate(E2[0]):
                    for u2, e2y in enumerate(E2[1]):
                        for v2, e2z in enumerate(E2[2]):
                            w2 = e2x * e2y * e2z
                            if w2 == 0.0:
                                continue
                            acc += sign * w1 * w2 * tensor(t1 + t2, u1 + u2, v1 + v2)
    return acc * a.norm * b.norm * c.norm * d.norm


# -- packed tensor ------------------------------------------------------------

def _pair_offsets(n: int) -> np.ndarray:
    a = np.arange(n, dtype=np.int64)
    return a * n - a * (a - 1) // 2


def pair_index(a, b, n: int):
    """Index of the unordered primitive pair {a, b} (a <= b enumerated first)."""
    a = np.asarray(a, dtype=np.int64)
    b = np.asarray(b, dtype=np.int64)
    lo = np.minimum(a, b)
    hi = np.maximum(a, b)
    return lo * n - lo * (lo - 1) // 2 + (hi - lo)


def quartet_flat_index(a, b, c, d, n: int):
    """Flat canonical storage index of <ab|U|cd>."""
    p1 = pair_index(a, c, n)
    p2 = pair_index(b, d, n)
    lo = np.minimum(p1, p2)
    hi = np.maximum(p1, p2)
    return hi * (hi + 1) // 2 + lo


def all_canonical_keys(n: int) -> np.ndarray:
    """(count, 4) array of canonical (a, b, c, d) keys in flat-index order."""
    m = n * (n + 1) // 2
    flat = np.arange(m * (m + 1) // 2, dtype=np.int64)
    hi = ((np.sqrt(8.0 * flat + 1.0) - 1.0) / 2.0).astype(np.int64)
    hi = np.where(hi * (hi + 1) // 2 > flat, hi - 1, hi)
    hi = np.where((hi + 1) * (hi + 2) // 2 <= flat, hi + 1, hi)
    lo = flat - hi * (hi + 1) // 2
    offs = _pair_offsets(n)
    p_lo_a = np.searchsorted(offs, lo, side="right") - 1
    p_lo_b = lo - offs[p_lo_a] + p_lo_a
    p_hi_a = np.searchsorted(offs, hi, side="right") - 1
    p_hi_b = hi - offs[p_hi_a] + p_hi_a
    # the column with the smaller pair index is the particle-1 (a, c) column
    return np.stack([p_lo_a, p_hi_a, p_lo_b, p_hi_b], axis=1)


@dataclass
class IntegralTensor:
    """Packed canonical store of two-particle integrals for one basis.

    values[flat] holds the integral for the canonical quartet with that flat
    index; lookups expand the 8-fold permutational symmetry arithmetically.
    """

    n_basis: int
    threshold: float
    morse: MorseParams
    values: np.ndarray
    basis_hash: bytes = b""

    @property
    def n_pairs(self) -> int:
        return self.n_basis * (self.n_basis + 1) // 2

    @property
    def n_canonical(self) -> int:
        return self.n_pairs * (self.n_pairs + 1) // 2

    def lookup(self, a: int, b: int, c: int, d: int) -> float:
        return float(self.values[quartet_flat_index(a, b, c, d, self.n_basis)])

    def gather(self, a, b, c, d) -> np.ndarray:
        return self.values[quartet_flat_index(a, b, c, d, self.n_basis)]

    def scaled(self, factor: float) -> "IntegralTensor":
        return IntegralTensor(self.n_basis, self.threshold,
                              self.morse.with_de(self.morse.De * factor),
                              self.values * factor, self.basis_hash)

    def canonical_keys(self) -> np.ndarray:
        return all_canonical_keys(self.n_basis)

    def save(self, path) -> None:
        header = CACHE_MAGIC + struct.pack("<I", CACHE_VERSION)
        header += self.basis_hash.ljust(32, b"\0")[:32]
        header += struct.pack("<3d", self.morse.De, self.morse.Rm, self.morse.am)
        header += struct.pack("<d", self.threshold)
        header += struct.pack("<Q", len(self.values))
        keys = self.canonical_keys().astype(np.uint32)
        rec = np.zeros(len(self.values),
                       dtype=np.dtype([("key", "<u4", (4,)), ("val", "<f8")]))
        rec["key"] = keys
        rec["val"] = self.values
        with open(path, "wb") as fh:
            fh.write(header)
            fh.write(rec.tobytes())

    @classmethod
    def load(cls, path, n_basis: int) -> "IntegralTensor":
        with open(path, "rb") as fh:
            blob = fh.read()
        if blob[:4] != CACHE_MAGIC:
            raise AssemblyError(f"{path}: not an integral cache file")
        (version,) = struct.unpack_from("<I", blob, 4)
        if version != CACHE_VERSION:
            raise AssemblyError(f"{path}: unsupported cache version {version}")
        basis_hash = blob[8:40]
        de, rm, am = struct.unpack_from("<3d", blob, 40)
        (threshold,) = struct.unpack_from("<d", blob, 64)
        (count,) = struct.unpack_from("<Q", blob, 72)
        rec = np.frombuffer(blob, offset=80,
                            dtype=np.dtype([("key", "<u4", (4,)), ("val", "<f8")]),
                            count=count)
        keys = rec["key"].astype(np.int64)
        flat = quartet_flat_index(keys[:, 0], keys[:, 1], keys[:, 2], keys[:, 3], n_basis)
        m = n_basis * (n_basis + 1) // 2
        values = np.zeros(m * (m + 1) // 2)
        values[flat] = rec["val"]
        return cls(n_basis, threshold, MorseParams(de, rm, am), values,
                   bytes(basis_hash))


# -- vectorized single-center build -------------------------------------------

@dataclass
class _PairGroup:
    p: float
    pair_ids: np.ndarray       # indices into the global pair enumeration
    coeffs: np.ndarray         # (n_pairs, 3, L) Hermite coefficient vectors
    normprod: np.ndarray       # (n_pairs,)


def _build_pair_groups(basis: BasisSet) -> list[_PairGroup]:
    from .onebody import hermite_coeffs

    n = basis.n
    powers = basis.powers
    taus = basis.taus
    norms = basis.norms
    L = 2 * basis.max_sigma + 1
    ecache: dict[tuple[int, int, float, float], np.ndarray] = {}

    groups: dict[float, list] = {}
    pid = 0
    for a in range(n):
        for b in range(a, n):
            p = taus[a] + taus[b]
            ex = np.zeros((3, L))
            for ax in range(3):
                key = (int(powers[a, ax]), int(powers[b, ax]), taus[a], taus[b])
                e = ecache.get(key)
                if e is None:
                    e = hermite_coeffs(key[0], key[1], taus[a], taus[b], 0.0, 0.0)
                    ecache[key] = e
                ex[ax, :len(e)] = e
            groups.setdefault(round(p, 12), []).append(
                (pid, ex, norms[a] * norms[b]))
            pid += 1

    out = []
    for p in sorted(groups):
        rows = groups[p]
        out.append(_PairGroup(
            p=float(p),
            pair_ids=np.array([r[0] for r in rows], dtype=np.int64),
            coeffs=np.stack([r[1] for r in rows]),
            normprod=np.array([r[2] for r in rows]),
        ))
    return out


def _even_triples(L: int) -> list[tuple[int, int, int]]:
    out = []
    for T in range(0, L, 2):
        for U in range(0, L - T, 2):
            for V in range(0, L - T - U, 2):
                out.append((T, U, V))
    return out


def _block_values(g1: _PairGroup, g2: _PairGroup, gvec: np.ndarray,
                  dfact: np.ndarray, triples) -> np.ndarray:
    """Integral values for every (pair in g1) x (pair in g2) combination."""
    n1, _, L = g1.coeffs.shape
    n2 = g2.coeffs.shape[0]
    corr = np.zeros((n1, n2, 3, 2 * L - 1))
    for t1 in range(L):
        sign = -1.0 if t1 % 2 else 1.0
        e1 = g1.coeffs[:, :, t1]
        if not np.any(e1):
            continue
        for t2 in range(L):
            e2 = g2.coeffs[:, :, t2]
            if not np.any(e2):
                continue
            corr[:, :, :, t1 + t2] += sign * e1[:, None, :] * e2[None, :, :]
    corr *= dfact[: 2 * L - 1]
    nmax = (len(dfact) - 1) // 2
    sums = np.zeros((n1, n2, nmax + 1))
    for (T, U, V) in triples:
        blk = corr[:, :, 0, T] * corr[:, :, 1, U] * corr[:, :, 2, V]
        sums[:, :, (T + U + V) // 2] += blk
    # fixed-order accumulation keeps the result bitwise independent of the
    # worker partitioning and of BLAS reduction order
    vals = np.zeros((n1, n2))
    for N in range(nmax + 1):
        vals += sums[:, :, N] * gvec[N]
    vals *= g1.normprod[:, None] * g2.normprod[None, :]
    return vals


def _block_task(args):
    g1, g2, gvec, dfact, triples, same = args
    n1, _, L = g1.coeffs.shape
    n2 = g2.coeffs.shape[0]
    # cap the (n1_chunk, n2, 3, 2L-1) scratch array at ~100 MB
    chunk = max(1, int(100e6 / (n2 * 3 * (2 * L - 1) * 8)))
    flats, vals = [], []
    for start in range(0, n1, chunk):
        sub = _PairGroup(g1.p, g1.pair_ids[start:start + chunk],
                         g1.coeffs[start:start + chunk],
                         g1.normprod[start:start + chunk])
        v = _block_values(sub, g2, gvec, dfact, triples)
        p1 = sub.pair_ids[:, None]
        p2 = g2.pair_ids[None, :]
        hi = np.maximum(p1, p2)
        lo = np.minimum(p1, p2)
        flat = hi * (hi + 1) // 2 + lo
        if same:
            mask = p1 <= p2
            flats.append(flat[mask])
            vals.append(v[mask])
        else:
            flats.append(flat.ravel())
            vals.append(v.ravel())
    return np.concatenate(flats), np.concatenate(vals)


def build_integral_tensor(basis: BasisSet, morse: MorseParams,
                          threshold: float = 1e-14,
                          workers: int = 1) -> IntegralTensor:
    """All canonical two-particle integrals of a basis, screened at threshold.

    Single-center bases take a vectorized coincident-center path whose result
    is bitwise independent of the worker partitioning; De enters only as a
    linear prefactor of the radial moments, so the tensor is computed once at
    unit depth and scaled.
    """
    if threshold < 0:
        raise AssemblyError("screening threshold must be >= 0")
    n = basis.n
    m = n * (n + 1) // 2
    values = np.zeros(m * (m + 1) // 2)
    if morse.De == 0.0:
        return IntegralTensor(n, threshold, morse, values, basis.content_hash())

    unit = morse.with_de(1.0)
    if not basis.single_center:
        return _build_general(basis, morse, threshold)

    groups = _build_pair_groups(basis)
    smax = basis.max_sigma
    nmax = 2 * smax
    L = 2 * smax + 1
    dfact = np.array([double_factorial(t - 1) if t % 2 == 0 else 0.0
                      for t in range(2 * L - 1)])
    triples = _even_triples(2 * L - 1)

    moments = _MomentCache(unit)
    tasks = []
    for i, g1 in enumerate(groups):
        for g2 in groups[i:]:
            gvec = radial_factor_vector(g1.p, g2.p, unit, nmax, moments)
            tasks.append((g1, g2, gvec, dfact, triples, g1 is g2))

    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_block_task, tasks, chunksize=1))
    else:
        results = [_block_task(t) for t in tasks]
    for flat, vals in results:
        values[flat] = vals

    values *= morse.De
    values[np.abs(values) < threshold] = 0.0
    return IntegralTensor(n, threshold, morse, values, basis.content_hash())


def _build_general(basis: BasisSet, morse: MorseParams,
                   threshold: float) -> IntegralTensor:
    """Scalar fallback for shifted-center bases (slow; test-scale only)."""
    n = basis.n
    prims = basis.primitives
    m = n * (n + 1) // 2
    values = np.zeros(m * (m + 1) // 2)
    moments = _MomentCache(morse)
    failures = []
    for flat, (a, b, c, d) in enumerate(all_canonical_keys(n)):
        try:
            val = two_particle_integral(prims[a], prims[b], prims[c], prims[d],
                                        morse, moments)
        except ConvergenceError as err:
            failures.append(((a, b, c, d), err))
            continue
        values[flat] = val if abs(val) >= threshold else 0.0
    if failures:
        head = ", ".join(str(tuple(int(x) for x in k)) for k, _ in failures[:5])
        raise AssemblyError(
            f"{len(failures)} quartets failed to converge (first: {head})")
    return IntegralTensor(n, threshold, morse, values, basis.content_hash())


# -- disk cache ---------------------------------------------------------------

def cache_filename(basis: BasisSet, morse: MorseParams, threshold: float) -> str:
    import hashlib

    h = hashlib.sha256()
    h.update(basis.content_hash())
    h.update(np.array([morse.De, morse.Rm, morse.am, threshold]).tobytes())
    return f"tci_{h.hexdigest()[:24]}.bin"


def load_or_build(basis: BasisSet, morse: MorseParams, threshold: float = 1e-14,
                  cache_dir=None, workers: int = 1) -> IntegralTensor:
    """Return the integral tensor, reusing an on-disk unit-depth cache.

    The cached tensor is stored at De = 1 (threshold applied there) and
    rescaled, so sweeps over the potential depth hit the same file.
    """
    unit = morse.with_de(1.0)
    if cache_dir is None:
        return build_integral_tensor(basis, morse, threshold, workers)
    import os

    path = os.path.join(cache_dir, cache_filename(basis, unit, threshold))
    if os.path.exists(path):
        tensor = IntegralTensor.load(path, basis.n)
        if tensor.basis_hash == basis.content_hash().ljust(32, b"\0")[:32]:
            return tensor.scaled(morse.De)
    tensor = build_integral_tensor(basis, unit, threshold, workers)
    os.makedirs(cache_dir, exist_ok=True)
    tensor.save(path)
    return tensor.scaled(morse.De)
