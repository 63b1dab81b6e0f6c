import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import integrate

from oracles import quad_radial_moment, quartet_monte_carlo, quartet_relative_oracle
from trapci.model import (MorseParams, cartesian_powers, expand_shells,
                          make_primitive, morse_value_abs, ShellSpec,
                          standard_morse)
from trapci.twobody import (IntegralTensor, all_canonical_keys,
                            build_integral_tensor, canonical_key,
                            hermite_tensor, hermite_tensor_q0, load_or_build,
                            morse_gauss_moment, pair_index, quartet_flat_index,
                            two_particle_integral)

MORSE = standard_morse(3.0)


class TestRadialMoments:
    def test_zero_depth(self):
        z = standard_morse(0.0)
        for lam, xi in [(2, 0.5), (6, 2.0)]:
            assert morse_gauss_moment(lam, xi, z) == 0.0

    def test_frozen_quadrature_value(self):
        # spec example uses the literal 0.212 d_ho = 0.2998 absolute value
        m = MorseParams(3.0, 0.212, math.sqrt(20.0))
        assert morse_gauss_moment(2, 1.0, m) == pytest.approx(
            -0.34802527484564816, rel=1e-11)

    @pytest.mark.parametrize("lam,xi", [(2, 0.3), (4, 1.0), (8, 2.2), (12, 4.4)])
    def test_against_quadrature(self, lam, xi):
        assert morse_gauss_moment(lam, xi, MORSE) == pytest.approx(
            quad_radial_moment(lam, xi, MORSE), rel=1e-11)

    def test_large_xi_decay(self):
        # decays to zero, bounded by const * xi^(-3/2) (the finite-core limit
        # is U(0) sqrt(pi)/4 * xi^(-3/2)); checked against quadrature
        xis = (1.0, 10.0, 100.0)
        vals = [abs(morse_gauss_moment(2, xi, MORSE)) for xi in xis]
        quads = [abs(quad_radial_moment(2, xi, MORSE)) for xi in xis]
        assert np.allclose(vals, quads, rtol=1e-10)
        assert vals[0] > vals[1] > vals[2]
        c_bound = 1.5 * abs(morse_value_abs(MORSE, 0.0)) * math.sqrt(math.pi) / 4
        for xi, v in zip(xis, vals):
            assert v <= c_bound * xi ** -1.5

    def test_linear_in_depth(self):
        for lam, xi in [(2, 0.7), (6, 1.9)]:
            v1 = morse_gauss_moment(lam, xi, standard_morse(2.5))
            v2 = morse_gauss_moment(lam, xi, standard_morse(5.0))
            assert v2 == 2.0 * v1


class TestTensorAtOrigin:
    def test_odd_parity_zero(self):
        assert hermite_tensor_q0(1, 0, 0, 1.0, 1.0, MORSE) == 0.0
        assert hermite_tensor_q0(1, 2, 0, 1.3, 0.8, MORSE) == 0.0

    def test_parity_zeros_all_odd_degrees(self):
        for ltot in range(1, 12, 2):
            for t in range(ltot + 1):
                for u in range(ltot + 1 - t):
                    v = ltot - t - u
                    assert hermite_tensor_q0(t, u, v, 1.1, 0.7, MORSE) == 0.0

    def test_scalar_case_is_basic_kernel(self):
        p = q = 1.0
        xi = 0.5
        expect = 4 * math.pi * (math.pi / 2.0) ** 1.5 * quad_radial_moment(2, xi, MORSE)
        assert hermite_tensor_q0(0, 0, 0, p, q, MORSE) == pytest.approx(expect,
                                                                        rel=1e-11)

    def test_matches_small_q_limit(self):
        got = hermite_tensor_q0(2, 0, 0, 1.0, 1.0, MORSE)
        approx = hermite_tensor(2, 0, 0, 1.0, 1.0, [1e-5, 0, 0], MORSE)
        assert got == pytest.approx(approx, rel=1e-8)

    def test_continuity_seam_random(self, rng):
        for _ in range(50):
            t, u, v = 2 * rng.integers(0, 3, size=3)
            p, q = rng.uniform(0.5, 4.0, size=2)
            base = hermite_tensor_q0(t, u, v, p, q, MORSE)
            qdir = rng.normal(size=3)
            qdir = 1e-6 * qdir / np.linalg.norm(qdir)
            near = hermite_tensor(t, u, v, p, q, qdir, MORSE)
            assert abs(near - base) <= 1e-9 * abs(base), (t, u, v, p, q)


class TestTensorGeneral:
    def test_scalar_vs_direct_kernel_quadrature(self):
        p = q = 1.0
        xi = 0.5
        Q = 0.5
        val, _ = integrate.quad(
            lambda r: morse_value_abs(MORSE, r) * r
            * (math.exp(-xi * (r - Q) ** 2) - math.exp(-xi * (r + Q) ** 2)) / Q,
            0, 20.0, epsabs=0.0, epsrel=1e-12, limit=400)
        expect = math.sqrt(math.pi ** 5 / (p + q)) / (p * q) * val
        got = hermite_tensor(0, 0, 0, p, q, [0, 0, 0.5], MORSE)
        assert got == pytest.approx(expect, rel=1e-10)

    def test_parity_under_reflection(self, rng):
        for _ in range(8):
            t, u, v = rng.integers(0, 3, size=3)
            qvec = rng.uniform(-0.8, 0.8, size=3)
            p, q = rng.uniform(0.6, 3.0, size=2)
            plus = hermite_tensor(t, u, v, p, q, qvec, MORSE)
            minus = hermite_tensor(t, u, v, p, q, -qvec, MORSE)
            assert plus == pytest.approx((-1.0) ** (t + u + v) * minus,
                                         rel=1e-12, abs=1e-18)

    def test_quadrature_fallback_region(self):
        # xi Q^2 > 30 routes through Gauss-Hermite quadrature
        p = q = 4.0
        qvec = np.array([0.0, 0.0, 4.2])
        v64 = hermite_tensor(2, 0, 0, p, q, qvec, MORSE)
        from trapci.twobody import _hermite_tensor_quadrature
        v96 = _hermite_tensor_quadrature(2, 0, 0, 2.0, 8.0, qvec, MORSE, n_nodes=96)
        assert v64 == pytest.approx(v96, rel=1e-8, abs=1e-25)


class TestQuartets:
    def test_zero_depth_exact(self):
        s = make_primitive(0, 0, 0, 0.5)
        assert two_particle_integral(s, s, s, s, standard_morse(0.0)) == 0.0

    def test_ssss_relative_reduction(self):
        m = MorseParams(3.0, 0.212, math.sqrt(20.0))
        s = make_primitive(0, 0, 0, 0.5)
        got = two_particle_integral(s, s, s, s, m)
        expect = (0.5 / math.pi) ** 1.5 * 4 * math.pi * quad_radial_moment(2, 0.5, m)
        assert got == pytest.approx(expect, rel=1e-11)
        assert got < 0  # attractive-dominated

    def test_random_single_center_vs_oracle(self, rng):
        basis = expand_shells([ShellSpec(s, (0.3, 1.0, 2.2), absolute_units=True)
                               for s in range(4)])
        prims = basis.primitives
        for _ in range(25):
            a, b, c, d = rng.integers(0, len(prims), size=4)
            got = two_particle_integral(prims[a], prims[b], prims[c], prims[d], MORSE)
            want = quartet_relative_oracle(prims[a], prims[b], prims[c], prims[d],
                                           MORSE)
            assert got == pytest.approx(want, rel=1e-9, abs=1e-16), (a, b, c, d)

    def test_shifted_centers_vs_monte_carlo(self, rng):
        m = standard_morse(5.0)
        a = make_primitive(1, 0, 0, 0.9, (0.3, 0.0, -0.2))
        b = make_primitive(0, 1, 1, 0.6, (0.0, 0.4, 0.1))
        c = make_primitive(0, 0, 2, 1.2, (-0.2, 0.1, 0.0))
        d = make_primitive(2, 0, 0, 0.8, (0.1, -0.3, 0.2))
        got = two_particle_integral(a, b, c, d, m)
        mc, err = quartet_monte_carlo(a, b, c, d, m, 100_000_000, rng)
        assert abs(got - mc) < 3 * err

    def test_depth_linearity(self):
        a = make_primitive(1, 1, 0, 0.7)
        b = make_primitive(0, 0, 2, 1.1)
        v1 = two_particle_integral(a, b, b, a, standard_morse(4.0))
        v2 = two_particle_integral(a, b, b, a, standard_morse(8.0))
        assert v2 == pytest.approx(2.0 * v1, rel=1e-12)

    def test_eightfold_symmetry(self, rng):
        m = standard_morse(5.0)
        prims = [make_primitive(1, 0, 0, 0.9, (0.3, 0.0, -0.2)),
                 make_primitive(0, 1, 1, 0.6, (0.0, 0.4, 0.1)),
                 make_primitive(0, 0, 2, 1.2, (-0.2, 0.1, 0.0)),
                 make_primitive(2, 0, 0, 0.8, (0.1, -0.3, 0.2))]
        a, b, c, d = prims
        base = two_particle_integral(a, b, c, d, m)
        variants = [(c, b, a, d), (a, d, c, b), (c, d, a, b),
                    (b, a, d, c), (d, a, b, c), (b, c, d, a), (d, c, b, a)]
        for quartet in variants:
            assert two_particle_integral(*quartet, m) == pytest.approx(base,
                                                                       rel=1e-12)


class TestCanonicalization:
    @given(st.integers(0, 30), st.integers(0, 30), st.integers(0, 30),
           st.integers(0, 30))
    def test_symmetry_orbit_shares_key(self, a, b, c, d):
        key = canonical_key(a, b, c, d)
        orbit = [(a, b, c, d), (c, b, a, d), (a, d, c, b), (c, d, a, b),
                 (b, a, d, c), (d, a, b, c), (b, c, d, a), (d, c, b, a)]
        for q in orbit:
            assert canonical_key(*q) == key

    @given(st.integers(2, 12), st.data())
    def test_flat_index_consistent(self, n, data):
        idx = st.integers(0, n - 1)
        a, b, c, d = (data.draw(idx) for _ in range(4))
        key = canonical_key(a, b, c, d)
        assert quartet_flat_index(a, b, c, d, n) == quartet_flat_index(*key, n)

    def test_all_canonical_keys_roundtrip(self):
        n = 7
        keys = all_canonical_keys(n)
        m = n * (n + 1) // 2
        assert len(keys) == m * (m + 1) // 2
        flat = quartet_flat_index(keys[:, 0], keys[:, 1], keys[:, 2], keys[:, 3], n)
        assert np.array_equal(flat, np.arange(len(keys)))

    def test_pair_index_enumeration(self):
        n = 5
        expect = 0
        for a in range(n):
            for b in range(a, n):
                assert pair_index(a, b, n) == expect
                assert pair_index(b, a, n) == expect
                expect += 1


@pytest.fixture(scope="module")
def small_tensor():
    basis = expand_shells([ShellSpec(s, (0.5, 1.3), absolute_units=True)
                           for s in range(2)])
    tensor = build_integral_tensor(basis, MORSE, 1e-14)
    return basis, tensor


class TestTensorBuild:
    def test_counts(self, small_tensor):
        basis, tensor = small_tensor
        n = basis.n
        m = n * (n + 1) // 2
        assert len(tensor.values) == m * (m + 1) // 2

    def test_lookup_symmetry(self, small_tensor, rng):
        basis, tensor = small_tensor
        n = basis.n
        for _ in range(200):
            a, b, c, d = rng.integers(0, n, size=4)
            base = tensor.lookup(a, b, c, d)
            for q in [(c, b, a, d), (b, a, d, c), (d, c, b, a)]:
                assert tensor.lookup(*q) == base

    def test_entries_match_scalar_op(self, small_tensor, rng):
        basis, tensor = small_tensor
        prims = basis.primitives
        for _ in range(30):
            a, b, c, d = rng.integers(0, basis.n, size=4)
            direct = two_particle_integral(prims[a], prims[b], prims[c], prims[d],
                                           MORSE)
            assert tensor.lookup(a, b, c, d) == pytest.approx(direct, rel=1e-10,
                                                              abs=1e-16)

    def test_depth_scaling_matches_recompute(self, small_tensor):
        basis, tensor = small_tensor
        rebuilt = build_integral_tensor(basis, standard_morse(6.0), 1e-14)
        assert np.allclose(tensor.values * 2.0, rebuilt.values, rtol=1e-12, atol=0)

    def test_parallel_build_bitwise_identical(self, small_tensor):
        basis, tensor = small_tensor
        par = build_integral_tensor(basis, MORSE, 1e-14, workers=2)
        assert np.array_equal(tensor.values, par.values)

    def test_screening_stores_exact_zero(self, small_tensor):
        basis, _ = small_tensor
        coarse = build_integral_tensor(basis, MORSE, threshold=1e-3)
        small = np.abs(coarse.values) < 1e-3
        assert np.all(coarse.values[small] == 0.0)

    def test_general_center_build_matches_scalar(self, rng):
        basis = expand_shells([ShellSpec(0, (0.6, 1.1), center=(0, 0, 0.2)),
                               ShellSpec(1, (0.8,), center=(0.1, 0, -0.1))])
        tensor = build_integral_tensor(basis, MORSE, 0.0)
        prims = basis.primitives
        for _ in range(10):
            a, b, c, d = rng.integers(0, basis.n, size=4)
            direct = two_particle_integral(prims[a], prims[b], prims[c], prims[d],
                                           MORSE)
            assert tensor.lookup(a, b, c, d) == pytest.approx(direct, rel=1e-11,
                                                              abs=1e-18)


class TestCacheFile:
    def test_save_load_roundtrip(self, small_tensor, tmp_path):
        basis, tensor = small_tensor
        path = tmp_path / "ints.bin"
        tensor.save(path)
        back = IntegralTensor.load(path, basis.n)
        assert np.array_equal(back.values, tensor.values)
        assert back.morse == tensor.morse
        assert back.threshold == tensor.threshold
        assert back.basis_hash == tensor.basis_hash

    def test_load_or_build_hits_cache(self, small_tensor, tmp_path):
        basis, tensor = small_tensor
        first = load_or_build(basis, MORSE, 1e-14, cache_dir=str(tmp_path))
        assert len(list(tmp_path.iterdir())) == 1
        again = load_or_build(basis, standard_morse(6.0), 1e-14,
                              cache_dir=str(tmp_path))
        assert len(list(tmp_path.iterdir())) == 1  # same unit-depth file reused
        assert np.allclose(again.values, 2.0 * first.values, rtol=1e-12)
        assert np.array_equal(first.values, tensor.values)

    def test_load_rejects_garbage(self, tmp_path):
        bad = tmp_path / "x.bin"
        bad.write_bytes(b"NOPE" + b"\0" * 100)
        from trapci.errors import AssemblyError
        with pytest.raises(AssemblyError):
            IntegralTensor.load(bad, 3)
