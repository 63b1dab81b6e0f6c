import math

import numpy as np
import pytest
from scipy.special import digamma, gamma as Gamma, hyp1f1, hyperu

from trapci.errors import InvalidParameterError
from trapci.model import D_HO, MorseParams, standard_morse
from trapci.reference import (LABELS, RadialProblem, bound_state_count,
                              compose_totals, pole_positions,
                              radial_spectrum, radial_wavefunction,
                              reference_density_cut, scattering_length)

EULER = 0.5772156649015329


def analytic_scattering_length(morse: MorseParams) -> float:
    """Exact zero-energy scattering length of the half-line Morse problem.

    The zero-energy radial equation solves in Whittaker functions of
    y = k e^(-am (r - Rm)), k = 2 sqrt(De)/am; matching the u(0) = 0 solution
    to its r -> inf form alpha + beta r gives a_s in closed form through
    Kummer/Tricomi functions.  Entirely independent of the Numerov route.
    """
    a = morse.am_abs
    R = morse.rm_abs
    de = morse.De
    if de == 0:
        return 0.0
    k = 2.0 * math.sqrt(de) / a
    a0 = 0.5 - math.sqrt(de) / a
    y0 = k * math.exp(a * R)
    M = hyp1f1(a0, 1.0, y0)
    W = hyperu(a0, 1.0, y0)
    a_abs = (W / M * Gamma(a0) + math.log(k) + a * R + digamma(a0) + 2 * EULER) / a
    return a_abs / D_HO


def analytic_pole_positions(rm_dho, am_dho, de_max=70.0):
    """Depths where the scattering length diverges: zeros of the Kummer factor."""
    from scipy.optimize import brentq

    m0 = MorseParams(1.0, rm_dho, am_dho)
    a, R = m0.am_abs, m0.rm_abs

    def f(de):
        return hyp1f1(0.5 - math.sqrt(de) / a, 1.0, 2 * math.sqrt(de) / a
                      * math.exp(a * R))

    des = np.linspace(0.5, de_max, 1500)
    vals = [f(d) for d in des]
    out = []
    for i in range(len(des) - 1):
        if np.sign(vals[i]) != np.sign(vals[i + 1]):
            out.append(brentq(f, des[i], des[i + 1], xtol=1e-10))
    return out


class TestRadialSpectrum:
    def test_noninteracting_oscillator_levels(self):
        prob = RadialProblem(standard_morse(0.0), ell=0)
        assert np.allclose(radial_spectrum(prob, 3), [1.5, 3.5, 5.5], atol=1e-6)
        prob2 = RadialProblem(standard_morse(0.0), ell=2)
        assert np.allclose(radial_spectrum(prob2, 2), [3.5, 5.5], atol=1e-6)

    def test_grid_refinement_stability(self):
        prob = RadialProblem(standard_morse(5.0), n_points=20000)
        e1 = radial_spectrum(prob, 4)
        e2 = radial_spectrum(RadialProblem(standard_morse(5.0), n_points=40000), 4)
        assert np.max(np.abs(e1 - e2)) < 1e-5

    def test_validation(self):
        with pytest.raises(InvalidParameterError):
            RadialProblem(standard_morse(1.0), ell=-1)
        with pytest.raises(InvalidParameterError):
            RadialProblem(standard_morse(1.0), n_points=100)

    def test_wavefunction_normalized(self):
        prob = RadialProblem(standard_morse(3.0))
        r, u, e = radial_wavefunction(prob, 0)
        h = r[1] - r[0]
        assert np.sum(u * u) * h == pytest.approx(1.0, rel=1e-12)
        assert e == pytest.approx(0.983, abs=2e-3)


class TestScatteringLength:
    @pytest.mark.parametrize("de", [0.7, 3.0, 5.0, 10.0, 13.0, 30.0])
    def test_matches_analytic(self, de):
        m = standard_morse(de)
        got = scattering_length(m).as_dho
        want = analytic_scattering_length(m)
        assert got == pytest.approx(want, rel=2e-5, abs=2e-5)

    def test_weak_depth_born_limit(self):
        # weak attraction: a_s -> 0 from below, approaching the Born value
        # (2 mu / hbar^2) int U(r) r^2 dr
        from scipy.integrate import quad
        from trapci.model import morse_value_abs

        m = standard_morse(0.05)
        a = scattering_length(m).as_dho
        born_abs, _ = quad(lambda r: morse_value_abs(m, r) * r * r, 0, 10,
                           epsabs=0, epsrel=1e-10, limit=200)
        assert a < 0
        assert a == pytest.approx(born_abs / D_HO, rel=0.1)

    def test_zero_depth(self):
        assert scattering_length(standard_morse(0.0)).as_dho == 0.0

    def test_pole_flagging(self):
        res = scattering_length(standard_morse(3.8138))
        assert not res.converged  # |a_s| beyond the pole cutoff


class TestPoles:
    def test_against_analytic_zeros(self):
        from trapci.model import STANDARD_AM_DHO, STANDARD_RM_DHO
        got = pole_positions(0.5, 70.0, STANDARD_RM_DHO, STANDARD_AM_DHO)
        want = analytic_pole_positions(STANDARD_RM_DHO, STANDARD_AM_DHO)
        assert len(got) == 3
        assert np.allclose(got, want, atol=1e-3)

    def test_no_pole_range(self):
        from trapci.model import STANDARD_AM_DHO, STANDARD_RM_DHO
        assert pole_positions(0.5, 2.0, STANDARD_RM_DHO, STANDARD_AM_DHO,
                              n_scan=40) == []

    def test_bound_state_count_increments(self):
        # one new s-wave bound state appears across each pole
        counts = [bound_state_count(standard_morse(d), r_max=25.0)
                  for d in (2.0, 6.0, 30.0, 68.0)]
        assert counts == [0, 1, 2, 3]


class TestComposedTotals:
    def test_ladder_spacing_exact(self):
        ref = compose_totals(standard_morse(3.0))
        assert ref.energy("MS1") - ref.energy("MGS") == pytest.approx(1.0, abs=1e-12)
        assert ref.energy("MS2") - ref.energy("MGS") == pytest.approx(2.0, abs=1e-12)

    def test_trap_state_weak_interaction_limit(self):
        ref = compose_totals(standard_morse(0.05))
        assert ref.energy("TS1") == pytest.approx(5.0, abs=0.05)
        assert ref.energy("TS3") == pytest.approx(5.0, abs=0.05)
        assert ref.angular_momentum("TS3") == 2

    def test_de3_values(self):
        ref = compose_totals(standard_morse(3.0))
        assert ref.energy("MGS") == pytest.approx(2.483, abs=2e-3)
        assert ref.energy("MS1") == pytest.approx(3.483, abs=2e-3)
        assert ref.energy("MS2") == pytest.approx(4.483, abs=2e-3)


class TestReferenceDensity:
    def test_noninteracting_product_of_gaussians(self):
        z = np.linspace(-2.5, 2.5, 81)
        cut = reference_density_cut(standard_morse(0.0), "MGS", z)
        expect = np.exp(-2.0 * np.add.outer(z ** 2, z ** 2))
        expect *= cut.density.max() / expect.max()
        assert np.allclose(cut.density, expect, rtol=5e-4, atol=1e-7)

    def test_ms1_antidiagonal_node(self):
        z = np.linspace(-3.0, 3.0, 101)
        cut = reference_density_cut(standard_morse(3.0), "MS1", z)
        assert np.max(cut.antidiag) < 1e-25 * np.max(cut.density)

    def test_deep_state_antidiagonal_dip(self):
        # the strongly bound pair shows a central dip along z1 = -z2
        z = np.linspace(-1.5, 1.5, 201)
        cut = reference_density_cut(standard_morse(13.0), "MGS", z)
        anti = cut.antidiag
        mid = len(z) // 2
        assert anti[mid] < 0.99 * np.max(anti)
        assert np.argmax(anti) != mid

    def test_unknown_label(self):
        with pytest.raises(InvalidParameterError):
            reference_density_cut(standard_morse(1.0), "XX", np.linspace(-1, 1, 5))
