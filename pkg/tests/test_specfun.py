"""Special-function layer against independent oracles.

Oracles: mpmath's own Bessel implementations (different algorithm family),
the Rodrigues construction for associated Legendre, exact rational
summation for the terminating hypergeometric, and grid refinement for the
periodic quadrature.
"""

import math

import mpmath as mp
import numpy as np
import pytest

from pseudopt import (
    SeriesControl,
    assoc_legendre,
    bessel_i,
    bessel_k,
    hyp2f1_terminating,
    quad_periodic,
)


class TestBesselI:
    def test_trivial_at_origin(self):
        assert bessel_i(0, 0.0) == 1.0 + 0.0j
        assert bessel_i(2, 0.0) == 0.0 + 0.0j

    def test_series_oracle_value(self):
        # power series summed to machine precision
        assert bessel_i(0, 1.0) == pytest.approx(1.2660658777520084, abs=1e-14)

    @pytest.mark.parametrize("nu", [0, 1, 2, 3, 4, 6, 8, 12, 20, 0.5, 2.5])
    def test_against_mpmath_on_disk(self, nu):
        rng = np.random.default_rng(42 + int(2 * nu))
        for _ in range(12):
            z = rng.uniform(0.01, 50.0) * np.exp(1j * rng.uniform(-np.pi, np.pi))
            ref = complex(mp.besseli(float(nu), mp.mpc(z)))
            val = bessel_i(float(nu), complex(z))
            assert abs(val - ref) <= 1e-12 * max(abs(ref), 1e-280)

    @pytest.mark.parametrize("a", [0.5, 1.0, 2.0])
    @pytest.mark.parametrize("nu", [0, 2, 4])
    def test_defining_ode_on_arcs(self, nu, a):
        # z^2 w'' + z w' - (z^2 + nu^2) w = 0, five-point differences along the arc
        h = 1e-3
        for phi in np.linspace(0.1, 2 * np.pi - 0.1, 7):
            z = 2 * a * np.exp(0.5j * phi)
            f = [bessel_i(nu, z + s * h) for s in (-2, -1, 0, 1, 2)]
            d1 = (f[0] - 8 * f[1] + 8 * f[3] - f[4]) / (12 * h)
            d2 = (-f[0] + 16 * f[1] - 30 * f[2] + 16 * f[3] - f[4]) / (12 * h * h)
            res = z * z * d2 + z * d1 - (z * z + nu * nu) * f[2]
            assert abs(res) < 1e-6

    def test_conjugate_reflection(self):
        rng = np.random.default_rng(7)
        for _ in range(20):
            nu = rng.choice([0, 1, 2, 3, 5])
            z = complex(rng.uniform(-8, 8), rng.uniform(-8, 8))
            assert bessel_i(float(nu), np.conj(z)) == pytest.approx(
                np.conj(bessel_i(float(nu), z)), abs=1e-13
            )

    def test_input_validation(self):
        with pytest.raises(ValueError):
            bessel_i(-1.0, 1.0)
        with pytest.raises(ValueError):
            bessel_i(0.0, complex(np.inf, 0.0))
        with pytest.raises(ValueError):
            bessel_i(0.0, 800.0)

    def test_series_control_validation(self):
        with pytest.raises(ValueError):
            SeriesControl(rel_tol=0.0)
        with pytest.raises(ValueError):
            SeriesControl(max_terms=0)


class TestBesselK:
    def test_half_integer_closed_form(self):
        # K_{1/2}(z) = sqrt(pi/(2z)) exp(-z)
        want = math.sqrt(math.pi / 2.0) * math.exp(-1.0)
        assert bessel_k(0.5, 1.0) == pytest.approx(want, abs=1e-12)

    def test_real_positive_on_axis(self):
        for z in [0.3, 1.0, 2.0, 5.0]:
            val = bessel_k(0.0, z)
            assert val.imag == pytest.approx(0.0, abs=1e-12)
            assert val.real > 0.0

    def test_branch_cut_jump(self):
        # crossing the negative real axis picks up the first-kind term
        jump = abs(bessel_k(0, 2.0 * np.exp(1j * np.pi)) - bessel_k(0, 2.0))
        assert jump > 0.1
        assert jump == pytest.approx(np.pi * abs(bessel_i(0, 2.0)), rel=1e-8)

    @pytest.mark.parametrize("nu", [0, 1, 2, 3, 4])
    def test_against_mpmath(self, nu):
        for z in [0.4, 1.3, 4.0, 9.5]:
            ref = complex(mp.besselk(nu, z))
            assert abs(bessel_k(nu, z) - ref) <= 1e-10 * abs(ref)

    def test_singular_origin(self):
        with pytest.raises(ValueError):
            bessel_k(0, 0.0)

    @pytest.mark.parametrize("nu", [0, 1, 2, 3])
    def test_wronskian_with_i(self, nu):
        # I_nu K_{nu+1} + I_{nu+1} K_nu = 1/z on the positive axis
        for z in np.linspace(0.5, 10.0, 8):
            lhs = bessel_i(nu, z) * bessel_k(nu + 1, z) \
                + bessel_i(nu + 1, z) * bessel_k(nu, z)
            assert abs(lhs - 1.0 / z) < 1e-10


def _rodrigues_oracle(l: int, m: int, x: float) -> float:
    """P_l^m from the Rodrigues construction with exact polynomial algebra."""
    if l == 0:
        base = np.polynomial.Polynomial([1.0])
    else:
        base = np.polynomial.Polynomial.fromroots([-1.0] * l + [1.0] * l)
    base = base / (2.0 ** l * math.factorial(l))
    deriv = base.deriv(l + m) if l + m > 0 else base
    return (-1.0) ** m * (1.0 - x * x) ** (m / 2.0) * deriv(x)


class TestAssocLegendre:
    def test_known_values(self):
        assert assoc_legendre(1, 0, 0.5) == pytest.approx(0.5, abs=1e-15)
        assert assoc_legendre(2, 0, 0.5) == pytest.approx(-0.125, abs=1e-15)
        # Condon-Shortley sign on P_1^1
        assert assoc_legendre(1, 1, 0.0) == pytest.approx(-1.0, abs=1e-15)

    def test_rodrigues_oracle(self):
        rng = np.random.default_rng(3)
        xs = rng.uniform(-1.0, 1.0, 20)
        for l in range(6):
            for m in range(l + 1):
                for x in xs:
                    assert assoc_legendre(l, m, float(x)) == pytest.approx(
                        _rodrigues_oracle(l, m, float(x)), abs=1e-12
                    )

    def test_negative_m_relation(self):
        for l in range(1, 5):
            for m in range(1, l + 1):
                lhs = assoc_legendre(l, -m, 0.3)
                rhs = (-1.0) ** m * math.factorial(l - m) / math.factorial(l + m) \
                    * assoc_legendre(l, m, 0.3)
                assert lhs == pytest.approx(rhs, rel=1e-13)

    def test_domain_errors(self):
        with pytest.raises(ValueError):
            assoc_legendre(1, 2, 0.0)
        with pytest.raises(ValueError):
            assoc_legendre(1, 0, 1.5)


class TestHyp2F1Terminating:
    def test_empty_and_short_sums(self):
        assert hyp2f1_terminating(0, 3.7, -2.5, 0.9) == 1.0
        assert hyp2f1_terminating(1, 2.0, 3.0, 0.5) == pytest.approx(2.0 / 3.0, abs=1e-15)
        assert hyp2f1_terminating(2, 2.0, 3.0, 1.0) == pytest.approx(1.0 / 6.0, abs=1e-14)

    def test_extended_precision_oracle(self):
        rng = np.random.default_rng(11)
        with mp.workdps(40):
            for _ in range(25):
                k = int(rng.integers(0, 7))
                b = float(rng.uniform(-3, 5))
                d = float(rng.uniform(0.5, 5))
                y = float(rng.uniform(-1, 1))
                acc = mp.mpf(1)
                term = mp.mpf(1)
                for j in range(k):
                    term *= mp.mpf(-(k - j)) * (b + j) / ((d + j) * (j + 1)) * y
                    acc += term
                assert hyp2f1_terminating(k, b, d, y) == pytest.approx(
                    float(acc), rel=1e-13, abs=1e-13
                )

    def test_pole_detection(self):
        with pytest.raises(ValueError):
            hyp2f1_terminating(3, 1.0, -1.0, 0.5)
        # d = -k is allowed (pole set stops at -(k-1))
        hyp2f1_terminating(2, 1.0, -2.0, 0.5)


class TestQuadPeriodic:
    def test_constant(self):
        for n in (8, 64, 101):
            assert quad_periodic(np.ones(n)) == pytest.approx(2 * np.pi, rel=1e-15)

    def test_pure_mode_integrates_to_zero(self):
        phi = 2 * np.pi * np.arange(64) / 64
        assert abs(quad_periodic(np.exp(1j * phi))) < 1e-14

    def test_grid_refinement_oracle(self):
        def integrand(n):
            phi = 2 * np.pi * np.arange(n) / n
            vals = np.array([abs(bessel_i(0, 2 * np.exp(0.5j * p))) ** 2 for p in phi])
            return quad_periodic(vals)

        coarse = integrand(256)
        fine = integrand(2560)
        assert abs(coarse - fine) < 1e-10

    def test_too_few_samples(self):
        with pytest.raises(ValueError):
            quad_periodic(np.ones(7))

    def test_rejects_non_finite(self):
        bad = np.ones(16, dtype=complex)
        bad[3] = np.nan
        with pytest.raises(ValueError):
            quad_periodic(bad)
