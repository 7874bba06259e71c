"""Potential model, effective-potential map and the azimuthal symmetry ops."""

import numpy as np
import pytest

from pseudopt import (
    AzimuthalGrid,
    ComplexExp,
    Coulomb,
    Dirac,
    PolarGrid,
    PotentialSpec,
    Schroedinger,
    ZeroPolar,
    ZeroRadial,
    apply_parity_phi,
    apply_timereversal_phi,
    effective_potential,
    lambda_map,
    preset_spec,
    pt_defect,
)
from pseudopt.gridio import phi_nodes
from pseudopt.symmetry import azimuthal_samples, resample_periodic


def _spec(a=1.0):
    return PotentialSpec(radial=Coulomb(1.0), polar=ZeroPolar(), azimuthal=ComplexExp(a=a))


class TestEffectivePotential:
    def test_schroedinger_identity(self):
        eff = effective_potential(_spec(), Schroedinger())
        r = np.array([0.5, 1.0, 2.0])
        assert eff.v_r(r) == pytest.approx(-1.0 / r)
        assert eff.scale == 1.0

    def test_dirac_radial_scaling(self):
        eff = effective_potential(_spec(), Dirac(mass=1.0), E=1.0)
        r = np.array([1.0, 4.0])
        assert eff.v_r(r) == pytest.approx(-4.0 / r)

    def test_dirac_azimuthal_scaling(self):
        eff = effective_potential(_spec(a=1.0), Dirac(mass=1.0), E=1.0)
        v = eff.v_phi(64)
        phi = phi_nodes(64)
        assert np.allclose(v, -4.0 * np.exp(1j * phi), atol=1e-14)

    def test_degenerate_scaling_rejected(self):
        with pytest.raises(ValueError):
            effective_potential(_spec(), Dirac(mass=1.0), E=-1.0)

    def test_same_factor_all_components(self):
        theta = np.linspace(0.0, np.pi, 33)
        spec = PotentialSpec(
            radial=Coulomb(2.0),
            polar=PolarGrid(theta=theta, values=np.full_like(theta, 0.25)),
            azimuthal=ComplexExp(a=0.5),
        )
        eff = effective_potential(spec, Dirac(mass=2.0), E=1.5)
        scale = 2.0 * (1.5 + 2.0)
        assert eff.v_r(np.array([2.0]))[0] == pytest.approx(scale * (-1.0))
        assert eff.v_theta(np.array([1.0]))[0] == pytest.approx(scale * 0.25)
        assert eff.v_phi(32)[0] == pytest.approx(scale * (-0.25))


class TestLambdaMap:
    def test_values(self):
        assert lambda_map(Schroedinger(), 5.0) == 5.0
        assert lambda_map(Dirac(mass=1.0), 1.0) == 0.0
        assert lambda_map(Dirac(mass=3.0), 5.0) == pytest.approx(16.0)

    def test_consistency_relation(self):
        rng = np.random.default_rng(0)
        for _ in range(25):
            m = float(rng.uniform(0.1, 5.0))
            e = float(rng.uniform(-4.0, 4.0))
            assert abs(lambda_map(Dirac(mass=m), e) + m * m - e * e) < 1e-14 * max(1.0, e * e)

    def test_non_finite_rejected(self):
        with pytest.raises(ValueError):
            lambda_map(Schroedinger(), float("nan"))


class TestParityAndTimeReversal:
    def test_constant_unchanged(self):
        v = np.full(16, 2.5 + 0.0j)
        assert np.array_equal(apply_parity_phi(v), v)

    def test_mode_reflection(self):
        phi = phi_nodes(64)
        assert np.allclose(apply_parity_phi(np.exp(1j * phi)), np.exp(-1j * phi), atol=1e-15)
        assert np.allclose(apply_timereversal_phi(np.exp(1j * phi)), np.exp(-1j * phi))

    def test_involutions_bit_exact(self):
        rng = np.random.default_rng(5)
        v = rng.normal(size=33) + 1j * rng.normal(size=33)
        assert np.array_equal(apply_parity_phi(apply_parity_phi(v)), v)
        assert np.array_equal(apply_timereversal_phi(apply_timereversal_phi(v)), v)
        combined = apply_timereversal_phi(apply_parity_phi(v))
        back = apply_timereversal_phi(apply_parity_phi(combined))
        assert np.array_equal(back, v)

    def test_real_grid_fixed_by_timereversal(self):
        v = np.linspace(-1, 1, 16).astype(complex)
        assert np.array_equal(apply_timereversal_phi(v), v)


class TestPTDefect:
    def test_complex_exp_symmetric(self):
        phi = phi_nodes(128)
        assert pt_defect(-np.exp(1j * phi)) < 1e-14

    def test_tan_family_symmetric_off_poles(self):
        # V = -[1 + 2 i m tan(phi)] for m = 1, poles masked
        phi = phi_nodes(128)
        with np.errstate(divide="ignore", invalid="ignore"):
            v = -(1.0 + 2j * np.tan(phi))
        excluded = np.abs(np.cos(phi)) < 1e-10
        v = np.where(excluded, 0.0, v)
        assert pt_defect(v, excluded=excluded) < 1e-12

    def test_linear_phase_not_symmetric(self):
        phi = phi_nodes(64)
        assert pt_defect(1j * phi) > 1.0

    def test_presets_are_symmetric(self):
        for name in ("coulomb-a0", "coulomb-a1", "coulomb-a2", "hartmann"):
            spec, kind, _ = preset_spec(name)
            v = azimuthal_samples(spec.azimuthal, 128)
            assert pt_defect(v) < 1e-12

    def test_all_excluded_rejected(self):
        v = np.ones(8, dtype=complex)
        with pytest.raises(ValueError):
            pt_defect(v, excluded=np.ones(8, dtype=bool))


class TestValidation:
    def test_component_validation(self):
        with pytest.raises(ValueError):
            Coulomb(strength=-1.0)
        with pytest.raises(ValueError):
            ComplexExp(a=-0.5)
        with pytest.raises(ValueError):
            Dirac(mass=0.0)
        with pytest.raises(ValueError):
            AzimuthalGrid(values=np.array([1.0, np.nan, 1, 1, 1, 1, 1, 1], dtype=complex))
        with pytest.raises(ValueError):
            PolarGrid(theta=np.array([0.0, 1.0]), values=np.array([1.0]))

    def test_unknown_preset(self):
        with pytest.raises(KeyError):
            preset_spec("no-such-preset")


class TestResample:
    def test_band_limited_exact(self):
        phi = phi_nodes(32)
        f = np.exp(1j * phi) + 0.3 * np.exp(-2j * phi)
        up = resample_periodic(f, 64)
        phi2 = phi_nodes(64)
        assert np.allclose(up, np.exp(1j * phi2) + 0.3 * np.exp(-2j * phi2), atol=1e-13)

    def test_identity(self):
        f = np.exp(1j * phi_nodes(16))
        assert np.array_equal(resample_periodic(f, 16), f)
