"""Radial sector: Coulomb closed form, FD bound states, relativistic loop.

Oracles: the hydrogen-like formula lam = -strength^2/[4 N^2] in the
H = -laplacian + V units, node counting, second-order grid convergence,
and the linearized closed form E = M (N^2 - alpha^2)/(N^2 + alpha^2) for
the equally-mixed relativistic Coulomb problem.
"""

import math

import numpy as np
import pytest

from pseudopt import (
    BoundStateError,
    ComplexExp,
    Coulomb,
    PotentialSpec,
    QuantumNumbers,
    RealityToleranceError,
    ZeroPolar,
    coulomb_lambda,
    dirac_self_consistent,
    effective_l,
    hydrogenic_radial_solution,
    solve_radial_numeric,
)
from pseudopt.radial import default_radial_box


def _coulomb(r):
    return -1.0 / r


class TestEffectiveL:
    def test_values(self):
        assert effective_l(0.0) == 0.0
        assert effective_l(2.0) == pytest.approx(1.0, abs=1e-15)
        assert effective_l(1.2071067811865475) == pytest.approx(0.7071067811865476,
                                                                abs=1e-12)

    def test_fall_to_center_rejected(self):
        with pytest.raises(ValueError):
            effective_l(-0.3)


class TestCoulombLambda:
    def test_reference_values(self):
        assert coulomb_lambda(0.0, 0, 1.0) == pytest.approx(-0.25, abs=1e-15)
        assert coulomb_lambda(2.0, 0, 1.0) == pytest.approx(-1.0 / 16.0, abs=1e-15)
        assert coulomb_lambda(1.2071067811865475, 0, 1.0) == pytest.approx(
            -0.08578643762690495, abs=1e-12
        )

    def test_validation(self):
        with pytest.raises(ValueError):
            coulomb_lambda(0.0, -1, 1.0)
        with pytest.raises(ValueError):
            coulomb_lambda(0.0, 0, 0.0)


class TestNumericRadial:
    def test_ground_state(self):
        sols = solve_radial_numeric(_coulomb, 0.0, 1, 60.0, 3000)
        assert sols[0].lam == pytest.approx(-0.25, abs=1e-4)
        assert sols[0].n_r == 0

    def test_centrifugal_channel(self):
        sols = solve_radial_numeric(_coulomb, 2.0, 1, 240.0, 11000)
        assert sols[0].lam == pytest.approx(-0.0625, rel=1e-4)

    def test_free_particle_has_no_bound_states(self):
        sols = solve_radial_numeric(lambda r: np.zeros_like(r), 0.0, 4, 40.0, 1200)
        assert all(s.lam > 0.0 for s in sols)

    def test_node_counts(self):
        sols = solve_radial_numeric(_coulomb, 0.0, 3, 540.0, 24000)
        assert [s.n_r for s in sols] == [0, 1, 2]

    def test_monotone_in_lambda(self):
        ground = []
        for lam_sep in (0.0, 2.0, 6.0):
            r_max, n = default_radial_box(1.0, lam_sep, 0)
            ground.append(solve_radial_numeric(_coulomb, lam_sep, 1, r_max, n)[0].lam)
        assert ground[0] < ground[1] < ground[2]

    def test_second_order_convergence(self):
        errs = []
        for n in (1500, 3000, 6000):
            lam = solve_radial_numeric(_coulomb, 0.0, 1, 60.0, n)[0].lam
            errs.append(abs(lam + 0.25))
        assert 3.5 < errs[0] / errs[1] < 4.5
        assert 3.5 < errs[1] / errs[2] < 4.5

    def test_small_box_detected(self):
        with pytest.raises(BoundStateError):
            solve_radial_numeric(_coulomb, 0.0, 1, 15.0, 800)

    def test_bound_only_filter(self):
        with pytest.raises(BoundStateError):
            solve_radial_numeric(lambda r: np.zeros_like(r), 0.0, 2, 40.0, 1200,
                                 bound_only=True)

    def test_validation(self):
        with pytest.raises(ValueError):
            solve_radial_numeric(_coulomb, -0.5, 1, 60.0, 3000)
        with pytest.raises(ValueError):
            solve_radial_numeric(_coulomb, 0.0, 0, 60.0, 3000)


class TestHydrogenicClosedForm:
    @pytest.mark.parametrize("n_r,Lambda", [(0, 0.0), (1, 0.0), (0, 2.0), (2, 0.0)])
    def test_matches_numeric(self, n_r, Lambda):
        sol = hydrogenic_radial_solution(Lambda, n_r, 1.0)
        r_max, n = default_radial_box(1.0, Lambda, n_r)
        num = solve_radial_numeric(_coulomb, Lambda, n_r + 1, r_max, n)[n_r]
        assert sol.lam == pytest.approx(num.lam, rel=2e-4)
        assert sol.n_r == n_r

    def test_normalized(self):
        sol = hydrogenic_radial_solution(0.0, 1, 1.0)
        assert np.trapezoid(sol.U ** 2, sol.r) == pytest.approx(1.0, abs=1e-8)

    def test_fractional_index(self):
        lam_sep = 1.2071067811865475
        sol = hydrogenic_radial_solution(lam_sep, 0, 1.0)
        assert sol.lam == pytest.approx(-0.08578643762690495, abs=1e-12)


def _coulomb_spec(alpha):
    return PotentialSpec(radial=Coulomb(strength=alpha), polar=ZeroPolar(),
                         azimuthal=ComplexExp(a=0.0))


class TestDiracSelfConsistent:
    @pytest.mark.parametrize("alpha", [0.05, 0.1, 0.2])
    @pytest.mark.parametrize("n_r,l", [(0, 0), (1, 0), (0, 1)])
    def test_matches_linearized_closed_form(self, alpha, n_r, l):
        big_n = n_r + l + 1
        want = 1.0 * (big_n ** 2 - alpha ** 2) / (big_n ** 2 + alpha ** 2)
        sol = dirac_self_consistent(_coulomb_spec(alpha), 1.0,
                                    QuantumNumbers(n_r=n_r, k_or_l=l, m=0))
        assert sol.E == pytest.approx(want, abs=1e-8)

    def test_zero_coupling_gives_rest_energy(self):
        sol = dirac_self_consistent(_coulomb_spec(0.0), 1.0,
                                    QuantumNumbers(n_r=0, k_or_l=0, m=0))
        assert sol.E == 1.0
        assert sol.lam == 0.0

    def test_fixed_point_consistency(self):
        sol = dirac_self_consistent(_coulomb_spec(0.1), 1.0,
                                    QuantumNumbers(n_r=0, k_or_l=0, m=0),
                                    tol=1e-12)
        assert abs(sol.lam - (sol.E ** 2 - 1.0)) < 1e-10

    def test_negative_branch_collapses_to_free_limit(self):
        # equally-mixed potentials decouple from the lower branch: the
        # effective coupling 2 (E + M) V vanishes as E -> -M
        sol = dirac_self_consistent(_coulomb_spec(0.1), 1.0,
                                    QuantumNumbers(n_r=0, k_or_l=0, m=0),
                                    negative_branch=True)
        assert sol.E == pytest.approx(-1.0, abs=1e-9)
        assert sol.lam == pytest.approx(0.0, abs=1e-9)
