"""Compose the separated sectors into full wavefunctions and densities.

The upper-spinor / scalar wavefunction factorizes as R(r) T(theta) P(phi);
the azimuthal factor is normalized through the reflection-conjugation inner
product, the other two conventionally. The probability density is read as
|R|^2 |T|^2 |P|^2 with that azimuthal normalization (the non-Hermitian
sector does not define a unique density; this choice is the documented
convention throughout). The lower spinor component of the relativistic
problem follows from the upper one by (sigma . p)/(E + M) and is not
computed here.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from .azimuthal import (
    AzimuthalSolution,
    GeneratorFunction,
    analytic_phi_solution,
    phi_ode_residual,
    potential_from_generator,
    solve_phi_numeric,
)
from .errors import RealityToleranceError, SolverError
from .gridio import complex_record, dump_json, phi_nodes, write_columns_csv
from .polar import (
    AngularSolution,
    legendre_branch,
    solve_theta_numeric,
    theta_closed_form_half,
    theta_closed_form_sec2,
)
from .radial import (
    QuantumNumbers,
    RadialSolution,
    coulomb_lambda,
    dirac_self_consistent,
    hydrogenic_radial_solution,
    solve_radial_numeric,
    default_radial_box,
)
from .symmetry import (
    AzimuthalGrid,
    ComplexExp,
    Coulomb,
    Dirac,
    EquationKind,
    GeneratedFrom,
    HalfPolar,
    InverseCosSquared,
    PolarGrid,
    PotentialSpec,
    Schroedinger,
    SeparationConstants,
    ZeroPolar,
    ZeroRadial,
    effective_potential,
    is_real_within,
    lambda_map,
    REALITY_TOL,
)

__all__ = [
    "Wavefunction",
    "DensityGrid",
    "assemble",
    "density",
    "density_integral",
    "localization_ratio",
    "isospectral_experiment",
    "IsospectralReport",
    "export_density",
    "radial_density_peak",
]


@dataclass
class Wavefunction:
    """Product-state solution of the full separated problem."""

    radial: RadialSolution
    angular: AngularSolution
    azimuthal: AzimuthalSolution
    constants: SeparationConstants
    kind: EquationKind
    quantum: QuantumNumbers
    total_norm: float

    @property
    def energy(self) -> float:
        if isinstance(self.kind, Dirac):
            assert self.radial.E is not None
            return self.radial.E
        return self.constants.lam


@dataclass
class DensityGrid:
    """|wavefunction|^2 sampled on a product grid (density per unit volume)."""

    r: np.ndarray
    theta: np.ndarray
    phi: np.ndarray
    values: np.ndarray  # shape (len(r), len(theta), len(phi))


def _fill_excluded_periodic(values: np.ndarray, excluded: np.ndarray) -> np.ndarray:
    """Patch isolated division exclusions by periodic linear interpolation.

    Legitimate only for removable singularities (generator zeros cancelled
    by zeros of the numerator); genuine poles produce a potential that then
    fails the spectrum-membership check downstream.
    """
    if not excluded.any():
        return values
    n = len(values)
    idx = np.arange(n, dtype=float)
    good = ~excluded
    xp = np.concatenate([idx[good] - n, idx[good], idx[good] + n])
    fp = np.concatenate([values[good]] * 3)
    out = values.copy()
    out[excluded] = np.interp(idx[excluded], xp, fp.real) \
        + 1j * np.interp(idx[excluded], xp, fp.imag)
    return out


# ---------------------------------------------------------------------------
# Sector dispatch


def _solve_azimuthal(spec: PotentialSpec, eff_phi_scale: float,
                     quantum: QuantumNumbers, n_grid: int,
                     reality_tol: float) -> AzimuthalSolution:
    comp = spec.azimuthal
    if isinstance(comp, ComplexExp):
        # the kind scaling multiplies a^2; fold it into the coupling
        a_eff = comp.a * math.sqrt(eff_phi_scale)
        return analytic_phi_solution(quantum.m, a_eff, n_grid=n_grid)
    if isinstance(comp, GeneratedFrom):
        if comp.m != quantum.m:
            raise ValueError(
                f"generator magnetic number {comp.m} does not match requested m={quantum.m}"
            )
        if eff_phi_scale != 1.0:
            raise SolverError(
                "generator-form azimuthal potentials are defined at unit scale; "
                "energy-dependent scaling would change the generated family"
            )
        v_grid, excluded = potential_from_generator(comp.f_values, comp.m)
        if np.count_nonzero(excluded) > 0.05 * len(v_grid):
            raise SolverError(
                "generated potential has a broad division-exclusion zone; "
                "assemble needs a pole-free member of the family"
            )
        v_grid = _fill_excluded_periodic(v_grid, excluded)
        m2 = complex(quantum.m ** 2)
        phi = phi_nodes(len(comp.f_values))
        raw = np.exp(1j * quantum.m * phi) * comp.f_values
        from .specfun import quad_periodic

        c = 1.0 / math.sqrt(float(quad_periodic(np.abs(raw) ** 2).real))
        values = c * raw
        anchor = values[0]
        if abs(anchor) > 1e-12 * np.max(np.abs(values)):
            values = values * (abs(anchor) / anchor)
        sol = AzimuthalSolution(
            m=quantum.m, m_squared=m2, values=values, norm_constant=c,
            provenance="GeneratedF",
            residual=phi_ode_residual(values, v_grid, m2),
        )
        return sol
    assert isinstance(comp, AzimuthalGrid)
    v = eff_phi_scale * comp.values
    n_modes = max(1, min(len(v) // 4, quantum.m ** 2 * 2 + 4))
    sols = solve_phi_numeric(v, n_modes, reality_tol=reality_tol)
    target = float(quantum.m ** 2)
    best = min(sols, key=lambda s: abs(s.m_squared - target))
    return best


def _solve_polar(spec: PotentialSpec, kind: EquationKind, E: float,
                 quantum: QuantumNumbers, m_squared: float,
                 theta_grid_n: int = 800) -> AngularSolution:
    pol = spec.polar
    if isinstance(pol, ZeroPolar):
        return legendre_branch(quantum.k_or_l, quantum.m)
    if isinstance(pol, HalfPolar):
        return theta_closed_form_half(kind, E, quantum.m, quantum.k_or_l)
    if isinstance(pol, InverseCosSquared):
        return theta_closed_form_sec2(kind, E, quantum.m, quantum.k_or_l)
    assert isinstance(pol, PolarGrid)
    eff = effective_potential(spec, kind, E)
    sols = solve_theta_numeric(eff.v_theta, m_squared, quantum.k_or_l + 1,
                               n_grid=theta_grid_n)
    return sols[quantum.k_or_l]


def _solve_radial_schroedinger(spec: PotentialSpec, Lambda: float,
                               quantum: QuantumNumbers) -> RadialSolution:
    rad = spec.radial
    if isinstance(rad, Coulomb):
        if rad.strength == 0.0:
            raise SolverError("zero Coulomb strength binds no states")
        return hydrogenic_radial_solution(Lambda, quantum.n_r, rad.strength)
    if isinstance(rad, ZeroRadial):
        raise SolverError("free radial motion has no bound states")
    eff_v = lambda r: np.interp(r, rad.r, rad.values)
    strength_guess = max(abs(rad.values[0] * rad.r[0]), 0.5)
    r_max, n_grid = default_radial_box(strength_guess, Lambda, quantum.n_r)
    r_max = min(r_max, float(rad.r[-1]))
    sols = solve_radial_numeric(eff_v, Lambda, quantum.n_r + 1, r_max, n_grid,
                                bound_only=True)
    return sols[quantum.n_r]


# ---------------------------------------------------------------------------
# Assembly


def assemble(
    spec: PotentialSpec,
    kind: EquationKind,
    quantum: QuantumNumbers,
    phi_grid_n: int = 128,
    theta_grid_n: int = 800,
    reality_tol: float = REALITY_TOL,
) -> Wavefunction:
    """Chain the three sectors in dependency order m^2 -> Lam -> lam.

    The relativistic run wraps the chain in the energy fixed point; the
    nonrelativistic one runs it once. Sector reality checks apply the
    declared tolerance and raise instead of discarding.
    """
    if isinstance(kind, Dirac):
        radial = dirac_self_consistent(spec, kind.mass, quantum)
        E = radial.E
        assert E is not None
        eff_scale = 2.0 * (E + kind.mass)
    else:
        E = 0.0
        eff_scale = 1.0
        radial = None

    azim = _solve_azimuthal(spec, eff_scale, quantum, phi_grid_n, reality_tol)
    if not is_real_within(azim.m_squared, reality_tol):
        raise RealityToleranceError(
            f"azimuthal eigenvalue {azim.m_squared} violates the reality tolerance"
        )
    m2 = float(azim.m_squared.real)

    angular = _solve_polar(spec, kind, E, quantum, m2, theta_grid_n=theta_grid_n)

    if radial is None:
        radial = _solve_radial_schroedinger(spec, angular.Lambda, quantum)

    lam = radial.lam
    constants = SeparationConstants(
        m_squared=complex(azim.m_squared),
        Lambda=complex(angular.Lambda),
        lam=float(lam),
    )
    # every sector is individually normalized; keep the actual product
    from .polar import _closed_form_norm
    from .specfun import quad_periodic

    if angular._eval is not None:
        t_norm = _closed_form_norm(angular._eval) ** 2
    else:
        h_t = angular.theta[1] - angular.theta[0]
        t_norm = float(np.sum(angular.values ** 2 * np.sin(angular.theta)) * h_t)
    r_norm = float(np.trapezoid(radial.U ** 2, radial.r))
    p_norm = float(quad_periodic(np.abs(azim.values) ** 2).real)
    total = math.sqrt(r_norm * t_norm * p_norm)
    return Wavefunction(
        radial=radial,
        angular=angular,
        azimuthal=azim,
        constants=constants,
        kind=kind,
        quantum=quantum,
        total_norm=total,
    )


# ---------------------------------------------------------------------------
# Densities


def density(wf: Wavefunction, axes: tuple[np.ndarray, np.ndarray, np.ndarray]) -> DensityGrid:
    """Probability density |R T P|^2 on the product of the given axes."""
    r, theta, phi = (np.asarray(a, dtype=float) for a in axes)
    fr = np.abs(wf.radial.eval_R(r)) ** 2
    ft = np.abs(wf.angular.eval(theta)) ** 2
    fp = np.abs(wf.azimuthal.eval(phi)) ** 2
    vals = fr[:, None, None] * ft[None, :, None] * fp[None, None, :]
    return DensityGrid(r=r, theta=theta, phi=phi, values=vals / wf.total_norm ** 2)


def _simpson_weights(x: np.ndarray) -> np.ndarray:
    n = len(x)
    if n < 3 or n % 2 == 0:
        # trapezoid fallback on even sample counts
        w = np.full(n, 1.0)
        w[0] = w[-1] = 0.5
        return w * (x[1] - x[0])
    h = x[1] - x[0]
    w = np.ones(n)
    w[1:-1:2] = 4.0
    w[2:-1:2] = 2.0
    return w * (h / 3.0)


def density_integral(grid: DensityGrid) -> float:
    """Volume integral of the density with the r^2 sin(theta) measure.

    Simpson in r and theta (odd sample counts), periodic rectangle in phi.
    """
    wr = _simpson_weights(grid.r) * grid.r ** 2
    wt = _simpson_weights(grid.theta) * np.sin(grid.theta)
    wp = np.full(len(grid.phi), 2.0 * math.pi / len(grid.phi))
    return float(np.einsum("i,j,k,ijk->", wr, wt, wp, grid.values))


def radial_density_peak(wf: Wavefunction) -> float:
    """Location of the maximum of the radial probability profile |U|^2."""
    r = wf.radial.r
    u2 = wf.radial.U ** 2
    return float(r[np.argmax(u2)])


def localization_ratio(
    spec: PotentialSpec,
    kind: EquationKind,
    a_values: Sequence[float],
    quantum: QuantumNumbers,
    phi_grid_n: int = 128,
) -> list[tuple[float, float]]:
    """Azimuthal localization statistic across a coupling sweep.

    For each coupling the density is compared between the samples nearest
    phi = 0 and phi = pi, at the radial density peak and theta = pi/2.
    """
    if any(a < 0.0 for a in a_values):
        raise ValueError("couplings must be non-negative")
    if sorted(a_values) != list(a_values):
        raise ValueError("couplings must be ascending")
    out = []
    for a in a_values:
        swept = PotentialSpec(radial=spec.radial, polar=spec.polar,
                              azimuthal=ComplexExp(a=float(a)))
        wf = assemble(swept, kind, quantum, phi_grid_n=phi_grid_n)
        r_peak = radial_density_peak(wf)
        grid = density(
            wf,
            (np.array([r_peak]), np.array([math.pi / 2.0]),
             np.array([0.0, math.pi])),
        )
        d0 = grid.values[0, 0, 0]
        dpi = grid.values[0, 0, 1]
        out.append((float(a), float(d0 / dpi)))
    return out


# ---------------------------------------------------------------------------
# Isospectrality

@dataclass
class IsospectralReport:
    lambdas: list[float]
    energies: list[float]
    max_pairwise_delta: float
    membership_residuals: list[float]


def isospectral_experiment(
    generators: Sequence[GeneratorFunction],
    spec_base: PotentialSpec,
    kind: EquationKind,
    quantum: QuantumNumbers,
    membership_tol: float = 1e-6,
) -> IsospectralReport:
    """Full-problem spectra across one family of generated phi potentials.

    Every generator with the same magnetic number defines an azimuthal
    potential through the second-order identity; all of them must carry
    m^2 in their periodic spectrum (membership check), and the downstream
    eigenvalue lam may depend on the azimuthal sector only through m.
    """
    if len(generators) < 1:
        raise ValueError("need at least one generator")
    m = generators[0].m
    if any(g.m != m for g in generators):
        raise ValueError("generators must share the magnetic quantum number")
    if quantum.m != m:
        raise ValueError(f"quantum.m={quantum.m} does not match generators (m={m})")

    lambdas: list[float] = []
    energies: list[float] = []
    residuals: list[float] = []
    for g in generators:
        v_grid, excluded = potential_from_generator(g.f_values, m)
        if np.count_nonzero(excluded) > 0.05 * len(v_grid):
            raise SolverError("isospectral members must be pole-free")
        v_grid = _fill_excluded_periodic(v_grid, excluded)
        n_modes = min(len(v_grid) // 4, 2 * m * m + 4)
        sols = solve_phi_numeric(v_grid, max(n_modes, 1))
        target = float(m * m)
        best = min(abs(s.m_squared - target) for s in sols)
        residuals.append(float(best))
        if best > membership_tol:
            raise SolverError(
                f"generated potential misses m^2={target}: nearest eigenvalue "
                f"is off by {best:.3e}"
            )
        swept = PotentialSpec(radial=spec_base.radial, polar=spec_base.polar,
                              azimuthal=GeneratedFrom(f_values=g.f_values, m=m))
        wf = assemble(swept, kind, quantum)
        lambdas.append(wf.constants.lam)
        energies.append(wf.energy)
    deltas = [abs(a - b) for i, a in enumerate(lambdas) for b in lambdas[i + 1:]]
    return IsospectralReport(
        lambdas=lambdas,
        energies=energies,
        max_pairwise_delta=max(deltas) if deltas else 0.0,
        membership_residuals=residuals,
    )


# ---------------------------------------------------------------------------
# Export contract consumed by the plotting frontend


def export_density(grid: DensityGrid, wf: Wavefunction, out_dir: str | Path,
                   tag: str, extra: Optional[dict] = None) -> tuple[Path, Path]:
    """Write one density grid as CSV plus its JSON sidecar.

    CSV columns are (r, theta, phi, density) over the full product grid;
    the sidecar carries quantum numbers, separation constants, norm
    constants and the fixed slice used for azimuthal profiles.
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    csv_path = out_dir / f"density_{tag}.csv"
    json_path = out_dir / f"density_{tag}.json"

    nr, nt, np_ = len(grid.r), len(grid.theta), len(grid.phi)
    rr = np.repeat(grid.r, nt * np_)
    tt = np.tile(np.repeat(grid.theta, np_), nr)
    pp = np.tile(grid.phi, nr * nt)
    write_columns_csv(csv_path, ["r", "theta", "phi", "density"],
                      [rr, tt, pp, grid.values.ravel()])

    sidecar = {
        "tag": tag,
        "quantum": {"n_r": wf.quantum.n_r, "k_or_l": wf.quantum.k_or_l,
                    "m": wf.quantum.m},
        "lambda": wf.constants.lam,
        "energy": wf.energy,
        "Lambda": complex_record(wf.constants.Lambda),
        "m_squared": complex_record(wf.constants.m_squared),
        "norm_constant_phi": wf.azimuthal.norm_constant,
        "total_norm": wf.total_norm,
        "slice": {"r": radial_density_peak(wf), "theta": math.pi / 2.0},
        "axes": {"n_r_samples": nr, "n_theta_samples": nt, "n_phi_samples": np_},
    }
    if extra:
        sidecar.update(extra)
    dump_json(sidecar, json_path)
    return csv_path, json_path
