"""Radial sector: bound states of the reduced equation

    -U'' + [Lam / r^2 + V_eff(r)] U = lam U,   U(0) = 0 = U(r_max),

with U(r) = r R(r). The operator convention H = -laplacian + V fixes the
units hbar = 2m = 1, so the attractive Coulomb tail -alpha/r carries the
hydrogen-like spectrum lam_N = -alpha^2 / (4 N^2) with the (generally
non-integer) effective angular index recovered from Lam.

The Dirac branch couples the potential scale and the separation constant to
the energy; a damped fixed-point iteration on E = sqrt(lam + M^2) closes the
system.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from scipy.linalg import eigh_tridiagonal
from scipy.special import eval_genlaguerre

from .errors import BoundStateError, ConvergenceError, RealityToleranceError
from .symmetry import (
    Coulomb,
    Dirac,
    EquationKind,
    PotentialSpec,
    Schroedinger,
    effective_potential,
    lambda_map,
)

__all__ = [
    "RadialSolution",
    "effective_l",
    "coulomb_lambda",
    "solve_radial_numeric",
    "hydrogenic_radial_solution",
    "dirac_self_consistent",
    "default_radial_box",
    "QuantumNumbers",
]


@dataclass(frozen=True)
class QuantumNumbers:
    """Channel labels: radial node count, polar quantum number, magnetic m."""

    n_r: int
    k_or_l: int
    m: int

    def __post_init__(self) -> None:
        if self.n_r < 0 or self.k_or_l < 0:
            raise ValueError(f"n_r and k_or_l must be >= 0, got {self}")


@dataclass
class RadialSolution:
    """Bound-state eigenpair of the reduced radial problem."""

    lam: float
    n_r: int
    r: np.ndarray
    U: np.ndarray
    Lambda_input: float
    E: Optional[float] = None  # self-consistent energy (relativistic runs)
    _eval: Optional[Callable] = field(default=None, repr=False)

    def eval_U(self, r: np.ndarray) -> np.ndarray:
        r = np.asarray(r, dtype=float)
        if self._eval is not None:
            return self._eval(r)
        return np.interp(r, self.r, self.U, left=0.0, right=0.0)

    def eval_R(self, r: np.ndarray) -> np.ndarray:
        r = np.asarray(r, dtype=float)
        with np.errstate(divide="ignore", invalid="ignore"):
            out = np.where(r > 0.0, self.eval_U(r) / np.where(r > 0.0, r, 1.0), 0.0)
        return out


def effective_l(Lambda: float) -> float:
    """Non-negative root l' of Lam = l'(l'+1); needs Lam >= -1/4."""
    Lambda = float(Lambda)
    if Lambda < -0.25:
        raise ValueError(
            f"Lam={Lambda} < -1/4 lies in the fall-to-center regime (not solved)"
        )
    return 0.5 * (-1.0 + math.sqrt(1.0 + 4.0 * Lambda))


def coulomb_lambda(Lambda: float, n_r: int, strength: float) -> float:
    """Closed-form bound-state eigenvalue for V_eff(r) = -strength/r:

    lam = -strength^2 / [4 (n_r + l' + 1)^2], l' from effective_l.
    """
    n_r = int(n_r)
    if n_r < 0:
        raise ValueError(f"n_r must be >= 0, got {n_r}")
    if not strength > 0.0:
        raise ValueError(f"strength must be > 0, got {strength}")
    lp = effective_l(Lambda)
    big_n = n_r + lp + 1.0
    return -(strength ** 2) / (4.0 * big_n ** 2)


def hydrogenic_radial_solution(Lambda: float, n_r: int, strength: float,
                               n_grid: int = 2000) -> RadialSolution:
    """Closed-form Coulomb eigenfunction with a generalized-Laguerre profile.

    U(r) = N r^(l'+1) exp(-kappa r) L_{n_r}^{(2l'+1)}(2 kappa r); node count
    equals n_r by construction. Normalized so the square integrates to one.
    """
    lam = coulomb_lambda(Lambda, n_r, strength)
    lp = effective_l(Lambda)
    kappa = math.sqrt(-lam)
    r_max = 30.0 / kappa  # ~30 decay lengths

    def raw(r: np.ndarray) -> np.ndarray:
        r = np.asarray(r, dtype=float)
        x = 2.0 * kappa * r
        with np.errstate(over="ignore"):
            profile = np.where(
                r > 0.0,
                r ** (lp + 1.0) * np.exp(-kappa * r)
                * eval_genlaguerre(n_r, 2.0 * lp + 1.0, x),
                0.0,
            )
        return profile

    # exact norm of the Laguerre profile:
    # integral of x^(alpha+1) e^-x [L_n^(alpha)(x)]^2 dx
    #   = (2n + alpha + 1) Gamma(n + alpha + 1) / n!
    alpha = 2.0 * lp + 1.0
    norm_sq = (2.0 * kappa) ** (-(2.0 * lp + 3.0)) * (2 * n_r + alpha + 1.0) \
        * math.exp(math.lgamma(n_r + alpha + 1.0) - math.lgamma(n_r + 1.0))
    scale = 1.0 / math.sqrt(norm_sq)

    r = np.linspace(0.0, r_max, n_grid + 1)
    return RadialSolution(
        lam=lam,
        n_r=n_r,
        r=r,
        U=scale * raw(r),
        Lambda_input=float(Lambda),
        _eval=lambda rr: scale * raw(rr),
    )


def default_radial_box(strength: float, Lambda: float, n_r: int) -> tuple[float, int]:
    """Box size and grid resolution for Coulomb-like tails.

    r_max = 60 max(1, N^2)/strength keeps ~30 decay lengths for the N-th
    state; the point count keeps strength * h ~ 0.022 so the quadratic
    eigenvalue error stays within 1e-4 relative for N <= 3.
    """
    if not strength > 0.0:
        raise ValueError("strength must be > 0 for the default box")
    big_n = n_r + effective_l(Lambda) + 1.0
    r_max = 60.0 * max(1.0, big_n ** 2) / strength
    n_grid = max(3000, int(math.ceil(45.0 * strength * r_max)))
    return r_max, n_grid


def _count_nodes(u: np.ndarray) -> int:
    thresh = 1e-9 * float(np.max(np.abs(u)))
    sig = u[np.abs(u) > thresh]
    return int(np.count_nonzero(sig[1:] * sig[:-1] < 0.0))


def solve_radial_numeric(
    v_eff_r,
    Lambda: float,
    n_states: int,
    r_max: float,
    n_grid: int,
    bound_only: bool = False,
) -> list[RadialSolution]:
    """Lowest eigenpairs of the reduced radial operator on (0, r_max].

    Symmetric three-point discretization with hard walls at both ends.
    Bound states (eigenvalues below the potential tail at r_max) must decay
    below 1e-8 of their peak before the wall, otherwise the box is declared
    too small. With ``bound_only`` the list is filtered to bound states and
    it is an error if fewer than n_states remain.
    """
    if n_states < 1:
        raise ValueError("n_states must be >= 1")
    if n_grid < 16:
        raise ValueError("n_grid must be >= 16")
    if not r_max > 0.0:
        raise ValueError("r_max must be > 0")
    v = v_eff_r if callable(v_eff_r) else (
        lambda r, _t=v_eff_r: np.interp(r, np.asarray(_t[0], float), np.asarray(_t[1], float))
    )
    Lambda = float(Lambda)
    if Lambda < -0.25:
        raise ValueError(f"Lam={Lambda} < -1/4: fall-to-center regime")

    h = r_max / n_grid
    r = h * np.arange(1, n_grid)
    diag = 2.0 / h ** 2 + Lambda / r ** 2 + v(r)
    off = np.full(n_grid - 2, -1.0 / h ** 2)
    lam, vec = eigh_tridiagonal(diag, off, select="i",
                                select_range=(0, n_states - 1))
    threshold = float(v(np.array([r_max]))[0])

    out: list[RadialSolution] = []
    for i in range(len(lam)):
        u = vec[:, i]
        norm = math.sqrt(float(np.sum(u * u) * h))
        u = u / norm
        if u[np.argmax(np.abs(u))] < 0.0:
            u = -u
        bound = lam[i] < threshold
        if bound:
            tail = abs(u[-1]) / float(np.max(np.abs(u)))
            if tail > 1e-8:
                raise BoundStateError(
                    f"r_max={r_max} too small: state {i} has tail "
                    f"{tail:.2e} of its peak at the wall"
                )
        out.append(
            RadialSolution(
                lam=float(lam[i]),
                n_r=_count_nodes(u),
                r=r,
                U=u,
                Lambda_input=Lambda,
            )
        )
    if bound_only:
        out = [s for s in out if s.lam < threshold]
        if len(out) < n_states:
            raise BoundStateError(
                f"only {len(out)} bound states below threshold {threshold:.3g}, "
                f"requested {n_states}"
            )
    return out


# ---------------------------------------------------------------------------
# Relativistic self-consistency


def _lambda_for_energy(spec: PotentialSpec, kind: EquationKind, E: float,
                       quantum: QuantumNumbers) -> tuple[float, float]:
    """(Lam, lam) of the full chain at a frozen energy E."""
    from .polar import (
        closed_form_lambda_half,
        closed_form_lambda_sec2,
        solve_theta_numeric,
    )
    from .symmetry import (
        HalfPolar,
        InverseCosSquared,
        PolarGrid,
        ZeroPolar,
    )

    eff = effective_potential(spec, kind, E)
    s = E + kind.mass if isinstance(kind, Dirac) else 0.5
    pol = spec.polar
    if isinstance(pol, ZeroPolar):
        l = quantum.k_or_l
        if l < abs(quantum.m):
            raise ValueError(f"need l >= |m|, got l={l}, m={quantum.m}")
        Lam = float(l * (l + 1))
    elif isinstance(pol, HalfPolar):
        Lam = closed_form_lambda_half(s, quantum.m, quantum.k_or_l)["Lambda"]
    elif isinstance(pol, InverseCosSquared):
        Lam = closed_form_lambda_sec2(s, quantum.m, quantum.k_or_l)["Lambda"]
    else:
        assert isinstance(pol, PolarGrid)
        sols = solve_theta_numeric(
            eff.v_theta, float(quantum.m ** 2), quantum.k_or_l + 1,
            check_convergence=False,
        )
        Lam = sols[quantum.k_or_l].Lambda

    rad = spec.radial
    if isinstance(rad, Coulomb):
        if rad.strength == 0.0:
            lam = 0.0
        else:
            lam = coulomb_lambda(Lam, quantum.n_r, eff.scale * rad.strength)
    else:
        r_max, n_grid = 240.0, 12000
        sols = solve_radial_numeric(
            eff.v_r, Lam, quantum.n_r + 1, r_max, n_grid, bound_only=True
        )
        lam = sols[quantum.n_r].lam
    return Lam, lam


def dirac_self_consistent(
    spec: PotentialSpec,
    M: float,
    quantum: QuantumNumbers,
    tol: float = 1e-10,
    max_iter: int = 200,
    negative_branch: bool = False,
) -> RadialSolution:
    """Damped fixed-point solve of the energy-dependent relativistic chain.

    Iterates E -> sign * sqrt(lam(E) + M^2) where lam(E) is the radial
    eigenvalue computed with the potential scale 2 (E + M) and the polar
    constant refreshed at E. The positive branch continues to the
    nonrelativistic spectrum; the negative branch sits behind a flag.
    """
    kind = Dirac(mass=M)
    sign = -1.0 if negative_branch else 1.0

    strength = spec.radial.strength if isinstance(spec.radial, Coulomb) else None
    if strength is not None and strength == 0.0:
        # no binding at zero coupling: E = M exactly, lam = 0, empty profile
        Lam, _ = _lambda_for_energy(spec, kind, M, quantum)
        r = np.linspace(1e-3, 60.0, 512)
        return RadialSolution(lam=0.0, n_r=quantum.n_r, r=r,
                              U=np.zeros_like(r), Lambda_input=Lam, E=M)

    # nonrelativistic-flavored initial guess, kept strictly below M
    if strength is not None:
        try:
            big_n = quantum.n_r + effective_l(
                _lambda_for_energy(spec, kind, M, quantum)[0]
            ) + 1.0
        except Exception:
            big_n = quantum.n_r + quantum.k_or_l + 1.0
        E = M * math.sqrt(max(0.01, 1.0 - 4.0 * strength ** 2 / big_n ** 2))
    else:
        E = 0.9 * M

    prev_step = 0.0
    for _ in range(max_iter):
        if E + M < 1e-12 * M:
            # the equally-mixed coupling 2 (E + M) V vanishes as E -> -M, so
            # the lower branch collapses onto the free limit point exactly
            r = np.linspace(1e-3, 60.0, 512)
            return RadialSolution(lam=0.0, n_r=quantum.n_r, r=r,
                                  U=np.zeros_like(r), Lambda_input=0.0, E=-M)
        Lam, lam = _lambda_for_energy(spec, kind, E, quantum)
        if lam + M * M <= 0.0:
            raise RealityToleranceError(
                f"lam + M^2 = {lam + M * M:.3e} <= 0: the reality condition "
                "for the relativistic energy is broken"
            )
        e_next = sign * math.sqrt(lam + M * M)
        step = e_next - E
        if prev_step != 0.0 and step * prev_step < 0.0:
            e_next = E + 0.5 * step  # damp oscillation
            step = e_next - E
        prev_step = step
        E = e_next
        if abs(step) < tol:
            break
    else:
        raise ConvergenceError(
            f"relativistic fixed point did not converge in {max_iter} iterations"
        )

    Lam, lam = _lambda_for_energy(spec, kind, E, quantum)
    eff = effective_potential(spec, kind, E)
    if strength is not None:
        sol = hydrogenic_radial_solution(Lam, quantum.n_r, eff.scale * strength)
    else:
        sol = solve_radial_numeric(eff.v_r, Lam, quantum.n_r + 1, 240.0, 12000,
                                   bound_only=True)[quantum.n_r]
    sol.E = float(E)
    return sol
