"""Azimuthal sector: eigenproblem of -d^2/dphi^2 + V(phi) on the circle.

The complex-exponential interaction V(phi) = -a^2 exp(i phi) admits the
closed-form regular solution C I_{2|m|}(2 a exp(i phi/2)); only the
first-kind Bessel branch is single-valued over a full period, which is what
quantizes m. A general periodic, possibly non-Hermitian potential is handled
by Fourier spectral discretization plus a dense eigensolve.

Eigenvalues of these operators can carry nontrivial Jordan structure: for
V = -a^2 exp(i phi) each level m^2 (m != 0) has algebraic multiplicity two
but only a one-dimensional eigenspace, and plain QR eigenvalues split by
~sqrt(eps * coupling). The solver therefore post-processes the raw spectrum:
the multiset is projected onto its conjugation-symmetric form (exact for a
reflection-conjugation-symmetric operator), gap-clustered, and each cluster
replaced by its mean, which cancels the antisymmetric splitting error.
Eigenvectors are recovered per cluster as the smallest right singular
vectors of (H - lambda I), which pins the true eigendirections even at
defective levels.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Literal

import numpy as np
from scipy.linalg import eig, lu_factor, lu_solve, svd

from .errors import (
    ConvergenceError,
    NoPeriodicSolutionError,
    ExclusionZoneError,
    NormalizationUnderflowError,
    RealityToleranceError,
)
from .gridio import phi_nodes
from .specfun import bessel_i, bessel_k, quad_periodic
from .symmetry import GeneratedFrom, pt_defect, REALITY_TOL

__all__ = [
    "AzimuthalSolution",
    "GeneratorFunction",
    "analytic_phi_solution",
    "single_valuedness_defect",
    "pt_normalization",
    "solve_phi_numeric",
    "potential_from_generator",
    "generator_from_potential",
    "spectral_derivative",
    "fourier_diff_matrix",
    "trig_interpolate",
    "phi_ode_residual",
    "EXCLUSION_THRESHOLD",
]

#: |F| below this is treated as a zero of the generator (division exclusion).
EXCLUSION_THRESHOLD = 1e-10

#: pt_defect below this (relative to the potential scale) counts as symmetric.
PT_SYMMETRY_TOL = 1e-12

GeneratorFunction = GeneratedFrom

Provenance = Literal["ClosedFormBessel", "NumericSpectral", "GeneratedF"]


@dataclass
class AzimuthalSolution:
    """One eigenpair of the azimuthal operator on the periodic grid."""

    m: int
    m_squared: complex
    values: np.ndarray
    norm_constant: float
    provenance: Provenance
    residual: float = field(default=0.0)

    @property
    def n_grid(self) -> int:
        return len(self.values)

    def eval(self, phi: np.ndarray) -> np.ndarray:
        """Trigonometric interpolation of the stored samples."""
        return trig_interpolate(self.values, phi)


# ---------------------------------------------------------------------------
# Spectral differentiation machinery


def _wavenumbers(n: int) -> np.ndarray:
    return np.fft.fftfreq(n, d=1.0 / n)


def spectral_derivative(values: np.ndarray, order: int) -> np.ndarray:
    """Fourier differentiation of a uniform periodic grid function."""
    values = np.asarray(values, dtype=complex)
    n = len(values)
    k = _wavenumbers(n)
    if order == 1:
        mult = 1j * k
        if n % 2 == 0:
            mult[n // 2] = 0.0  # symmetrized Nyquist convention
    elif order == 2:
        mult = -(k ** 2)
    else:
        raise ValueError(f"only first and second derivatives, got order={order}")
    return np.fft.ifft(mult * np.fft.fft(values))


def fourier_diff_matrix(n: int, order: int) -> np.ndarray:
    """Dense spectral differentiation matrix on the n-point periodic grid."""
    k = _wavenumbers(n)
    if order == 1:
        mult = 1j * k
        if n % 2 == 0:
            mult[n // 2] = 0.0
    elif order == 2:
        mult = -(k ** 2)
    else:
        raise ValueError(f"only first and second derivatives, got order={order}")
    F = np.fft.fft(np.eye(n), axis=0)
    D = np.fft.ifft(mult[:, None] * F, axis=0)
    return D.real if order == 2 else D


def trig_interpolate(values: np.ndarray, phi: np.ndarray) -> np.ndarray:
    """Evaluate the band-limited interpolant of periodic samples anywhere."""
    values = np.asarray(values, dtype=complex)
    n = len(values)
    coeff = np.fft.fft(values) / n
    k = _wavenumbers(n)
    phi = np.atleast_1d(np.asarray(phi, dtype=float))
    out = np.zeros(phi.shape, dtype=complex)
    for kk, ck in zip(k, coeff):
        if n % 2 == 0 and kk == n // 2:
            out += ck * np.cos(kk * phi)  # split Nyquist mode symmetrically
        else:
            out += ck * np.exp(1j * kk * phi)
    return out


def phi_ode_residual(values: np.ndarray, v_grid: np.ndarray, m_squared: complex) -> float:
    """Sup-norm residual of Phi'' - V Phi + m^2 Phi, relative to sup |Phi|."""
    values = np.asarray(values, dtype=complex)
    res = spectral_derivative(values, 2) - np.asarray(v_grid, dtype=complex) * values \
        + complex(m_squared) * values
    return float(np.max(np.abs(res)) / np.max(np.abs(values)))


# ---------------------------------------------------------------------------
# Closed-form branch


def pt_normalization(m: int, a: float, n_quad: int = 256) -> float:
    """Normalization constant from the reflection-conjugation inner product.

    C = [ integral over one period of |I_{2|m|}(2 a exp(i phi/2))|^2 ]^(-1/2),
    taken real and positive by convention (the inner product only fixes |C|).
    """
    m = int(m)
    a = float(a)
    if n_quad < 64:
        raise ValueError(f"n_quad must be >= 64, got {n_quad}")
    if a < 0.0:
        raise ValueError(f"coupling a must be >= 0, got {a}")
    if a == 0.0 and m != 0:
        raise NormalizationUnderflowError(
            f"I_{2*abs(m)} vanishes identically at a = 0; no finite normalization"
        )
    phi = phi_nodes(n_quad)
    order = 2 * abs(m)
    samples = np.array([bessel_i(order, 2 * a * np.exp(0.5j * p)) for p in phi])
    integral = float(quad_periodic(np.abs(samples) ** 2).real)
    if integral < 1e-300:
        raise NormalizationUnderflowError(
            f"normalization integral underflowed for m={m}, a={a}"
        )
    return 1.0 / math.sqrt(integral)


def analytic_phi_solution(m: int, a: float, n_grid: int = 128) -> AzimuthalSolution:
    """Closed-form azimuthal eigenfunction for V(phi) = -a^2 exp(i phi).

    Samples C I_{2|m|}(2 a exp(i phi/2)) on the n_grid-point periodic grid;
    the eigenvalue is exactly m^2. At a = 0 the normalized limit is the
    plain Fourier mode exp(i m phi) / sqrt(2 pi) (the Bessel factor itself
    degenerates, its normalized shape does not).
    """
    m = int(m)
    a = float(a)
    if n_grid < 32:
        raise ValueError(f"n_grid must be >= 32, got {n_grid}")
    if a < 0.0:
        raise ValueError(f"coupling a must be >= 0, got {a}")
    phi = phi_nodes(n_grid)
    if a == 0.0:
        c = 1.0 / math.sqrt(2.0 * math.pi)
        values = c * np.exp(1j * m * phi)
        return AzimuthalSolution(
            m=m, m_squared=complex(m * m), values=values,
            norm_constant=c, provenance="ClosedFormBessel",
        )
    order = 2 * abs(m)
    c = pt_normalization(m, a, n_quad=max(256, n_grid))
    raw = np.array([bessel_i(order, 2 * a * np.exp(0.5j * p)) for p in phi])
    values = c * raw
    # Global phase: sample nearest phi = 0 made real positive. I_{2|m|}(2a)
    # is already real positive, so this is a no-op up to rounding.
    values = _fix_phase(values)
    return AzimuthalSolution(
        m=m, m_squared=complex(m * m), values=values,
        norm_constant=c, provenance="ClosedFormBessel",
    )


def single_valuedness_defect(branch: str, m: int, a: float, n_samples: int = 32) -> float:
    """Max over phi samples of |W(2a e^{i(phi+2pi)/2}) - W(2a e^{i phi/2})|.

    W is the first-kind (I) or second-kind (K) modified Bessel function of
    order 2|m|. The first kind is single-valued (even integer order); the
    second kind jumps across its branch cut by pi I_{2|m|} and fails the
    periodicity requirement.
    """
    branch = branch.upper()
    if branch not in ("I", "K"):
        raise ValueError(f"branch must be 'I' or 'K', got {branch!r}")
    m = int(m)
    a = float(a)
    if branch == "K" and a <= 0.0:
        raise ValueError("the K branch needs a > 0")
    if a < 0.0:
        raise ValueError(f"coupling a must be >= 0, got {a}")
    order = 2 * abs(m)
    if a == 0.0:
        return 0.0  # constant function
    fun = bessel_i if branch == "I" else bessel_k
    worst = 0.0
    for p in np.linspace(0.0, 2.0 * np.pi, n_samples, endpoint=False):
        z1 = 2 * a * np.exp(0.5j * p)
        z2 = 2 * a * np.exp(0.5j * (p + 2.0 * np.pi))
        worst = max(worst, abs(fun(order, z2) - fun(order, z1)))
    return worst


# ---------------------------------------------------------------------------
# Non-Hermitian spectral solver with defect-aware refinement


def _conj_symmetrize(vals: np.ndarray) -> np.ndarray:
    """Project a multiset onto its conjugation-symmetric closest form."""
    vals = vals.copy()
    n = len(vals)
    used = np.zeros(n, dtype=bool)
    order = np.lexsort((vals.imag, vals.real))
    for i in order:
        if used[i]:
            continue
        best_j, best_d = i, abs(vals[i] - np.conj(vals[i]))
        for j in order:
            if used[j] or j == i:
                continue
            d = abs(vals[i] - np.conj(vals[j]))
            if d < best_d:
                best_j, best_d = j, d
        if best_j == i:
            vals[i] = vals[i].real
            used[i] = True
        else:
            v = 0.5 * (vals[i] + np.conj(vals[best_j]))
            vals[i] = v
            vals[best_j] = np.conj(v)
            used[i] = used[best_j] = True
    return vals


def _cluster_indices(sorted_vals: np.ndarray, rel: float = 1e-3) -> list[list[int]]:
    clusters: list[list[int]] = [[0]]
    for i in range(1, len(sorted_vals)):
        gap_tol = rel * (1.0 + math.sqrt(max(1.0, abs(sorted_vals[i].real))))
        if abs(sorted_vals[i] - sorted_vals[clusters[-1][-1]]) < gap_tol:
            clusters[-1].append(i)
        else:
            clusters.append([i])
    return clusters


def _rayleigh_polish(H: np.ndarray, lam: complex, x: np.ndarray, guard: float) -> complex:
    """Two-sided Rayleigh refinement for a well-separated eigenvalue."""
    n = H.shape[0]
    x = x / np.linalg.norm(x)
    y = x.conj()
    lam_out = lam
    for _ in range(2):
        try:
            lu = lu_factor(H - lam_out * np.eye(n))
            x = lu_solve(lu, x)
            x /= np.linalg.norm(x)
            y = lu_solve(lu, y, trans=2)
            y /= np.linalg.norm(y)
        except Exception:
            return lam
        denom = y.conj() @ x
        if abs(denom) < 1e-12:
            return lam
        lam_out = complex((y.conj() @ (H @ x)) / denom)
    if abs(lam_out - lam) > guard:
        return lam
    return lam_out


def _refined_eigenvalues(H: np.ndarray, pt_symmetric: bool):
    """Raw dense eigensolve plus the defect-aware eigenvalue correction.

    Returns (refined values sorted by (Re, Im), clusters, matching raw
    eigenvectors). Cluster means cancel the antisymmetric splitting of
    nearly-defective pairs; singletons get a guarded Rayleigh polish.
    """
    w, vr = eig(H)
    if pt_symmetric:
        w = _conj_symmetrize(w)
    order = np.lexsort((w.imag, w.real))
    w = w[order]
    vr = vr[:, order]
    clusters = _cluster_indices(w)
    refined = w.copy()
    for cl in clusters:
        mean = w[cl].mean()
        if len(cl) == 1:
            guard = 1e-3 * (1.0 + math.sqrt(max(1.0, abs(mean.real))))
            mean = _rayleigh_polish(H, mean, vr[:, cl[0]], guard)
            # a lone eigenvalue of a conjugation-symmetric multiset is its own
            # partner, hence real; do not flatten genuine conjugate pairs
            if pt_symmetric and abs(mean.imag) < guard:
                mean = complex(mean.real)
        refined[cl] = mean
    return refined, clusters, vr


def _fix_phase(v: np.ndarray) -> np.ndarray:
    """Rotate so the sample nearest phi = 0 is real positive (fallback: the
    largest sample, when the function vanishes at the origin)."""
    anchor = v[0]
    if abs(anchor) < 1e-12 * np.max(np.abs(v)):
        anchor = v[np.argmax(np.abs(v))]
    return v * (abs(anchor) / anchor)


def _pt_normalize_vector(v: np.ndarray) -> tuple[np.ndarray, float]:
    integral = float(quad_periodic(np.abs(v) ** 2).real)
    if integral < 1e-300:
        raise NormalizationUnderflowError("eigenvector normalization underflowed")
    c = 1.0 / math.sqrt(integral)
    return _fix_phase(c * v), c


def _is_pt_symmetric(v_grid: np.ndarray) -> bool:
    scale = max(1.0, float(np.max(np.abs(v_grid))))
    return pt_defect(v_grid) < PT_SYMMETRY_TOL * scale


def _build_operator(v_grid: np.ndarray) -> np.ndarray:
    n = len(v_grid)
    return -fourier_diff_matrix(n, 2) + np.diag(np.asarray(v_grid, dtype=complex))


def _solve_once(v_grid: np.ndarray, n_modes: int, pt_symmetric: bool):
    H = _build_operator(v_grid)
    refined, clusters, vr = _refined_eigenvalues(H, pt_symmetric)
    # pick the n_modes of smallest |Re|, preserving (Re, Im) order
    selected = np.sort(np.argsort(np.abs(refined.real), kind="stable")[:n_modes])
    member_of = {}
    for ci, cl in enumerate(clusters):
        for i in cl:
            member_of[i] = ci
    # eigenvectors per selected cluster through the singular decomposition
    vectors: dict[int, np.ndarray] = {}
    cluster_cache: dict[int, list[np.ndarray]] = {}
    n = H.shape[0]
    for i in selected:
        ci = member_of[i]
        if ci not in cluster_cache:
            lam = refined[clusters[ci][0]]
            _, S, Vh = svd(H - lam * np.eye(n))
            geo = int(np.sum(S < 1e-6 * max(1.0, abs(lam))))
            geo = max(geo, 1)
            cluster_cache[ci] = [Vh[-(j + 1), :].conj() for j in range(geo)]
        basis = cluster_cache[ci]
        rank_in_cluster = clusters[ci].index(i)
        vectors[i] = basis[rank_in_cluster % len(basis)]
    return H, refined, selected, vectors


def solve_phi_numeric(
    v_eff_phi: np.ndarray,
    n_modes: int,
    check_resolution: bool = True,
    reality_tol: float = REALITY_TOL,
) -> list[AzimuthalSolution]:
    """Eigenpairs of -d^2/dphi^2 + V on the circle, smallest |Re| first.

    V is sampled on the uniform periodic grid. The dense non-Hermitian
    eigenproblem is solved at the given resolution and, when
    ``check_resolution`` is set, re-solved at twice the resolution; any
    selected eigenvalue moving by more than 1e-6 raises ConvergenceError.
    For a reflection-conjugation-symmetric potential all returned
    eigenvalues must be real within ``reality_tol``; violations raise
    rather than being dropped.
    """
    v = np.asarray(v_eff_phi, dtype=complex)
    n = len(v)
    if n < 8:
        raise ValueError(f"grid too small ({n} samples)")
    if n_modes < 1 or n_modes > n // 4:
        raise ValueError(f"n_modes must be in [1, {n//4}], got {n_modes}")
    pt_sym = _is_pt_symmetric(v)
    H, refined, selected, vectors = _solve_once(v, n_modes, pt_sym)

    if check_resolution:
        from .symmetry import resample_periodic

        v2 = resample_periodic(v, 2 * n)
        H2 = _build_operator(v2)
        refined2, _, _ = _refined_eigenvalues(H2, pt_sym)
        coarse = refined[selected]
        for lam in coarse:
            shift = float(np.min(np.abs(refined2 - lam)))
            if shift > 1e-6:
                raise ConvergenceError(
                    f"grid too coarse: eigenvalue {lam} moved by "
                    f"{shift:.3e} under doubling"
                )

    out: list[AzimuthalSolution] = []
    for i in selected:
        lam = complex(refined[i])
        if pt_sym and not (abs(lam.imag) < reality_tol * max(1.0, abs(lam.real))):
            raise RealityToleranceError(
                f"symmetric potential produced complex eigenvalue {lam}: "
                "reality tolerance exceeded (symmetry looks broken)"
            )
        vec, c = _pt_normalize_vector(vectors[i])
        m_label = int(round(math.sqrt(max(lam.real, 0.0))))
        out.append(
            AzimuthalSolution(
                m=m_label,
                m_squared=lam,
                values=vec,
                norm_constant=c,
                provenance="NumericSpectral",
                residual=phi_ode_residual(vec, v, lam),
            )
        )
    return out


# ---------------------------------------------------------------------------
# Generating-function recipe


def potential_from_generator(f_values: np.ndarray, m: int):
    """Azimuthal potential generated by a single-valued F:

        V(phi) = [F'' + 2 i m F'] / F,

    with spectral derivatives. Samples where |F| < 1e-10 form the division
    exclusion zone; they are returned as NaN and flagged in the mask. More
    than 20 percent of the grid inside the zone is an error.
    """
    f = np.asarray(f_values, dtype=complex)
    n = len(f)
    if n < 8:
        raise ValueError(f"generator grid too small ({n} samples)")
    excluded = np.abs(f) < EXCLUSION_THRESHOLD
    if np.count_nonzero(excluded) > 0.2 * n:
        raise ExclusionZoneError(
            f"generator vanishes on {np.count_nonzero(excluded)} of {n} samples"
        )
    numer = spectral_derivative(f, 2) + 2j * int(m) * spectral_derivative(f, 1)
    vals = np.full(n, np.nan + 0j)
    ok = ~excluded
    vals[ok] = numer[ok] / f[ok]
    return vals, excluded


def generator_from_potential(v_eff_phi: np.ndarray, m: int) -> GeneratorFunction:
    """Single-valued generator F solving F'' + 2 i m F' - V F = 0.

    Solves the periodic eigenproblem of -d^2/dphi^2 - 2 i m d/dphi + V and
    keeps the eigenfunction whose (refined) eigenvalue is nearest zero,
    provided it vanishes to 1e-8; otherwise no single-valued generator
    exists for this potential and magnetic number. The result is scaled to
    max |F| = 1 with the largest sample made real positive.
    """
    v = np.asarray(v_eff_phi, dtype=complex)
    n = len(v)
    m = int(m)
    D1 = fourier_diff_matrix(n, 1)
    D2 = fourier_diff_matrix(n, 2)
    A = -D2 - 2j * m * D1 + np.diag(v)
    # A is unitarily similar to H - m^2, so it inherits the symmetry class.
    pt_sym = _is_pt_symmetric(v)
    refined, clusters, _ = _refined_eigenvalues(A, pt_sym)
    i0 = int(np.argmin(np.abs(refined)))
    lam0 = complex(refined[i0])
    if abs(lam0) >= 1e-8:
        raise NoPeriodicSolutionError(
            f"no single-valued generator: smallest |eigenvalue| is {abs(lam0):.3e}"
        )
    _, S, Vh = svd(A - lam0 * np.eye(n))
    fvec = Vh[-1, :].conj()
    peak = np.argmax(np.abs(fvec))
    fvec = fvec * (np.abs(fvec[peak]) / fvec[peak]) / np.abs(fvec[peak])
    return GeneratorFunction(f_values=fvec, m=m)
