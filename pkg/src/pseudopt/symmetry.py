"""Potential model, the Dirac-to-Schroedinger effective-potential map, and
the azimuthal parity/time-reversal machinery.

The potential splits into three one-coordinate components,

    V(r, theta, phi) = V(r) + [V(theta) + V(phi)] / (r^2 sin^2 theta),

and an equally-mixed scalar/vector Dirac problem reduces to the same three
separated equations as the Schroedinger one after scaling every component by
2(E + M) and mapping the spectral parameter to lambda = E^2 - M^2. The
azimuthal reflection phi -> 2 pi - phi combined with complex conjugation is
the antilinear symmetry that keeps complex azimuthal potentials within a
real-spectrum class.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Union

import numpy as np

from .gridio import phi_nodes

__all__ = [
    "Schroedinger",
    "Dirac",
    "EquationKind",
    "Coulomb",
    "ZeroRadial",
    "RadialGrid",
    "ZeroPolar",
    "HalfPolar",
    "InverseCosSquared",
    "PolarGrid",
    "ComplexExp",
    "GeneratedFrom",
    "AzimuthalGrid",
    "PotentialSpec",
    "SeparationConstants",
    "EffectivePotentials",
    "effective_potential",
    "lambda_map",
    "apply_parity_phi",
    "apply_timereversal_phi",
    "pt_defect",
    "is_real_within",
    "REALITY_TOL",
    "preset_spec",
    "PRESETS",
]

#: Acceptance tolerance for treating a separation constant as real:
#: |Im| < REALITY_TOL * max(1, |Re|).
REALITY_TOL = 1e-8


# ---------------------------------------------------------------------------
# Equation kind


@dataclass(frozen=True)
class Schroedinger:
    """Nonrelativistic kind; lambda is the energy E itself."""


@dataclass(frozen=True)
class Dirac:
    """Relativistic kind with equally mixed scalar and vector potentials."""

    mass: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.mass) and self.mass > 0.0):
            raise ValueError(f"Dirac mass must be finite and positive, got {self.mass}")


EquationKind = Union[Schroedinger, Dirac]


# ---------------------------------------------------------------------------
# Potential components (tagged choices; closed forms generate grids, the
# solvers consume callables/grids)


@dataclass(frozen=True)
class Coulomb:
    strength: float = 1.0

    def __post_init__(self) -> None:
        if not (math.isfinite(self.strength) and self.strength >= 0.0):
            raise ValueError(f"Coulomb strength must be >= 0, got {self.strength}")


@dataclass(frozen=True)
class ZeroRadial:
    pass


@dataclass(frozen=True)
class RadialGrid:
    r: np.ndarray
    values: np.ndarray

    def __post_init__(self) -> None:
        r = np.asarray(self.r, dtype=float)
        v = np.asarray(self.values, dtype=float)
        if r.shape != v.shape or r.ndim != 1 or len(r) < 2:
            raise ValueError("radial grid needs matching 1-D r/value arrays")
        if not (np.all(np.isfinite(r)) and np.all(np.isfinite(v))):
            raise ValueError("radial grid contains non-finite entries")
        object.__setattr__(self, "r", r)
        object.__setattr__(self, "values", v)


@dataclass(frozen=True)
class ZeroPolar:
    pass


@dataclass(frozen=True)
class HalfPolar:
    """Constant polar component V(theta) = 1/2."""


@dataclass(frozen=True)
class InverseCosSquared:
    """Polar component V(theta) = 1 / (2 cos^2 theta)."""


@dataclass(frozen=True)
class PolarGrid:
    theta: np.ndarray
    values: np.ndarray

    def __post_init__(self) -> None:
        t = np.asarray(self.theta, dtype=float)
        v = np.asarray(self.values, dtype=float)
        if t.shape != v.shape or t.ndim != 1 or len(t) < 2:
            raise ValueError("polar grid needs matching 1-D theta/value arrays")
        if not (np.all(np.isfinite(t)) and np.all(np.isfinite(v))):
            raise ValueError("polar grid contains non-finite entries")
        object.__setattr__(self, "theta", t)
        object.__setattr__(self, "values", v)


@dataclass(frozen=True)
class ComplexExp:
    """Azimuthal component V(phi) = -a^2 exp(i phi), coupling a >= 0."""

    a: float = 1.0

    def __post_init__(self) -> None:
        if not (math.isfinite(self.a) and self.a >= 0.0):
            raise ValueError(f"coupling a must be >= 0, got {self.a}")


@dataclass(frozen=True)
class GeneratedFrom:
    """Azimuthal potential defined through a generator F on a phi grid."""

    f_values: np.ndarray
    m: int

    def __post_init__(self) -> None:
        f = np.asarray(self.f_values, dtype=complex)
        if f.ndim != 1 or len(f) < 8:
            raise ValueError("generator grid needs at least 8 samples")
        if not np.all(np.isfinite(f.real)) or not np.all(np.isfinite(f.imag)):
            raise ValueError("generator grid contains non-finite entries")
        object.__setattr__(self, "f_values", f)
        object.__setattr__(self, "m", int(self.m))


@dataclass(frozen=True)
class AzimuthalGrid:
    """Tabulated complex V(phi) on the uniform periodic grid phi_j = 2 pi j/n."""

    values: np.ndarray

    def __post_init__(self) -> None:
        v = np.asarray(self.values, dtype=complex)
        if v.ndim != 1 or len(v) < 8:
            raise ValueError("azimuthal grid needs at least 8 samples")
        if not np.all(np.isfinite(v.real)) or not np.all(np.isfinite(v.imag)):
            raise ValueError("azimuthal grid contains non-finite entries")
        object.__setattr__(self, "values", v)


RadialComponent = Union[Coulomb, ZeroRadial, RadialGrid]
PolarComponent = Union[ZeroPolar, HalfPolar, InverseCosSquared, PolarGrid]
AzimuthalComponent = Union[ComplexExp, GeneratedFrom, AzimuthalGrid]


@dataclass(frozen=True)
class PotentialSpec:
    radial: RadialComponent
    polar: PolarComponent
    azimuthal: AzimuthalComponent


@dataclass(frozen=True)
class SeparationConstants:
    """The triple linking the three descendant eigenproblems."""

    m_squared: complex
    Lambda: complex
    lam: float

    def real_parts_ok(self, tol: float = REALITY_TOL) -> bool:
        return is_real_within(self.m_squared, tol) and is_real_within(self.Lambda, tol)


def is_real_within(z: complex, tol: float = REALITY_TOL) -> bool:
    z = complex(z)
    return abs(z.imag) < tol * max(1.0, abs(z.real))


# ---------------------------------------------------------------------------
# Effective potentials


@dataclass(frozen=True)
class EffectivePotentials:
    """Per-coordinate effective potentials after the kind-dependent scaling.

    ``v_r`` and ``v_theta`` evaluate on arrays of their coordinate;
    ``v_phi(n)`` samples the (complex) azimuthal component on the uniform
    n-point periodic grid.
    """

    v_r: Callable[[np.ndarray], np.ndarray]
    v_theta: Callable[[np.ndarray], np.ndarray]
    v_phi: Callable[[int], np.ndarray]
    scale: float


def _radial_callable(comp: RadialComponent) -> Callable[[np.ndarray], np.ndarray]:
    if isinstance(comp, Coulomb):
        s = comp.strength
        return lambda r: -s / np.asarray(r, dtype=float)
    if isinstance(comp, ZeroRadial):
        return lambda r: np.zeros_like(np.asarray(r, dtype=float))
    return lambda r: np.interp(np.asarray(r, dtype=float), comp.r, comp.values)


def _polar_callable(comp: PolarComponent) -> Callable[[np.ndarray], np.ndarray]:
    if isinstance(comp, ZeroPolar):
        return lambda t: np.zeros_like(np.asarray(t, dtype=float))
    if isinstance(comp, HalfPolar):
        return lambda t: np.full_like(np.asarray(t, dtype=float), 0.5)
    if isinstance(comp, InverseCosSquared):
        return lambda t: 0.5 / np.cos(np.asarray(t, dtype=float)) ** 2
    return lambda t: np.interp(np.asarray(t, dtype=float), comp.theta, comp.values)


def resample_periodic(values: np.ndarray, n: int) -> np.ndarray:
    """Trigonometric resampling of a periodic grid function to n points."""
    values = np.asarray(values, dtype=complex)
    n0 = len(values)
    if n == n0:
        return values.copy()
    spec = np.fft.fft(values)
    out = np.zeros(n, dtype=complex)
    half = min(n0, n) // 2
    out[: half + 1] = spec[: half + 1]
    if half > 0:
        out[-half:] = spec[-half:]
    return np.fft.ifft(out) * (n / n0)


def azimuthal_samples(comp: AzimuthalComponent, n: int) -> np.ndarray:
    """Sample the azimuthal potential component on the n-point grid."""
    if isinstance(comp, ComplexExp):
        return -comp.a ** 2 * np.exp(1j * phi_nodes(n))
    if isinstance(comp, AzimuthalGrid):
        return resample_periodic(comp.values, n)
    # GeneratedFrom: build through the generator identity (azimuthal module).
    from .azimuthal import potential_from_generator

    vals, excluded = potential_from_generator(comp.f_values, comp.m)
    if np.any(excluded):
        vals = np.where(excluded, 0.0, vals)
    return resample_periodic(vals, n)


def effective_potential(spec: PotentialSpec, kind: EquationKind, E: float = 0.0) -> EffectivePotentials:
    """Map the bare potential components to their effective forms.

    Schroedinger: identity. Dirac: every component scaled by 2 (E + M);
    E + M must be positive or the scaling degenerates.
    """
    if isinstance(kind, Dirac):
        if not (E + kind.mass > 0.0):
            raise ValueError(
                f"degenerate Dirac scaling: E + M = {E + kind.mass} must be > 0"
            )
        scale = 2.0 * (E + kind.mass)
    else:
        scale = 1.0
    vr = _radial_callable(spec.radial)
    vt = _polar_callable(spec.polar)
    comp = spec.azimuthal

    return EffectivePotentials(
        v_r=lambda r, _f=vr: scale * _f(r),
        v_theta=lambda t, _f=vt: scale * _f(t),
        v_phi=lambda n, _c=comp: scale * azimuthal_samples(_c, n),
        scale=scale,
    )


def lambda_map(kind: EquationKind, E: float) -> float:
    """Spectral parameter of the radial problem: E, or E^2 - M^2 for Dirac."""
    E = float(E)
    if not math.isfinite(E):
        raise ValueError(f"non-finite energy {E!r}")
    if isinstance(kind, Dirac):
        return E * E - kind.mass ** 2
    return E


# ---------------------------------------------------------------------------
# Azimuthal parity and time reversal on grids


def apply_parity_phi(values: np.ndarray) -> np.ndarray:
    """Reflection phi -> 2 pi - phi on a uniform periodic grid.

    Sample j moves to sample (n - j) mod n; index 0 is its own mirror.
    Applying the map twice reproduces the input bit-exactly.
    """
    v = np.asarray(values)
    if v.ndim != 1:
        raise ValueError("parity acts on 1-D periodic grids")
    return np.roll(v[::-1], 1)


def apply_timereversal_phi(values: np.ndarray) -> np.ndarray:
    """Antilinear part: pointwise complex conjugation."""
    return np.conj(np.asarray(values))


def pt_defect(v_eff_phi: np.ndarray, excluded: np.ndarray | None = None) -> float:
    """Sup-norm deviation of V from its parity-conjugate image.

    Zero (to rounding) exactly when -d^2/dphi^2 + V commutes with the
    combined reflection-conjugation symmetry. Samples flagged in
    ``excluded`` (and their mirrors) are ignored.
    """
    v = np.asarray(v_eff_phi, dtype=complex)
    mirrored = apply_timereversal_phi(apply_parity_phi(v))
    diff = np.abs(mirrored - v)
    if excluded is not None:
        mask = np.asarray(excluded, dtype=bool)
        bad = mask | apply_parity_phi(mask)
        if np.all(bad):
            raise ValueError("every sample is excluded")
        diff = diff[~bad]
    return float(np.max(diff))


# ---------------------------------------------------------------------------
# Shipped presets


def preset_spec(name: str) -> tuple[PotentialSpec, EquationKind, dict]:
    """Named parameter sets used by the CLI and the test suite.

    ``coulomb-a1``: attractive Coulomb radial part, no polar part, and the
    complex-exponential azimuthal interaction at unit coupling.
    ``hartmann``: ring-shaped molecular variant V(r) = -alpha/r,
    V(theta) = -b^2 (tabulated constant), V(phi) = 0.
    """
    key = name.lower()
    if key not in PRESETS:
        raise KeyError(f"unknown preset {name!r}; available: {sorted(PRESETS)}")
    return PRESETS[key]()


def _preset_coulomb(a: float):
    spec = PotentialSpec(
        radial=Coulomb(strength=1.0),
        polar=ZeroPolar(),
        azimuthal=ComplexExp(a=a),
    )
    quantum = {"n_r": [0], "k_or_l": [0], "m": [0]}
    return spec, Schroedinger(), quantum


def _preset_hartmann():
    theta = np.linspace(0.0, np.pi, 65)
    spec = PotentialSpec(
        radial=Coulomb(strength=1.0),
        polar=PolarGrid(theta=theta, values=np.full_like(theta, -1.0)),
        azimuthal=ComplexExp(a=0.0),
    )
    quantum = {"n_r": [0], "k_or_l": [1], "m": [1]}
    return spec, Schroedinger(), quantum


PRESETS = {
    "coulomb-a0": lambda: _preset_coulomb(0.0),
    "coulomb-a1": lambda: _preset_coulomb(1.0),
    "coulomb-a2": lambda: _preset_coulomb(2.0),
    "hartmann": _preset_hartmann,
}
