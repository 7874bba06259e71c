"""Polar sector: the weighted Sturm-Liouville problem on (0, pi),

    -(sin t Q')' + [(V_eff(t) + m^2)/sin t] Q = Lam sin t Q.

Three closed-form branches: associated Legendre for V = 0, and terminating
hypergeometric families for the two constant-curvature interactions
V(theta) = 1/2 and V(theta) = 1/(2 cos^2 theta). The numeric solver uses a
conservative flux discretization on a half-shifted interior grid (endpoints
and the cos^-2 pole fall on flux points where sin t or the absorbed weight
vanishes, so regularity is imposed naturally) combined with a similarity
transform Q = w G absorbing the fractional-power behavior at the axis and at
the pole; G is then smooth and plain Richardson extrapolation restores
fourth-order eigenvalue accuracy.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from scipy.linalg import eigh_tridiagonal

from .errors import ConvergenceError, SolverError
from .specfun import assoc_legendre, hyp2f1_terminating
from .symmetry import Dirac, EquationKind, Schroedinger

__all__ = [
    "AngularSolution",
    "legendre_branch",
    "theta_closed_form_half",
    "theta_closed_form_sec2",
    "solve_theta_numeric",
    "theta_nodes",
    "theta_residual",
    "closed_form_lambda_half",
    "closed_form_lambda_sec2",
]


@dataclass
class AngularSolution:
    """One eigenpair of the polar operator."""

    Lambda: float
    k_or_l: int
    m: int
    theta: np.ndarray
    values: np.ndarray
    closed_form_params: Optional[dict] = None
    _eval: Optional[Callable] = field(default=None, repr=False)
    _eval_d1: Optional[Callable] = field(default=None, repr=False)
    _eval_d2: Optional[Callable] = field(default=None, repr=False)

    def eval(self, theta: np.ndarray) -> np.ndarray:
        theta = np.asarray(theta, dtype=float)
        if self._eval is not None:
            return self._eval(theta)
        return np.interp(theta, self.theta, self.values)


def theta_nodes(n: int) -> np.ndarray:
    """Half-shifted interior grid; no node hits 0, pi or pi/2 (n even)."""
    h = math.pi / n
    return (np.arange(n) + 0.5) * h


def _normalize(theta: np.ndarray, values: np.ndarray) -> np.ndarray:
    h = theta[1] - theta[0]
    norm = math.sqrt(float(np.sum(values ** 2 * np.sin(theta)) * h))
    return values / norm


def _closed_form_norm(evaluator, n: int = 4001) -> float:
    """sqrt of the sin-weighted square integral, composite Simpson."""
    t = np.linspace(0.0, math.pi, n)
    f = np.zeros(n)
    f[1:-1] = evaluator(t[1:-1]) ** 2 * np.sin(t[1:-1])
    h = t[1] - t[0]
    w = np.ones(n)
    w[1:-1:2] = 4.0
    w[2:-1:2] = 2.0
    return math.sqrt(float(np.sum(w * f) * h / 3.0))


# ---------------------------------------------------------------------------
# Closed forms


def legendre_branch(l: int, m: int, n_grid: int = 400) -> AngularSolution:
    """Associated Legendre eigenpair for V(theta) = 0.

    Lam = l (l + 1); the sample values carry the orthonormalization
    prefactor sqrt[(2l+1)(l-|m|)! / (2 (l+|m|)!)], so that the square
    integrates to one against sin theta.
    """
    l = int(l)
    m = int(m)
    if l < 0 or abs(m) > l:
        raise ValueError(f"need l >= |m| >= 0, got l={l}, m={m}")
    am = abs(m)
    pref = math.sqrt(
        (2 * l + 1)
        * math.exp(math.lgamma(l - am + 1) - math.lgamma(l + am + 1))
        / 2.0
    )

    def evaluator(theta: np.ndarray) -> np.ndarray:
        theta = np.atleast_1d(np.asarray(theta, dtype=float))
        return pref * np.array([assoc_legendre(l, am, x) for x in np.cos(theta)])

    theta = theta_nodes(n_grid)
    return AngularSolution(
        Lambda=float(l * (l + 1)),
        k_or_l=l,
        m=m,
        theta=theta,
        values=evaluator(theta),
        closed_form_params=None,
        _eval=evaluator,
    )


def _strength_s(kind: EquationKind, E: float) -> float:
    """The closed forms depend on the kind only through s = E + M, with the
    nonrelativistic substitution s = 1/2."""
    if isinstance(kind, Dirac):
        s = E + kind.mass
        if not s > 0.0:
            raise ValueError(f"need E + M > 0, got {s}")
        return s
    return 0.5


def closed_form_lambda_half(s: float, m: int, k: int) -> dict:
    ups = 0.5 * math.sqrt(m * m + s)
    rho = ups
    b = k + 4.0 * ups + 1.0
    d = 1.0 + 2.0 * ups
    lam = ((b + k) ** 2 - 1.0) / 4.0
    return {"rho": rho, "upsilon": ups, "b": b, "d": d, "Lambda": lam,
            "y_map": "cos^2(theta/2)"}


def closed_form_lambda_sec2(s: float, m: int, k: int) -> dict:
    rho = 0.25 + 0.25 * math.sqrt(1.0 + 4.0 * s)
    ups = 0.5 * math.sqrt(m * m + s)
    b = k + 2.0 * (rho + ups) + 0.5
    d = 2.0 * rho + 0.5
    lam = (b + k) ** 2 - 0.25
    return {"rho": rho, "upsilon": ups, "b": b, "d": d, "Lambda": lam,
            "y_map": "cos^2(theta)"}


def _hyper_evaluators(k: int, b: float, d: float, rho: float, ups: float,
                      u_of_theta, du, ddu):
    """Evaluators for Q = u^rho (1-u)^ups 2F1(-k, b; d; u) and its first two
    theta derivatives, with u = u(theta) given by a chain-rule map."""

    def poly(u, shift: int) -> np.ndarray:
        kk = k - shift
        if kk < 0:
            return np.zeros_like(u)
        coeff = 1.0
        for j in range(shift):
            coeff *= (-(k - j)) * (b + j) / (d + j)
        return coeff * np.array(
            [hyp2f1_terminating(kk, b + shift, d + shift, float(x)) for x in u]
        )

    def u_parts(theta):
        theta = np.atleast_1d(np.asarray(theta, dtype=float))
        u = u_of_theta(theta)
        qu = u ** (rho - 1.0) * (1.0 - u) ** (ups - 1.0) * (
            rho * (1.0 - u) - ups * u
        ) * poly(u, 0) + u ** rho * (1.0 - u) ** ups * poly(u, 1)
        quu = (
            rho * (rho - 1.0) * u ** (rho - 2.0) * (1.0 - u) ** ups
            - 2.0 * rho * ups * u ** (rho - 1.0) * (1.0 - u) ** (ups - 1.0)
            + ups * (ups - 1.0) * u ** rho * (1.0 - u) ** (ups - 2.0)
        ) * poly(u, 0) + 2.0 * u ** (rho - 1.0) * (1.0 - u) ** (ups - 1.0) * (
            rho * (1.0 - u) - ups * u
        ) * poly(u, 1) + u ** rho * (1.0 - u) ** ups * poly(u, 2)
        return theta, qu, quu

    def ev(theta):
        theta = np.atleast_1d(np.asarray(theta, dtype=float))
        u = u_of_theta(theta)
        return u ** rho * (1.0 - u) ** ups * poly(u, 0)

    def ev1(theta):
        th, qu, _ = u_parts(theta)
        return qu * du(th)

    def ev2(theta):
        th, qu, quu = u_parts(theta)
        return quu * du(th) ** 2 + qu * ddu(th)

    return ev, ev1, ev2


def theta_closed_form_half(kind: EquationKind, E: float, m: int, k: int,
                           n_grid: int = 400) -> AngularSolution:
    """Closed form for the constant interaction V(theta) = 1/2.

    The effective azimuthal index is mt = sqrt(m^2 + s), s = E + M (or 1/2),
    and Lam = [(b+k)^2 - 1]/4 = (k + mt)(k + mt + 1).
    """
    m = int(m)
    k = int(k)
    if k < 0:
        raise ValueError(f"k must be >= 0, got {k}")
    s = _strength_s(kind, E)
    p = closed_form_lambda_half(s, m, k)

    ev, ev1, ev2 = _hyper_evaluators(
        k, p["b"], p["d"], p["rho"], p["upsilon"],
        u_of_theta=lambda th: np.cos(th / 2.0) ** 2,
        du=lambda th: -0.5 * np.sin(th),
        ddu=lambda th: -0.5 * np.cos(th),
    )
    theta = theta_nodes(n_grid)
    raw = ev(theta)
    scale = 1.0 / _closed_form_norm(ev)
    return AngularSolution(
        Lambda=p["Lambda"],
        k_or_l=k,
        m=m,
        theta=theta,
        values=scale * raw,
        closed_form_params=p,
        _eval=lambda th: scale * ev(th),
        _eval_d1=lambda th: scale * ev1(th),
        _eval_d2=lambda th: scale * ev2(th),
    )


def theta_closed_form_sec2(kind: EquationKind, E: float, m: int, k: int,
                           n_grid: int = 400) -> AngularSolution:
    """Closed form for V(theta) = 1/(2 cos^2 theta).

    The hypergeometric variable here is cos^2 theta (both poles of the
    effective potential sit at its endpoints); the parameter set still
    follows the (rho, upsilon, b, d) pattern of the constant case. The
    eigenfunction is even about theta = pi/2.
    """
    m = int(m)
    k = int(k)
    if k < 0:
        raise ValueError(f"k must be >= 0, got {k}")
    s = _strength_s(kind, E)
    p = closed_form_lambda_sec2(s, m, k)

    ev, ev1, ev2 = _hyper_evaluators(
        k, p["b"], p["d"], p["rho"], p["upsilon"],
        u_of_theta=lambda th: np.cos(th) ** 2,
        du=lambda th: -np.sin(2.0 * th),
        ddu=lambda th: -2.0 * np.cos(2.0 * th),
    )
    theta = theta_nodes(n_grid)
    raw = ev(theta)
    scale = 1.0 / _closed_form_norm(ev)
    return AngularSolution(
        Lambda=p["Lambda"],
        k_or_l=k,
        m=m,
        theta=theta,
        values=scale * raw,
        closed_form_params=p,
        _eval=lambda th: scale * ev(th),
        _eval_d1=lambda th: scale * ev1(th),
        _eval_d2=lambda th: scale * ev2(th),
    )


def theta_residual(sol: AngularSolution, theta: np.ndarray,
                   v_eff: Callable[[np.ndarray], np.ndarray],
                   m_squared: float) -> float:
    """Sup-norm residual of the polar equation at the given interior points.

    Uses the solution's analytic derivatives when available, else seventh
    point centered differences of the evaluator.
    """
    theta = np.asarray(theta, dtype=float)
    q = sol.eval(theta)
    if sol._eval_d1 is not None and sol._eval_d2 is not None:
        d1 = sol._eval_d1(theta)
        d2 = sol._eval_d2(theta)
    else:
        h = 1e-3
        shifts = np.array([-3, -2, -1, 0, 1, 2, 3]) * h
        w1 = np.array([-1, 9, -45, 0, 45, -9, 1]) / (60.0 * h)
        w2 = np.array([2, -27, 270, -490, 270, -27, 2]) / (180.0 * h * h)
        stack = np.stack([sol.eval(theta + s) for s in shifts])
        d1 = w1 @ stack
        d2 = w2 @ stack
    sin = np.sin(theta)
    res = d2 + np.cos(theta) / sin * d1 + (
        sol.Lambda - (v_eff(theta) + m_squared) / sin ** 2
    ) * q
    scale = float(np.max(np.abs(q)))
    return float(np.max(np.abs(res)) / max(scale, 1e-300))


# ---------------------------------------------------------------------------
# Numeric solver


def _as_callable(v_eff_theta) -> Callable[[np.ndarray], np.ndarray]:
    if callable(v_eff_theta):
        return v_eff_theta
    if isinstance(v_eff_theta, tuple) and len(v_eff_theta) == 2:
        t, v = (np.asarray(a, dtype=float) for a in v_eff_theta)
        return lambda x: np.interp(np.asarray(x, dtype=float), t, v)
    arr = np.asarray(v_eff_theta, dtype=float)
    t = theta_nodes(len(arr))
    return lambda x: np.interp(np.asarray(x, dtype=float), t, arr)


def _endpoint_exponents(v: Callable, m_squared: float) -> tuple[float, float]:
    """Fractional endpoint exponents from the local inverse-square strength.

    Near the axis the operator behaves like an index sqrt(V(0) + m^2). A
    negative strength makes the endpoint supercritically attractive (the
    spectrum is unbounded below and mesh-dependent), which is rejected
    rather than silently discretized."""
    probe = math.pi / 4096.0
    s0 = float(v(np.array([probe]))[0]) + m_squared
    s1 = float(v(np.array([math.pi - probe]))[0]) + m_squared
    for label, s in (("theta -> 0", s0), ("theta -> pi", s1)):
        if s < -1e-9:
            raise SolverError(
                f"fall-to-center regime at {label}: effective inverse-square "
                f"strength V + m^2 = {s:.6g} < 0 (spectrum unbounded below)"
            )
    a0 = math.sqrt(s0) if s0 > 0.0 else 0.0
    a1 = math.sqrt(s1) if s1 > 0.0 else 0.0
    return a0, a1


def _solve_grid(v: Callable, m_squared: float, n: int, k_modes: int,
                a0: float, api: float, pole_exponent: float):
    h = math.pi / n
    t = theta_nodes(n)
    tf = np.arange(n + 1) * h
    st = np.sin(t)
    has_pole = pole_exponent > 0.0

    def logw(x):
        out = a0 * np.log(2.0 * np.sin(x / 2.0)) + api * np.log(2.0 * np.cos(x / 2.0))
        if has_pole:
            out = out + pole_exponent * np.log(np.abs(np.cos(x)))
        return out

    S = np.zeros(n + 1)
    x = tf[1:n]
    ok = np.ones(n - 1, dtype=bool)
    if has_pole:
        ok = np.abs(np.cos(x)) > 1e-13
    vals = np.zeros(n - 1)
    vals[ok] = np.sin(x[ok]) * np.exp(2.0 * logw(x[ok]))
    S[1:n] = vals

    w2 = np.exp(2.0 * logw(t))
    c = (v(t) + m_squared) / st
    L = 0.5 * a0 / np.tan(t / 2.0) - 0.5 * api * np.tan(t / 2.0)
    dsl = -(0.5 * a0) * st - (0.5 * api) * st
    if has_pole:
        L = L - pole_exponent * np.tan(t)
        dsl = dsl - pole_exponent * (st + st / np.cos(t) ** 2)
    ctil = c - dsl - st * L * L
    C = w2 * ctil
    B = st * w2

    diag = (S[:-1] + S[1:]) / h ** 2 + C
    off = -S[1:-1] / h ** 2
    diag = diag / B
    off = off / np.sqrt(B[:-1] * B[1:])
    lam, vec = eigh_tridiagonal(diag, off, select="i",
                                select_range=(0, k_modes - 1))
    # back from the similarity-transformed coordinates to Q = w G
    G = vec / np.sqrt(B)[:, None]
    Q = G * np.sqrt(w2)[:, None]
    return lam, t, Q


def solve_theta_numeric(
    v_eff_theta,
    m_squared: float,
    n_modes: int,
    n_grid: int = 800,
    pole_strength: float | None = None,
    check_convergence: bool = True,
) -> list[AngularSolution]:
    """Lowest eigenpairs of the polar operator for an arbitrary real V_eff.

    ``v_eff_theta`` is a callable of theta, a ``(theta, values)`` pair, or
    samples on the solver's own half-shifted grid. ``pole_strength`` s_p
    declares an interior 1/cos^2-type singularity, V ~ s_p / cos^2(theta)
    near pi/2; the solver absorbs its regular-solution exponent so the
    eigenfunctions are reported per parity sector with full accuracy.

    Each eigenvalue is Richardson-extrapolated from the (n, 2n) grid pair;
    with ``check_convergence`` a second extrapolation from (2n, 4n) guards
    against non-convergence (shift > 1e-4 raises).
    """
    if n_modes < 1:
        raise ValueError("n_modes must be >= 1")
    if n_grid < 8 or n_grid % 2:
        raise ValueError("n_grid must be even and >= 8")
    v = _as_callable(v_eff_theta)
    m_squared = float(m_squared)
    a0, api = _endpoint_exponents(v, m_squared)
    pole_exp = 0.0
    if pole_strength is not None and pole_strength > 0.0:
        pole_exp = 0.5 + math.sqrt(pole_strength + 0.25)

    lam1, _, _ = _solve_grid(v, m_squared, n_grid, n_modes, a0, api, pole_exp)
    lam2, t2, q2 = _solve_grid(v, m_squared, 2 * n_grid, n_modes, a0, api, pole_exp)
    rich = (4.0 * lam2 - lam1) / 3.0
    theta_out, q_out = t2, q2
    if check_convergence:
        lam4, t4, q4 = _solve_grid(v, m_squared, 4 * n_grid, n_modes, a0, api, pole_exp)
        rich2 = (4.0 * lam4 - lam2) / 3.0
        shift = float(np.max(np.abs(rich2 - rich)))
        if shift > 1e-4:
            raise ConvergenceError(
                f"theta eigenvalues moved by {shift:.3e} under grid doubling"
            )
        rich = rich2
        theta_out, q_out = t4, q4

    out = []
    for i in range(n_modes):
        vals = _normalize(theta_out, q_out[:, i])
        if vals[np.argmax(np.abs(vals))] < 0.0:
            vals = -vals
        out.append(
            AngularSolution(
                Lambda=float(rich[i]),
                k_or_l=i,
                m=int(round(math.sqrt(max(m_squared, 0.0)))),
                theta=theta_out,
                values=vals,
            )
        )
    return out
