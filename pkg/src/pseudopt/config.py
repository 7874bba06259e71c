"""Run configuration: a small human-editable YAML tree.

Schema (version 1):

    schema_version: 1
    equation:
      kind: schroedinger | dirac
      mass: 1.0                 # required for dirac
    potential:
      radial:    {type: coulomb, strength: 1.0} | {type: zero}
                 | {type: grid, r: [...], value: [...]} | {type: grid, file: R.csv}
      polar:     {type: zero} | {type: half} | {type: inverse-cos-squared}
                 | {type: grid, theta: [...], value: [...]} | {type: grid, file: T.csv}
      azimuthal: {type: complex-exp, a: 1.0}
                 | {type: generated, generator: cos|const|bessel-gen, m: 1, omega: 2.0}
                 | {type: grid, phi: [...], re: [...], im: [...]} | {type: grid, file: P.csv}
    quantum:
      n_r: [0]          # list of radial quantum numbers
      k_or_l: [0]       # polar quantum numbers (l or k depending on branch)
      m: [0]            # magnetic quantum numbers
    solver:             # optional overrides, all defaulted
      phi_grid_n: 128
      theta_grid_n: 800
      radial_grid_n: 0        # 0 -> automatic
      r_max: 0.0              # 0 -> automatic
      reality_tol: 1.0e-8
      fixed_point_tol: 1.0e-10
    output:
      dir: out

Schema violations raise SchemaError with file:line anchors.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import yaml

from .errors import SchemaError
from .gridio import read_columns_csv, read_phi_grid_csv, require_uniform_phi
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
    ZeroPolar,
    ZeroRadial,
    preset_spec,
)

__all__ = ["RunConfig", "SolverOptions", "load_config", "config_from_preset",
           "build_generator_values"]

SCHEMA_VERSION = 1


@dataclass
class SolverOptions:
    phi_grid_n: int = 128
    theta_grid_n: int = 800
    radial_grid_n: int = 0
    r_max: float = 0.0
    reality_tol: float = 1e-8
    fixed_point_tol: float = 1e-10

    def validate(self) -> None:
        if self.phi_grid_n < 32:
            raise SchemaError("solver.phi_grid_n must be >= 32")
        if self.theta_grid_n < 8 or self.theta_grid_n % 2:
            raise SchemaError("solver.theta_grid_n must be even and >= 8")
        for name in ("reality_tol", "fixed_point_tol"):
            if not getattr(self, name) > 0.0:
                raise SchemaError(f"solver.{name} must be positive")


@dataclass
class RunConfig:
    spec: PotentialSpec
    kind: EquationKind
    n_r: list[int]
    k_or_l: list[int]
    m: list[int]
    solver: SolverOptions = field(default_factory=SolverOptions)
    out_dir: Path = Path("out")

    def channels(self):
        from .radial import QuantumNumbers

        for n_r in self.n_r:
            for kl in self.k_or_l:
                for m in self.m:
                    yield QuantumNumbers(n_r=n_r, k_or_l=kl, m=m)


# ---------------------------------------------------------------------------
# YAML loading with line anchors


class _Anchored:
    """Python data plus a line map keyed by key path tuples."""

    def __init__(self, data, lines):
        self.data = data
        self.lines = lines


def _load_yaml_tree(path: Path) -> _Anchored:
    text = path.read_text(encoding="utf-8")
    try:
        loader = yaml.SafeLoader(text)
        try:
            node = loader.get_single_node()
            if node is None:
                raise SchemaError(f"{path}: empty config")
            data = loader.construct_document(node)
        finally:
            loader.dispose()
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        line = f":{mark.line + 1}" if mark is not None else ""
        raise SchemaError(f"{path}{line}: invalid YAML ({exc})") from exc

    lines: dict[tuple, int] = {}

    def walk(nd, prefix: tuple):
        lines[prefix] = nd.start_mark.line + 1
        if isinstance(nd, yaml.MappingNode):
            for key_node, val_node in nd.value:
                walk(val_node, prefix + (str(key_node.value),))
        elif isinstance(nd, yaml.SequenceNode):
            for i, item in enumerate(nd.value):
                walk(item, prefix + (i,))

    walk(node, ())
    return _Anchored(data, lines)


class _Ctx:
    def __init__(self, path: Path, tree: _Anchored):
        self.path = path
        self.tree = tree

    def where(self, *key_path) -> str:
        line = self.tree.lines.get(tuple(key_path))
        if line is None and key_path:
            line = self.tree.lines.get(tuple(key_path[:-1]))
        return f"{self.path}:{line}" if line else str(self.path)

    def fail(self, key_path, msg) -> SchemaError:
        return SchemaError(f"{self.where(*key_path)}: {msg}")

    def get_map(self, data, key_path, required=True) -> dict:
        node = data
        if node is None:
            if required:
                raise self.fail(key_path, f"missing section {'.'.join(map(str, key_path))!r}")
            return {}
        if not isinstance(node, dict):
            raise self.fail(key_path, "expected a mapping")
        return node

    def get_scalar(self, mapping, key_path, kind, required=True, default=None):
        name = key_path[-1]
        if name not in mapping:
            if required:
                raise self.fail(key_path, f"missing required key {name!r}")
            return default
        val = mapping[name]
        if kind is float and isinstance(val, int) and not isinstance(val, bool):
            val = float(val)
        if kind is int and isinstance(val, bool):
            raise self.fail(key_path, f"{name!r} must be an integer")
        if not isinstance(val, kind):
            raise self.fail(key_path, f"{name!r} must be of type {kind.__name__}")
        if kind is float and not math.isfinite(val):
            raise self.fail(key_path, f"{name!r} must be finite")
        return val

    def get_int_list(self, mapping, key_path):
        name = key_path[-1]
        if name not in mapping:
            raise self.fail(key_path, f"missing required key {name!r}")
        val = mapping[name]
        if isinstance(val, int) and not isinstance(val, bool):
            return [val]
        if not isinstance(val, list) or not val or not all(
            isinstance(v, int) and not isinstance(v, bool) for v in val
        ):
            raise self.fail(key_path, f"{name!r} must be a non-empty list of integers")
        return list(val)

    def get_float_list(self, mapping, key_path):
        name = key_path[-1]
        val = mapping.get(name)
        if not isinstance(val, list) or not val or not all(
            isinstance(v, (int, float)) and not isinstance(v, bool) for v in val
        ):
            raise self.fail(key_path, f"{name!r} must be a non-empty list of numbers")
        return [float(v) for v in val]


def build_generator_values(name: str, m: int, omega: float, n_grid: int) -> np.ndarray:
    """Named single-valued generators for the second-order identity."""
    from .gridio import phi_nodes
    from .specfun import bessel_i

    phi = phi_nodes(n_grid)
    key = name.lower()
    if key in ("const", "constant", "one"):
        return np.ones(n_grid, dtype=complex)
    if key == "cos":
        return np.cos(phi).astype(complex)
    if key in ("bessel-gen", "bessel"):
        order = 2 * abs(int(m))
        vals = np.array(
            [bessel_i(order, omega * np.exp(0.5j * p)) for p in phi]
        )
        return np.exp(-1j * int(m) * phi) * vals
    raise SchemaError(f"unknown generator {name!r} (use cos, const or bessel-gen)")


def _parse_radial(ctx: _Ctx, node: dict, base: Path):
    kp = ("potential", "radial")
    typ = ctx.get_scalar(node, kp + ("type",), str)
    if typ == "coulomb":
        strength = ctx.get_scalar(node, kp + ("strength",), float, required=False, default=1.0)
        if strength < 0.0:
            raise ctx.fail(kp + ("strength",), "strength must be >= 0")
        return Coulomb(strength=strength)
    if typ == "zero":
        return ZeroRadial()
    if typ == "grid":
        if "file" in node:
            fname = ctx.get_scalar(node, kp + ("file",), str)
            _, cols = read_columns_csv(base / fname, ["r", "value"])
            return RadialGridChecked(ctx, kp, cols[0], cols[1])
        r = ctx.get_float_list(node, kp + ("r",))
        v = ctx.get_float_list(node, kp + ("value",))
        return RadialGridChecked(ctx, kp, r, v)
    raise ctx.fail(kp + ("type",), f"unknown radial type {typ!r}")


def RadialGridChecked(ctx, kp, r, v):
    from .symmetry import RadialGrid

    try:
        return RadialGrid(r=np.asarray(r, float), values=np.asarray(v, float))
    except ValueError as exc:
        raise ctx.fail(kp, str(exc)) from exc


def _parse_polar(ctx: _Ctx, node: dict, base: Path):
    kp = ("potential", "polar")
    typ = ctx.get_scalar(node, kp + ("type",), str)
    if typ == "zero":
        return ZeroPolar()
    if typ == "half":
        return HalfPolar()
    if typ in ("inverse-cos-squared", "sec2"):
        return InverseCosSquared()
    if typ == "grid":
        if "file" in node:
            fname = ctx.get_scalar(node, kp + ("file",), str)
            _, cols = read_columns_csv(base / fname, ["theta", "value"])
            theta, v = cols[0], cols[1]
        else:
            theta = ctx.get_float_list(node, kp + ("theta",))
            v = ctx.get_float_list(node, kp + ("value",))
        try:
            return PolarGrid(theta=np.asarray(theta, float), values=np.asarray(v, float))
        except ValueError as exc:
            raise ctx.fail(kp, str(exc)) from exc
    raise ctx.fail(kp + ("type",), f"unknown polar type {typ!r}")


def _parse_azimuthal(ctx: _Ctx, node: dict, base: Path, phi_grid_n: int):
    kp = ("potential", "azimuthal")
    typ = ctx.get_scalar(node, kp + ("type",), str)
    if typ == "complex-exp":
        a = ctx.get_scalar(node, kp + ("a",), float, required=False, default=1.0)
        if a < 0.0:
            raise ctx.fail(kp + ("a",), "coupling a must be >= 0")
        return ComplexExp(a=a)
    if typ == "generated":
        gen = ctx.get_scalar(node, kp + ("generator",), str)
        m = ctx.get_scalar(node, kp + ("m",), int)
        omega = ctx.get_scalar(node, kp + ("omega",), float, required=False, default=2.0)
        try:
            f_values = build_generator_values(gen, m, omega, phi_grid_n)
        except SchemaError as exc:
            raise ctx.fail(kp + ("generator",), str(exc)) from exc
        return GeneratedFrom(f_values=f_values, m=m)
    if typ == "grid":
        if "file" in node:
            fname = ctx.get_scalar(node, kp + ("file",), str)
            phi, values = read_phi_grid_csv(base / fname)
            try:
                require_uniform_phi(phi)
            except ValueError as exc:
                raise ctx.fail(kp + ("file",), f"{fname}: {exc}") from exc
        else:
            re = ctx.get_float_list(node, kp + ("re",))
            im = ctx.get_float_list(node, kp + ("im",))
            if len(re) != len(im):
                raise ctx.fail(kp, "re and im must have equal length")
            values = np.asarray(re, float) + 1j * np.asarray(im, float)
        try:
            return AzimuthalGrid(values=np.asarray(values, complex))
        except ValueError as exc:
            raise ctx.fail(kp, str(exc)) from exc
    raise ctx.fail(kp + ("type",), f"unknown azimuthal type {typ!r}")


def load_config(path: str | Path) -> RunConfig:
    """Parse and validate a config file; all violations raise SchemaError."""
    path = Path(path)
    if not path.exists():
        raise SchemaError(f"{path}: no such config file")
    tree = _load_yaml_tree(path)
    ctx = _Ctx(path, tree)
    root = ctx.get_map(tree.data, ())

    version = ctx.get_scalar(root, ("schema_version",), int)
    if version != SCHEMA_VERSION:
        raise ctx.fail(("schema_version",), f"unsupported schema_version {version}")

    eq = ctx.get_map(root.get("equation"), ("equation",))
    kind_name = ctx.get_scalar(eq, ("equation", "kind"), str).lower()
    if kind_name in ("schroedinger", "schrodinger"):
        kind: EquationKind = Schroedinger()
    elif kind_name == "dirac":
        mass = ctx.get_scalar(eq, ("equation", "mass"), float)
        if not mass > 0.0:
            raise ctx.fail(("equation", "mass"), "mass must be positive")
        kind = Dirac(mass=mass)
    else:
        raise ctx.fail(("equation", "kind"), f"unknown kind {kind_name!r}")

    solver = SolverOptions()
    sol_map = ctx.get_map(root.get("solver"), ("solver",), required=False)
    if sol_map:
        solver.phi_grid_n = ctx.get_scalar(sol_map, ("solver", "phi_grid_n"), int,
                                           required=False, default=solver.phi_grid_n)
        solver.theta_grid_n = ctx.get_scalar(sol_map, ("solver", "theta_grid_n"), int,
                                             required=False, default=solver.theta_grid_n)
        solver.radial_grid_n = ctx.get_scalar(sol_map, ("solver", "radial_grid_n"), int,
                                              required=False, default=solver.radial_grid_n)
        solver.r_max = ctx.get_scalar(sol_map, ("solver", "r_max"), float,
                                      required=False, default=solver.r_max)
        solver.reality_tol = ctx.get_scalar(sol_map, ("solver", "reality_tol"), float,
                                            required=False, default=solver.reality_tol)
        solver.fixed_point_tol = ctx.get_scalar(sol_map, ("solver", "fixed_point_tol"),
                                                float, required=False,
                                                default=solver.fixed_point_tol)
    try:
        solver.validate()
    except SchemaError as exc:
        raise SchemaError(f"{path}: {exc}") from exc

    pot = ctx.get_map(root.get("potential"), ("potential",))
    base = path.parent
    radial = _parse_radial(ctx, ctx.get_map(pot.get("radial"), ("potential", "radial")), base)
    polar = _parse_polar(ctx, ctx.get_map(pot.get("polar"), ("potential", "polar")), base)
    azim = _parse_azimuthal(ctx, ctx.get_map(pot.get("azimuthal"), ("potential", "azimuthal")),
                            base, solver.phi_grid_n)

    q = ctx.get_map(root.get("quantum"), ("quantum",))
    n_r = ctx.get_int_list(q, ("quantum", "n_r"))
    k_or_l = ctx.get_int_list(q, ("quantum", "k_or_l"))
    m = ctx.get_int_list(q, ("quantum", "m"))
    for name, vals in (("n_r", n_r), ("k_or_l", k_or_l)):
        if any(v < 0 for v in vals):
            raise ctx.fail(("quantum", name), f"{name} entries must be >= 0")

    out_map = ctx.get_map(root.get("output"), ("output",), required=False)
    out_dir = Path(out_map.get("dir", "out")) if out_map else Path("out")
    if not out_dir.is_absolute():
        out_dir = base / out_dir

    return RunConfig(
        spec=PotentialSpec(radial=radial, polar=polar, azimuthal=azim),
        kind=kind,
        n_r=n_r,
        k_or_l=k_or_l,
        m=m,
        solver=solver,
        out_dir=out_dir,
    )


def config_from_preset(name: str, out_dir: str | Path = "out") -> RunConfig:
    spec, kind, quantum = preset_spec(name)
    return RunConfig(
        spec=spec,
        kind=kind,
        n_r=quantum["n_r"],
        k_or_l=quantum["k_or_l"],
        m=quantum["m"],
        solver=SolverOptions(),
        out_dir=Path(out_dir),
    )
