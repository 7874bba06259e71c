"""Command-line behavior: exit codes, determinism, file contracts."""

import json
import math

import numpy as np
import pytest

from pseudopt.cli import main
from pseudopt.gridio import phi_nodes, read_columns_csv, read_phi_grid_csv

BASE_CONFIG = """\
schema_version: 1
equation:
  kind: schroedinger
potential:
  radial: {type: coulomb, strength: 1.0}
  polar: {type: zero}
  azimuthal: {type: complex-exp, a: 1.0}
quantum:
  n_r: [0]
  k_or_l: [0]
  m: [0]
output:
  dir: out
"""


def _write(tmp_path, text, name="run.yaml"):
    path = tmp_path / name
    path.write_text(text, encoding="utf-8")
    return path


class TestSolve:
    def test_preset_ground_state(self, tmp_path):
        out = tmp_path / "o"
        assert main(["solve", "--preset", "coulomb-a1", "--out", str(out)]) == 0
        payload = json.loads((out / "states.json").read_text())
        assert payload["states"][0]["lambda"] == pytest.approx(-0.25, abs=1e-4)
        for stem in ("phi_nr0_l0_m0", "theta_nr0_l0_m0", "radial_nr0_l0_m0"):
            assert (out / f"{stem}.csv").exists()

    def test_config_file_run(self, tmp_path):
        cfg = _write(tmp_path, BASE_CONFIG)
        assert main(["solve", "--config", str(cfg)]) == 0
        payload = json.loads((tmp_path / "out" / "states.json").read_text())
        assert payload["states"][0]["m_squared"] == {"re": 0.0, "im": 0.0}

    def test_deterministic_output(self, tmp_path):
        cfg = _write(tmp_path, BASE_CONFIG)
        assert main(["solve", "--config", str(cfg)]) == 0
        first = (tmp_path / "out" / "states.json").read_bytes()
        assert main(["solve", "--config", str(cfg)]) == 0
        second = (tmp_path / "out" / "states.json").read_bytes()
        assert first == second

    def test_hartmann_preset(self, tmp_path):
        out = tmp_path / "h"
        assert main(["solve", "--preset", "hartmann", "--out", str(out)]) == 0
        payload = json.loads((out / "states.json").read_text())
        # ring-shaped constant with m = 1: polar index collapses to l(l+1) = 2
        assert payload["states"][0]["Lambda"]["re"] == pytest.approx(2.0, abs=1e-5)

    def test_malformed_config_exits_1_without_outputs(self, tmp_path):
        bad = BASE_CONFIG.replace("kind: schroedinger", "kind: unknown-kind")
        cfg = _write(tmp_path, bad)
        assert main(["solve", "--config", str(cfg)]) == 1
        assert not (tmp_path / "out").exists()

    def test_invalid_yaml_exits_1(self, tmp_path):
        cfg = _write(tmp_path, "schema_version: [unclosed")
        assert main(["solve", "--config", str(cfg)]) == 1

    def test_missing_required_section(self, tmp_path, capsys):
        cfg = _write(tmp_path, BASE_CONFIG.replace("quantum:", "quantum_typo:"))
        assert main(["solve", "--config", str(cfg)]) == 1
        err = capsys.readouterr().err
        assert "quantum" in err and str(cfg) in err

    def test_line_anchor_in_message(self, tmp_path, capsys):
        bad = BASE_CONFIG.replace("strength: 1.0", "strength: -2.0")
        cfg = _write(tmp_path, bad)
        assert main(["solve", "--config", str(cfg)]) == 1
        err = capsys.readouterr().err
        assert f"{cfg}:" in err  # carries a file:line anchor

    def test_reality_violation_exits_3(self, tmp_path):
        phi = phi_nodes(128)
        v = 4j * np.sin(2 * phi)  # symmetric yet spectrally broken
        re = ", ".join(f"{x:.17g}" for x in v.real)
        im = ", ".join(f"{x:.17g}" for x in v.imag)
        cfg_text = BASE_CONFIG.replace(
            "  azimuthal: {type: complex-exp, a: 1.0}",
            f"  azimuthal: {{type: grid, re: [{re}], im: [{im}]}}",
        )
        cfg = _write(tmp_path, cfg_text)
        assert main(["solve", "--config", str(cfg)]) == 3

    def test_solver_failure_exits_2(self, tmp_path):
        # free radial motion binds nothing
        bad = BASE_CONFIG.replace("{type: coulomb, strength: 1.0}", "{type: zero}")
        cfg = _write(tmp_path, bad)
        assert main(["solve", "--config", str(cfg)]) == 2

    def test_requires_config_or_preset(self):
        assert main(["solve"]) == 1
        assert main(["solve", "--preset", "coulomb-a1", "--config", "x.yaml"]) == 1


class TestCheck:
    def test_symmetric_preset_passes(self, capsys):
        assert main(["check", "--preset", "coulomb-a1"]) == 0
        out = capsys.readouterr().out
        assert "PASS" in out and "FAIL" not in out

    def test_asymmetric_grid_reported(self, tmp_path, capsys):
        phi = phi_nodes(64)
        re = ", ".join("0" for _ in phi)
        im = ", ".join(f"{x:.17g}" for x in phi)
        cfg_text = BASE_CONFIG.replace(
            "  azimuthal: {type: complex-exp, a: 1.0}",
            f"  azimuthal: {{type: grid, re: [{re}], im: [{im}]}}",
        )
        cfg = _write(tmp_path, cfg_text)
        assert main(["check", "--config", str(cfg)]) == 0
        out = capsys.readouterr().out
        assert "FAIL" in out

    def test_k_branch_probe(self, capsys):
        assert main(["check", "--preset", "coulomb-a1", "--k-branch-probe"]) == 0
        out = capsys.readouterr().out
        assert "K-branch" in out

    def test_json_report(self, capsys):
        assert main(["check", "--preset", "coulomb-a1", "--json"]) == 0
        report = json.loads(capsys.readouterr().out)
        assert report["azimuthal_pt_symmetric"] is True
        assert report["reality_max_im"] < 1e-8


class TestGenerate:
    def test_cosine_potential(self, tmp_path):
        assert main(["generate", "--generator", "cos", "--m", "1",
                     "--out", str(tmp_path)]) == 0
        phi, values = read_phi_grid_csv(tmp_path / "potential_cos_m1.csv")
        assert len(phi) == 126  # two excluded cosine zeros dropped
        # the phi column identifies grid nodes; snap before evaluating tan,
        # whose derivative would otherwise amplify the 12-digit rounding
        nodes = phi_nodes(128)
        phi_exact = nodes[np.rint(phi / (2 * np.pi / 128)).astype(int)]
        exact = -(1.0 + 2j * np.tan(phi_exact))
        assert np.max(np.abs(values - exact)) < 1e-10

    def test_constant_generator_zero_potential(self, tmp_path):
        assert main(["generate", "--generator", "const", "--m", "2",
                     "--out", str(tmp_path)]) == 0
        _, values = read_phi_grid_csv(tmp_path / "potential_const_m2.csv")
        assert np.max(np.abs(values)) < 1e-10

    def test_bessel_generator_recovers_complex_exp(self, tmp_path):
        assert main(["generate", "--generator", "bessel-gen", "--m", "1",
                     "--omega", "2.0", "--out", str(tmp_path)]) == 0
        phi, values = read_phi_grid_csv(tmp_path / "potential_bessel-gen_m1.csv")
        assert np.max(np.abs(values + np.exp(1j * phi))) < 1e-8

    def test_excessive_exclusion_exits_2(self, tmp_path):
        phi = phi_nodes(128)
        f = np.cos(16 * phi)
        from pseudopt.gridio import write_phi_grid_csv

        fpath = tmp_path / "gen.csv"
        write_phi_grid_csv(fpath, phi, f.astype(complex))
        assert main(["generate", "--f-file", str(fpath), "--m", "0",
                     "--out", str(tmp_path)]) == 2

    def test_grid_with_holes_rejected(self, tmp_path):
        # a file written with excluded samples is not a uniform grid anymore
        from pseudopt.gridio import write_phi_grid_csv

        phi = phi_nodes(64)
        f = np.cos(phi).astype(complex)
        fpath = tmp_path / "holes.csv"
        write_phi_grid_csv(fpath, phi, f, excluded=np.abs(f) < 0.05)
        assert main(["generate", "--f-file", str(fpath), "--m", "0",
                     "--out", str(tmp_path)]) == 1
        cfg = tmp_path / "run.yaml"
        cfg.write_text(BASE_CONFIG.replace(
            "  azimuthal: {type: complex-exp, a: 1.0}",
            "  azimuthal: {type: grid, file: holes.csv}",
        ), encoding="utf-8")
        assert main(["solve", "--config", str(cfg)]) == 1


class TestDensity:
    def test_zero_sweep_flat(self, tmp_path, capsys):
        assert main(["density", "--preset", "coulomb-a0", "--out", str(tmp_path),
                     "--sweep", "0", "--n-r-samples", "16",
                     "--n-theta-samples", "9", "--n-phi-samples", "16"]) == 0
        _, cols = read_columns_csv(tmp_path / "localization.csv", ["a", "ratio"])
        assert cols[1][0] == pytest.approx(1.0, abs=1e-10)

    def test_sweep_outputs_and_monotonicity(self, tmp_path):
        assert main(["density", "--preset", "coulomb-a1", "--out", str(tmp_path),
                     "--sweep", "0.5,1,2", "--n-r-samples", "16",
                     "--n-theta-samples", "9", "--n-phi-samples", "32"]) == 0
        _, cols = read_columns_csv(tmp_path / "localization.csv", ["a", "ratio"])
        ratios = cols[1]
        assert all(b > a for a, b in zip(ratios, ratios[1:]))
        for a in ("0.5", "1", "2"):
            assert (tmp_path / f"density_nr0_l0_m0_a{a}.csv").exists()
            assert (tmp_path / f"density_nr0_l0_m0_a{a}.json").exists()

    def test_bad_sweep_rejected(self, tmp_path):
        assert main(["density", "--preset", "coulomb-a1", "--out", str(tmp_path),
                     "--sweep", "2,1"]) == 1
        assert main(["density", "--preset", "coulomb-a1", "--out", str(tmp_path),
                     "--sweep", "abc"]) == 1


class TestThreadCap:
    def test_env_var_respected(self, tmp_path, monkeypatch):
        monkeypatch.setenv("PSEUDO_PT_THREADS", "1")
        out = tmp_path / "o"
        assert main(["solve", "--preset", "coulomb-a1", "--out", str(out)]) == 0
        monkeypatch.setenv("PSEUDO_PT_THREADS", "zero")
        assert main(["solve", "--preset", "coulomb-a1", "--out", str(out)]) == 1
