import json
import os

import numpy as np
import pytest

from trapci.cli import main
from trapci.config import RunConfig
from trapci.model import ShellSpec


SMALL_BASIS_CFG = {
    "basis": {"name": "mini", "shells": [
        {"sigma": 0, "exponents": [0.7, 1.0, 2.8]},
        {"sigma": 1, "exponents": [1.0]},
    ]},
    "morse": {"De": 3.0},
    "workflow": {"de_values": [3.0], "density_points": 41,
                 "density_extent": 2.0},
}


def write_cfg(tmp_path, data):
    p = tmp_path / "cfg.json"
    p.write_text(json.dumps(data))
    return str(p)


class TestRunConfig:
    def test_roundtrip_semantics(self):
        cfg = RunConfig()
        cfg.shells = (ShellSpec(0, (0.3, 0.5, 1.0, 2.2)),)
        cfg.basis_name = "custom"
        again = RunConfig.from_json(cfg.to_json())
        assert again.to_dict() == cfg.to_dict()
        assert again.morse == cfg.morse
        assert again.solver.lindep_threshold == cfg.solver.lindep_threshold

    def test_spec_config_shape(self):
        text = json.dumps({
            "basis": {"shells": [{"sigma": 0, "exponents": [0.3, 0.5, 1.0, 2.2],
                                  "center": [0, 0, 0]}], "name": "GTO"}})
        cfg = RunConfig.from_json(text)
        # config exponents are 1/d_ho^2: absolute values halve
        basis = cfg.basis()
        assert basis.n == 4
        assert basis.primitives[0].tau == pytest.approx(0.15)

    def test_bad_json(self):
        from trapci.errors import ConfigurationError
        with pytest.raises(ConfigurationError):
            RunConfig.from_json("{nope")


class TestCliCommands:
    def test_reference_and_exit_code(self, tmp_path):
        cfg = write_cfg(tmp_path, {"workflow": {"de_values": [3.0]}})
        rc = main(["reference", "--config", cfg, "--out", str(tmp_path / "o")])
        assert rc == 0
        lines = (tmp_path / "o" / "reference.csv").read_text().splitlines()
        assert lines[0] == "De_hw,label,L,E_hw"
        assert len(lines) == 7

    def test_ci_small_basis(self, tmp_path):
        cfg = write_cfg(tmp_path, SMALL_BASIS_CFG)
        out = tmp_path / "ci"
        rc = main(["ci", "--config", cfg, "--out", str(out)])
        assert rc == 0
        spec_lines = (out / "spectrum.csv").read_text().splitlines()
        assert spec_lines[0] == "De_hw,as_dho,inv_as,state_index,cluster_id,L_guess,E_hw"
        report = json.loads((out / "timing.json").read_text())
        assert report["n_cf"] == report["n_gto"] * (report["n_gto"] + 1) // 2
        assert report["route_agreement"] < 1e-9

    def test_ci_deterministic_bytes(self, tmp_path):
        cfg = write_cfg(tmp_path, SMALL_BASIS_CFG)
        outs = []
        for name in ("a", "b"):
            out = tmp_path / name
            assert main(["ci", "--config", cfg, "--out", str(out)]) == 0
            outs.append((out / "spectrum.csv").read_bytes())
        assert outs[0] == outs[1]

    def test_scatter_small_range(self, tmp_path):
        cfg = write_cfg(tmp_path, {"workflow": {"de_range": [3.0, 6.0], "n_de": 5}})
        out = tmp_path / "sc"
        rc = main(["scatter", "--config", cfg, "--out", str(out)])
        assert rc == 0
        rows = (out / "scatter.csv").read_text().splitlines()
        assert rows[0] == "De_hw,as_dho"
        assert len(rows) == 6
        poles = (out / "poles.csv").read_text().splitlines()
        assert poles[0] == "De_hw"
        assert len(poles) == 2  # only the first pole sits in [3, 6]
        assert float(poles[1]) == pytest.approx(3.8138, abs=2e-3)

    def test_sweep_with_list(self, tmp_path):
        cfg = write_cfg(tmp_path, SMALL_BASIS_CFG)
        out = tmp_path / "sw"
        rc = main(["sweep", "--config", cfg, "--out", str(out),
                   "--De-list", "3.0,5.0"])
        assert rc == 0
        rows = (out / "sweep.csv").read_text().splitlines()
        assert rows[0] == "De_hw,as_dho,inv_as,label,L,E_ci_hw,E_ref_hw,dev_hw"
        labels = {r.split(",")[3] for r in rows[1:]}
        assert {"MGS", "MS1", "MS2", "TS1", "TS2", "TS3"} <= labels

    def test_sweep_empty_list_usage_error(self, tmp_path):
        cfg = write_cfg(tmp_path, SMALL_BASIS_CFG)
        rc = main(["sweep", "--config", cfg, "--out", str(tmp_path / "x"),
                   "--De-list", ""])
        assert rc == 2

    def test_scatter_empty_range_usage_error(self, tmp_path):
        cfg = write_cfg(tmp_path, {"workflow": {"de_range": [5.0, 5.0], "n_de": 0}})
        rc = main(["scatter", "--config", cfg, "--out", str(tmp_path / "x")])
        assert rc == 2

    def test_density_by_label_and_bad_label(self, tmp_path):
        cfg = write_cfg(tmp_path, SMALL_BASIS_CFG)
        out = tmp_path / "d"
        rc = main(["density", "--config", cfg, "--out", str(out), "--state", "MGS"])
        assert rc == 0
        for f in ("density_ci.csv", "cut_diag_ci.csv", "cut_antidiag_ci.csv",
                  "density_ref.csv", "cut_diag_ref.csv", "cut_antidiag_ref.csv"):
            assert (out / f).exists(), f
        rc = main(["density", "--config", cfg, "--out", str(out), "--state", "WAT"])
        assert rc == 2

    def test_de_override(self, tmp_path):
        cfg = write_cfg(tmp_path, SMALL_BASIS_CFG)
        out = tmp_path / "o5"
        rc = main(["ci", "--config", cfg, "--out", str(out), "--De", "5.0"])
        assert rc == 0
        first = (out / "spectrum.csv").read_text().splitlines()[1]
        assert first.startswith("5,")
