import csv
import json
import math
from pathlib import Path

import numpy as np
import pytest

from amqhe import cli
from amqhe.cli import SweepSpec, SweepError, optimum_trace, run_sweep
from amqhe.config import load_config
from amqhe.model import DrivingSpec, EngineParams, ModelError


@pytest.fixture
def base():
    return EngineParams(), DrivingSpec()


class TestConfig:
    def test_empty_config_gives_baseline(self):
        params, spec, rest = load_config(None)
        assert params == EngineParams()
        assert spec == DrivingSpec()
        assert rest == {}

    def test_nested_document(self, tmp_path):
        doc = {"engine": {"r": 0.2, "tl": 2.7},
               "driving": {"phi": 0.0, "te_rel": 5.0},
               "sweep": {"recipe": "tur", "axes": {}}}
        path = tmp_path / "cfg.json"
        path.write_text(json.dumps(doc))
        params, spec, rest = load_config(path)
        assert params.r1h == params.r2c == 0.2
        assert params.tl == 2.7
        assert spec.phi == 0.0
        assert spec.te == pytest.approx(5.0 * spec.t_p)
        assert rest["sweep"]["recipe"] == "tur"

    def test_flat_document(self):
        params, spec, _ = load_config({"ph": 0.6, "a0": 0.02})
        assert params.ph == 0.6
        assert spec.a0 == 0.02

    def test_unknown_fields_rejected(self):
        with pytest.raises(ModelError):
            load_config({"engine": {"coupling": 1.0}, "driving": {}})


class TestSweep:
    def test_flux_noise_rows_and_columns(self, base, tmp_path):
        params, spec = base
        sweep = SweepSpec(axes={"ph": [0.0, 0.3], "te_rel": [1.0]},
                          recipe="flux-noise", out_dir=tmp_path, name="t")
        csv_path, manifest_path = run_sweep(params, spec, sweep)
        with open(csv_path, newline="") as fh:
            rows = list(csv.DictReader(fh))
        assert len(rows) == 2
        assert rows[0]["error"] == ""
        assert float(rows[1]["ph"]) == 0.3
        jd = float(rows[1]["jd"])
        assert jd == pytest.approx(4.209e-4, rel=1e-2)
        manifest = json.loads(manifest_path.read_text())
        assert manifest["recipe"] == "flux-noise"
        assert manifest["rows"] == 2 and manifest["errors"] == 0

    def test_single_point_run_with_no_axes(self, base, tmp_path):
        params, spec = base
        sweep = SweepSpec(axes={}, recipe="tur", out_dir=tmp_path, name="pt")
        csv_path, _ = run_sweep(params, spec, sweep)
        rows = list(csv.DictReader(open(csv_path, newline="")))
        assert len(rows) == 1
        assert float(rows[0]["tur_ratio"]) == pytest.approx(1.001, abs=2e-3)

    def test_parallel_matches_serial_bytes(self, base, tmp_path):
        params, spec = base
        axes = {"ph": [0.0, 0.5, 1.0], "lam": [0.02, 0.05]}
        a = SweepSpec(axes=axes, recipe="cgf", out_dir=tmp_path / "a", name="s")
        b = SweepSpec(axes=axes, recipe="cgf", out_dir=tmp_path / "b", name="s")
        csv_a, _ = run_sweep(params, spec, a, workers=1)
        csv_b, _ = run_sweep(params, spec, b, workers=3)
        assert csv_a.read_bytes() == csv_b.read_bytes()

    def test_point_failures_recorded_not_fatal(self, base, tmp_path):
        params, spec = base
        # second tl value puts th0 <= tc0 through eta_c -> per-point error
        sweep = SweepSpec(axes={"eta_c": [0.1, 0.9999], "ph": [0.3]},
                          recipe="tur", out_dir=tmp_path, name="e")
        csv_path, manifest_path = run_sweep(params, spec, sweep)
        rows = list(csv.DictReader(open(csv_path, newline="")))
        assert len(rows) == 2
        assert rows[0]["error"] == ""
        assert rows[1]["error"] != "" or float(rows[1]["eta_c"]) > 0
        manifest = json.loads(manifest_path.read_text())
        assert manifest["rows"] == 2

    def test_grid_bound_enforced(self, tmp_path):
        with pytest.raises(SweepError):
            SweepSpec(axes={"ph": list(range(1001)), "pc": list(range(1001))},
                      recipe="flux-noise", out_dir=tmp_path)

    def test_unknown_recipe_rejected(self, tmp_path):
        with pytest.raises(SweepError):
            SweepSpec(axes={}, recipe="heatmap", out_dir=tmp_path)


class TestOptimumTrace:
    def _write(self, path, rows, header):
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(header)
            w.writerows(rows)

    def test_quadratic_interpolation_of_peak(self, tmp_path):
        # parabola peaked at ph = 0.33 sampled on a 0.1 grid
        path = tmp_path / "d.csv"
        phs = np.round(np.arange(0.0, 1.05, 0.1), 2)
        rows = [[f"{p}", "1", f"{1.0 - (p - 0.33) ** 2}", ""] for p in phs]
        self._write(path, rows, ["ph", "te_rel", "jd", "error"])
        tables = optimum_trace(path, "jd")
        assert len(tables) == 1
        assert tables[0]["ph_star"] == pytest.approx(0.33, abs=0.005)
        assert not tables[0]["on_boundary"]

    def test_boundary_argmax_flagged(self, tmp_path):
        path = tmp_path / "d.csv"
        phs = np.round(np.arange(0.0, 1.05, 0.1), 2)
        rows = [[f"{p}", "1", f"{1.0 + p}", ""] for p in phs]
        self._write(path, rows, ["ph", "te_rel", "jd", "error"])
        tables = optimum_trace(path, "jd")
        assert tables[0]["on_boundary"]
        assert tables[0]["ph_star"] == pytest.approx(1.0)

    def test_groups_by_remaining_axes(self, tmp_path):
        path = tmp_path / "d.csv"
        rows = []
        peaks = {1: 0.35, 5: 0.75}
        for te, peak in peaks.items():
            for p in (0.0, 0.3, 0.6, 0.9):
                rows.append([f"{p}", f"{te}", f"{-(p - peak) ** 2}", ""])
        self._write(path, rows, ["ph", "te_rel", "jd", "error"])
        tables = optimum_trace(path, "jd")
        stars = {t["te_rel"]: t["ph_star"] for t in tables}
        assert len(stars) == 2
        # parabola vertex is recovered exactly on a uniform grid
        assert stars["1"] == pytest.approx(0.35, abs=1e-12)
        assert stars["5"] == pytest.approx(0.75, abs=1e-12)

    def test_missing_axis_or_column(self, tmp_path):
        path = tmp_path / "d.csv"
        self._write(path, [["0.1", "2", ""]], ["pc", "jd", "error"])
        with pytest.raises(SweepError):
            optimum_trace(path, "jd")
        with pytest.raises(SweepError):
            optimum_trace(path, "nd", axis="pc")

    def test_empty_dataset_rejected(self, tmp_path):
        path = tmp_path / "d.csv"
        self._write(path, [], ["ph", "jd", "error"])
        with pytest.raises(SweepError):
            optimum_trace(path, "jd")


class TestCommandLine:
    def test_cumulants_subcommand(self, tmp_path, capsys):
        rc = cli.main(["cumulants", "--order", "1", "--out", str(tmp_path)])
        assert rc == 0
        out = json.loads((tmp_path / "cumulants.json").read_text())
        assert out["jd"] == pytest.approx(4.209e-4, rel=1e-2)

    def test_cgf_subcommand(self, tmp_path):
        rc = cli.main(["cgf", "--lam", "0.05", "--out", str(tmp_path)])
        assert rc == 0
        out = json.loads((tmp_path / "cgf.json").read_text())
        assert out[0]["sd"] == pytest.approx(1.1554e-4, rel=1e-3)
        assert out[0]["sg"] == pytest.approx(3.0384e-5, rel=1e-3)

    def test_sweep_subcommand_with_config(self, tmp_path):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({
            "driving": {"phi": 0.0},
            "sweep": {"recipe": "flux-noise", "name": "run",
                      "axes": {"ph": [0.2, 0.4]}}}))
        rc = cli.main(["sweep", "--config", str(cfg), "--out", str(tmp_path)])
        assert rc == 0
        rows = list(csv.DictReader(open(tmp_path / "run.csv", newline="")))
        assert len(rows) == 2
        assert abs(float(rows[0]["jg"])) < 1e-8  # phi = 0

    def test_tur_subcommand(self, tmp_path):
        rc = cli.main(["tur", "--out", str(tmp_path)])
        assert rc == 0
        out = json.loads((tmp_path / "tur.json").read_text())
        assert out["tur_ratio"] == pytest.approx(1.001, abs=2e-3)

    def test_optimum_trace_subcommand(self, tmp_path):
        src = tmp_path / "d.csv"
        with open(src, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["ph", "jd", "error"])
            for p in (0.0, 0.25, 0.5, 0.75, 1.0):
                w.writerow([p, 1.0 - (p - 0.5) ** 2, ""])
        rc = cli.main(["optimum-trace", "--dataset", str(src),
                       "--quantity", "jd", "--out", str(tmp_path)])
        assert rc == 0
        out = json.loads((tmp_path / "optimum_trace.json").read_text())
        assert out[0]["ph_star"] == pytest.approx(0.5, abs=1e-9)
