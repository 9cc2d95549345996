"""Figure regeneration against real sweep output (acceptance criterion for
the figures component) plus unit coverage of the recipe machinery.

The sweep CSVs are produced through the engine's command line, which is the
only interface this package consumes.
"""

import csv
import json
import subprocess
import sys
from pathlib import Path

import numpy as np
import pytest

from amqhe_figures import FigureRecipe, RecipeError, build_figure, render
from amqhe_figures.recipes import read_table


def run_amqhe(args, cwd):
    cmd = [sys.executable, "-m", "amqhe.cli"] + args
    res = subprocess.run(cmd, cwd=cwd, capture_output=True, text=True)
    assert res.returncode == 0, res.stderr
    return res


@pytest.fixture(scope="session")
def sweep_csvs(tmp_path_factory):
    """Criterion-5/7/8 style datasets generated through the CLI."""
    root = tmp_path_factory.mktemp("sweeps")

    flux_cfg = root / "flux.json"
    flux_cfg.write_text(json.dumps({
        "sweep": {"recipe": "flux-noise", "name": "flux",
                  "axes": {"ph": [0.0, 0.2, 0.4, 0.6, 0.8, 1.0],
                           "te_rel": [1.0, 5.0, 25.0]}}}))
    run_amqhe(["sweep", "--config", str(flux_cfg), "--out", str(root)], root)

    emp_cfg = root / "emp.json"
    emp_cfg.write_text(json.dumps({
        "sweep": {"recipe": "emp", "name": "emp",
                  "axes": {"eta_c": [0.05, 0.12], "te_rel": [1.0, 5.0]}}}))
    run_amqhe(["sweep", "--config", str(emp_cfg), "--out", str(root)], root)

    tur_cfg = root / "tur.json"
    tur_cfg.write_text(json.dumps({
        "driving": {"phi": 0.0},
        "sweep": {"recipe": "tur", "name": "tur",
                  "axes": {"tl": [1.2, 2.7], "ph": [0.0, 0.5, 1.0],
                           "te_rel": [1.0, 5.0, 25.0]}}}))
    run_amqhe(["sweep", "--config", str(tur_cfg), "--out", str(root)], root)

    return {"flux": root / "flux.csv", "emp": root / "emp.csv",
            "tur": root / "tur.csv"}


def test_emp_manifest_records_linear_fit(sweep_csvs):
    manifest = json.loads(
        sweep_csvs["emp"].with_name("emp.manifest.json").read_text())
    fit = manifest["emp_fit"]
    assert 0.3 < fit["slope"] < 0.7


class TestRendering:
    @pytest.mark.parametrize("figure_id,key", [("2", "flux"), ("3", "flux"),
                                               ("4", "emp"), ("5", "tur"),
                                               ("phmax", "flux")])
    def test_renders_without_error(self, figure_id, key, sweep_csvs, tmp_path):
        out = tmp_path / f"fig{figure_id}.png"
        path = render(FigureRecipe(figure_id=figure_id,
                                   inputs=[sweep_csvs[key]], output=out))
        assert path.exists() and path.stat().st_size > 5000

    def test_fig4_contains_half_slope_reference(self, sweep_csvs):
        fig = build_figure(FigureRecipe(figure_id="4",
                                        inputs=[sweep_csvs["emp"]],
                                        output=Path("unused.png")))
        gids = [line.get_gid() for ax in fig.axes for line in ax.lines]
        assert "reference-eta_c-over-2" in gids
        ax_b = fig.axes[1]
        ref = [l for l in ax_b.lines if l.get_gid() == "reference-eta_c-over-2"][0]
        x, y = ref.get_data()
        assert np.allclose(y, 0.5 * np.asarray(x))

    def test_fig5_unity_line_and_subunity_flags(self, sweep_csvs):
        # the phi=0 dataset sits marginally below 1, so flags must appear
        table = read_table(sweep_csvs["tur"])
        assert np.min(table["tur_ratio"]) < 1.0
        fig = build_figure(FigureRecipe(figure_id="5",
                                        inputs=[sweep_csvs["tur"]],
                                        output=Path("unused.png")))
        gids = [line.get_gid() for ax in fig.axes for line in ax.lines]
        assert "reference-unity" in gids
        markers = [line.get_marker() for ax in fig.axes for line in ax.lines]
        assert "x" in markers  # sub-unity points visually flagged

    def test_phmax_with_multiple_inputs(self, sweep_csvs, tmp_path):
        out = tmp_path / "phmax.png"
        recipe = FigureRecipe(figure_id="phmax",
                              inputs=[sweep_csvs["flux"], sweep_csvs["flux"]],
                              labels=["gaussian", "again"], output=out)
        assert render(recipe).exists()

    def test_rerender_is_byte_identical(self, sweep_csvs, tmp_path):
        a = render(FigureRecipe(figure_id="2", inputs=[sweep_csvs["flux"]],
                                output=tmp_path / "a.png"))
        b = render(FigureRecipe(figure_id="2", inputs=[sweep_csvs["flux"]],
                                output=tmp_path / "b.png"))
        assert a.read_bytes() == b.read_bytes()

    def test_svg_output_supported(self, sweep_csvs, tmp_path):
        out = render(FigureRecipe(figure_id="2", inputs=[sweep_csvs["flux"]],
                                  output=tmp_path / "fig2.svg"))
        assert out.read_text().startswith("<?xml")


class TestErrors:
    def _write_csv(self, path, header, rows):
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(header)
            w.writerows(rows)

    def test_missing_columns_named(self, tmp_path):
        path = tmp_path / "bad.csv"
        self._write_csv(path, ["ph", "jd", "error"], [["0.1", "1.0", ""]])
        with pytest.raises(RecipeError, match="te_rel"):
            build_figure(FigureRecipe(figure_id="2", inputs=[path],
                                      output=tmp_path / "x.png"))

    def test_empty_csv_rejected_no_output(self, tmp_path):
        path = tmp_path / "empty.csv"
        self._write_csv(path, ["ph", "te_rel", "jd", "jg", "error"], [])
        out = tmp_path / "x.png"
        with pytest.raises(RecipeError, match="empty"):
            render(FigureRecipe(figure_id="2", inputs=[path], output=out))
        assert not out.exists()

    def test_unknown_figure_id(self, tmp_path):
        with pytest.raises(RecipeError):
            FigureRecipe(figure_id="7", inputs=[tmp_path / "a.csv"],
                         output=tmp_path / "x.png")

    def test_no_inputs(self, tmp_path):
        with pytest.raises(RecipeError):
            FigureRecipe(figure_id="2", inputs=[], output=tmp_path / "x.png")


class TestCli:
    def test_cli_round_trip(self, sweep_csvs, tmp_path):
        from amqhe_figures.cli import main
        out = tmp_path / "fig5.png"
        rc = main(["--recipe", "5", "--in", str(sweep_csvs["tur"]),
                   "--out", str(out)])
        assert rc == 0 and out.exists()

    def test_cli_reports_recipe_errors(self, tmp_path, capsys):
        from amqhe_figures.cli import main
        bad = tmp_path / "bad.csv"
        bad.write_text("ph,error\n")
        rc = main(["--recipe", "2", "--in", str(bad),
                   "--out", str(tmp_path / "x.png")])
        assert rc == 2
        assert "error" in capsys.readouterr().err
