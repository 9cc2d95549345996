"""Sweep orchestration, structured CSV/JSON output and the command line.

Subcommands: cgf, cumulants, sweep, emp, tur, oracle-check, optimum-trace.
Sweeps walk a grid over named axes (engine/driving fields plus the derived
axes te_rel, center_rel, eta_c, lam), evaluate a recipe at every point
through a worker pool, and write one RFC-4180 CSV row per point in
lexicographic axis order plus a JSON manifest.  Identical configs produce
byte-identical CSVs regardless of worker count; per-point failures land in
an ``error`` column and the run continues.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import itertools
import json
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from . import __version__, fcs, model, oracle, thermo
from .config import load_config

_MAX_GRID = 10 ** 6

RECIPES = ("flux-noise", "emp", "tur", "cgf", "oracle-check")

_RECIPE_COLUMNS = {
    "flux-noise": ("jd", "jg", "nd", "ng", "j", "n"),
    "emp": ("eb_star", "eta_star", "p_star", "on_boundary"),
    "tur": ("work", "power", "eta", "eta_c", "affinity", "entropy_rate",
            "gamma", "tur_ratio", "flux"),
    "cgf": ("sd", "sg", "s"),
    "oracle-check": ("sd", "sg", "s_adiabatic", "s_oracle", "rel_err"),
}

_ENGINE_FIELDS = {f.name for f in dataclasses.fields(model.EngineParams)}
_DRIVING_FIELDS = {f.name for f in dataclasses.fields(model.DrivingSpec)}


class SweepError(RuntimeError):
    pass


@dataclasses.dataclass
class SweepSpec:
    """Axis grid, recipe tag and output location for one sweep run."""

    axes: dict[str, list]
    recipe: str
    out_dir: Path
    name: str = "sweep"
    options: dict = dataclasses.field(default_factory=dict)

    def __post_init__(self):
        if self.recipe not in RECIPES:
            raise SweepError(f"unknown recipe {self.recipe!r}, expected one of {RECIPES}")
        size = 1
        for vals in self.axes.values():
            if len(vals) == 0:
                raise SweepError("empty axis value list")
            size *= len(vals)
        if size > _MAX_GRID:
            raise SweepError(f"grid of {size} points exceeds the {_MAX_GRID} bound")


def _apply_axis(params, spec, name, value):
    """One axis assignment -> updated (params, spec)."""
    if name == "r":
        return dataclasses.replace(params, r1h=value, r2h=value,
                                   r1c=value, r2c=value), spec
    if name in _ENGINE_FIELDS:
        return dataclasses.replace(params, **{name: value}), spec
    if name == "te_rel":
        return params, dataclasses.replace(spec, te=value * spec.t_p)
    if name == "center_rel":
        return params, dataclasses.replace(spec, center=value * spec.t_p)
    if name == "eta_c":
        if not 0.0 < value < 1.0:
            raise SweepError(f"eta_c axis value {value} outside (0, 1)")
        return params, dataclasses.replace(spec, th0=spec.tc0 / (1.0 - value))
    if name in _DRIVING_FIELDS:
        return params, dataclasses.replace(spec, **{name: value})
    if name == "lam":
        return params, spec  # consumed by the recipe
    raise SweepError(f"unknown axis {name!r}")


def _evaluate_point(task):
    """Worker entry: one grid point -> dict of output columns (or error)."""
    (params, spec, variant, recipe, axis_names, axis_values, options) = task
    out: dict[str, object] = dict(zip(axis_names, axis_values))
    try:
        lam = options.get("lam", 0.05)
        p, s = params, spec
        for name, value in zip(axis_names, axis_values):
            if name == "lam":
                lam = value
            p, s = _apply_axis(p, s, name, value)
        if recipe == "flux-noise":
            cums = fcs.cumulants(p, s, order=2, variant=variant)
            out.update(jd=cums.jd, jg=cums.jg, nd=cums.nd, ng=cums.ng,
                       j=cums.j, n=cums.n)
        elif recipe == "emp":
            res = thermo.emp(p, s, variant=variant,
                             contribution=options.get("contribution", "total"))
            out.update(eb_star=res.eb_star, eta_star=res.eta_star,
                       p_star=res.p_star, on_boundary=res.on_boundary)
        elif recipe == "tur":
            rep = thermo.thermo_report(p, s, variant=variant)
            out.update(work=rep.work, power=rep.power, eta=rep.eta,
                       eta_c=rep.eta_carnot, affinity=rep.affinity,
                       entropy_rate=rep.entropy_rate, gamma=rep.gamma,
                       tur_ratio=rep.tur_ratio, flux=rep.flux)
        elif recipe == "cgf":
            res = fcs._cgf_pair(p, s, lam, variant, geometric=True)
            out.update(sd=res.sd, sg=res.sg, s=res.sd + res.sg)
        elif recipe == "oracle-check":
            res = fcs._cgf_pair(p, s, lam, variant, geometric=True)
            prop = oracle.propagate_cgf(p, s, lam, variant=variant,
                                        periods=options.get("periods", 200))
            s_ad = res.sd + res.sg
            out.update(sd=res.sd, sg=res.sg, s_adiabatic=s_ad,
                       s_oracle=prop.s_estimate,
                       rel_err=abs(s_ad - prop.s_estimate) / abs(prop.s_estimate))
        out["error"] = ""
    except Exception as exc:  # per-point failure: record, keep sweeping
        out["error"] = f"{type(exc).__name__}: {exc}"
    return out


def _format_cell(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (float, np.floating)):
        return f"{float(value):.17g}"
    return str(value)


def run_sweep(params, spec, sweep: SweepSpec, variant="fix_diagonal",
              workers=1) -> tuple[Path, Path]:
    """Execute a sweep; returns (csv_path, manifest_path)."""
    t_start = time.time()
    axis_names = list(sweep.axes.keys())
    grids = [sweep.axes[n] for n in axis_names]
    points = list(itertools.product(*grids)) or [()]
    tasks = [(params, spec, variant, sweep.recipe, axis_names, values, sweep.options)
             for values in points]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(_evaluate_point, tasks, chunksize=8))
    else:
        rows = [_evaluate_point(t) for t in tasks]

    columns = axis_names + list(_RECIPE_COLUMNS[sweep.recipe]) + ["error"]
    sweep.out_dir.mkdir(parents=True, exist_ok=True)
    csv_path = sweep.out_dir / f"{sweep.name}.csv"
    with open(csv_path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\r\n")
        writer.writerow(columns)
        for row in rows:
            writer.writerow([_format_cell(row.get(c, "")) for c in columns])

    manifest = {
        "version": __version__,
        "recipe": sweep.recipe,
        "variant": variant,
        "axes": {n: [_format_cell(v) for v in sweep.axes[n]] for n in axis_names},
        "options": {k: _format_cell(v) for k, v in sweep.options.items()},
        "rows": len(rows),
        "errors": sum(1 for r in rows if r["error"]),
        "quadrature": {"n_start": 33, "n_cap": 4097, "rtol": 1e-9},
        "lambda_step": sweep.options.get("lambda_step", 1e-3),
        "engine": dataclasses.asdict(params),
        "driving": dataclasses.asdict(spec),
        "workers": workers,
        "wall_time_s": round(time.time() - t_start, 3),
    }
    if sweep.recipe == "emp" and "eta_c" in sweep.axes:
        good = [(r["eta_c"], r["eta_star"]) for r in rows if not r["error"]]
        if len(good) >= 2:
            x = np.array([g[0] for g in good], dtype=float)
            y = np.array([g[1] for g in good], dtype=float)
            a = np.vstack([x, np.ones_like(x)]).T
            coef, *_ = np.linalg.lstsq(a, y, rcond=None)
            manifest["emp_fit"] = {"slope": float(coef[0]),
                                   "intercept": float(coef[1])}
    manifest_path = sweep.out_dir / f"{sweep.name}.manifest.json"
    manifest_path.write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")
    return csv_path, manifest_path


# ---------------------------------------------------------------------------
# argmax post-processing
# ---------------------------------------------------------------------------

def _quadratic_argmax(x, y):
    """Peak position by a parabola through the 3 points around the argmax.

    Boundary arg-maxima are flagged (optimisation not possible on the grid).
    """
    k = int(np.argmax(y))
    if k in (0, len(y) - 1):
        return float(x[k]), float(y[k]), True
    x0, x1, x2 = x[k - 1], x[k], x[k + 1]
    y0, y1, y2 = y[k - 1], y[k], y[k + 1]
    denom = (y0 - 2 * y1 + y2)
    if denom == 0:
        return float(x1), float(y1), False
    # uniform-grid parabola vertex
    delta = 0.5 * (y0 - y2) / denom
    step = 0.5 * (x2 - x0)
    return float(x1 + delta * step), float(y1), False


def optimum_trace(csv_path, quantity, axis="ph"):
    """p_h* tables: per combination of the remaining axes, the interpolated
    argmax of ``quantity`` over the ``axis`` grid.

    Returns a list of dicts with the group key, the argmax position, the
    grid maximum and a boundary flag.
    """
    with open(csv_path, newline="") as fh:
        reader = csv.DictReader(fh)
        rows = [r for r in reader]
    if not rows:
        raise SweepError(f"empty dataset {csv_path}")
    if axis not in rows[0]:
        raise SweepError(f"dataset has no {axis!r} axis")
    if quantity not in rows[0]:
        raise SweepError(f"dataset has no {quantity!r} column")
    known_outputs = {c for cols in _RECIPE_COLUMNS.values() for c in cols} | {"error"}
    group_keys = [c for c in rows[0] if c not in known_outputs and c != axis]
    groups: dict[tuple, list] = {}
    for r in rows:
        if r["error"]:
            continue
        key = tuple(r[k] for k in group_keys)
        groups.setdefault(key, []).append((float(r[axis]), float(r[quantity])))
    tables = []
    for key, pts in groups.items():
        pts.sort()
        x = np.array([p[0] for p in pts])
        y = np.array([p[1] for p in pts])
        pos, peak, boundary = _quadratic_argmax(x, y)
        entry = dict(zip(group_keys, key))
        entry.update({"quantity": quantity, f"{axis}_star": pos,
                      "peak_value": peak, "on_boundary": boundary})
        tables.append(entry)
    return tables


# ---------------------------------------------------------------------------
# command line
# ---------------------------------------------------------------------------

def _add_common(p):
    p.add_argument("--config", type=Path, default=None, help="JSON parameter file")
    p.add_argument("--out", type=Path, default=Path("out"), help="output directory")
    p.add_argument("--variant", choices=model.VARIANTS, default="fix_diagonal")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--quad-n", type=int, default=33, help="initial quadrature nodes")
    p.add_argument("--lambda-step", type=float, default=1e-3)


def _build_parser():
    ap = argparse.ArgumentParser(prog="amqhe",
                                 description="Driven four-level quantum heat "
                                             "engine: counting statistics and "
                                             "thermodynamics")
    sub = ap.add_subparsers(dest="command", required=True)
    for name, help_ in (
            ("cgf", "dynamic and geometric CGF at given counting fields"),
            ("cumulants", "photon flux and noise cumulants"),
            ("sweep", "run the sweep described by the config"),
            ("emp", "efficiency at maximum power over eb"),
            ("tur", "thermodynamic report incl. the TUR ratio"),
            ("oracle-check", "compare adiabatic CGF against propagation"),
            ("optimum-trace", "argmax tables from a sweep CSV")):
        p = sub.add_parser(name, help=help_)
        _add_common(p)
        if name == "cgf":
            p.add_argument("--lam", type=float, nargs="+", default=[0.05])
        if name == "cumulants":
            p.add_argument("--order", type=int, default=2, choices=(1, 2))
        if name == "oracle-check":
            p.add_argument("--lam", type=float, nargs="+", default=[0.05])
            p.add_argument("--periods", type=int, default=200)
            p.add_argument("--slow", type=float, default=1.0,
                           help="divide omega by this factor")
        if name == "optimum-trace":
            p.add_argument("--dataset", type=Path, required=True)
            p.add_argument("--quantity", default="jd")
            p.add_argument("--axis", default="ph")
    return ap


def _emit(obj, out_dir: Path, name: str):
    out_dir.mkdir(parents=True, exist_ok=True)
    path = out_dir / f"{name}.json"
    path.write_text(json.dumps(obj, indent=2, sort_keys=True) + "\n")
    json.dump(obj, sys.stdout, indent=2, sort_keys=True)
    sys.stdout.write("\n")
    return path


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    params, spec, rest = load_config(args.config)

    if args.command == "cgf":
        out = []
        for lam in args.lam:
            res = fcs._cgf_pair(params, spec, lam, args.variant, geometric=True,
                                n_start=args.quad_n)
            out.append({"lam": lam, "sd": res.sd, "sg": res.sg,
                        "s": res.sd + res.sg, "n_nodes": res.n_nodes})
        _emit(out, args.out, "cgf")
    elif args.command == "cumulants":
        cums = fcs.cumulants(params, spec, order=args.order, variant=args.variant,
                             lambda_step=args.lambda_step, n_start=args.quad_n)
        _emit({"jd": cums.jd, "jg": cums.jg, "nd": cums.nd, "ng": cums.ng,
               "j": cums.j, "n": cums.n, "lambda_step": cums.lambda_step},
              args.out, "cumulants")
    elif args.command == "sweep":
        sweep_doc = rest.get("sweep")
        if not sweep_doc:
            sweep_doc = {"axes": {}, "recipe": "flux-noise"}
        sweep = SweepSpec(axes=sweep_doc.get("axes", {}),
                          recipe=sweep_doc.get("recipe", "flux-noise"),
                          out_dir=args.out,
                          name=sweep_doc.get("name", "sweep"),
                          options=sweep_doc.get("options", {}))
        csv_path, manifest_path = run_sweep(params, spec, sweep,
                                            variant=args.variant,
                                            workers=args.workers)
        print(csv_path)
        print(manifest_path)
    elif args.command == "emp":
        res = thermo.emp(params, spec, variant=args.variant)
        _emit({"eb_star": res.eb_star, "eta_star": res.eta_star,
               "p_star": res.p_star, "on_boundary": res.on_boundary},
              args.out, "emp")
    elif args.command == "tur":
        rep = thermo.thermo_report(params, spec, variant=args.variant)
        _emit(dataclasses.asdict(rep), args.out, "tur")
    elif args.command == "oracle-check":
        slowed = dataclasses.replace(spec, omega=spec.omega / args.slow) \
            if args.slow != 1.0 else spec
        out = []
        for lam in args.lam:
            res = fcs._cgf_pair(params, slowed, lam, args.variant, geometric=True)
            prop = oracle.propagate_cgf(params, slowed, lam, variant=args.variant,
                                        periods=args.periods)
            s_ad = res.sd + res.sg
            out.append({"lam": lam, "sd": res.sd, "sg": res.sg,
                        "s_adiabatic": s_ad, "s_oracle": prop.s_estimate,
                        "rel_err": abs(s_ad - prop.s_estimate) / abs(prop.s_estimate)})
        _emit(out, args.out, "oracle_check")
    elif args.command == "optimum-trace":
        tables = optimum_trace(args.dataset, args.quantity, args.axis)
        _emit(tables, args.out, "optimum_trace")
    return 0


if __name__ == "__main__":
    sys.exit(main())
