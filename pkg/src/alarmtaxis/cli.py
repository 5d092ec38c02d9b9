"""Command-line front end.

    alarmtaxis simulate --config run.ini [--out DIR] [--seed N]
    alarmtaxis steady --b1 1 --b2 1 [--b3 0 --c3 0]
    alarmtaxis region [--b1-range 0 4] [--b2-range 0 3] [--resolution 200] [--out FILE]
    alarmtaxis sweep --config sweep.ini [--out DIR] [--workers N] [--seed N]
    alarmtaxis rate --csv diagnostics.csv --column dev_Linf_u --window 5 40

Exit codes: 0 success, 1 usage or configuration error, 2 numerical failure.
"""

from __future__ import annotations

import argparse
import configparser
import io as _stdio
import itertools
import logging
import math
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import diagnostics, io, stability, steady_states, stepper
from .config import RunConfig, build_initial, load_config, parse_config, resolve_reference, to_ini
from .errors import AlarmTaxisError, ConfigError, NumericalFailure
from .model import ModelParams

log = logging.getLogger("alarmtaxis")

EXIT_OK, EXIT_USAGE, EXIT_NUMERICAL = 0, 1, 2


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


# ---------------------------------------------------------------- simulate


@dataclass
class Outcome:
    status: str  # "ok" or "failed"
    error: str = ""
    records: list = field(default_factory=list)
    bounds: dict = field(default_factory=dict)
    reference: tuple | None = None


def execute(cfg: RunConfig, out_dir: Path) -> Outcome:
    """Run one configuration and write its outputs into ``out_dir``.

    Raises ConfigError for unusable configurations; numerical failures are
    reported in the returned outcome (partial diagnostics are still written).
    """
    reference = resolve_reference(cfg)
    initial = build_initial(cfg, reference)
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    io.atomic_write_text(out_dir / "config.ini", to_ini(cfg))

    records = []

    def on_sample(state, rec):
        records.append(rec)
        if cfg.snapshots:
            for name, f in zip("uvw", state.fields()):
                io.atomic_write_text(out_dir / "snapshots" / f"t{state.t:013.6f}_{name}.csv",
                                     io.field_csv(f, cfg.domain))

    outcome = Outcome("ok", reference=reference)
    try:
        result = stepper.run(initial, cfg.params, cfg.domain, cfg.control, cfg.t_end,
                             cfg.sample_every, reference=reference, on_sample=on_sample)
    except NumericalFailure as exc:
        outcome.status, outcome.error = "failed", str(exc)
        result = None
    outcome.records = records
    io.atomic_write_text(out_dir / "diagnostics.csv", io.diagnostics_csv(records))
    outcome.bounds = diagnostics.check_bounds(records, initial, cfg.domain, cfg.params,
                                              burn_in=cfg.burn_in)
    io.write_json(out_dir / "bounds.json", {
        "status": outcome.status, "error": outcome.error, "bounds": outcome.bounds,
    })
    if result is not None:
        for name, f in zip("uvw", result.final.fields()):
            io.atomic_write_text(out_dir / f"final_{name}.csv", io.field_csv(f, cfg.domain))
    if reference is not None and records:
        u_sup = max(r.Linf_u for r in records)
        v_sup = max(r.Linf_v for r in records)
        report = stability.stability_report(cfg.params, u_sup, v_sup, reference)
        io.write_json(out_dir / "stability.json", report.as_json())
    return outcome


def cmd_simulate(args) -> int:
    cfg = load_config(args.config)
    if args.seed is not None:
        cfg = cfg.replace(seed=args.seed)
    out = Path(args.out) if args.out else Path(cfg.out_dir)
    outcome = execute(cfg, out)
    if outcome.status != "ok":
        print(f"numerical failure: {outcome.error}", file=sys.stderr)
        return EXIT_NUMERICAL
    failed = [k for k, v in outcome.bounds.items() if v["status"] == "fail"]
    print(f"wrote {out}; {len(outcome.records)} samples; bound failures: {failed or 'none'}")
    return EXIT_OK


# ---------------------------------------------------------------- steady / region / rate


def cmd_steady(args) -> int:
    p = ModelParams(b1=args.b1, b2=args.b2, b3=args.b3, c3=args.c3)
    cat = steady_states.catalog(p)
    sys.stdout.write(io.dumps_json([s.as_json() for s in cat]))
    return EXIT_OK


def cmd_region(args) -> int:
    scan = stability.region_scan(tuple(args.b1_range), tuple(args.b2_range), args.resolution)
    text = scan.to_csv()
    if args.out:
        io.atomic_write_text(args.out, text)
        n = int(scan.admissible.sum())
        print(f"wrote {args.out}; {n} of {scan.admissible.size} samples admissible")
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_rate(args) -> int:
    cols = io.read_csv_columns(args.csv)
    if "t" not in cols or args.column not in cols:
        raise ConfigError(f"column {args.column!r} (or t) not found in {args.csv}")
    t = np.array(cols["t"], dtype=float)
    y = np.array(cols[args.column], dtype=float)
    fit = diagnostics.fit_decay_rate(t, y, tuple(args.window))
    sys.stdout.write(io.dumps_json(fit._asdict()))
    return EXIT_OK


# ---------------------------------------------------------------- sweep


@dataclass
class SweepSpec:
    base: RunConfig
    axes: dict  # "section.key" -> list of string values
    fit_column: str = "dev_Linf_u"
    fit_window: tuple | None = None


def parse_sweep(path) -> SweepSpec:
    path = Path(path)
    cp = configparser.ConfigParser(interpolation=None)
    cp.optionxform = str
    try:
        cp.read_string(path.read_text())
    except (OSError, configparser.Error) as exc:
        raise ConfigError(f"cannot read sweep config {path}: {exc}") from None
    if "sweep" not in cp or "base" not in cp["sweep"]:
        raise ConfigError("sweep.base: missing")
    base = load_config(path.parent / cp["sweep"]["base"].strip())
    axes = {}
    for key, raw in (cp["axes"].items() if "axes" in cp else []):
        if key.count(".") != 1:
            raise ConfigError(f"axes.{key}: expected section.key")
        vals = [v.strip() for v in raw.split(",") if v.strip()]
        if not vals:
            raise ConfigError(f"axes.{key}: no values")
        axes[key] = vals
    spec = SweepSpec(base, axes)
    if "fit" in cp:
        sec = cp["fit"]
        spec.fit_column = sec.get("column", spec.fit_column).strip()
        if spec.fit_column not in diagnostics.CSV_COLUMNS or spec.fit_column == "t":
            raise ConfigError(f"fit.column: unknown diagnostics column {spec.fit_column!r}")
        if "window" in sec:
            try:
                lo, hi = (float(x) for x in sec["window"].split(","))
            except ValueError:
                raise ConfigError("fit.window: expected two comma-separated numbers") from None
            spec.fit_window = (lo, hi)
    # validate every point up front so no run starts with a bad axis value
    for point in sweep_points(spec):
        point_config(spec.base, point)
    return spec


def sweep_points(spec: SweepSpec):
    keys = list(spec.axes)
    for combo in itertools.product(*(spec.axes[k] for k in keys)):
        yield dict(zip(keys, combo))


def point_config(base: RunConfig, point: dict) -> RunConfig:
    cp = configparser.ConfigParser(interpolation=None)
    cp.read_string(to_ini(base))
    for key, val in point.items():
        section, name = key.split(".")
        if section not in cp:
            cp[section] = {}
        cp[section][name] = val
    buf = _stdio.StringIO()
    cp.write(buf)
    return parse_config(buf.getvalue())


def _run_point(job):
    index, cfg, out_dir, fit_column, fit_window = job
    try:
        outcome = execute(cfg, out_dir)
    except AlarmTaxisError as exc:
        outcome = Outcome("failed", str(exc))
    final_f = outcome.records[-1].F if outcome.records else math.nan
    sigma = c_fit = r2 = math.nan
    if outcome.status == "ok" and outcome.records:
        window = fit_window or (cfg.t_end / 4, cfg.t_end)
        t, y = diagnostics.series(outcome.records, fit_column)
        try:
            sigma, c_fit, r2 = diagnostics.fit_decay_rate(t, y, window)
        except AlarmTaxisError:
            pass
    statuses = [v["status"] for v in outcome.bounds.values()]
    return {
        "index": index, "status": outcome.status, "error": outcome.error,
        "final_F": final_f, "sigma": sigma, "C": c_fit, "r_squared": r2,
        "bounds_pass": statuses.count("pass"), "bounds_fail": statuses.count("fail"),
    }


def cmd_sweep(args) -> int:
    spec = parse_sweep(args.config)
    base = spec.base if args.seed is None else spec.base.replace(seed=args.seed)
    out = Path(args.out) if args.out else Path(base.out_dir)
    points = list(sweep_points(spec))
    jobs = [(i, point_config(base, pt), out / f"point_{i:03d}", spec.fit_column, spec.fit_window)
            for i, pt in enumerate(points)]
    if args.workers > 1:
        with ProcessPoolExecutor(max_workers=args.workers) as pool:
            rows = list(pool.map(_run_point, jobs))
    else:
        rows = [_run_point(j) for j in jobs]
    axis_names = list(spec.axes)
    header = ["point", *axis_names, "status", "error", "final_F", "sigma", "C",
              "r_squared", "bounds_pass", "bounds_fail"]
    table = []
    for pt, row in zip(points, rows):
        table.append([row["index"], *(pt[k] for k in axis_names), row["status"], row["error"],
                      row["final_F"], row["sigma"], row["C"], row["r_squared"],
                      row["bounds_pass"], row["bounds_fail"]])
    io.atomic_write_text(out / "summary.csv", io.csv_text(header, table))
    failed = sum(r["status"] != "ok" for r in rows)
    io.write_json(out / "summary.json", {"points": len(rows), "failed": failed})
    print(f"wrote {out / 'summary.csv'}; {len(rows)} points, {failed} failed")
    return EXIT_OK


# ---------------------------------------------------------------- entry point


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="alarmtaxis", description="Alarm-taxis reaction-diffusion toolkit")
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    sp = sub.add_parser("simulate", help="integrate one configuration")
    sp.add_argument("--config", required=True)
    sp.add_argument("--out")
    sp.add_argument("--seed", type=int)
    sp.set_defaults(func=cmd_simulate)

    sp = sub.add_parser("steady", help="print the steady-state catalog as JSON")
    sp.add_argument("--b1", type=float, required=True)
    sp.add_argument("--b2", type=float, required=True)
    sp.add_argument("--b3", type=float, default=0.0)
    sp.add_argument("--c3", type=float, default=0.0)
    sp.set_defaults(func=cmd_steady)

    sp = sub.add_parser("region", help="scan the (b1, b2) admissible region")
    sp.add_argument("--b1-range", type=float, nargs=2, default=(0.0, 4.0), metavar=("LO", "HI"))
    sp.add_argument("--b2-range", type=float, nargs=2, default=(0.0, 3.0), metavar=("LO", "HI"))
    sp.add_argument("--resolution", type=int, default=200)
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_region)

    sp = sub.add_parser("sweep", help="run a parameter sweep")
    sp.add_argument("--config", required=True)
    sp.add_argument("--out")
    sp.add_argument("--workers", type=int, default=1)
    sp.add_argument("--seed", type=int)
    sp.set_defaults(func=cmd_sweep)

    sp = sub.add_parser("rate", help="fit an exponential decay rate to a diagnostics column")
    sp.add_argument("--csv", required=True)
    sp.add_argument("--column", required=True)
    sp.add_argument("--window", type=float, nargs=2, required=True, metavar=("T_LO", "T_HI"))
    sp.set_defaults(func=cmd_rate)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except NumericalFailure as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except (AlarmTaxisError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
