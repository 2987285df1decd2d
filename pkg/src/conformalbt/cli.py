"""Command line front end.

Subcommands ``generate``, ``reduce``, ``evaluate``, ``simulate`` and ``repro``.
Models, maps, reductions and reports are JSON with complex entries stored as
``{"re": ..., "im": ...}``; vectors and trajectories are CSV.

Exit codes: 0 success, 2 bad command line, otherwise the ``exit_code`` of the
raised error (10-19 validation, 20-39 numerical, 40 file IO). The thread
count of the BLAS backend can be capped with ``CONFORMALBT_NUM_THREADS``.
"""

import argparse
import csv
import dataclasses
import logging
import os
import sys
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

import numpy as np
from threadpoolctl import threadpool_limits

from .analysis import error_quad_config, evaluate_reduction, h2_error_bound, h2abar_error_norm
from .balancing import balance_full, conformal_bt
from .benchmarks import KINDS, BenchmarkSpec, benchmark_map, make_benchmark
from .errors import ConformalBTError, IoError, ValidationError
from .gramians import compute_gramians
from .maps import MobiusMap, map_from_dict
from .quadrature import QuadratureConfig
from .sim import Impulse, Samples, Step, output_relative_error, save_trajectory_csv, simulate
from .system import LtiSystem, dump_json, load_json, save_system

THREADS_ENV = "CONFORMALBT_NUM_THREADS"
log = logging.getLogger("conformalbt")


# -- file helpers ------------------------------------------------------------


def _write_csv(path, header, rows):
    try:
        with open(path, "w", newline="") as fh:
            fh.write(", ".join(header) + "\n")
            for row in rows:
                fh.write(", ".join(v if isinstance(v, str) else f"{v:.17g}" for v in row) + "\n")
    except OSError as exc:
        raise IoError(f"cannot write {path}: {exc}") from exc


def write_hsv_csv(path, hsv):
    _write_csv(path, ["index", "sigma"], [(str(i + 1), float(s)) for i, s in enumerate(hsv)])


def load_map(path):
    return map_from_dict(load_json(path))


def load_model(path) -> LtiSystem:
    """Read a system file, or the reduced model inside a reduction file."""
    d = load_json(path)
    if isinstance(d, dict) and "rom" in d:
        d = d["rom"]
    return LtiSystem.from_dict(d)


def read_samples_csv(path) -> Samples:
    """Input table with header ``t, u1, ..., um`` (real values)."""
    try:
        with open(path, newline="") as fh:
            rows = list(csv.reader(fh, skipinitialspace=True))
    except OSError as exc:
        raise IoError(f"cannot read {path}: {exc}") from exc
    if len(rows) < 2:
        raise ValidationError(f"{path}: no samples")
    data = np.array([[float(v) for v in row] for row in rows[1:]])
    return Samples(data[:, 0], data[:, 1:])


def _method_for(psi, method):
    if method == "auto":
        return "lyapunov" if isinstance(psi, MobiusMap) else "quadrature"
    return method


def _quad_cfg(args):
    return QuadratureConfig(max_subdivisions=args.max_subdivisions)


def _report_dict(report):
    d = report.to_dict()
    d.pop("timings")
    return d


# -- subcommands ---------------------------------------------------------------


def cmd_generate(args):
    spec = BenchmarkSpec(args.model, args.n)
    save_system(make_benchmark(spec.kind, spec.n), args.out)
    if args.map_out:
        dump_json(benchmark_map(spec.kind, spec.n).to_dict(), args.map_out)
    return 0


def cmd_reduce(args):
    fom = load_model(args.model)
    psi = load_map(args.map)
    red = conformal_bt(fom, psi, args.r, _method_for(psi, args.method), _quad_cfg(args), allow_tie=args.allow_tie)
    dump_json(red.to_dict(), args.out)
    if args.hsv_out:
        write_hsv_csv(args.hsv_out, red.hsv)
    return 0


def cmd_evaluate(args):
    fom = load_model(args.fom)
    rom = load_model(args.rom)
    psi = load_map(args.map)
    method = None if args.method == "auto" else args.method
    report = evaluate_reduction(fom, rom, psi, _quad_cfg(args), method=method)
    dump_json(_report_dict(report), args.report)
    if args.timings:
        dump_json(report.timings, args.timings)
    return 0


def _make_input(args):
    if args.input == "impulse":
        return Impulse()
    if args.input == "step":
        return Step()
    if not args.samples:
        raise ValidationError("--input samples needs --samples PATH")
    return read_samples_csv(args.samples)


def cmd_simulate(args):
    sys_ = load_model(args.model)
    t_eval = np.linspace(0.0, args.t_final, args.points) if args.points else None
    traj = simulate(sys_, _make_input(args), args.t_final, args.rel_tol, args.abs_tol, t_eval=t_eval)
    save_trajectory_csv(traj, args.out)
    return 0


# -- repro ---------------------------------------------------------------------


@dataclass(frozen=True)
class ReproConfig:
    """Desk-scale settings for one experiment.

    ``map_R`` only applies to the wave experiment (Joukowski radius);
    ``sweep`` lists the orders for the error/bound table.
    """

    experiment: str
    n: int
    r: int
    t_final: float
    input: str
    sweep: tuple
    map_R: Optional[float] = None
    points: int = 201
    max_subdivisions: int = 2000

    def __post_init__(self):
        BenchmarkSpec(self.experiment, self.n)
        if not 1 <= self.r <= self.n:
            raise ValidationError(f"r = {self.r} outside [1, {self.n}]")
        if not self.t_final > 0 or self.points < 2:
            raise ValidationError("t_final must be positive and points >= 2")
        if self.input not in ("impulse", "step"):
            raise ValidationError(f"unknown input {self.input!r}")
        if any(not 1 <= k < self.n for k in self.sweep):
            raise ValidationError("sweep orders must lie in [1, n)")

    @classmethod
    def from_dict(cls, d):
        names = {f.name for f in dataclasses.fields(cls)}
        unknown = set(d) - names
        if unknown:
            raise ValidationError(f"unknown repro keys {sorted(unknown)}")
        d = dict(d)
        if "sweep" in d:
            d["sweep"] = tuple(int(k) for k in d["sweep"])
        return cls(**d)

    def psi(self):
        kw = {"R": self.map_R} if self.experiment == "wave" and self.map_R is not None else {}
        return benchmark_map(self.experiment, self.n, **kw)


REPRO_DEFAULTS = {
    "heat": ReproConfig("heat", 200, 10, 1.0, "impulse", tuple(range(2, 15, 2))),
    "schrodinger": ReproConfig("schrodinger", 400, 9, 0.05, "step", tuple(range(3, 16, 2))),
    "wave": ReproConfig("wave", 200, 20, 1.0, "impulse", (10, 20, 30), map_R=1 + 1e-3, max_subdivisions=20000),
}


def run_experiment(cfg: ReproConfig, out_dir: Path):
    """generate -> reduce -> evaluate -> simulate, plus an error/bound sweep over ``cfg.sweep``."""
    try:
        out_dir.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise IoError(f"cannot create {out_dir}: {exc}") from exc
    timings = {}
    clock = time.perf_counter

    t0 = clock()
    fom = make_benchmark(cfg.experiment, cfg.n)
    psi = cfg.psi()
    save_system(fom, out_dir / "fom.json")
    dump_json(psi.to_dict(), out_dir / "map.json")
    qcfg = QuadratureConfig(max_subdivisions=cfg.max_subdivisions)
    method = _method_for(psi, "auto")
    grams = compute_gramians(fom, psi, method, qcfg)
    timings["gramians"] = clock() - t0

    t0 = clock()
    red = conformal_bt(fom, psi, cfg.r, method, qcfg, grams=grams, allow_tie=True)
    dump_json(red.to_dict(), out_dir / "rom.json")
    write_hsv_csv(out_dir / "hsv.csv", red.hsv)
    timings["reduce"] = clock() - t0

    t0 = clock()
    report = evaluate_reduction(fom, red.rom, psi, qcfg, method=method, grams=grams)
    dump_json(_report_dict(report), out_dir / "report.json")
    timings["evaluate"] = clock() - t0

    t0 = clock()
    bal = balance_full(fom, grams, minimal=True)
    rows = []
    for k in cfg.sweep:
        rk = conformal_bt(fom, psi, k, method, qcfg, grams=grams, allow_tie=True)
        err = h2abar_error_norm(fom, rk.rom, psi, error_quad_config(qcfg, report.h2abar_fom_norm))
        bound, eps = h2_error_bound(bal, k, psi)
        rows.append((str(k), err, err**2, bound, eps))
    _write_csv(out_dir / "sweep.csv", ["r", "error", "error_sq", "bound", "epsilon"], rows)
    timings["sweep"] = clock() - t0

    t0 = clock()
    signal = Impulse() if cfg.input == "impulse" else Step()
    t_eval = np.linspace(0.0, cfg.t_final, cfg.points)
    y = simulate(fom, signal, cfg.t_final, t_eval=t_eval)
    yr = simulate(red.rom, signal, cfg.t_final, t_eval=t_eval)
    save_trajectory_csv(y, out_dir / "fom_response.csv")
    save_trajectory_csv(yr, out_dir / "rom_response.csv")
    rel = output_relative_error(y, yr)
    rel_pw = output_relative_error(y, yr, pointwise=True)
    _write_csv(
        out_dir / "response_error.csv",
        ["t", "relative_error", "pointwise_relative_error"],
        zip(y.times, rel, rel_pw),
    )
    timings["simulate"] = clock() - t0
    dump_json(timings, out_dir / "timings.json")
    log.info("%s done: %s", cfg.experiment, timings)
    return report


def cmd_repro(args):
    names = list(REPRO_DEFAULTS) if args.experiment == "all" else [args.experiment]
    overrides = load_json(args.config) if args.config else {}
    if not isinstance(overrides, dict) or set(overrides) - set(REPRO_DEFAULTS):
        raise ValidationError(f"repro config must map experiment names {sorted(REPRO_DEFAULTS)} to settings")
    out = Path(args.out_dir)
    for name in names:
        base = dataclasses.asdict(REPRO_DEFAULTS[name])
        base.update(overrides.get(name, {}))
        for key in ("n", "r"):
            if getattr(args, key) is not None:
                base[key] = getattr(args, key)
        run_experiment(ReproConfig.from_dict(base), out / name)
    return 0


# -- parser --------------------------------------------------------------------


def build_parser():
    p = argparse.ArgumentParser(prog="conformalbt", description="Balanced truncation through conformal maps.")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", help="write a benchmark model")
    g.add_argument("--model", choices=KINDS, required=True)
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--out", required=True)
    g.add_argument("--map-out", help="also write the benchmark's default map")
    g.set_defaults(func=cmd_generate)

    def quad(sp):
        sp.add_argument("--max-subdivisions", type=int, default=2000)

    rd = sub.add_parser("reduce", help="conformal balanced truncation")
    rd.add_argument("--model", required=True)
    rd.add_argument("--map", required=True)
    rd.add_argument("--r", type=int, required=True)
    rd.add_argument("--method", choices=("auto", "lyapunov", "quadrature"), default="auto")
    rd.add_argument("--out", required=True)
    rd.add_argument("--hsv-out")
    rd.add_argument("--allow-tie", action="store_true")
    quad(rd)
    rd.set_defaults(func=cmd_reduce)

    ev = sub.add_parser("evaluate", help="error norm, bound and pole verdicts")
    ev.add_argument("--fom", required=True)
    ev.add_argument("--rom", required=True)
    ev.add_argument("--map", required=True)
    ev.add_argument("--report", required=True)
    ev.add_argument("--timings", help="write wall-clock timings here (kept out of the report)")
    ev.add_argument("--method", choices=("auto", "lyapunov", "quadrature"), default="auto")
    quad(ev)
    ev.set_defaults(func=cmd_evaluate)

    sm = sub.add_parser("simulate", help="time response to CSV")
    sm.add_argument("--model", required=True)
    sm.add_argument("--input", choices=("impulse", "step", "samples"), required=True)
    sm.add_argument("--samples", help="CSV with header t, u1, ..., um")
    sm.add_argument("--t-final", type=float, required=True)
    sm.add_argument("--points", type=int, default=201, help="uniform output grid size; 0 reports every step")
    sm.add_argument("--rel-tol", type=float, default=1e-8)
    sm.add_argument("--abs-tol", type=float, default=1e-12)
    sm.add_argument("--out", required=True)
    sm.set_defaults(func=cmd_simulate)

    rp = sub.add_parser("repro", help="run the benchmark experiments end to end")
    rp.add_argument("--experiment", choices=(*REPRO_DEFAULTS, "all"), default="all")
    rp.add_argument("--out-dir", required=True)
    rp.add_argument("--config", help="JSON overrides per experiment")
    rp.add_argument("--n", type=int)
    rp.add_argument("--r", type=int)
    rp.set_defaults(func=cmd_repro)
    return p


def _thread_limit():
    raw = os.environ.get(THREADS_ENV)
    if not raw:
        return None
    try:
        k = int(raw)
    except ValueError:
        raise ValidationError(f"{THREADS_ENV} must be a positive integer, got {raw!r}") from None
    if k < 1:
        raise ValidationError(f"{THREADS_ENV} must be a positive integer, got {raw!r}")
    return k


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        with threadpool_limits(limits=_thread_limit()):
            return args.func(args)
    except ConformalBTError as exc:
        print(f"error [{type(exc).__name__}]: {exc}", file=sys.stderr)
        return exc.exit_code


if __name__ == "__main__":
    sys.exit(main())
