"""Shared driver for the experiment scripts in this directory."""

import argparse
import csv
import dataclasses
from pathlib import Path

from conformalbt.cli import REPRO_DEFAULTS, ReproConfig, run_experiment


def run(name, argv=None):
    defaults = REPRO_DEFAULTS[name]
    p = argparse.ArgumentParser(description=f"{name} benchmark: reduce, evaluate, simulate, write CSV/JSON data")
    p.add_argument("--out-dir", default=f"results/{name}")
    p.add_argument("--n", type=int, default=defaults.n)
    p.add_argument("--r", type=int, default=defaults.r)
    args = p.parse_args(argv)
    cfg = ReproConfig.from_dict({**dataclasses.asdict(defaults), "n": args.n, "r": args.r})
    out = Path(args.out_dir)
    report = run_experiment(cfg, out)
    print(f"{name}: n={cfg.n} r={cfg.r} error^2 {report.h2abar_error**2:.3e} bound {report.bound:.3e}")
    with open(out / "sweep.csv") as f:
        for row in csv.DictReader(f, skipinitialspace=True):
            print(f"  r={row['r']:>3}  error^2 {float(row['error_sq']):.3e}  bound {float(row['bound']):.3e}")
    print(f"data written to {out}/")
