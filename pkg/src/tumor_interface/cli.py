"""Command-line driver.

Exit codes: 0 success, 1 oracle failure under ``--verify``, 2 configuration
error, 3 blow-up.
"""

from __future__ import annotations

import argparse
import configparser
import io
import json
import logging
import platform
import sys
from pathlib import Path

import numpy as np

from . import __version__
from . import diagnostics as dg
from .config import RunConfig, build_initial, build_profiles, parse_config, serialize
from .errors import BlowUpError, ConfigError, ConvergenceError, InvalidInputError
from .model import RhsConfig
from .stepper import SimState, default_dt, run

__all__ = ["main", "run_cli", "run_config", "EXIT_OK", "EXIT_VERIFY", "EXIT_CONFIG",
           "EXIT_BLOWUP"]

EXIT_OK, EXIT_VERIFY, EXIT_CONFIG, EXIT_BLOWUP = 0, 1, 2, 3
log = logging.getLogger("tumor_interface")

PLOT_SCRIPT = '''"""Plot diagnostics and interface snapshots of one run (requires matplotlib)."""
import csv
import glob
import os

import matplotlib.pyplot as plt
import numpy as np

here = os.path.dirname(os.path.abspath(__file__))
with open(os.path.join(here, "diagnostics.csv")) as fh:
    rows = list(csv.DictReader(fh))
t = np.array([float(r["t"]) for r in rows])
fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(11, 4))
for key in ("a1", "a1_hom", "a4_hom"):
    ax1.semilogy(t, [max(float(r[key]), 1e-300) for r in rows], label=key)
ax1.set_xlabel("t")
ax1.legend()
x = np.linspace(-np.pi, np.pi, 512)
for path in sorted(glob.glob(os.path.join(here, "snapshots", "snap_*.csv"))):
    data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    k, c = data[:, 0], data[:, 1] + 1j * data[:, 2]
    g = c[0].real + 2 * np.real(np.exp(1j * np.outer(x, k[1:])) @ c[1:])
    ax2.plot(x, g, label=os.path.basename(path)[5:-4])
ax2.set_xlabel("x1")
ax2.legend(fontsize="small")
fig.tight_layout()
fig.savefig(os.path.join(here, "summary.png"), dpi=120)
'''


def _write_snapshot(state, directory: Path):
    directory.mkdir(parents=True, exist_ok=True)
    path = directory / f"snap_{state.step_index:06d}.csv"
    with open(path, "w") as fh:
        fh.write("k,re,im\n")
        for k, c in enumerate(state.g.coeffs):
            fh.write(f"{k},{c.real:.17g},{c.imag:.17g}\n")
    return path.name


def run_config(cfg: RunConfig, out_dir) -> int:
    """Run one configuration and write all artifacts into ``out_dir``."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    snap_dir = out / "snapshots"
    try:
        params = cfg.params
        g0 = build_initial(cfg)
        s, b = build_profiles(cfg)
        rhs = RhsConfig(cfg.mode, params, s, b, g0, extension=cfg.extension)
    except InvalidInputError as exc:
        raise ConfigError(str(exc)) from None
    dt_used = cfg.stepper.dt or default_dt(params.eta, cfg.grid_size, cfg.stepper.cfl_safety)
    manifest = {
        "package": "tumor_interface",
        "version": __version__,
        "python": platform.python_version(),
        "numpy": np.__version__,
        "seed": cfg.seed,
        "config": serialize(cfg),
        "params": params.as_dict(),
        "dt_requested": dt_used,
        "grid_size": cfg.grid_size,
        "profiles": [getattr(s, "describe", lambda: str(s))(),
                     getattr(b, "describe", lambda: str(b))()],
    }
    (out / "plot_run.py").write_text(PLOT_SCRIPT)

    snaps = []
    every = cfg.snapshot_every

    def snapshot_obs(state):
        if state.step_index == 0 or (every and state.step_index % every == 0):
            snaps.append(_write_snapshot(state, snap_dir))

    state0 = SimState(g0, 0.0, g0, 0)
    status = EXIT_OK
    try:
        result = run(state0, cfg.stepper, rhs, [dg.record, snapshot_obs])
        records = result.outputs[0]
        final = result.state
        if final.step_index and not (every and final.step_index % every == 0):
            snaps.append(_write_snapshot(final, snap_dir))
        manifest["dt_used"] = result.dt
        manifest["steps"] = final.step_index
        manifest["status"] = "completed"
    except BlowUpError as exc:
        records = exc.partial[0] if exc.partial else []
        manifest["status"] = "blow-up"
        manifest["blowup"] = {"step_index": exc.step_index, "t": exc.t,
                              "last_norms": exc.last_norms, "message": str(exc)}
        status = EXIT_BLOWUP
        log.error("blow-up at step %d (t=%.6g): %s", exc.step_index, exc.t, exc)
    except ConvergenceError as exc:
        records = []
        manifest["status"] = "quadrature-failure"
        manifest["error"] = str(exc)
        status = EXIT_CONFIG
    records = dg.annotate_balance(records, params)
    dg.write_csv(records, out / "diagnostics.csv")
    manifest["snapshots"] = snaps
    (out / "manifest.json").write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")
    return status


def _apply_override(text: str, key: str, value: str) -> str:
    if "." not in key:
        raise ConfigError("sweep key must be section.key", key=key)
    sec, opt = key.split(".", 1)
    cp = configparser.ConfigParser(interpolation=None, default_section="__none__")
    try:
        cp.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(f"malformed configuration: {exc}") from None
    if not cp.has_section(sec):
        cp.add_section(sec)
    cp.set(sec, opt, value)
    buf = io.StringIO()
    cp.write(buf)
    return buf.getvalue()


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="tumor-interface",
                                 description="Simulate the nonlocal tumor-interface model.")
    ap.add_argument("--config", help="INI configuration file")
    ap.add_argument("--out", default="run_out", help="output directory (default: run_out)")
    ap.add_argument("--seed", type=int, help="override the random-small seed")
    ap.add_argument("--sweep", metavar="KEY=v1,v2",
                    help="run once per value of section.key, into OUT/key=value")
    ap.add_argument("--verify", action="store_true", help="run the oracle suite and exit")
    ap.add_argument("-v", "--verbose", action="store_true")
    return ap


def run_cli(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    if args.verify:
        from .oracles import run_oracle_suite
        reports = run_oracle_suite()
        for r in reports:
            print(r.line())
        return EXIT_OK if all(r.passed for r in reports) else EXIT_VERIFY
    if not args.config:
        print("error: --config is required unless --verify is given", file=sys.stderr)
        return EXIT_CONFIG
    try:
        path = Path(args.config)
        try:
            text = path.read_text(encoding="utf-8")
        except OSError as exc:
            raise ConfigError(f"cannot read {path}: {exc}") from None
        jobs = []
        if args.sweep:
            key, _, vals = args.sweep.partition("=")
            if not vals:
                raise ConfigError("sweep needs KEY=v1,v2,...", key=key or None)
            for v in vals.split(","):
                v = v.strip()
                jobs.append((Path(args.out) / f"{key}={v}", _apply_override(text, key, v)))
        else:
            jobs.append((Path(args.out), text))
        cfgs = []
        for out, t in jobs:
            cfg = parse_config(t, base_dir=str(path.parent))
            if args.seed is not None:
                cfg = cfg.with_seed(args.seed)
            cfgs.append((out, cfg))
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    status = EXIT_OK
    for out, cfg in cfgs:
        try:
            rc = run_config(cfg, out)
        except ConfigError as exc:
            print(f"config error: {exc}", file=sys.stderr)
            rc = EXIT_CONFIG
        status = max(status, rc)
    return status


def main() -> None:
    sys.exit(run_cli())


