"""Command line entry point: ``jcasdet run`` and ``jcasdet calibrate``."""

import argparse
import csv
import logging
import sys
import time
from dataclasses import replace
from pathlib import Path

from .config import load_config
from .errors import ConfigError, NumericalContractError
from .experiments import rows_to_csv, run_trials, sweep, calibration_table, write_manifest, SweepRow

log = logging.getLogger("jcasdet")


def _floats(text):
    return [float(x) for x in text.split(",") if x.strip()]


def _parse_sweep(text):
    if "=" not in text:
        raise ConfigError(f"--sweep expects axis=v1,v2,..., got {text!r}")
    axis, values = text.split("=", 1)
    try:
        return axis.strip(), _floats(values)
    except ValueError:
        raise ConfigError(f"bad sweep values in {text!r}") from None


def _apply_overrides(cfg, args):
    updates = {}
    if args.seed is not None:
        updates["master_seed"] = args.seed
    if args.trials is not None:
        updates["trials"] = args.trials
    if getattr(args, "calibration_trials", None) is not None:
        updates["calibration_trials"] = args.calibration_trials
    if getattr(args, "detectors", None):
        updates["detectors"] = tuple(d.strip() for d in args.detectors.split(",") if d.strip())
    if args.workers is not None:
        updates["workers"] = args.workers
    try:
        return replace(cfg, **updates) if updates else cfg
    except ValueError as exc:
        raise ConfigError(str(exc)) from None


def _modes(args, cfg):
    if not args.mode:
        return [cfg.mode]
    return [m.strip().lower() for m in args.mode.split(",") if m.strip()]


def cmd_run(args):
    started = time.perf_counter()
    cfg = _apply_overrides(load_config(args.config), args)
    cfg.warn_assumptions()
    modes = _modes(args, cfg)
    if args.sweep:
        axis, values = _parse_sweep(args.sweep)
        rows = sweep(cfg, axis, values, modes=modes)
    else:
        rows = []
        for mode in modes:
            counts = run_trials(replace(cfg, mode=mode))
            for det in cfg.detectors:
                c = counts[det]
                rows.append(SweepRow(det, mode, "", float("nan"), c.detection_rate, c.false_alarm_rate, c.h1_trials, c.epsilon))
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    (out / "results.csv").write_text(rows_to_csv(rows))
    write_manifest(out / "manifest.json", cfg, started, {"modes": modes, "sweep": args.sweep})
    log.info("wrote %d rows to %s", len(rows), out / "results.csv")
    return 0


def cmd_calibrate(args):
    started = time.perf_counter()
    cfg = _apply_overrides(load_config(args.config), args)
    rows = calibration_table(cfg, _floats(args.pfa), modes=_modes(args, cfg))
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    with open(out / "thresholds.csv", "w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=["mode", "pfa", "epsilon", "calibration_trials"], lineterminator="\n")
        w.writeheader()
        for r in rows:
            w.writerow({k: repr(v) if isinstance(v, float) else v for k, v in r.items()})
    write_manifest(out / "manifest.json", cfg, started, {"pfa_grid": args.pfa})
    return 0


def build_parser():
    p = argparse.ArgumentParser(prog="jcasdet", description=__doc__)
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("config", help="YAML experiment config")
        sp.add_argument("--seed", type=int)
        sp.add_argument("--trials", type=int)
        sp.add_argument("--calibration-trials", type=int)
        sp.add_argument("--workers", type=int)
        sp.add_argument("--mode", help="tdm, cm or tdm,cm")
        sp.add_argument("--out", default="out")

    run = sub.add_parser("run", help="detection/false-alarm rates, optionally swept")
    common(run)
    run.add_argument("--detectors", help="comma list of ratio,mdl,aic")
    run.add_argument("--sweep", help="axis=v1,v2,... (snr_db, scnr_db, alpha, delta, tradeoff, gamma, rx_antennas, total_slots, beam_error_deg, pfa)")
    run.set_defaults(func=cmd_run)

    cal = sub.add_parser("calibrate", help="ratio-test thresholds for a grid of false-alarm targets")
    common(cal)
    cal.add_argument("--pfa", default="0.01", help="comma list of target false-alarm probabilities")
    cal.set_defaults(func=cmd_calibrate)
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except NumericalContractError as exc:
        print(f"numerical contract violated: {exc}", file=sys.stderr)
        return 3
    except FileNotFoundError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
