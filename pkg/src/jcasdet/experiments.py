"""Monte Carlo harness: calibration, detection/false-alarm tallies, ROC curves and sweeps."""

import csv
import io
import json
import platform
import time
from dataclasses import dataclass, replace
from functools import lru_cache

import numpy as np

from . import __version__
from ._random import PHASE_CALIBRATION, PHASE_H0, PHASE_H1
from .config import ExperimentConfig, with_axis
from .detect import Method, estimate_counts, ratio_statistics, threshold_from_statistics
from .synthesis import simulate_eigenvalues

CSV_COLUMNS = ("detector", "mode", "axis", "value", "detection_rate", "false_alarm_rate", "trials", "epsilon")


@dataclass(frozen=True)
class RunCounts:
    detector: str
    mode: str
    detections: int
    h1_trials: int
    false_alarms: int
    h0_trials: int
    epsilon: float | None = None

    @property
    def detection_rate(self):
        return self.detections / self.h1_trials if self.h1_trials else float("nan")

    @property
    def false_alarm_rate(self):
        return self.false_alarms / self.h0_trials if self.h0_trials else float("nan")


@dataclass(frozen=True)
class RocPoint:
    x: float
    detection_rate: float
    false_alarm_rate: float
    trials: int
    detector: str
    mode: str
    epsilon: float | None = None


@dataclass(frozen=True)
class SweepRow:
    detector: str
    mode: str
    axis: str
    value: float
    detection_rate: float
    false_alarm_rate: float
    trials: int
    epsilon: float | None = None


@lru_cache(maxsize=64)
def _cached_pool(setup, trials, seed, phase, workers):
    eigs = simulate_eigenvalues(setup, trials, seed, phase, workers=workers)
    eigs.setflags(write=False)
    return eigs


def eigenvalue_pool(setup, trials, seed, phase, workers=1):
    """Cached ``(trials, N)`` eigenvalue pool; results never depend on ``workers``."""
    return _cached_pool(setup, int(trials), int(seed), int(phase), 1 if workers <= 1 else int(workers))


def clear_cache():
    _cached_pool.cache_clear()


@dataclass(frozen=True)
class _Pools:
    window: int
    k_max: int
    calibration: np.ndarray | None
    h0: np.ndarray
    h1: np.ndarray | None


def _pools(cfg, need_calibration):
    setup = cfg.build_setup()
    null = setup.null_hypothesis()
    seed, w = cfg.master_seed, cfg.workers
    calibration = eigenvalue_pool(null, cfg.calibration_trials, seed, PHASE_CALIBRATION, w) if need_calibration else None
    h0 = eigenvalue_pool(null, cfg.trials, seed, PHASE_H0, w)
    h1 = eigenvalue_pool(setup, cfg.trials, seed, PHASE_H1, w) if cfg.targets else None
    return _Pools(setup.window, cfg.resolved_k_max(setup.window), calibration, h0, h1)


def _correct(estimates, K, metric):
    return estimates == K if metric == "exact" else estimates >= K


def calibrate(cfg, target_pfa=None):
    """Ratio-test threshold for the null version of ``cfg`` (same observation window)."""
    p = _pools(cfg, need_calibration=True)
    _, max_ratio = ratio_statistics(p.calibration, p.k_max)
    return threshold_from_statistics(max_ratio, cfg.target_pfa if target_pfa is None else target_pfa)


def run_trials(cfg, epsilon=None):
    """Detection and false-alarm tallies for every detector in ``cfg``.

    The ratio threshold is calibrated inline at ``cfg.target_pfa`` unless
    ``epsilon`` is given. Null and target trials come from separate streams.
    """
    need_cal = "ratio" in cfg.detectors and epsilon is None
    p = _pools(cfg, need_cal)
    if need_cal:
        _, max_ratio = ratio_statistics(p.calibration, p.k_max)
        epsilon = threshold_from_statistics(max_ratio, cfg.target_pfa)
    out = {}
    for det in cfg.detectors:
        eps = epsilon if det == Method.RATIO.value else None
        est0 = estimate_counts(p.h0, det, p.window, p.k_max, eps or 0.0, cfg.ratio_rule)
        if p.h1 is not None:
            est1 = estimate_counts(p.h1, det, p.window, p.k_max, eps or 0.0, cfg.ratio_rule)
            hits, n1 = int(np.sum(_correct(est1, cfg.num_targets, cfg.metric))), len(est1)
        else:
            hits, n1 = 0, 0
        out[det] = RunCounts(det, cfg.mode, hits, n1, int(np.sum(est0 > 0)), len(est0), eps)
    return out


def roc_curve(cfg, pfa_grid):
    """Ratio-test ROC by sweeping the threshold over stored per-trial statistics."""
    grid = [float(x) for x in pfa_grid]
    if any(not 0.0 < x < 1.0 for x in grid):
        raise ValueError("pfa_grid values must lie in the open interval (0, 1)")
    if not cfg.targets:
        raise ValueError("ROC needs a configuration with targets")
    p = _pools(cfg, need_calibration=True)
    _, cal_max = ratio_statistics(p.calibration, p.k_max)
    points = []
    for pfa in sorted(grid):
        eps = threshold_from_statistics(cal_max, pfa)
        est0 = estimate_counts(p.h0, "ratio", p.window, p.k_max, eps, cfg.ratio_rule)
        est1 = estimate_counts(p.h1, "ratio", p.window, p.k_max, eps, cfg.ratio_rule)
        points.append(
            RocPoint(
                x=pfa,
                detection_rate=float(np.mean(_correct(est1, cfg.num_targets, cfg.metric))),
                false_alarm_rate=float(np.mean(est0 > 0)),
                trials=len(est1),
                detector="ratio",
                mode=cfg.mode,
                epsilon=eps,
            )
        )
    return points


def sweep(cfg, axis, values, modes=None):
    """Tidy rows (detector x mode x value) of detection and false-alarm rates."""
    modes = [cfg.mode] if modes is None else list(modes)
    rows = []
    for mode in modes:
        base = replace(cfg, mode=mode)
        if axis == "pfa":
            rows.extend(_pfa_rows(base, values))
            continue
        for v in values:
            counts = run_trials(with_axis(base, axis, v))
            for det in base.detectors:
                c = counts[det]
                rows.append(
                    SweepRow(det, mode, axis, float(v), c.detection_rate, c.false_alarm_rate, c.h1_trials, c.epsilon)
                )
    return rows


def _pfa_rows(cfg, values):
    rows = []
    others = [d for d in cfg.detectors if d != "ratio"]
    if "ratio" in cfg.detectors:
        for pt in roc_curve(cfg, values):
            rows.append(SweepRow("ratio", cfg.mode, "pfa", pt.x, pt.detection_rate, pt.false_alarm_rate, pt.trials, pt.epsilon))
    if others:
        counts = run_trials(replace(cfg, detectors=tuple(others)))
        for v in sorted(float(x) for x in values):
            for det in others:
                c = counts[det]
                rows.append(SweepRow(det, cfg.mode, "pfa", v, c.detection_rate, c.false_alarm_rate, c.h1_trials, None))
    return rows


def calibration_table(cfg, pfa_grid, modes=None):
    """``(mode, pfa, epsilon, calibration_trials)`` rows."""
    modes = [cfg.mode] if modes is None else list(modes)
    rows = []
    for mode in modes:
        base = replace(cfg, mode=mode)
        for pfa in sorted(float(x) for x in pfa_grid):
            rows.append({"mode": mode, "pfa": pfa, "epsilon": calibrate(base, pfa), "calibration_trials": base.calibration_trials})
    return rows


def _fmt(v):
    if v is None:
        return ""
    if isinstance(v, float):
        return repr(v)
    return str(v)


def rows_to_csv(rows):
    """CSV text with a header row; floats use ``repr`` so reruns are byte-identical."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for r in rows:
        w.writerow([_fmt(getattr(r, c)) for c in CSV_COLUMNS])
    return buf.getvalue()


def write_csv(rows, path):
    with open(path, "w", newline="") as fh:
        fh.write(rows_to_csv(rows))


def write_manifest(path, cfg, started, extra=None):
    manifest = {
        "config": cfg.to_dict(),
        "master_seed": cfg.master_seed,
        "version": __version__,
        "python": platform.python_version(),
        "numpy": np.__version__,
        "wall_time_s": time.perf_counter() - started,
    }
    if extra:
        manifest.update(extra)
    with open(path, "w") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
    return manifest
