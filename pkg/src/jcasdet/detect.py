"""Number-of-targets estimators on ordered sample-covariance eigenvalues.

The ratio test locates the dominant gap between consecutive eigenvalues and
accepts it only above an empirically calibrated threshold. MDL and AIC are
the classical information-criterion baselines, which assume white noise.
"""

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import ConfigError


class Method(str, Enum):
    RATIO = "ratio"
    MDL = "mdl"
    AIC = "aic"


class RatioRule(str, Enum):
    ARGMAX = "argmax"  # index of the largest ratio, if it clears the threshold
    LARGEST = "largest"  # largest index whose ratio clears the threshold


@dataclass(frozen=True)
class DetectorConfig:
    method: Method = Method.RATIO
    k_max: int = 4
    epsilon: float = 0.0
    target_pfa: float = 0.01
    rule: RatioRule = RatioRule.ARGMAX

    def __post_init__(self):
        object.__setattr__(self, "method", Method(self.method))
        object.__setattr__(self, "rule", RatioRule(self.rule))
        if int(self.k_max) != self.k_max or self.k_max < 1:
            raise ConfigError(f"k_max must be a positive integer, got {self.k_max}")
        if not self.epsilon >= 0:
            raise ConfigError(f"epsilon must be >= 0, got {self.epsilon}")
        if not 0.0 < self.target_pfa < 1.0:
            raise ConfigError(f"target_pfa must lie in (0, 1), got {self.target_pfa}")


@dataclass(frozen=True)
class DetectionResult:
    estimated_count: int
    ratios: np.ndarray
    method: Method


def _check(eigs, k_max):
    eigs = np.asarray(eigs, dtype=float)
    if eigs.shape[-1] < k_max + 1:
        raise ValueError(f"need at least k_max+1={k_max + 1} eigenvalues, got {eigs.shape[-1]}")
    return eigs


def eigenvalue_ratios(eigs, k_max):
    """``lambda_n / lambda_{n+1}`` for ``n = 1..k_max``; works on stacks ``(..., N)``."""
    eigs = _check(eigs, k_max)
    den = eigs[..., 1 : k_max + 1]
    if np.any(den <= 0):
        raise ValueError("non-positive eigenvalue in a ratio denominator")
    return eigs[..., :k_max] / den


def ratio_statistics(eigs, k_max):
    """Per-row ``(argmax index n*, max ratio)``; ties go to the smaller index."""
    r = eigenvalue_ratios(eigs, k_max)
    return np.argmax(r, axis=-1) + 1, np.max(r, axis=-1)


def ratio_counts(eigs, k_max, epsilon, rule=RatioRule.ARGMAX):
    """Vectorised ratio-test estimates for a stack of eigenvalue vectors."""
    r = eigenvalue_ratios(eigs, k_max)
    above = r > 1.0 + epsilon
    if RatioRule(rule) is RatioRule.LARGEST:
        idx = np.arange(1, k_max + 1)
        return np.max(np.where(above, idx, 0), axis=-1)
    n_star = np.argmax(r, axis=-1) + 1
    return np.where(np.any(above, axis=-1), n_star, 0)


def ratio_test(eigenvalues, cfg):
    """Estimate the number of targets from one non-increasing eigenvalue vector."""
    eigs = _check(eigenvalues, cfg.k_max)
    if eigs.ndim != 1:
        raise ValueError("ratio_test takes a single eigenvalue vector; use ratio_counts for stacks")
    ratios = eigenvalue_ratios(eigs, cfg.k_max)
    k = int(ratio_counts(eigs, cfg.k_max, cfg.epsilon, cfg.rule))
    return DetectionResult(k, ratios, Method.RATIO)


def _log_sphericity(eigs, T_s, k_max):
    """``(N-k) * T_s * ln(g(k)/a(k))`` for k = 0..k_max (non-positive)."""
    eigs = _check(eigs, k_max)
    if np.any(eigs <= 0):
        raise ValueError("information criteria need strictly positive eigenvalues")
    N = eigs.shape[-1]
    logs = np.log(eigs)
    out = np.empty(eigs.shape[:-1] + (k_max + 1,))
    for k in range(k_max + 1):
        tail = N - k
        log_g = logs[..., k:].mean(axis=-1)
        log_a = np.log(eigs[..., k:].mean(axis=-1))
        out[..., k] = tail * T_s * (log_g - log_a)
    return out


def mdl_criterion(eigs, T_s, k_max):
    N = np.shape(eigs)[-1]
    k = np.arange(k_max + 1)
    return -_log_sphericity(eigs, T_s, k_max) + 0.5 * k * (2 * N - k) * np.log(T_s)


def aic_criterion(eigs, T_s, k_max):
    N = np.shape(eigs)[-1]
    k = np.arange(k_max + 1)
    return -2.0 * _log_sphericity(eigs, T_s, k_max) + 2.0 * k * (2 * N - k)


def mdl_estimate(eigenvalues, T_s, k_max):
    """Minimum-description-length source count (array output for stacks)."""
    k = np.argmin(mdl_criterion(eigenvalues, T_s, k_max), axis=-1)
    return int(k) if np.ndim(k) == 0 else k


def aic_estimate(eigenvalues, T_s, k_max):
    """Akaike-information-criterion source count (array output for stacks)."""
    k = np.argmin(aic_criterion(eigenvalues, T_s, k_max), axis=-1)
    return int(k) if np.ndim(k) == 0 else k


def estimate_counts(eigs, method, T_s, k_max, epsilon=0.0, rule=RatioRule.ARGMAX):
    method = Method(method)
    if method is Method.RATIO:
        return ratio_counts(eigs, k_max, epsilon, rule)
    if method is Method.MDL:
        return np.atleast_1d(mdl_estimate(eigs, T_s, k_max))
    return np.atleast_1d(aic_estimate(eigs, T_s, k_max))


def threshold_from_statistics(max_ratios, target_pfa):
    """``epsilon`` with ``1 + epsilon`` at the empirical ``1 - target_pfa`` quantile.

    Uses linear interpolation between order statistics, so ``target_pfa=0.5``
    gives exactly ``median - 1``.
    """
    max_ratios = np.asarray(max_ratios, dtype=float)
    if not 0.0 < target_pfa < 1.0:
        raise ConfigError(f"target_pfa must lie in (0, 1), got {target_pfa}")
    if max_ratios.size * min(target_pfa, 1.0 - target_pfa) < 5:
        raise ConfigError(
            f"{max_ratios.size} null trials cannot resolve the {1 - target_pfa:.4g} quantile; "
            "need trials * min(pfa, 1 - pfa) >= 5"
        )
    return max(float(np.quantile(max_ratios, 1.0 - target_pfa)) - 1.0, 0.0)


def calibrate_threshold(h0_config, trials, target_pfa, workers=1):
    """Run ``trials`` target-free simulations of ``h0_config`` and return ``epsilon``.

    ``h0_config`` is an :class:`~jcasdet.config.ExperimentConfig` without
    targets. The statistic is each trial's largest consecutive-eigenvalue ratio.
    """
    from ._random import PHASE_CALIBRATION
    from .synthesis import simulate_eigenvalues

    if h0_config.targets:
        raise ConfigError("calibration config must not contain targets")
    if trials < 100:
        raise ConfigError(f"calibration needs at least 100 trials, got {trials}")
    setup = h0_config.build_setup()
    eigs = simulate_eigenvalues(setup, trials, h0_config.master_seed, PHASE_CALIBRATION, workers=workers)
    _, max_ratio = ratio_statistics(eigs, h0_config.resolved_k_max(setup.window))
    return threshold_from_statistics(max_ratio, target_pfa)
