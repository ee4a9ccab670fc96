"""Receiver noise: white or stationary AR(1) along time, independent across antennas."""

from dataclasses import dataclass

import numpy as np
from scipy.linalg import toeplitz
from scipy.signal import lfilter

from ._random import crandn


@dataclass(frozen=True)
class NoiseModel:
    """Noise with per-sample power ``variance`` and lag-``i`` correlation ``gamma**|i|``.

    ``gamma == 0`` is white noise.
    """

    variance: float = 1.0
    gamma: float = 0.0

    def __post_init__(self):
        if not self.variance > 0:
            raise ValueError(f"noise variance must be > 0, got {self.variance}")
        if not -1.0 < self.gamma < 1.0:
            raise ValueError(f"AR(1) coefficient must satisfy |gamma| < 1, got {self.gamma}")

    @property
    def is_white(self):
        return self.gamma == 0.0

    def autocorrelation(self, lag):
        return self.variance * self.gamma ** np.abs(lag)

    def summability_bound(self):
        """Upper bound of ``sum_i |r(i)|`` over all lags ``i >= 0``."""
        return self.variance / (1.0 - abs(self.gamma))


def autocovariance_matrix(model, length):
    """Toeplitz temporal covariance with entry ``(i, j) = r(i - j)``."""
    if length < 1:
        raise ValueError(f"length must be >= 1, got {length}")
    return toeplitz(model.autocorrelation(np.arange(length)))


def generate_noise(model, rx_antennas, length, rng):
    """Noise matrix of shape ``(rx_antennas, length)``.

    Each row runs ``v[t] = gamma*v[t-1] + sqrt(1-gamma**2)*w[t]`` started from
    its stationary law, so every sample has variance ``model.variance``.
    """
    w = crandn(rng, (rx_antennas, length), model.variance)
    if model.is_white:
        return w
    g = model.gamma
    scale = np.sqrt(1.0 - g * g)
    # Pre-divide the first input so the filter's first output is w[:, 0] itself.
    w[:, 0] /= scale
    return lfilter([scale], [1.0, -g], w, axis=1)
