"""Targets, clutter clusters and the resulting bistatic channel matrices."""

from dataclasses import dataclass, replace
from functools import cached_property

import numpy as np

from ._random import crandn
from .array import steering_matrix


@dataclass(frozen=True)
class Target:
    """Point reflector seen at ``aoa`` by the sensing receiver and ``aod`` by the transmitter."""

    aoa: float
    aod: float
    gain_variance: float = 1.0

    def __post_init__(self):
        if not self.gain_variance >= 0:
            raise ValueError(f"gain_variance must be >= 0, got {self.gain_variance}")


@dataclass(frozen=True)
class ClutterCluster:
    """``num_points`` scatterers on a line, centered on ``(center_aoa, center_aod)``.

    ``power`` is the path-gain variance of every point in the cluster.
    """

    center_aoa: float
    center_aod: float
    num_points: int = 1
    angular_spacing: float = 0.0
    power: float = 1.0

    def __post_init__(self):
        if int(self.num_points) != self.num_points or self.num_points < 1:
            raise ValueError(f"num_points must be a positive integer, got {self.num_points}")
        if not self.angular_spacing >= 0:
            raise ValueError(f"angular_spacing must be >= 0, got {self.angular_spacing}")
        if not self.power >= 0:
            raise ValueError(f"power must be >= 0, got {self.power}")

    def offsets(self):
        i = np.arange(self.num_points)
        return (i - (self.num_points - 1) / 2.0) * self.angular_spacing

    def point_aoas(self):
        return self.center_aoa + self.offsets()

    def point_aods(self):
        return self.center_aod + self.offsets()


@dataclass(frozen=True)
class Scene:
    targets: tuple = ()
    clutter: tuple = ()
    tx_antennas: int = 8
    rx_antennas: int = 16

    def __post_init__(self):
        object.__setattr__(self, "targets", tuple(self.targets))
        object.__setattr__(self, "clutter", tuple(self.clutter))
        for name in ("tx_antennas", "rx_antennas"):
            v = getattr(self, name)
            if int(v) != v or v < 1:
                raise ValueError(f"{name} must be a positive integer, got {v}")

    @property
    def num_targets(self):
        return len(self.targets)

    @property
    def num_clutter_points(self):
        return sum(c.num_points for c in self.clutter)

    def without_targets(self):
        return replace(self, targets=())

    # Steering matrices depend only on geometry; cache them for Monte Carlo loops.
    @cached_property
    def target_rx_steering(self):
        return steering_matrix(self.rx_antennas, [t.aoa for t in self.targets])

    @cached_property
    def target_tx_steering(self):
        return steering_matrix(self.tx_antennas, [t.aod for t in self.targets])

    @cached_property
    def clutter_rx_steering(self):
        return steering_matrix(self.rx_antennas, self._clutter_angles("point_aoas"))

    @cached_property
    def clutter_tx_steering(self):
        return steering_matrix(self.tx_antennas, self._clutter_angles("point_aods"))

    @cached_property
    def clutter_point_variances(self):
        if not self.clutter:
            return np.zeros(0)
        return np.concatenate([np.full(c.num_points, float(c.power)) for c in self.clutter])

    def _clutter_angles(self, attr):
        if not self.clutter:
            return np.zeros(0)
        return np.concatenate([getattr(c, attr)() for c in self.clutter])


def draw_target_gains(scene, rng):
    """One CN(0, gain_variance) path gain per target."""
    var = np.array([t.gain_variance for t in scene.targets], dtype=float)
    return crandn(rng, var.shape, var)


def draw_clutter_gains(scene, rng):
    """One CN(0, power) path gain per clutter point, clusters in order."""
    var = scene.clutter_point_variances
    return crandn(rng, var.shape, var)


def _channel(a_rx, a_tx, gains, expected):
    gains = np.asarray(gains)
    if gains.shape != (expected,):
        raise ValueError(f"expected {expected} gains, got shape {gains.shape}")
    return (a_rx * gains[None, :]) @ a_tx.conj().T


def target_channel(scene, gains):
    """Target channel ``sum_k g_k a_N(aoa_k) a_M(aod_k)^H``, shape ``(N, M)``."""
    return _channel(scene.target_rx_steering, scene.target_tx_steering, gains, scene.num_targets)


def clutter_channel(scene, clutter_gains=None, rng=None):
    """Clutter channel summed over every clutter point, shape ``(N, M)``.

    When ``clutter_gains`` is omitted they are drawn from ``rng``.
    """
    if clutter_gains is None:
        if rng is None:
            raise ValueError("either clutter_gains or rng is required")
        clutter_gains = draw_clutter_gains(scene, rng)
    return _channel(scene.clutter_rx_steering, scene.clutter_tx_steering, clutter_gains, scene.num_clutter_points)
