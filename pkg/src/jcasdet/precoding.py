"""Slot scheduling and transmit precoders for the TDM and CM sharing schemes."""

import math
from dataclasses import dataclass
from enum import Enum
from functools import cached_property

import numpy as np

from ._random import crandn
from .array import steering_vector
from .errors import ConfigError

COMM = -1
"""Schedule label of a communication-only slot; sensing slots carry the 0-based target index."""


class Mode(str, Enum):
    TDM = "tdm"
    CM = "cm"


def _floor_share(fraction, total):
    # Guard against alpha*T landing a hair below an integer (0.29*100 -> 28.999...).
    return int(math.floor(fraction * total + 1e-9))


@dataclass(frozen=True)
class BeamformingPlan:
    """Resource split between sensing and the served UE.

    ``alpha`` is the TDM fraction of slots given to sensing, ``delta`` the CM
    fraction of power. ``sensing_aods`` holds one beam direction per target.
    With ``steered=False`` the sensing beams are replaced by single-element
    (non-beamformed) transmission.
    """

    mode: Mode = Mode.TDM
    total_slots: int = 64
    alpha: float = 1.0
    delta: float = 1.0
    sensing_aods: tuple = ()
    ue_aod: float = 0.0
    sensing_power: float = 1.0
    comm_power: float = 1.0
    tx_antennas: int = 8
    steered: bool = True

    def __post_init__(self):
        object.__setattr__(self, "mode", Mode(self.mode))
        object.__setattr__(self, "sensing_aods", tuple(float(a) for a in self.sensing_aods))
        if int(self.total_slots) != self.total_slots or self.total_slots < 1:
            raise ConfigError(f"total_slots must be a positive integer, got {self.total_slots}")
        if int(self.tx_antennas) != self.tx_antennas or self.tx_antennas < 1:
            raise ConfigError(f"tx_antennas must be a positive integer, got {self.tx_antennas}")
        for name in ("alpha", "delta"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ConfigError(f"{name} must lie in [0, 1], got {v}")
        if not self.sensing_power >= 0:
            raise ConfigError(f"sensing_power must be >= 0, got {self.sensing_power}")
        if not self.comm_power >= 0:
            raise ConfigError(f"comm_power must be >= 0, got {self.comm_power}")

    @property
    def num_targets(self):
        return len(self.sensing_aods)

    @property
    def sensing_slot_count(self):
        """T_s: floor(alpha*T) for TDM, T for CM."""
        if self.mode is Mode.TDM:
            return _floor_share(self.alpha, self.total_slots)
        return self.total_slots

    @property
    def comm_slot_count(self):
        if self.mode is Mode.TDM:
            return self.total_slots - self.sensing_slot_count
        return self.total_slots

    @cached_property
    def schedule(self):
        return slot_schedule(self)

    @cached_property
    def observation_slots(self):
        """Slot indices whose echoes form the detection window."""
        if self.num_targets == 0:
            return np.arange(self.sensing_slot_count)
        if self.mode is Mode.CM:
            return np.arange(self.total_slots)
        return np.flatnonzero(np.asarray(self.schedule) != COMM)

    @cached_property
    def observation_precoders(self):
        """Precoders of the observation slots, column-stacked: ``(M, T_s)``."""
        if self.num_targets == 0:
            return np.zeros((self.tx_antennas, len(self.observation_slots)), dtype=complex)
        return np.stack([precoder(self, t) for t in self.observation_slots], axis=1)

    def sensing_beam(self, k):
        if not self.steered:
            e0 = np.zeros(self.tx_antennas, dtype=complex)
            e0[0] = 1.0
            return e0
        return steering_vector(self.tx_antennas, self.sensing_aods[k])


def slot_schedule(plan, num_targets=None):
    """Per-slot labels: target index ``k`` for a sensing slot, :data:`COMM` otherwise.

    CM: K consecutive runs of floor(T/K) slots, the remainder joins the last run.
    TDM: the first floor(alpha*T) slots are split into K runs of
    floor(T_s/K) slots; every other slot is communication.
    """
    K = plan.num_targets if num_targets is None else int(num_targets)
    T = plan.total_slots
    if K < 1:
        raise ConfigError("a slot schedule needs at least one target direction")
    labels = np.full(T, COMM, dtype=int)
    if plan.mode is Mode.CM:
        run = T // K
        if run < 1:
            raise ConfigError(f"CM needs T >= K, got T={T}, K={K}")
        for k in range(K):
            stop = T if k == K - 1 else (k + 1) * run
            labels[k * run : stop] = k
    else:
        ts = plan.sensing_slot_count
        if ts < K:
            raise ConfigError(f"TDM needs floor(alpha*T) >= K, got floor({plan.alpha}*{T})={ts} < K={K}")
        run = ts // K
        for k in range(K):
            labels[k * run : (k + 1) * run] = k
    return tuple(int(x) for x in labels)


def precoder(plan, slot):
    """Transmit weight vector of length M at slot ``slot``."""
    if not 0 <= slot < plan.total_slots:
        raise IndexError(f"slot {slot} outside [0, {plan.total_slots})")
    K = plan.num_targets
    label = plan.schedule[slot]
    ue = steering_vector(plan.tx_antennas, plan.ue_aod)
    if plan.mode is Mode.CM:
        return np.sqrt(plan.delta / K) * plan.sensing_beam(label) + np.sqrt(1.0 - plan.delta) * ue
    if label == COMM:
        return ue
    return plan.sensing_beam(label) / np.sqrt(K)


def ue_received_sample(plan, slot, symbol, ue_noise_variance, rng=None, ue_angle=None):
    """Downlink sample at the UE: ``a_M(ue_angle)^H sqrt(P_c) w[t] s + z``.

    ``ue_angle`` is the true UE direction and defaults to the beam direction
    ``plan.ue_aod``.
    """
    angle = plan.ue_aod if ue_angle is None else ue_angle
    a = steering_vector(plan.tx_antennas, angle)
    y = np.vdot(a, np.sqrt(plan.comm_power) * precoder(plan, slot)) * symbol
    if ue_noise_variance > 0:
        if rng is None:
            raise ValueError("rng is required when ue_noise_variance > 0")
        y = y + crandn(rng, (), ue_noise_variance)
    return complex(y)


def beamforming_gain(plan, slot, angle):
    """``|a_M(angle)^H w[t]|^2`` for the precoder active at ``slot``."""
    return float(abs(np.vdot(steering_vector(plan.tx_antennas, angle), precoder(plan, slot))) ** 2)
