"""Experiment configuration: user-facing parameters (degrees, dB) and model construction."""

import math
import warnings
from dataclasses import asdict, dataclass, fields, replace

import numpy as np
import yaml

from .detect import Method, RatioRule
from .errors import AssumptionWarning, ConfigError
from .noise import NoiseModel
from .precoding import BeamformingPlan, Mode
from .scene import ClutterCluster, Scene, Target
from .synthesis import TrialSetup


@dataclass(frozen=True)
class TargetSpec:
    aoa_deg: float = 88.0
    aod_deg: float = 95.0


@dataclass(frozen=True)
class ClusterSpec:
    """Clutter cluster; ``power`` is its total received power per RX antenna."""

    center_aoa_deg: float = 40.0
    center_aod_deg: float = 140.0
    num_points: int = 32
    spacing_deg: float = 2.0
    power: float = 0.5


def db_to_linear(db):
    return 10.0 ** (db / 10.0)


def snr_to_gain_variance(snr_db, noise_variance, sensing_power, rx_antennas=1):
    """Target path-gain variance giving the requested SNR under a beam-aligned transmitter.

    SNR is the received target power per RX antenna over ``noise_variance``.
    With unit-norm steering the echo power ``sensing_power * gain_variance`` is
    spread evenly over ``rx_antennas`` elements, hence
    ``gain_variance = rx_antennas * SNR * noise_variance / sensing_power``.
    For one antenna this is the whole-array ratio ``P_s * gain_variance / sigma^2``.
    """
    return rx_antennas * db_to_linear(snr_db) * noise_variance / sensing_power


def scnr(sensing_power, noise_variance, clutter_powers=()):
    """``P_s / (sigma^2 + strongest clutter power)``."""
    worst = max(clutter_powers, default=0.0)
    return sensing_power / (noise_variance + worst)


def cluster_point_variance(total_power, num_points, clutter_tx_power, rx_antennas):
    """Per-point gain variance whose summed per-antenna received power is ``total_power``."""
    return rx_antennas * total_power / (num_points * clutter_tx_power)


@dataclass(frozen=True)
class ExperimentConfig:
    """One JCAS detection scenario.

    Angles are in degrees and powers are linear. ``snr_db`` is per RX antenna;
    when ``scnr_db`` is set it takes precedence and the target power becomes
    ``SCNR * (noise_variance + strongest cluster power)``.
    """

    tx_antennas: int = 8
    rx_antennas: int = 16
    total_slots: int = 64
    tie_slots_to_rx: bool = False
    mode: str = "tdm"
    alpha: float = 1.0
    delta: float = 1.0
    targets: tuple = (TargetSpec(),)
    ue_aod_deg: float = 30.0
    beamforming: bool = True
    beam_error_deg: float = 0.0
    sensing_power: float = 1.0
    comm_power: float = 1.0
    noise_variance: float = 1.0
    gamma: float = 0.0
    clutter: tuple = ()
    clutter_tx_power: float = 1.0
    snr_db: float = 0.0
    scnr_db: float | None = None
    detectors: tuple = ("ratio", "mdl", "aic")
    k_max: int | None = None
    target_pfa: float = 0.01
    ratio_rule: str = "argmax"
    metric: str = "exact"
    trials: int = 2000
    calibration_trials: int = 10000
    master_seed: int = 0
    workers: int = 1

    def __post_init__(self):
        targets = tuple(t if isinstance(t, TargetSpec) else TargetSpec(**t) for t in self.targets)
        clutter = tuple(c if isinstance(c, ClusterSpec) else ClusterSpec(**c) for c in self.clutter)
        object.__setattr__(self, "targets", targets)
        object.__setattr__(self, "clutter", clutter)
        object.__setattr__(self, "detectors", tuple(Method(d).value for d in self.detectors))
        if self.tie_slots_to_rx and self.total_slots != self.rx_antennas:
            object.__setattr__(self, "total_slots", self.rx_antennas)
        try:
            Mode(self.mode)
            RatioRule(self.ratio_rule)
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
        if self.metric not in ("exact", "at_least"):
            raise ConfigError(f"metric must be 'exact' or 'at_least', got {self.metric!r}")
        if self.trials < 1 or self.calibration_trials < 1:
            raise ConfigError("trials and calibration_trials must be >= 1")
        for name in ("snr_db", "alpha", "delta", "gamma", "beam_error_deg", "noise_variance"):
            if not math.isfinite(getattr(self, name)):
                raise ConfigError(f"{name} must be finite")
        if self.scnr_db is not None and not math.isfinite(self.scnr_db):
            raise ConfigError("scnr_db must be finite")
        if not self.noise_variance > 0:
            raise ConfigError("noise_variance must be > 0")
        if not -1.0 < self.gamma < 1.0:
            raise ConfigError(f"gamma must satisfy |gamma| < 1, got {self.gamma}")
        if not 0.0 < self.target_pfa < 1.0:
            raise ConfigError(f"target_pfa must lie in (0, 1), got {self.target_pfa}")
        for c in clutter:
            if c.num_points < 1 or c.spacing_deg < 0 or c.power < 0:
                raise ConfigError(f"invalid clutter cluster {c}")
        if self.k_max is not None and not 1 <= self.k_max < self.rx_antennas:
            raise ConfigError(f"k_max must satisfy 1 <= k_max < N={self.rx_antennas}")

    # -- derived quantities -------------------------------------------------

    @property
    def num_targets(self):
        return len(self.targets)

    def target_snr_linear(self):
        if self.scnr_db is None:
            return db_to_linear(self.snr_db)
        worst = max((c.power for c in self.clutter), default=0.0)
        return db_to_linear(self.scnr_db) * (self.noise_variance + worst) / self.noise_variance

    def gain_variance(self):
        snr_db = 10.0 * math.log10(self.target_snr_linear())
        return snr_to_gain_variance(snr_db, self.noise_variance, self.sensing_power, self.rx_antennas)

    def resolved_k_max(self, window):
        """Default: N//4, kept below N and the number of snapshots."""
        k = self.k_max if self.k_max is not None else max(1, self.rx_antennas // 4)
        return max(1, min(k, self.rx_antennas - 1, window - 1))

    def build_scene(self):
        gv = self.gain_variance()
        targets = [Target(math.radians(t.aoa_deg), math.radians(t.aod_deg), gv) for t in self.targets]
        clutter = [
            ClutterCluster(
                math.radians(c.center_aoa_deg),
                math.radians(c.center_aod_deg),
                c.num_points,
                math.radians(c.spacing_deg),
                cluster_point_variance(c.power, c.num_points, self.clutter_tx_power, self.rx_antennas),
            )
            for c in self.clutter
        ]
        return Scene(tuple(targets), tuple(clutter), self.tx_antennas, self.rx_antennas)

    def build_plan(self):
        aods = [math.radians(t.aod_deg + self.beam_error_deg) for t in self.targets]
        return BeamformingPlan(
            mode=Mode(self.mode),
            total_slots=self.total_slots,
            alpha=self.alpha,
            delta=self.delta,
            sensing_aods=tuple(aods),
            ue_aod=math.radians(self.ue_aod_deg),
            sensing_power=self.sensing_power,
            comm_power=self.comm_power,
            tx_antennas=self.tx_antennas,
            steered=self.beamforming,
        )

    def build_noise(self):
        return NoiseModel(self.noise_variance, self.gamma)

    def build_setup(self):
        plan = self.build_plan()
        if self.targets:
            plan.schedule  # surfaces TDM/CM slot-count errors early
        return TrialSetup(self.build_scene(), self.build_noise(), plan, self.clutter_tx_power)

    def without_targets(self):
        return replace(self, targets=())

    def assumption_warnings(self):
        """Human-readable notes on where the large-system assumptions are strained."""
        notes = []
        N, M = self.rx_antennas, self.tx_antennas
        window = self.build_setup().window
        if self.num_targets >= N / 4:
            notes.append(f"K={self.num_targets} is not small against N/4={N / 4:g}")
        if window and not 0.1 <= N / window <= 10:
            notes.append(f"N/T_s={N / window:.3g} is outside [0.1, 10]")
        if not 0.1 <= M / N <= 10:
            notes.append(f"M/N={M / N:.3g} is outside [0.1, 10]")
        for i, c in enumerate(self.clutter):
            if c.num_points < N / 8:
                notes.append(f"cluster {i} has J={c.num_points} < N/8; its clutter acts as point reflectors")
        return notes

    def warn_assumptions(self):
        for note in self.assumption_warnings():
            warnings.warn(note, AssumptionWarning, stacklevel=2)

    # -- (de)serialisation -------------------------------------------------

    def to_dict(self):
        d = asdict(self)
        d["targets"] = [asdict(t) for t in self.targets]
        d["clutter"] = [asdict(c) for c in self.clutter]
        d["detectors"] = list(self.detectors)
        return d

    @classmethod
    def from_dict(cls, data):
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        data = dict(data)
        for key in ("targets", "clutter", "detectors"):
            if key in data and data[key] is not None:
                data[key] = tuple(data[key])
        try:
            return cls(**data)
        except (TypeError, ValueError) as exc:
            if isinstance(exc, ConfigError):
                raise
            raise ConfigError(str(exc)) from None


def load_config(path):
    with open(path) as fh:
        data = yaml.safe_load(fh) or {}
    if not isinstance(data, dict):
        raise ConfigError(f"{path}: expected a mapping at top level")
    return ExperimentConfig.from_dict(data)


SWEEP_AXES = {
    "snr_db": ("snr_db",),
    "scnr_db": ("scnr_db",),
    "alpha": ("alpha",),
    "delta": ("delta",),
    "tradeoff": ("alpha", "delta"),
    "gamma": ("gamma",),
    "rx_antennas": ("rx_antennas",),
    "total_slots": ("total_slots",),
    "beam_error_deg": ("beam_error_deg",),
    "pfa": ("target_pfa",),
}


def with_axis(cfg, axis, value):
    """Copy of ``cfg`` with sweep ``axis`` set to ``value``."""
    if axis not in SWEEP_AXES:
        raise ConfigError(f"unknown sweep axis {axis!r}; choose from {sorted(SWEEP_AXES)}")
    if not np.isfinite(value):
        raise ConfigError(f"sweep value {value!r} is not finite")
    updates = {}
    for name in SWEEP_AXES[axis]:
        updates[name] = int(value) if name in ("rx_antennas", "total_slots") else float(value)
    if axis == "rx_antennas" and cfg.tie_slots_to_rx:
        updates["total_slots"] = int(value)
    try:
        return replace(cfg, **updates)
    except ValueError as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(str(exc)) from None
