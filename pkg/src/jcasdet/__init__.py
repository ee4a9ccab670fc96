"""Target-number detection for bistatic joint communication and sensing.

Simulates the sensing receiver's observation matrix under time-division (TDM)
and concurrent (CM) transmit beamforming, with point targets, clustered
clutter and AR(1) temporally correlated noise, and estimates the number of
targets from the ordered sample-covariance eigenvalues.
"""

from .array import ArraySpec, steering_matrix, steering_vector
from .detect import (
    DetectionResult,
    DetectorConfig,
    aic_estimate,
    calibrate_threshold,
    mdl_estimate,
    ratio_test,
)
from .errors import AssumptionWarning, ConfigError, NumericalContractError
from .noise import NoiseModel, autocovariance_matrix, generate_noise
from .precoding import BeamformingPlan, Mode, precoder, slot_schedule
from .scene import ClutterCluster, Scene, Target

__version__ = "0.1.0"

__all__ = [
    "ArraySpec",
    "AssumptionWarning",
    "BeamformingPlan",
    "ClutterCluster",
    "ConfigError",
    "DetectionResult",
    "DetectorConfig",
    "Mode",
    "NoiseModel",
    "NumericalContractError",
    "Scene",
    "Target",
    "aic_estimate",
    "autocovariance_matrix",
    "calibrate_threshold",
    "generate_noise",
    "mdl_estimate",
    "precoder",
    "ratio_test",
    "slot_schedule",
    "steering_matrix",
    "steering_vector",
]
