"""Per-trial random streams and circular complex Gaussian draws."""

import numpy as np

# Phase keys separate the independent trial pools drawn for one configuration.
PHASE_CALIBRATION = 0
PHASE_H0 = 1
PHASE_H1 = 2


def trial_rng(master_seed, phase, trial):
    """Generator for one trial, derived only from ``(master_seed, phase, trial)``.

    Results therefore do not depend on how trials are chunked or scheduled.
    """
    seq = np.random.SeedSequence(int(master_seed) & 0xFFFF_FFFF_FFFF_FFFF, spawn_key=(int(phase), int(trial)))
    return np.random.Generator(np.random.PCG64(seq))


def crandn(rng, shape, variance=1.0):
    """Circularly symmetric complex Gaussian samples with the given variance."""
    z = rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
    return z * np.sqrt(np.asarray(variance, dtype=float) / 2.0)
