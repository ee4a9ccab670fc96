"""Transmit/receive signal assembly, sample covariance and its eigenvalues."""

import csv
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from ._random import crandn, trial_rng
from .errors import NumericalContractError
from .noise import NoiseModel, generate_noise
from .precoding import BeamformingPlan
from .scene import Scene, clutter_channel, draw_clutter_gains, draw_target_gains, target_channel

HERMITIAN_TOL = 1e-10


@dataclass(frozen=True)
class ObservationBatch:
    received: np.ndarray
    sample_covariance: np.ndarray
    eigenvalues: np.ndarray


@dataclass(frozen=True)
class TrialSetup:
    """Everything one Monte Carlo trial needs besides its random stream."""

    scene: Scene
    noise: NoiseModel
    plan: BeamformingPlan
    clutter_tx_power: float = 1.0

    @property
    def window(self):
        return len(self.plan.observation_slots)

    def null_hypothesis(self):
        """Same scene, noise and observation window with every target removed.

        The plan is reduced to a bare window of the same length: without
        targets nothing else in it affects the draws, and equal null setups
        then compare equal across modes and beam settings.
        """
        window = BeamformingPlan(total_slots=max(self.window, 1), tx_antennas=self.plan.tx_antennas)
        return TrialSetup(self.scene.without_targets(), self.noise, window, self.clutter_tx_power)


def synthesize_tx(plan, rng, schedule=None):
    """Sensing transmit matrix ``X`` of shape ``(M, T_s)``.

    Column ``t`` is ``sqrt(P_s) * w[t] * s[t]`` with ``s[t] ~ CN(0, 1)``, over
    the plan's observation slots (only the sensing slots for TDM, all slots
    for CM). ``schedule`` is accepted for symmetry with :func:`slot_schedule`
    and must match the plan's own.
    """
    if schedule is not None and tuple(schedule) != plan.schedule:
        raise ValueError("schedule does not belong to this plan")
    w = plan.observation_precoders
    s = crandn(rng, w.shape[1])
    return np.sqrt(plan.sensing_power) * w * s[None, :]


def synthesize_clutter_tx(power, tx_antennas, length, rng):
    """I.i.d. CN(0, power) clutter-illuminating signal, shape ``(M, T_s)``."""
    return crandn(rng, (tx_antennas, length), power)


def received_matrix(H, X, H_cl, X_cl, V):
    """``Y = H X + H_cl X_cl + V``."""
    H, X, H_cl, X_cl, V = (np.asarray(a) for a in (H, X, H_cl, X_cl, V))
    n, t = V.shape
    if H.shape[0] != n or H_cl.shape[0] != n or X.shape[1] != t or X_cl.shape[1] != t:
        raise ValueError(
            f"non-conformable shapes H{H.shape} X{X.shape} H_cl{H_cl.shape} X_cl{X_cl.shape} V{V.shape}"
        )
    return H @ X + H_cl @ X_cl + V


def sample_covariance(Y):
    """``(1/T_s) Y Y^H`` for ``Y`` of shape ``(..., N, T_s)``."""
    Y = np.asarray(Y)
    if Y.shape[-1] < 1:
        raise ValueError("need at least one snapshot")
    return Y @ np.swapaxes(Y.conj(), -1, -2) / Y.shape[-1]


def hermitian_eigenvalues(R, return_vectors=False):
    """Real eigenvalues of Hermitian ``R`` (stacks allowed), in non-increasing order.

    Raises :class:`NumericalContractError` when ``R`` departs from Hermitian
    symmetry by more than ``1e-10`` relative to its largest entry.
    """
    R = np.asarray(R)
    Rh = np.swapaxes(R.conj(), -1, -2)
    scale = max(1.0, float(np.max(np.abs(R)))) if R.size else 1.0
    if R.size and np.max(np.abs(R - Rh)) > HERMITIAN_TOL * scale:
        raise NumericalContractError("matrix is not Hermitian within tolerance")
    R = (R + Rh) / 2
    if return_vectors:
        w, U = np.linalg.eigh(R)
        return w[..., ::-1], U[..., ::-1]
    return np.linalg.eigvalsh(R)[..., ::-1]


def _received(setup, rng):
    scene, plan = setup.scene, setup.plan
    n, m, ts = scene.rx_antennas, scene.tx_antennas, setup.window
    gains = draw_target_gains(scene, rng)
    clutter_gains = draw_clutter_gains(scene, rng)
    Y = generate_noise(setup.noise, n, ts, rng)
    if scene.num_targets:
        Y = Y + target_channel(scene, gains) @ synthesize_tx(plan, rng)
    if scene.clutter:
        Xc = synthesize_clutter_tx(setup.clutter_tx_power, m, ts, rng)
        Y = Y + clutter_channel(scene, clutter_gains) @ Xc
    return Y


def observe(setup, rng):
    """One trial's received matrix, sample covariance and ordered eigenvalues."""
    Y = _received(setup, rng)
    R = sample_covariance(Y)
    return ObservationBatch(Y, R, hermitian_eigenvalues(R))


def _simulate_chunk(setup, seed, phase, start, stop):
    n = setup.scene.rx_antennas
    R = np.empty((stop - start, n, n), dtype=complex)
    for i, trial in enumerate(range(start, stop)):
        R[i] = sample_covariance(_received(setup, trial_rng(seed, phase, trial)))
    return hermitian_eigenvalues(R)


def simulate_eigenvalues(setup, trials, seed, phase, workers=1, chunk_size=512):
    """Ordered sample-covariance eigenvalues for ``trials`` trials, shape ``(trials, N)``.

    Trial ``i`` draws from ``trial_rng(seed, phase, i)`` only, so the output is
    identical for any ``workers``/``chunk_size``.
    """
    bounds = [(a, min(a + chunk_size, trials)) for a in range(0, trials, chunk_size)]
    if not bounds:
        return np.empty((0, setup.scene.rx_antennas))
    if workers <= 1 or len(bounds) == 1:
        parts = [_simulate_chunk(setup, seed, phase, a, b) for a, b in bounds]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            futures = [pool.submit(_simulate_chunk, setup, seed, phase, a, b) for a, b in bounds]
            parts = [f.result() for f in futures]
    return np.concatenate(parts, axis=0)


def write_observation_dump(path, batches):
    """Columnar CSV dump of received samples and eigenvalues, one block per trial.

    Columns: ``trial, kind, row, col, re, im`` where ``kind`` is ``Y`` or
    ``eig`` (eigenvalues use ``col = -1`` and ``im = 0``).
    """
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["trial", "kind", "row", "col", "re", "im"])
        for trial, batch in enumerate(batches):
            Y = batch.received
            for r in range(Y.shape[0]):
                for c in range(Y.shape[1]):
                    w.writerow([trial, "Y", r, c, repr(float(Y[r, c].real)), repr(float(Y[r, c].imag))])
            for r, lam in enumerate(batch.eigenvalues):
                w.writerow([trial, "eig", r, -1, repr(float(lam)), "0.0"])
