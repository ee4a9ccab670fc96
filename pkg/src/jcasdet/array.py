"""Uniform linear array geometry and steering vectors."""

from dataclasses import dataclass
from enum import Enum

import numpy as np

TWO_PI = 2.0 * np.pi


class Role(str, Enum):
    TRANSMIT = "transmit"
    RECEIVE = "receive"


@dataclass(frozen=True)
class ArraySpec:
    num_elements: int
    role: Role = Role.RECEIVE

    def __post_init__(self):
        if int(self.num_elements) != self.num_elements or self.num_elements < 1:
            raise ValueError(f"num_elements must be a positive integer, got {self.num_elements!r}")


def _size(spec):
    n = spec.num_elements if isinstance(spec, ArraySpec) else spec
    if int(n) != n or n < 1:
        raise ValueError(f"array needs at least one element, got {n!r}")
    return int(n)


def steering_vector(spec, angle):
    """Unit-norm ULA response at ``angle`` (radians).

    Element ``m`` is ``exp(-j*pi*m*cos(angle)) / sqrt(n)``, i.e. half-wavelength
    spacing. ``spec`` may be an :class:`ArraySpec` or a bare element count.
    """
    n = _size(spec)
    angle = float(np.mod(angle, TWO_PI))
    m = np.arange(n)
    return np.exp(-1j * np.pi * m * np.cos(angle)) / np.sqrt(n)


def steering_matrix(spec, angles):
    """Stack steering vectors column-wise: shape ``(n, len(angles))``."""
    n = _size(spec)
    angles = np.mod(np.atleast_1d(np.asarray(angles, dtype=float)), TWO_PI)
    m = np.arange(n)[:, None]
    return np.exp(-1j * np.pi * m * np.cos(angles)[None, :]) / np.sqrt(n)
