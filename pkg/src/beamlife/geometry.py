"""Far-field geometry, carrier phasing and the shadowed channel.

All distances are expressed in carrier wavelengths, so the wavelength drops
out of every phase expression. Per-node channel gains model shadowing only
and have 0 dB (log-)mean; deterministic path loss is accounted for in the
link budget instead (see :mod:`beamlife.energy`).
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

TWO_PI = 2.0 * math.pi

# Destination ranges below this multiple of a node radius stretch the
# first-order path-length expansion noticeably.
FAR_FIELD_MIN_RATIO = 10.0

__all__ = [
    "PolarPoint",
    "Destination",
    "ChannelRealization",
    "PhaseErrorVector",
    "FarFieldWarning",
    "db_to_linear",
    "linear_to_db",
    "deploy_cluster",
    "far_field_distance",
    "carrier_phase",
    "propagation_phase",
    "sample_channel",
    "sample_phase_errors",
    "received_snr",
]


class FarFieldWarning(UserWarning):
    """Destination range is not comfortably larger than the node radius."""


def db_to_linear(value_db):
    """Convert a power quantity from dB to linear scale."""
    return 10.0 ** (value_db / 10.0)


def linear_to_db(value):
    """Convert a linear power quantity to dB. Zero maps to -inf."""
    with np.errstate(divide="ignore"):
        return 10.0 * np.log10(value)


@dataclass(frozen=True)
class PolarPoint:
    """Planar position: radius in carrier wavelengths, azimuth in radians.

    The azimuth is wrapped into [0, 2*pi).
    """

    rho: float
    phi: float

    def __post_init__(self):
        if self.rho < 0:
            raise ValueError(f"rho must be non-negative, got {self.rho}")
        object.__setattr__(self, "rho", float(self.rho))
        object.__setattr__(self, "phi", float(self.phi) % TWO_PI)


@dataclass(frozen=True)
class Destination:
    """A remote receiver location plus its link index."""

    location: PolarPoint
    index: int = 0


@dataclass(frozen=True)
class ChannelRealization:
    """Per-node amplitude gains drawn from the shadowing model (one receiver)."""

    gains: np.ndarray
    shadowing_db_sigma2: float

    def __post_init__(self):
        gains = np.asarray(self.gains, dtype=float)
        if gains.ndim != 1 or gains.size == 0:
            raise ValueError("gains must be a non-empty 1-D vector")
        if not np.all(gains > 0):
            raise ValueError("all channel gains must be positive")
        object.__setattr__(self, "gains", gains)

    def __len__(self):
        return self.gains.size


@dataclass(frozen=True)
class PhaseErrorVector:
    """Residual per-node carrier phase errors in radians."""

    errors: np.ndarray
    bound: float = field(default=math.inf)

    def __post_init__(self):
        errors = np.asarray(self.errors, dtype=float)
        if errors.ndim != 1:
            raise ValueError("errors must be a 1-D vector")
        if np.any(np.abs(errors) > self.bound):
            raise ValueError("phase errors exceed the configured bound")
        object.__setattr__(self, "errors", errors)

    def __len__(self):
        return self.errors.size


def deploy_cluster(n, disk_radius, rng):
    """Place ``n`` nodes uniformly (in area) over a disk of the given radius.

    Parameters
    ----------
    n : int
        Number of nodes, at least 1.
    disk_radius : float
        Disk radius in wavelengths. A zero radius collapses all nodes
        onto the origin.
    rng : numpy.random.Generator
        Seeded stream; identical seeds give bit-identical layouts.

    Returns
    -------
    list of PolarPoint
    """
    if n < 1:
        raise ValueError(f"cluster size must be at least 1, got {n}")
    if disk_radius < 0:
        raise ValueError(f"disk radius must be non-negative, got {disk_radius}")
    # uniform over area: radius is R*sqrt(U), azimuth uniform
    rho = disk_radius * np.sqrt(rng.random(n))
    phi = TWO_PI * rng.random(n)
    return [PolarPoint(r, p) for r, p in zip(rho, phi)]


def far_field_distance(node, direction, dest_rho):
    """First-order path length from a node toward a point at ``dest_rho``.

    Uses the usual far-field expansion: range minus the projection of the
    node position onto the look direction. Warns when the range is less
    than ``FAR_FIELD_MIN_RATIO`` times the node radius.
    """
    if node.rho > 0 and dest_rho < FAR_FIELD_MIN_RATIO * node.rho:
        warnings.warn(
            f"destination range {dest_rho:g} is below {FAR_FIELD_MIN_RATIO:g}x "
            f"the node radius {node.rho:g}; far-field expansion degrades",
            FarFieldWarning,
            stacklevel=2,
        )
    return dest_rho - node.rho * math.cos(direction - node.phi)


def propagation_phase(node, direction, dest_rho):
    """Phase accumulated over the propagation path, in radians (lambda = 1)."""
    return TWO_PI * far_field_distance(node, direction, dest_rho)


def carrier_phase(node, dest):
    """Initial carrier phase that makes the node combine coherently at ``dest``.

    Exactly cancels :func:`propagation_phase` toward the destination.
    """
    return -propagation_phase(node, dest.location.phi, dest.location.rho)


def sample_channel(n, sigma2_db, rng, amplitude_divisor=10):
    """Draw per-node amplitude gains from log-normal shadowing.

    Shadowing in dB is zero-mean Gaussian with variance ``sigma2_db``;
    the amplitude is ``10**(A / amplitude_divisor)``. The divisor 10 keeps
    the dB figure on the amplitude itself; 20 is the conventional mapping
    of a power-dB figure to an amplitude.
    """
    if n < 1:
        raise ValueError(f"need at least 1 node, got {n}")
    if sigma2_db < 0:
        raise ValueError(f"shadowing variance must be non-negative, got {sigma2_db}")
    if amplitude_divisor not in (10, 20):
        raise ValueError(f"amplitude divisor must be 10 or 20, got {amplitude_divisor}")
    shadow_db = rng.normal(0.0, math.sqrt(sigma2_db), n)
    gains = 10.0 ** (shadow_db / amplitude_divisor)
    return ChannelRealization(gains=gains, shadowing_db_sigma2=float(sigma2_db))


def sample_phase_errors(n, bound_rad, rng):
    """Draw per-node phase errors uniformly from [-bound_rad, bound_rad]."""
    if n < 1:
        raise ValueError(f"need at least 1 node, got {n}")
    if bound_rad < 0:
        raise ValueError(f"phase error bound must be non-negative, got {bound_rad}")
    if bound_rad == 0:
        errors = np.zeros(n)
    else:
        errors = rng.uniform(-bound_rad, bound_rad, n)
    return PhaseErrorVector(errors=errors, bound=float(bound_rad))


def coherent_snr(effective_weights, gains, phases, noise_power):
    """Instantaneous SNR of a phase-misaligned coherent sum (array inputs).

    This is the raw kernel behind :func:`received_snr`; the simulation
    engine calls it directly with plain arrays.
    """
    amplitude = np.sum(effective_weights * gains * np.exp(1j * phases))
    return float(abs(amplitude) ** 2 / noise_power)


def received_snr(weights, channel, phase_errors, noise_power):
    """Instantaneous received SNR at the destination.

    Parameters
    ----------
    weights : WeightVector
        Per-node transmit amplitudes (``weights.effective``).
    channel : ChannelRealization
    phase_errors : PhaseErrorVector or None
        Residual phase misalignment per node; ``None`` means perfect
        phase alignment.
    noise_power : float
        Receiver noise power, linear scale.

    With zero phase errors this is just the squared weighted gain sum over
    the noise power.
    """
    if noise_power <= 0:
        raise ValueError(f"noise power must be positive, got {noise_power}")
    w = weights.effective
    gains = channel.gains
    if phase_errors is None:
        phases = np.zeros(gains.size)
    else:
        phases = phase_errors.errors
    if not (w.size == gains.size == phases.size):
        raise ValueError(
            f"length mismatch: weights {w.size}, gains {gains.size}, phases {phases.size}"
        )
    return coherent_snr(w, gains, phases, noise_power)
