"""Line-of-sight ULA channels with power-law path loss."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import DimensionError, DomainError
from .model import SystemConfig

DEFAULT_WAVELENGTH = 0.3  # m; half-wavelength spacing for 0.15 m elements


@dataclass(frozen=True)
class SceneGeometry:
    antenna_spacing: float = 0.15
    carrier_wavelength: float = DEFAULT_WAVELENGTH
    fading_exponent: float = 2.5
    server_distance: float = 250.0
    server_angle: float = 0.0
    target_distances: tuple[float, ...] = (20.0, 40.0)
    target_angles: tuple[float, ...] = (-math.pi / 6, math.pi / 6)
    reference_gain: float = 1.0
    echo_gain_scale: tuple[float, ...] = (1.0, 1.0)
    fading_std: float = 0.0  # relative small-scale perturbation, 0 disables

    def __post_init__(self):
        for name in ("target_distances", "target_angles", "echo_gain_scale"):
            value = getattr(self, name)
            if np.isscalar(value):
                value = (value,) * len(self.target_distances)
            object.__setattr__(self, name, tuple(float(x) for x in value))
        if not (self.antenna_spacing > 0 and self.carrier_wavelength > 0):
            raise DomainError("antenna spacing and wavelength must be positive")
        if not self.fading_exponent > 0:
            raise DomainError("fading exponent must be positive")
        if self.server_distance <= 0 or any(d <= 0 for d in self.target_distances):
            raise DomainError("distances must be positive")
        if not self.reference_gain > 0 or self.fading_std < 0:
            raise DomainError("reference_gain must be positive, fading_std nonnegative")
        if not (len(self.target_distances) == len(self.target_angles) == len(self.echo_gain_scale)):
            raise DimensionError("per-target geometry lists differ in length")


@dataclass(frozen=True)
class ChannelSet:
    h: np.ndarray
    g: tuple[np.ndarray, ...]

    @property
    def num_antennas(self) -> int:
        return self.h.shape[0]


def steering_vector(angle: float, n: int, spacing: float, wavelength: float) -> np.ndarray:
    k = np.arange(n)
    return np.exp(1j * 2 * np.pi * k * spacing * math.sin(angle) / wavelength)


def server_gain(geom: SceneGeometry) -> float:
    """One-way large-scale power gain to the edge server."""
    return geom.reference_gain * geom.server_distance ** (-geom.fading_exponent)


def calibrate_reference_gain(snr_db: float, geom: SceneGeometry, cfg: SystemConfig) -> float:
    """Reference gain at 1 m that puts P*||h||^2/sigma^2 at ``snr_db``."""
    snr = 10.0 ** (snr_db / 10.0)
    return snr * cfg.noise_power / (
        cfg.max_power * cfg.num_antennas * geom.server_distance ** (-geom.fading_exponent))


def build_channels(geom: SceneGeometry, cfg: SystemConfig, rng_seed: int = 0) -> ChannelSet:
    n = cfg.num_antennas
    if len(geom.target_distances) != cfg.num_tasks:
        raise DimensionError(
            f"geometry has {len(geom.target_distances)} targets, config has {cfg.num_tasks} tasks")
    steer = lambda angle: steering_vector(angle, n, geom.antenna_spacing, geom.carrier_wavelength)

    h = math.sqrt(server_gain(geom)) * steer(geom.server_angle)
    g = [
        scale * math.sqrt(geom.reference_gain * d ** (-2 * geom.fading_exponent)) * steer(angle)
        for d, angle, scale in zip(geom.target_distances, geom.target_angles, geom.echo_gain_scale)
    ]
    if geom.fading_std > 0:
        rng = np.random.default_rng(rng_seed)
        h = h * _perturbation(rng, n, geom.fading_std)
        g = [gm * _perturbation(rng, n, geom.fading_std) for gm in g]
    return ChannelSet(h=h, g=tuple(g))


def _perturbation(rng: np.random.Generator, n: int, std: float) -> np.ndarray:
    z = (rng.standard_normal(n) + 1j * rng.standard_normal(n)) / math.sqrt(2)
    return 1.0 + std * z


def random_geometry(rng: np.random.Generator, num_targets: int,
                    base: SceneGeometry | None = None) -> SceneGeometry:
    """Random angles and distances around ``base``; used by tests and benchmarks."""
    base = base or SceneGeometry()
    angles = rng.uniform(-math.pi / 2.2, math.pi / 2.2, size=num_targets)
    return SceneGeometry(
        antenna_spacing=base.antenna_spacing,
        carrier_wavelength=base.carrier_wavelength,
        fading_exponent=base.fading_exponent,
        server_distance=float(rng.uniform(50.0, 400.0)),
        server_angle=float(rng.uniform(-math.pi / 2.2, math.pi / 2.2)),
        target_distances=tuple(rng.uniform(10.0, 60.0, size=num_targets)),
        target_angles=tuple(angles),
        reference_gain=base.reference_gain,
        echo_gain_scale=tuple(np.full(num_targets, base.echo_gain_scale[0])),
    )


def channel_norms(channels: ChannelSet) -> tuple[float, Sequence[float]]:
    return float(np.vdot(channels.h, channels.h).real), [float(np.vdot(g, g).real) for g in channels.g]
