"""Closed-form link, sample-count and learning-error formulas.

Everything here is linear scale: powers in watts, SINRs as ratios. dB values
are converted once, by :func:`db_to_linear` / :func:`dbm_to_watts`, when a
scenario is loaded.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import DimensionError, DomainError


def db_to_linear(db: float) -> float:
    return 10.0 ** (db / 10.0)


def linear_to_db(x: float) -> float:
    return 10.0 * math.log10(x)


def dbm_to_watts(dbm: float) -> float:
    return 10.0 ** ((dbm - 30.0) / 10.0)


def watts_to_dbm(w: float) -> float:
    return 10.0 * math.log10(w) + 30.0


def as_vector(x, n: int | None = None, name: str = "vector") -> np.ndarray:
    """Coerce to a 1-D complex array, optionally checking its length."""
    v = np.asarray(x, dtype=complex)
    if v.ndim != 1:
        raise DimensionError(f"{name} must be 1-D, got shape {v.shape}")
    if n is not None and v.shape[0] != n:
        raise DimensionError(f"{name} has length {v.shape[0]}, expected {n}")
    if not np.all(np.isfinite(v)):
        raise DomainError(f"{name} has non-finite entries")
    return v


@dataclass(frozen=True)
class SystemConfig:
    """Scenario scalars. Per-task tuples all have length ``num_tasks``."""

    num_antennas: int
    max_power: float  # W
    noise_power: float  # W
    clutter_power: float  # W
    bandwidth: float  # Hz
    sample_volume: float  # bits per sample
    total_time: float  # s
    sensing_time: float  # s per sample
    eta: tuple[float, ...] = field(default=())  # linear sensing SINR thresholds
    error_a: tuple[float, ...] = field(default=())
    error_b: tuple[float, ...] = field(default=())

    def __post_init__(self):
        for name in ("eta", "error_a", "error_b"):
            object.__setattr__(self, name, tuple(float(x) for x in getattr(self, name)))
        if int(self.num_antennas) != self.num_antennas or self.num_antennas < 1:
            raise DomainError("num_antennas must be a positive integer")
        for name in ("max_power", "noise_power", "clutter_power", "bandwidth",
                     "sample_volume", "total_time", "sensing_time"):
            value = getattr(self, name)
            if not (value > 0 and math.isfinite(value)):
                raise DomainError(f"{name} must be positive and finite, got {value}")
        m = len(self.error_a)
        if m < 1:
            raise DomainError("at least one task is required")
        if len(self.error_b) != m or len(self.eta) != m:
            raise DimensionError("eta, error_a and error_b must have equal lengths")
        if any(e < 0 for e in self.eta):
            raise DomainError("sensing thresholds must be nonnegative")
        if any(not a > 0 for a in self.error_a) or any(not b > 0 for b in self.error_b):
            raise DomainError("error-model parameters must be positive")

    @property
    def num_tasks(self) -> int:
        return len(self.error_a)


@dataclass(frozen=True)
class SampleBudget:
    sensing_limit: float
    comm_limit: float
    v: int


def sensing_sinr(w, g, noise_power: float, clutter_power: float) -> float:
    """|g^H w|^2 / (noise + clutter)."""
    w = as_vector(w, name="w")
    g = as_vector(g, w.shape[0], name="g")
    denom = noise_power + clutter_power
    if not denom > 0:
        raise DomainError("noise_power + clutter_power must be positive")
    return float(abs(np.vdot(g, w)) ** 2 / denom)


def comm_sinr(f, w, h, noise_power: float) -> float:
    """|h^H f|^2 / (noise + |h^H w|^2): the radar stream interferes at the server."""
    f = as_vector(f, name="f")
    w = as_vector(w, f.shape[0], name="w")
    h = as_vector(h, f.shape[0], name="h")
    if not noise_power > 0:
        raise DomainError("noise_power must be positive")
    return float(abs(np.vdot(h, f)) ** 2 / (noise_power + abs(np.vdot(h, w)) ** 2))


def rate(sinr: float) -> float:
    """Spectral efficiency log2(1 + sinr) in bit/s/Hz."""
    if sinr < 0 or math.isnan(sinr):
        raise DomainError(f"sinr must be nonnegative, got {sinr}")
    return math.log2(1.0 + sinr)


def sample_budget(tau: float, sinr_com: float, cfg: SystemConfig) -> SampleBudget:
    if tau < 0:
        raise DomainError("tau must be nonnegative")
    sensing_limit = tau / cfg.sensing_time
    comm_limit = cfg.bandwidth * tau * rate(sinr_com) / cfg.sample_volume
    return SampleBudget(sensing_limit, comm_limit, int(math.floor(min(sensing_limit, comm_limit))))


def classification_error(v: float, a: float, b: float) -> float:
    """Empirical error a * v**(-b). Undefined for fewer than one sample."""
    if not v >= 1:
        raise DomainError(f"error model needs at least one sample, got v={v}")
    if not (a > 0 and b > 0):
        raise DomainError("a and b must be positive")
    return a * v ** (-b)


def quality_gate(sinr_sen: float, eta: float) -> bool:
    """True when the echo is good enough for the sample to be usable."""
    return sinr_sen >= eta


def fit_error_model(points: Sequence[tuple[float, float]]) -> tuple[float, float]:
    """Least-squares fit of log E = log a - b log v.

    Returns ``(a, b)``. A non-positive ``b`` is allowed but triggers a warning,
    since the error would then not shrink with more data.
    """
    pts = np.asarray(points, dtype=float)
    if pts.ndim != 2 or pts.shape[0] < 2 or pts.shape[1] != 2:
        raise DomainError("need at least two (v, E) points")
    v, e = pts[:, 0], pts[:, 1]
    if np.any(v < 1) or np.any(e <= 0):
        raise DomainError("all v must be >= 1 and all E > 0")
    if np.all(v == v[0]):
        raise DomainError("degenerate fit: all v are equal")
    design = np.column_stack([np.ones_like(v), -np.log(v)])
    (log_a, b), *_ = np.linalg.lstsq(design, np.log(e), rcond=None)
    if b <= 0:
        warnings.warn(f"fitted exponent b={b:.4g} is not positive", RuntimeWarning, stacklevel=2)
    return float(math.exp(log_a)), float(b)
