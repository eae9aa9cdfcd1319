"""Min-max-error time allocation across ISAC phases.

With per-task sample rate pi_m (samples/s), giving phase m the time tau_m
yields pi_m * tau_m samples and error a_m (pi_m tau_m)^(-b_m). At the optimum
the whole budget is used and all errors equal a common level mu, so

    tau_m(mu) = (mu / a_m)^(-1/b_m) / pi_m,      sum_m tau_m(mu) = T,

and mu is found by bisection on that monotone sum.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import kernels
from .errors import DomainError
from .model import SystemConfig, rate

SENSING, COMMUNICATION, BOTH, SEQUENTIAL = "sensing", "communication", "both", "sequential"


@dataclass(frozen=True)
class RateProfile:
    """Per-task sample rates; ``pi_min`` is what the allocator uses."""

    pi_c: np.ndarray
    pi_s: float
    pi_min: np.ndarray
    binding: tuple[str, ...]

    @classmethod
    def isac(cls, pi_c: Sequence[float], pi_s: float) -> "RateProfile":
        """Simultaneous sensing and upload: the slower of the two limits."""
        pi_c = np.asarray(pi_c, dtype=float)
        _check_rates(pi_c, pi_s)
        binding = tuple(BOTH if pc == pi_s else (SENSING if pi_s < pc else COMMUNICATION)
                        for pc in pi_c)
        return cls(pi_c, float(pi_s), np.minimum(pi_c, pi_s), binding)

    @classmethod
    def sequential(cls, pi_c: Sequence[float], pi_s: float) -> "RateProfile":
        """Sense then upload: each sample costs 1/pi_s + 1/pi_c seconds."""
        pi_c = np.asarray(pi_c, dtype=float)
        _check_rates(pi_c, pi_s)
        return cls(pi_c, float(pi_s), 1.0 / (1.0 / pi_c + 1.0 / pi_s),
                   (SEQUENTIAL,) * len(pi_c))

    @classmethod
    def from_sinr(cls, sinr_com: Sequence[float], cfg: SystemConfig) -> "RateProfile":
        pi_c = [cfg.bandwidth * rate(s) / cfg.sample_volume for s in sinr_com]
        return cls.isac(pi_c, 1.0 / cfg.sensing_time)


def _check_rates(pi_c: np.ndarray, pi_s: float) -> None:
    if not (np.all(pi_c > 0) and np.all(np.isfinite(pi_c)) and 0 < pi_s < math.inf):
        raise DomainError("sample rates must be positive and finite")


@dataclass(frozen=True)
class TimeAllocation:
    tau: np.ndarray
    mu_star: float
    binding: tuple[str, ...]
    iterations: int = 0


def _params(cfg_or_ab) -> tuple[np.ndarray, np.ndarray]:
    if isinstance(cfg_or_ab, SystemConfig):
        return np.array(cfg_or_ab.error_a), np.array(cfg_or_ab.error_b)
    a, b = cfg_or_ab
    return np.asarray(a, dtype=float), np.asarray(b, dtype=float)


def tau_of_mu(mu: float, profile: RateProfile, cfg) -> np.ndarray:
    """Phase durations that bring every task's error down to exactly ``mu``.

    ``cfg`` is a :class:`SystemConfig` or an ``(a, b)`` pair of arrays.
    """
    if not mu > 0:
        raise DomainError(f"mu must be positive, got {mu}")
    a, b = _params(cfg)
    return (mu / a) ** (-1.0 / b) / profile.pi_min


def solve_time_allocation(profile: RateProfile, cfg, total_time: float | None = None,
                          rel_tol: float = 1e-10, max_iter: int = 500) -> TimeAllocation:
    """Bisection on the common error level so the durations fill the budget."""
    a, b = _params(cfg)
    if total_time is None:
        total_time = cfg.total_time
    if not total_time > 0:
        raise DomainError("total time must be positive")
    if len(a) != len(profile.pi_min):
        raise DomainError("profile and error parameters differ in task count")

    total = lambda mu: float(np.sum(tau_of_mu(mu, profile, (a, b))))

    # The task with the largest single-task error needs all of T on its own at
    # mu_lo, so sum(tau(mu_lo)) >= T. Walk mu_hi up until the sum drops below.
    mu_lo = float(np.max(a * (profile.pi_min * total_time) ** (-b)))
    while total(mu_lo) < total_time:  # guards against rounding only
        mu_lo *= 0.5
    mu_hi = 2.0 * mu_lo
    while total(mu_hi) > total_time:
        mu_lo, mu_hi = mu_hi, 2.0 * mu_hi

    it = 0
    mu = mu_hi
    for it in range(1, max_iter + 1):
        mu = math.sqrt(mu_lo * mu_hi)
        s = total(mu)
        if abs(s - total_time) <= rel_tol * total_time or (mu_hi - mu_lo) <= 1e-14 * mu_hi:
            break
        if s > total_time:
            mu_lo = mu
        else:
            mu_hi = mu
    # Absorb the bisection residual so the budget binds to rounding; the
    # errors move by at most b_m * rel_tol.
    tau = tau_of_mu(mu, profile, (a, b))
    tau = np.array([total_time]) if len(tau) == 1 else tau * (total_time / tau.sum())
    return TimeAllocation(tau, mu, profile.binding, it)


def max_error(tau: Sequence[float], profile: RateProfile, cfg) -> float:
    """Continuous min-max objective for a given time split."""
    a, b = _params(cfg)
    v = profile.pi_min * np.asarray(tau, dtype=float)
    with np.errstate(divide="ignore"):
        return float(np.max(a * v ** (-b)))


def simplex_grid_search(profile: RateProfile, cfg, total_time: float | None = None,
                        cells: int = 10_000) -> tuple[float, np.ndarray]:
    """Brute-force oracle: best max-error over the time simplex on a T/cells grid.

    Returns ``(best_error, tau)``.
    """
    a, b = _params(cfg)
    if total_time is None:
        total_time = cfg.total_time
    k = np.arange(cells + 1)
    tau_grid = total_time * k / cells
    with np.errstate(divide="ignore"):
        table = a[:, None] * (profile.pi_min[:, None] * tau_grid[None, :]) ** (-b[:, None])
    best, counts = kernels.simplex_minmax(table, cells)
    return float(best), total_time * np.asarray(counts) / cells


def sweep_remark(sinr_db: Sequence[float], t_s: Sequence[float], *,
                 a: Sequence[float] = (1.0, 2.0), b: Sequence[float] = (0.5, 1.0),
                 total_time: float = 200.0, bandwidth: float = 5e6,
                 sample_volume: float = 1e6) -> list[dict]:
    """Durations over a (SINR, t_S) grid for two tasks sharing one SINR.

    Rows carry ``sinr_db, t_s, tau_1, tau_2, mu_star`` in grid order (SINR
    outer, t_S inner).
    """
    rows = []
    for s_db in sinr_db:
        pi_c = bandwidth * rate(10.0 ** (s_db / 10.0)) / sample_volume
        for ts in t_s:
            profile = RateProfile.isac([pi_c] * len(a), 1.0 / ts)
            alloc = solve_time_allocation(profile, (a, b), total_time)
            rows.append(dict(sinr_db=float(s_db), t_s=float(ts), tau_1=float(alloc.tau[0]),
                             tau_2=float(alloc.tau[1]), mu_star=alloc.mu_star))
    return rows
