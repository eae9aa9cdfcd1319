"""End-to-end ISAC design, the sequential baseline, and comparison sweeps."""
from __future__ import annotations

import csv
import dataclasses
import io
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Iterable, Sequence, TextIO

import numpy as np

from .beamform import BeamformOutcome, BeamformerPair, BeamStatus, solve_beamforming
from .channels import ChannelSet
from .errors import DomainError, InfeasibleTaskError, IsacError
from .model import SystemConfig, classification_error, rate, sample_budget
from .timealloc import COMMUNICATION, RateProfile, solve_time_allocation

log = logging.getLogger(__name__)

MODES = ("equal_samples", "equal_time", "equal_error")
SENSING_DOMINANT, COMM_DOMINANT, MIXED = "SensingDominant", "CommDominant", "Mixed"

# sweep parameter -> SystemConfig field (None: not a config field)
SWEEP_PARAMS = {
    "t_s": "sensing_time",
    "B": "bandwidth",
    "P": "max_power",
    "T": "total_time",
    "target_error": None,
}
_ALIASES = {"t_S": "t_s", "ts": "t_s", "sensing_time": "t_s", "b": "B", "bandwidth": "B",
            "p": "P", "max_power": "P", "t": "T", "total_time": "T"}

SWEEP_COLUMNS = ("param", "value", "isac_time_s", "conv_time_s", "gain_measured",
                 "gain_analytic", "regime", "max_err_isac", "max_err_conv")


@dataclass
class PhaseSolution:
    task: int
    pair: BeamformerPair
    tau: float
    sinr_com: float
    sinr_sen: float
    rate: float
    v: int
    error: float  # inf when no sample was collected
    binding: str
    rank1_defect: float


@dataclass
class IsacSolution:
    phases: list[PhaseSolution]
    mu_star: float  # continuous min-max error; nan when not from the allocator
    profile: RateProfile

    @property
    def total_time(self) -> float:
        return float(sum(p.tau for p in self.phases))

    @property
    def max_error(self) -> float:
        return max(p.error for p in self.phases)

    @property
    def samples(self) -> list[int]:
        return [p.v for p in self.phases]


@dataclass
class ConventionalReport:
    mrc_rate: float  # bit/s/Hz at full power, no sensing interference
    per_sample_time: float  # t_S + D / (B R_mrc)
    samples: list[int]
    sensing_times: list[float]
    comm_times: list[float]
    max_error: float

    @property
    def total_time(self) -> float:
        return float(sum(self.sensing_times) + sum(self.comm_times))


@dataclass
class RunReport:
    mode: str
    isac: IsacSolution
    conventional: ConventionalReport
    isac_time: float
    conv_time: float
    gain_measured: float
    gain_analytic: float
    regime: str
    target_error: float | None = None
    notes: list[str] = field(default_factory=list)

    @property
    def max_err_isac(self) -> float:
        return self.isac.max_error

    @property
    def max_err_conv(self) -> float:
        return self.conventional.max_error


# ---------------------------------------------------------------------------
# building blocks


def design_beamformers(cfg: SystemConfig, channels: ChannelSet) -> list[BeamformOutcome]:
    """Step I: one independent beamforming problem per task."""
    if len(channels.g) != cfg.num_tasks:
        raise DomainError("channel set and config disagree on the number of tasks")
    outcomes = []
    for m, (g, eta) in enumerate(zip(channels.g, cfg.eta)):
        out = solve_beamforming(channels.h, g, eta, cfg)
        if out.status == BeamStatus.INFEASIBLE:
            raise InfeasibleTaskError(m, f"task {m}: sensing threshold {eta:.4g} unreachable "
                                         f"with power {cfg.max_power:.4g} W")
        if out.status != BeamStatus.OPTIMAL:
            raise IsacError(f"task {m}: beamforming failed ({out.status.value}, "
                            f"rank-1 defect {out.rank1_defect:.3g})")
        outcomes.append(out)
    return outcomes


def _profile(cfg: SystemConfig, outcomes: Sequence[BeamformOutcome]) -> RateProfile:
    return RateProfile.from_sinr([o.sinr_com for o in outcomes], cfg)


def _error_or_inf(v: int, a: float, b: float) -> float:
    return classification_error(v, a, b) if v >= 1 else math.inf


def _phase(cfg, m, out, tau, v, binding) -> PhaseSolution:
    return PhaseSolution(
        task=m, pair=out.pair, tau=float(tau), sinr_com=out.sinr_com, sinr_sen=out.sinr_sen,
        rate=rate(out.sinr_com), v=int(v),
        error=_error_or_inf(v, cfg.error_a[m], cfg.error_b[m]),
        binding=binding, rank1_defect=out.rank1_defect)


def run_isac(cfg: SystemConfig, channels: ChannelSet,
             outcomes: Sequence[BeamformOutcome] | None = None) -> IsacSolution:
    """Beamforming per task, then min-max time allocation over the budget T.

    Sample counts are floored only here, after the continuous allocation.
    """
    outcomes = outcomes if outcomes is not None else design_beamformers(cfg, channels)
    profile = _profile(cfg, outcomes)
    alloc = solve_time_allocation(profile, cfg)
    phases = []
    for m, (out, tau) in enumerate(zip(outcomes, alloc.tau)):
        v = sample_budget(tau, out.sinr_com, cfg).v
        phases.append(_phase(cfg, m, out, tau, v, profile.binding[m]))
    return IsacSolution(phases, alloc.mu_star, profile)


def isac_for_samples(cfg: SystemConfig, outcomes: Sequence[BeamformOutcome],
                     samples: Sequence[int]) -> IsacSolution:
    """ISAC phases just long enough to collect ``samples`` (no time budget)."""
    profile = _profile(cfg, outcomes)
    phases = [_phase(cfg, m, out, v / profile.pi_min[m], v, profile.binding[m])
              for m, (out, v) in enumerate(zip(outcomes, samples))]
    return IsacSolution(phases, math.nan, profile)


def mrc_rate(cfg: SystemConfig, h) -> float:
    h = np.asarray(h)
    return rate(cfg.max_power * float(np.vdot(h, h).real) / cfg.noise_power)


def sequential_sample_time(cfg: SystemConfig, h) -> float:
    return cfg.sensing_time + cfg.sample_volume / (cfg.bandwidth * mrc_rate(cfg, h))


def run_conventional(cfg: SystemConfig, channels: ChannelSet, *,
                     samples: Sequence[int] | None = None,
                     total_time: float | None = None) -> ConventionalReport:
    """Sense-then-upload baseline with a full-power MRC uplink.

    Pass ``samples`` for the time needed to collect them, or ``total_time`` for
    the min-max error split of that budget (same allocator as ISAC, at the
    sequential per-sample rate).
    """
    if (samples is None) == (total_time is None):
        raise DomainError("pass exactly one of samples or total_time")
    r_mrc = mrc_rate(cfg, channels.h)
    comm_per_sample = cfg.sample_volume / (cfg.bandwidth * r_mrc)
    per_sample = cfg.sensing_time + comm_per_sample
    if samples is None:
        pi_c = np.full(cfg.num_tasks, 1.0 / comm_per_sample)
        profile = RateProfile.sequential(pi_c, 1.0 / cfg.sensing_time)
        alloc = solve_time_allocation(profile, cfg, total_time)
        samples = [int(math.floor(t / per_sample)) for t in alloc.tau]
    samples = [int(v) for v in samples]
    errors = [_error_or_inf(v, a, b) for v, a, b in zip(samples, cfg.error_a, cfg.error_b)]
    return ConventionalReport(
        mrc_rate=r_mrc,
        per_sample_time=per_sample,
        samples=samples,
        sensing_times=[v * cfg.sensing_time for v in samples],
        comm_times=[v * comm_per_sample for v in samples],
        max_error=max(errors),
    )


def gain_from_ratio(x: float) -> float:
    """ISAC gain 1/(x + 1) where x = sensing time / upload time per sample."""
    return 1.0 / (x + 1.0)


def isac_gain_analytic(cfg: SystemConfig, h) -> float:
    """Closed-form gain when every phase is sensing-bound."""
    x = cfg.sensing_time * cfg.bandwidth * mrc_rate(cfg, h) / cfg.sample_volume
    return gain_from_ratio(x)


def classify_regime(profile: RateProfile) -> str:
    comm = [b == COMMUNICATION for b in profile.binding]
    if not any(comm):
        return SENSING_DOMINANT
    return COMM_DOMINANT if all(comm) else MIXED


def samples_for_error(target: float, cfg: SystemConfig) -> list[int]:
    """Fewest integer samples bringing each task's error to ``target`` or below."""
    if not target > 0:
        raise DomainError("target error must be positive")
    out = []
    for a, b in zip(cfg.error_a, cfg.error_b):
        v = max(1, math.ceil((target / a) ** (-1.0 / b) * (1 - 1e-12)))
        while a * v ** (-b) > target:
            v += 1
        out.append(v)
    return out


def compare(cfg: SystemConfig, channels: ChannelSet, mode: str = "equal_samples",
            target_error: float | None = None,
            outcomes: Sequence[BeamformOutcome] | None = None) -> RunReport:
    """ISAC vs sequential sensing-then-upload.

    equal_samples: ISAC uses budget T; the baseline collects the same samples.
    equal_time:    both use budget T; compare errors.
    equal_error:   both collect just enough samples for ``target_error``.

    ``gain_measured`` is always 1 - isac_time / conv_time for the same sample
    counts (ISAC's own counts in the first two modes).
    """
    if mode not in MODES:
        raise DomainError(f"unknown mode {mode!r}; expected one of {MODES}")
    outcomes = outcomes if outcomes is not None else design_beamformers(cfg, channels)

    if mode == "equal_error":
        if target_error is None:
            raise DomainError("equal_error mode needs a target error")
        v = samples_for_error(target_error, cfg)
        isac = isac_for_samples(cfg, outcomes, v)
    else:
        isac = run_isac(cfg, channels, outcomes)
        v = isac.samples

    matched = run_conventional(cfg, channels, samples=v)
    isac_needed = float(sum(vm / pm for vm, pm in zip(v, isac.profile.pi_min)))
    gain = 1.0 - isac_needed / matched.total_time if matched.total_time > 0 else math.nan

    if mode == "equal_time":
        conventional = run_conventional(cfg, channels, total_time=cfg.total_time)
        isac_time = conv_time = cfg.total_time
    else:
        conventional = matched
        isac_time, conv_time = isac_needed, matched.total_time

    return RunReport(
        mode=mode,
        isac=isac,
        conventional=conventional,
        isac_time=isac_time,
        conv_time=conv_time,
        gain_measured=gain,
        gain_analytic=isac_gain_analytic(cfg, channels.h),
        regime=classify_regime(isac.profile),
        target_error=target_error,
    )


# ---------------------------------------------------------------------------
# sweeps


def canonical_param(name: str) -> str:
    name = _ALIASES.get(name, name)
    if name not in SWEEP_PARAMS:
        raise DomainError(f"unknown sweep parameter {name!r}; expected one of {sorted(SWEEP_PARAMS)}")
    return name


def _sweep_point(args) -> dict:
    cfg, channels, param, value, mode, target_error = args
    if param == "target_error":
        target_error = value
    else:
        cfg = dataclasses.replace(cfg, **{SWEEP_PARAMS[param]: value})
    rep = compare(cfg, channels, mode, target_error=target_error)
    return sweep_row(param, value, rep)


def sweep_row(param: str, value: float, rep: RunReport) -> dict:
    return dict(param=param, value=float(value), isac_time_s=rep.isac_time,
                conv_time_s=rep.conv_time, gain_measured=rep.gain_measured,
                gain_analytic=rep.gain_analytic, regime=rep.regime,
                max_err_isac=rep.max_err_isac, max_err_conv=rep.max_err_conv)


def sweep(cfg: SystemConfig, channels: ChannelSet, param: str, grid: Iterable[float],
          mode: str = "equal_samples", target_error: float | None = None,
          jobs: int = 1) -> list[dict]:
    """One :func:`compare` row per grid value, in grid order."""
    param = canonical_param(param)
    if mode not in MODES:
        raise DomainError(f"unknown mode {mode!r}; expected one of {MODES}")
    if param == "target_error" and mode != "equal_error":
        raise DomainError("sweeping target_error requires mode equal_error")
    tasks = [(cfg, channels, param, float(x), mode, target_error) for x in grid]
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(_sweep_point, tasks))
    return [_sweep_point(t) for t in tasks]


def write_sweep_csv(rows: Sequence[dict], out: TextIO) -> None:
    writer = csv.DictWriter(out, fieldnames=SWEEP_COLUMNS, lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow({k: (repr(v) if isinstance(v, float) else v) for k, v in row.items()})


def sweep_csv(rows: Sequence[dict]) -> str:
    buf = io.StringIO()
    write_sweep_csv(rows, buf)
    return buf.getvalue()


# ---------------------------------------------------------------------------
# serialisation


def _num(x: float):
    return None if x is None or not math.isfinite(x) else float(x)


def _vec(v: np.ndarray) -> list[list[float]]:
    return [[float(z.real), float(z.imag)] for z in v]


def report_to_dict(rep: RunReport) -> dict:
    isac = rep.isac
    return {
        "mode": rep.mode,
        "regime": rep.regime,
        "gain_measured": _num(rep.gain_measured),
        "gain_analytic": _num(rep.gain_analytic),
        "target_error": _num(rep.target_error),
        "isac": {
            "total_time_s": _num(isac.total_time),
            "time_for_samples_s": _num(rep.isac_time),
            "mu_star": _num(isac.mu_star),
            "max_error": _num(isac.max_error),
            "phases": [
                {
                    "task": p.task,
                    "tau_s": _num(p.tau),
                    "sinr_com": _num(p.sinr_com),
                    "sinr_sen": _num(p.sinr_sen),
                    "rate_bps_hz": _num(p.rate),
                    "samples": p.v,
                    "error": _num(p.error),
                    "binding": p.binding,
                    "rank1_defect": _num(p.rank1_defect),
                    "power_w": _num(p.pair.power_used),
                    "w": _vec(p.pair.w),
                    "f": _vec(p.pair.f),
                }
                for p in isac.phases
            ],
        },
        "conventional": {
            "mrc_rate_bps_hz": _num(rep.conventional.mrc_rate),
            "per_sample_time_s": _num(rep.conventional.per_sample_time),
            "samples": rep.conventional.samples,
            "sensing_times_s": [_num(t) for t in rep.conventional.sensing_times],
            "comm_times_s": [_num(t) for t in rep.conventional.comm_times],
            "total_time_s": _num(rep.conventional.total_time),
            "max_error": _num(rep.conventional.max_error),
        },
        "isac_time_s": _num(rep.isac_time),
        "conv_time_s": _num(rep.conv_time),
    }
