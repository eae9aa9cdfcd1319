"""Per-phase ISAC beamforming via the Charnes-Cooper SDP, plus oracles.

For one task the design problem is

    max  |h^H f|^2 / (sigma^2 + |h^H w|^2)
    s.t. |g^H w|^2 / (sigma^2 + c) >= eta,   ||w||^2 + ||f||^2 <= P.

Lifting w, f to W, F and applying the Charnes-Cooper change of variables
(W' = xi W, F' = xi F) gives a linear SDP whose optimum is rank one, so the
beamformers are read off the principal eigenvectors.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import OracleNotApplicable
from .model import SystemConfig, as_vector, comm_sinr, sensing_sinr
from .sdp import SdpProblem, SdpSolution, SdpStatus, Tolerances, solve

RANK1_FAILURE = 1e-4


class BeamStatus(str, enum.Enum):
    OPTIMAL = "Optimal"
    INFEASIBLE = "Infeasible"
    NUMERICAL_FAILURE = "NumericalFailure"


@dataclass(frozen=True)
class BeamformerPair:
    w: np.ndarray
    f: np.ndarray

    @property
    def power_used(self) -> float:
        return float(np.vdot(self.w, self.w).real + np.vdot(self.f, self.f).real)


@dataclass
class BeamformOutcome:
    pair: BeamformerPair | None
    sinr_com: float
    sinr_sen: float
    rank1_defect: float
    status: BeamStatus
    sdp: SdpSolution | None = None
    w_lifted: np.ndarray | None = None  # W' as returned by the SDP
    f_lifted: np.ndarray | None = None
    xi: float = math.nan


def _ccp_problem(h, g, eta, noise, clutter, power) -> SdpProblem:
    n = h.shape[0]
    hh = np.outer(h, h.conj())
    gg = np.outer(g, g.conj())
    p = SdpProblem()
    p.add_block("W", n)
    p.add_block("F", n)
    p.add_scalar("xi")
    p.set_objective({"F": hh}, sense="max")
    p.add_constraint({"xi": noise, "W": hh}, "==", 1.0)
    p.add_constraint({"W": gg, "xi": -eta * (noise + clutter)}, ">=", 0.0)
    p.add_constraint({"W": np.eye(n), "F": np.eye(n), "xi": -power}, "<=", 0.0)
    return p


def build_ccp_sdp(h, g, eta: float, cfg: SystemConfig) -> SdpProblem:
    """The Charnes-Cooper SDP for one task, in the units of ``cfg``."""
    h = as_vector(h, cfg.num_antennas, "h")
    g = as_vector(g, cfg.num_antennas, "g")
    return _ccp_problem(h, g, eta, cfg.noise_power, cfg.clutter_power, cfg.max_power)


def _principal(mat: np.ndarray) -> tuple[np.ndarray, float]:
    """Principal eigenvector scaled by sqrt(eigenvalue), and lambda_2/lambda_1."""
    vals, vecs = np.linalg.eigh(mat)
    top = max(vals[-1], 0.0)
    vec = math.sqrt(top) * vecs[:, -1]
    defect = 0.0
    if mat.shape[0] > 1 and top > 0:
        defect = max(vals[-2], 0.0) / top
    return _fix_phase(vec), defect


def _fix_phase(v: np.ndarray) -> np.ndarray:
    mags = np.abs(v)
    if not np.any(mags > 0):
        return v
    first = int(np.argmax(mags > 1e-12 * mags.max()))
    return v * (abs(v[first]) / v[first])


def _mrc(h: np.ndarray, power: float) -> np.ndarray:
    return math.sqrt(power) * h / np.linalg.norm(h)


def solve_beamforming(h, g, eta: float, cfg: SystemConfig,
                      tol: Tolerances | None = None) -> BeamformOutcome:
    n = cfg.num_antennas
    h = as_vector(h, n, "h")
    g = as_vector(g, n, "g")
    noise, clutter, power = cfg.noise_power, cfg.clutter_power, cfg.max_power

    if eta == 0:
        pair = BeamformerPair(np.zeros(n, dtype=complex), _fix_phase(_mrc(h, power)))
        return BeamformOutcome(pair, comm_sinr(pair.f, pair.w, h, noise), 0.0, 0.0,
                               BeamStatus.OPTIMAL)

    # Normalise so that sigma^2 = P = 1 and the clutter folds into g; the raw
    # quantities (~1e-12 W) would wreck the interior-point scaling.
    h_n = h * math.sqrt(power / noise)
    g_n = g * math.sqrt(power / (noise + clutter))
    sol = solve(_ccp_problem(h_n, g_n, eta, 1.0, 0.0, 1.0), tol)
    if sol.status == SdpStatus.INFEASIBLE:
        return BeamformOutcome(None, math.nan, math.nan, math.nan, BeamStatus.INFEASIBLE, sol)

    w_lift, f_lift, xi = sol.block_values["W"], sol.block_values["F"], sol.scalar_values["xi"]
    if sol.status != SdpStatus.OPTIMAL or not xi > 0:
        return BeamformOutcome(None, math.nan, math.nan, math.nan, BeamStatus.NUMERICAL_FAILURE,
                               sol, w_lift, f_lift, xi)

    w_n, defect_w = _principal(w_lift / xi)
    f_n, defect_f = _principal(f_lift / xi)
    w_n, f_n = _restore_feasibility(w_n, f_n, g_n, eta)
    pair = BeamformerPair(math.sqrt(power) * w_n, math.sqrt(power) * f_n)
    defect = max(defect_w, defect_f)
    status = BeamStatus.OPTIMAL if defect <= RANK1_FAILURE else BeamStatus.NUMERICAL_FAILURE
    return BeamformOutcome(
        pair=pair,
        sinr_com=comm_sinr(pair.f, pair.w, h, noise),
        sinr_sen=sensing_sinr(pair.w, g, noise, clutter),
        rank1_defect=defect,
        status=status,
        sdp=sol,
        w_lifted=w_lift,
        f_lifted=f_lift,
        xi=xi,
    )


def _restore_feasibility(w, f, g, eta):
    """Remove solver-tolerance violations in normalised units (P = 1).

    The radar beam is stretched to meet the threshold exactly if it falls a
    hair short, and the data beam then takes whatever power is left.
    """
    sen = abs(np.vdot(g, w)) ** 2
    if 0 < sen < eta:
        w = w * math.sqrt(eta / sen)
    left = 1.0 - float(np.vdot(w, w).real)
    fn = float(np.linalg.norm(f))
    if fn > 0 and left > 0:
        f = f * (math.sqrt(left) / fn)
    return w, f


# ---------------------------------------------------------------------------
# oracles


def zf_oracle(h, g, eta: float, cfg: SystemConfig) -> tuple[float, bool]:
    """Zero-forcing radar beam plus MRC data beam, in closed form.

    The radar beam is steered along the part of g orthogonal to h, so it causes
    no interference at the server. Returns ``(sinr_com, zf_feasible)``; when the
    zero-forcing beam would need more than P, the value comes from
    :func:`grid_oracle` instead and the flag is False.

    This is a feasible design, hence a lower bound on the optimum. It is exact
    when g is orthogonal to h (or eta == 0); otherwise bending the radar beam
    slightly toward h trades second-order interference for first-order power
    savings and does strictly better.
    """
    n = cfg.num_antennas
    h = as_vector(h, n, "h")
    g = as_vector(g, n, "g")
    if n < 2:
        raise OracleNotApplicable("zero-forcing needs at least two antennas")
    h2 = float(np.vdot(h, h).real)
    g_perp = g - h * (np.vdot(h, g) / h2)
    gp2 = float(np.vdot(g_perp, g_perp).real)
    if gp2 <= 1e-12 * float(np.vdot(g, g).real):
        raise OracleNotApplicable("g is parallel to h")
    p_w = eta * (cfg.noise_power + cfg.clutter_power) / gp2
    if p_w <= cfg.max_power:
        return (cfg.max_power - p_w) * h2 / cfg.noise_power, True
    return grid_oracle(h, g, eta, cfg), False


def grid_oracle(h, g, eta: float, cfg: SystemConfig, resolution: int = 64,
                refine: bool = True) -> float:
    """Brute-force search over radar beams in span{h, g}.

    Only the projections h^H w, h^H f and g^H w enter the objective and the
    sensing constraint, so w can be restricted to span{h, g} and f to the
    direction of h without loss. The search runs over the radar power P_w and
    the direction (theta, phi) on a ``resolution``-interval grid, then once more
    on a grid of the same size spanning the neighbouring cells of the best
    point. Returns ``-inf`` when no grid point is feasible.
    """
    n = cfg.num_antennas
    h = as_vector(h, n, "h")
    g = as_vector(g, n, "g")
    h2 = float(np.vdot(h, h).real)
    u1 = h / math.sqrt(h2)
    g_perp = g - u1 * np.vdot(u1, g)
    gp = float(np.linalg.norm(g_perp))
    planar = gp > 1e-9 * float(np.linalg.norm(g))
    u2 = g_perp / gp if planar else np.zeros(n, dtype=complex)

    args = (complex(np.vdot(g, u1)), complex(np.vdot(g, u2)),
            complex(np.vdot(h, u1)), complex(np.vdot(h, u2)),
            h2, cfg.max_power, cfg.noise_power,
            eta * (cfg.noise_power + cfg.clutter_power))
    n_dir = resolution if planar else 0
    box = [(0.0, cfg.max_power, resolution), (0.0, math.pi / 2, n_dir), (0.0, 2 * math.pi, n_dir)]
    best, *point = _search(args, box)
    if refine and best > -math.inf:
        fine = []
        for axis, ((lo, hi, cells), centre) in enumerate(zip(box, point)):
            if cells == 0:
                fine.append((lo, hi, 0))
                continue
            step = (hi - lo) / cells
            if axis == 2 and point[1] in (box[1][0], box[1][1]):
                # at theta = 0 or pi/2 the phase is a global phase: keep all of it
                fine.append((lo, hi, resolution))
            elif axis == 2:  # phase wraps around
                fine.append((centre - step, centre + step, resolution))
            else:
                fine.append((max(lo, centre - step), min(hi, centre + step), resolution))
        fine_best, *_ = _search(args, fine)
        best = max(best, fine_best)
    return best


def _search(args, box):
    (pl, ph, pn), (tl, th, tn), (fl, fh, fn) = box
    return kernels.beam_grid_search(*args, pl, ph, pn, tl, th, tn, fl, fh, fn)
