"""Small dense semidefinite programs.

Problems are stated over complex Hermitian (or real symmetric) PSD blocks and
nonnegative scalars, with linear objective and linear equality/inequality
constraints. Internally everything is mapped to the real standard form

    minimize <C, X>   s.t.  <A_i, X> = b_i,  X block-diagonal PSD

and solved with an infeasible-start primal-dual path-following method (HKM
search direction, Mehrotra predictor-corrector). Hermitian blocks use the real
embedding [[Re, -Im], [Im, Re]] with coefficients halved, so that
<emb(A)/2, emb(X)> = Re Tr(A X).
"""
from __future__ import annotations

import enum
import json
import logging
import math
from dataclasses import dataclass, field
from typing import Mapping, Union

import numpy as np

from .errors import DimensionError, DomainError, IsacError

log = logging.getLogger(__name__)

Coef = Union[float, np.ndarray]


class SdpStatus(str, enum.Enum):
    OPTIMAL = "Optimal"
    INFEASIBLE = "Infeasible"
    NUMERICAL_FAILURE = "NumericalFailure"


@dataclass(frozen=True)
class Tolerances:
    gap: float = 1e-8  # relative: |p - d| / (1 + |p| + |d|)
    feas: float = 1e-8
    max_iter: int = 200
    infeasibility_ratio: float = 1e8


@dataclass
class _Block:
    name: str
    size: int
    hermitian: bool


@dataclass
class _Constraint:
    coeffs: dict[str, Coef]
    sense: str
    rhs: float


class SdpProblem:
    """Builder for an SDP over named PSD blocks and nonnegative scalars.

    >>> p = SdpProblem()
    >>> p.add_block("F", 2)
    >>> p.set_objective({"F": np.diag([2.0, 1.0])}, sense="max")
    >>> p.add_constraint({"F": np.eye(2)}, "<=", 1.0)
    """

    def __init__(self):
        self.blocks: list[_Block] = []
        self.scalars: list[str] = []
        self.objective: dict[str, Coef] = {}
        self.sense = "max"
        self.constraints: list[_Constraint] = []

    def add_block(self, name: str, size: int, hermitian: bool = True) -> None:
        self._check_new(name)
        if size < 1:
            raise DimensionError("block size must be positive")
        self.blocks.append(_Block(name, int(size), hermitian))

    def add_scalar(self, name: str) -> None:
        self._check_new(name)
        self.scalars.append(name)

    def set_objective(self, coeffs: Mapping[str, Coef], sense: str = "max") -> None:
        if sense not in ("max", "min"):
            raise IsacError(f"objective sense must be 'max' or 'min', got {sense!r}")
        self.objective = dict(coeffs)
        self.sense = sense

    def add_constraint(self, coeffs: Mapping[str, Coef], sense: str, rhs: float) -> None:
        if sense not in ("==", "<=", ">="):
            raise IsacError(f"constraint sense must be one of ==, <=, >=; got {sense!r}")
        self.constraints.append(_Constraint(dict(coeffs), sense, float(rhs)))

    @property
    def names(self) -> list[str]:
        return [b.name for b in self.blocks] + self.scalars

    def _check_new(self, name: str) -> None:
        if name in self.names:
            raise IsacError(f"duplicate variable name {name!r}")


@dataclass
class SdpSolution:
    status: SdpStatus
    block_values: dict[str, np.ndarray] = field(default_factory=dict)
    scalar_values: dict[str, float] = field(default_factory=dict)
    objective_value: float = math.nan
    dual_value: float = math.nan
    duality_gap: float = math.nan  # relative, same measure as Tolerances.gap
    primal_infeasibility: float = math.nan
    dual_infeasibility: float = math.nan
    multipliers: np.ndarray | None = None
    iterations: int = 0
    info: str = ""


def hermitian_to_real_embedding(a, atol: float = 1e-12) -> np.ndarray:
    """Map Hermitian A (n x n) to the real symmetric [[Re A, -Im A], [Im A, Re A]]."""
    a = np.asarray(a)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DimensionError(f"expected a square matrix, got shape {a.shape}")
    scale = max(1.0, float(np.max(np.abs(a)))) if a.size else 1.0
    if np.max(np.abs(a - a.conj().T), initial=0.0) > atol * scale:
        raise DomainError("matrix is not Hermitian")
    re, im = a.real.astype(float), a.imag.astype(float)
    return np.block([[re, -im], [im, re]])


def real_embedding_to_hermitian(y: np.ndarray) -> np.ndarray:
    """Inverse of the embedding, projecting onto the embedded structure first."""
    n = y.shape[0] // 2
    y11, y12, y21, y22 = y[:n, :n], y[:n, n:], y[n:, :n], y[n:, n:]
    x = 0.5 * (y11 + y22) + 0.5j * (y21 - y12)
    return 0.5 * (x + x.conj().T)


# ---------------------------------------------------------------------------
# standard-form assembly


@dataclass
class _Standard:
    sizes: list[int]
    c: list[np.ndarray]  # per block, (n_k, n_k)
    a: list[np.ndarray]  # per block, (m, n_k, n_k)
    b: np.ndarray
    sign: float  # +1 for min, -1 for max (user objective = sign * <C, X>)


def _coef_matrix(coef: Coef, block: _Block) -> np.ndarray:
    mat = np.atleast_2d(np.asarray(coef))
    if mat.shape != (block.size, block.size):
        raise DimensionError(
            f"coefficient for block {block.name!r} has shape {mat.shape}, expected {(block.size,) * 2}")
    if block.hermitian:
        return 0.5 * hermitian_to_real_embedding(mat, atol=1e-10)
    if np.iscomplexobj(mat) and np.any(mat.imag != 0):
        raise DomainError(f"complex coefficient for real block {block.name!r}")
    mat = mat.real.astype(float)
    if np.max(np.abs(mat - mat.T), initial=0.0) > 1e-10 * max(1.0, np.max(np.abs(mat))):
        raise DomainError(f"coefficient for block {block.name!r} is not symmetric")
    return 0.5 * (mat + mat.T)


def _assemble(p: SdpProblem) -> _Standard:
    if not p.constraints:
        raise IsacError("problem has no constraints")
    known = set(p.names)
    for coeffs in [p.objective] + [c.coeffs for c in p.constraints]:
        unknown = set(coeffs) - known
        if unknown:
            raise IsacError(f"unknown variables {sorted(unknown)}")

    sizes = [2 * b.size if b.hermitian else b.size for b in p.blocks]
    sizes += [1] * len(p.scalars)
    slack_rows = [i for i, c in enumerate(p.constraints) if c.sense != "=="]
    sizes += [1] * len(slack_rows)
    m = len(p.constraints)
    a = [np.zeros((m, n, n)) for n in sizes]
    c = [np.zeros((n, n)) for n in sizes]
    sign = 1.0 if p.sense == "min" else -1.0

    def place(target: list[np.ndarray], coeffs: Mapping[str, Coef], scale: float, row=None):
        for k, blk in enumerate(p.blocks):
            if blk.name in coeffs:
                mat = scale * _coef_matrix(coeffs[blk.name], blk)
                if row is None:
                    target[k] += mat
                else:
                    target[k][row] += mat
        for j, name in enumerate(p.scalars):
            if name in coeffs:
                k = len(p.blocks) + j
                val = float(np.real(np.asarray(coeffs[name]).reshape(())))
                if row is None:
                    target[k][0, 0] += scale * val
                else:
                    target[k][row, 0, 0] += scale * val

    place(c, p.objective, sign)
    for i, con in enumerate(p.constraints):
        place(a, con.coeffs, 1.0, row=i)
    first_slack = len(p.blocks) + len(p.scalars)
    for j, i in enumerate(slack_rows):
        a[first_slack + j][i, 0, 0] = 1.0 if p.constraints[i].sense == "<=" else -1.0
    b = np.array([con.rhs for con in p.constraints])
    return _Standard(sizes, c, a, b, sign)


# ---------------------------------------------------------------------------
# interior-point core


def _inner(x: list[np.ndarray], y: list[np.ndarray]) -> float:
    return float(sum(np.sum(xk * yk) for xk, yk in zip(x, y)))


def _op(a: list[np.ndarray], x: list[np.ndarray]) -> np.ndarray:
    return sum(np.einsum("ikl,kl->i", ak, xk) for ak, xk in zip(a, x))


def _adj(a: list[np.ndarray], y: np.ndarray) -> list[np.ndarray]:
    return [np.einsum("i,ikl->kl", y, ak) for ak in a]


def _sym(x: np.ndarray) -> np.ndarray:
    return 0.5 * (x + x.T)


def _norm(x: list[np.ndarray]) -> float:
    return math.sqrt(_inner(x, x))


def _max_step(x: list[np.ndarray], dx: list[np.ndarray]) -> float:
    """Largest alpha with x + alpha*dx PSD (x assumed positive definite)."""
    alpha = math.inf
    for xk, dk in zip(x, dx):
        if xk.shape[0] == 1:
            if dk[0, 0] < 0:
                alpha = min(alpha, -xk[0, 0] / dk[0, 0])
            continue
        lower = np.linalg.cholesky(xk)
        linv = np.linalg.inv(lower)
        lam = np.linalg.eigvalsh(_sym(linv @ dk @ linv.T))[0]
        if lam < 0:
            alpha = min(alpha, -1.0 / lam)
    return alpha


def _solve_standard(std: _Standard, tol: Tolerances):
    a, c, b, sizes = std.a, std.c, std.b, std.sizes
    m, n_total = b.shape[0], sum(sizes)
    a_norms = np.sqrt(sum(np.sum(ak**2, axis=(1, 2)) for ak in a))
    if np.any(a_norms == 0):
        raise IsacError("a constraint has all-zero coefficients")
    c_norm, b_norm = _norm(c), float(np.linalg.norm(b))

    xi = max(10.0, math.sqrt(n_total), n_total * float(np.max((1 + np.abs(b)) / (1 + a_norms))))
    zeta = max(10.0, math.sqrt(n_total), c_norm, float(np.max(a_norms)))
    x = [xi * np.eye(n) for n in sizes]
    s = [zeta * np.eye(n) for n in sizes]
    y = np.zeros(m)

    status, info, it = SdpStatus.NUMERICAL_FAILURE, "iteration limit reached", 0
    stats = {}
    for it in range(tol.max_iter + 1):
        rp = b - _op(a, x)
        rd = [ck - atk - sk for ck, atk, sk in zip(c, _adj(a, y), s)]
        pobj, dobj = _inner(c, x), float(b @ y)
        relgap = abs(pobj - dobj) / (1 + abs(pobj) + abs(dobj))
        pinf = float(np.linalg.norm(rp)) / (1 + b_norm)
        dinf = _norm(rd) / (1 + c_norm)
        mu = _inner(x, s) / n_total
        stats = dict(iter=it, pobj=pobj, dobj=dobj, gap=relgap, pinf=pinf, dinf=dinf, mu=mu)
        if log.isEnabledFor(logging.DEBUG):
            log.debug(json.dumps(stats))

        if relgap <= tol.gap and pinf <= tol.feas and dinf <= tol.feas:
            status, info = SdpStatus.OPTIMAL, "converged"
            break
        # primal infeasibility: dual ray y with -A^T y PSD and b^T y > 0
        aty_s = _norm([atk + sk for atk, sk in zip(_adj(a, y), s)])
        if pinf > tol.feas and dobj > tol.infeasibility_ratio * max(aty_s, 1e-300):
            status, info = SdpStatus.INFEASIBLE, "primal infeasible (dual ray)"
            break
        # dual infeasibility: primal ray with A(X) = 0 and <C, X> < 0
        ax = float(np.linalg.norm(_op(a, x)))
        if dinf > tol.feas and -pobj > tol.infeasibility_ratio * max(ax, 1e-300):
            status, info = SdpStatus.INFEASIBLE, "dual infeasible (primal ray)"
            break
        if it == tol.max_iter:
            break

        try:
            sinv = [np.linalg.inv(sk) for sk in s]
            # Schur complement M_ij = Tr(A_i X A_j S^-1)
            schur = np.zeros((m, m))
            xas = []
            for ak, xk, sik in zip(a, x, sinv):
                t = np.einsum("kl,jlp,pq->jkq", xk, ak, sik)  # X A_j S^-1
                xas.append(t)
                schur += np.einsum("ikl,jlk->ij", ak, t)
            schur = 0.5 * (schur + schur.T)
            chol = _factor(schur)
        except np.linalg.LinAlgError:
            info = "linear algebra failure"
            break

        def direction(g: list[np.ndarray]):
            corr = [xk @ rk @ sik for xk, rk, sik in zip(x, rd, sinv)]
            rhs = rp - _op(a, g) + _op(a, corr)
            dy = _back(chol, rhs)
            ds = [rk - atk for rk, atk in zip(rd, _adj(a, dy))]
            dx = [gk - _sym(xk @ dsk @ sik) for gk, xk, dsk, sik in zip(g, x, ds, sinv)]
            return dx, dy, ds

        # predictor
        dxa, dya, dsa = direction([-xk for xk in x])
        ap = min(1.0, _max_step(x, dxa))
        ad = min(1.0, _max_step(s, dsa))
        mu_aff = _inner([xk + ap * d for xk, d in zip(x, dxa)],
                        [sk + ad * d for sk, d in zip(s, dsa)]) / n_total
        sigma = min(1.0, (mu_aff / mu) ** 3) if mu > 0 else 0.0
        # corrector
        g = [_sym(sigma * mu * sik - xk - dxk @ dsk @ sik)
             for sik, xk, dxk, dsk in zip(sinv, x, dxa, dsa)]
        dx, dy, ds = direction(g)
        gamma = 0.9 + 0.09 * min(ap, ad)
        ap = min(1.0, gamma * _max_step(x, dx))
        ad = min(1.0, gamma * _max_step(s, ds))
        if ap < 1e-12 and ad < 1e-12:
            info = "step length collapsed"
            break
        x = [_sym(xk + ap * d) for xk, d in zip(x, dx)]
        y = y + ad * dy
        s = [_sym(sk + ad * d) for sk, d in zip(s, ds)]

    return status, info, it, x, y, s, stats


def _factor(mat: np.ndarray):
    try:
        return ("chol", np.linalg.cholesky(mat))
    except np.linalg.LinAlgError:
        return ("lstsq", mat)


def _back(factor, rhs: np.ndarray) -> np.ndarray:
    kind, mat = factor
    if kind == "chol":
        z = np.linalg.solve(mat, rhs)
        return np.linalg.solve(mat.T, z)
    return np.linalg.lstsq(mat, rhs, rcond=None)[0]


def solve(p: SdpProblem, tol: Tolerances | None = None) -> SdpSolution:
    """Solve ``p``. Non-convergence is reported through ``status``, not raised."""
    tol = tol or Tolerances()
    std = _assemble(p)
    status, info, iters, x, y, s, stats = _solve_standard(std, tol)

    blocks = {}
    for k, blk in enumerate(p.blocks):
        blocks[blk.name] = real_embedding_to_hermitian(x[k]) if blk.hermitian else _sym(x[k])
    offset = len(p.blocks)
    scalars = {name: float(x[offset + j][0, 0]) for j, name in enumerate(p.scalars)}
    return SdpSolution(
        status=status,
        block_values=blocks,
        scalar_values=scalars,
        objective_value=std.sign * stats["pobj"],
        dual_value=std.sign * stats["dobj"],
        duality_gap=stats["gap"],
        primal_infeasibility=stats["pinf"],
        dual_infeasibility=stats["dinf"],
        multipliers=std.sign * y,
        iterations=iters,
        info=info,
    )
