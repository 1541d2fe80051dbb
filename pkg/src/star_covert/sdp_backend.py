"""
Small dense semidefinite programs over complex Hermitian and real symmetric
matrix blocks, plus scalar variables, with linear trace objectives and constraints.

Problems are built from :py:class:`Block`, :py:class:`ScalarVariable`,
:py:class:`LinearFunctional` and :py:class:`Constraint` objects. The built-in
backend embeds complex blocks into real symmetric ones (see :py:func:`realify`)
and runs a primal-dual path-following method with Nesterov-Todd scaling and a
Mehrotra predictor-corrector step.
"""

import dataclasses
import enum
import json
import logging
import math
import numpy as np
import numpy.typing as npt
import scipy.linalg

from star_covert._errors import ConfigurationError
from typing import Any, Dict, List, Mapping, Optional, Sequence, Tuple

try:
    from typing import Protocol
except ImportError:  # pragma: no cover
    from typing_extensions import Protocol  # type: ignore[assignment]


_logger = logging.getLogger("star_covert")

Matrix = npt.NDArray[Any]
RealArray = npt.NDArray[np.float64]

_HERMITIAN_TOL = 1e-12


class Relation(enum.Enum):
    LE = "<="
    GE = ">="
    EQ = "=="


class Sense(enum.Enum):
    MINIMIZE = "min"
    MAXIMIZE = "max"


class SolverStatus(enum.Enum):
    OPTIMAL = "optimal"
    INFEASIBLE = "infeasible"
    MAX_ITERS = "max_iters"


@dataclasses.dataclass(frozen=True)
class Block:
    name: str
    dim: int
    is_complex: bool = True


@dataclasses.dataclass(frozen=True)
class ScalarVariable:
    name: str
    lower: Optional[float] = None
    """Lower bound; ``None`` leaves the variable free"""


@dataclasses.dataclass(frozen=True)
class LinearFunctional:
    """``sum_j Re Tr(A_j X_j) + sum_s c_s s + constant``"""

    blocks: Mapping[str, Matrix] = dataclasses.field(default_factory=dict)
    scalars: Mapping[str, float] = dataclasses.field(default_factory=dict)
    constant: float = 0.0

    def evaluate(self, block_values: Mapping[str, Matrix], scalar_values: Mapping[str, float]) -> float:
        value = self.constant
        for name, coefficient in self.blocks.items():
            value += float(np.real(np.sum(coefficient * block_values[name].T)))
        for name, coefficient in self.scalars.items():
            value += coefficient * scalar_values[name]
        return value


@dataclasses.dataclass(frozen=True)
class Constraint:
    functional: LinearFunctional
    relation: Relation
    rhs: float
    name: str

    def slack(self, block_values: Mapping[str, Matrix], scalar_values: Mapping[str, float]) -> float:
        """Signed distance to the boundary; negative when violated (equalities give ``-|residual|``)."""
        value = self.functional.evaluate(block_values, scalar_values)
        if self.relation is Relation.LE:
            return self.rhs - value
        if self.relation is Relation.GE:
            return value - self.rhs
        return -abs(value - self.rhs)


@dataclasses.dataclass(frozen=True)
class SdpProblem:
    blocks: Tuple[Block, ...]
    scalars: Tuple[ScalarVariable, ...]
    objective: LinearFunctional
    sense: Sense
    constraints: Tuple[Constraint, ...]

    def __post_init__(self) -> None:
        dims = {block.name: block for block in self.blocks}
        if len(dims) != len(self.blocks):
            raise ValueError("block names must be unique")
        scalar_names = {scalar.name for scalar in self.scalars}
        for label, functional in [("objective", self.objective)] + [(c.name, c.functional) for c in self.constraints]:
            for name, coefficient in functional.blocks.items():
                if name not in dims:
                    raise ValueError(f"{label} refers to unknown block {name!r}")
                block = dims[name]
                if coefficient.shape != (block.dim, block.dim):
                    raise ValueError(f"{label}: coefficient for {name!r} has shape {coefficient.shape}")
                scale = max(1.0, float(np.abs(coefficient).max(initial=0.0)))
                if np.abs(coefficient - coefficient.conj().T).max(initial=0.0) > _HERMITIAN_TOL * scale * block.dim:
                    raise ValueError(f"{label}: coefficient for {name!r} is not Hermitian")
                if not block.is_complex and np.abs(np.imag(coefficient)).max(initial=0.0) > 0:
                    raise ValueError(f"{label}: real block {name!r} has a complex coefficient")
            for name in functional.scalars:
                if name not in scalar_names:
                    raise ValueError(f"{label} refers to unknown scalar {name!r}")

    def evaluate_objective(self, block_values: Mapping[str, Matrix], scalar_values: Mapping[str, float]) -> float:
        return self.objective.evaluate(block_values, scalar_values)


@dataclasses.dataclass(frozen=True)
class SdpSolution:
    block_values: Dict[str, Matrix]
    scalar_values: Dict[str, float]
    objective_value: float
    status: SolverStatus
    duality_gap: float
    """Relative gap ``|p - d| / (1 + |p| + |d|)``"""
    primal_residual: float = math.nan
    dual_residual: float = math.nan
    iterations: int = 0
    dual_values: Dict[str, float] = dataclasses.field(default_factory=dict)
    infeasible_constraints: Tuple[str, ...] = ()


@dataclasses.dataclass(frozen=True)
class IpmSettings:
    tolerance: float = 1e-8
    max_iters: int = 100
    step_fraction: float = 0.98
    accept_gap: float = 1e-6
    """Relative gap accepted when progress stalls before reaching ``tolerance``"""


def embed_hermitian(matrix: Matrix) -> RealArray:
    """
    ``[[Re X, -Im X], [Im X, Re X]]``

    >>> embed_hermitian(np.array([[1.0, 1j], [-1j, 1.0]])).astype(int).tolist()
    [[1, 0, 0, -1], [0, 1, 1, 0], [0, 1, 1, 0], [-1, 0, 0, 1]]
    """
    re, im = np.real(matrix), np.imag(matrix)
    return np.block([[re, -im], [im, re]])


def extract_hermitian(embedded: RealArray) -> Matrix:
    """Inverse of :py:func:`embed_hermitian`, averaging the redundant quadrants."""
    n = embedded.shape[0] // 2
    x11, x12 = embedded[:n, :n], embedded[:n, n:]
    x21, x22 = embedded[n:, :n], embedded[n:, n:]
    return (x11 + x22) / 2.0 + 1j * (x21 - x12) / 2.0


@dataclasses.dataclass(frozen=True)
class RealSdp:
    """
    A problem in the real standard form

        minimize    sum_j <C_j, X_j> + c^T x
        subject to  sum_j <A_ij, X_j> + a_i^T x = b_i,  X_j PSD,  x >= 0

    together with the maps back to the problem it came from.
    """

    dims: Tuple[int, ...]
    c_blocks: Tuple[RealArray, ...]
    a_blocks: Tuple[RealArray, ...]
    """One ``m x n_j x n_j`` stack per block"""
    c_lp: RealArray
    a_lp: RealArray
    b: RealArray
    objective_sign: float
    objective_offset: float
    source: SdpProblem
    scalar_columns: Mapping[str, Tuple[Tuple[int, float], ...]]
    scalar_offsets: Mapping[str, float]

    def recover(self, x_blocks: Sequence[RealArray], x_lp: RealArray) -> Tuple[Dict[str, Matrix], Dict[str, float]]:
        block_values: Dict[str, Matrix] = {}
        for block, value in zip(self.source.blocks, x_blocks):
            value = (value + value.T) / 2.0
            block_values[block.name] = extract_hermitian(value) if block.is_complex else value
        scalar_values = {
            name: self.scalar_offsets[name] + sum(sign * x_lp[col] for col, sign in columns)
            for name, columns in self.scalar_columns.items()
        }
        return block_values, scalar_values

    def objective_value(self, x_blocks: Sequence[RealArray], x_lp: RealArray) -> float:
        block_values, scalar_values = self.recover(x_blocks, x_lp)
        return self.source.evaluate_objective(block_values, scalar_values)


def _real_coefficient(coefficient: Matrix, block: Block) -> RealArray:
    coefficient = (coefficient + coefficient.conj().T) / 2.0
    if block.is_complex:
        return embed_hermitian(coefficient) / 2.0
    return np.real(coefficient).astype(float)


def realify(problem: SdpProblem) -> RealSdp:
    """
    Rewrite a problem in real standard form. Complex blocks of size ``n`` become real
    blocks of size ``2n``; inequalities get slack columns; bounded scalars are shifted
    to be nonnegative and free scalars are split into two nonnegative parts.
    Functional values are preserved exactly.
    """
    m = len(problem.constraints)
    dims = tuple(2 * block.dim if block.is_complex else block.dim for block in problem.blocks)
    index = {block.name: j for j, block in enumerate(problem.blocks)}

    columns: List[Tuple[str, int, float]] = []  # (owner, constraint index or -1, sign)
    scalar_columns: Dict[str, Tuple[Tuple[int, float], ...]] = {}
    scalar_offsets: Dict[str, float] = {}
    for scalar in problem.scalars:
        if scalar.lower is None:
            scalar_columns[scalar.name] = ((len(columns), 1.0), (len(columns) + 1, -1.0))
            columns += [(scalar.name, -1, 1.0), (scalar.name, -1, -1.0)]
            scalar_offsets[scalar.name] = 0.0
        else:
            scalar_columns[scalar.name] = ((len(columns), 1.0),)
            columns.append((scalar.name, -1, 1.0))
            scalar_offsets[scalar.name] = scalar.lower
    slack_start = len(columns)
    for i, constraint in enumerate(problem.constraints):
        if constraint.relation is not Relation.EQ:
            columns.append(("", i, 1.0 if constraint.relation is Relation.LE else -1.0))
    p = len(columns)

    a_blocks = [np.zeros((m, n, n)) for n in dims]
    a_lp = np.zeros((m, p))
    b = np.zeros(m)
    for i, constraint in enumerate(problem.constraints):
        functional = constraint.functional
        for name, coefficient in functional.blocks.items():
            j = index[name]
            a_blocks[j][i] = _real_coefficient(coefficient, problem.blocks[j])
        shift = functional.constant
        for name, coefficient in functional.scalars.items():
            for col, sign in scalar_columns[name]:
                a_lp[i, col] += sign * coefficient
            shift += coefficient * scalar_offsets[name]
        b[i] = constraint.rhs - shift
    for col in range(slack_start, p):
        _, i, sign = columns[col]
        a_lp[i, col] = sign

    sign = 1.0 if problem.sense is Sense.MINIMIZE else -1.0
    c_blocks = [np.zeros((n, n)) for n in dims]
    for name, coefficient in problem.objective.blocks.items():
        j = index[name]
        c_blocks[j] = sign * _real_coefficient(coefficient, problem.blocks[j])
    c_lp = np.zeros(p)
    offset = problem.objective.constant
    for name, coefficient in problem.objective.scalars.items():
        for col, col_sign in scalar_columns[name]:
            c_lp[col] += sign * col_sign * coefficient
        offset += coefficient * scalar_offsets[name]

    return RealSdp(
        dims=dims,
        c_blocks=tuple(c_blocks),
        a_blocks=tuple(a_blocks),
        c_lp=c_lp,
        a_lp=a_lp,
        b=b,
        objective_sign=sign,
        objective_offset=offset,
        source=problem,
        scalar_columns=scalar_columns,
        scalar_offsets=scalar_offsets,
    )


@dataclasses.dataclass
class _Iterate:
    x: List[RealArray]
    x_lp: RealArray
    y: RealArray
    z: List[RealArray]
    z_lp: RealArray

    def copy(self) -> "_Iterate":
        return _Iterate(
            [a.copy() for a in self.x], self.x_lp.copy(), self.y.copy(), [a.copy() for a in self.z], self.z_lp.copy()
        )


def _apply(sdp: RealSdp, x: Sequence[RealArray], x_lp: RealArray) -> RealArray:
    """The operator ``A(X)``."""
    out = sdp.a_lp @ x_lp
    for a, xj in zip(sdp.a_blocks, x):
        out = out + np.einsum("kij,ij->k", a, xj)
    return out


def _adjoint(sdp: RealSdp, y: RealArray) -> Tuple[List[RealArray], RealArray]:
    """The operator ``A*(y)``."""
    return [np.tensordot(y, a, axes=1) for a in sdp.a_blocks], sdp.a_lp.T @ y


def _inner(x: Sequence[RealArray], x_lp: RealArray, z: Sequence[RealArray], z_lp: RealArray) -> float:
    return float(sum(np.sum(a * b) for a, b in zip(x, z)) + x_lp @ z_lp)


def _norm(blocks: Sequence[RealArray], lp: RealArray) -> float:
    return math.sqrt(sum(float(np.sum(a * a)) for a in blocks) + float(lp @ lp))


def _max_step(lam: RealArray, d_scaled: RealArray) -> float:
    """Largest ``t`` with ``Lambda + t D`` PSD, for diagonal ``Lambda``."""
    inv_sqrt = 1.0 / np.sqrt(lam)
    smallest = float(np.linalg.eigvalsh(inv_sqrt[:, None] * d_scaled * inv_sqrt[None, :])[0])
    return math.inf if smallest >= 0 else -1.0 / smallest


def _max_step_lp(v: RealArray, dv: RealArray) -> float:
    negative = dv < 0
    return float(np.min(-v[negative] / dv[negative])) if np.any(negative) else math.inf


def _initial_point(sdp: RealSdp) -> _Iterate:
    m = len(sdp.b)
    x, z = [], []
    for a, c, n in zip(sdp.a_blocks, sdp.c_blocks, sdp.dims):
        a_norms = np.sqrt(np.einsum("kij,kij->k", a, a)) if m else np.zeros(0)
        xi = max(10.0, math.sqrt(n), n * float(np.max((1.0 + np.abs(sdp.b)) / (1.0 + a_norms), initial=0.0)))
        eta = max(10.0, math.sqrt(n), float(np.max(a_norms, initial=0.0)), float(np.linalg.norm(c)))
        x.append(xi * np.eye(n))
        z.append(eta * np.eye(n))
    p = len(sdp.c_lp)
    lp_norms = np.linalg.norm(sdp.a_lp, axis=1) if p else np.zeros(m)
    xi_lp = max(10.0, math.sqrt(p), p * float(np.max((1.0 + np.abs(sdp.b)) / (1.0 + lp_norms), initial=0.0)))
    eta_lp = max(10.0, math.sqrt(p), float(np.max(lp_norms, initial=0.0)), float(np.linalg.norm(sdp.c_lp)))
    return _Iterate(x, np.full(p, xi_lp), np.zeros(m), z, np.full(p, eta_lp))


class _NumericalBreakdown(Exception):
    pass


def _interior_point(sdp: RealSdp, settings: IpmSettings) -> Tuple[_Iterate, SolverStatus, int, Dict[str, float]]:
    m = len(sdp.b)
    n_total = sum(sdp.dims) + len(sdp.c_lp)
    norm_b = float(np.linalg.norm(sdp.b))
    norm_c = _norm(sdp.c_blocks, sdp.c_lp)
    current = _initial_point(sdp)
    best, best_metrics, best_score = current.copy(), {}, math.inf
    status = SolverStatus.MAX_ITERS
    iteration = 0
    tol = settings.tolerance

    for iteration in range(settings.max_iters + 1):
        it = current
        r_p = sdp.b - _apply(sdp, it.x, it.x_lp)
        aty, aty_lp = _adjoint(sdp, it.y)
        r_d = [c - zj - a for c, zj, a in zip(sdp.c_blocks, it.z, aty)]
        r_d_lp = sdp.c_lp - it.z_lp - aty_lp
        pobj = _inner(sdp.c_blocks, sdp.c_lp, it.x, it.x_lp)
        dobj = float(sdp.b @ it.y)
        metrics = {
            "gap": abs(pobj - dobj) / (1.0 + abs(pobj) + abs(dobj)),
            "pinf": float(np.linalg.norm(r_p)) / (1.0 + norm_b),
            "dinf": _norm(r_d, r_d_lp) / (1.0 + norm_c),
        }
        mu = _inner(it.x, it.x_lp, it.z, it.z_lp) / n_total
        _logger.debug(
            "IPM %3d: pobj=%.10g dobj=%.10g gap=%.2e pinf=%.2e dinf=%.2e mu=%.2e",
            iteration,
            pobj,
            dobj,
            metrics["gap"],
            metrics["pinf"],
            metrics["dinf"],
            mu,
        )
        score = max(metrics.values())
        if score < best_score:
            best, best_metrics, best_score = it.copy(), metrics, score
        if score <= tol:
            status = SolverStatus.OPTIMAL
            break
        if dobj > 0 and metrics["pinf"] > math.sqrt(tol):
            certificate = _norm([c - r for c, r in zip(sdp.c_blocks, r_d)], sdp.c_lp - r_d_lp) / dobj
            if certificate <= tol:
                _logger.debug("IPM: primal infeasibility certificate found (residual %.2e)", certificate)
                status = SolverStatus.INFEASIBLE
                best = it.copy()
                break
        if pobj < 0 and metrics["dinf"] > math.sqrt(tol):
            ray = float(np.linalg.norm(_apply(sdp, it.x, it.x_lp))) / -pobj
            if ray <= tol:
                _logger.debug("IPM: dual infeasibility certificate found (residual %.2e)", ray)
                status = SolverStatus.INFEASIBLE
                best = it.copy()
                break
        if iteration == settings.max_iters:
            break
        try:
            current = _step(sdp, it, r_p, r_d, r_d_lp, mu, settings)
        except (_NumericalBreakdown, np.linalg.LinAlgError) as e:
            _logger.debug("IPM: stopping after numerical breakdown: %s", e)
            break

    if status is SolverStatus.MAX_ITERS:
        accurate_enough = (
            best_metrics
            and best_metrics["pinf"] <= tol
            and max(best_metrics["dinf"], best_metrics["gap"]) <= settings.accept_gap
        )
        if accurate_enough:
            _logger.debug("IPM: accepting reduced-accuracy solution (gap %.2e)", best_metrics["gap"])
            status = SolverStatus.OPTIMAL
        else:
            _logger.warning("SDP solver stopped without convergence after %d iterations", iteration)
    return best, status, iteration, best_metrics


def _step(
    sdp: RealSdp,
    it: _Iterate,
    r_p: RealArray,
    r_d: List[RealArray],
    r_d_lp: RealArray,
    mu: float,
    settings: IpmSettings,
) -> _Iterate:
    # Nesterov-Todd scaling: W = G G^T with W Z W = X and G^{-1} X G^{-T} = G^T Z G = Lambda
    scalings = []
    for xj, zj in zip(it.x, it.z):
        try:
            chol = scipy.linalg.cholesky(xj, lower=True)
        except np.linalg.LinAlgError as e:
            raise _NumericalBreakdown("primal iterate lost definiteness") from e
        d, v = np.linalg.eigh(chol.T @ zj @ chol)
        if d[0] <= 0:
            raise _NumericalBreakdown("dual iterate lost definiteness")
        g = (chol @ v) * d ** -0.25
        g_inv = (d**0.25)[:, None] * scipy.linalg.solve_triangular(chol, v, lower=True, trans="T").T
        scalings.append((g, g_inv, np.sqrt(d), g @ g.T))
    w_lp = it.x_lp / it.z_lp
    lam_lp = np.sqrt(it.x_lp * it.z_lp)

    m = len(sdp.b)
    schur = (sdp.a_lp * w_lp) @ sdp.a_lp.T
    for a, (_, _, _, w) in zip(sdp.a_blocks, scalings):
        waw = np.matmul(np.matmul(w, a), w)
        schur += a.reshape(m, -1) @ waw.reshape(m, -1).T
    schur = (schur + schur.T) / 2.0
    try:
        if m == 0:
            raise np.linalg.LinAlgError("no constraints")
        factor = scipy.linalg.cho_factor(schur)

        def solve_schur(rhs: RealArray) -> RealArray:
            return scipy.linalg.cho_solve(factor, rhs)

    except np.linalg.LinAlgError:

        def solve_schur(rhs: RealArray) -> RealArray:
            return scipy.linalg.lstsq(schur, rhs)[0]

    wrw = [w @ r @ w for r, (_, _, _, w) in zip(r_d, scalings)]
    base_rhs = r_p + _apply(sdp, wrw, w_lp * r_d_lp)

    def direction(
        r_scaled: List[RealArray], r_lp: RealArray
    ) -> Tuple[List[RealArray], RealArray, RealArray, List[RealArray], RealArray]:
        t = []
        for r, (g, _, lam, _) in zip(r_scaled, scalings):
            t.append(g @ (2.0 * r / (lam[:, None] + lam[None, :])) @ g.T)
        t_lp = np.sqrt(w_lp) * r_lp / lam_lp
        dy = solve_schur(base_rhs - _apply(sdp, t, t_lp))
        aty, aty_lp = _adjoint(sdp, dy)
        dz = [r - a for r, a in zip(r_d, aty)]
        dz_lp = r_d_lp - aty_lp
        dx = [tj - w @ dzj @ w for tj, dzj, (_, _, _, w) in zip(t, dz, scalings)]
        dx_lp = t_lp - w_lp * dz_lp
        return dx, dx_lp, dy, dz, dz_lp

    def step_lengths(
        dx: List[RealArray], dx_lp: RealArray, dz: List[RealArray], dz_lp: RealArray
    ) -> Tuple[float, float, List[RealArray], List[RealArray]]:
        alpha_p, alpha_d = _max_step_lp(it.x_lp, dx_lp), _max_step_lp(it.z_lp, dz_lp)
        dx_scaled, dz_scaled = [], []
        for dxj, dzj, (g, g_inv, lam, _) in zip(dx, dz, scalings):
            dxs = g_inv @ dxj @ g_inv.T
            dzs = g.T @ dzj @ g
            dx_scaled.append((dxs + dxs.T) / 2.0)
            dz_scaled.append((dzs + dzs.T) / 2.0)
            alpha_p = min(alpha_p, _max_step(lam, dx_scaled[-1]))
            alpha_d = min(alpha_d, _max_step(lam, dz_scaled[-1]))
        return alpha_p, alpha_d, dx_scaled, dz_scaled

    # predictor
    r_aff = [-np.diag(lam**2) for (_, _, lam, _) in scalings]
    dx, dx_lp, _, dz, dz_lp = direction(r_aff, -(lam_lp**2))
    alpha_p, alpha_d, dxs, dzs = step_lengths(dx, dx_lp, dz, dz_lp)
    alpha_p, alpha_d = min(1.0, alpha_p), min(1.0, alpha_d)
    mu_aff = (
        _inner(
            [xj + alpha_p * d for xj, d in zip(it.x, dx)],
            it.x_lp + alpha_p * dx_lp,
            [zj + alpha_d * d for zj, d in zip(it.z, dz)],
            it.z_lp + alpha_d * dz_lp,
        )
        / (sum(sdp.dims) + len(sdp.c_lp))
    )
    sigma = min(1.0, max(0.0, mu_aff / mu)) ** 3

    # corrector
    r_cor = []
    for (_, _, lam, _), a, b in zip(scalings, dxs, dzs):
        cross = a @ b
        r_cor.append(sigma * mu * np.eye(len(lam)) - np.diag(lam**2) - (cross + cross.T) / 2.0)
    scaled_dx_lp = dx_lp / np.sqrt(w_lp)
    scaled_dz_lp = dz_lp * np.sqrt(w_lp)
    dx, dx_lp, dy, dz, dz_lp = direction(r_cor, sigma * mu - lam_lp**2 - scaled_dx_lp * scaled_dz_lp)
    alpha_p, alpha_d, _, _ = step_lengths(dx, dx_lp, dz, dz_lp)
    alpha_p = min(1.0, settings.step_fraction * alpha_p)
    alpha_d = min(1.0, settings.step_fraction * alpha_d)
    if max(alpha_p, alpha_d) < 1e-12:
        raise _NumericalBreakdown("step length vanished")
    return _Iterate(
        [xj + alpha_p * d for xj, d in zip(it.x, dx)],
        it.x_lp + alpha_p * dx_lp,
        it.y + alpha_d * dy,
        [zj + alpha_d * d for zj, d in zip(it.z, dz)],
        it.z_lp + alpha_d * dz_lp,
    )


class SdpBackend(Protocol):
    name: str

    def solve(self, problem: SdpProblem, settings: IpmSettings) -> SdpSolution:
        ...


class InteriorPointBackend:
    """The built-in dense solver."""

    name = "builtin"

    def solve(self, problem: SdpProblem, settings: IpmSettings) -> SdpSolution:
        sdp = realify(problem)
        final, status, iterations, metrics = _interior_point(sdp, settings)
        block_values, scalar_values = sdp.recover(final.x, final.x_lp)
        names = [constraint.name for constraint in problem.constraints]
        dual = {name: float(sdp.objective_sign * y) for name, y in zip(names, final.y)}
        implicated: Tuple[str, ...] = ()
        if status is SolverStatus.INFEASIBLE and len(final.y):
            weight = np.abs(final.y)
            implicated = tuple(name for name, wi in zip(names, weight) if wi >= 1e-3 * weight.max())
        return SdpSolution(
            block_values=block_values,
            scalar_values=scalar_values,
            objective_value=problem.evaluate_objective(block_values, scalar_values),
            status=status,
            duality_gap=metrics.get("gap", math.nan),
            primal_residual=metrics.get("pinf", math.nan),
            dual_residual=metrics.get("dinf", math.nan),
            iterations=iterations,
            dual_values=dual,
            infeasible_constraints=implicated,
        )


class CvxpyBackend:
    """Hands the problem to cvxpy and its default conic solver."""

    name = "cvxpy"

    def solve(self, problem: SdpProblem, settings: IpmSettings) -> SdpSolution:
        try:
            import cvxpy as cp
        except ImportError as e:
            raise ConfigurationError("the cvxpy backend needs the optional 'cvxpy' dependency") from e

        matrices = {
            block.name: cp.Variable((block.dim, block.dim), hermitian=True)
            if block.is_complex
            else cp.Variable((block.dim, block.dim), symmetric=True)
            for block in problem.blocks
        }
        scalars = {scalar.name: cp.Variable() for scalar in problem.scalars}

        def expression(functional: LinearFunctional) -> Any:
            total: Any = cp.Constant(functional.constant)
            for name, a in functional.blocks.items():
                total = total + cp.real(cp.trace(a @ matrices[name]))
            for name, c in functional.scalars.items():
                total = total + c * scalars[name]
            return total

        constraints = [x >> 0 for x in matrices.values()]
        constraints += [scalars[s.name] >= s.lower for s in problem.scalars if s.lower is not None]
        tagged = []
        for constraint in problem.constraints:
            lhs = expression(constraint.functional)
            if constraint.relation is Relation.LE:
                tagged.append(lhs <= constraint.rhs)
            elif constraint.relation is Relation.GE:
                tagged.append(lhs >= constraint.rhs)
            else:
                tagged.append(lhs == constraint.rhs)
        objective = expression(problem.objective)
        goal = cp.Minimize(objective) if problem.sense is Sense.MINIMIZE else cp.Maximize(objective)
        cvx_problem = cp.Problem(goal, constraints + tagged)
        cvx_problem.solve()

        if cvx_problem.status in (cp.OPTIMAL, cp.OPTIMAL_INACCURATE):
            status = SolverStatus.OPTIMAL
        elif cvx_problem.status in (cp.INFEASIBLE, cp.INFEASIBLE_INACCURATE, cp.UNBOUNDED, cp.UNBOUNDED_INACCURATE):
            status = SolverStatus.INFEASIBLE
        else:
            status = SolverStatus.MAX_ITERS
        if status is not SolverStatus.OPTIMAL:
            block_values = {
                b.name: np.zeros((b.dim, b.dim), dtype=complex if b.is_complex else float) for b in problem.blocks
            }
            return SdpSolution(block_values, {s.name: math.nan for s in problem.scalars}, math.nan, status, math.nan)
        block_values = {name: np.asarray(x.value) for name, x in matrices.items()}
        scalar_values = {name: float(s.value) for name, s in scalars.items()}
        return SdpSolution(
            block_values=block_values,
            scalar_values=scalar_values,
            objective_value=problem.evaluate_objective(block_values, scalar_values),
            status=status,
            duality_gap=0.0,
            dual_values={c.name: float(np.real(t.dual_value)) for c, t in zip(problem.constraints, tagged)},
        )


_BACKENDS = {"builtin": InteriorPointBackend, "cvxpy": CvxpyBackend}


def get_backend(name: str) -> SdpBackend:
    try:
        return _BACKENDS[name]()  # type: ignore[abstract]
    except KeyError:
        raise ConfigurationError(f"unknown SDP backend {name!r}") from None


def solve(problem: SdpProblem, settings: Optional[IpmSettings] = None, backend: str = "builtin") -> SdpSolution:
    """Solve ``problem``; solver failures are reported through :py:attr:`SdpSolution.status`."""
    return get_backend(backend).solve(problem, settings or IpmSettings())


def _functional_dict(functional: LinearFunctional) -> Dict[str, Any]:
    def rows(matrix: Matrix) -> List[List[List[float]]]:
        return [[[float(np.real(v)), float(np.imag(v))] for v in row] for row in np.asarray(matrix)]

    return {
        "blocks": {name: rows(a) for name, a in functional.blocks.items()},
        "scalars": dict(functional.scalars),
        "constant": functional.constant,
    }


def dump_problem(problem: SdpProblem) -> str:
    """
    JSON text of a problem: block dimensions, scalar bounds, and every coefficient
    matrix as row-major lists of ``[re, im]`` pairs.
    """
    document = {
        "sense": problem.sense.value,
        "blocks": [{"name": b.name, "dim": b.dim, "complex": b.is_complex} for b in problem.blocks],
        "scalars": [{"name": s.name, "lower": s.lower} for s in problem.scalars],
        "objective": _functional_dict(problem.objective),
        "constraints": [
            {"name": c.name, "relation": c.relation.value, "rhs": c.rhs, "functional": _functional_dict(c.functional)}
            for c in problem.constraints
        ],
    }
    return json.dumps(document, indent=1)


__all__ = [
    "Block",
    "Constraint",
    "CvxpyBackend",
    "InteriorPointBackend",
    "IpmSettings",
    "LinearFunctional",
    "RealSdp",
    "Relation",
    "ScalarVariable",
    "SdpBackend",
    "SdpProblem",
    "SdpSolution",
    "Sense",
    "SolverStatus",
    "dump_problem",
    "embed_hermitian",
    "extract_hermitian",
    "get_backend",
    "realify",
    "solve",
]
