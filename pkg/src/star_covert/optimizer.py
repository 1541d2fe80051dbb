"""
Alternating optimization of the joint covert/secure design.

Each outer iteration first optimizes the beamformers for fixed surface
coefficients (the *active* subproblem), then the surface coefficients for fixed
beamformers (the *passive* subproblem). Both are lifted to semidefinite programs:

* every rate is a difference of logarithms of linear functions of the lifted
  variable; the subtracted logarithms are replaced by their tangents at the current
  reference point, the kept ones are handled exactly through a 2x2 linear matrix
  inequality;
* the rank-one requirement is replaced by the penalty ``Tr(X) - ||X||_2``, itself
  linearized at the reference point, with a weight that grows until the solution is
  rank one.

Rate matrices are normalized by the noise power of their receiver, so log
arguments read ``Tr(C X) + 1``. Matrices describing the warden (``d_matrix``,
``e_matrix``, ``f_matrix``) keep physical units.
"""

import dataclasses
import logging
import math
import time
import numpy as np
import numpy.typing as npt

from star_covert import sdp_backend
from star_covert._errors import ConfigurationError, DegenerateInputError, InitializationError, SubproblemError
from star_covert._types import TraceRow
from star_covert.channel_model import ChannelRealization
from star_covert.config import SolverSettings, SystemConfig
from star_covert.detection import asymptotic_terms, covert_threshold_ratio, delta_matrices, lambda_terms, min_dep
from star_covert.rates import Beamformers, RateBreakdown, effective_channel, evaluate_rates
from star_covert.sdp_backend import Block, Constraint, LinearFunctional, Relation, ScalarVariable, SdpProblem, Sense
from star_covert.star_ris import (
    Side,
    StarCoefficients,
    SurfaceLayout,
    coefficient_vector,
    extract_rank_one,
    project_feasible,
)
from typing import Callable, Dict, Iterator, List, Mapping, Optional, Sequence, Tuple


_logger = logging.getLogger("star_covert")

Matrix = npt.NDArray[np.complex128]

LN2 = math.log(2.0)
_E11 = np.array([[1.0, 0.0], [0.0, 0.0]])
_E22 = np.array([[0.0, 0.0], [0.0, 1.0]])
_OFFDIAG = np.array([[0.0, 0.5], [0.5, 0.0]])


def _trace_product(coefficient: Matrix, x: Matrix) -> float:
    return float(np.real(np.sum(coefficient * x.T)))


@dataclasses.dataclass(frozen=True)
class LogTerm:
    """``log2(Tr(C X) + offset)`` for the variable block named ``block``."""

    block: str
    coefficient: Matrix
    offset: float = 0.0

    def argument(self, values: Mapping[str, Matrix]) -> float:
        return _trace_product(self.coefficient, values[self.block]) + self.offset

    def value(self, values: Mapping[str, Matrix]) -> float:
        argument = self.argument(values)
        return math.log2(argument) if argument > 0 else -math.inf

    def tangent(self, values: Mapping[str, Matrix], reference: Mapping[str, Matrix]) -> float:
        s = self.argument(reference)
        return math.log2(s) + (self.argument(values) - s) / (LN2 * s)


@dataclasses.dataclass(frozen=True)
class DcSurrogate:
    """
    A difference of logarithms ``sum(concave) - sum(convex)`` and its minorants at
    ``reference``: :py:meth:`value` keeps the first sum and replaces the second by its
    tangent; :py:meth:`minorant` additionally bounds each kept logarithm by
    ``log2 s + (1 - s / t) / ln 2``, which is what the semidefinite program optimizes.
    """

    concave: Tuple[LogTerm, ...]
    convex: Tuple[LogTerm, ...]
    reference: Mapping[str, Matrix]

    def __post_init__(self) -> None:
        for term in self.concave + self.convex:
            if not term.argument(self.reference) > 0:
                raise DegenerateInputError("log argument is not positive at the reference point")

    def true_value(self, values: Mapping[str, Matrix]) -> float:
        return sum(t.value(values) for t in self.concave) - sum(t.value(values) for t in self.convex)

    def value(self, values: Mapping[str, Matrix]) -> float:
        kept = sum(t.value(values) for t in self.concave)
        return kept - sum(t.tangent(values, self.reference) for t in self.convex)

    def minorant(self, values: Mapping[str, Matrix]) -> float:
        kept = 0.0
        for term in self.concave:
            s, t = term.argument(self.reference), term.argument(values)
            if t <= 0:
                return -math.inf
            kept += math.log2(s) + (1.0 - s / t) / LN2
        return kept - sum(t.tangent(values, self.reference) for t in self.convex)


@dataclasses.dataclass(frozen=True)
class SurrogateSet:
    covert: DcSurrogate
    secure_h1: Tuple[DcSurrogate, ...]
    secure_h0: Tuple[DcSurrogate, ...]

    def items(self) -> Iterator[Tuple[str, str, DcSurrogate]]:
        """``(label, scalar variable, surrogate)`` for every rate constraint."""
        yield "covert_rate", "iota", self.covert
        for k, surrogate in enumerate(self.secure_h1):
            yield f"secure_h1[{k}]", "kappa", surrogate
        for k, surrogate in enumerate(self.secure_h0):
            yield f"secure_h0[{k}]", "varpi", surrogate

    def objective(self, values: Mapping[str, Matrix], p1: float, exact: bool = False) -> float:
        """The averaged rate the subproblem maximizes, through the surrogates or exactly."""

        def evaluate(s: DcSurrogate) -> float:
            return s.true_value(values) if exact else s.value(values)

        return (
            p1 * evaluate(self.covert)
            + p1 * min(evaluate(s) for s in self.secure_h1)
            + (1.0 - p1) * min(evaluate(s) for s in self.secure_h0)
        )


def rank_one_residual(x: Matrix) -> float:
    """``Tr(X) - ||X||_2``: nonnegative on PSD matrices, zero exactly at rank one."""
    eigenvalues = np.linalg.eigvalsh((x + x.conj().T) / 2.0)
    return float(np.sum(eigenvalues) - eigenvalues[-1])


def _normalized_residual(x: Matrix) -> float:
    return rank_one_residual(x) / max(1.0, float(np.real(np.trace(x))))


def principal_eigenvector(x: Matrix) -> Matrix:
    _, vectors = np.linalg.eigh((x + x.conj().T) / 2.0)
    return vectors[:, -1]


def rank_one_penalty(x: Matrix, x_ref: Matrix, principal_ref: Matrix) -> float:
    """
    The rank-one penalty with the spectral norm linearized at ``x_ref``:
    ``Tr(X) - ||X_ref||_2 - u^H (X - X_ref) u``. It upper-bounds
    :py:func:`rank_one_residual` and touches it at ``x_ref``.

    >>> rank_one_penalty(np.eye(2), np.diag([1.0, 0.0]), np.array([1.0, 0.0]))
    1.0
    """
    u = np.asarray(principal_ref)
    spectral = float(np.linalg.eigvalsh((x_ref + x_ref.conj().T) / 2.0)[-1])
    correction = float(np.real(u.conj() @ (x - x_ref) @ u))
    return float(np.real(np.trace(x))) - spectral - correction


def _penalty_coefficient(principal: Matrix) -> Matrix:
    """Coefficient of the linearized penalty; the constant part vanishes for a principal eigenvector."""
    return np.eye(len(principal)) - np.outer(principal, principal.conj())


def _selector(size: int, keep: Sequence[int]) -> Matrix:
    diagonal = np.zeros(size)
    diagonal[list(keep)] = 1.0
    return np.diag(diagonal)


@dataclasses.dataclass(frozen=True)
class ActiveSubproblemData:
    """
    Base matrices of the beamforming subproblem. The lifted variable is
    ``W_cs = vec(W) vec(W)^H`` with ``W = [w_b, w_1, ..., w_K]``, so block 0 belongs to
    the covert beam and block ``k + 1`` to security user ``k``.
    """

    a_matrix: Matrix
    """Covert user channel, ``eff_b^H eff_b / sigma_b^2``"""
    b_matrices: Matrix
    """Security user channels, ``K x N_t x N_t``"""
    c_matrix: Matrix
    """Eavesdropper mean power per unit beam, over ``sigma_e^2``"""
    d_matrix: Matrix
    """Warden large-system power per unit beam"""
    phi_eps: float
    p1: float
    p_tmax: float
    r_b_star: float
    r_s0_star: float
    r_s1_star: float

    @property
    def n_t(self) -> int:
        return self.a_matrix.shape[0]

    @property
    def k_users(self) -> int:
        return self.b_matrices.shape[0]

    def lift(self, base: Matrix, drop: Sequence[int] = ()) -> Matrix:
        """``(E E^T) kron base`` where ``E`` removes the beam blocks listed in ``drop``."""
        size = self.k_users + 1
        return np.kron(_selector(size, [i for i in range(size) if i not in drop]), base)

    @property
    def a_hat(self) -> Matrix:
        return self.lift(self.a_matrix)

    @property
    def a_tilde(self) -> Matrix:
        return self.lift(self.a_matrix, (0,))

    def b_check(self, k: int) -> Matrix:
        return self.lift(self.b_matrices[k])

    def b_breve(self, k: int) -> Matrix:
        return self.lift(self.b_matrices[k], (k + 1,))

    def b_hat(self, k: int) -> Matrix:
        return self.lift(self.b_matrices[k], (0,))

    def b_tilde(self, k: int) -> Matrix:
        return self.lift(self.b_matrices[k], (0, k + 1))

    @property
    def c_check(self) -> Matrix:
        return self.lift(self.c_matrix)

    def c_breve(self, k: int) -> Matrix:
        return self.lift(self.c_matrix, (k + 1,))

    def c_tilde(self, k: int) -> Matrix:
        return self.lift(self.c_matrix, (0, k + 1))

    @property
    def c_hat(self) -> Matrix:
        return self.lift(self.c_matrix, (0,))

    @property
    def d_hat(self) -> Matrix:
        return self.lift(self.d_matrix, (0,))

    @property
    def d_1(self) -> Matrix:
        return np.kron(_selector(self.k_users + 1, (0,)), self.d_matrix)


def build_active(
    channel: ChannelRealization, coeffs: StarCoefficients, config: SystemConfig, phi_eps: float
) -> ActiveSubproblemData:
    theta_r = coefficient_vector(coeffs, Side.REFLECT)
    theta_t = coefficient_vector(coeffs, Side.TRANSMIT)
    if channel.h_br.shape[0] != len(theta_r):
        raise ValueError("coefficient length does not match the channel")
    eff_b = effective_channel(channel.h_rb, theta_r, channel.h_br)
    eff_k = [effective_channel(h, theta_t, channel.h_br) for h in channel.h_rk]
    projected = (channel.omega_re * theta_t) @ channel.h_br
    ris_terms = np.real(np.einsum("mn,lnm->l", np.outer(theta_r.conj(), theta_r), delta_matrices(channel)))
    return ActiveSubproblemData(
        a_matrix=np.outer(eff_b.conj(), eff_b) / config.noise_b,
        b_matrices=np.stack([np.outer(e.conj(), e) for e in eff_k]) / config.noise_k,
        c_matrix=channel.re_scale * (projected.conj().T @ projected) / config.noise_e,
        d_matrix=channel.br_scale * channel.rw_scale * np.einsum("l,lij->ij", ris_terms, channel.psi_bs),
        phi_eps=phi_eps,
        p1=config.p1,
        p_tmax=config.p_tmax,
        r_b_star=config.r_b_star,
        r_s0_star=config.r_s0_star,
        r_s1_star=config.r_s1_star,
    )


def taylor_active(data: ActiveSubproblemData, w_cs_ref: Matrix) -> SurrogateSet:
    """
    Surrogates of the covert rate and of each user's robust secure rate under both
    hypotheses, linearized at ``w_cs_ref``.

    :raise DegenerateInputError: If a log argument is not positive at ``w_cs_ref``.
    """
    ref = {"W": w_cs_ref}
    k_users = range(data.k_users)
    return SurrogateSet(
        covert=DcSurrogate((LogTerm("W", data.a_hat, 1.0),), (LogTerm("W", data.a_tilde, 1.0),), ref),
        secure_h1=tuple(
            DcSurrogate(
                (LogTerm("W", data.b_check(k), 1.0), LogTerm("W", data.c_breve(k))),
                (LogTerm("W", data.b_breve(k), 1.0), LogTerm("W", data.c_check)),
                ref,
            )
            for k in k_users
        ),
        secure_h0=tuple(
            DcSurrogate(
                (LogTerm("W", data.b_hat(k), 1.0), LogTerm("W", data.c_tilde(k))),
                (LogTerm("W", data.b_tilde(k), 1.0), LogTerm("W", data.c_hat)),
                ref,
            )
            for k in k_users
        ),
    )


@dataclasses.dataclass(frozen=True)
class PassiveSubproblemData:
    """
    Base matrices of the surface subproblem in the convention ``Q = conj(theta) theta^T``,
    restricted to the elements the layout lets reflect (``Q_r``) or transmit (``Q_t``).
    """

    layout: SurfaceLayout
    e_matrix: Matrix
    """Warden large-system power of the covert beam: ``Tr(Q_r E) = alpha``"""
    f_matrix: Matrix
    """Warden large-system power of the security beams: ``Tr(Q_r F) = beta``"""
    g_matrix: Matrix
    o_matrix: Matrix
    p_matrices: Matrix
    p_hat: Matrix
    t_matrices: Matrix
    t_hat: Matrix
    s_matrix: Matrix
    s_hat: Matrix
    u_matrix: Matrix
    u_hat: Matrix
    phi_eps: float
    p1: float
    r_b_star: float
    r_s0_star: float
    r_s1_star: float

    @property
    def k_users(self) -> int:
        return self.p_matrices.shape[0]

    @property
    def reflect_idx(self) -> npt.NDArray[np.intp]:
        return np.flatnonzero(self.layout.reflect)

    @property
    def transmit_idx(self) -> npt.NDArray[np.intp]:
        return np.flatnonzero(self.layout.transmit)


def build_passive(
    channel: ChannelRealization,
    beams: Beamformers,
    config: SystemConfig,
    phi_eps: float,
    layout: Optional[SurfaceLayout] = None,
) -> PassiveSubproblemData:
    layout = layout or SurfaceLayout.star(channel.geometry.m)
    if beams.k_users != channel.k_users or beams.n_t != channel.geometry.n_t:
        raise ValueError("beamformer dimensions do not match the channel")
    r_idx = np.flatnonzero(layout.reflect)
    t_idx = np.flatnonzero(layout.transmit)

    def receiver(h: Matrix, w: Matrix) -> Matrix:
        b = h.conj() * (channel.h_br @ w)
        return np.outer(b, b.conj())

    gram_re = channel.omega_re.conj().T @ channel.omega_re

    def eavesdropper(w: Matrix) -> Matrix:
        hw = channel.h_br @ w
        return channel.re_scale * gram_re.T * np.outer(hw, hw.conj()) / config.noise_e

    deltas = delta_matrices(channel)
    warden_scale = channel.br_scale * channel.rw_scale

    def warden(w: Matrix) -> Matrix:
        weights = np.real(np.einsum("i,lij,j->l", w.conj(), channel.psi_bs, w))
        return warden_scale * np.einsum("l,lij->ij", weights, deltas)

    def on(idx: npt.NDArray[np.intp], matrix: Matrix) -> Matrix:
        return matrix[np.ix_(idx, idx)]

    k_users = beams.k_users
    user = [[receiver(channel.h_rk[k], w) / config.noise_k for w in beams.w_k] for k in range(k_users)]
    user_covert = [receiver(channel.h_rk[k], beams.w_b) / config.noise_k for k in range(k_users)]
    eve = [eavesdropper(w) for w in beams.w_k]
    eve_covert = eavesdropper(beams.w_b)
    p = [sum(user[k]) for k in range(k_users)]
    p_hat = [p[k] - user[k][k] for k in range(k_users)]
    s = sum(eve)
    s_hat = [s - eve[k] for k in range(k_users)]

    def stack(matrices: List[Matrix]) -> Matrix:
        return np.stack([on(t_idx, m) for m in matrices])

    return PassiveSubproblemData(
        layout=layout,
        e_matrix=on(r_idx, warden(beams.w_b)),
        f_matrix=on(r_idx, sum(warden(w) for w in beams.w_k)),
        g_matrix=on(r_idx, receiver(channel.h_rb, beams.w_b) / config.noise_b),
        o_matrix=on(r_idx, sum(receiver(channel.h_rb, w) for w in beams.w_k) / config.noise_b),
        p_matrices=stack(p),
        p_hat=stack(p_hat),
        t_matrices=stack([p[k] + user_covert[k] for k in range(k_users)]),
        t_hat=stack([p_hat[k] + user_covert[k] for k in range(k_users)]),
        s_matrix=on(t_idx, s),
        s_hat=stack(s_hat),
        u_matrix=on(t_idx, s + eve_covert),
        u_hat=stack([s_hat[k] + eve_covert for k in range(k_users)]),
        phi_eps=phi_eps,
        p1=config.p1,
        r_b_star=config.r_b_star,
        r_s0_star=config.r_s0_star,
        r_s1_star=config.r_s1_star,
    )


def taylor_passive(data: PassiveSubproblemData, q_refs: Mapping[str, Matrix]) -> SurrogateSet:
    """
    Surrogates of the rates as functions of ``Q_r`` (covert user) and ``Q_t``
    (security users and eavesdropper), linearized at ``q_refs``.

    :raise DegenerateInputError: If a log argument is not positive at the reference.
    """
    ref = {"Q_r": q_refs["Q_r"], "Q_t": q_refs["Q_t"]}
    k_users = range(data.k_users)
    return SurrogateSet(
        covert=DcSurrogate(
            (LogTerm("Q_r", data.g_matrix + data.o_matrix, 1.0),), (LogTerm("Q_r", data.o_matrix, 1.0),), ref
        ),
        secure_h1=tuple(
            DcSurrogate(
                (LogTerm("Q_t", data.t_matrices[k], 1.0), LogTerm("Q_t", data.u_hat[k])),
                (LogTerm("Q_t", data.t_hat[k], 1.0), LogTerm("Q_t", data.u_matrix)),
                ref,
            )
            for k in k_users
        ),
        secure_h0=tuple(
            DcSurrogate(
                (LogTerm("Q_t", data.p_matrices[k], 1.0), LogTerm("Q_t", data.s_hat[k])),
                (LogTerm("Q_t", data.p_hat[k], 1.0), LogTerm("Q_t", data.s_matrix)),
                ref,
            )
            for k in k_users
        ),
    )


def _accumulate(target: Dict[str, Matrix], block: str, coefficient: Matrix) -> None:
    target[block] = target[block] + coefficient if block in target else coefficient


def _lower_surrogate(
    label: str, scalar: str, surrogate: DcSurrogate, blocks: List[Block], constraints: List[Constraint]
) -> None:
    """Append the blocks and constraints that encode ``scalar <= minorant`` to the problem being built."""
    functional: Dict[str, Matrix] = {}
    constant = 0.0
    for i, term in enumerate(surrogate.concave):
        s = term.argument(surrogate.reference)
        name = f"{label}.y{i}"
        blocks.append(Block(name, 2, is_complex=False))
        constraints.append(
            Constraint(
                LinearFunctional({name: _E11, term.block: -term.coefficient / s}),
                Relation.EQ,
                term.offset / s,
                f"{name}.scale",
            )
        )
        constraints.append(Constraint(LinearFunctional({name: _OFFDIAG}), Relation.EQ, 1.0, f"{name}.unit"))
        _accumulate(functional, name, -_E22 / LN2)
        constant += math.log2(s) + 1.0 / LN2
    for term in surrogate.convex:
        s = term.argument(surrogate.reference)
        _accumulate(functional, term.block, -term.coefficient / (LN2 * s))
        constant -= math.log2(s) + (term.offset - s) / (LN2 * s)
    constraints.append(Constraint(LinearFunctional(functional, {scalar: -1.0}, constant), Relation.GE, 0.0, label))


def _rate_problem(
    variables: Sequence[Block],
    surrogates: SurrogateSet,
    qos: Tuple[float, float, float],
    p1: float,
    extra: Sequence[Constraint],
    penalties: Mapping[str, Tuple[float, Matrix]],
) -> SdpProblem:
    r_b_star, r_s0_star, r_s1_star = qos
    blocks = list(variables)
    constraints = list(extra)
    for label, scalar, surrogate in surrogates.items():
        _lower_surrogate(label, scalar, surrogate, blocks, constraints)
    objective = LinearFunctional(
        {name: -weight * _penalty_coefficient(u) for name, (weight, u) in penalties.items()},
        {"iota": p1, "kappa": p1, "varpi": 1.0 - p1},
    )
    return SdpProblem(
        blocks=tuple(blocks),
        scalars=(
            ScalarVariable("iota", r_b_star),
            ScalarVariable("kappa", r_s1_star),
            ScalarVariable("varpi", r_s0_star),
        ),
        objective=objective,
        sense=Sense.MAXIMIZE,
        constraints=tuple(constraints),
    )


def _covert_constraint(block: str, security: Matrix, covert: Matrix, phi_eps: float) -> Constraint:
    coefficient = security - phi_eps * covert
    scale = float(np.abs(coefficient).max(initial=0.0)) or 1.0
    return Constraint(LinearFunctional({block: coefficient / scale}), Relation.GE, 0.0, "covertness")


def active_problem(
    data: ActiveSubproblemData, surrogates: SurrogateSet, penalty: float, principal: Matrix
) -> SdpProblem:
    n = (data.k_users + 1) * data.n_t
    extra = [
        _covert_constraint("W", data.d_hat, data.d_1, data.phi_eps),
        Constraint(LinearFunctional({"W": np.eye(n)}), Relation.LE, data.p_tmax, "power"),
    ]
    qos = (data.r_b_star, data.r_s0_star, data.r_s1_star)
    return _rate_problem((Block("W", n),), surrogates, qos, data.p1, extra, {"W": (penalty, principal)})


def passive_problem(
    data: PassiveSubproblemData, surrogates: SurrogateSet, penalty: float, principals: Mapping[str, Matrix]
) -> SdpProblem:
    r_idx, t_idx = data.reflect_idx, data.transmit_idx
    r_pos = {m: i for i, m in enumerate(r_idx)}
    t_pos = {m: i for i, m in enumerate(t_idx)}
    extra = [_covert_constraint("Q_r", data.f_matrix, data.e_matrix, data.phi_eps)]
    for m in range(data.layout.m):
        terms: Dict[str, Matrix] = {}
        if m in r_pos:
            terms["Q_r"] = _unit(len(r_idx), r_pos[m])
        if m in t_pos:
            terms["Q_t"] = _unit(len(t_idx), t_pos[m])
        extra.append(Constraint(LinearFunctional(terms), Relation.EQ, 1.0, f"split[{m}]"))
    qos = (data.r_b_star, data.r_s0_star, data.r_s1_star)
    blocks = (Block("Q_r", len(r_idx)), Block("Q_t", len(t_idx)))
    penalties = {name: (penalty, principals[name]) for name in ("Q_r", "Q_t")}
    return _rate_problem(blocks, surrogates, qos, data.p1, extra, penalties)


def _unit(n: int, i: int) -> Matrix:
    e = np.zeros((n, n))
    e[i, i] = 1.0
    return e


@dataclasses.dataclass(frozen=True)
class InnerRecord:
    iteration: int
    objective: float
    """Optimal value of the penalized semidefinite program"""
    reference_objective: float
    """The same objective at the reference point the program was built around"""
    residual: float
    penalty: float
    sdp_iterations: int


@dataclasses.dataclass(frozen=True)
class LoopResult:
    values: Dict[str, Matrix]
    records: Tuple[InnerRecord, ...]
    iterates: Tuple[Dict[str, Matrix], ...]
    """The lifted matrices after every inner iteration, matching ``records``"""
    residual: float
    converged: bool
    stalled: bool


def _penalty_loop(
    stage: str,
    start: Mapping[str, Matrix],
    build: Callable[[Mapping[str, Matrix], float], Tuple[SdpProblem, SurrogateSet]],
    p1: float,
    tolerance: float,
    scale: float,
    settings: SolverSettings,
    backend: Optional[sdp_backend.SdpBackend],
    outer_iter: Optional[int],
    repair: Optional[Callable[[Dict[str, Matrix]], Dict[str, Matrix]]] = None,
) -> LoopResult:
    solver = backend or sdp_backend.get_backend(settings.backend)
    ipm = sdp_backend.IpmSettings(tolerance=settings.sdp_tol, max_iters=settings.sdp_max_iters)
    values = dict(start)
    records: List[InnerRecord] = []
    iterates: List[Dict[str, Matrix]] = []
    penalty = settings.penalty_init
    best, since_best = math.inf, 0
    residual = max(_normalized_residual(x) for x in values.values())
    converged = stalled = False
    for i in range(1, settings.max_inner + 1):
        try:
            problem, surrogates = build(values, penalty)
        except DegenerateInputError as e:
            raise SubproblemError(str(e), stage, outer_iter=outer_iter, inner_iter=i) from e
        reference_objective = surrogates.objective(values, p1) - penalty * sum(
            rank_one_residual(x) for x in values.values()
        )
        solution = solver.solve(problem, ipm)
        if solution.status is not sdp_backend.SolverStatus.OPTIMAL:
            raise SubproblemError(
                f"{stage} semidefinite program ended with status {solution.status.value}",
                stage,
                outer_iter=outer_iter,
                inner_iter=i,
                constraints=solution.infeasible_constraints,
            )
        values = {name: solution.block_values[name] for name in start}
        if repair is not None:
            values = repair(values)
        iterates.append(values)
        residual = max(_normalized_residual(x) for x in values.values())
        records.append(
            InnerRecord(i, solution.objective_value, reference_objective, residual, penalty, solution.iterations)
        )
        _logger.debug(
            "%s inner %d: objective=%.8g residual=%.3e penalty=%.3g",
            stage,
            i,
            solution.objective_value,
            residual,
            penalty,
        )
        if residual <= tolerance:
            converged = True
            break
        if residual < best:
            best, since_best = residual, 0
        else:
            since_best += 1
            if since_best >= settings.stall_window:
                stalled = True
                _logger.warning("%s penalty loop stalled at residual %.3e after %d iterations", stage, residual, i)
                break
        penalty = min(penalty * scale, settings.penalty_cap)
    else:
        _logger.warning("%s penalty loop hit %d iterations with residual %.3e", stage, settings.max_inner, residual)
    return LoopResult(values, tuple(records), tuple(iterates), residual, converged, stalled)


@dataclasses.dataclass(frozen=True)
class ActiveResult:
    beams: Beamformers
    loop: LoopResult


def extract_beamformers(w_cs: Matrix, n_t: int) -> Beamformers:
    eigenvalues, vectors = np.linalg.eigh((w_cs + w_cs.conj().T) / 2.0)
    return Beamformers.from_stacked(math.sqrt(max(eigenvalues[-1], 0.0)) * vectors[:, -1], n_t)


def solve_active_loop(
    data: ActiveSubproblemData,
    beams: Beamformers,
    settings: Optional[SolverSettings] = None,
    *,
    backend: Optional[sdp_backend.SdpBackend] = None,
    outer_iter: Optional[int] = None,
) -> ActiveResult:
    """
    Run the penalty loop of the beamforming subproblem from ``beams`` and extract
    beamformers from the final, nearly rank-one, lifted matrix.

    :raise SubproblemError: If a semidefinite program is not solved to optimality.
    """
    settings = settings or SolverSettings()
    vector = beams.stack()

    def build(values: Mapping[str, Matrix], penalty: float) -> Tuple[SdpProblem, SurrogateSet]:
        surrogates = taylor_active(data, values["W"])
        return active_problem(data, surrogates, penalty, principal_eigenvector(values["W"])), surrogates

    loop = _penalty_loop(
        "active",
        {"W": np.outer(vector, vector.conj())},
        build,
        data.p1,
        settings.active_tol,
        settings.active_penalty_scale,
        settings,
        backend,
        outer_iter,
    )
    extracted = extract_beamformers(loop.values["W"], data.n_t)
    if extracted.power > data.p_tmax:
        factor = math.sqrt(data.p_tmax / extracted.power)
        extracted = extracted.scaled(factor, factor)
    return ActiveResult(extracted, loop)


@dataclasses.dataclass(frozen=True)
class PassiveResult:
    coeffs: StarCoefficients
    loop: LoopResult


def passive_reference(coeffs: StarCoefficients, layout: SurfaceLayout) -> Dict[str, Matrix]:
    """``Q_r`` and ``Q_t`` of a coefficient pair, restricted to the layout."""
    theta_r = coefficient_vector(coeffs, Side.REFLECT)[layout.reflect]
    theta_t = coefficient_vector(coeffs, Side.TRANSMIT)[layout.transmit]
    return {"Q_r": np.outer(theta_r.conj(), theta_r), "Q_t": np.outer(theta_t.conj(), theta_t)}


def balance_split(values: Mapping[str, Matrix], layout: SurfaceLayout) -> Dict[str, Matrix]:
    """
    Rescale ``Q_r`` and ``Q_t`` by the same congruence so that the reflected and
    transmitted energies of every element sum to exactly one. The solver meets the
    split only to its own tolerance.
    """
    total = np.zeros(layout.m)
    total[layout.reflect] += np.real(np.diag(values["Q_r"]))
    total[layout.transmit] += np.real(np.diag(values["Q_t"]))
    if np.any(total <= 0):
        raise DegenerateInputError("an element carries no energy on either side")
    scale = 1.0 / np.sqrt(total)
    r, t = scale[layout.reflect], scale[layout.transmit]
    return {"Q_r": values["Q_r"] * np.outer(r, r), "Q_t": values["Q_t"] * np.outer(t, t)}


def extract_coefficients(values: Mapping[str, Matrix], layout: SurfaceLayout) -> StarCoefficients:
    theta_r = np.zeros(layout.m, dtype=complex)
    theta_t = np.zeros(layout.m, dtype=complex)
    q_r, q_t = values["Q_r"], values["Q_t"]
    theta_r[layout.reflect] = extract_rank_one(q_r.conj(), np.real(np.diag(q_r)))
    theta_t[layout.transmit] = extract_rank_one(q_t.conj(), np.real(np.diag(q_t)))
    return project_feasible(np.abs(theta_r) ** 2, np.abs(theta_t) ** 2, np.angle(theta_r), np.angle(theta_t))


def solve_passive_loop(
    data: PassiveSubproblemData,
    coeffs: StarCoefficients,
    settings: Optional[SolverSettings] = None,
    *,
    backend: Optional[sdp_backend.SdpBackend] = None,
    outer_iter: Optional[int] = None,
) -> PassiveResult:
    """
    Run the penalty loop of the surface subproblem from ``coeffs`` and extract
    coefficients from the final ``Q_r``, ``Q_t``.

    :raise SubproblemError: If a semidefinite program is not solved to optimality.
    """
    settings = settings or SolverSettings()

    def build(values: Mapping[str, Matrix], penalty: float) -> Tuple[SdpProblem, SurrogateSet]:
        surrogates = taylor_passive(data, values)
        principals = {name: principal_eigenvector(x) for name, x in values.items()}
        return passive_problem(data, surrogates, penalty, principals), surrogates

    loop = _penalty_loop(
        "passive",
        passive_reference(coeffs, data.layout),
        build,
        data.p1,
        settings.passive_tol,
        settings.passive_penalty_scale,
        settings,
        backend,
        outer_iter,
        repair=lambda values: balance_split(values, data.layout),
    )
    return PassiveResult(extract_coefficients(loop.values, data.layout), loop)


@dataclasses.dataclass(frozen=True)
class ConstraintReport:
    """Signed margins of every constraint of the joint problem; negative means violated."""

    margins: Mapping[str, float]
    tolerance: float
    p_ea_star: float

    @property
    def passed(self) -> bool:
        return all(margin >= -self.tolerance for margin in self.margins.values())

    @property
    def worst(self) -> Tuple[str, float]:
        name = min(self.margins, key=lambda key: self.margins[key])
        return name, self.margins[name]


def check_constraints(
    channel: ChannelRealization,
    coeffs: StarCoefficients,
    beams: Beamformers,
    config: SystemConfig,
    phi_eps: float,
    layout: Optional[SurfaceLayout] = None,
    tolerance: float = 1e-6,
) -> ConstraintReport:
    """
    Evaluate the joint problem's constraints directly from the rate and detection
    formulas, independently of any subproblem matrices. Power and covertness margins
    are relative; rate margins are in bits.
    """
    layout = layout or SurfaceLayout.star(channel.geometry.m)
    breakdown = evaluate_rates(channel, coeffs, beams, config)
    terms = asymptotic_terms(channel, beams, coefficient_vector(coeffs, Side.REFLECT))
    margins = {"power": (config.p_tmax - beams.power) / config.p_tmax}
    bound = terms.beta + phi_eps * terms.alpha
    margins["covertness"] = (terms.beta - phi_eps * terms.alpha) / bound if bound > 0 else 0.0
    margins["covert_rate"] = breakdown.covert_rate - config.r_b_star
    for k in range(beams.k_users):
        margins[f"secure_h0[{k}]"] = float(breakdown.secure_h0[k]) - config.r_s0_star
        margins[f"secure_h1[{k}]"] = float(breakdown.secure_h1[k]) - config.r_s1_star
    margins["layout"] = 0.0 if layout.admits(coeffs) else -1.0
    p_ea_star = terms.p_ea_star if bound > 0 else 1.0
    return ConstraintReport(margins, tolerance, p_ea_star)


@dataclasses.dataclass(frozen=True)
class InitialPoint:
    beams: Beamformers
    coeffs: StarCoefficients
    attempts: int


def _zero_forcing_directions(channels: Matrix) -> Matrix:
    """Unit-norm regularized zero-forcing beams, one column per row of ``channels``."""
    gram = channels @ channels.conj().T
    regularization = 1e-3 * float(np.real(np.trace(gram))) / len(gram)
    directions = channels.conj().T @ np.linalg.inv(gram + regularization * np.eye(len(gram)))
    norms = np.linalg.norm(directions, axis=0)
    return directions / np.where(norms > 0, norms, 1.0)


def _initial_beams(
    channel: ChannelRealization, coeffs: StarCoefficients, config: SystemConfig, phi_eps: float
) -> Beamformers:
    theta_r = coefficient_vector(coeffs, Side.REFLECT)
    theta_t = coefficient_vector(coeffs, Side.TRANSMIT)
    eff_b = effective_channel(channel.h_rb, theta_r, channel.h_br)
    eff_k = np.stack([effective_channel(h, theta_t, channel.h_br) for h in channel.h_rk])
    directions = _zero_forcing_directions(np.vstack([eff_b[np.newaxis, :], eff_k]))
    d_b, d_k = directions[:, 0], directions[:, 1:].T
    k_users = len(d_k)

    covert_budget = config.p_tmax / (k_users + 1)
    gains = np.maximum(np.abs(np.einsum("kn,kn->k", eff_k, d_k)) ** 2 / config.noise_k, 1e-300)
    # equal received SNR across security users
    secure_powers = (config.p_tmax - covert_budget) * (1.0 / gains) / np.sum(1.0 / gains)
    secure = Beamformers(d_b, d_k * np.sqrt(secure_powers)[:, None])
    terms = asymptotic_terms(channel, Beamformers(d_b, secure.w_k), theta_r)
    covert_power = covert_budget
    if terms.alpha > 0:
        covert_power = min(covert_power, 0.999 * terms.beta / (phi_eps * terms.alpha))
    return Beamformers(d_b * math.sqrt(covert_power), secure.w_k)


def init_feasible(
    channel: ChannelRealization,
    config: SystemConfig,
    rng: np.random.Generator,
    *,
    phi_eps: Optional[float] = None,
    layout: Optional[SurfaceLayout] = None,
    settings: Optional[SolverSettings] = None,
) -> InitialPoint:
    """
    Find a point satisfying every constraint: split the surface power according to the
    layout with random phases, point zero-forcing beams at the effective channels,
    equalize the security users' SNR, and shrink the covert beam until the
    covertness ratio holds. Restart with fresh phases on failure.

    :raise InitializationError: If no attempt is feasible.
    """
    settings = settings or SolverSettings()
    layout = layout or SurfaceLayout.star(channel.geometry.m)
    if phi_eps is None:
        phi_eps = covert_threshold_ratio(config.epsilon, settings.bisection_interval, settings.bisection_tol)
    worst: Tuple[str, float] = ("", -math.inf)
    for attempt in range(1, settings.init_restarts + 1):
        coeffs = layout.random_coefficients(rng)
        beams = _initial_beams(channel, coeffs, config, phi_eps)
        report = check_constraints(channel, coeffs, beams, config, phi_eps, layout, settings.feasibility_tol)
        if report.passed:
            _logger.info("Found a feasible starting point after %d attempt(s)", attempt)
            return InitialPoint(beams, coeffs, attempt)
        name, margin = report.worst
        _logger.debug("Start attempt %d infeasible: %s margin %.4g", attempt, name, margin)
        if margin > worst[1]:
            worst = (name, margin)
    raise InitializationError(
        f"no feasible starting point after {settings.init_restarts} attempts; "
        f"closest attempt violates {worst[0]} by {-worst[1]:.4g}",
        constraint=worst[0],
        margin=worst[1],
    )


@dataclasses.dataclass(frozen=True)
class OuterRecord:
    outer_iter: int
    objective: float
    covert_rate: float
    min_secure_h0: float
    min_secure_h1: float
    eta_cs: float
    eta_r: float
    eta_t: float
    inner_i: int
    inner_q: int
    wall_s: float

    def to_row(self) -> TraceRow:
        return dataclasses.asdict(self)  # type: ignore[return-value]


@dataclasses.dataclass(frozen=True)
class OptimizationTrace:
    records: Tuple[OuterRecord, ...]
    converged: bool
    beams: Beamformers
    coeffs: StarCoefficients
    breakdown: RateBreakdown
    phi_eps: float
    p_ea_star: float
    """Large-system minimum detection error probability at the solution"""
    p_e_star: float
    """Minimum detection error probability for the realized warden channel"""
    init_attempts: int
    rejected_updates: int
    statuses: Tuple[str, ...]

    @property
    def objective(self) -> float:
        return self.records[-1].objective

    @property
    def objectives(self) -> List[float]:
        return [record.objective for record in self.records]

    def to_rows(self) -> List[TraceRow]:
        return [record.to_row() for record in self.records]


def run_alternating_optimization(
    channel: ChannelRealization,
    config: SystemConfig,
    settings: Optional[SolverSettings] = None,
    *,
    rng: Optional[np.random.Generator] = None,
    layout: Optional[SurfaceLayout] = None,
    start: Optional[Tuple[Beamformers, StarCoefficients]] = None,
) -> OptimizationTrace:
    """
    Alternate the two subproblems until the averaged rate changes by at most
    ``settings.outer_tol``. An update is kept only if the independent constraint
    check passes and the objective does not drop by more than
    ``settings.monotone_tol``.

    :param start: Feasible starting point; found with :py:func:`init_feasible` if omitted.
    :raise ConfigurationError: If there are fewer than two security users.
    :raise InitializationError: If no feasible start exists or ``start`` is infeasible.
    :raise SubproblemError: If a subproblem fails, with the outer iteration attached.
    """
    settings = settings or SolverSettings()
    if channel.k_users < 2:
        raise ConfigurationError("the optimizer needs at least two security users")
    layout = layout or SurfaceLayout.star(channel.geometry.m)
    phi_eps = covert_threshold_ratio(config.epsilon, settings.bisection_interval, settings.bisection_tol)
    backend = sdp_backend.get_backend(settings.backend)
    tol = settings.feasibility_tol

    if start is None:
        initial = init_feasible(
            channel, config, rng or np.random.default_rng(), phi_eps=phi_eps, layout=layout, settings=settings
        )
        beams, coeffs, attempts = initial.beams, initial.coeffs, initial.attempts
    else:
        beams, coeffs = start
        attempts = 0
        report = check_constraints(channel, coeffs, beams, config, phi_eps, layout, tol)
        if not report.passed:
            name, margin = report.worst
            raise InitializationError(f"starting point violates {name} by {-margin:.4g}", name, margin)

    breakdown = evaluate_rates(channel, coeffs, beams, config)
    started = time.perf_counter()
    records = [
        OuterRecord(
            0,
            breakdown.average_sum,
            breakdown.covert_rate,
            breakdown.min_secure_h0,
            breakdown.min_secure_h1,
            0.0,
            0.0,
            0.0,
            0,
            0,
            0.0,
        )
    ]
    rejected = 0
    statuses: List[str] = []
    converged = False

    def consider(stage: str, new_beams: Beamformers, new_coeffs: StarCoefficients) -> bool:
        nonlocal beams, coeffs, breakdown, rejected
        report = check_constraints(channel, new_coeffs, new_beams, config, phi_eps, layout, tol)
        candidate = evaluate_rates(channel, new_coeffs, new_beams, config)
        if not report.passed:
            reason = "violates %s by %.3g" % (report.worst[0], -report.worst[1])
        elif candidate.average_sum < breakdown.average_sum - settings.monotone_tol:
            reason = "lowers the objective from %.8g to %.8g" % (breakdown.average_sum, candidate.average_sum)
        else:
            beams, coeffs, breakdown = new_beams, new_coeffs, candidate
            return True
        rejected += 1
        _logger.warning("Rejected %s update: %s; keeping the previous point", stage, reason)
        return False

    for t in range(1, settings.max_outer + 1):
        previous = breakdown.average_sum
        try:
            active = solve_active_loop(
                build_active(channel, coeffs, config, phi_eps), beams, settings, backend=backend, outer_iter=t
            )
            consider("active", active.beams, coeffs)
            passive = solve_passive_loop(
                build_passive(channel, beams, config, phi_eps, layout), coeffs, settings, backend=backend, outer_iter=t
            )
            consider("passive", beams, passive.coeffs)
        except SubproblemError as e:
            raise SubproblemError(
                e.args[0], e.stage, outer_iter=t, inner_iter=e.inner_iter, constraints=e.constraints
            ) from e
        statuses.append("stalled" if active.loop.stalled or passive.loop.stalled else "ok")
        change = abs(breakdown.average_sum - previous)
        records.append(
            OuterRecord(
                t,
                breakdown.average_sum,
                breakdown.covert_rate,
                breakdown.min_secure_h0,
                breakdown.min_secure_h1,
                active.loop.residual,
                _normalized_residual(passive.loop.values["Q_r"]),
                _normalized_residual(passive.loop.values["Q_t"]),
                len(active.loop.records),
                len(passive.loop.records),
                time.perf_counter() - started,
            )
        )
        _logger.info("Outer iteration %d: objective %.8g (change %.3g)", t, breakdown.average_sum, change)
        if change <= settings.outer_tol:
            converged = True
            break
    else:
        _logger.warning("Alternating optimization hit %d outer iterations", settings.max_outer)

    theta_r = coefficient_vector(coeffs, Side.REFLECT)
    lambda0, lambda1 = lambda_terms(channel, beams, theta_r)
    terms = asymptotic_terms(channel, beams, theta_r)
    return OptimizationTrace(
        records=tuple(records),
        converged=converged,
        beams=beams,
        coeffs=coeffs,
        breakdown=breakdown,
        phi_eps=phi_eps,
        p_ea_star=terms.p_ea_star if terms.alpha + terms.beta > 0 else 1.0,
        p_e_star=min_dep(lambda0, lambda1),
        init_attempts=attempts,
        rejected_updates=rejected,
        statuses=tuple(statuses),
    )


def complexity_estimate(config: SystemConfig, settings: Optional[SolverSettings] = None) -> Dict[str, float]:
    """
    Rough per-iteration cost model: each interior-point iteration forms and factors a
    Schur complement (``m n^3 + m^2 n^2 + m^3`` flops for ``m`` constraints on real
    dimension ``n``) and needs ``O(sqrt(n) log(1/tol))`` iterations.
    """
    settings = settings or SolverSettings()
    k, n_t, m = config.k_users, config.n_t, config.m
    log_blocks = 1 + 4 * k
    rate_constraints = 1 + 2 * k

    def ipm_flops(n: int, constraints: int) -> float:
        per_iteration = constraints * n**3 + constraints**2 * n**2 + constraints**3
        return per_iteration * math.sqrt(n) * math.log(1.0 / settings.sdp_tol)

    active_dim = 2 * (k + 1) * n_t
    active_constraints = 2 + rate_constraints + 2 * log_blocks
    passive_dim = 4 * m
    passive_constraints = m + 1 + rate_constraints + 2 * log_blocks
    active = ipm_flops(active_dim, active_constraints)
    passive = ipm_flops(passive_dim, passive_constraints)
    return {
        "active_real_dim": float(active_dim),
        "active_constraints": float(active_constraints),
        "active_flops_per_solve": active,
        "passive_real_dim": float(passive_dim),
        "passive_constraints": float(passive_constraints),
        "passive_flops_per_solve": passive,
        "bisection_steps": float(math.ceil(math.log2(settings.bisection_interval / settings.bisection_tol))),
        "flops_per_outer_iteration": settings.max_inner * (active + passive),
    }


__all__ = [
    "ActiveResult",
    "ActiveSubproblemData",
    "ConstraintReport",
    "DcSurrogate",
    "InitialPoint",
    "InnerRecord",
    "LogTerm",
    "OptimizationTrace",
    "OuterRecord",
    "PassiveResult",
    "PassiveSubproblemData",
    "SurrogateSet",
    "active_problem",
    "balance_split",
    "build_active",
    "build_passive",
    "check_constraints",
    "complexity_estimate",
    "extract_beamformers",
    "extract_coefficients",
    "init_feasible",
    "passive_problem",
    "passive_reference",
    "principal_eigenvector",
    "rank_one_penalty",
    "rank_one_residual",
    "run_alternating_optimization",
    "solve_active_loop",
    "solve_passive_loop",
    "taylor_active",
    "taylor_passive",
]
