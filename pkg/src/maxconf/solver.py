"""Solvers and certificates for maximum-confidence measurements.

A maximum-confidence measurement keeps every conclusive outcome at its top
confidence C_j, which confines each detection operator to

    Pi_j = W_j a_j W_j^dagger,   a_j >= 0,

with W_j the detection block of the discrimination geometry. The remaining
freedom is the choice of the positive blocks a_j, constrained by
sum_j Pi_j <= 1; the detection rate R = sum_j Tr(rho Pi_j) is linear in the
blocks, so minimizing the inconclusive probability Q = 1 - R is a
semidefinite program. This module provides:

* solve_rank1_symmetric: closed form for cyclic ensembles whose transformed
  states have a nondegenerate top eigenvalue,
* solve_numeric: a self-contained log-barrier Newton solver for arbitrary
  ensembles (any degeneracies, no symmetry needed),
* verify_certificate: checks a dual certificate (Z, detection set) against
  every optimality condition and reports the residuals,
* perturbation_witness: for a failed certificate, constructs a deformed
  measurement whose dual gap goes negative at first order, exhibiting the
  suboptimality concretely.

Optimality conditions checked by the verifier, for dual operator Z:

    Z >= 0,                 Lambda_j (Z - rho) Lambda_j >= 0,
    Z Pi_0 = 0,             Lambda_j (Z - rho) Pi_j = 0,
    Tr Z = R,

plus the rank complementarity rank Z + rank Pi_0 <= d and
rank Z >= max_j rank(Lambda_j rho_j Lambda_j). Any Z passing all conditions
proves the measurement optimal; the verifier does not care where Z came
from.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .ensembles import StateEnsemble, average_state
from .errors import (
    DegenerateTopEigenvalueError,
    InfeasibleInputError,
    InvalidPhasesError,
    NoNegativeEigenvalueError,
    NotConvergedError,
    NotSymmetricError,
)
from .geometry import MCGeometry, _reduce_with_basis, geometry
from .operators import eig_hermitian, opnorm

POS_TOL = 1e-8
EQ_TOL = 1e-8
DEFAULT_GAP_TOL = 1e-8
DEFAULT_MAX_ITERATIONS = 10000
TIE_RTOL = 1e-9
OVERLAP_CUTOFF = 1e-14
KERNEL_CUTOFF = 1e-6
RANK_CUTOFF = 1e-7
ZERO_PROB = 1e-14

_BARRIER_MU = 10.0
_CENTER_TOL = 1e-10
_FINAL_CENTER_TOL = 1e-12
_MAX_CENTER_STEPS = 80
_STALL_TOL = 1e-6


def _sym(a: np.ndarray) -> np.ndarray:
    return 0.5 * (a + a.conj().T)


@dataclass(frozen=True)
class DetectionSet:
    """A complete measurement: inconclusive operator first, then the
    conclusive detection operators in ensemble order.

    operators has shape (N + 1, d, d); operators[0] is the inconclusive
    outcome Pi_0 and operators[j] detects state j for j = 1..N.
    """

    operators: np.ndarray

    def __post_init__(self):
        ops = np.asarray(self.operators, dtype=complex)
        if ops.ndim != 3 or ops.shape[1] != ops.shape[2] or ops.shape[0] < 1:
            raise InfeasibleInputError(f"operators must have shape (N+1, d, d), got {ops.shape}")
        object.__setattr__(self, "operators", ops)

    @classmethod
    def from_conclusive(cls, conclusive: np.ndarray) -> "DetectionSet":
        """Build a complete set by assigning the leftover weight 1 - sum
        to the inconclusive outcome."""
        conclusive = np.asarray(conclusive, dtype=complex)
        d = conclusive.shape[-1]
        pi0 = np.eye(d, dtype=complex) - conclusive.sum(axis=0)
        return cls(np.concatenate([pi0[None], conclusive], axis=0))

    @property
    def dim(self) -> int:
        return self.operators.shape[-1]

    @property
    def n_conclusive(self) -> int:
        return self.operators.shape[0] - 1

    @property
    def inconclusive(self) -> np.ndarray:
        return self.operators[0]

    @property
    def conclusive(self) -> np.ndarray:
        return self.operators[1:]

    def completeness_residual(self) -> float:
        d = self.dim
        return opnorm(self.operators.sum(axis=0) - np.eye(d))

    def min_eigenvalue(self) -> float:
        return min(
            float(np.linalg.eigvalsh(_sym(op))[0]) for op in self.operators
        )


@dataclass(frozen=True)
class MeasurementStats:
    """Outcome statistics of a detection set on an ensemble."""

    outcome_probabilities: np.ndarray
    confidences: np.ndarray
    failure_probability: float
    detection_rate: float
    correct_probability: float
    zero_probability_outcomes: list[int]


def evaluate_measurement(ensemble: StateEnsemble, detection: DetectionSet) -> MeasurementStats:
    """Outcome probabilities, achieved confidences, and summary rates.

    The confidence of conclusive outcome j is the conditional probability
    that state j was present given outcome j fired. Outcomes with
    probability below 1e-14 get confidence nan and are listed in
    zero_probability_outcomes.
    """
    if detection.dim != ensemble.dim:
        raise InfeasibleInputError(
            f"detection dimension {detection.dim} != ensemble dimension {ensemble.dim}"
        )
    if detection.n_conclusive != ensemble.n_states:
        raise InfeasibleInputError(
            f"{detection.n_conclusive} conclusive outcomes for {ensemble.n_states} states"
        )
    rho = average_state(ensemble)
    n = ensemble.n_states
    probs = np.empty(n + 1)
    probs[0] = float(np.trace(detection.inconclusive @ rho).real)
    confidences = np.full(n, np.nan)
    zero: list[int] = []
    correct = 0.0
    for j in range(1, n + 1):
        pi = detection.operators[j]
        pj = float(np.trace(pi @ rho).real)
        probs[j] = pj
        joint = float(
            np.trace(pi @ (ensemble.priors[j - 1] * ensemble.states[j - 1])).real
        )
        correct += joint
        if pj > ZERO_PROB:
            confidences[j - 1] = joint / pj
        else:
            zero.append(j)
    rate = float(probs[1:].sum())
    return MeasurementStats(
        outcome_probabilities=probs,
        confidences=confidences,
        failure_probability=probs[0],
        detection_rate=rate,
        correct_probability=correct,
        zero_probability_outcomes=zero,
    )


@dataclass(frozen=True)
class OptimalityCertificate:
    """Result of checking a dual operator Z against a detection set.

    conditions maps each condition name to its measured residual (signed
    where a sign is meaningful: *_min_eigenvalue entries are smallest
    eigenvalues, the rest are operator norms of quantities that should
    vanish). accepted is True when every condition passes at the stored
    tolerances and the rank complementarity holds.
    """

    z: np.ndarray
    rate: float
    conditions: dict[str, float]
    failures: list[str]
    accepted: bool
    rank_z: int
    rank_inconclusive: int
    min_rank_required: int
    rank_bound_ok: bool
    pos_tol: float
    eq_tol: float


def _rank(op: np.ndarray, cutoff: float = RANK_CUTOFF) -> int:
    w = np.linalg.eigvalsh(_sym(op))
    scale = max(1.0, float(np.max(np.abs(w))) if w.size else 0.0)
    return int(np.count_nonzero(np.abs(w) > cutoff * scale))


def verify_certificate(
    ensemble: StateEnsemble,
    detection: DetectionSet,
    z: np.ndarray,
    geo: MCGeometry | None = None,
    pos_tol: float = POS_TOL,
    eq_tol: float = EQ_TOL,
) -> OptimalityCertificate:
    """Check every optimality condition of (detection, Z) and measure residuals.

    Accepts if the measurement is a valid complete POVM, Z and the support
    slacks are positive semidefinite down to -pos_tol, the orthogonality and
    stationarity products vanish within eq_tol, |Tr Z - R| <= eq_tol, and
    the rank complementarity holds on the computed ranks.
    """
    if geo is None:
        geo = geometry(ensemble)
    z = _sym(np.asarray(z, dtype=complex))
    rho = geo.rho
    n = ensemble.n_states
    pi0 = detection.inconclusive

    rate = 0.0
    for j in range(n):
        rate += float(np.trace(rho @ detection.conclusive[j]).real)

    conditions: dict[str, float] = {}
    conditions["povm_min_eigenvalue"] = detection.min_eigenvalue()
    conditions["completeness_residual"] = detection.completeness_residual()
    conditions["z_min_eigenvalue"] = float(np.linalg.eigvalsh(z)[0])

    slack_min = np.inf
    stationarity = 0.0
    for j in range(n):
        lam = geo.supports[j]
        slack = _sym(lam @ (z - rho) @ lam)
        slack_min = min(slack_min, float(np.linalg.eigvalsh(slack)[0]))
        stationarity = max(
            stationarity, opnorm(lam @ (z - rho) @ detection.conclusive[j])
        )
    conditions["support_slack_min_eigenvalue"] = float(slack_min)
    conditions["inconclusive_orthogonality"] = opnorm(z @ pi0)
    conditions["stationarity_residual"] = stationarity
    conditions["trace_gap"] = abs(float(np.trace(z).real) - rate)

    rank_z = _rank(z)
    rank_pi0 = _rank(pi0)
    lower = 0
    for j in range(n):
        lam = geo.supports[j]
        lower = max(lower, _rank(_sym(lam @ ensemble.states[j] @ lam)))
    rank_ok = (rank_z + rank_pi0 <= ensemble.dim) and (rank_z >= lower)

    failures = []
    if conditions["povm_min_eigenvalue"] < -pos_tol:
        failures.append("povm_min_eigenvalue")
    if conditions["completeness_residual"] > eq_tol:
        failures.append("completeness_residual")
    if conditions["z_min_eigenvalue"] < -pos_tol:
        failures.append("z_min_eigenvalue")
    if conditions["support_slack_min_eigenvalue"] < -pos_tol:
        failures.append("support_slack_min_eigenvalue")
    if conditions["inconclusive_orthogonality"] > eq_tol:
        failures.append("inconclusive_orthogonality")
    if conditions["stationarity_residual"] > eq_tol:
        failures.append("stationarity_residual")
    if conditions["trace_gap"] > eq_tol:
        failures.append("trace_gap")
    if not rank_ok:
        failures.append("rank_bound")

    return OptimalityCertificate(
        z=z,
        rate=rate,
        conditions=conditions,
        failures=failures,
        accepted=not failures,
        rank_z=rank_z,
        rank_inconclusive=rank_pi0,
        min_rank_required=lower,
        rank_bound_ok=rank_ok,
        pos_tol=pos_tol,
        eq_tol=eq_tol,
    )


@dataclass(frozen=True)
class SolveReport:
    """Outcome of a solve: the measurement, its rates, and its certificate."""

    mode: str
    detection: DetectionSet
    detection_rate: float
    failure_probability: float
    confidences: np.ndarray
    correct_probability: float
    certificate: OptimalityCertificate
    certified: bool
    iterations: int = 0
    support_scale: float = 1.0


def solve_rank1_symmetric(
    ensemble: StateEnsemble, geo: MCGeometry | None = None
) -> SolveReport:
    """Closed-form optimal measurement for a cyclic ensemble whose
    transformed states have nondegenerate top eigenvalues.

    Works in the eigenbasis of the symmetry generator (where the average
    state is diagonal with entries r_l). With nu the top eigenvector of the
    first transformed state, the optimal weight is

        alpha = (1/N) min_l r_l / |<l|nu>|^2

    over components with nonvanishing overlap, giving failure probability
    Q = 1 - N alpha, conclusive operators the cyclic orbit of
    alpha (rho^(-1/2) nu)(rho^(-1/2) nu)^dagger, and a diagonal dual Z
    spread uniformly over the minimizing components. The returned report
    carries the verified certificate.
    """
    if ensemble.symmetry is None:
        raise NotSymmetricError("ensemble carries no symmetry data")
    sym = ensemble.symmetry
    if not sym.distinct():
        raise InvalidPhasesError(
            "closed form requires pairwise-distinct symmetry eigenphases"
        )
    if geo is None:
        geo = geometry(ensemble)
    n, d = ensemble.n_states, ensemble.dim
    if int(geo.degeneracies.max()) > 1:
        raise DegenerateTopEigenvalueError(
            f"top eigenvalue degeneracy {int(geo.degeneracies.max())} > 1; "
            "use the numerical solver"
        )

    rho = geo.rho
    off = float(np.max(np.abs(rho - np.diag(np.diag(rho)))))
    if off > 1e-9:
        raise NotSymmetricError(
            f"average state is not diagonal in the symmetry eigenbasis (off-diagonal {off:.3e})"
        )
    r = np.diag(rho).real

    nu = geo.top_vectors[0][:, 0]
    overlaps = np.abs(nu) ** 2
    usable = overlaps > OVERLAP_CUTOFF
    if not np.any(usable):
        raise InfeasibleInputError("top eigenvector has no overlap with the average state basis")
    ratios = np.full(d, np.inf)
    ratios[usable] = r[usable] / overlaps[usable]
    alpha = float(ratios.min()) / n

    w1 = geo.inv_sqrt_rho @ nu
    pi1 = alpha * np.outer(w1, w1.conj())
    phases = sym.phases
    conclusive = np.empty((n, d, d), dtype=complex)
    for j in range(n):
        vj = phases**j
        conclusive[j] = (vj[:, None] * pi1) * vj.conj()[None, :]
    detection = DetectionSet.from_conclusive(conclusive)

    # dual operator: weight N*alpha spread over the components achieving
    # the minimum ratio (ties clustered at relative 1e-9)
    rmin = float(ratios.min())
    cluster = np.where(usable & (ratios <= rmin * (1.0 + TIE_RTOL)))[0]
    zdiag = np.zeros(d)
    zdiag[cluster] = n * alpha / cluster.size
    z = np.diag(zdiag).astype(complex)

    certificate = verify_certificate(ensemble, detection, z, geo=geo)
    stats = evaluate_measurement(ensemble, detection)
    return SolveReport(
        mode="analytic",
        detection=detection,
        detection_rate=stats.detection_rate,
        failure_probability=stats.failure_probability,
        confidences=stats.confidences,
        correct_probability=stats.correct_probability,
        certificate=certificate,
        certified=certificate.accepted,
        iterations=0,
    )


@lru_cache(maxsize=64)
def _hermitian_basis(m: int) -> tuple[np.ndarray, ...]:
    """Orthonormal basis of m x m Hermitian matrices (trace inner product)."""
    basis = []
    for k in range(m):
        e = np.zeros((m, m), dtype=complex)
        e[k, k] = 1.0
        basis.append(e)
    inv_sqrt2 = 1.0 / np.sqrt(2.0)
    for k in range(m):
        for kp in range(k + 1, m):
            e = np.zeros((m, m), dtype=complex)
            e[k, kp] = inv_sqrt2
            e[kp, k] = inv_sqrt2
            basis.append(e)
            e = np.zeros((m, m), dtype=complex)
            e[k, kp] = 1j * inv_sqrt2
            e[kp, k] = -1j * inv_sqrt2
            basis.append(e)
    return tuple(basis)


def _barrier_solve(
    rho: np.ndarray,
    blocks: list[np.ndarray],
    gap_tol: float,
    max_newton: int,
    init_jitter: np.ndarray | None = None,
):
    """Maximize sum_j Tr(rho W_j a_j W_j^dagger) over a_j >= 0 with
    sum_j W_j a_j W_j^dagger <= 1, by log-barrier path following.

    Returns (a_blocks, newton_steps, gap) where gap is the exact duality
    gap bound nu / t_final of the final central point. Raises
    NotConvergedError if the Newton budget is exhausted first.
    """
    d = rho.shape[0]
    n = len(blocks)
    ms = [w.shape[1] for w in blocks]
    nu = d + sum(ms)
    bases = [_hermitian_basis(m) for m in ms]
    basis_arrays = [np.stack(b) for b in bases]
    dims = [m * m for m in ms]
    offsets = np.concatenate([[0], np.cumsum(dims)]).astype(int)
    total = int(offsets[-1])
    gains = [w.conj().T @ rho @ w for w in blocks]

    # strictly feasible start: scaled identities keeping the total below 1/2
    norm_sum = sum(opnorm(w @ w.conj().T) for w in blocks)
    c0 = 0.5 / max(norm_sum, 1e-300)
    a = [c0 * np.eye(m, dtype=complex) for m in ms]
    if init_jitter is not None:
        for j in range(n):
            a[j] = c0 * (np.eye(ms[j], dtype=complex) + init_jitter[j][: ms[j], : ms[j]])

    eye = np.eye(d, dtype=complex)
    steps = 0
    t = 1.0

    def assemble(aa):
        tot = np.zeros((d, d), dtype=complex)
        for j in range(n):
            tot += blocks[j] @ aa[j] @ blocks[j].conj().T
        return eye - _sym(tot)

    def in_domain(aa):
        for aj in aa:
            try:
                np.linalg.cholesky(_sym(aj))
            except np.linalg.LinAlgError:
                return False
        try:
            np.linalg.cholesky(assemble(aa))
        except np.linalg.LinAlgError:
            return False
        return True

    def center(t_val, tol):
        nonlocal a, steps
        lam2 = np.inf
        for _ in range(_MAX_CENTER_STEPS):
            if steps >= max_newton:
                raise NotConvergedError(
                    f"Newton budget {max_newton} exhausted at duality gap {nu / t_val:.3e}"
                )
            s = assemble(a)
            s_inv = _sym(np.linalg.inv(s))
            a_inv = [np.linalg.inv(_sym(aj)) for aj in a]
            cross = [[blocks[j].conj().T @ s_inv @ blocks[k] for k in range(n)] for j in range(n)]

            grad = np.empty(total)
            for j in range(n):
                gmat = t_val * gains[j] + a_inv[j] - cross[j][j]
                grad[offsets[j]:offsets[j + 1]] = np.einsum(
                    "rab,ba->r", basis_arrays[j], gmat
                ).real

            hess = np.zeros((total, total))
            for j in range(n):
                bj = basis_arrays[j]
                # curvature of the block barrier: only the diagonal blocks
                t1 = np.einsum("ab,rbc,cd,sda->rs", a_inv[j], bj, a_inv[j], bj).real
                sl_j = slice(offsets[j], offsets[j + 1])
                hess[sl_j, sl_j] -= t1
                for k in range(n):
                    bk = basis_arrays[k]
                    c_jk = cross[j][k]
                    t2 = np.einsum("rab,bc,scd,ad->rs", bj, c_jk, bk, c_jk.conj()).real
                    sl_k = slice(offsets[k], offsets[k + 1])
                    hess[sl_j, sl_k] -= t2

            try:
                dx = np.linalg.solve(hess, -grad)
            except np.linalg.LinAlgError:
                dx = np.linalg.lstsq(hess, -grad, rcond=None)[0]
            lam2 = float(grad @ dx)
            if lam2 <= tol:
                return
            lam = np.sqrt(max(lam2, 0.0))
            step = 1.0 if lam <= 0.25 else 1.0 / (1.0 + lam)
            deltas = [
                np.einsum("r,rab->ab", dx[offsets[j]:offsets[j + 1]], basis_arrays[j])
                for j in range(n)
            ]
            for _ in range(40):
                trial = [_sym(a[j] + step * deltas[j]) for j in range(n)]
                if in_domain(trial):
                    a = trial
                    break
                step *= 0.5
            else:
                raise NotConvergedError("Newton step could not stay in the feasible domain")
            steps += 1

        # At very large t the decrement can stall just above the target from
        # floating-point cancellation alone; a point deep in the quadratic
        # region is still an excellent center, so only a genuinely uncentered
        # iterate is treated as failure.
        if lam2 <= _STALL_TOL:
            return
        raise NotConvergedError(
            f"centering did not converge in {_MAX_CENTER_STEPS} steps at t = {t_val:.3e}"
        )

    center(t, _CENTER_TOL)
    while nu / t > gap_tol:
        t *= _BARRIER_MU
        center(t, _CENTER_TOL)
    center(t, _FINAL_CENTER_TOL)
    return a, steps, nu / t


def _recover_dual(
    geo: MCGeometry,
    detection: DetectionSet,
    rate: float,
) -> np.ndarray:
    """Least-squares dual operator consistent with complementary slackness.

    Z is constrained to the kernel of the inconclusive operator (so
    Z Pi_0 = 0 automatically) and fitted to the stationarity equations
    Lambda_j (Z - rho) Pi_j = 0 together with the normalization Tr Z = R.
    """
    d = geo.dim
    pi0 = _sym(detection.inconclusive)
    spec = eig_hermitian(pi0)
    kernel = spec.eigenvectors[:, np.abs(spec.eigenvalues) <= KERNEL_CUTOFF]
    k = kernel.shape[1]
    if k == 0:
        return np.zeros((d, d), dtype=complex)

    basis = _hermitian_basis(k)
    candidates = [kernel @ e @ kernel.conj().T for e in basis]

    rows = []
    targets = []
    for j in range(detection.n_conclusive):
        lam = geo.supports[j]
        pij = detection.conclusive[j]
        lp = [lam @ f @ pij for f in candidates]
        target = lam @ geo.rho @ pij
        rows.append(np.stack([m.ravel() for m in lp], axis=1))
        targets.append(target.ravel())
    a_cx = np.concatenate(rows, axis=0)
    b_cx = np.concatenate(targets, axis=0)
    trace_row = np.array([[float(np.trace(f).real) for f in candidates]])
    a_re = np.concatenate([a_cx.real, a_cx.imag, trace_row], axis=0)
    b_re = np.concatenate([b_cx.real, b_cx.imag, [rate]])
    y, *_ = np.linalg.lstsq(a_re, b_re, rcond=None)
    z = np.einsum("r,rab->ab", y, np.stack(candidates))
    return _sym(z)


def _twirl(ops: np.ndarray, phases: np.ndarray) -> np.ndarray:
    """Group-average a detection set over the cyclic symmetry.

    ops[0] is the inconclusive operator (averaged in place), ops[j] for
    j >= 1 are relabeled cyclically while conjugating, which preserves the
    detection rate and completeness.
    """
    n = ops.shape[0] - 1
    out = np.zeros_like(ops)
    for k in range(n):
        vk = phases**k
        rot = (vk[:, None] * ops) * vk.conj()[None, :]
        out[0] += rot[0]
        for j in range(1, n + 1):
            src = 1 + (j - 1 - k) % n
            out[j] += rot[src]
    return out / n


def _twirl_single(op: np.ndarray, phases: np.ndarray, order: int) -> np.ndarray:
    out = np.zeros_like(op)
    for k in range(order):
        vk = phases**k
        out += (vk[:, None] * op) * vk.conj()[None, :]
    return out / order


def solve_numeric(
    ensemble: StateEnsemble,
    geo: MCGeometry | None = None,
    gap_tol: float = DEFAULT_GAP_TOL,
    max_iterations: int = DEFAULT_MAX_ITERATIONS,
    seed: int | None = None,
) -> SolveReport:
    """Numerically optimal maximum-confidence measurement for any ensemble.

    Restricts to the span of the detection supports (renormalizing rates by
    the carried probability), maximizes the detection rate over the positive
    coefficient blocks by log-barrier Newton path following, embeds the
    solution back, symmetrizes it over the cyclic group when the ensemble
    declares one, recovers a dual operator from complementary slackness, and
    verifies the certificate. The report's certified flag states whether the
    certificate passed; the measurement itself is returned either way.

    gap_tol bounds the duality gap of the barrier stage; if the certificate
    is rejected at that gap the solve is retried at tighter gaps (down to
    1e-10) because the recovered dual's residuals shrink with the gap. seed
    only affects the jittered restart used if a Newton run stalls (default
    taken from MAXCONF_SEED, else 0).
    """
    if geo is None:
        geo = geometry(ensemble)
    if seed is None:
        try:
            seed = int(os.environ.get("MAXCONF_SEED", "0") or 0)
        except ValueError:
            seed = 0

    reduced, scale, basis = _reduce_with_basis(ensemble, geo)
    if reduced is ensemble:
        geo_r = geo
    else:
        geo_r = geometry(reduced)

    blocks = geo_r.detection_blocks
    rho_r = geo_r.rho
    n, d = ensemble.n_states, ensemble.dim
    symmetric = ensemble.symmetry is not None and ensemble.symmetry.order == n

    ladder = [gap_tol]
    for tight in (1e-9, 1e-10):
        if tight < ladder[-1]:
            ladder.append(tight)

    total_steps = 0
    report = None
    for stage_gap in ladder:
        try:
            a_blocks, steps, gap = _barrier_solve(rho_r, blocks, stage_gap, max_iterations)
        except NotConvergedError:
            rng = np.random.default_rng(seed)
            jitter = []
            mmax = max(w.shape[1] for w in blocks)
            for _ in blocks:
                q = rng.standard_normal((mmax, mmax)) + 1j * rng.standard_normal((mmax, mmax))
                q = _sym(q)
                q *= 0.3 / max(opnorm(q), 1e-300)
                jitter.append(q)
            a_blocks, steps, gap = _barrier_solve(
                rho_r, blocks, stage_gap, max_iterations, init_jitter=jitter
            )
        total_steps += steps

        conclusive = np.empty((n, d, d), dtype=complex)
        for j in range(n):
            pj = blocks[j] @ a_blocks[j] @ blocks[j].conj().T
            conclusive[j] = _sym(basis @ pj @ basis.conj().T)

        if symmetric:
            stacked = DetectionSet.from_conclusive(conclusive).operators
            stacked = _twirl(stacked, ensemble.symmetry.phases)
            detection = DetectionSet(stacked)
        else:
            detection = DetectionSet.from_conclusive(conclusive)

        stats = evaluate_measurement(ensemble, detection)
        z = _recover_dual(geo, detection, stats.detection_rate)
        if symmetric:
            z = _twirl_single(z, ensemble.symmetry.phases, n)
        certificate = verify_certificate(ensemble, detection, z, geo=geo)

        report = SolveReport(
            mode="numeric",
            detection=detection,
            detection_rate=stats.detection_rate,
            failure_probability=stats.failure_probability,
            confidences=stats.confidences,
            correct_probability=stats.correct_probability,
            certificate=certificate,
            certified=certificate.accepted,
            iterations=total_steps,
            support_scale=scale,
        )
        if report.certified:
            break
    return report


@dataclass(frozen=True)
class PerturbationWitness:
    """A measurement deformation exhibiting a certificate failure.

    kind is "support-slack" when the negative eigenvalue sits in some
    Lambda_j (Z - rho) Lambda_j (outcome records which j, 1-based) and
    "dual-negativity" when Z itself has one (outcome 0). gap is the dual
    functional

        Tr(Z Pi'_0) + sum_j Tr[Lambda_j (Z - rho) Lambda_j Pi'_j]

    of the deformed measurement, whose leading behavior is
    predicted_first_order = -2 epsilon mu; a strictly negative gap shows the
    original measurement was not optimal for the claimed Z.
    """

    kind: str
    outcome: int
    mu: float
    epsilon: float
    gap: float
    baseline_gap: float
    predicted_first_order: float
    trace_minus_rate: float
    detection: DetectionSet
    completeness_residual: float
    min_eigenvalue: float


def perturbation_witness(
    ensemble: StateEnsemble,
    detection: DetectionSet,
    z: np.ndarray,
    epsilon: float,
    geo: MCGeometry | None = None,
    pos_tol: float = POS_TOL,
) -> PerturbationWitness:
    """Construct the deformed measurement that exploits a negative
    certificate eigenvalue.

    Finds the most negative eigenvalue mu among Z and the support slacks
    Lambda_j (Z - rho) Lambda_j with eigenvector |u>, contracts every
    conclusive operator by (1 - epsilon |u><u|), and hands the released
    weight epsilon(2 - epsilon)|u><u| to the outcome that realizes the
    negativity (the inconclusive one for a negative eigenvalue of Z). The
    resulting set is a valid measurement by construction, and its dual
    functional drops below the baseline by 2 epsilon mu to first order.

    Raises NoNegativeEigenvalueError when neither Z nor any slack has an
    eigenvalue below -pos_tol.
    """
    if geo is None:
        geo = geometry(ensemble)
    z = _sym(np.asarray(z, dtype=complex))
    rho = geo.rho
    n = ensemble.n_states

    best_val = np.inf
    best_vec = None
    best_kind = ""
    best_outcome = -1
    spec_z = eig_hermitian(z)
    if float(spec_z.eigenvalues[-1]) < best_val:
        best_val = float(spec_z.eigenvalues[-1])
        best_vec = spec_z.eigenvectors[:, -1]
        best_kind = "dual-negativity"
        best_outcome = 0
    slacks = []
    for j in range(n):
        lam = geo.supports[j]
        slack = _sym(lam @ (z - rho) @ lam)
        slacks.append(slack)
        spec = eig_hermitian(slack)
        if float(spec.eigenvalues[-1]) < best_val:
            best_val = float(spec.eigenvalues[-1])
            best_vec = spec.eigenvectors[:, -1]
            best_kind = "support-slack"
            best_outcome = j + 1

    if best_val >= -pos_tol:
        raise NoNegativeEigenvalueError(
            f"no certificate eigenvalue below -{pos_tol:.1e} (smallest is {best_val:.3e})"
        )
    mu = -best_val
    u = best_vec / np.linalg.norm(best_vec)
    proj = np.outer(u, u.conj())
    d = ensemble.dim
    contract = np.eye(d, dtype=complex) - epsilon * proj
    released = epsilon * (2.0 - epsilon) * proj

    primed = np.empty((n, d, d), dtype=complex)
    for j in range(n):
        primed[j] = _sym(contract @ detection.conclusive[j] @ contract)
    if best_kind == "support-slack":
        primed[best_outcome - 1] += released
    deformed = DetectionSet.from_conclusive(primed)

    def dual_functional(det: DetectionSet) -> float:
        val = float(np.trace(z @ det.inconclusive).real)
        for j in range(n):
            val += float(np.trace(slacks[j] @ det.conclusive[j]).real)
        return val

    gap = dual_functional(deformed)
    baseline = dual_functional(detection)
    rate_primed = sum(
        float(np.trace(rho @ primed[j]).real) for j in range(n)
    )
    return PerturbationWitness(
        kind=best_kind,
        outcome=best_outcome,
        mu=mu,
        epsilon=epsilon,
        gap=gap,
        baseline_gap=baseline,
        predicted_first_order=-2.0 * epsilon * mu,
        trace_minus_rate=float(np.trace(z).real) - rate_primed,
        detection=deformed,
        completeness_residual=deformed.completeness_residual(),
        min_eigenvalue=deformed.min_eigenvalue(),
    )
