"""Ensembles of quantum states with priors, and cyclic-symmetry metadata.

A StateEnsemble is the package's central input type: N density matrices
rho_j with prior probabilities eta_j. Ensembles generated by a cyclic group
(rho_{j+1} = V^j rho_1 V^-j with V^N = 1 and [V, rho] = 0 for the average
state rho) carry a SymmetrySpec so solvers can pick covariant closed forms.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import (
    DegenerateCoefficientError,
    InfeasibleInputError,
    InvalidPhasesError,
)
from .operators import TOL_RECON, eig_hermitian, require_hermitian, support_rank

PRIOR_TOL = 1e-12
TRACE_TOL = 1e-10
PHASE_TOL = 1e-10
COEFF_NORM_TOL = 1e-12
COEFF_ZERO_TOL = 1e-12


def default_phases(order: int, dim: int) -> np.ndarray:
    """Pairwise-distinct unit eigenphases exp(2 pi i l / order) for l = 1..dim.

    Requires dim <= order; there are only ``order`` distinct roots of unity
    of that order.
    """
    if dim > order:
        raise InvalidPhasesError(
            f"no {dim} pairwise-distinct phases of order {order} exist (need dim <= order)"
        )
    l = np.arange(1, dim + 1)
    return np.exp(2j * np.pi * l / order)


@dataclass(frozen=True)
class SymmetrySpec:
    """Cyclic symmetry data: group order, eigenphases of the generator, and
    the reference object the orbit was built from.

    phases are the eigenvalues of the unitary generator V in the eigenbasis
    of the average state; each must be unit modulus and an order-th root of
    unity. reference is either the first density matrix or, for orbits of a
    pure state, its coefficient vector in that same eigenbasis.
    """

    order: int
    phases: np.ndarray
    reference: np.ndarray = field(repr=False)

    def __post_init__(self):
        phases = np.asarray(self.phases, dtype=complex).reshape(-1)
        object.__setattr__(self, "phases", phases)
        object.__setattr__(self, "reference", np.asarray(self.reference, dtype=complex))
        if self.order < 1:
            raise InvalidPhasesError(f"group order must be >= 1, got {self.order}")
        if np.max(np.abs(np.abs(phases) - 1.0), initial=0.0) > PHASE_TOL:
            raise InvalidPhasesError("eigenphases must have unit modulus")
        if np.max(np.abs(phases**self.order - 1.0), initial=0.0) > PHASE_TOL:
            raise InvalidPhasesError(f"eigenphases must be {self.order}-th roots of unity")

    @property
    def dim(self) -> int:
        return self.phases.size

    def generator(self) -> np.ndarray:
        """The unitary V as a diagonal matrix."""
        return np.diag(self.phases)

    def distinct(self, tol: float = PHASE_TOL) -> bool:
        """Whether all eigenphases are pairwise distinct."""
        p = self.phases
        diff = np.abs(p[:, None] - p[None, :])
        np.fill_diagonal(diff, 1.0)
        return bool(diff.min() > tol) if p.size else True


@dataclass(frozen=True)
class StateEnsemble:
    """N quantum states with prior probabilities.

    Attributes
    ----------
    dim : Hilbert-space dimension d.
    priors : real array (N,).
    states : complex array (N, d, d) of density matrices.
    symmetry : optional SymmetrySpec when the ensemble is a cyclic orbit.

    Construction only enforces shapes; use :func:`validate` for the physical
    invariants (positivity, traces, symmetry consistency).
    """

    dim: int
    priors: np.ndarray
    states: np.ndarray
    symmetry: SymmetrySpec | None = None

    def __post_init__(self):
        priors = np.asarray(self.priors, dtype=float).reshape(-1)
        states = np.asarray(self.states, dtype=complex)
        if states.ndim != 3 or states.shape[1:] != (self.dim, self.dim):
            raise InfeasibleInputError(
                f"states must have shape (N, {self.dim}, {self.dim}), got {states.shape}"
            )
        if priors.shape[0] != states.shape[0]:
            raise InfeasibleInputError(
                f"{priors.shape[0]} priors for {states.shape[0]} states"
            )
        if states.shape[0] == 0:
            raise InfeasibleInputError("ensemble must contain at least one state")
        if self.symmetry is not None and self.symmetry.dim != self.dim:
            raise InfeasibleInputError(
                f"symmetry phases have length {self.symmetry.dim}, expected {self.dim}"
            )
        object.__setattr__(self, "priors", priors)
        object.__setattr__(self, "states", states)

    @property
    def n_states(self) -> int:
        return self.states.shape[0]


def average_state(ensemble: StateEnsemble) -> np.ndarray:
    """Prior-weighted average rho = sum_j eta_j rho_j."""
    return np.einsum("j,jab->ab", ensemble.priors, ensemble.states)


@dataclass(frozen=True)
class Violation:
    name: str
    magnitude: float
    message: str


@dataclass(frozen=True)
class ValidationReport:
    violations: list[Violation]
    flags: list[str]

    @property
    def ok(self) -> bool:
        return not self.violations


def validate(ensemble: StateEnsemble) -> ValidationReport:
    """Check the physical invariants of an ensemble.

    Violations (hard failures): non-positive priors, priors not summing to
    one, non-Hermitian or non-PSD states, traces away from one, and, when a
    SymmetrySpec is attached, states that do not match the cyclic orbit or
    an average state that does not commute with the generator.

    Flags (informational): rank-deficient average state, zero-probability
    symmetry mismatch candidates, etc. A flagged ensemble is still usable.
    """
    v: list[Violation] = []
    flags: list[str] = []
    e = ensemble

    if float(e.priors.min()) <= 0.0:
        v.append(Violation("prior_positivity", -float(e.priors.min()),
                           "priors must be strictly positive"))
    gap = abs(float(e.priors.sum()) - 1.0)
    if gap > PRIOR_TOL:
        v.append(Violation("prior_normalization", gap, "priors must sum to 1"))

    worst_herm = 0.0
    worst_neg = 0.0
    worst_trace = 0.0
    for j in range(e.n_states):
        a = e.states[j]
        worst_herm = max(worst_herm, float(np.max(np.abs(a - a.conj().T))))
        h = 0.5 * (a + a.conj().T)
        w = np.linalg.eigvalsh(h)
        worst_neg = max(worst_neg, -float(w[0]))
        worst_trace = max(worst_trace, abs(float(np.trace(h).real) - 1.0))
    if worst_herm > 1e-9:
        v.append(Violation("state_hermiticity", worst_herm,
                           "states must be Hermitian"))
    if worst_neg > 1e-9:
        v.append(Violation("state_positivity", worst_neg,
                           "states must be positive semidefinite"))
    if worst_trace > TRACE_TOL:
        v.append(Violation("state_trace", worst_trace, "states must have unit trace"))

    rho = average_state(e)
    rho_h = 0.5 * (rho + rho.conj().T)
    if support_rank(rho_h) < e.dim:
        flags.append("average state is rank deficient; solvers will restrict to its support")

    if e.symmetry is not None:
        s = e.symmetry
        if e.n_states != s.order:
            v.append(Violation("symmetry_order", abs(e.n_states - s.order),
                               f"symmetry order {s.order} != number of states {e.n_states}"))
        else:
            vu = s.generator()
            dev_orbit = 0.0
            for j in range(1, e.n_states):
                vj = np.diag(s.phases**j)
                dev_orbit = max(dev_orbit, float(np.max(np.abs(
                    e.states[j] - vj @ e.states[0] @ vj.conj().T))))
            if dev_orbit > TOL_RECON:
                v.append(Violation("symmetry_orbit", dev_orbit,
                                   "states are not the cyclic orbit of the first state"))
            dev_comm = float(np.max(np.abs(vu @ rho_h - rho_h @ vu)))
            if dev_comm > TOL_RECON:
                v.append(Violation("symmetry_commutation", dev_comm,
                                   "average state must commute with the symmetry generator"))
            dev_prior = float(np.max(np.abs(e.priors - 1.0 / e.n_states)))
            if dev_prior > PRIOR_TOL:
                v.append(Violation("symmetry_priors", dev_prior,
                                   "a cyclic orbit must carry uniform priors"))
            if not s.distinct():
                flags.append("symmetry eigenphases are not pairwise distinct; "
                             "rank-one closed forms are unavailable")

    return ValidationReport(violations=v, flags=flags)


def build_symmetric_ensemble(
    reference: np.ndarray,
    order: int,
    phases: np.ndarray | None = None,
) -> StateEnsemble:
    """Cyclic orbit of a reference state under V = diag(phases).

    reference may be a density matrix (d, d) or a coefficient vector (d,)
    of a pure state, both expressed in the eigenbasis of the generator.
    phases defaults to exp(2 pi i l / order), l = 1..d.
    """
    reference = np.asarray(reference, dtype=complex)
    if reference.ndim == 1:
        dim = reference.shape[0]
        nrm = float(np.linalg.norm(reference))
        if abs(nrm - 1.0) > 1e-9:
            raise InfeasibleInputError(f"coefficient vector has norm {nrm:.12f}, expected 1")
        rho1 = np.outer(reference, reference.conj())
    elif reference.ndim == 2 and reference.shape[0] == reference.shape[1]:
        dim = reference.shape[0]
        rho1 = require_hermitian(reference, name="reference state")
        w = np.linalg.eigvalsh(rho1)
        if float(w[0]) < -1e-9:
            raise InfeasibleInputError(f"reference state has eigenvalue {float(w[0]):.3e}")
        if abs(float(np.trace(rho1).real) - 1.0) > TRACE_TOL:
            raise InfeasibleInputError("reference state must have unit trace")
    else:
        raise InfeasibleInputError(f"reference must be a vector or square matrix, got shape {reference.shape}")

    if phases is None:
        ph = default_phases(order, dim)
    else:
        ph = np.asarray(phases, dtype=complex).reshape(-1)
        if ph.shape[0] != dim:
            raise InvalidPhasesError(f"{ph.shape[0]} phases for dimension {dim}")
    spec = SymmetrySpec(order=order, phases=ph, reference=reference)

    states = np.empty((order, dim, dim), dtype=complex)
    for j in range(order):
        vj = ph**j
        states[j] = (vj[:, None] * rho1) * vj.conj()[None, :]
    priors = np.full(order, 1.0 / order)
    return StateEnsemble(dim=dim, priors=priors, states=states, symmetry=spec)


def build_depolarized_family(
    coefficients: np.ndarray,
    order: int,
    purity: float,
    phases: np.ndarray | None = None,
) -> StateEnsemble:
    """Cyclic orbit of rho_1 = purity |psi><psi| + (1 - purity) 1/d.

    coefficients are the components of |psi> in the generator eigenbasis;
    they must be normalized and all nonzero (a vanishing component makes the
    orbit live in a smaller invariant problem and is rejected).
    """
    c = np.asarray(coefficients, dtype=complex).reshape(-1)
    dim = c.shape[0]
    nrm = float(np.linalg.norm(c))
    if abs(nrm - 1.0) > COEFF_NORM_TOL:
        raise InfeasibleInputError(f"coefficients have norm {nrm:.15f}, expected 1")
    if float(np.min(np.abs(c))) <= COEFF_ZERO_TOL:
        raise DegenerateCoefficientError(
            "every coefficient must be nonzero; got a vanishing component"
        )
    if not 0.0 <= purity <= 1.0:
        raise InfeasibleInputError(f"purity must lie in [0, 1], got {purity}")

    rho1 = purity * np.outer(c, c.conj()) + (1.0 - purity) * np.eye(dim) / dim
    if phases is None:
        ph = default_phases(order, dim)
    else:
        ph = np.asarray(phases, dtype=complex).reshape(-1)
        if ph.shape[0] != dim:
            raise InvalidPhasesError(f"{ph.shape[0]} phases for dimension {dim}")
    spec = SymmetrySpec(order=order, phases=ph, reference=c)
    states = np.empty((order, dim, dim), dtype=complex)
    for j in range(order):
        vj = ph**j
        states[j] = (vj[:, None] * rho1) * vj.conj()[None, :]
    priors = np.full(order, 1.0 / order)
    return StateEnsemble(dim=dim, priors=priors, states=states, symmetry=spec)
