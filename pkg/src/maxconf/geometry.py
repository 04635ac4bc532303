"""Geometry of maximum-confidence discrimination.

For an ensemble {eta_j, rho_j} with average state rho, the confidence of
outcome j is the largest eigenvalue C_j of the transformed state

    rho~_j = rho^(-1/2) (eta_j rho_j) rho^(-1/2)

with the inverse square root taken on the support of rho. The transformed
states resolve the support projector of rho, so the C_j and their top
eigenspaces fix everything a maximum-confidence measurement can do. This
module computes that data once and hands it to the solvers:

* P_j: projector onto the top eigenspace of rho~_j (degeneracy m_j),
* Lambda_j: projector onto rho^(-1/2) applied to that eigenspace, the
  subspace any confidence-C_j detection operator must live in.

Lambda_j is computed two independent ways (orthonormalization of the mapped
eigenvectors, and the congruence formula through (P_j rho^-1 P_j)^+) and the
results are cross-checked; a disagreement means the input is too
ill-conditioned to trust and raises GeometryInconsistencyError.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .ensembles import StateEnsemble, SymmetrySpec, average_state, validate
from .errors import (
    DegenerateMappingError,
    GeometryInconsistencyError,
    InfeasibleInputError,
)
from .operators import (
    TOL_RECON,
    eig_hermitian,
    opnorm,
    orthonormal_columns,
    projector_onto_span,
    psd_power,
    support_cutoff,
    support_projector,
)

TOL_CONF = 1e-9
DEGENERACY_RTOL = 1e-8


@dataclass(frozen=True)
class MCGeometry:
    """Spectral data of the transformed states of an ensemble.

    Arrays are indexed by outcome j = 0..N-1 (matching ensemble order).

    Attributes
    ----------
    dim : ambient dimension.
    rho : average state.
    rho_support : projector onto the support of rho.
    inv_sqrt_rho : rho^(-1/2) on the support.
    transformed : (N, d, d) array of rho~_j.
    confidences : (N,) top eigenvalues C_j.
    degeneracies : (N,) multiplicities m_j of the top eigenvalues.
    top_projectors : (N, d, d) projectors P_j.
    top_vectors : list of (d, m_j) orthonormal top-eigenvector blocks.
    detection_blocks : list of (d, m_j) blocks W_j = rho^(-1/2) @ top_vectors[j];
        every confidence-C_j detection operator is W_j a_j W_j^dagger with
        a_j >= 0.
    supports : (N, d, d) projectors Lambda_j onto the column span of W_j.
    """

    dim: int
    rho: np.ndarray
    rho_support: np.ndarray
    inv_sqrt_rho: np.ndarray
    transformed: np.ndarray
    confidences: np.ndarray
    degeneracies: np.ndarray
    top_projectors: np.ndarray
    top_vectors: list[np.ndarray]
    detection_blocks: list[np.ndarray]
    supports: np.ndarray


def transformed_states(ensemble: StateEnsemble) -> np.ndarray:
    """The operators rho^(-1/2) eta_j rho_j rho^(-1/2), shape (N, d, d)."""
    rho = average_state(ensemble)
    rih = psd_power(rho, -0.5)
    out = np.empty_like(ensemble.states)
    for j in range(ensemble.n_states):
        out[j] = rih @ (ensemble.priors[j] * ensemble.states[j]) @ rih
    return out


def geometry(ensemble: StateEnsemble) -> MCGeometry:
    """Compute the full discrimination geometry of a valid ensemble."""
    report = validate(ensemble)
    if not report.ok:
        msgs = "; ".join(f"{u.name} ({u.magnitude:.3e})" for u in report.violations)
        raise InfeasibleInputError(f"ensemble fails validation: {msgs}")

    rho = average_state(ensemble)
    rho = 0.5 * (rho + rho.conj().T)
    rho_supp = support_projector(rho)
    rih = psd_power(rho, -0.5)
    rinv = psd_power(rho, -1.0)

    n, d = ensemble.n_states, ensemble.dim
    transformed = np.empty((n, d, d), dtype=complex)
    confidences = np.empty(n)
    degeneracies = np.empty(n, dtype=int)
    top_projectors = np.empty((n, d, d), dtype=complex)
    top_vectors: list[np.ndarray] = []
    blocks: list[np.ndarray] = []
    supports = np.empty((n, d, d), dtype=complex)

    for j in range(n):
        tj = rih @ (ensemble.priors[j] * ensemble.states[j]) @ rih
        tj = 0.5 * (tj + tj.conj().T)
        transformed[j] = tj
        spec = eig_hermitian(tj)
        w, v = spec.eigenvalues, spec.eigenvectors
        c = float(w[0])
        confidences[j] = c
        # top cluster: eigenvalues within a relative gap of the maximum
        thresh = c - DEGENERACY_RTOL * max(abs(c), 1e-300)
        m = int(np.count_nonzero(w >= thresh))
        degeneracies[j] = m
        vtop = v[:, :m]
        top_vectors.append(vtop)
        top_projectors[j] = vtop @ vtop.conj().T

        wj = rih @ vtop
        blocks.append(wj)
        lam_span = orthonormal_columns(wj)
        lam = lam_span @ lam_span.conj().T

        # independent route: congruence through the pseudo-inverse of
        # P_j rho^-1 P_j, which must give the same projector
        pj = top_projectors[j]
        lam_alt = rih @ psd_power(pj @ rinv @ pj, -1.0) @ rih
        dev = opnorm(lam - lam_alt)
        if dev > TOL_RECON:
            raise GeometryInconsistencyError(
                f"two support computations for outcome {j + 1} disagree by {dev:.3e}; "
                "the ensemble is too ill-conditioned"
            )
        supports[j] = 0.5 * (lam + lam.conj().T)

    return MCGeometry(
        dim=d,
        rho=rho,
        rho_support=rho_supp,
        inv_sqrt_rho=rih,
        transformed=transformed,
        confidences=confidences,
        degeneracies=degeneracies,
        top_projectors=top_projectors,
        top_vectors=top_vectors,
        detection_blocks=blocks,
        supports=supports,
    )


def _reduce_with_basis(
    ensemble: StateEnsemble, geo: MCGeometry | None = None
) -> tuple[StateEnsemble, float, np.ndarray]:
    """Restrict to the span of the detection supports.

    Returns (reduced ensemble, scale, basis) where basis B is a (d, d')
    isometry from the reduced space into the original one, and scale is the
    probability weight Tr(rho Lambda) the reduced problem carries: any
    detection rate R' found on the reduced ensemble corresponds to
    R = scale * R' on the original.

    If the span is already the whole space the ensemble is returned as is
    with scale 1 and the identity basis.
    """
    if geo is None:
        geo = geometry(ensemble)
    d = ensemble.dim
    lam = projector_onto_span(geo.supports)
    spec = eig_hermitian(lam)
    keep = spec.eigenvalues > 0.5
    rank = int(np.count_nonzero(keep))
    if rank == d:
        return ensemble, 1.0, np.eye(d, dtype=complex)

    # prefer canonical coordinate columns when the span projector is
    # diagonal; keeps a diagonal symmetry generator representable
    diag_dev = float(np.max(np.abs(lam - np.diag(np.diag(lam)))))
    canonical = diag_dev <= 1e-12
    if canonical:
        idx = np.where(np.abs(np.diag(lam).real - 1.0) < 0.5)[0]
        basis = np.eye(d, dtype=complex)[:, idx]
    else:
        basis = spec.eigenvectors[:, keep]

    scale = float(np.trace(lam @ geo.rho).real)
    if scale <= 0.0:
        raise InfeasibleInputError("detection span carries zero probability")

    weights = np.array([
        float(np.trace(lam @ ensemble.states[j]).real) for j in range(ensemble.n_states)
    ])
    new_priors = ensemble.priors * weights / scale
    new_states = np.empty((ensemble.n_states, rank, rank), dtype=complex)
    for j in range(ensemble.n_states):
        if weights[j] <= 0.0:
            raise InfeasibleInputError(
                f"state {j + 1} has no weight on the detection span; cannot renormalize"
            )
        s = basis.conj().T @ ensemble.states[j] @ basis / weights[j]
        new_states[j] = 0.5 * (s + s.conj().T)

    symmetry = None
    if ensemble.symmetry is not None and canonical:
        sub = ensemble.symmetry.phases[idx]
        ref = ensemble.symmetry.reference
        if ref.ndim == 2:
            ref_sub = ref[np.ix_(idx, idx)]
        else:
            ref_sub = ref[idx]
        try:
            symmetry = SymmetrySpec(order=ensemble.symmetry.order, phases=sub, reference=ref_sub)
        except Exception:
            symmetry = None

    reduced = StateEnsemble(dim=rank, priors=new_priors, states=new_states, symmetry=symmetry)
    return reduced, scale, basis


def reduce_to_support(
    ensemble: StateEnsemble, geo: MCGeometry | None = None
) -> tuple[StateEnsemble, float]:
    """Equivalent ensemble on the span of the detection supports.

    The reduced ensemble has dimension equal to the rank of that span and
    strictly positive average state; scale = Tr(rho Lambda) converts rates
    back (R = scale * R'). Returns the input untouched with scale 1.0 when
    no reduction is possible.
    """
    reduced, scale, _ = _reduce_with_basis(ensemble, geo)
    return reduced, scale


def is_unambiguous(ensemble: StateEnsemble, geo: MCGeometry | None = None) -> tuple[bool, dict]:
    """Whether every confidence equals one, i.e. errorless discrimination.

    Equivalent to the top eigenspaces being mutually orthogonal and each
    detection support annihilating the other states. Returns (flag, residuals)
    with the measured deviations backing the answer.
    """
    if geo is None:
        geo = geometry(ensemble)
    n = ensemble.n_states
    conf_dev = float(np.max(np.abs(geo.confidences - 1.0)))
    cross_p = 0.0
    cross_state = 0.0
    for k in range(n):
        for j in range(n):
            if j == k:
                continue
            cross_p = max(cross_p, opnorm(geo.top_projectors[k] @ geo.top_projectors[j]))
            cross_state = max(cross_state, opnorm(geo.supports[k] @ ensemble.states[j]))
    ok = conf_dev <= TOL_CONF and cross_p <= TOL_CONF and cross_state <= TOL_CONF
    residuals = {
        "confidence_deviation": conf_dev,
        "projector_overlap": cross_p,
        "support_state_overlap": cross_state,
    }
    return ok, residuals


def two_state_components(
    ensemble: StateEnsemble, geo: MCGeometry | None = None
) -> tuple[np.ndarray, np.ndarray]:
    """Split the average state of a two-state ensemble along its top eigenspaces.

    For N = 2 ensembles whose transformed states act on the full support
    (P_1 + P_2 = support of rho, the generic situation), the average state
    splits as rho = q_1 sigma_1 + q_2 sigma_2 where sigma_j is the
    normalized piece rho^(1/2) P_j rho^(1/2) / q_j. The sigma_j are unit
    trace, mutually exclusive in the sense of the construction, and satisfy

        q_1 sigma_1 = [eta_1 rho_1 C_2 - eta_2 rho_2 (1 - C_2)] / (C_1 + C_2 - 1)

    which is the formula used here; the spectral route is recomputed as a
    cross-check. Returns (sigmas, weights) with sigmas of shape (2, d, d).

    Raises DegenerateMappingError when C_1 + C_2 = 1 (the split is singular)
    and InfeasibleInputError when the ensemble is not of this two-state form.
    """
    if ensemble.n_states != 2:
        raise InfeasibleInputError("component split is defined for exactly two states")
    if geo is None:
        geo = geometry(ensemble)
    c1, c2 = float(geo.confidences[0]), float(geo.confidences[1])
    denom = c1 + c2 - 1.0
    if abs(denom) <= TOL_CONF:
        raise DegenerateMappingError(
            f"confidences sum to one within tolerance (C1 + C2 - 1 = {denom:.3e})"
        )
    psum = geo.top_projectors[0] + geo.top_projectors[1]
    if opnorm(psum - geo.rho_support) > 1e-8:
        raise InfeasibleInputError(
            "top eigenspaces do not resolve the support of the average state; "
            "the two-state split does not apply"
        )

    # invert the 2x2 mixing eta_j rho_j = C_j sigma_j + (1 - C_k) sigma_k
    e1 = ensemble.priors[0] * ensemble.states[0]
    e2 = ensemble.priors[1] * ensemble.states[1]
    unnorm1 = (e1 * c2 - e2 * (1.0 - c2)) / denom
    unnorm2 = (e2 * c1 - e1 * (1.0 - c1)) / denom

    sqrt_rho = psd_power(geo.rho, 0.5)
    dev = max(
        opnorm(unnorm1 - sqrt_rho @ geo.top_projectors[0] @ sqrt_rho),
        opnorm(unnorm2 - sqrt_rho @ geo.top_projectors[1] @ sqrt_rho),
    )
    if dev > 1e-8:
        raise GeometryInconsistencyError(
            f"algebraic and spectral component splits disagree by {dev:.3e}"
        )

    weights = np.array([float(np.trace(unnorm1).real), float(np.trace(unnorm2).real)])
    sigmas = np.stack([unnorm1 / weights[0], unnorm2 / weights[1]])
    return sigmas, weights
