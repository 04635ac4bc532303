"""Hermitian-operator primitives used throughout the package.

All operators are plain complex numpy arrays of shape (d, d). The helpers
here pin down the numerical conventions the rest of the package relies on:

* eigendecompositions are deterministic (descending eigenvalues, each
  eigenvector's largest-modulus component made real and positive),
* support detection uses a single relative cutoff,
* fractional and negative matrix powers are restricted to the support.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NonHermitianError, NotPSDError

TOL_HERM = 1e-9
TOL_PSD = 1e-9
TOL_ORTH = 1e-10
TOL_RECON = 1e-10
SUPPORT_RTOL = 1e-9


def support_cutoff(eigenvalues: np.ndarray) -> float:
    """Absolute threshold below which eigenvalues count as zero.

    Relative to the largest eigenvalue magnitude, with a floor of 1 so that
    all-zero or tiny operators do not produce a vanishing cutoff.
    """
    scale = float(np.max(np.abs(eigenvalues))) if eigenvalues.size else 0.0
    return SUPPORT_RTOL * max(scale, 1.0)


def require_hermitian(a: np.ndarray, tol: float = TOL_HERM, name: str = "operator") -> np.ndarray:
    """Validate Hermiticity and return the exactly symmetrized operator.

    Parameters
    ----------
    a : array_like, shape (d, d)
    tol : maximum allowed entrywise deviation between ``a`` and its adjoint.
    name : label used in the error message.

    Returns
    -------
    0.5 * (a + a^dagger) as a complex array, so downstream eigh calls see an
    exactly Hermitian matrix.
    """
    a = np.asarray(a, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise NonHermitianError(f"{name} must be square, got shape {a.shape}")
    dev = float(np.max(np.abs(a - a.conj().T))) if a.size else 0.0
    if dev > tol:
        raise NonHermitianError(f"{name} deviates from Hermiticity by {dev:.3e} (tol {tol:.1e})")
    return 0.5 * (a + a.conj().T)


@dataclass(frozen=True)
class Spectrum:
    """Eigendecomposition of a Hermitian operator.

    Attributes
    ----------
    eigenvalues : real array (d,), sorted in descending order.
    eigenvectors : complex array (d, d), column k is the eigenvector for
        ``eigenvalues[k]``, phase-fixed so its largest-modulus component is
        real and positive (lowest index wins ties).
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def reconstruct(self) -> np.ndarray:
        v, w = self.eigenvectors, self.eigenvalues
        return (v * w) @ v.conj().T


def eig_hermitian(a: np.ndarray, tol: float = TOL_HERM) -> Spectrum:
    """Deterministic eigendecomposition of a Hermitian operator.

    Raises NonHermitianError if ``a`` is not Hermitian within ``tol``.
    """
    a = require_hermitian(a, tol=tol)
    w, v = np.linalg.eigh(a)
    w = w[::-1].copy()
    v = v[:, ::-1].copy()
    for k in range(v.shape[1]):
        col = v[:, k]
        i = int(np.argmax(np.abs(col)))
        pivot = col[i]
        if abs(pivot) > 0.0:
            col *= np.conj(pivot) / abs(pivot)
        # force the pivot exactly real; the imaginary dust is rotation noise
        col[i] = col[i].real
    return Spectrum(eigenvalues=w, eigenvectors=v)


def is_psd(a: np.ndarray, tol: float = TOL_PSD) -> tuple[bool, float]:
    """Check positive semidefiniteness.

    Returns (ok, min_eigenvalue); ok means the smallest eigenvalue is
    >= -tol.
    """
    spec = eig_hermitian(a)
    lo = float(spec.eigenvalues[-1]) if spec.eigenvalues.size else 0.0
    return lo >= -tol, lo


def psd_power(a: np.ndarray, exponent: float, tol: float = TOL_PSD) -> np.ndarray:
    """Matrix power of a positive semidefinite operator.

    Non-negative exponents clip tiny negative eigenvalues to zero; negative
    exponents invert only on the support (eigenvalues above the support
    cutoff), returning the pseudo-power that vanishes on the kernel.

    Raises NotPSDError if an eigenvalue is below -tol.
    """
    spec = eig_hermitian(a)
    w, v = spec.eigenvalues, spec.eigenvectors
    if w.size and float(w[-1]) < -tol:
        raise NotPSDError(f"operator has eigenvalue {float(w[-1]):.3e} < -{tol:.1e}")
    if exponent >= 0:
        pw = np.clip(w, 0.0, None) ** exponent
    else:
        cut = support_cutoff(w)
        pw = np.where(w > cut, w, 1.0) ** exponent
        pw[w <= cut] = 0.0
    return (v * pw) @ v.conj().T


def support_projector(a: np.ndarray, tol: float = TOL_PSD) -> np.ndarray:
    """Orthogonal projector onto the support (range) of a PSD operator."""
    spec = eig_hermitian(a)
    w, v = spec.eigenvalues, spec.eigenvectors
    if w.size and float(w[-1]) < -tol:
        raise NotPSDError(f"operator has eigenvalue {float(w[-1]):.3e} < -{tol:.1e}")
    keep = w > support_cutoff(w)
    vs = v[:, keep]
    return vs @ vs.conj().T


def support_rank(a: np.ndarray, cutoff_rtol: float = SUPPORT_RTOL) -> int:
    """Number of eigenvalues above the relative support cutoff."""
    w = eig_hermitian(a).eigenvalues
    scale = float(np.max(np.abs(w))) if w.size else 0.0
    return int(np.count_nonzero(np.abs(w) > cutoff_rtol * max(scale, 1.0)))


def opnorm(a: np.ndarray) -> float:
    """Spectral norm (largest singular value)."""
    return float(np.linalg.norm(a, 2))


def projector_onto_span(operators: list[np.ndarray] | np.ndarray) -> np.ndarray:
    """Projector onto the combined ranges of a family of PSD operators.

    The range of a sum of PSD operators is the span of the individual
    ranges, so one support computation on the sum suffices.
    """
    total = np.sum(np.asarray(operators, dtype=complex), axis=0)
    return support_projector(total)


def orthonormal_columns(cols: np.ndarray, tol: float = TOL_ORTH) -> np.ndarray:
    """Orthonormal basis for the column span, via SVD with a rank cutoff."""
    if cols.size == 0:
        return cols.reshape(cols.shape[0], 0)
    u, s, _ = np.linalg.svd(cols, full_matrices=False)
    keep = s > max(tol, s[0] * 1e-12) if s.size else np.zeros(0, dtype=bool)
    return u[:, keep]
