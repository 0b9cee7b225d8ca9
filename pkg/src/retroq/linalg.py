"""Dense complex-Hermitian linear algebra kernels.

All operators are plain ``numpy`` complex arrays. Tolerance policy, used
consistently by the higher-level modules:

* Hermiticity is required up to ``1e-10 * max(1, max|A|)`` (entrywise).
* Eigenvalues in ``[floor - 1e-12, floor)`` are treated as ``floor`` (clamped
  floating-point noise); anything more negative is a validation error.
* All logarithms are base 2.

Every function is pure; nothing here holds mutable state.
"""
from __future__ import annotations

from typing import Callable, NamedTuple

import numpy as np

from .errors import DomainError, ValidationError

HERM_RTOL = 1e-10
NEG_EIG_BAND = 1e-12
PHASE_TOL = 1e-8


def dag(a: np.ndarray) -> np.ndarray:
    """Conjugate transpose."""
    return a.conj().T


def require_matrix(a: np.ndarray, what: str = "matrix") -> np.ndarray:
    """Coerce to a 2-D complex array with finite entries."""
    a = np.asarray(a, dtype=complex)
    if a.ndim != 2:
        raise ValidationError(f"{what}: expected a 2-D array, got shape {a.shape}")
    if not np.isfinite(a).all():
        raise ValidationError(f"{what}: entries must be finite")
    return a


def herm_defect(a: np.ndarray) -> float:
    """Entrywise magnitude of the anti-Hermitian part, ``max|A - A^dag|``."""
    return float(np.abs(a - dag(a)).max()) if a.size else 0.0


def require_hermitian(a: np.ndarray, what: str = "operator", rtol: float = HERM_RTOL) -> np.ndarray:
    """Validate Hermiticity within tolerance and return the Hermitian part.

    Symmetrizing after the check removes the sub-tolerance residue so that
    downstream eigensolves see an exactly Hermitian matrix.
    """
    a = require_matrix(a, what)
    if a.shape[0] != a.shape[1]:
        raise ValidationError(f"{what}: expected square matrix, got shape {a.shape}")
    scale = max(1.0, float(np.abs(a).max())) if a.size else 1.0
    defect = herm_defect(a)
    if defect > rtol * scale:
        raise ValidationError(f"{what}: not Hermitian (defect {defect:.3e} > {rtol * scale:.3e})")
    return (a + dag(a)) / 2


class EigenDecomposition(NamedTuple):
    """Eigenvalues sorted ascending with matching orthonormal eigenvector columns."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def reconstruct(self) -> np.ndarray:
        v = self.eigenvectors
        return (v * self.eigenvalues) @ dag(v)


def eig_hermitian(a: np.ndarray, what: str = "operator") -> EigenDecomposition:
    """Eigendecomposition of a Hermitian matrix with a deterministic gauge.

    Eigenvalues come out ascending (LAPACK order); each eigenvector is
    rephased so its first component of magnitude > 1e-8 is real positive,
    making the output reproducible for identical input bytes.
    """
    h = require_hermitian(a, what)
    w, v = np.linalg.eigh(h)
    mags = np.abs(v)
    rows = (mags > PHASE_TOL).argmax(axis=0)
    pivots = v[rows, np.arange(v.shape[1])]
    sizes = np.abs(pivots)
    ok = sizes > PHASE_TOL
    phases = np.where(ok, pivots.conj() / np.where(ok, sizes, 1.0), 1.0)
    return EigenDecomposition(w, v * phases)


def clamp_eigenvalues(w: np.ndarray, floor: float, what: str = "operator") -> np.ndarray:
    """Snap eigenvalues in ``[floor - 1e-12, floor)`` up to ``floor``.

    Values below the noise band indicate genuinely invalid input and raise.
    """
    low = float(w.min()) if w.size else floor
    if low < floor - NEG_EIG_BAND:
        raise ValidationError(
            f"{what}: eigenvalue {low!r} below clamp floor {floor!r} beyond noise band"
        )
    return np.maximum(w, floor)


def matrix_function(
    a: np.ndarray,
    f: Callable[[np.ndarray], np.ndarray],
    clamp_floor: float | None = None,
    what: str = "operator",
) -> np.ndarray:
    """Apply a real scalar function to a Hermitian matrix via its spectrum.

    With ``clamp_floor`` set, eigenvalues are clamped (see
    :func:`clamp_eigenvalues`) before ``f`` is applied. A non-finite value of
    ``f`` at a post-clamp eigenvalue raises :class:`DomainError` carrying the
    offending eigenvalue.
    """
    w, v = eig_hermitian(a, what)
    if clamp_floor is not None:
        w = clamp_eigenvalues(w, clamp_floor, what)
    with np.errstate(divide="ignore", invalid="ignore"):
        fw = np.asarray(f(w), dtype=float)
    if not np.all(np.isfinite(fw)):
        bad = float(w[~np.isfinite(fw)][0])
        raise DomainError(f"{what}: function undefined at eigenvalue", bad)
    out = (v * fw) @ dag(v)
    return (out + dag(out)) / 2


def matrix_sqrt(a: np.ndarray, what: str = "operator") -> np.ndarray:
    """Principal square root of a PSD matrix (noise-band negatives clamped to 0)."""
    return matrix_function(a, np.sqrt, clamp_floor=0.0, what=what)


def schatten_norm(a: np.ndarray, p: float) -> float:
    """Schatten norm for p in {1, 2, inf}.

    p=2 is the Frobenius norm, p=1 the sum of singular values, p=inf the
    largest singular value.
    """
    a = require_matrix(a)
    if p == 2:
        return float(np.linalg.norm(a))
    s = np.linalg.svd(a, compute_uv=False)
    if p == 1:
        return float(s.sum())
    if p == np.inf:
        return float(s[0]) if s.size else 0.0
    raise ValidationError(f"schatten_norm: p must be 1, 2 or inf, got {p!r}")


def polar_unitary(a: np.ndarray) -> np.ndarray:
    """Unitary factor U of the polar decomposition ``A = U (A^dag A)^(1/2)``.

    Computed from the full SVD ``A = W S V^dag`` as ``U = W V^dag``, which
    also fixes a canonical, deterministic completion on the kernel of
    singular inputs.
    """
    a = require_matrix(a, "polar_unitary")
    if a.shape[0] != a.shape[1]:
        raise ValidationError(f"polar_unitary: expected square matrix, got shape {a.shape}")
    w, _, vh = np.linalg.svd(a)
    return w @ vh
