"""
Spectral routines: singular values, Hermitian eigenvalues, Wielandt embedding.

All heavy lifting is done by LAPACK through ``numpy.linalg``; this module
adds the ordering, validation and tolerance contracts the inequality
engine relies on.
"""

from __future__ import annotations

import logging

import numpy as np

from svineq.config import get_settings
from svineq.core.errors import NonFiniteEntry, NotHermitian
from svineq.models.linalg import ComplexMatrix, Spectrum, SpectrumKind

logger = logging.getLogger(__name__)


def _require_finite(x: ComplexMatrix) -> None:
    if not np.all(np.isfinite(x.data)):
        raise NonFiniteEntry("matrix has NaN or Inf entries")


def singular_values(x: ComplexMatrix) -> Spectrum:
    """
    All n singular values of ``x``, non-ascending.

    Parameters
    ----------
    x : ComplexMatrix
        Square complex matrix.

    Returns
    -------
    Spectrum
        ``kind=SINGULAR``; values satisfy sum(sigma**2) == ||x||_F**2 to
        working precision.
    """
    _require_finite(x)
    sigma = np.linalg.svd(x.data, compute_uv=False)
    sigma = np.sort(sigma)[::-1]
    return Spectrum(sigma, SpectrumKind.SINGULAR)


def is_hermitian(a: ComplexMatrix, tol: float | None = None) -> bool:
    """True when max|A - A*| <= tol * (1 + max|A|)."""
    tol = get_settings().hermitian_tol if tol is None else tol
    deviation = float(np.max(np.abs(a.data - a.data.conj().T)))
    return deviation <= tol * (1.0 + float(np.max(np.abs(a.data))))


def hermitian_eigenvalues(a: ComplexMatrix, tol: float | None = None) -> Spectrum:
    """
    Real eigenvalues of a Hermitian matrix, non-ascending.

    Raises
    ------
    NotHermitian
        If ``a`` deviates from its adjoint beyond the configured tolerance.
    """
    _require_finite(a)
    if not is_hermitian(a, tol):
        raise NotHermitian("matrix is not Hermitian within tolerance")
    # eigvalsh reads one triangle only; symmetrise so both contribute
    sym = 0.5 * (a.data + a.data.conj().T)
    eig = np.linalg.eigvalsh(sym)[::-1]
    return Spectrum(eig, SpectrumKind.HERMITIAN)


def wielandt_embed(a: ComplexMatrix) -> ComplexMatrix:
    """The 2n×2n Hermitian block matrix [[0, A], [A*, 0]]."""
    zero = np.zeros_like(a.data)
    return ComplexMatrix(np.block([[zero, a.data], [a.data.conj().T, zero]]))


def frobenius_energy(x: ComplexMatrix) -> float:
    """Sum of |x_ij|**2."""
    return float(np.sum(np.abs(x.data) ** 2))
