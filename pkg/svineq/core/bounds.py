"""
Perturbation bounds for concave transforms of singular values.

Reads the generalised Mirsky inequality as a certified bound: the
deviation sum |f(sigma(X)) - f(sigma(Y))| never exceeds the f-sum of the
leading singular values of X - Y.
"""

from __future__ import annotations

import logging
import math
from typing import List, Optional

import numpy as np

from svineq.config import resolve_tol
from svineq.core.concave import require_admissible
from svineq.core.errors import DimMismatch, InvalidDims, InvalidP
from svineq.core.inequalities import mirsky_gap_from_spectra
from svineq.core.spectra import singular_values
from svineq.models.linalg import ComplexMatrix, Spectrum
from svineq.models.schemas import BoundResult, ConcaveFn, GapReport, IndexSeq, PowerFn

logger = logging.getLogger(__name__)


def _tightness(report: GapReport, tol: float) -> Optional[float]:
    """actual / bound; 0 for 0/0 and None for a positive deviation against a zero bound."""
    if report.rhs > 0.0:
        return report.lhs / report.rhs
    return 0.0 if report.lhs <= tol * report.scale else None


def _result(
    report: GapReport,
    f: ConcaveFn,
    idx: IndexSeq,
    tol_rel: float | None,
    inputs: dict | None = None,
) -> BoundResult:
    tightness = _tightness(report, resolve_tol(tol_rel))
    if not report.holds:
        logger.warning("bound violated: actual=%.6g > bound=%.6g", report.lhs, report.rhs)
    return BoundResult(
        bound=report.rhs,
        actual=report.lhs,
        tightness=tightness,
        holds=report.holds,
        f=f,
        idx=idx,
        inputs=inputs,
    )


def _echo(x: ComplexMatrix, y: ComplexMatrix) -> dict:
    return {"x": x.to_payload().model_dump(), "y": y.to_payload().model_dump()}


def spectral_deviation_bound(
    x: ComplexMatrix,
    y: ComplexMatrix,
    f: ConcaveFn,
    idx: IndexSeq | None = None,
    tol_rel: float | None = None,
) -> BoundResult:
    """
    Certified bound on sum_k |f(sigma_{i_k}(X)) - f(sigma_{i_k}(Y))|.

    Parameters
    ----------
    x, y : ComplexMatrix
        Same-size square matrices.
    f : ConcaveFn
        Admissible concave function.
    idx : IndexSeq, optional
        Compared positions; defaults to all of (1..n).

    Returns
    -------
    BoundResult
        ``bound`` is sum_{k<=m} f(sigma_k(X - Y)) and ``actual`` the
        deviation sum; the inputs are echoed for replay.
    """
    if x.n != y.n:
        raise DimMismatch(f"X is {x.n}x{x.n} but Y is {y.n}x{y.n}")
    require_admissible(f)
    idx = IndexSeq.leading(x.n, x.n) if idx is None else idx
    report = mirsky_gap_from_spectra(
        singular_values(x), singular_values(y), singular_values(x - y), idx, f, tol_rel
    )
    return _result(report, f, idx, tol_rel, _echo(x, y))


def schatten_p_deviation(
    x: ComplexMatrix,
    y: ComplexMatrix,
    p: float,
    tol_rel: float | None = None,
) -> BoundResult:
    """
    sum_i |sigma_i(X)^p - sigma_i(Y)^p| <= ||X - Y||_p^p for 0 < p <= 1.

    ``schatten_norm`` carries the quasi-norm ||X - Y||_p itself.
    """
    if not (math.isfinite(p) and 0.0 < p <= 1.0):
        raise InvalidP(f"Schatten exponent must lie in (0, 1], got {p}")
    result = spectral_deviation_bound(x, y, PowerFn(p=p), None, tol_rel)
    return result.model_copy(update={"schatten_norm": result.bound ** (1.0 / p)})


def best_rank_approximation(x: ComplexMatrix, rank: int) -> ComplexMatrix:
    """Truncated SVD of ``x`` keeping the ``rank`` leading singular triplets."""
    if not 0 <= rank <= x.n:
        raise InvalidDims(f"rank must lie in [0, {x.n}], got {rank}")
    u, s, vh = np.linalg.svd(x.data)
    return ComplexMatrix((u[:, :rank] * s[:rank]) @ vh[:rank, :])


def truncation_deviation(
    x: ComplexMatrix,
    rank: int,
    f: ConcaveFn,
    tol_rel: float | None = None,
) -> BoundResult:
    """Bound for Y = the best rank-``rank`` approximation of X, over all n positions."""
    y = best_rank_approximation(x, rank)
    result = spectral_deviation_bound(x, y, f, None, tol_rel)
    inputs = dict(result.inputs or {})
    inputs["rank"] = rank
    return result.model_copy(update={"inputs": inputs})


def bound_profile(
    x: ComplexMatrix,
    y: ComplexMatrix,
    f: ConcaveFn,
    tol_rel: float | None = None,
) -> List[BoundResult]:
    """Bounds for idx = (1..m), m = 1..n; non-decreasing in m."""
    if x.n != y.n:
        raise DimMismatch(f"X is {x.n}x{x.n} but Y is {y.n}x{y.n}")
    require_admissible(f)
    sx: Spectrum = singular_values(x)
    sy: Spectrum = singular_values(y)
    sd: Spectrum = singular_values(x - y)
    profile = []
    for m in range(1, x.n + 1):
        idx = IndexSeq.leading(x.n, m)
        profile.append(_result(mirsky_gap_from_spectra(sx, sy, sd, idx, f, tol_rel), f, idx, tol_rel))
    return profile
