"""
Inequality engine.

Evaluates each inequality as a ``GapReport`` (lhs, rhs, slack) so callers
never compare floats themselves. Index arguments are 1-based throughout.
"""

from __future__ import annotations

import logging
from typing import Iterable, List, Optional, Sequence, Tuple

import numpy as np

from svineq.core.concave import evaluate_array, hook_decompose, odd_extension, require_admissible
from svineq.core.errors import DimMismatch, NegativeSpectrum
from svineq.core.indices import partition_sets
from svineq.core.spectra import singular_values
from svineq.models.linalg import ComplexMatrix, Spectrum
from svineq.models.schemas import (
    ConcaveFn,
    Convention,
    GapReport,
    HookFn,
    IndexPartition,
    IndexSeq,
    PowerFn,
    TFPair,
    ThresholdIndices,
)

logger = logging.getLogger(__name__)

IDENTITY = PowerFn(p=1.0)


# ── Helpers ──────────────────────────────────────────────────────────────

def _same_length(required_n: int, *spectra: Spectrum) -> None:
    lengths = {len(s) for s in spectra}
    if len(lengths) != 1:
        raise DimMismatch(f"spectra lengths differ: {sorted(lengths)}")
    (length,) = lengths
    if length < required_n:
        raise DimMismatch(f"spectra of length {length} cannot serve dimension {required_n}")


def _fsum(f: Optional[ConcaveFn], spectrum: Spectrum, indices: Sequence[int]) -> float:
    """sum of f(spectrum(k)) over 1-based ``indices``; f=None means identity."""
    values = spectrum.at(indices)
    if f is not None:
        values = evaluate_array(f, values)
    return float(np.sum(values))


def first_below(values: Iterable[float], t: float) -> int:
    """Smallest 1-based k with values[k] < t; len + 1 when none is."""
    count = 0
    for k, v in enumerate(values, start=1):
        if v < t:
            return k
        count = k
    return count + 1


# ── Thompson-Freede family ───────────────────────────────────────────────

def tf_gap(
    alpha: Spectrum,
    beta: Spectrum,
    gamma: Spectrum,
    pair: TFPair,
    tol_rel: float | None = None,
) -> GapReport:
    """
    sum gamma(i_k + j_k - k) <= sum alpha(i_k) + sum beta(j_k).

    Raises
    ------
    DimMismatch
        If the spectra differ in length or are shorter than ``pair.n``.
    """
    _same_length(pair.n, alpha, beta, gamma)
    lhs = gamma.total(pair.gamma_indices)
    rhs = alpha.total(pair.i_seq.indices) + beta.total(pair.j_seq.indices)
    return GapReport.evaluate("tf", lhs, rhs, tol_rel)


def f_tf_gap(
    alpha: Spectrum,
    beta: Spectrum,
    gamma: Spectrum,
    pair: TFPair,
    f: ConcaveFn,
    tol_rel: float | None = None,
) -> GapReport:
    """
    sum f(gamma(i_k + j_k - k)) <= sum f(alpha(i_k)) + sum f(beta(j_k)).

    Raises
    ------
    InadmissibleFunction
        If ``f`` is not concave, non-decreasing and non-negative.
    NegativeSpectrum
        If any spectrum has a negative value.
    """
    require_admissible(f)
    _same_length(pair.n, alpha, beta, gamma)
    for name, spectrum in (("alpha", alpha), ("beta", beta), ("gamma", gamma)):
        if np.any(spectrum.values < 0.0):
            raise NegativeSpectrum(f"{name} has negative values")
    lhs = _fsum(f, gamma, pair.gamma_indices)
    rhs = _fsum(f, alpha, pair.i_seq.indices) + _fsum(f, beta, pair.j_seq.indices)
    return GapReport.evaluate("f_tf", lhs, rhs, tol_rel)


# ── Mirsky family ────────────────────────────────────────────────────────

def mirsky_gap_from_spectra(
    sigma_x: Spectrum,
    sigma_y: Spectrum,
    sigma_diff: Spectrum,
    idx: IndexSeq,
    f: Optional[ConcaveFn] = None,
    tol_rel: float | None = None,
) -> GapReport:
    """Mirsky gap on precomputed spectra of X, Y and X - Y."""
    if f is not None:
        require_admissible(f)
    _same_length(idx.n, sigma_x, sigma_y, sigma_diff)
    fx = sigma_x.at(idx.indices)
    fy = sigma_y.at(idx.indices)
    if f is not None:
        fx, fy = evaluate_array(f, fx), evaluate_array(f, fy)
    lhs = float(np.sum(np.abs(fx - fy)))
    rhs = _fsum(f, sigma_diff, range(1, idx.m + 1))
    return GapReport.evaluate("mirsky" if f is None else "mirsky_f", lhs, rhs, tol_rel)


def mirsky_f_gap(
    x: ComplexMatrix,
    y: ComplexMatrix,
    idx: IndexSeq,
    f: Optional[ConcaveFn] = None,
    tol_rel: float | None = None,
) -> GapReport:
    """
    sum |f(sigma_{i_k}(X)) - f(sigma_{i_k}(Y))| <= sum_{k<=m} f(sigma_k(X - Y)).

    Parameters
    ----------
    x, y : ComplexMatrix
        Same-size square matrices.
    idx : IndexSeq
        Increasing positions compared on the left-hand side.
    f : ConcaveFn, optional
        Admissible concave function; omitted means the classic Mirsky bound.

    Raises
    ------
    InadmissibleFunction
        If ``f`` is given and fails ``validate``.
    """
    if x.n != y.n:
        raise DimMismatch(f"X is {x.n}x{x.n} but Y is {y.n}x{y.n}")
    return mirsky_gap_from_spectra(
        singular_values(x), singular_values(y), singular_values(x - y), idx, f, tol_rel
    )


def mirsky_hook_gaps(
    x: ComplexMatrix,
    y: ComplexMatrix,
    idx: IndexSeq,
    f: ConcaveFn,
    tol_rel: float | None = None,
) -> Tuple[List[GapReport], GapReport, GapReport]:
    """
    Per-hook Mirsky gaps of a piecewise-linear ``f`` and their recombination.

    Returns ``(parts, combined, direct)``: one report per hook atom plus one
    for the linear tail, the weighted sum of those reports, and the direct
    evaluation under ``f``. The direct slack is never below the combined one.
    """
    measure = hook_decompose(f)
    sx, sy, sd = singular_values(x), singular_values(y), singular_values(x - y)
    parts: List[GapReport] = []
    weights: List[float] = []
    for atom in measure.atoms:
        report = mirsky_gap_from_spectra(sx, sy, sd, idx, HookFn(t=atom.t), tol_rel)
        parts.append(report.model_copy(update={"name": f"hook[{atom.t:g}]"}))
        weights.append(atom.weight)
    if measure.linear_tail > 0.0:
        report = mirsky_gap_from_spectra(sx, sy, sd, idx, None, tol_rel)
        parts.append(report.model_copy(update={"name": "linear_tail"}))
        weights.append(measure.linear_tail)
    combined = GapReport.evaluate(
        "hook_combination",
        sum(w * p.lhs for w, p in zip(weights, parts)),
        sum(w * p.rhs for w, p in zip(weights, parts)),
        tol_rel,
    )
    direct = mirsky_gap_from_spectra(sx, sy, sd, idx, f, tol_rel)
    return parts, combined, direct


# ── Partition inequality ─────────────────────────────────────────────────

def theorem3_gap(
    alpha: Spectrum,
    beta: Spectrum,
    gamma: Spectrum,
    p: IndexPartition,
    tol_rel: float | None = None,
) -> GapReport:
    """
    gamma(I_CL) + alpha(I_AL) <= alpha(I_CR) + gamma(I_AR) + beta(J).

    With alpha, beta, gamma the singular values of A, B and A + B; J = (b..m)
    indexes beta by position.
    """
    _same_length(p.n, alpha, beta, gamma)
    sets = partition_sets(p)
    lhs = gamma.total(sets.i_cl) + alpha.total(sets.i_al)
    rhs = alpha.total(sets.i_cr) + gamma.total(sets.i_ar) + beta.total(sets.j)
    return GapReport.evaluate("theorem3", lhs, rhs, tol_rel)


def window_tf_gap(
    alpha: Spectrum,
    beta: Spectrum,
    gamma: Spectrum,
    seq: IndexSeq,
    b: int,
    tol_rel: float | None = None,
) -> GapReport:
    """gamma(I_L) <= alpha(I_R) + beta(J): the partition inequality with every index in C."""
    p = IndexPartition(n=seq.n, indices=seq.indices, b=b, flags=("C",) * seq.m)
    _same_length(p.n, alpha, beta, gamma)
    sets = partition_sets(p)
    lhs = gamma.total(sets.i_l)
    rhs = alpha.total(sets.i_r) + beta.total(sets.j)
    return GapReport.evaluate("window_tf", lhs, rhs, tol_rel)


# ── Threshold indices ────────────────────────────────────────────────────

def threshold_indices(
    alpha: Spectrum,
    beta: Spectrum,
    gamma: Spectrum,
    idx: IndexSeq,
    t: float,
) -> ThresholdIndices:
    """
    First positions where the spectra drop below ``t``.

    a scans alpha(i_k), c scans gamma(i_k), b scans beta(k) for k = 1..m;
    each is m + 1 when no value falls below ``t``.
    """
    m = idx.m
    return ThresholdIndices(
        a=first_below(alpha.at(idx.indices), t),
        b=first_below(beta.values[:m], t),
        c=first_below(gamma.at(idx.indices), t),
        t=t,
    )


# ── f-versions on Hermitian eigenvalues ──────────────────────────────────

def fversion_pair_gap(
    alpha: Spectrum,
    beta: Spectrum,
    gamma: Spectrum,
    pair: TFPair,
    f: ConcaveFn,
    convention: Convention,
    tol_rel: float | None = None,
) -> Optional[GapReport]:
    """
    f-TF gap for possibly negative spectra; None when the convention skips it.

    SKIP_NEGATIVE evaluates only pairs whose arguments are all non-negative;
    ODD_EXTENSION uses f(-x) := -f(x).
    """
    require_admissible(f)
    g = gamma.at(pair.gamma_indices)
    a = alpha.at(pair.i_seq.indices)
    b = beta.at(pair.j_seq.indices)
    if convention is Convention.SKIP_NEGATIVE:
        if np.any(g < 0.0) or np.any(a < 0.0) or np.any(b < 0.0):
            return None
        fg, fa, fb = evaluate_array(f, g), evaluate_array(f, a), evaluate_array(f, b)
    else:
        fg, fa, fb = odd_extension(f, g), odd_extension(f, a), odd_extension(f, b)
    lhs = float(np.sum(fg))
    rhs = float(np.sum(fa)) + float(np.sum(fb))
    return GapReport.evaluate("f_tf_" + convention.value, lhs, rhs, tol_rel)


def fversion_witnesses(
    alpha: Spectrum,
    beta: Spectrum,
    gamma: Spectrum,
    pairs: Iterable[TFPair],
    f: ConcaveFn,
    convention: Convention,
    tol_rel: float | None = None,
) -> List[Tuple[TFPair, GapReport, GapReport]]:
    """Pairs whose f-version fails while the plain TF inequality holds."""
    found = []
    for pair in pairs:
        f_report = fversion_pair_gap(alpha, beta, gamma, pair, f, convention, tol_rel)
        if f_report is None or f_report.holds:
            continue
        tf_report = tf_gap(alpha, beta, gamma, pair, tol_rel)
        if tf_report.holds:
            found.append((pair, f_report, tf_report))
    return found
