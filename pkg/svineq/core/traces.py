"""
Proof traces.

Each trace rebuilds a proof as a sequence of numerically checked
inequalities, so a failing step points at the exact link that broke.
Spectra are recomputed from the matrices inside each trace; every trace
therefore certifies its instance on its own.

Degenerate branches are kept as explicit steps with lhs = rhs = 0 so the
step list of a theorem has the same shape on every instance.
"""

from __future__ import annotations

import logging
from typing import Iterable, List, Optional, Sequence, Tuple

import numpy as np

from svineq.config import get_settings
from svineq.core.errors import DimMismatch, FlagConflict, NegativeSpectrum
from svineq.core.indices import (
    classify_pairs,
    enumerate_all_tf_pairs,
    partition_sets,
    tfw_pair,
)
from svineq.core.inequalities import (
    f_tf_gap,
    first_below,
    mirsky_f_gap,
    tf_gap,
    theorem3_gap,
)
from svineq.core.spectra import hermitian_eigenvalues, singular_values, wielandt_embed
from svineq.models.linalg import ComplexMatrix, Spectrum
from svineq.models.schemas import (
    Flag,
    GapReport,
    HookFn,
    IndexPartition,
    IndexSeq,
    TFPair,
    ThresholdIndices,
    TraceReport,
    TraceStep,
)

logger = logging.getLogger(__name__)


def _step(name: str, lhs: float, rhs: float, tol_rel: float | None) -> TraceStep:
    return TraceStep(name=name, report=GapReport.evaluate(name, lhs, rhs, tol_rel))


def _named(name: str, report: GapReport) -> TraceStep:
    return TraceStep(name=name, report=report.model_copy(update={"name": name}))


def _hook_sum(spectrum: Spectrum, indices: Sequence[int], t: float) -> float:
    return float(np.sum(np.minimum(spectrum.at(indices), t)))


def _finish(theorem: str, steps: List[TraceStep], context: dict) -> TraceReport:
    report = TraceReport.from_steps(theorem, steps, context)
    for step in steps:
        logger.debug(
            "%s / %s: lhs=%.6g rhs=%.6g holds=%s",
            theorem, step.name, step.report.lhs, step.report.rhs, step.report.holds,
        )
    if not report.all_hold:
        failed = [s.name for s in steps if not s.report.holds]
        logger.warning("%s trace failed at steps %s", theorem, failed)
    return report


# ── Generalised Mirsky (hook reduction and partition argument) ───────────

def trace_theorem1(
    x: ComplexMatrix,
    y: ComplexMatrix,
    idx: IndexSeq,
    t: float,
    flags: Optional[Sequence[Flag]] = None,
    tol_rel: float | None = None,
) -> TraceReport:
    """
    Walk the generalised Mirsky proof for the hook h_t on one instance.

    The roles are C = X, A = Y, B = X - Y (singular values are sign
    invariant, so no zero-sum matrix is formed). When a > c the roles of A
    and C are swapped; ``flags`` then refer to the swapped instance and
    must mark every position k < c as C. Positions k < a are stripped
    before the partition argument since they contribute nothing.

    Parameters
    ----------
    x, y : ComplexMatrix
        Same-size square matrices.
    idx : IndexSeq
        Positions compared on the left-hand side.
    t : float
        Hook threshold.
    flags : sequence of "C"/"A", optional
        One flag per position of ``idx``; defaults to C wherever
        gamma(i) >= alpha(i) or k < c.

    Raises
    ------
    FlagConflict
        If a position k < c is flagged A.
    """
    if x.n != y.n:
        raise DimMismatch(f"X is {x.n}x{x.n} but Y is {y.n}x{y.n}")
    if t <= 0.0:
        raise ValueError("hook threshold must be positive")
    gamma, alpha, beta = singular_values(x), singular_values(y), singular_values(x - y)
    m = idx.m

    a = first_below(alpha.at(idx.indices), t)
    c = first_below(gamma.at(idx.indices), t)
    swapped = a > c
    if swapped:
        alpha, gamma = gamma, alpha
        a, c = c, a

    if flags is None:
        g, al = gamma.at(idx.indices), alpha.at(idx.indices)
        flags = tuple("C" if (k < c or g[k - 1] >= al[k - 1]) else "A" for k in range(1, m + 1))
    flags = tuple(flags)
    if len(flags) != m:
        raise DimMismatch(f"expected {m} flags, got {len(flags)}")
    forced = [k for k in range(1, min(c, m + 1)) if flags[k - 1] != "C"]
    if forced:
        raise FlagConflict(f"positions {forced} lie before c={c} and must be flagged C")

    # reduce to a = 1
    kept = idx.indices[a - 1:]
    m_red = len(kept)
    dropped = idx.indices[: a - 1]
    p = IndexPartition(
        n=idx.n,
        indices=kept,
        b=first_below(beta.values[:m_red], t),
        flags=flags[a - 1:],
    )
    b = p.b
    c_red = c - a + 1
    sets = partition_sets(p)

    steps: List[TraceStep] = []
    steps.append(_step(
        "drop_saturated_terms",
        float(np.sum(np.abs(
            np.minimum(gamma.at(dropped), t) - np.minimum(alpha.at(dropped), t)
        ))),
        _hook_sum(beta, range(m_red + 1, m + 1), t),
        tol_rel,
    ))
    steps.append(_named("theorem3_instance", theorem3_gap(alpha, beta, gamma, p, tol_rel)))
    steps.append(_step(
        "saturated_window",
        _hook_sum(gamma, sets.i_cl_bar, t) + alpha.total(sets.i_al_bar),
        t * (b - 1),
        tol_rel,
    ))
    steps.append(_step(
        "non_negative_window",
        0.0,
        alpha.total(sets.i_cr_bar) + gamma.total(sets.i_ar_bar),
        tol_rel,
    ))
    tail_beta = beta.total(range(b, m_red + 1))
    steps.append(_step(
        "partition_inequality",
        _hook_sum(gamma, sets.i_c, t) + alpha.total(sets.i_a),
        alpha.total(sets.i_c) + gamma.total(sets.i_a) + t * (b - 1) + tail_beta,
        tol_rel,
    ))
    head, rest = kept[: c_red - 1], kept[c_red - 1:]
    steps.append(_step(
        "hook_difference",
        float(np.sum(t - alpha.at(head))) + float(np.sum(np.abs(gamma.at(rest) - alpha.at(rest)))),
        t * (b - 1) + tail_beta,
        tol_rel,
    ))
    steps.append(_named("mirsky_hook", mirsky_f_gap(x, y, idx, HookFn(t=t), tol_rel)))

    context = {
        "roles": {"gamma": "Y" if swapped else "X", "alpha": "X" if swapped else "Y", "beta": "X - Y"},
        "swapped": swapped,
        "thresholds": ThresholdIndices(a=a, b=b, c=c, t=t).model_dump(),
        "reduced_partition": p.model_dump(),
        "gamma": gamma.values.tolist(),
        "alpha": alpha.values.tolist(),
        "beta": beta.values.tolist(),
    }
    return _finish("theorem1", steps, context)


# ── f-versions of the TF inequalities ────────────────────────────────────

def _premise_pairs(n: int, pair: TFPair, shifted: Optional[TFPair]) -> Iterable[TFPair]:
    if n <= get_settings().exhaustive_max_n:
        yield from enumerate_all_tf_pairs(n)
        return
    yield TFPair.of(n, pair.i_seq.indices, pair.j_seq.indices)
    if shifted is not None:
        yield TFPair.of(n, shifted.i_seq.indices, shifted.j_seq.indices)
    for m in range(1, n + 1):
        lead = tuple(range(1, m + 1))
        yield TFPair.of(n, lead, lead)


def _shift(pair: TFPair, a: int, b: int) -> Optional[TFPair]:
    """(i_a..i_{m-b+1}; j_b..j_{m-a+1}), or None when a + b - 1 > m."""
    m = pair.m
    if a + b - 1 > m:
        return None
    i = pair.i_seq.indices[a - 1: m - b + 1]
    j = pair.j_seq.indices[b - 1: m - a + 1]
    return TFPair.of(pair.n, i, j)


def trace_theorem2(
    alpha: Spectrum,
    beta: Spectrum,
    gamma: Spectrum,
    pair: TFPair,
    t: float,
    tol_rel: float | None = None,
) -> TraceReport:
    """
    Walk the argument that TF inequalities imply their hook f-versions.

    A failing TF premise is not raised: it becomes a failing ``tf_premise``
    step and ``context["premise_violation"]`` names the pair.

    Raises
    ------
    NegativeSpectrum
        If any of the sequences has a negative entry.
    """
    for name, spectrum in (("alpha", alpha), ("beta", beta), ("gamma", gamma)):
        if np.any(spectrum.values < 0.0):
            raise NegativeSpectrum(f"{name} has negative values")
    if t <= 0.0:
        raise ValueError("hook threshold must be positive")
    m = pair.m
    i, j = pair.i_seq.indices, pair.j_seq.indices
    g_idx = pair.gamma_indices
    a = first_below(alpha.at(i), t)
    b = first_below(beta.at(j), t)
    shifted = _shift(pair, a, b)

    context: dict = {
        "thresholds": ThresholdIndices(a=a, b=b, c=first_below(gamma.at(g_idx), t), t=t).model_dump(),
        "pair": pair.model_dump(),
        "shifted_pair": shifted.model_dump() if shifted is not None else None,
    }

    worst: Optional[Tuple[TFPair, GapReport]] = None
    for candidate in _premise_pairs(len(alpha), pair, shifted):
        report = tf_gap(alpha, beta, gamma, candidate, tol_rel)
        if worst is None or report.slack / report.scale < worst[1].slack / worst[1].scale:
            worst = (candidate, report)
    steps: List[TraceStep] = [_named("tf_premise", worst[1])]
    if not worst[1].holds:
        context["premise_violation"] = worst[0].model_dump()
        logger.warning("TF premise fails for pair %s", worst[0].model_dump())

    tail = g_idx[a + b - 2:]
    if shifted is not None:
        shifted_report = tf_gap(alpha, beta, gamma, shifted, tol_rel)
        steps.append(_named("shifted_tf", shifted_report))
        steps.append(_step("gamma_monotone", gamma.total(tail), shifted_report.lhs, tol_rel))
    else:
        steps.append(_step("shifted_tf", 0.0, 0.0, tol_rel))
        steps.append(_step("gamma_monotone", 0.0, 0.0, tol_rel))

    steps.append(_step(
        "hook_below_identity",
        _hook_sum(gamma, tail, t),
        alpha.total(i[a - 1:]) + beta.total(j[b - 1:]),
        tol_rel,
    ))
    saturated = min(a + b - 2, m)
    steps.append(_step(
        "saturated_terms",
        _hook_sum(gamma, g_idx[:saturated], t),
        t * (a + b - 2),
        tol_rel,
    ))
    steps.append(_step(
        "reduced_hook_tf",
        _hook_sum(gamma, g_idx, t),
        t * (a - 1) + alpha.total(i[a - 1:]) + t * (b - 1) + beta.total(j[b - 1:]),
        tol_rel,
    ))
    steps.append(_named("f_tf_hook", f_tf_gap(alpha, beta, gamma, pair, HookFn(t=t), tol_rel)))
    return _finish("theorem2", steps, context)


# ── Partition inequality via Wielandt matrices ───────────────────────────

def _embedding_deviation(hat: Spectrum, sigma: Spectrum) -> float:
    """Largest |hat - (sigma, -reversed sigma)|, relative to 1 + sigma_1."""
    expected = np.concatenate((sigma.values, -sigma.values[::-1]))
    scale = 1.0 + float(sigma.values[0]) if len(sigma) else 1.0
    return float(np.max(np.abs(hat.values - expected))) / scale


def trace_theorem3(
    a: ComplexMatrix,
    b: ComplexMatrix,
    p: IndexPartition,
    tol_rel: float | None = None,
) -> TraceReport:
    """
    Walk the proof of the partition inequality for A, B and C = -(A + B).

    The K3/K4 pairs are certified through a TF instance on the 2n x 2n
    Wielandt embeddings, whose eigenvalues are the singular values and
    their negatives.

    Raises
    ------
    TFViolation
        If the Wielandt index sequence cannot be assembled.
    """
    if a.n != b.n:
        raise DimMismatch(f"A is {a.n}x{a.n} but B is {b.n}x{b.n}")
    n = a.n
    if p.n > n:
        raise DimMismatch(f"partition over [1, {p.n}] exceeds n={n}")
    c_matrix = -(a + b)
    alpha, beta, gamma = singular_values(a), singular_values(b), singular_values(c_matrix)
    cls = classify_pairs(p)
    w = p.b
    r = cls.r
    s_of = cls.s
    t_of = cls.t
    two_n = 2 * n

    steps: List[TraceStep] = []
    steps.append(_step(
        "k1_gamma_monotone",
        gamma.total([s_of(k) for k in cls.k1]),
        gamma.total([t_of(k) for k in cls.k1]),
        tol_rel,
    ))
    steps.append(_step(
        "k2_alpha_monotone",
        alpha.total([s_of(k) for k in cls.k2]),
        alpha.total([t_of(k) for k in cls.k2]),
        tol_rel,
    ))

    hat_alpha = hermitian_eigenvalues(wielandt_embed(a))
    hat_beta = hermitian_eigenvalues(wielandt_embed(b))
    hat_gamma = hermitian_eigenvalues(wielandt_embed(a + b))
    # eigenvalues of the embedding are sigma_1..sigma_n, -sigma_n..-sigma_1
    deviation = max(
        _embedding_deviation(hat, sigma)
        for hat, sigma in ((hat_alpha, alpha), (hat_beta, beta), (hat_gamma, gamma))
    )
    steps.append(_step("wielandt_spectrum", deviation, 0.0, tol_rel))
    w_pair = tfw_pair(cls, n, w)
    steps.append(_named("wielandt_tf", tf_gap(hat_alpha, hat_beta, hat_gamma, w_pair, tol_rel)))

    window = range(w, w + r)
    steps.append(_step(
        "wielandt_weakened",
        hat_gamma.total([s_of(k) for k in cls.k3])
        + hat_gamma.total([two_n + 1 - t_of(k) for k in cls.k4]),
        hat_alpha.total([t_of(k) for k in cls.k3])
        + hat_alpha.total([two_n + 1 - s_of(k) for k in cls.k4])
        + hat_beta.total(window),
        tol_rel,
    ))
    steps.append(_step(
        "singular_rearranged",
        gamma.total([s_of(k) for k in cls.k3]) - gamma.total([t_of(k) for k in cls.k4]),
        alpha.total([t_of(k) for k in cls.k3]) - alpha.total([s_of(k) for k in cls.k4])
        + beta.total(window),
        tol_rel,
    ))
    steps.append(_step(
        "remaining_pairs",
        gamma.total([s_of(k) for k in cls.k3]) + alpha.total([s_of(k) for k in cls.k4]),
        alpha.total([t_of(k) for k in cls.k3]) + gamma.total([t_of(k) for k in cls.k4])
        + beta.total(window),
        tol_rel,
    ))
    steps.append(_step(
        "summed_pairs",
        gamma.total([s_of(k) for k in cls.k1 + cls.k3])
        + alpha.total([s_of(k) for k in cls.k2 + cls.k4]),
        gamma.total([t_of(k) for k in cls.k1 + cls.k4])
        + alpha.total([t_of(k) for k in cls.k2 + cls.k3])
        + beta.total(range(w, p.m + 1)),
        tol_rel,
    ))
    steps.append(_named("theorem3", theorem3_gap(alpha, beta, gamma, p, tol_rel)))

    context = {
        "classification": cls.model_dump(),
        "wielandt_pair": w_pair.model_dump(),
        "alpha": alpha.values.tolist(),
        "beta": beta.values.tolist(),
        "gamma": gamma.values.tolist(),
    }
    return _finish("theorem3", steps, context)
