"""
Fuzz campaigns and the exhaustive small-n oracle.

Every instance is a pure function of (config, instance index): matrices and
sampled index inputs come from counter-based streams keyed by the index, so
instances can run on a thread pool and still merge into byte-identical
summaries and witness files.
"""

from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache
from pathlib import Path
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from svineq.config import get_settings
from svineq.core.bounds import best_rank_approximation, spectral_deviation_bound
from svineq.core.concave import require_admissible
from svineq.core.errors import BudgetExceeded, DimMismatch
from svineq.core.indices import (
    enumerate_all_tf_pairs,
    enumerate_index_seqs,
    enumerate_partitions,
)
from svineq.core.inequalities import f_tf_gap, mirsky_gap_from_spectra, tf_gap, theorem3_gap
from svineq.core.spectra import hermitian_eigenvalues, is_hermitian, singular_values
from svineq.core.traces import trace_theorem1, trace_theorem2, trace_theorem3
from svineq.models.linalg import ComplexMatrix
from svineq.models.schemas import (
    CampaignConfig,
    CampaignSummary,
    CheckCounts,
    CheckKind,
    ConcaveFn,
    Ensemble,
    GapReport,
    HookFn,
    IndexPartition,
    IndexSeq,
    OracleReport,
    PiecewiseLinearFn,
    PowerFn,
    TFPair,
    Witness,
    WitnessKind,
)
from svineq.services import checks
from svineq.services.ensembles import (
    HERMITIAN_KINDS,
    sample,
    sample_index_seq,
    sample_partition,
    sample_tf_pair,
)
from svineq.services.rng import CounterStream, stream_id
from svineq.services.witness_store import WitnessStore

logger = logging.getLogger(__name__)

_INDEX_PURPOSE = 2
_TRACE_PURPOSE = 3


# ── Index inputs ─────────────────────────────────────────────────────────

@lru_cache(maxsize=None)
def _all_tf_pairs(n: int) -> Tuple[TFPair, ...]:
    return tuple(enumerate_all_tf_pairs(n))


@lru_cache(maxsize=None)
def _all_index_seqs(n: int) -> Tuple[IndexSeq, ...]:
    return tuple(enumerate_index_seqs(n))


@lru_cache(maxsize=None)
def _all_partitions(n: int) -> Tuple[IndexPartition, ...]:
    return tuple(enumerate_partitions(n))


@dataclass(frozen=True)
class IndexInputs:
    pairs: Sequence[TFPair]
    seqs: Sequence[IndexSeq]
    partitions: Sequence[IndexPartition]


def index_inputs(n: int, stream: CounterStream) -> IndexInputs:
    """All admissible inputs up to the exhaustive limit, a fixed-size sample above it."""
    settings = get_settings()
    if n <= settings.exhaustive_max_n:
        return IndexInputs(_all_tf_pairs(n), _all_index_seqs(n), _all_partitions(n))
    k = settings.sampled_inputs_per_instance
    return IndexInputs(
        pairs=[sample_tf_pair(stream, n) for _ in range(k)],
        seqs=[sample_index_seq(stream, n) for _ in range(k)],
        partitions=[sample_partition(stream, n) for _ in range(k)],
    )


# ── Per-instance evaluation ──────────────────────────────────────────────

@dataclass
class InstanceOutcome:
    index: int
    counts: Dict[str, CheckCounts] = field(default_factory=dict)
    violations: List[Witness] = field(default_factory=list)
    near_tight: List[Witness] = field(default_factory=list)


class _Recorder:
    """Counts reports of one instance and materialises witnesses on demand."""

    def __init__(
        self,
        index: int,
        threshold: float,
        near_tight_cap: int,
        negate_rhs: bool,
        tol: float | None,
    ) -> None:
        self.outcome = InstanceOutcome(index=index)
        self.threshold = threshold
        self.near_tight_cap = near_tight_cap
        self.negate_rhs = negate_rhs
        self.tol = tol

    def observe(
        self,
        check: CheckKind,
        report: GapReport,
        result: checks.CheckResult,
        payload: Callable[[], dict],
    ) -> None:
        if self.negate_rhs:
            report = GapReport.evaluate(report.name, report.lhs, -report.rhs, self.tol)
        tightness = report.tightness
        near_tight = report.holds and tightness is not None and tightness >= self.threshold
        self.outcome.counts.setdefault(check.value, CheckCounts()).record(report, near_tight)
        if not report.holds:
            self.outcome.violations.append(self._witness(WitnessKind.VIOLATION, check, report, result, payload))
            logger.warning(
                "instance %d: %s violated (lhs=%.6g rhs=%.6g)",
                self.outcome.index, check.value, report.lhs, report.rhs,
            )
        elif near_tight and len(self.outcome.near_tight) < self.near_tight_cap:
            self.outcome.near_tight.append(self._witness(WitnessKind.NEAR_TIGHT, check, report, result, payload))

    def _witness(self, kind, check, report, result, payload) -> Witness:
        stored = result.model_dump(mode="json") if not self.negate_rhs else report.model_dump(mode="json")
        return Witness(
            kind=kind,
            check=check.value,
            instance=self.outcome.index,
            payload=payload(),
            report=stored,
            tightness=report.tightness,
        )


def _hook_thresholds(family: Sequence[ConcaveFn]) -> Tuple[float, ...]:
    ts = tuple(f.t for f in family if isinstance(f, HookFn))
    return ts or (1.0,)


def _instance_ensemble(cfg: CampaignConfig, index: int) -> Ensemble:
    kinds = cfg.ensembles
    lo, hi = cfg.n_range
    n = lo + (index // len(kinds)) % (hi - lo + 1)
    return Ensemble(
        kind=kinds[index % len(kinds)],
        n=n,
        seed=cfg.seed,
        rank=min(cfg.low_rank, n),
        noise_scale=cfg.noise_scale,
    )


def evaluate_instance(cfg: CampaignConfig, index: int) -> InstanceOutcome:
    """Run every configured check on instance ``index``."""
    settings = get_settings()
    tol = cfg.tol_rel
    e = _instance_ensemble(cfg, index)
    a, b = sample(e, index, 0), sample(e, index, 1)
    n = e.n
    inputs = index_inputs(n, CounterStream(cfg.seed, stream_id(index, _INDEX_PURPOSE)))
    rec = _Recorder(index, cfg.tight_threshold, settings.max_near_tight_witnesses, cfg.self_test_negate_rhs, tol)
    wanted = set(cfg.checks)

    alpha, beta, gamma = singular_values(a), singular_values(b), singular_values(a + b)

    if CheckKind.TF in wanted:
        hermitian = e.kind in HERMITIAN_KINDS and is_hermitian(a) and is_hermitian(b)
        if hermitian:
            eig = (hermitian_eigenvalues(a), hermitian_eigenvalues(b), hermitian_eigenvalues(a + b))
        for pair in inputs.pairs:
            r = tf_gap(alpha, beta, gamma, pair, tol)
            rec.observe(CheckKind.TF, r, r, lambda pair=pair: checks.tf_payload(a, b, "singular", pair, tol))
            if hermitian:
                r = tf_gap(*eig, pair, tol)
                rec.observe(CheckKind.TF, r, r, lambda pair=pair: checks.tf_payload(a, b, "hermitian", pair, tol))

    if CheckKind.F_TF in wanted:
        for f in cfg.f_family:
            for pair in inputs.pairs:
                r = f_tf_gap(alpha, beta, gamma, pair, f, tol)
                rec.observe(
                    CheckKind.F_TF, r, r,
                    lambda pair=pair, f=f: checks.f_tf_payload(a, b, pair, f, tol),
                )

    if CheckKind.MIRSKY in wanted:
        diff = singular_values(a - b)
        for f in cfg.f_family:
            for idx in inputs.seqs:
                r = mirsky_gap_from_spectra(alpha, beta, diff, idx, f, tol)
                rec.observe(
                    CheckKind.MIRSKY, r, r,
                    lambda idx=idx, f=f: checks.mirsky_payload(a, b, idx, f, tol),
                )

    if CheckKind.THEOREM3 in wanted:
        for p in inputs.partitions:
            r = theorem3_gap(alpha, beta, gamma, p, tol)
            rec.observe(CheckKind.THEOREM3, r, r, lambda p=p: checks.theorem3_payload(a, b, p, tol))

    if CheckKind.TRACES in wanted:
        stream = CounterStream(cfg.seed, stream_id(index, _TRACE_PURPOSE))
        thresholds = _hook_thresholds(cfg.f_family)
        t = thresholds[index % len(thresholds)]
        idx, pair, p = sample_index_seq(stream, n), sample_tf_pair(stream, n), sample_partition(stream, n)
        traced = (
            (trace_theorem1(a, b, idx, t, None, tol), lambda: checks.trace1_payload(a, b, idx, t, tol)),
            (trace_theorem2(alpha, beta, gamma, pair, t, tol), lambda: checks.trace2_payload(a, b, pair, t, tol)),
            (trace_theorem3(a, b, p, tol), lambda: checks.trace3_payload(a, b, p, tol)),
        )
        for trace, payload in traced:
            summary = trace.final.model_copy(update={"name": trace.theorem, "holds": trace.all_hold})
            rec.observe(CheckKind.TRACES, summary, trace, payload)

    if CheckKind.BOUNDS in wanted:
        truncated = best_rank_approximation(a, e.rank)
        for f in cfg.f_family:
            for name, y in (("bound", b), ("truncation", truncated)):
                result = spectral_deviation_bound(a, y, f, None, tol)
                r = GapReport.evaluate(name, result.actual, result.bound, tol)
                rec.observe(
                    CheckKind.BOUNDS, r, result,
                    lambda f=f, y=y: checks.bound_payload(a, y, f, None, tol),
                )

    return rec.outcome


# ── Campaign ─────────────────────────────────────────────────────────────

def run_campaign(cfg: CampaignConfig) -> CampaignSummary:
    """
    Evaluate ``cfg.instance_count`` instances and aggregate their counts.

    Violations are all kept; near-tight witnesses are capped by
    ``max_near_tight_witnesses``. Witnesses are appended to
    ``cfg.witness_path`` and the summary written to ``cfg.summary_path``
    when those are set.

    Raises
    ------
    InadmissibleFunction
        If any member of ``cfg.f_family`` fails ``validate``; nothing is evaluated.
    """
    for f in cfg.f_family:
        require_admissible(f)
    settings = get_settings()
    workers = cfg.workers or settings.workers
    logger.info(
        "Campaign start: %d instances, seed=%d, n in %s, checks=%s, workers=%d",
        cfg.instance_count, cfg.seed, cfg.n_range, [c.value for c in cfg.checks], workers,
    )
    summary = CampaignSummary(seed=cfg.seed, instance_count=cfg.instance_count)
    violations: List[Witness] = []
    near_tight: List[Witness] = []

    def run(index: int) -> InstanceOutcome:
        return evaluate_instance(cfg, index)

    indices = range(cfg.instance_count)
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            outcomes = list(pool.map(run, indices))
    else:
        outcomes = [run(i) for i in indices]

    for outcome in outcomes:
        for name, counts in outcome.counts.items():
            summary.counts.setdefault(name, CheckCounts()).merge(counts)
        violations.extend(outcome.violations)
        room = settings.max_near_tight_witnesses - len(near_tight)
        near_tight.extend(outcome.near_tight[:max(room, 0)])

    summary.violated_total = sum(c.violated for c in summary.counts.values())
    summary.near_tight_total = sum(c.near_tight for c in summary.counts.values())
    witnesses = violations + near_tight
    if cfg.witness_path:
        summary.witnesses_written = WitnessStore(cfg.witness_path).append(witnesses)
    if cfg.summary_path:
        path = Path(cfg.summary_path)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(summary.model_dump_json(indent=2) + "\n", encoding="utf-8")

    for name, counts in sorted(summary.counts.items()):
        logger.info(
            "  %-8s checked=%d held=%d violated=%d near_tight=%d",
            name, counts.checked, counts.held, counts.violated, counts.near_tight,
        )
    logger.info(
        "Campaign done: %d violations, %d near-tight, %d witnesses written",
        summary.violated_total, summary.near_tight_total, summary.witnesses_written,
    )
    return summary


# ── Exhaustive oracle ────────────────────────────────────────────────────

def default_oracle_family(seed: int = 0) -> List[ConcaveFn]:
    """Five hooks, three powers and one random piecewise-linear function."""
    stream = CounterStream(seed, stream_id(0, 255))
    breakpoints = np.cumsum(0.1 + stream.uniforms(3))
    slopes = np.sort(2.0 * stream.uniforms(4))[::-1]
    pwl = PiecewiseLinearFn(
        breakpoints=tuple(float(v) for v in breakpoints),
        slopes=tuple(float(s) for s in slopes),
    )
    return [
        *(HookFn(t=t) for t in (0.25, 0.5, 1.0, 2.0, 4.0)),
        PowerFn(p=0.25),
        PowerFn(p=0.5),
        PowerFn(p=1.0),
        pwl,
    ]


def exhaustive_oracle(
    n: int,
    matrices: Sequence[Tuple[ComplexMatrix, ComplexMatrix]],
    f_family: Optional[Sequence[ConcaveFn]] = None,
    tol_rel: float | None = None,
) -> OracleReport:
    """
    Evaluate every checker on every admissible index configuration.

    Each element of ``matrices`` is an operand pair (A, B); the sum and the
    difference are formed here. Covers all TF pairs (singular values, and
    eigenvalues when both operands are Hermitian), their f-versions, the
    Mirsky gap over all index sequences and the partition inequality over
    all flag and window choices.

    Raises
    ------
    BudgetExceeded
        If ``n`` is above the exhaustive limit.
    """
    settings = get_settings()
    if n > settings.exhaustive_max_n:
        raise BudgetExceeded(f"exhaustive enumeration is limited to n <= {settings.exhaustive_max_n}")
    family = list(f_family) if f_family is not None else default_oracle_family()
    for f in family:
        require_admissible(f)
    pairs, seqs, parts = _all_tf_pairs(n), _all_index_seqs(n), _all_partitions(n)
    report = OracleReport(
        n=n,
        instances=len(matrices),
        tf_pairs=len(pairs),
        index_seqs=len(seqs),
        partitions=len(parts),
    )
    logger.info(
        "Oracle n=%d: %d instances, %d TF pairs, %d index sequences, %d partitions",
        n, len(matrices), len(pairs), len(seqs), len(parts),
    )

    for instance, (a, b) in enumerate(matrices):
        if a.n != n or b.n != n:
            raise DimMismatch(f"instance {instance} is not {n}x{n}")
        rec = _Recorder(instance, settings.tight_threshold, 0, False, tol_rel)
        alpha, beta, gamma = singular_values(a), singular_values(b), singular_values(a + b)
        diff = singular_values(a - b)
        hermitian = is_hermitian(a) and is_hermitian(b)
        eig = (
            (hermitian_eigenvalues(a), hermitian_eigenvalues(b), hermitian_eigenvalues(a + b))
            if hermitian else None
        )
        for pair in pairs:
            r = tf_gap(alpha, beta, gamma, pair, tol_rel)
            rec.observe(CheckKind.TF, r, r, lambda pair=pair: checks.tf_payload(a, b, "singular", pair, tol_rel))
            if eig is not None:
                r = tf_gap(*eig, pair, tol_rel)
                rec.observe(CheckKind.TF, r, r, lambda pair=pair: checks.tf_payload(a, b, "hermitian", pair, tol_rel))
            for f in family:
                r = f_tf_gap(alpha, beta, gamma, pair, f, tol_rel)
                rec.observe(
                    CheckKind.F_TF, r, r,
                    lambda pair=pair, f=f: checks.f_tf_payload(a, b, pair, f, tol_rel),
                )
        for idx in seqs:
            for f in family:
                r = mirsky_gap_from_spectra(alpha, beta, diff, idx, f, tol_rel)
                rec.observe(
                    CheckKind.MIRSKY, r, r,
                    lambda idx=idx, f=f: checks.mirsky_payload(a, b, idx, f, tol_rel),
                )
        for p in parts:
            r = theorem3_gap(alpha, beta, gamma, p, tol_rel)
            rec.observe(CheckKind.THEOREM3, r, r, lambda p=p: checks.theorem3_payload(a, b, p, tol_rel))

        for name, counts in rec.outcome.counts.items():
            report.counts.setdefault(name, CheckCounts()).merge(counts)
        report.failures.extend(rec.outcome.violations)

    logger.info("Oracle n=%d done: %d failures", n, len(report.failures))
    return report
