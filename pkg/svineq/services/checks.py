"""
Check dispatch.

One JSON payload shape, ``{"check": kind, ...inputs}``, drives every
evaluation the toolkit can replay: the CLI ``check`` / ``trace`` / ``bound``
commands, the witness store and the campaign's witness echo.
"""

from __future__ import annotations

import logging
from typing import Any, Dict, Optional, Union

from svineq.core.bounds import schatten_p_deviation, spectral_deviation_bound
from svineq.core.errors import DimMismatch, NegativeSpectrum
from svineq.core.inequalities import (
    f_tf_gap,
    fversion_pair_gap,
    mirsky_f_gap,
    tf_gap,
    theorem3_gap,
)
from svineq.core.spectra import hermitian_eigenvalues, singular_values
from svineq.core.traces import trace_theorem1, trace_theorem2, trace_theorem3
from svineq.models.linalg import ComplexMatrix, Spectrum
from svineq.models.schemas import (
    CHECK_PAYLOAD_ADAPTER,
    BoundCheck,
    BoundResult,
    CheckPayload,
    ConcaveFn,
    Convention,
    FTfCheck,
    GapReport,
    IndexPartition,
    IndexSeq,
    MirskyCheck,
    SchattenCheck,
    TFPair,
    TfCheck,
    Theorem3Check,
    Trace1Check,
    Trace2Check,
    Trace3Check,
    TraceReport,
)

logger = logging.getLogger(__name__)

CheckResult = Union[GapReport, TraceReport, BoundResult]


# ── Payload builders ─────────────────────────────────────────────────────

def _tol(tol_rel: Optional[float]) -> Dict[str, Any]:
    return {} if tol_rel is None else {"tol_rel": tol_rel}


def tf_payload(
    a: ComplexMatrix,
    b: ComplexMatrix,
    spectrum: str,
    pair: TFPair,
    tol_rel: float | None = None,
) -> Dict[str, Any]:
    return TfCheck(
        a=a.to_payload(), b=b.to_payload(), spectrum=spectrum, pair=pair, **_tol(tol_rel)
    ).model_dump(mode="json")


def f_tf_payload(
    a: ComplexMatrix,
    b: ComplexMatrix,
    pair: TFPair,
    f: ConcaveFn,
    tol_rel: float | None = None,
) -> Dict[str, Any]:
    return FTfCheck(
        a=a.to_payload(), b=b.to_payload(), pair=pair, f=f, **_tol(tol_rel)
    ).model_dump(mode="json")


def fversion_payload(
    alpha: Spectrum,
    beta: Spectrum,
    gamma: Spectrum,
    pair: TFPair,
    f: ConcaveFn,
    convention: Convention,
    tol_rel: float | None = None,
) -> Dict[str, Any]:
    """f-TF check on given spectra under ``convention``."""
    return FTfCheck(
        alpha=alpha.to_payload(),
        beta=beta.to_payload(),
        gamma=gamma.to_payload(),
        pair=pair,
        f=f,
        convention=convention,
        **_tol(tol_rel),
    ).model_dump(mode="json")


def mirsky_payload(
    x: ComplexMatrix,
    y: ComplexMatrix,
    idx: IndexSeq,
    f: Optional[ConcaveFn],
    tol_rel: float | None = None,
) -> Dict[str, Any]:
    return MirskyCheck(
        x=x.to_payload(), y=y.to_payload(), idx=idx, f=f, **_tol(tol_rel)
    ).model_dump(mode="json")


def theorem3_payload(
    a: ComplexMatrix,
    b: ComplexMatrix,
    p: IndexPartition,
    tol_rel: float | None = None,
) -> Dict[str, Any]:
    return Theorem3Check(
        a=a.to_payload(), b=b.to_payload(), partition=p, **_tol(tol_rel)
    ).model_dump(mode="json")


def trace1_payload(x, y, idx: IndexSeq, t: float, tol_rel: float | None = None) -> Dict[str, Any]:
    return Trace1Check(
        x=x.to_payload(), y=y.to_payload(), idx=idx, t=t, **_tol(tol_rel)
    ).model_dump(mode="json")


def trace2_payload(a, b, pair: TFPair, t: float, tol_rel: float | None = None) -> Dict[str, Any]:
    return Trace2Check(
        a=a.to_payload(), b=b.to_payload(), pair=pair, t=t, **_tol(tol_rel)
    ).model_dump(mode="json")


def trace3_payload(a, b, p: IndexPartition, tol_rel: float | None = None) -> Dict[str, Any]:
    return Trace3Check(
        a=a.to_payload(), b=b.to_payload(), partition=p, **_tol(tol_rel)
    ).model_dump(mode="json")


def bound_payload(x, y, f: ConcaveFn, idx: Optional[IndexSeq], tol_rel: float | None = None) -> Dict[str, Any]:
    return BoundCheck(
        x=x.to_payload(), y=y.to_payload(), f=f, idx=idx, **_tol(tol_rel)
    ).model_dump(mode="json")


# ── Dispatch ─────────────────────────────────────────────────────────────

def parse_payload(document: Dict[str, Any]) -> CheckPayload:
    """Validate a raw JSON document into its check payload (raises ``ValidationError``)."""
    return CHECK_PAYLOAD_ADAPTER.validate_python(document)


def _operands(a, b) -> tuple[ComplexMatrix, ComplexMatrix]:
    x, y = ComplexMatrix.from_payload(a), ComplexMatrix.from_payload(b)
    if x.n != y.n:
        raise DimMismatch(f"operands are {x.n}x{x.n} and {y.n}x{y.n}")
    return x, y


def run_check(payload: CheckPayload, tol_rel: float | None = None) -> CheckResult:
    """
    Evaluate one payload.

    ``tol_rel`` overrides the payload's own tolerance when given. The result
    echoes the payload (with the tolerance actually used) as ``inputs``, so
    ``run_check(parse_payload(result.inputs))`` reproduces it.
    """
    tol = payload.tol_rel if tol_rel is None else tol_rel
    echo = payload.model_dump(mode="json")
    if tol is not None:
        echo["tol_rel"] = tol
    return _evaluate(payload, tol).model_copy(update={"inputs": echo})


def _f_tf(payload: FTfCheck, tol: float | None) -> GapReport:
    if payload.a is not None:
        a, b = _operands(payload.a, payload.b)
        alpha, beta, gamma = singular_values(a), singular_values(b), singular_values(a + b)
    else:
        alpha = Spectrum.from_payload(payload.alpha)
        beta = Spectrum.from_payload(payload.beta)
        gamma = Spectrum.from_payload(payload.gamma)
    if payload.convention is None:
        return f_tf_gap(alpha, beta, gamma, payload.pair, payload.f, tol)
    report = fversion_pair_gap(alpha, beta, gamma, payload.pair, payload.f, payload.convention, tol)
    if report is None:
        raise NegativeSpectrum(f"{payload.convention.value} skips this pair: an argument is negative")
    return report


def _evaluate(payload: CheckPayload, tol: float | None) -> CheckResult:
    if isinstance(payload, TfCheck):
        a, b = _operands(payload.a, payload.b)
        spectra = hermitian_eigenvalues if payload.spectrum == "hermitian" else singular_values
        return tf_gap(spectra(a), spectra(b), spectra(a + b), payload.pair, tol)
    if isinstance(payload, FTfCheck):
        return _f_tf(payload, tol)
    if isinstance(payload, MirskyCheck):
        x, y = _operands(payload.x, payload.y)
        return mirsky_f_gap(x, y, payload.idx, payload.f, tol)
    if isinstance(payload, Theorem3Check):
        a, b = _operands(payload.a, payload.b)
        return theorem3_gap(
            singular_values(a), singular_values(b), singular_values(a + b), payload.partition, tol
        )
    if isinstance(payload, Trace1Check):
        x, y = _operands(payload.x, payload.y)
        return trace_theorem1(x, y, payload.idx, payload.t, payload.flags, tol)
    if isinstance(payload, Trace2Check):
        if payload.a is not None:
            a, b = _operands(payload.a, payload.b)
            alpha, beta, gamma = singular_values(a), singular_values(b), singular_values(a + b)
        else:
            alpha = Spectrum.from_payload(payload.alpha)
            beta = Spectrum.from_payload(payload.beta)
            gamma = Spectrum.from_payload(payload.gamma)
        return trace_theorem2(alpha, beta, gamma, payload.pair, payload.t, tol)
    if isinstance(payload, Trace3Check):
        a, b = _operands(payload.a, payload.b)
        return trace_theorem3(a, b, payload.partition, tol)
    if isinstance(payload, BoundCheck):
        x, y = _operands(payload.x, payload.y)
        return spectral_deviation_bound(x, y, payload.f, payload.idx, tol)
    if isinstance(payload, SchattenCheck):
        x, y = _operands(payload.x, payload.y)
        return schatten_p_deviation(x, y, payload.p, tol)
    raise TypeError(f"unsupported payload {type(payload).__name__}")


def result_holds(result: CheckResult) -> bool:
    if isinstance(result, TraceReport):
        return result.all_hold
    return result.holds
