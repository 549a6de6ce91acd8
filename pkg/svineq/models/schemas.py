"""
Pydantic contracts for the singular-value inequality toolkit.

Every JSON document the toolkit reads or writes is described here so that
the CLI, the campaign runner, the witness store and the tests share a
single source of truth.
"""

from __future__ import annotations

from enum import Enum
from typing import Annotated, Any, Dict, List, Literal, Optional, Tuple, Union

from pydantic import BaseModel, ConfigDict, Field, TypeAdapter, model_validator

from svineq.config import resolve_tol


# ── Enums ────────────────────────────────────────────────────────────────

class Convention(str, Enum):
    """How an f-version treats negative eigenvalues."""

    SKIP_NEGATIVE = "skip_negative"
    ODD_EXTENSION = "odd_extension"


class EnsembleKind(str, Enum):
    """Random matrix families."""

    GINIBRE_COMPLEX = "ginibre_complex"
    HERMITIAN_GAUSSIAN = "hermitian_gaussian"
    DIAGONAL_NON_NEGATIVE = "diagonal_non_negative"
    LOW_RANK_PLUS_NOISE = "low_rank_plus_noise"
    WISHART_PSD = "wishart_psd"


class CheckKind(str, Enum):
    """Checker families a campaign can run."""

    TF = "tf"
    F_TF = "f_tf"
    MIRSKY = "mirsky"
    THEOREM3 = "theorem3"
    TRACES = "traces"
    BOUNDS = "bounds"


class WitnessKind(str, Enum):
    VIOLATION = "violation"
    NEAR_TIGHT = "near_tight"


Flag = Literal["C", "A"]


# ── Matrices and spectra ─────────────────────────────────────────────────

class MatrixPayload(BaseModel):
    """``{"n": int, "entries": [[re, im], ...]}``, row-major."""

    model_config = ConfigDict(frozen=True)

    n: int = Field(ge=1)
    entries: List[Tuple[float, float]]

    @model_validator(mode="after")
    def _square(self) -> "MatrixPayload":
        if len(self.entries) != self.n * self.n:
            raise ValueError(f"expected {self.n * self.n} entries, got {len(self.entries)}")
        return self


class SpectrumPayload(BaseModel):
    model_config = ConfigDict(frozen=True)

    kind: Literal["singular", "hermitian"]
    values: List[float]


# ── Concave functions ────────────────────────────────────────────────────

class HookFn(BaseModel):
    """h_t(x) = min(x, t)."""

    model_config = ConfigDict(frozen=True)

    form: Literal["hook"] = "hook"
    t: float = Field(gt=0.0)


class PowerFn(BaseModel):
    """x ** p with 0 < p <= 1."""

    model_config = ConfigDict(frozen=True)

    form: Literal["power"] = "power"
    p: float = Field(gt=0.0, le=1.0)


class Log1pFn(BaseModel):
    """scale * log(1 + x / scale): unit slope at the origin."""

    model_config = ConfigDict(frozen=True)

    form: Literal["log1p"] = "log1p"
    scale: float = Field(gt=0.0)


class PiecewiseLinearFn(BaseModel):
    """
    Piecewise-linear function through the origin.

    ``slopes[0]`` applies on ``[0, breakpoints[0]]`` and ``slopes[-1]`` after
    the last breakpoint. Shape is only type-checked here; admissibility is
    reported by ``svineq.core.concave.validate``.
    """

    model_config = ConfigDict(frozen=True)

    form: Literal["pwl"] = "pwl"
    breakpoints: Tuple[float, ...] = ()
    slopes: Tuple[float, ...]


ConcaveFn = Annotated[
    Union[HookFn, PowerFn, Log1pFn, PiecewiseLinearFn],
    Field(discriminator="form"),
]
CONCAVE_FN_ADAPTER: TypeAdapter = TypeAdapter(ConcaveFn)


class HookAtom(BaseModel):
    model_config = ConfigDict(frozen=True)

    t: float = Field(gt=0.0)
    weight: float = Field(ge=0.0)


class HookMeasure(BaseModel):
    """Finite atomic measure over hook thresholds plus an identity component."""

    model_config = ConfigDict(frozen=True)

    atoms: List[HookAtom] = Field(default_factory=list)
    linear_tail: float = Field(default=0.0, ge=0.0)

    @model_validator(mode="after")
    def _increasing(self) -> "HookMeasure":
        ts = [a.t for a in self.atoms]
        if any(b <= a for a, b in zip(ts, ts[1:])):
            raise ValueError("hook thresholds must be strictly increasing")
        return self


class FnValidation(BaseModel):
    """Outcome of checking a concave function's admissibility."""

    ok: bool = True
    invariant: Optional[str] = None
    location: Optional[int] = None
    message: Optional[str] = None


class PwlApproximation(BaseModel):
    fn: PiecewiseLinearFn
    x_max: float
    error_bound: float = Field(ge=0.0)


# ── Index combinatorics ──────────────────────────────────────────────────

class IndexSeq(BaseModel):
    """Strictly increasing 1-based indices inside ``[1, n]``."""

    model_config = ConfigDict(frozen=True)

    n: int = Field(ge=1)
    indices: Tuple[int, ...] = ()

    @model_validator(mode="after")
    def _strictly_increasing(self) -> "IndexSeq":
        idx = self.indices
        if idx and (idx[0] < 1 or idx[-1] > self.n):
            raise ValueError(f"indices must lie in [1, {self.n}]")
        if any(b <= a for a, b in zip(idx, idx[1:])):
            raise ValueError("indices must be strictly increasing")
        return self

    @property
    def m(self) -> int:
        return len(self.indices)

    @classmethod
    def leading(cls, n: int, m: int) -> "IndexSeq":
        """The sequence (1, ..., m) over ``[1, n]``."""
        return cls(n=n, indices=tuple(range(1, m + 1)))


class TFPair(BaseModel):
    """Two index sequences with i_m + j_m <= n + m."""

    model_config = ConfigDict(frozen=True)

    i_seq: IndexSeq
    j_seq: IndexSeq

    @model_validator(mode="after")
    def _admissible(self) -> "TFPair":
        if self.i_seq.n != self.j_seq.n or self.i_seq.m != self.j_seq.m:
            raise ValueError("TF sequences must share n and m")
        m = self.i_seq.m
        if m and self.i_seq.indices[-1] + self.j_seq.indices[-1] > self.n + m:
            raise ValueError("TF pair violates i_m + j_m <= n + m")
        return self

    @property
    def n(self) -> int:
        return self.i_seq.n

    @property
    def m(self) -> int:
        return self.i_seq.m

    @property
    def gamma_indices(self) -> Tuple[int, ...]:
        """Positions i_k + j_k - k indexing the sum's spectrum."""
        return tuple(
            i + j - k
            for k, (i, j) in enumerate(zip(self.i_seq.indices, self.j_seq.indices), start=1)
        )

    @classmethod
    def of(cls, n: int, i: Tuple[int, ...], j: Tuple[int, ...]) -> "TFPair":
        return cls(i_seq=IndexSeq(n=n, indices=tuple(i)), j_seq=IndexSeq(n=n, indices=tuple(j)))


class IndexPartition(IndexSeq):
    """An index sequence split into C and A members, with window offset ``b``."""

    b: int = Field(ge=1)
    flags: Tuple[Flag, ...] = ()

    @model_validator(mode="after")
    def _consistent(self) -> "IndexPartition":
        if len(self.flags) != self.m:
            raise ValueError(f"expected {self.m} flags, got {len(self.flags)}")
        if self.b > self.m + 1:
            raise ValueError(f"b must lie in [1, {self.m + 1}]")
        return self

    @property
    def seq(self) -> IndexSeq:
        return IndexSeq(n=self.n, indices=self.indices)


class PairClassification(BaseModel):
    """Pairs (t_k, s_k) = (i_k, i_{k+b-1}) sorted into four membership classes."""

    model_config = ConfigDict(frozen=True)

    b: int
    pairs: Tuple[Tuple[int, int], ...]
    k1: Tuple[int, ...] = ()
    k2: Tuple[int, ...] = ()
    k3: Tuple[int, ...] = ()
    k4: Tuple[int, ...] = ()

    @property
    def r(self) -> int:
        return len(self.k3) + len(self.k4)

    def t(self, k: int) -> int:
        return self.pairs[k - 1][0]

    def s(self, k: int) -> int:
        return self.pairs[k - 1][1]


# ── Inequality reports ───────────────────────────────────────────────────

class GapReport(BaseModel):
    """LHS, RHS and slack of one evaluated inequality."""

    name: str
    lhs: float
    rhs: float
    slack: float
    scale: float
    tol_rel: float
    holds: bool
    inputs: Optional[Dict[str, Any]] = None

    @classmethod
    def evaluate(
        cls,
        name: str,
        lhs: float,
        rhs: float,
        tol_rel: float | None = None,
    ) -> "GapReport":
        """Build a report; holds iff slack >= -tol_rel * (1 + |lhs| + |rhs|)."""
        tol = resolve_tol(tol_rel)
        lhs, rhs = float(lhs), float(rhs)
        slack = rhs - lhs
        scale = 1.0 + abs(lhs) + abs(rhs)
        return cls(
            name=name,
            lhs=lhs,
            rhs=rhs,
            slack=slack,
            scale=scale,
            tol_rel=tol,
            holds=slack >= -tol * scale,
        )

    @property
    def tightness(self) -> Optional[float]:
        """lhs / rhs when rhs is positive."""
        return self.lhs / self.rhs if self.rhs > 0.0 else None


class ThresholdIndices(BaseModel):
    a: int = Field(ge=1)
    b: int = Field(ge=1)
    c: int = Field(ge=1)
    t: float = Field(gt=0.0)


class TraceStep(BaseModel):
    name: str
    report: GapReport


class TraceReport(BaseModel):
    """An ordered walk through a proof, every step numerically checked."""

    theorem: str
    steps: List[TraceStep] = Field(default_factory=list)
    context: Dict[str, Any] = Field(default_factory=dict)
    all_hold: bool = True
    inputs: Optional[Dict[str, Any]] = None

    @classmethod
    def from_steps(
        cls,
        theorem: str,
        steps: List[TraceStep],
        context: Dict[str, Any],
    ) -> "TraceReport":
        return cls(
            theorem=theorem,
            steps=steps,
            context=context,
            all_hold=all(s.report.holds for s in steps),
        )

    @property
    def final(self) -> GapReport:
        return self.steps[-1].report


class FVersionWitness(BaseModel):
    """An f-version failure of Hermitian eigenvalues whose plain TF instance holds."""

    instance: int
    n: int
    pair: TFPair
    convention: Convention
    f_report: GapReport
    tf_report: GapReport
    alpha: List[float]
    beta: List[float]
    gamma: List[float]
    payload: Optional[Dict[str, Any]] = None


# ── Perturbation bounds ──────────────────────────────────────────────────

class BoundResult(BaseModel):
    """Deviation of transformed spectra against the certified bound."""

    bound: float
    actual: float
    tightness: Optional[float]
    holds: bool
    f: ConcaveFn
    idx: IndexSeq
    schatten_norm: Optional[float] = None
    inputs: Optional[Dict[str, Any]] = None


# ── Check payloads (CLI inputs, witness replay) ──────────────────────────

class _Payload(BaseModel):
    model_config = ConfigDict(frozen=True)

    tol_rel: Optional[float] = None


class TfCheck(_Payload):
    check: Literal["tf"] = "tf"
    a: MatrixPayload
    b: MatrixPayload
    spectrum: Literal["singular", "hermitian"] = "singular"
    pair: TFPair


class FTfCheck(_Payload):
    """
    Singular values of a, b, a+b, or spectra given directly.

    Hermitian spectra may be negative and need an explicit ``convention``.
    """

    check: Literal["f_tf"] = "f_tf"
    a: Optional[MatrixPayload] = None
    b: Optional[MatrixPayload] = None
    alpha: Optional[SpectrumPayload] = None
    beta: Optional[SpectrumPayload] = None
    gamma: Optional[SpectrumPayload] = None
    pair: TFPair
    f: ConcaveFn
    convention: Optional[Convention] = None

    @model_validator(mode="after")
    def _source(self) -> "FTfCheck":
        from_matrices = self.a is not None and self.b is not None
        from_spectra = None not in (self.alpha, self.beta, self.gamma)
        if from_matrices == from_spectra:
            raise ValueError("give either matrices a, b or spectra alpha, beta, gamma")
        if from_spectra and self.convention is None:
            if any(s.kind == "hermitian" for s in (self.alpha, self.beta, self.gamma)):
                raise ValueError("hermitian spectra need an explicit convention")
        return self


class MirskyCheck(_Payload):
    check: Literal["mirsky"] = "mirsky"
    x: MatrixPayload
    y: MatrixPayload
    idx: IndexSeq
    f: Optional[ConcaveFn] = None


class Theorem3Check(_Payload):
    check: Literal["theorem3"] = "theorem3"
    a: MatrixPayload
    b: MatrixPayload
    partition: IndexPartition


class Trace1Check(_Payload):
    check: Literal["trace_theorem1"] = "trace_theorem1"
    x: MatrixPayload
    y: MatrixPayload
    idx: IndexSeq
    t: float = Field(gt=0.0)
    flags: Optional[Tuple[Flag, ...]] = None


class Trace2Check(_Payload):
    """Spectra come from singular values of a, b, a+b, or are given directly."""

    check: Literal["trace_theorem2"] = "trace_theorem2"
    a: Optional[MatrixPayload] = None
    b: Optional[MatrixPayload] = None
    alpha: Optional[SpectrumPayload] = None
    beta: Optional[SpectrumPayload] = None
    gamma: Optional[SpectrumPayload] = None
    pair: TFPair
    t: float = Field(gt=0.0)

    @model_validator(mode="after")
    def _source(self) -> "Trace2Check":
        from_matrices = self.a is not None and self.b is not None
        from_spectra = None not in (self.alpha, self.beta, self.gamma)
        if from_matrices == from_spectra:
            raise ValueError("give either matrices a, b or spectra alpha, beta, gamma")
        return self


class Trace3Check(_Payload):
    check: Literal["trace_theorem3"] = "trace_theorem3"
    a: MatrixPayload
    b: MatrixPayload
    partition: IndexPartition


class BoundCheck(_Payload):
    check: Literal["bound"] = "bound"
    x: MatrixPayload
    y: MatrixPayload
    f: ConcaveFn
    idx: Optional[IndexSeq] = None


class SchattenCheck(_Payload):
    check: Literal["schatten"] = "schatten"
    x: MatrixPayload
    y: MatrixPayload
    p: float


CheckPayload = Annotated[
    Union[
        TfCheck,
        FTfCheck,
        MirskyCheck,
        Theorem3Check,
        Trace1Check,
        Trace2Check,
        Trace3Check,
        BoundCheck,
        SchattenCheck,
    ],
    Field(discriminator="check"),
]
CHECK_PAYLOAD_ADAPTER: TypeAdapter = TypeAdapter(CheckPayload)


# ── Ensembles and campaigns ──────────────────────────────────────────────

class Ensemble(BaseModel):
    """A reproducible random matrix family: (kind, n, seed) fixes every sample."""

    model_config = ConfigDict(frozen=True)

    kind: EnsembleKind
    n: int = Field(ge=1)
    seed: int = Field(default=0, ge=0, lt=2**64)
    rank: int = Field(default=1, ge=0)
    noise_scale: float = Field(default=0.0, ge=0.0)

    @model_validator(mode="after")
    def _rank_fits(self) -> "Ensemble":
        if self.rank > self.n:
            raise ValueError(f"rank {self.rank} exceeds n={self.n}")
        return self


class CampaignConfig(BaseModel):
    """Everything that determines a fuzz campaign; identical configs give identical output."""

    ensembles: List[EnsembleKind] = Field(
        default_factory=lambda: [
            EnsembleKind.GINIBRE_COMPLEX,
            EnsembleKind.HERMITIAN_GAUSSIAN,
            EnsembleKind.DIAGONAL_NON_NEGATIVE,
            EnsembleKind.LOW_RANK_PLUS_NOISE,
        ]
    )
    n_range: Tuple[int, int] = (2, 6)
    instance_count: int = Field(default=100, ge=0)
    seed: int = Field(default=0, ge=0, lt=2**64)
    f_family: List[ConcaveFn] = Field(
        default_factory=lambda: [HookFn(t=1.0), PowerFn(p=0.5), PowerFn(p=1.0)]
    )
    tol_rel: float = Field(default=1e-9, gt=0.0)
    checks: List[CheckKind] = Field(default_factory=lambda: list(CheckKind))
    tight_threshold: float = Field(default=0.999, gt=0.0, le=1.0)
    low_rank: int = Field(default=1, ge=0)
    noise_scale: float = Field(default=0.01, ge=0.0)
    witness_path: Optional[str] = None
    summary_path: Optional[str] = None
    workers: Optional[int] = Field(default=None, ge=1)
    # test-only: negates every RHS to exercise the violation path
    self_test_negate_rhs: bool = False

    @model_validator(mode="after")
    def _range(self) -> "CampaignConfig":
        lo, hi = self.n_range
        if lo < 1 or hi < lo:
            raise ValueError("n_range must satisfy 1 <= lo <= hi")
        return self


class Witness(BaseModel):
    """A stored instance: enough to replay the evaluation from the file alone."""

    kind: WitnessKind
    check: str
    instance: int
    payload: Dict[str, Any]
    report: Dict[str, Any]
    tightness: Optional[float] = None


class CheckCounts(BaseModel):
    checked: int = 0
    held: int = 0
    violated: int = 0
    near_tight: int = 0
    min_slack_ratio: Optional[float] = None
    max_tightness: Optional[float] = None

    def record(self, report: GapReport, near_tight: bool) -> None:
        self.checked += 1
        if report.holds:
            self.held += 1
        else:
            self.violated += 1
        if near_tight:
            self.near_tight += 1
        ratio = report.slack / report.scale
        if self.min_slack_ratio is None or ratio < self.min_slack_ratio:
            self.min_slack_ratio = ratio
        tight = report.tightness
        if tight is not None and (self.max_tightness is None or tight > self.max_tightness):
            self.max_tightness = tight

    def merge(self, other: "CheckCounts") -> None:
        self.checked += other.checked
        self.held += other.held
        self.violated += other.violated
        self.near_tight += other.near_tight
        for field, pick in (("min_slack_ratio", min), ("max_tightness", max)):
            mine, theirs = getattr(self, field), getattr(other, field)
            if theirs is not None:
                setattr(self, field, theirs if mine is None else pick(mine, theirs))


class CampaignSummary(BaseModel):
    seed: int
    instance_count: int
    counts: Dict[str, CheckCounts] = Field(default_factory=dict)
    violated_total: int = 0
    near_tight_total: int = 0
    witnesses_written: int = 0

    @property
    def exit_code(self) -> int:
        return 1 if self.violated_total else 0


class OracleReport(BaseModel):
    """Exhaustive small-n coverage: configuration totals, counts and failures."""

    n: int
    instances: int
    tf_pairs: int
    index_seqs: int
    partitions: int
    counts: Dict[str, CheckCounts] = Field(default_factory=dict)
    failures: List[Witness] = Field(default_factory=list)

    @property
    def exit_code(self) -> int:
        return 1 if self.failures else 0


class ReplayReport(BaseModel):
    """Re-evaluation of stored witnesses against their recorded reports."""

    replayed: int = 0
    max_drift: float = 0.0
    drift_tol: float = 1e-12
    mismatched: List[int] = Field(default_factory=list)

    @property
    def exit_code(self) -> int:
        return 1 if self.mismatched else 0


class CompactionReport(BaseModel):
    path: str
    before: int
    after: int


class ErrorResponse(BaseModel):
    """Standardised error envelope."""

    error: str
    detail: Optional[str] = None
