"""
Numeric value types: dense square complex matrices and sorted spectra.

These wrap numpy arrays and stay out of pydantic; ``to_payload`` /
``from_payload`` bridge them to the JSON contracts in ``schemas``.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Sequence

import numpy as np

from svineq.core.errors import InvalidDims, NonFiniteEntry
from svineq.models.schemas import MatrixPayload, SpectrumPayload


class SpectrumKind(str, Enum):
    """What a spectrum holds."""

    SINGULAR = "singular"
    HERMITIAN = "hermitian"


@dataclass(frozen=True)
class ComplexMatrix:
    """A dense n×n complex matrix with finite entries."""

    data: np.ndarray

    def __post_init__(self) -> None:
        arr = np.array(self.data, dtype=np.complex128, copy=True)
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1] or arr.shape[0] < 1:
            raise InvalidDims(f"expected a non-empty square matrix, got shape {arr.shape}")
        if not np.all(np.isfinite(arr)):
            raise NonFiniteEntry("matrix has NaN or Inf entries")
        arr.setflags(write=False)
        object.__setattr__(self, "data", arr)

    @property
    def n(self) -> int:
        return int(self.data.shape[0])

    # ── Algebra ──────────────────────────────────────────────────────────

    def __add__(self, other: "ComplexMatrix") -> "ComplexMatrix":
        return ComplexMatrix(self.data + other.data)

    def __sub__(self, other: "ComplexMatrix") -> "ComplexMatrix":
        return ComplexMatrix(self.data - other.data)

    def __neg__(self) -> "ComplexMatrix":
        return ComplexMatrix(-self.data)

    def adjoint(self) -> "ComplexMatrix":
        return ComplexMatrix(self.data.conj().T)

    # ── Construction helpers ─────────────────────────────────────────────

    @classmethod
    def diag(cls, values: Sequence[complex]) -> "ComplexMatrix":
        return cls(np.diag(np.asarray(values, dtype=np.complex128)))

    @classmethod
    def zeros(cls, n: int) -> "ComplexMatrix":
        return cls(np.zeros((n, n), dtype=np.complex128))

    # ── Serialisation ────────────────────────────────────────────────────

    def to_payload(self) -> MatrixPayload:
        flat = self.data.reshape(-1)
        return MatrixPayload(
            n=self.n,
            entries=[(float(z.real), float(z.imag)) for z in flat],
        )

    @classmethod
    def from_payload(cls, payload: MatrixPayload) -> "ComplexMatrix":
        parts = np.asarray(payload.entries, dtype=np.float64).reshape(-1, 2)
        return cls((parts[:, 0] + 1j * parts[:, 1]).reshape(payload.n, payload.n))


@dataclass(frozen=True)
class Spectrum:
    """
    A non-ascending sequence of reals.

    ``kind`` distinguishes singular values (non-negative) from Hermitian
    eigenvalues. Indexing helpers are 1-based, matching the mathematics.
    """

    values: np.ndarray
    kind: SpectrumKind

    def __post_init__(self) -> None:
        vals = np.array(self.values, dtype=np.float64, copy=True).reshape(-1)
        if np.any(np.diff(vals) > 0.0):
            raise ValueError("spectrum values must be non-ascending")
        if self.kind is SpectrumKind.SINGULAR and np.any(vals < 0.0):
            raise ValueError("singular values must be non-negative")
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)

    def __len__(self) -> int:
        return int(self.values.shape[0])

    def at(self, indices: Sequence[int]) -> np.ndarray:
        """Gather values at 1-based positions (empty input gives an empty array)."""
        pos = np.asarray(indices, dtype=np.int64).reshape(-1)
        return self.values[pos - 1]

    def total(self, indices: Sequence[int]) -> float:
        """Sum of the values at 1-based positions; 0 for an empty set."""
        return float(np.sum(self.at(indices)))

    def to_payload(self) -> SpectrumPayload:
        return SpectrumPayload(kind=self.kind.value, values=[float(v) for v in self.values])

    @classmethod
    def from_payload(cls, payload: SpectrumPayload) -> "Spectrum":
        return cls(np.asarray(payload.values, dtype=np.float64), SpectrumKind(payload.kind))

    @classmethod
    def sequence(cls, values: Sequence[float], kind: SpectrumKind = SpectrumKind.SINGULAR) -> "Spectrum":
        """Build a spectrum from an explicit (already sorted) sequence."""
        return cls(np.asarray(values, dtype=np.float64), kind)
