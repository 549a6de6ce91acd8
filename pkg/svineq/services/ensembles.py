"""
Random matrix ensembles and random index inputs.

``sample(e, index, purpose)`` is a pure function of its arguments: the
campaign draws the two operands of instance ``index`` as purposes 0 and 1
and its index inputs from later purposes, so serial and threaded runs see
the same numbers.
"""

from __future__ import annotations

import logging

import numpy as np

from svineq.core.errors import InvalidDims
from svineq.models.linalg import ComplexMatrix
from svineq.models.schemas import (
    Ensemble,
    EnsembleKind,
    IndexPartition,
    IndexSeq,
    TFPair,
)
from svineq.services.rng import CounterStream, stream_id

logger = logging.getLogger(__name__)

# Kinds whose samples are Hermitian matrices.
HERMITIAN_KINDS = frozenset({
    EnsembleKind.HERMITIAN_GAUSSIAN,
    EnsembleKind.DIAGONAL_NON_NEGATIVE,
    EnsembleKind.WISHART_PSD,
})
PSD_KINDS = frozenset({EnsembleKind.DIAGONAL_NON_NEGATIVE, EnsembleKind.WISHART_PSD})


# ── Matrices ─────────────────────────────────────────────────────────────

def _ginibre(stream: CounterStream, rows: int, cols: int) -> np.ndarray:
    return stream.complex_gaussians((rows, cols))


def _hermitian(g: np.ndarray) -> np.ndarray:
    # (G + G*)/2 is Hermitian bit-for-bit: entry (j, i) is the exact conjugate of (i, j)
    return (g + g.conj().T) / 2.0


def sample(e: Ensemble, index: int, purpose: int = 0) -> ComplexMatrix:
    """
    Draw matrix ``index`` of ensemble ``e``.

    Parameters
    ----------
    e : Ensemble
        Family, size and seed.
    index : int
        Instance number; non-negative.
    purpose : int
        Independent sub-stream of the same instance (0 and 1 for the two
        operands of a check).

    Returns
    -------
    ComplexMatrix
        GINIBRE_COMPLEX: i.i.d. standard complex normals.
        HERMITIAN_GAUSSIAN: (G + G*)/2.
        DIAGONAL_NON_NEGATIVE: diag of |N(0,1)| sorted non-ascending.
        LOW_RANK_PLUS_NOISE: U V with U n x r, V r x n Ginibre, plus
        noise_scale times an independent Ginibre matrix.
        WISHART_PSD: G G* / n, symmetrised.
    """
    if index < 0:
        raise ValueError("sample index must be non-negative")
    n = e.n
    stream = CounterStream(e.seed, stream_id(index, purpose))
    if e.kind is EnsembleKind.GINIBRE_COMPLEX:
        data = _ginibre(stream, n, n)
    elif e.kind is EnsembleKind.HERMITIAN_GAUSSIAN:
        data = _hermitian(_ginibre(stream, n, n))
    elif e.kind is EnsembleKind.DIAGONAL_NON_NEGATIVE:
        data = np.diag(np.sort(np.abs(stream.gaussians(n)))[::-1]).astype(np.complex128)
    elif e.kind is EnsembleKind.LOW_RANK_PLUS_NOISE:
        left = _ginibre(stream, n, e.rank)
        right = _ginibre(stream, e.rank, n)
        noise = _ginibre(stream, n, n)
        data = left @ right + e.noise_scale * noise
    elif e.kind is EnsembleKind.WISHART_PSD:
        g = _ginibre(stream, n, n)
        data = _hermitian(g @ g.conj().T / n)
    else:
        raise ValueError(f"unknown ensemble kind {e.kind!r}")
    return ComplexMatrix(data)


# ── Index inputs ─────────────────────────────────────────────────────────

def sample_index_seq(stream: CounterStream, n: int) -> IndexSeq:
    """Uniform length m in [1, n], then a uniform m-subset."""
    if n < 1:
        raise InvalidDims("n must be positive")
    m = stream.integer(1, n)
    return IndexSeq(n=n, indices=stream.subset(n, m))


def sample_tf_pair(stream: CounterStream, n: int) -> TFPair:
    """
    A random admissible pair: i uniform, then j drawn from [1, n + m - i_m].

    The upper limit is always at least m because i_m <= n.
    """
    i_seq = sample_index_seq(stream, n)
    m = i_seq.m
    limit = n + m - i_seq.indices[-1]
    return TFPair(i_seq=i_seq, j_seq=IndexSeq(n=n, indices=stream.subset(limit, m)))


def sample_partition(stream: CounterStream, n: int) -> IndexPartition:
    seq = sample_index_seq(stream, n)
    flags = tuple("C" if u < 0.5 else "A" for u in stream.uniforms(seq.m))
    return IndexPartition(n=n, indices=seq.indices, b=stream.integer(1, seq.m + 1), flags=flags)
