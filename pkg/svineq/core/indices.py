"""
Index combinatorics: TF sequence pairs, C/A partitions and their window sets.

Everything here is pure combinatorics over 1-based indices; no spectra are
touched, so it can be tested exhaustively without matrices.
"""

from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass
from typing import Iterator, Tuple

from svineq.core.errors import InvalidDims, TFViolation
from svineq.models.schemas import (
    IndexPartition,
    IndexSeq,
    PairClassification,
    TFPair,
)

logger = logging.getLogger(__name__)


# ── Enumeration ──────────────────────────────────────────────────────────

def _check_dims(n: int, m: int) -> None:
    if m < 1 or m > n:
        raise InvalidDims(f"need 1 <= m <= n, got n={n}, m={m}")


def enumerate_tf_pairs(n: int, m: int) -> Iterator[TFPair]:
    """
    Every admissible TF pair of length ``m`` over ``[1, n]``, lexicographically.

    A pair (i, j) is admissible when both are strictly increasing and
    i_m + j_m <= n + m.
    """
    _check_dims(n, m)
    for i in itertools.combinations(range(1, n + 1), m):
        i_seq = IndexSeq(n=n, indices=i)
        for j in itertools.combinations(range(1, n + 1), m):
            if i[-1] + j[-1] <= n + m:
                yield TFPair(i_seq=i_seq, j_seq=IndexSeq(n=n, indices=j))


def enumerate_all_tf_pairs(n: int) -> Iterator[TFPair]:
    """TF pairs of every length 1..n."""
    for m in range(1, n + 1):
        yield from enumerate_tf_pairs(n, m)


def enumerate_lidskii_pairs(n: int, m: int) -> Iterator[TFPair]:
    """The j_k = k subfamily (Lidskii / Wielandt inequalities)."""
    _check_dims(n, m)
    j_seq = IndexSeq.leading(n, m)
    for i in itertools.combinations(range(1, n + 1), m):
        yield TFPair(i_seq=IndexSeq(n=n, indices=i), j_seq=j_seq)


def enumerate_index_seqs(n: int) -> Iterator[IndexSeq]:
    """All non-empty strictly increasing sequences over ``[1, n]``."""
    for m in range(1, n + 1):
        for i in itertools.combinations(range(1, n + 1), m):
            yield IndexSeq(n=n, indices=i)


def enumerate_partitions(n: int) -> Iterator[IndexPartition]:
    """Every (sequence, flags, b) configuration: sum over m of C(n,m) * 2^m * (m+1)."""
    for seq in enumerate_index_seqs(n):
        for flags in itertools.product("CA", repeat=seq.m):
            for b in range(1, seq.m + 2):
                yield IndexPartition(n=n, indices=seq.indices, b=b, flags=flags)


# ── Partition window sets ────────────────────────────────────────────────

@dataclass(frozen=True)
class PartitionSets:
    """
    Window sets derived from a partition.

    ``i_r`` = (i_1..i_{m-b+1}), ``i_l`` = (i_b..i_m), ``j`` = (b..m) and their
    complements ``i_r_bar`` / ``i_l_bar``; intersections with the C and A
    members carry the matching suffix.
    """

    i_c: Tuple[int, ...]
    i_a: Tuple[int, ...]
    i_r: Tuple[int, ...]
    i_r_bar: Tuple[int, ...]
    i_l: Tuple[int, ...]
    i_l_bar: Tuple[int, ...]
    j: Tuple[int, ...]
    i_cl: Tuple[int, ...]
    i_al: Tuple[int, ...]
    i_cr: Tuple[int, ...]
    i_ar: Tuple[int, ...]
    i_cl_bar: Tuple[int, ...]
    i_al_bar: Tuple[int, ...]
    i_cr_bar: Tuple[int, ...]
    i_ar_bar: Tuple[int, ...]


def partition_sets(p: IndexPartition) -> PartitionSets:
    idx, m, b = p.indices, p.m, p.b
    c_members = {i for i, flag in zip(idx, p.flags) if flag == "C"}

    def split(window: Tuple[int, ...]) -> Tuple[Tuple[int, ...], Tuple[int, ...]]:
        return (
            tuple(i for i in window if i in c_members),
            tuple(i for i in window if i not in c_members),
        )

    i_r, i_r_bar = idx[: m - b + 1], idx[m - b + 1:]
    i_l, i_l_bar = idx[b - 1:], idx[: b - 1]
    i_c, i_a = split(idx)
    i_cl, i_al = split(i_l)
    i_cr, i_ar = split(i_r)
    i_cl_bar, i_al_bar = split(i_l_bar)
    i_cr_bar, i_ar_bar = split(i_r_bar)
    return PartitionSets(
        i_c=i_c,
        i_a=i_a,
        i_r=i_r,
        i_r_bar=i_r_bar,
        i_l=i_l,
        i_l_bar=i_l_bar,
        j=tuple(range(b, m + 1)),
        i_cl=i_cl,
        i_al=i_al,
        i_cr=i_cr,
        i_ar=i_ar,
        i_cl_bar=i_cl_bar,
        i_al_bar=i_al_bar,
        i_cr_bar=i_cr_bar,
        i_ar_bar=i_ar_bar,
    )


# ── Pair classification ──────────────────────────────────────────────────

def classify_pairs(p: IndexPartition) -> PairClassification:
    """
    Pair t_k = i_k with s_k = i_{k+b-1} and sort each pair into K1..K4.

    K1: s C, t A.  K2: s A, t C.  K3: both C.  K4: both A.
    """
    idx, flags, b = p.indices, p.flags, p.b
    classes: dict[str, list[int]] = {"k1": [], "k2": [], "k3": [], "k4": []}
    pairs = []
    for k in range(1, p.m - b + 2):
        t, s = idx[k - 1], idx[k + b - 2]
        t_flag, s_flag = flags[k - 1], flags[k + b - 2]
        pairs.append((t, s))
        if s_flag == "C":
            classes["k3" if t_flag == "C" else "k1"].append(k)
        else:
            classes["k2" if t_flag == "C" else "k4"].append(k)
    return PairClassification(
        b=b,
        pairs=tuple(pairs),
        **{name: tuple(members) for name, members in classes.items()},
    )


def tfw_index_build(c: PairClassification, n: int, b: int) -> IndexSeq:
    """
    Index sequence of the TF instance on 2n-dimensional Wielandt matrices.

    Collects t_k for k in K3 and 2n + 1 - s_k for k in K4, sorted
    increasingly; it pairs with j_l = l + b - 1 (see ``tfw_pair``).

    Raises
    ------
    TFViolation
        If the assembled pair breaks i_r + j_r <= 2n + r.
    """
    entries = sorted([c.t(k) for k in c.k3] + [2 * n + 1 - c.s(k) for k in c.k4])
    r = len(entries)
    if entries:
        if entries[0] < 1 or len(set(entries)) != r:
            raise TFViolation(f"Wielandt indices {entries} are not a valid sequence")
        if entries[-1] + (r + b - 1) > 2 * n + r or r + b - 1 > 2 * n:
            raise TFViolation(
                f"Wielandt TF pair i={entries}, j=({b}..{r + b - 1}) breaks i_r + j_r <= 2n + r"
            )
    return IndexSeq(n=2 * n, indices=tuple(entries))


def tfw_pair(c: PairClassification, n: int, b: int) -> TFPair:
    """``tfw_index_build`` together with its j sequence (l + b - 1)."""
    i_seq = tfw_index_build(c, n, b)
    j_seq = IndexSeq(n=2 * n, indices=tuple(range(b, b + i_seq.m)))
    return TFPair(i_seq=i_seq, j_seq=j_seq)
