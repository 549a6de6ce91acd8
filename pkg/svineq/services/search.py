"""
Counterexample search for f-versions on Hermitian eigenvalues.

Singular values of A, B, A + B satisfy every f-version of the TF
inequalities; eigenvalues of Hermitian matrices need not. The search
samples Hermitian pairs and keeps each (instance, pair) where the f-version
fails although the plain TF inequality holds.
"""

from __future__ import annotations

import logging
from typing import List, Tuple

import numpy as np

from svineq.config import get_settings
from svineq.core.concave import require_admissible
from svineq.core.errors import InvalidDims, UnsupportedEnsemble
from svineq.core.indices import enumerate_all_tf_pairs
from svineq.core.inequalities import fversion_witnesses
from svineq.core.spectra import hermitian_eigenvalues
from svineq.models.linalg import Spectrum, SpectrumKind
from svineq.models.schemas import (
    ConcaveFn,
    Convention,
    Ensemble,
    EnsembleKind,
    FVersionWitness,
    TFPair,
    Witness,
    WitnessKind,
)
from svineq.services.checks import fversion_payload
from svineq.services.ensembles import HERMITIAN_KINDS, sample, sample_tf_pair
from svineq.services.rng import CounterStream, stream_id

logger = logging.getLogger(__name__)

_PAIR_PURPOSE = 2


def _snap(spectrum: Spectrum, tol: float) -> Spectrum:
    """Eigenvalues within rounding of zero become exactly zero."""
    values = spectrum.values.copy()
    scale = 1.0 + float(np.max(np.abs(values)))
    values[np.abs(values) <= tol * scale] = 0.0
    return Spectrum(values, SpectrumKind.HERMITIAN)


def hermitian_fversion_search(
    budget: int,
    f: ConcaveFn,
    convention: Convention,
    seed: int = 0,
    n_range: Tuple[int, int] = (2, 4),
    kind: EnsembleKind = EnsembleKind.HERMITIAN_GAUSSIAN,
    tol_rel: float | None = None,
) -> List[FVersionWitness]:
    """
    Sample ``budget`` Hermitian pairs and collect f-version failures.

    Parameters
    ----------
    budget : int
        Number of sampled instances; 0 gives an empty result.
    f : ConcaveFn
        Admissible concave function.
    convention : Convention
        SKIP_NEGATIVE evaluates only pairs with non-negative arguments;
        ODD_EXTENSION uses f(-x) := -f(x).
    seed : int
        Campaign seed; instance k uses the ensemble stream of index k.
    n_range : (int, int)
        Sizes cycle through this inclusive range.
    kind : EnsembleKind
        Must produce Hermitian matrices.

    Returns
    -------
    list of FVersionWitness
        Each carries a replayable f-TF payload over the evaluated spectra,
        with ``f`` and ``convention``; replaying it reproduces the failure.

    Raises
    ------
    InvalidDims
        If ``n_range`` is not ``1 <= lo <= hi``.
    UnsupportedEnsemble
        If ``kind`` is not Hermitian.
    """
    if kind not in HERMITIAN_KINDS:
        raise UnsupportedEnsemble(f"{kind.value} does not produce Hermitian matrices")
    require_admissible(f)
    lo, hi = n_range
    if not 1 <= lo <= hi:
        raise InvalidDims(f"n_range must satisfy 1 <= lo <= hi, got ({lo}, {hi})")
    settings = get_settings()
    witnesses: List[FVersionWitness] = []
    for instance in range(budget):
        n = lo + instance % (hi - lo + 1)
        e = Ensemble(kind=kind, n=n, seed=seed)
        a, b = sample(e, instance, 0), sample(e, instance, 1)
        alpha = _snap(hermitian_eigenvalues(a), settings.hermitian_tol)
        beta = _snap(hermitian_eigenvalues(b), settings.hermitian_tol)
        gamma = _snap(hermitian_eigenvalues(a + b), settings.hermitian_tol)
        if n <= settings.exhaustive_max_n:
            pairs: List[TFPair] = list(enumerate_all_tf_pairs(n))
        else:
            stream = CounterStream(seed, stream_id(instance, _PAIR_PURPOSE))
            pairs = [sample_tf_pair(stream, n) for _ in range(settings.sampled_inputs_per_instance)]
        for pair, f_report, tf_report in fversion_witnesses(
            alpha, beta, gamma, pairs, f, convention, tol_rel
        ):
            witnesses.append(FVersionWitness(
                instance=instance,
                n=n,
                pair=pair,
                convention=convention,
                f_report=f_report,
                tf_report=tf_report,
                alpha=alpha.values.tolist(),
                beta=beta.values.tolist(),
                gamma=gamma.values.tolist(),
                payload=fversion_payload(alpha, beta, gamma, pair, f, convention, tol_rel),
            ))
    logger.info(
        "f-version search (%s, %s): %d witnesses in %d instances",
        f.form, convention.value, len(witnesses), budget,
    )
    return witnesses


def as_witness(w: FVersionWitness) -> Witness:
    """Store form of a search result; ``WitnessStore.replay`` re-runs the f-version."""
    return Witness(
        kind=WitnessKind.VIOLATION,
        check="f_tf",
        instance=w.instance,
        payload=w.payload,
        report=w.f_report.model_dump(mode="json"),
        tightness=w.f_report.tightness,
    )
