"""
Admissible concave functions and their hook decomposition.

An admissible f maps [0, inf) to [0, inf), is concave and has f(0) = 0.
Every such f is a non-negative combination of hooks h_t(x) = min(x, t)
plus an identity component; for piecewise-linear f the combination is
finite and exact, closed forms are bridged through ``pwl_approximate``.
"""

from __future__ import annotations

import logging
from typing import Sequence, Tuple

import numpy as np

from svineq.config import get_settings
from svineq.core.errors import InadmissibleFunction, NegativeArgument, NotPiecewiseLinear
from svineq.models.schemas import (
    ConcaveFn,
    FnValidation,
    HookAtom,
    HookFn,
    HookMeasure,
    Log1pFn,
    PiecewiseLinearFn,
    PowerFn,
    PwlApproximation,
)

logger = logging.getLogger(__name__)


# ── Evaluation ───────────────────────────────────────────────────────────

def _pwl_values(f: PiecewiseLinearFn, x: np.ndarray) -> np.ndarray:
    bp = np.asarray(f.breakpoints, dtype=np.float64)
    slopes = np.asarray(f.slopes, dtype=np.float64)
    starts = np.concatenate(([0.0], bp))
    widths = np.concatenate((np.diff(starts), [np.inf]))
    run = np.clip(x[..., None] - starts, 0.0, widths)
    return np.sum(slopes * run, axis=-1)


def evaluate_array(f: ConcaveFn, x: np.ndarray | Sequence[float]) -> np.ndarray:
    """
    Evaluate ``f`` elementwise.

    Raises
    ------
    NegativeArgument
        If any entry of ``x`` is negative.
    """
    x = np.asarray(x, dtype=np.float64)
    if np.any(x < 0.0):
        raise NegativeArgument(f"{f.form} evaluated at a negative argument")
    if isinstance(f, HookFn):
        return np.minimum(x, f.t)
    if isinstance(f, PowerFn):
        # identity fast path keeps f = x bit-exact
        return x.copy() if f.p == 1.0 else np.power(x, f.p)
    if isinstance(f, Log1pFn):
        return f.scale * np.log1p(x / f.scale)
    if isinstance(f, PiecewiseLinearFn):
        if len(f.slopes) != len(f.breakpoints) + 1:
            raise InadmissibleFunction("pwl needs exactly one more slope than breakpoints")
        return _pwl_values(f, x)
    raise TypeError(f"unsupported concave function: {f!r}")


def evaluate(f: ConcaveFn, x: float) -> float:
    """f(x) for a single non-negative ``x``."""
    return float(evaluate_array(f, np.asarray([x]))[0])


def odd_extension(f: ConcaveFn, x: np.ndarray | Sequence[float]) -> np.ndarray:
    """f on the whole real line via f(-x) := -f(x)."""
    x = np.asarray(x, dtype=np.float64)
    return np.sign(x) * evaluate_array(f, np.abs(x))


# ── Admissibility ────────────────────────────────────────────────────────

def _violation(invariant: str, message: str, location: int | None = None) -> FnValidation:
    return FnValidation(ok=False, invariant=invariant, location=location, message=message)


def validate(f: ConcaveFn) -> FnValidation:
    """
    Check non-negativity, monotonicity and concavity of ``f``.

    Returns a structured violation instead of raising. f(0) = 0 holds by
    construction for every form.
    """
    if isinstance(f, HookFn):
        if not (np.isfinite(f.t) and f.t > 0.0):
            return _violation("threshold", "hook threshold must be positive and finite")
        return FnValidation()
    if isinstance(f, PowerFn):
        if not 0.0 < f.p <= 1.0:
            return _violation("exponent", "power exponent must lie in (0, 1]")
        return FnValidation()
    if isinstance(f, Log1pFn):
        if not (np.isfinite(f.scale) and f.scale > 0.0):
            return _violation("scale", "log1p scale must be positive and finite")
        return FnValidation()

    bp, slopes = f.breakpoints, f.slopes
    if len(slopes) != len(bp) + 1:
        return _violation("shape", f"expected {len(bp) + 1} slopes, got {len(slopes)}")
    if not all(np.isfinite(v) for v in (*bp, *slopes)):
        return _violation("finite", "breakpoints and slopes must be finite")
    if bp and bp[0] <= 0.0:
        return _violation("breakpoints", "breakpoints must be positive", 0)
    for k in range(1, len(bp)):
        if bp[k] <= bp[k - 1]:
            return _violation("breakpoints", f"breakpoints not increasing at {k}", k)
    for k in range(1, len(slopes)):
        if slopes[k] > slopes[k - 1]:
            return _violation("concavity", f"slopes not non-increasing at segment {k}", k)
    if slopes[-1] < 0.0:
        return _violation("monotone", "final slope must be non-negative", len(slopes) - 1)
    return FnValidation()


def require_admissible(f: ConcaveFn) -> None:
    result = validate(f)
    if not result.ok:
        raise InadmissibleFunction(result.message or "inadmissible concave function")


# ── Hook decomposition ───────────────────────────────────────────────────

def hook_decompose(f: ConcaveFn) -> HookMeasure:
    """
    Exact hook measure of a piecewise-linear ``f``.

    Each breakpoint x_b carries weight s_{b-1} - s_b; the final slope becomes
    the linear tail, so f(x) = sum_b w_b min(x, x_b) + tail * x for x >= 0.
    Zero-weight atoms are dropped.

    Raises
    ------
    NotPiecewiseLinear
        For closed forms; sample them with ``pwl_approximate`` first.
    """
    if not isinstance(f, PiecewiseLinearFn):
        raise NotPiecewiseLinear(f"{f.form} has no finite hook decomposition; use pwl_approximate")
    require_admissible(f)
    atoms = [
        HookAtom(t=x_b, weight=f.slopes[b] - f.slopes[b + 1])
        for b, x_b in enumerate(f.breakpoints)
        if f.slopes[b] - f.slopes[b + 1] > 0.0
    ]
    return HookMeasure(atoms=atoms, linear_tail=f.slopes[-1])


def hook_reconstruct(measure: HookMeasure, x: np.ndarray | Sequence[float]) -> np.ndarray:
    """sum_b w_b min(x, t_b) + tail * x."""
    x = np.asarray(x, dtype=np.float64)
    total = measure.linear_tail * x
    for atom in measure.atoms:
        total = total + atom.weight * np.minimum(x, atom.t)
    return total


def scale_fn(f: ConcaveFn, c: float) -> PiecewiseLinearFn:
    """c * f for a hook or piecewise-linear ``f`` (c > 0)."""
    if c <= 0.0:
        raise ValueError("scale factor must be positive")
    if isinstance(f, HookFn):
        return PiecewiseLinearFn(breakpoints=(f.t,), slopes=(c, 0.0))
    if isinstance(f, PiecewiseLinearFn):
        return PiecewiseLinearFn(breakpoints=f.breakpoints, slopes=tuple(c * s for s in f.slopes))
    raise NotPiecewiseLinear(f"{f.form} cannot be scaled exactly; use pwl_approximate")


# ── Piecewise-linear approximation ───────────────────────────────────────

def known_kinks(f: ConcaveFn) -> Tuple[float, ...]:
    """Points where ``f`` is not differentiable."""
    if isinstance(f, HookFn):
        return (f.t,)
    if isinstance(f, PiecewiseLinearFn):
        return tuple(f.breakpoints)
    return ()


def _segment_error_bounds(widths: np.ndarray, chords: np.ndarray) -> np.ndarray:
    """
    Upper bounds on f - chord per segment from neighbouring chord slopes.

    On a segment of width w the error rises at most at rate d1 (drop from the
    previous slope) and falls at least at rate d2 (drop to the next slope),
    so it stays below w * d1 * d2 / (d1 + d2). The first segment has no left
    neighbour (d1 unbounded) and the last uses f' >= 0 on the right.
    """
    left = np.concatenate(([np.inf], chords[:-1]))
    right = np.concatenate((chords[1:], [0.0]))
    d1 = np.maximum(left - chords, 0.0)
    d2 = np.maximum(chords - right, 0.0)
    bounds = np.zeros_like(widths)
    first_only = np.isinf(d1)
    bounds[first_only] = widths[first_only] * d2[first_only]
    rest = ~first_only & (d1 + d2 > 0.0)
    bounds[rest] = widths[rest] * d1[rest] * d2[rest] / (d1[rest] + d2[rest])
    return bounds


def pwl_approximate(
    f: ConcaveFn,
    x_max: float,
    nodes: int | None = None,
    span: float | None = None,
) -> PwlApproximation:
    """
    Concave piecewise-linear interpolant of ``f`` on ``[0, x_max]``.

    Parameters
    ----------
    f : ConcaveFn
        Admissible function to sample.
    x_max : float
        Right end of the approximation interval.
    nodes : int, optional
        B; the grid has B + 1 geometrically spaced nodes from
        ``x_max * span`` to ``x_max`` (default from settings).
    span : float, optional
        Ratio between the first and last grid node (default from settings).

    Returns
    -------
    PwlApproximation
        The interpolant (chords of f, hence concave and below f on
        [0, x_max]; the last chord continues beyond x_max) and an upper
        bound on the sup-error over [0, x_max].
    """
    if x_max <= 0.0:
        raise ValueError("x_max must be positive")
    require_admissible(f)
    settings = get_settings()
    nodes = settings.pwl_nodes if nodes is None else nodes
    span = settings.pwl_geometric_span if span is None else span
    if nodes < 1:
        raise ValueError("need at least one segment")

    exponents = 1.0 - np.arange(nodes + 1, dtype=np.float64) / nodes
    grid = x_max * np.power(span, exponents)
    grid[-1] = x_max
    kinks = [k for k in known_kinks(f) if 0.0 < k <= x_max]
    xs = np.unique(np.concatenate((grid, np.asarray(kinks, dtype=np.float64))))

    ys = evaluate_array(f, xs)
    x0 = np.concatenate(([0.0], xs))
    y0 = np.concatenate(([0.0], ys))
    widths = np.diff(x0)
    chords = np.diff(y0) / widths
    slopes = np.concatenate((chords, chords[-1:]))
    # rounding can leave chord slopes marginally out of order
    slopes = np.maximum(np.minimum.accumulate(slopes), 0.0)

    fn = PiecewiseLinearFn(
        breakpoints=tuple(float(v) for v in xs),
        slopes=tuple(float(s) for s in slopes),
    )
    error_bound = float(np.max(_segment_error_bounds(widths, slopes[:-1])))
    logger.debug(
        "pwl_approximate(%s): %d breakpoints on [0, %g], error bound %.3e",
        f.form, len(xs), x_max, error_bound,
    )
    return PwlApproximation(fn=fn, x_max=float(x_max), error_bound=error_bound)
