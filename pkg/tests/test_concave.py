"""
Tests for admissible concave functions and the hook machinery.

Run with:
    pytest tests/test_concave.py -v
"""

from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, seed, settings
from hypothesis import strategies as st
from pydantic import ValidationError

from svineq.core.concave import (
    evaluate,
    evaluate_array,
    hook_decompose,
    hook_reconstruct,
    odd_extension,
    pwl_approximate,
    scale_fn,
    validate,
)
from svineq.core.errors import NegativeArgument, NotPiecewiseLinear
from svineq.models.schemas import (
    CONCAVE_FN_ADAPTER,
    HookAtom,
    HookFn,
    HookMeasure,
    Log1pFn,
    PiecewiseLinearFn,
    PowerFn,
)


@st.composite
def admissible_pwl(draw) -> PiecewiseLinearFn:
    k = draw(st.integers(min_value=0, max_value=6))
    widths = draw(st.lists(st.floats(0.05, 3.0), min_size=k, max_size=k))
    drops = draw(st.lists(st.floats(0.0, 2.0), min_size=k, max_size=k))
    tail = draw(st.floats(0.0, 2.0))
    breakpoints = tuple(float(v) for v in np.cumsum(widths))
    slopes = tuple(float(tail + v) for v in np.cumsum(drops[::-1])[::-1]) + (tail,)
    return PiecewiseLinearFn(breakpoints=breakpoints, slopes=slopes)


# ═══════════════════════════════════════════════════════════════════════════
# Evaluation
# ═══════════════════════════════════════════════════════════════════════════

class TestEvaluate:
    def test_hook(self):
        assert evaluate(HookFn(t=1.0), 0.5) == 0.5
        assert evaluate(HookFn(t=1.0), 2.0) == 1.0

    def test_power(self):
        assert evaluate(PowerFn(p=0.5), 4.0) == pytest.approx(2.0)

    def test_pwl(self):
        f = PiecewiseLinearFn(breakpoints=(1.0, 2.0), slopes=(1.0, 0.5, 0.0))
        assert evaluate(f, 2.0) == pytest.approx(1.5)
        assert evaluate(f, 10.0) == pytest.approx(1.5)

    def test_log1p_has_unit_slope_at_origin(self):
        f = Log1pFn(scale=2.0)
        assert evaluate(f, 1e-8) == pytest.approx(1e-8, rel=1e-6)

    def test_identity_is_bit_exact(self):
        x = np.array([0.1, 1.0 / 3.0, 7.25])
        assert np.array_equal(evaluate_array(PowerFn(p=1.0), x), x)

    def test_zero_maps_to_zero(self):
        for f in (HookFn(t=2.0), PowerFn(p=0.3), Log1pFn(scale=1.0),
                  PiecewiseLinearFn(breakpoints=(1.0,), slopes=(2.0, 1.0))):
            assert evaluate(f, 0.0) == 0.0

    def test_negative_argument(self):
        with pytest.raises(NegativeArgument):
            evaluate(HookFn(t=1.0), -0.1)

    def test_odd_extension(self):
        values = odd_extension(PowerFn(p=0.5), [-4.0, 0.0, 9.0])
        assert values.tolist() == pytest.approx([-2.0, 0.0, 3.0])

    def test_discriminated_parsing(self):
        f = CONCAVE_FN_ADAPTER.validate_python({"form": "hook", "t": 2.5})
        assert isinstance(f, HookFn) and f.t == 2.5
        with pytest.raises(ValidationError):
            CONCAVE_FN_ADAPTER.validate_python({"form": "power", "p": 1.5})


# ═══════════════════════════════════════════════════════════════════════════
# Admissibility
# ═══════════════════════════════════════════════════════════════════════════

class TestValidate:
    def test_hook_ok(self):
        assert validate(HookFn(t=1.0)).ok

    def test_identity_ok(self):
        assert validate(PowerFn(p=1.0)).ok

    def test_convex_kink(self):
        result = validate(PiecewiseLinearFn(breakpoints=(1.0, 2.0), slopes=(1.0, 1.5, 0.0)))
        assert not result.ok
        assert result.message == "slopes not non-increasing at segment 1"
        assert result.location == 1

    def test_negative_final_slope(self):
        result = validate(PiecewiseLinearFn(breakpoints=(1.0,), slopes=(1.0, -0.5)))
        assert not result.ok and result.invariant == "monotone"

    def test_shape_mismatch(self):
        result = validate(PiecewiseLinearFn(breakpoints=(1.0,), slopes=(1.0,)))
        assert not result.ok and result.invariant == "shape"

    def test_equal_slopes_allowed(self):
        assert validate(PiecewiseLinearFn(breakpoints=(1.0, 2.0), slopes=(1.0, 1.0, 0.5))).ok


# ═══════════════════════════════════════════════════════════════════════════
# Hook decomposition
# ═══════════════════════════════════════════════════════════════════════════

class TestHookDecompose:
    def test_single_hook(self):
        m = hook_decompose(PiecewiseLinearFn(breakpoints=(1.0,), slopes=(1.0, 0.0)))
        assert m.atoms == [HookAtom(t=1.0, weight=1.0)]
        assert m.linear_tail == 0.0

    def test_two_hooks(self):
        m = hook_decompose(PiecewiseLinearFn(breakpoints=(1.0, 2.0), slopes=(1.0, 0.5, 0.0)))
        assert [(a.t, a.weight) for a in m.atoms] == [(1.0, 0.5), (2.0, 0.5)]
        assert hook_reconstruct(m, [2.0])[0] == pytest.approx(1.5)

    def test_linear_tail(self):
        m = hook_decompose(PiecewiseLinearFn(breakpoints=(1.0,), slopes=(2.0, 1.0)))
        assert [(a.t, a.weight) for a in m.atoms] == [(1.0, 1.0)]
        assert m.linear_tail == 1.0
        assert hook_reconstruct(m, [3.0])[0] == pytest.approx(4.0)

    def test_zero_weight_atoms_dropped(self):
        m = hook_decompose(PiecewiseLinearFn(breakpoints=(1.0, 2.0), slopes=(1.0, 1.0, 0.0)))
        assert [a.t for a in m.atoms] == [2.0]

    def test_closed_form_rejected(self):
        with pytest.raises(NotPiecewiseLinear):
            hook_decompose(PowerFn(p=0.5))

    def test_measure_requires_increasing_thresholds(self):
        with pytest.raises(ValidationError):
            HookMeasure(atoms=[HookAtom(t=2.0, weight=1.0), HookAtom(t=1.0, weight=1.0)])

    @seed(7)
    @settings(max_examples=300, deadline=None)
    @given(admissible_pwl(), st.integers(min_value=0, max_value=2**32 - 1))
    def test_reconstruction_is_exact(self, f, draw_seed):
        m = hook_decompose(f)
        rng = np.random.default_rng(draw_seed)
        starts = np.concatenate(([0.0], f.breakpoints))
        ends = np.concatenate((f.breakpoints, [starts[-1] + 5.0]))
        points = [starts, ends]
        for lo, hi in zip(starts, ends):
            points.append(rng.uniform(lo, hi, size=10))
        x = np.concatenate(points)
        assert np.max(np.abs(hook_reconstruct(m, x) - evaluate_array(f, x))) <= 1e-12 * (1 + np.max(x))

    @seed(8)
    @settings(max_examples=100, deadline=None)
    @given(admissible_pwl(), st.floats(0.1, 10.0))
    def test_scaling_multiplies_values(self, f, c):
        x = np.linspace(0.0, 12.0, 25)
        assert np.allclose(evaluate_array(scale_fn(f, c), x), c * evaluate_array(f, x), rtol=1e-12, atol=0)


# ═══════════════════════════════════════════════════════════════════════════
# Structural identities
# ═══════════════════════════════════════════════════════════════════════════

closed_forms = st.one_of(
    st.builds(HookFn, t=st.floats(0.01, 10.0)),
    st.builds(PowerFn, p=st.floats(0.05, 1.0)),
    st.builds(Log1pFn, scale=st.floats(0.01, 10.0)),
)


class TestStructure:
    @seed(9)
    @settings(max_examples=200, deadline=None)
    @given(st.floats(0.01, 100.0), st.floats(0.0, 1000.0))
    def test_hook_scaling(self, t, x):
        expected = t * evaluate(HookFn(t=1.0), x / t)
        assert evaluate(HookFn(t=t), x) == pytest.approx(expected, rel=1e-12, abs=1e-300)

    @seed(10)
    @settings(max_examples=200, deadline=None)
    @given(st.one_of(admissible_pwl(), closed_forms), st.floats(0.0, 50.0), st.floats(0.0, 50.0))
    def test_subadditive(self, f, x, y):
        joint = evaluate(f, x + y)
        assert joint <= evaluate(f, x) + evaluate(f, y) + 1e-12 * (1.0 + abs(joint))

    def test_slope_order_decides_admissibility(self):
        assert validate(PiecewiseLinearFn(breakpoints=(1.0,), slopes=(1.0, 0.0))).ok
        assert not validate(PiecewiseLinearFn(breakpoints=(1.0,), slopes=(0.0, 1.0))).ok


# ═══════════════════════════════════════════════════════════════════════════
# Piecewise-linear approximation
# ═══════════════════════════════════════════════════════════════════════════

class TestPwlApproximate:
    def test_hook_is_reproduced(self):
        approx = pwl_approximate(HookFn(t=1.0), 2.0, nodes=20)
        x = np.linspace(0.0, 2.0, 1001)
        assert np.max(np.abs(evaluate_array(approx.fn, x) - np.minimum(x, 1.0))) <= 1e-12
        assert approx.error_bound <= 1e-12

    def test_identity_is_reproduced(self):
        approx = pwl_approximate(PowerFn(p=1.0), 3.0, nodes=7)
        x = np.linspace(0.0, 3.0, 301)
        assert np.max(np.abs(evaluate_array(approx.fn, x) - x)) <= 1e-12
        assert approx.error_bound <= 1e-12

    def test_sqrt_on_zero_four(self):
        approx = pwl_approximate(PowerFn(p=0.5), 4.0, nodes=200)
        x = np.linspace(0.0, 4.0, 100_001)
        error = np.max(np.abs(np.sqrt(x) - evaluate_array(approx.fn, x)))
        assert error < 0.01
        assert approx.error_bound < 0.01
        assert error <= approx.error_bound + 1e-12

    def test_output_validates(self):
        for f in (PowerFn(p=0.25), Log1pFn(scale=0.5), HookFn(t=0.3)):
            assert validate(pwl_approximate(f, 5.0, nodes=50).fn).ok

    def test_interpolant_stays_below_concave_function(self):
        approx = pwl_approximate(Log1pFn(scale=1.0), 10.0, nodes=40)
        x = np.linspace(0.0, 10.0, 5001)
        assert np.all(evaluate_array(approx.fn, x) <= evaluate_array(Log1pFn(scale=1.0), x) + 1e-12)
