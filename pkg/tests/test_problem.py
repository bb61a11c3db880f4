import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from esmf.problem import (INF, DimensionError, EvaluatedPoint, MeritParams, ProblemSpec,
                          ViolationNorm, barrier_value, eval_violation, in_unrelaxable,
                          is_feasible, merit_value, relax_equalities, violation_from_values)


def unit_box(n=1, cons=()):
    return ProblemSpec("box", n, lambda x: float(np.sum(x)), np.zeros(n), np.ones(n),
                       relaxable=cons)


class Counter:
    def __init__(self, fn):
        self.fn, self.calls = fn, 0

    def __call__(self, x):
        self.calls += 1
        return self.fn(x)


# -- in_unrelaxable -----------------------------------------------------------

@pytest.mark.parametrize("x, expected", [(0.5, True), (1.0, True), (1.5, False), (-1e-300, False)])
def test_in_unrelaxable_box(x, expected):
    assert in_unrelaxable([x], unit_box()) is expected


def test_in_unrelaxable_linear_rows_exact():
    p = ProblemSpec("lin", 2, lambda x: 0.0, [-5, -5], [5, 5], linear=[([1.0, 1.0], 1.0)])
    assert in_unrelaxable([0.5, 0.5], p)
    assert not in_unrelaxable([0.5, 0.5 + 1e-12], p)


def test_dimension_mismatch_raises():
    with pytest.raises(DimensionError):
        in_unrelaxable([0.1, 0.2], unit_box())
    with pytest.raises(DimensionError):
        merit_value([0.1, 0.2], unit_box(), MeritParams(10.0))


def test_problemspec_rejects_bad_bounds():
    with pytest.raises(ValueError):
        ProblemSpec("bad", 1, lambda x: 0.0, [1.0], [0.0])
    with pytest.raises(ValueError):
        ProblemSpec("bad", 0, lambda x: 0.0, [], [])


def test_problemspec_bounds_are_read_only():
    p = unit_box(2)
    with pytest.raises(ValueError):
        p.lower[0] = -1.0


# -- violation ----------------------------------------------------------------

@pytest.mark.parametrize("values, norm, expected", [
    ((-1, -2), ViolationNorm.L1, 0.0),
    ((0.5, -1), ViolationNorm.L1, 0.5),
    ((0.5, -1, 2), ViolationNorm.L2_SQUARED, 4.25),
    ((), ViolationNorm.L1, 0.0),
])
def test_violation_examples(values, norm, expected):
    assert violation_from_values(values, norm) == expected


def test_eval_violation_without_constraints_is_zero():
    assert eval_violation([0.3], unit_box()) == 0.0


def test_norm_parse_aliases():
    assert ViolationNorm.parse("L2") is ViolationNorm.L2_SQUARED
    assert ViolationNorm.parse("l1") is ViolationNorm.L1
    with pytest.raises(ValueError):
        ViolationNorm.parse("linf")


@settings(max_examples=200, deadline=None)
@given(st.lists(st.floats(-1e6, 1e6), min_size=1, max_size=8))
def test_violation_nonnegative_and_same_zero_set(values):
    l1 = violation_from_values(values, ViolationNorm.L1)
    l2 = violation_from_values(values, ViolationNorm.L2_SQUARED)
    assert l1 >= 0 and l2 >= 0
    all_satisfied = all(v <= 0 for v in values)
    assert (l1 == 0) == all_satisfied
    # the squared norm can underflow for tiny violations, so compare on the L1 side
    if l2 > 0:
        assert l1 > 0


# -- barrier ------------------------------------------------------------------

def test_barrier_passes_through_and_blocks():
    p = unit_box()
    h = Counter(lambda x: 3.2)
    assert barrier_value(h, [0.5], p) == 3.2
    assert barrier_value(h, [1.0], p) == 3.2  # closed set
    assert h.calls == 2
    assert barrier_value(h, [2.0], p) == INF
    assert h.calls == 2


@settings(max_examples=100, deadline=None)
@given(st.floats(-3, 3))
def test_barrier_never_evaluates_outside(x):
    f = Counter(lambda x: float(x[0] ** 2))
    c = Counter(lambda x: float(x[0] - 0.5))
    p = ProblemSpec("c", 1, f, [0.0], [1.0], relaxable=(c,))
    ep = merit_value([x], p, MeritParams(10.0))
    if 0 <= x <= 1:
        assert (f.calls, c.calls) == (1, 1)
        assert ep.in_omega_nr
    else:
        assert (f.calls, c.calls) == (0, 0)
        assert ep.f_val == ep.merit_val == INF and not ep.in_omega_nr


# -- merit --------------------------------------------------------------------

def test_merit_examples():
    p = ProblemSpec("m", 1, lambda x: 1.0, [0], [1], relaxable=(lambda x: 0.5,))
    ep = merit_value([0.5], p, MeritParams(10.0))
    assert (ep.f_val, ep.g_val, ep.merit_val) == (1.0, 0.5, 6.0)

    q = ProblemSpec("m", 1, lambda x: 1.25, [0], [1], relaxable=(lambda x: -1.0,))
    assert merit_value([0.5], q, MeritParams(123.0)).merit_val == 1.25
    assert merit_value([4.0], q, MeritParams(10.0)).merit_val == INF


def test_merit_params_validation():
    with pytest.raises(ValueError):
        MeritParams(-1.0)
    with pytest.raises(ValueError):
        MeritParams(1.0, big_c=1.0)


def test_non_finite_evaluator_becomes_infinite_merit():
    p = ProblemSpec("nan", 1, lambda x: math.nan, [0], [1], relaxable=(lambda x: 0.1,))
    ep = merit_value([0.5], p, MeritParams(10.0))
    assert ep.merit_val == INF and ep.error is not None and ep.in_omega_nr
    q = ProblemSpec("nanc", 1, lambda x: 0.0, [0], [1], relaxable=(lambda x: math.nan,))
    ep = merit_value([0.5], q, MeritParams(10.0))
    assert ep.g_val == INF and ep.merit_val == INF


def _random_problem():
    return ProblemSpec(
        "rnd", 2, lambda x: float(np.sin(3 * x[0]) + x[1] ** 2), [-2, -2], [2, 2],
        relaxable=(lambda x: float(x[0] + x[1] - 1), lambda x: float(x[0] ** 2 - 0.5)))


@settings(max_examples=200, deadline=None)
@given(st.floats(-3, 3), st.floats(-3, 3))
def test_merit_with_zero_penalty_equals_barrier(a, b):
    p = _random_problem()
    x = np.array([a, b])
    assert merit_value(x, p, MeritParams(0.0)).merit_val == barrier_value(p.objective, x, p)


@settings(max_examples=200, deadline=None)
@given(st.floats(-2, 2), st.floats(-2, 2))
def test_merit_monotone_in_penalty(a, b):
    p = _random_problem()
    vals = [merit_value([a, b], p, MeritParams(d)).merit_val for d in (1.0, 10.0, 100.0)]
    assert vals[0] <= vals[1] <= vals[2]


# -- equality relaxation and feasibility ----------------------------------------

@pytest.mark.parametrize("h, tol, expected", [
    (0.0, 1e-4, -1e-4), (0.01, 1e-4, 0.0099), (-5e-5, 1e-4, -5e-5)])
def test_relax_equalities(h, tol, expected):
    (c,) = relax_equalities([lambda x: h], tol)
    assert c(None) == pytest.approx(expected, abs=1e-15)


def test_relax_equalities_needs_positive_tol():
    with pytest.raises(ValueError):
        relax_equalities([lambda x: 0.0], 0.0)


@pytest.mark.parametrize("g, inside, expected", [
    (0.0, True, True), (1e-5, True, False), (9.99e-6, True, True), (0.0, False, False)])
def test_is_feasible(g, inside, expected):
    ep = EvaluatedPoint(np.zeros(1), 0.0, g, 0.0, inside)
    assert is_feasible(ep, 1e-5) is expected


def test_evaluators_are_deterministic():
    p = _random_problem()
    x = np.array([0.3, -0.7])
    assert merit_value(x, p, MeritParams(10.0)) == merit_value(x, p, MeritParams(10.0))
