import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from painleve.core import (AirySpec, Direction, ReciprocalState, State, airy_rhs, check_sigma,
                           negate_solution, pii_pos, pii_rhs, reciprocal_rhs)
from painleve.errors import DivisionNearZero, NonFiniteState, NonPositiveValue
from painleve.integrate import DenseSolution, Trajectory, integrate, solve, TerminalKind

POS, NEG = Direction.POSITIVE, Direction.NEGATIVE


@pytest.mark.parametrize("state, direction, expected", [
    (State(0.0, 0.0, 0.7), POS, (0.7, 0.0)),
    (State(1.0, 1.0, 0.0), POS, (0.0, 3.0)),
    (State(1.0, 1.0, 0.0), NEG, (0.0, 1.0)),
])
def test_pii_rhs_examples(state, direction, expected):
    assert pii_rhs(state, direction) == expected


def test_state_rejects_non_finite():
    with pytest.raises(NonFiniteState):
        State(0.0, math.nan, 1.0)
    with pytest.raises(NonFiniteState):
        State(0.0, 1.0, math.inf)


finite = st.floats(-50, 50, allow_nan=False)


@given(finite, finite, finite, st.sampled_from(list(Direction)))
def test_pii_rhs_is_odd(t, s, v, direction):
    ds, dv = pii_rhs(State(t, s, v), direction)
    ms, mv = pii_rhs(State(t, -s, -v), direction)
    assert (ms, mv) == (-ds, -dv)


def _reciprocal_oracle(t, w, u, direction):
    """Chain rule through s = 1/w, using only the direct equation."""
    s, v = 1.0 / w, -u / (w * w)
    _, acc = pii_rhs(State(t, s, v), direction)
    return u, -acc / (s * s) + 2.0 * v * v / s ** 3


@pytest.mark.parametrize("rs, direction, expected", [
    (ReciprocalState(1.0, 0.5, -1.0), POS, (-1.0, -0.5)),
    (ReciprocalState(0.0, 1.0, 0.0), POS, (0.0, -2.0)),
    (ReciprocalState(0.0, 1.0, 0.0), NEG, (0.0, -2.0)),
])
def test_reciprocal_rhs_examples(rs, direction, expected):
    got = reciprocal_rhs(rs, direction)
    assert got == pytest.approx(expected, rel=1e-14, abs=1e-14)
    assert got == pytest.approx(_reciprocal_oracle(rs.t, rs.w, rs.u, direction), rel=1e-13)


def test_reciprocal_rhs_near_pole():
    rs = ReciprocalState(1.0, 1e-12, 1.0)
    with pytest.raises(DivisionNearZero):
        reciprocal_rhs(rs, POS)
    assert reciprocal_rhs(rs, POS, pole_armed=True) == (1.0, 1e-12)
    assert reciprocal_rhs(rs, NEG, pole_armed=True) == (1.0, -1e-12)
    with pytest.raises(DivisionNearZero):
        ReciprocalState(0.0, 0.0, 1.0)


def round_trip_error(t, s, v, direction):
    """Relative error of direct derivatives recovered from reciprocal ones.

    Mapping back forms ``-u'/w^2 + 2u^2/w^3``, two terms that can nearly cancel,
    so the error is measured against the size of those terms.
    """
    ds, dv = pii_rhs(State(t, s, v), direction)
    rs = State(t, s, v).to_reciprocal()
    dw, du = reciprocal_rhs(rs, direction)
    w = rs.w
    term1, term2 = -du / (w * w), 2.0 * dw * dw / w ** 3
    return max(abs(-dw / (w * w) - ds) / abs(ds),
               abs(term1 + term2 - dv) / (abs(term1) + abs(term2)))


def test_reciprocal_round_trip_random_points():
    rng = np.random.default_rng(20240)
    worst = 0.0
    for _ in range(10_000):
        t = rng.uniform(0.0, 10.0)
        s = rng.uniform(0.1, 10.0) * rng.choice([-1.0, 1.0])
        v = rng.uniform(-10.0, 10.0)
        for direction in Direction:
            worst = max(worst, round_trip_error(t, s, v, direction))
    assert worst < 1e-13


@pytest.mark.parametrize("args, expected", [
    ((0.0, 1.0, 0.0, 1.0), (0.0, 0.0)),
    ((2.0, 1.0, 0.0, 1.0), (0.0, -2.0)),
    ((2.0, 1.0, 0.0, 0.5), (0.0, -1.0)),
])
def test_airy_rhs_examples(args, expected):
    assert airy_rhs(*args) == expected


@given(finite, finite, finite)
def test_airy_rhs_unit_lambda_is_plain_airy(t, g, h):
    assert airy_rhs(t, g, h, 1.0) == (h, -t * g)


def test_airy_spec_validation():
    with pytest.raises(NonPositiveValue):
        AirySpec(lam=0.0)
    with pytest.raises(ValueError):
        AirySpec(1.0, 0.0, 0.0)


def test_check_sigma():
    assert check_sigma(2) == 2.0
    with pytest.raises(NonPositiveValue):
        check_sigma(0.0)
    with pytest.raises(NonPositiveValue, match="negate"):
        check_sigma(-1.0)


def test_negate_zero_trajectory_is_fixed():
    dense, term = solve(pii_pos, 0.0, (0.0, 0.0), 1.0)
    zero = Trajectory(1.0, POS, dense, term)
    neg = negate_solution(zero)
    assert all(s == 0.0 and v == 0.0 for s, v in neg.dense.ys)
    assert neg.evaluate(0.37).s == 0.0


def test_negate_matches_direct_integration_with_negative_slope(traj_pos_1, cfg):
    neg = negate_solution(traj_pos_1)
    assert neg.initial_slope == -1.0
    end = traj_pos_1.t_end
    dense, _ = solve(pii_pos, 0.0, (0.0, -1.0), end, cfg,
                     switch_magnitude=cfg.switch_magnitude)
    for t in np.linspace(0.0, min(end, dense.t_end), 50):
        s_ref, v_ref = dense(float(t))
        got = neg.evaluate(float(t))
        assert got.s == pytest.approx(s_ref, rel=cfg.rel_tol, abs=cfg.abs_tol)
        assert got.v == pytest.approx(v_ref, rel=cfg.rel_tol, abs=cfg.abs_tol)


def test_negate_is_involution(traj_neg_03):
    twice = negate_solution(negate_solution(traj_neg_03))
    assert twice.sign == traj_neg_03.sign
    assert twice.samples == traj_neg_03.samples
    assert twice.evaluate(12.345) == traj_neg_03.evaluate(12.345)


@settings(max_examples=50)
@given(st.floats(0.01, 3.0))
def test_negated_trajectory_still_solves_equation(sigma):
    traj = integrate(sigma, NEG, 3.0)
    neg = negate_solution(traj)
    for st_pos, st_neg in zip(traj.samples, neg.samples):
        a_pos = pii_rhs(st_pos, NEG)[1]
        a_neg = pii_rhs(st_neg, NEG)[1]
        assert a_neg == -a_pos
    assert traj.terminal.kind in (TerminalKind.REACHED_END, TerminalKind.SWITCH)
