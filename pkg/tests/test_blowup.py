import math

import numpy as np
import pytest

from painleve.blowup import (estimate_pole, is_strictly_increasing, tangent_envelope_check,
                             theorem1_escape_bound, theorem2_upper, theorem3_lower,
                             theorem6_monotone_lower)
from painleve.core import SQRT3_OVER_2, Direction
from painleve.errors import NoBlowUpDetected, NonPositiveValue, NotMonotone
from painleve.integrate import SolverConfig, integrate
from painleve.quadrature import integral_sigma_quartic

SWEEP = np.logspace(-4, 2, 20)

# (sigma, leading digits quoted for the blow-up time, quoted 2/sqrt(sigma))
QUOTED_TABLE = [(100.0, 0.18, 0.2), (4.0, 0.91, 1.0), (1.0, 1.73, 2.0), (0.0001, 6.77, 200.0)]


@pytest.fixture(scope="module")
def pole_1():
    return estimate_pole(1.0)


@pytest.mark.parametrize("sigma, quoted, _", QUOTED_TABLE)
def test_pole_times_match_quoted_values(sigma, quoted, _):
    est = estimate_pole(sigma)
    assert abs(est.t_pole - quoted) <= 0.01
    # quoted values are truncated, so the true value sits at or above them
    assert quoted <= est.t_pole < quoted + 0.01


@pytest.mark.parametrize("sigma, _, upper", QUOTED_TABLE)
def test_theorem2_upper_quoted(sigma, _, upper):
    assert theorem2_upper(sigma) == pytest.approx(upper, rel=1e-15)


def test_theorem2_upper_arithmetic():
    assert theorem2_upper(0.25) == 4.0


@pytest.mark.parametrize("sigma, expected", [
    (1.0, 1.224744871391589),   # 2/sqrt(8/3) = sqrt(3/2)
    (100.0, 0.019998333541649),
])
def test_theorem3_lower_values(sigma, expected):
    assert theorem3_lower(sigma) == pytest.approx(expected, rel=1e-13)


@pytest.mark.parametrize("sigma", SWEEP)
def test_lower_below_upper(sigma):
    assert theorem3_lower(sigma) < theorem2_upper(sigma)


@pytest.mark.parametrize("sigma, expected", [(1.0, math.pi / 2), (4.0, math.pi / 4)])
def test_theorem6_values(sigma, expected):
    assert theorem6_monotone_lower(sigma) == pytest.approx(expected, rel=1e-15)


def test_theorem1_escape_bound_arithmetic():
    assert theorem1_escape_bound(1.0, 2.0) == 1.5
    with pytest.raises(NonPositiveValue):
        theorem1_escape_bound(0.0, 1.0)
    with pytest.raises(NonPositiveValue):
        theorem1_escape_bound(1.0, -1.0)


def test_theorem1_dominates_pole(pole_1):
    taus = np.linspace(0.0, pole_1.t_pole, 202)[1:-1]
    bounds = [theorem1_escape_bound(t, pole_1.state_at(float(t)).s) for t in taus]
    assert all(b > pole_1.t_pole for b in bounds)


def test_theorem1_bound_tightens(pole_1):
    taus = np.linspace(0.5 * pole_1.t_pole, pole_1.t_pole, 400)[:-1]
    bounds = [theorem1_escape_bound(t, pole_1.state_at(float(t)).s) for t in taus]
    assert all(b < a for a, b in zip(bounds, bounds[1:]))
    assert bounds[-1] - pole_1.t_pole < 1e-3


@pytest.mark.parametrize("sigma", SWEEP)
def test_bound_sandwich_sweep(sigma):
    est = estimate_pole(sigma)
    assert theorem3_lower(sigma) < est.t_pole < theorem2_upper(sigma)
    assert est.bounds_respected


def test_pole_estimate_fields(pole_1):
    cfg = SolverConfig()
    assert pole_1.bracket_width <= cfg.event_tol
    assert pole_1.simple_pole
    assert 0.99 <= abs(pole_1.residue_slope) <= 1.01
    assert pole_1.switch_time < pole_1.t_pole
    assert pole_1.analytic_lower == theorem3_lower(1.0)
    assert pole_1.analytic_upper == theorem2_upper(1.0)


def test_switch_magnitude_does_not_move_pole():
    poles = [estimate_pole(1.0, cfg=SolverConfig(switch_magnitude=m)).t_pole
             for m in (50.0, 100.0, 500.0)]
    assert max(poles) - min(poles) < 10 * SolverConfig().event_tol


def test_scaled_pole_time_band_and_limit():
    c = integral_sigma_quartic(1.0).value
    scaled = [estimate_pole(s).t_pole * math.sqrt(s) for s in SWEEP]
    assert all(0.0 < x < c for x in scaled)
    big = estimate_pole(1e4).t_pole * 100.0
    assert abs(big - c) < abs(scaled[-1] - c) < abs(scaled[0] - c)
    assert big == pytest.approx(c, rel=2e-3)


@pytest.mark.parametrize("sigma", [0.87, 1.0, 2.0, 5.0])
def test_negative_time_poles_respect_monotone_bound(sigma):
    est = estimate_pole(sigma, Direction.NEGATIVE)
    assert est.monotone
    assert est.t_pole > theorem6_monotone_lower(sigma)
    assert est.analytic_upper is None
    assert est.simple_pole


def test_negative_time_pole_sigma_1():
    est = estimate_pole(1.0, "neg")
    assert est.t_pole > math.pi / 2


def test_pole_at_explosive_boundary():
    sigma = SQRT3_OVER_2
    est = estimate_pole(sigma, "neg", SolverConfig().tightened(100))
    assert est.monotone
    assert est.t_pole > math.pi / (2 * (3 / 4) ** 0.25)


def test_no_blowup_for_small_sigma():
    with pytest.raises(NoBlowUpDetected):
        estimate_pole(0.3, "neg")


@pytest.mark.parametrize("sigma, t_end", [(1.0, 1.5), (2.0, 1.0)])
def test_tangent_envelope_holds(sigma, t_end):
    traj = integrate(sigma, "neg", t_end)
    assert tangent_envelope_check(traj)


def test_tangent_envelope_detects_inflated_solution():
    traj = integrate(1.0, "neg", 1.5)
    inflated = type(traj)(traj.sigma, traj.direction, traj.dense.scaled(10.0), traj.terminal)
    assert not tangent_envelope_check(inflated)


def test_tangent_envelope_requires_monotone():
    traj = integrate(0.3, "neg", 10.0)
    with pytest.raises(NotMonotone):
        tangent_envelope_check(traj)


def test_explosive_sweep_observed_monotone():
    # observation on a finite grid; no proof that blow-up forces monotonicity
    for sigma in (0.6, 0.65, 0.7, 0.8, 0.9, 1.5, 3.0, 10.0):
        est = estimate_pole(sigma, "neg")
        assert est.monotone
        assert is_strictly_increasing(est.trajectory)
