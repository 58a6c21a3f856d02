"""Pole location and the analytic bounds on the blow-up time.

Blow-up is located by integrating in the original variables until ``|s|``
reaches the switch magnitude and then continuing ``w = 1/s``, which passes
through zero at the pole. The pole time is an ordinary root of ``w``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

from .core import Direction, State, check_sigma, reciprocal_system
from .errors import NoBlowUpDetected, NonPositiveValue, NotMonotone, StepFailure
from .integrate import (DEFAULT_CONFIG, DenseSolution, SolverConfig, TerminalKind,
                        Trajectory, integrate, solve)

#: NegativeTime search horizon; every observed explosive case blows up well before
DEFAULT_HORIZON = 40.0

# w reaches zero within about 1/switch_magnitude after the handoff
_RECIPROCAL_WINDOW = 1.0


def theorem1_escape_bound(tau: float, s_tau: float) -> float:
    """Escape-time bound ``tau + 1/s(tau)`` for a positive-time transcendent."""
    if not tau > 0:
        raise NonPositiveValue(f"tau must be positive, got {tau}")
    if not s_tau > 0:
        raise NonPositiveValue(f"s(tau) must be positive, got {s_tau}")
    return tau + 1.0 / s_tau


def theorem2_upper(sigma: float) -> float:
    """Upper bound ``2/sqrt(sigma)`` on the positive-time blow-up."""
    return 2.0 / math.sqrt(check_sigma(sigma))


def theorem3_lower(sigma: float) -> float:
    """Lower bound ``2/sqrt(sigma^2 + 5/3)`` on the positive-time blow-up."""
    sigma = check_sigma(sigma)
    return 2.0 / math.sqrt(sigma * sigma + 5.0 / 3.0)


def theorem6_monotone_lower(sigma: float) -> float:
    """Earliest possible blow-up ``pi/(2 sqrt(sigma))`` of an increasing
    negative-time transcendent."""
    return math.pi / (2.0 * math.sqrt(check_sigma(sigma)))


def is_strictly_increasing(traj: Trajectory) -> bool:
    """True when ``s' > 0`` at every stored node after the start."""
    return all(v > 0 for _, v in traj.dense.ys[1:]) and traj.dense.ys[0][1] > 0


def tangent_envelope_check(traj: Trajectory) -> bool:
    """Check ``s(t) < sqrt(sigma) tan(sqrt(sigma) t)`` wherever it is finite.

    Only meaningful for an increasing negative-time trajectory; anything with
    a decreasing stretch raises :class:`NotMonotone`.
    """
    samples = traj.samples
    for prev, cur in zip(samples, samples[1:]):
        if not (cur.s > prev.s):
            raise NotMonotone(f"s decreases between t = {prev.t} and t = {cur.t}")
    root = math.sqrt(traj.sigma)
    for st in samples[1:]:
        arg = root * st.t
        if arg >= math.pi / 2:
            break
        if not st.s < root * math.tan(arg):
            return False
    return True


@dataclass(frozen=True, eq=False)
class PoleEstimate:
    sigma: float
    direction: Direction
    t_pole: float
    bracket_width: float
    residue_slope: float
    switch_time: float
    analytic_lower: float | None
    analytic_upper: float | None
    monotone: bool
    trajectory: Trajectory = field(repr=False)
    reciprocal: DenseSolution = field(repr=False)

    @property
    def bounds_respected(self) -> bool:
        lo = -math.inf if self.analytic_lower is None else self.analytic_lower
        hi = math.inf if self.analytic_upper is None else self.analytic_upper
        return lo < self.t_pole < hi

    @property
    def simple_pole(self) -> bool:
        return abs(abs(self.residue_slope) - 1.0) <= 0.01

    def state_at(self, t: float) -> State:
        """Solution value at ``0 <= t < t_pole``, reading whichever piece covers ``t``."""
        if t <= self.switch_time:
            return self.trajectory.evaluate(t)
        w, u = self.reciprocal(t)
        return State(t, 1.0 / w, -u / (w * w))


def pole_from_trajectory(traj: Trajectory, cfg: SolverConfig | None = None) -> PoleEstimate:
    """Continue a trajectory that stopped at the switch magnitude through its pole."""
    cfg = cfg or traj.config
    term = traj.terminal
    if term.kind is TerminalKind.STEP_FAILURE:
        raise StepFailure(term.message or "step failure", term.time)
    if term.kind is not TerminalKind.SWITCH:
        raise NoBlowUpDetected(
            f"|s| stayed below {cfg.switch_magnitude} up to t = {traj.t_end}")
    handoff = traj.samples[-1]
    rs = handoff.to_reciprocal()
    rdense, rterm = solve(reciprocal_system(traj.direction), rs.t, (rs.w, rs.u),
                          rs.t + _RECIPROCAL_WINDOW, cfg,
                          events={"pole": lambda t, w, u: w})
    if rterm.kind is not TerminalKind.EVENT:
        raise NoBlowUpDetected(
            f"w = 1/s did not reach zero within {_RECIPROCAL_WINDOW} of the handoff "
            f"({rterm.kind.value} at t = {rterm.time})")
    t_pole = rterm.time
    lo, hi = rterm.bracket
    residue = rdense(t_pole)[1]

    sigma = traj.sigma
    monotone = is_strictly_increasing(traj) and all(
        u * handoff.s < 0 for _, u in rdense.ys)
    if traj.direction is Direction.POSITIVE:
        lower, upper = theorem3_lower(sigma), theorem2_upper(sigma)
    else:
        lower = theorem6_monotone_lower(sigma) if monotone else None
        upper = None
    return PoleEstimate(sigma, traj.direction, t_pole, hi - lo, residue, handoff.t,
                        lower, upper, monotone, traj, rdense)


def estimate_pole(sigma: float, direction: Direction | str = Direction.POSITIVE,
                  cfg: SolverConfig | None = None,
                  horizon: float | None = None) -> PoleEstimate:
    """Estimate the blow-up time of the transcendent with initial slope ``sigma``.

    In positive time a pole always exists before ``2/sqrt(sigma)``, which is
    used as the search horizon (plus a margin). In negative time the search
    stops at ``horizon`` (default 40) and :class:`NoBlowUpDetected` is raised
    if ``|s|`` never gets large.
    """
    sigma = check_sigma(sigma)
    direction = Direction.parse(direction)
    cfg = cfg or DEFAULT_CONFIG
    if horizon is None:
        horizon = (theorem2_upper(sigma) + 1.0 if direction is Direction.POSITIVE
                   else DEFAULT_HORIZON)
    traj = integrate(sigma, direction, horizon, cfg)
    return pole_from_trajectory(traj, cfg)
