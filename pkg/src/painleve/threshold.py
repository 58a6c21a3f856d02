"""Explosive / oscillatory classification in negative time and the threshold search."""
from __future__ import annotations

import enum
from dataclasses import dataclass, field

from .blowup import DEFAULT_HORIZON, pole_from_trajectory
from .core import Direction, check_sigma
from .errors import InvalidBracket, NoBlowUpDetected, StepFailure
from .integrate import DEFAULT_CONFIG, SolverConfig, TerminalKind, integrate
from .oscillation import trajectory_zeros

MIN_ZERO_COUNT = 3
MAX_HORIZON_DOUBLINGS = 4


class Verdict(enum.Enum):
    EXPLOSIVE = "explosive"
    OSCILLATORY = "oscillatory"
    UNDETERMINED = "undetermined"


@dataclass(frozen=True)
class Classification:
    sigma: float
    verdict: Verdict
    horizon: float
    t_pole: float | None = None
    zero_count: int | None = None
    first_zero: float | None = None
    diagnostic: str = ""


@dataclass(frozen=True)
class ThresholdBracket:
    lo: float
    hi: float
    iterations: int
    history: tuple = field(default=(), repr=False)
    diagnostic: str = ""

    @property
    def width(self) -> float:
        return self.hi - self.lo


def classify(sigma: float, horizon: float = DEFAULT_HORIZON,
             cfg: SolverConfig | None = None,
             min_zero_count: int = MIN_ZERO_COUNT) -> Classification:
    """Decide how the negative-time transcendent behaves up to ``horizon``.

    Explosive needs a located pole no later than ``horizon``; oscillatory
    needs at least ``min_zero_count`` zeros and no blow-up on the whole
    horizon. Anything else is undetermined.
    """
    sigma = check_sigma(sigma)
    if not horizon > 0:
        raise ValueError(f"horizon must be positive, got {horizon}")
    cfg = cfg or DEFAULT_CONFIG
    traj = integrate(sigma, Direction.NEGATIVE, horizon, cfg)
    kind = traj.terminal.kind

    if kind is TerminalKind.SWITCH:
        try:
            est = pole_from_trajectory(traj, cfg)
        except (NoBlowUpDetected, StepFailure) as exc:
            return Classification(sigma, Verdict.UNDETERMINED, horizon, diagnostic=str(exc))
        if est.t_pole <= horizon:
            return Classification(sigma, Verdict.EXPLOSIVE, horizon, t_pole=est.t_pole)
        return Classification(sigma, Verdict.UNDETERMINED, horizon,
                              diagnostic=f"pole at {est.t_pole:.6g} lies beyond the horizon")
    if kind is TerminalKind.STEP_FAILURE:
        return Classification(sigma, Verdict.UNDETERMINED, horizon,
                              diagnostic=f"step failure at t = {traj.terminal.time:.6g}: "
                                         f"{traj.terminal.message}")

    zeros = trajectory_zeros(traj)
    if len(zeros) >= min_zero_count:
        return Classification(sigma, Verdict.OSCILLATORY, horizon, zero_count=len(zeros),
                              first_zero=zeros.times[0])
    return Classification(sigma, Verdict.UNDETERMINED, horizon, zero_count=len(zeros),
                          diagnostic=f"{len(zeros)} zeros and no blow-up before {horizon}")


def _classify_with_retries(sigma, horizon, cfg, max_doublings):
    result = classify(sigma, horizon, cfg)
    for _ in range(max_doublings):
        if result.verdict is not Verdict.UNDETERMINED:
            break
        horizon *= 2
        result = classify(sigma, horizon, cfg)
    return result


def find_threshold(lo0: float = 0.5, hi0: float = 0.9, width_goal: float = 1e-4,
                   horizon: float = DEFAULT_HORIZON, cfg: SolverConfig | None = None,
                   max_doublings: int = MAX_HORIZON_DOUBLINGS) -> ThresholdBracket:
    """Bisect on sigma between an oscillatory ``lo0`` and an explosive ``hi0``.

    Both endpoints are classified afresh with ``cfg`` before any bisection. A
    midpoint that comes back undetermined is retried with the horizon doubled
    up to ``max_doublings`` times; if it still cannot be classified the
    current bracket is returned with a diagnostic.
    """
    cfg = cfg or DEFAULT_CONFIG
    lo, hi = float(lo0), float(hi0)
    if not lo < hi:
        raise InvalidBracket(f"need lo < hi, got ({lo}, {hi})")
    c_lo = classify(lo, horizon, cfg)
    if c_lo.verdict is not Verdict.OSCILLATORY:
        raise InvalidBracket(f"lower endpoint {lo} is {c_lo.verdict.value}, not oscillatory")
    c_hi = classify(hi, horizon, cfg)
    if c_hi.verdict is not Verdict.EXPLOSIVE:
        raise InvalidBracket(f"upper endpoint {hi} is {c_hi.verdict.value}, not explosive")

    history = [(lo, hi)]
    iterations = 0
    while hi - lo > width_goal:
        mid = 0.5 * (lo + hi)
        result = _classify_with_retries(mid, horizon, cfg, max_doublings)
        if result.verdict is Verdict.UNDETERMINED:
            return ThresholdBracket(lo, hi, iterations, tuple(history),
                                    diagnostic=f"sigma = {mid!r} undetermined at horizon cap: "
                                               f"{result.diagnostic}")
        if result.verdict is Verdict.OSCILLATORY:
            lo = mid
        else:
            hi = mid
        iterations += 1
        history.append((lo, hi))
    return ThresholdBracket(lo, hi, iterations, tuple(history))
