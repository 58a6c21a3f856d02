"""Adaptive Dormand-Prince 5(4) integration with dense output and events.

All systems handled here are second order, written as a pair ``(a, b)`` with
``a' = b``; the stepper is specialised to two components and plain floats,
which is much faster than numpy for a state this small.
"""
from __future__ import annotations

import bisect
import enum
import math
from dataclasses import dataclass, field, replace
from functools import cached_property
from typing import Callable, Mapping, Sequence

from .core import Direction, State, check_sigma, direct_system
from .errors import InvalidConfig, NoSignChange, OutOfSpan

EPS = 2.220446049250313e-16

# Dormand-Prince 5(4) tableau
C2, C3, C4, C5 = 1 / 5, 3 / 10, 4 / 5, 8 / 9
A21 = 1 / 5
A31, A32 = 3 / 40, 9 / 40
A41, A42, A43 = 44 / 45, -56 / 15, 32 / 9
A51, A52, A53, A54 = 19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729
A61, A62, A63, A64, A65 = 9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656
A71, A73, A74, A75, A76 = 35 / 384, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84
E1, E3, E4, E5, E6, E7 = (71 / 57600, -71 / 16695, 71 / 1920, -17253 / 339200,
                          22 / 525, -1 / 40)
# continuous extension coefficients
D1, D3, D4, D5, D6, D7 = (-12715105075 / 11282082432, 87487479700 / 32700410799,
                          -10690763975 / 1880347072, 701980252875 / 199316789632,
                          -1453857185 / 822651844, 69997945 / 29380423)

SAFETY = 0.9
BETA = 0.04
EXPO = 0.2 - 0.75 * BETA
MAX_GROWTH = 5.0
MAX_SHRINK = 10.0

Rhs = Callable[[float, float, float], tuple]
RawEvent = Callable[[float, float, float], float]


@dataclass(frozen=True)
class SolverConfig:
    rel_tol: float = 1e-10
    abs_tol: float = 1e-12
    max_step: float = 0.25
    min_step: float = 1e-14
    max_steps: int = 1_000_000
    switch_magnitude: float = 100.0
    event_tol: float = 1e-12

    def __post_init__(self):
        for name in ("rel_tol", "abs_tol", "event_tol", "min_step", "max_step"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                raise InvalidConfig(f"{name} must be positive and finite, got {value}")
        if self.min_step > self.max_step:
            raise InvalidConfig("min_step must not exceed max_step")
        if not self.switch_magnitude > 1:
            raise InvalidConfig(f"switch_magnitude must exceed 1, got {self.switch_magnitude}")
        if int(self.max_steps) != self.max_steps or self.max_steps < 1:
            raise InvalidConfig(f"max_steps must be a positive integer, got {self.max_steps}")

    def tightened(self, factor: float) -> "SolverConfig":
        """Same configuration with both error tolerances divided by ``factor``."""
        return replace(self, rel_tol=self.rel_tol / factor, abs_tol=self.abs_tol / factor)


DEFAULT_CONFIG = SolverConfig()


class TerminalKind(enum.Enum):
    REACHED_END = "reached_end"
    EVENT = "event"
    SWITCH = "switch"
    STEP_FAILURE = "step_failure"


@dataclass(frozen=True)
class Terminal:
    kind: TerminalKind
    time: float
    event_id: object = None
    bracket: tuple | None = None
    message: str = ""


class DenseSolution:
    """Piecewise polynomial interpolant over the accepted steps.

    ``ts`` are the node times (step boundaries, the last one possibly cut
    short by an event) and ``ys`` the node values. Each segment stores
    ``(t0, h, ra, rb)`` where ``ra``/``rb`` hold the five continuous-extension
    coefficients of each component.
    """

    __slots__ = ("ts", "ys", "segments")

    def __init__(self, ts, ys, segments):
        self.ts = ts
        self.ys = ys
        self.segments = segments

    @property
    def t_start(self):
        return self.ts[0]

    @property
    def t_end(self):
        return self.ts[-1]

    def __len__(self):
        return len(self.segments)

    def segment_index(self, t):
        if not (self.ts[0] <= t <= self.ts[-1]):
            raise OutOfSpan(f"t = {t} outside [{self.ts[0]}, {self.ts[-1]}]")
        k = bisect.bisect_right(self.ts, t) - 1
        return min(max(k, 0), len(self.segments) - 1)

    def __call__(self, t):
        k = self.segment_index(t)
        if t == self.ts[k]:
            return self.ys[k]
        return _eval_segment(self.segments[k], t)

    def scaled(self, factor):
        segs = [(t0, h, tuple(factor * c for c in ra), tuple(factor * c for c in rb))
                for t0, h, ra, rb in self.segments]
        ys = [(factor * a, factor * b) for a, b in self.ys]
        return DenseSolution(list(self.ts), ys, segs)


def _eval_segment(seg, t):
    t0, h, ra, rb = seg
    th = (t - t0) / h
    th1 = 1.0 - th
    a = ra[0] + th * (ra[1] + th1 * (ra[2] + th * (ra[3] + th1 * ra[4])))
    b = rb[0] + th * (rb[1] + th1 * (rb[2] + th * (rb[3] + th1 * rb[4])))
    return a, b


@dataclass(frozen=True, eq=False)
class Trajectory:
    """A solution started at ``(t=0, s=0, s'=sign*sigma)``."""

    sigma: float
    direction: Direction
    dense: DenseSolution = field(repr=False)
    terminal: Terminal
    config: SolverConfig = field(repr=False, default=DEFAULT_CONFIG)
    sign: float = 1.0

    @cached_property
    def samples(self) -> tuple:
        return tuple(State(t, s, v) for t, (s, v) in zip(self.dense.ts, self.dense.ys))

    @property
    def times(self):
        return self.dense.ts

    @property
    def t_end(self) -> float:
        return self.dense.t_end

    @property
    def initial_slope(self) -> float:
        return self.sign * self.sigma

    def evaluate(self, t: float) -> State:
        s, v = self.dense(t)
        return State(t, s, v)

    def negated(self) -> "Trajectory":
        return replace(self, dense=self.dense.scaled(-1.0), sign=-self.sign)


def _initial_step(rhs, t0, a0, b0, fa0, fb0, direction_span, cfg):
    sa = cfg.abs_tol + cfg.rel_tol * abs(a0)
    sb = cfg.abs_tol + cfg.rel_tol * abs(b0)
    d0 = max(abs(a0) / sa, abs(b0) / sb)
    d1 = max(abs(fa0) / sa, abs(fb0) / sb)
    h0 = 1e-6 if (d0 < 1e-5 or d1 < 1e-5) else 0.01 * d0 / d1
    h0 = min(h0, direction_span)
    fa1, fb1 = rhs(t0 + h0, a0 + h0 * fa0, b0 + h0 * fb0)
    d2 = max(abs(fa1 - fa0) / sa, abs(fb1 - fb0) / sb) / h0
    if max(d1, d2) <= 1e-15:
        h1 = max(1e-6, h0 * 1e-3)
    else:
        h1 = (0.01 / max(d1, d2)) ** 0.2
    return min(100 * h0, h1, cfg.max_step, direction_span)


def brent_bracket(f, lo, hi, xtol, flo=None, fhi=None, maxiter=200):
    """Bracketing root finder that keeps a sign-change bracket.

    Returns ``(root, (a, b))`` with ``f`` of opposite signs at ``a`` and ``b``
    (or ``a == b`` at an exact zero) and ``b - a <= xtol``. Interpolation
    steps fall back to bisection whenever they stall.
    """
    a, b = float(lo), float(hi)
    fa = f(a) if flo is None else flo
    fb = f(b) if fhi is None else fhi
    if fa == 0.0:
        return a, (a, a)
    if fb == 0.0:
        return b, (b, b)
    if (fa > 0) == (fb > 0):
        raise NoSignChange(f"no sign change on [{lo}, {hi}]: f = {fa}, {fb}")
    c, fc = a, fa
    d = e = b - a
    for _ in range(maxiter):
        if (fb > 0) == (fc > 0):
            c, fc = a, fa
            d = e = b - a
        if abs(fc) < abs(fb):
            a, b, c = b, c, b
            fa, fb, fc = fb, fc, fb
        tol = 0.5 * max(xtol, 4 * EPS * abs(b))
        m = 0.5 * (c - b)
        if abs(m) <= tol or fb == 0.0:
            break
        if abs(e) >= tol and abs(fa) > abs(fb):
            s = fb / fa
            if a == c:
                p, q = 2 * m * s, 1 - s
            else:
                q, r = fa / fc, fb / fc
                p = s * (2 * m * q * (q - r) - (b - a) * (r - 1))
                q = (q - 1) * (r - 1) * (s - 1)
            if p > 0:
                q = -q
            else:
                p = -p
            if 2 * p < min(3 * m * q - abs(tol * q), abs(e * q)):
                e, d = d, p / q
            else:
                d = e = m
        else:
            d = e = m
        a, fa = b, fb
        b += d if abs(d) > tol else math.copysign(tol, m)
        fb = f(b)
    if fb == 0.0:
        return b, (b, b)
    return b, (min(b, c), max(b, c))


def solve(rhs: Rhs, t0: float, y0: tuple, t_end: float, cfg: SolverConfig = DEFAULT_CONFIG,
          events: Mapping[object, RawEvent] | None = None,
          switch_magnitude: float | None = None) -> tuple[DenseSolution, Terminal]:
    """Integrate ``rhs`` from ``(t0, y0)`` forward to ``t_end``.

    Stops early at the first root of any event function (called with
    ``(t, a, b)``) or when ``|a|`` reaches ``switch_magnitude``.
    """
    if not t_end > t0:
        raise ValueError(f"t_end = {t_end} must exceed t0 = {t0}")
    events = dict(events or {})
    if switch_magnitude is not None:
        limit = float(switch_magnitude)
        events["__switch__"] = lambda t, a, b: abs(a) - limit

    t = float(t0)
    a, b = float(y0[0]), float(y0[1])
    fa, fb = rhs(t, a, b)
    ts, ys, segs = [t], [(a, b)], []
    ev_prev = {k: g(t, a, b) for k, g in events.items()}

    span = t_end - t
    h = _initial_step(rhs, t, a, b, fa, fb, span, cfg)
    facold = 1e-4
    last_rejected = False
    n_steps = 0
    rtol, atol = cfg.rel_tol, cfg.abs_tol

    def finish(kind, when, **kw):
        return DenseSolution(ts, ys, segs), Terminal(kind, when, **kw)

    while True:
        if n_steps >= cfg.max_steps:
            return finish(TerminalKind.STEP_FAILURE, t, message="max_steps exceeded")
        remaining = t_end - t
        if remaining <= 4 * EPS * max(1.0, abs(t_end)):
            return finish(TerminalKind.REACHED_END, t)
        h = min(h, cfg.max_step)
        last = h >= remaining
        if last:
            h = remaining
        if h < cfg.min_step and not last:
            return finish(TerminalKind.STEP_FAILURE, t,
                          message=f"step size {h:.3g} below min_step")

        k1a, k1b = fa, fb
        k2a, k2b = rhs(t + C2 * h, a + h * A21 * k1a, b + h * A21 * k1b)
        k3a, k3b = rhs(t + C3 * h, a + h * (A31 * k1a + A32 * k2a),
                       b + h * (A31 * k1b + A32 * k2b))
        k4a, k4b = rhs(t + C4 * h, a + h * (A41 * k1a + A42 * k2a + A43 * k3a),
                       b + h * (A41 * k1b + A42 * k2b + A43 * k3b))
        k5a, k5b = rhs(t + C5 * h,
                       a + h * (A51 * k1a + A52 * k2a + A53 * k3a + A54 * k4a),
                       b + h * (A51 * k1b + A52 * k2b + A53 * k3b + A54 * k4b))
        t_new = t + h if not last else t_end
        k6a, k6b = rhs(t_new,
                       a + h * (A61 * k1a + A62 * k2a + A63 * k3a + A64 * k4a + A65 * k5a),
                       b + h * (A61 * k1b + A62 * k2b + A63 * k3b + A64 * k4b + A65 * k5b))
        a_new = a + h * (A71 * k1a + A73 * k3a + A74 * k4a + A75 * k5a + A76 * k6a)
        b_new = b + h * (A71 * k1b + A73 * k3b + A74 * k4b + A75 * k5b + A76 * k6b)
        k7a, k7b = rhs(t_new, a_new, b_new)
        n_steps += 1

        ea = h * (E1 * k1a + E3 * k3a + E4 * k4a + E5 * k5a + E6 * k6a + E7 * k7a)
        eb = h * (E1 * k1b + E3 * k3b + E4 * k4b + E5 * k5b + E6 * k6b + E7 * k7b)
        err = max(abs(ea) / (atol + rtol * max(abs(a), abs(a_new))),
                  abs(eb) / (atol + rtol * max(abs(b), abs(b_new))))
        if not math.isfinite(err):
            h /= MAX_SHRINK
            last_rejected = True
            continue

        fac11 = err ** EXPO
        if err > 1.0:
            h /= min(MAX_SHRINK, fac11 / SAFETY)
            last_rejected = True
            continue

        fac = fac11 / facold ** BETA
        fac = max(1.0 / MAX_GROWTH, min(MAX_SHRINK, fac / SAFETY))
        h_new = h / fac
        if last_rejected:
            h_new = min(h_new, h)
        facold = max(err, 1e-4)
        last_rejected = False

        dy_a, dy_b = a_new - a, b_new - b
        ra3, rb3 = h * k1a - dy_a, h * k1b - dy_b
        seg = (t, h,
               (a, dy_a, ra3, dy_a - h * k7a - ra3,
                h * (D1 * k1a + D3 * k3a + D4 * k4a + D5 * k5a + D6 * k6a + D7 * k7a)),
               (b, dy_b, rb3, dy_b - h * k7b - rb3,
                h * (D1 * k1b + D3 * k3b + D4 * k4b + D5 * k5b + D6 * k6b + D7 * k7b)))

        if events:
            hit = _scan_step(seg, t, t_new, events, ev_prev, a_new, b_new, cfg.event_tol)
            if hit is not None:
                key, root, bracket = hit
                segs.append(seg)
                ts.append(root)
                ys.append((a_new, b_new) if root == t_new else _eval_segment(seg, root))
                kind = TerminalKind.SWITCH if key == "__switch__" else TerminalKind.EVENT
                return finish(kind, root, event_id=None if kind is TerminalKind.SWITCH else key,
                              bracket=bracket)

        segs.append(seg)
        ts.append(t_new)
        ys.append((a_new, b_new))
        t, a, b = t_new, a_new, b_new
        fa, fb = k7a, k7b
        h = h_new
        if last:
            return finish(TerminalKind.REACHED_END, t)


def _scan_step(seg, t0, t1, events, ev_prev, a1, b1, event_tol):
    """Check each event at the step midpoint and end; return the earliest root."""
    tm = 0.5 * (t0 + t1)
    am, bm = _eval_segment(seg, tm)
    best = None
    for key, g in events.items():
        probes = ((t0, ev_prev[key]), (tm, g(tm, am, bm)), (t1, g(t1, a1, b1)))
        ev_prev[key] = probes[2][1]
        for (x, gx), (y, gy) in zip(probes, probes[1:]):
            if gy == 0.0:
                root, bracket = y, (y, y)
            elif gx != 0.0 and (gx > 0) != (gy > 0):
                def fn(t, g=g):
                    return g(t, *_eval_segment(seg, t))
                root, bracket = brent_bracket(fn, x, y, event_tol, gx, gy)
            else:
                continue
            if best is None or root < best[1]:
                best = (key, root, bracket)
            break
    return best


def _wrap_events(events) -> dict:
    if events is None:
        return {}
    if isinstance(events, Mapping):
        items = events.items()
    else:
        items = enumerate(events)
    return {k: (lambda t, s, v, fn=fn: fn(State(t, s, v))) for k, fn in items}


def integrate(sigma: float, direction: Direction | str, t_end: float,
              cfg: SolverConfig | None = None,
              events: Sequence[Callable[[State], float]] | Mapping | None = None) -> Trajectory:
    """Integrate the transcendent with initial slope ``sigma`` up to ``t_end``.

    Integration stops at ``t_end``, at the first root of any event, or when
    ``|s|`` reaches ``cfg.switch_magnitude``; ``Trajectory.terminal`` says
    which. A controller failure is reported there too rather than raised.
    """
    sigma = check_sigma(sigma)
    direction = Direction.parse(direction)
    cfg = cfg or DEFAULT_CONFIG
    if not t_end > 0:
        raise ValueError(f"t_end must be positive, got {t_end}")
    dense, terminal = solve(direct_system(direction), 0.0, (0.0, sigma), t_end, cfg,
                            events=_wrap_events(events),
                            switch_magnitude=cfg.switch_magnitude)
    return Trajectory(sigma, direction, dense, terminal, cfg)


def evaluate_dense(traj: Trajectory, t: float) -> State:
    return traj.evaluate(t)


def find_event_root(traj: Trajectory, event: Callable[[State], float],
                    bracket: tuple[float, float], xtol: float | None = None) -> float:
    """Locate a root of ``event`` along ``traj`` inside ``bracket``.

    The event is evaluated through the dense interpolant; the returned time
    sits inside a sign-change bracket no wider than the event tolerance.
    """
    root, _ = find_event_bracket(traj, event, bracket, xtol)
    return root


def find_event_bracket(traj, event, bracket, xtol=None):
    lo, hi = bracket
    xtol = traj.config.event_tol if xtol is None else xtol
    return brent_bracket(lambda t: event(traj.evaluate(t)), lo, hi, xtol)


def sign_changes(dense: DenseSolution, fn: RawEvent, t_from: float, t_to: float,
                 xtol: float) -> list[tuple[float, tuple[float, float]]]:
    """All roots of ``fn(t, a, b)`` on ``(t_from, t_to]`` with their brackets.

    Each step is probed at both ends and the midpoint; brackets found that
    way are refined with :func:`brent_bracket`.
    """
    t_from = max(t_from, dense.t_start)
    t_to = min(t_to, dense.t_end)
    found = []
    if t_to <= t_from:
        return found
    k_first = dense.segment_index(t_from)
    k_last = dense.segment_index(t_to)
    prev_t = t_from
    a, b = dense(t_from)
    prev_g = fn(t_from, a, b)
    for k in range(k_first, k_last + 1):
        seg = dense.segments[k]
        t_hi = min(dense.ts[k + 1], t_to)
        if t_hi <= prev_t:
            continue
        for tp in (0.5 * (max(dense.ts[k], prev_t) + t_hi), t_hi):
            if tp <= prev_t:
                continue
            gp = fn(tp, *_eval_segment(seg, tp))
            if gp == 0.0:
                found.append((tp, (tp, tp)))
            elif prev_g != 0.0 and (prev_g > 0) != (gp > 0):
                root, br = brent_bracket(lambda t, seg=seg: fn(t, *_eval_segment(seg, t)),
                                         prev_t, tp, xtol, prev_g, gp)
                found.append((root, br))
            prev_t, prev_g = tp, gp
    return found
