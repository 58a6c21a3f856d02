"""Zeros of bounded negative-time transcendents and the Airy comparisons.

Covers the first-integral conservation check, zeros of (lambda-)Airy
functions, and numerical certification of the two Sturm-type comparisons:
consecutive zeros of the transcendent enclose a zero of every Airy function,
and beyond ``T > 2M`` every gap between consecutive zeros of a
``lambda = 1 - 2M/T`` Airy function contains a zero of the transcendent.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .core import AirySpec, Direction, airy_system, check_sigma
from .errors import (BlowUpEncountered, HorizonTooSmall, HypothesisViolated, NotBounded,
                     StepFailure)
from .integrate import (DEFAULT_CONFIG, SolverConfig, TerminalKind, Trajectory,
                        _eval_segment, integrate, sign_changes, solve)

DEFAULT_T_MAX = 40.0

#: independent Airy solutions used when none are given: g(0)=1, g'(0)=0 and g(0)=0, g'(0)=1
AIRY_BASIS = ((1.0, 0.0), (0.0, 1.0))

_GL_X, _GL_W = np.polynomial.legendre.leggauss(6)
_GL_X = tuple(0.5 * (_GL_X + 1.0))
_GL_W = tuple(0.5 * _GL_W)


@dataclass(frozen=True)
class Zero:
    t: float
    lo: float
    hi: float

    @property
    def width(self) -> float:
        return self.hi - self.lo


@dataclass(frozen=True)
class ZeroSequence:
    zeros: tuple
    t_max: float
    sigma: float | None = None
    lam: float | None = None

    @property
    def times(self) -> list[float]:
        return [z.t for z in self.zeros]

    def __len__(self):
        return len(self.zeros)


@dataclass(frozen=True)
class FirstIntegralReport:
    max_residual: float
    residual_samples: tuple = field(repr=False)
    #: residual divided by the size of the terms in the identity
    max_relative_residual: float = 0.0


@dataclass(frozen=True)
class SturmReport:
    checked_intervals: int
    violations: tuple
    lam: float | None = None
    T: float | None = None
    M: float | None = None
    t_max: float | None = None
    intervals: tuple = field(default=(), repr=False)
    notes: tuple = ()

    @property
    def passed(self) -> bool:
        return not self.violations


def trajectory_zeros(traj: Trajectory, t_from: float = 0.0,
                     t_to: float | None = None) -> ZeroSequence:
    """Sign changes of ``s`` along a finished trajectory on ``(t_from, t_to]``."""
    t_to = traj.t_end if t_to is None else t_to
    roots = sign_changes(traj.dense, lambda t, s, v: s, t_from, t_to, traj.config.event_tol)
    return ZeroSequence(tuple(Zero(t, lo, hi) for t, (lo, hi) in roots), t_to, traj.sigma)


def bounded_trajectory(sigma: float, t_max: float, cfg: SolverConfig,
                       error=BlowUpEncountered) -> Trajectory:
    traj = integrate(sigma, Direction.NEGATIVE, t_max, cfg)
    term = traj.terminal
    if term.kind is TerminalKind.SWITCH:
        raise error(f"sigma = {sigma}: |s| reached {cfg.switch_magnitude} at t = {term.time:.6g}"
                    " (explosive, not oscillatory)", term.time)
    if term.kind is TerminalKind.STEP_FAILURE:
        raise StepFailure(term.message, term.time)
    return traj


def find_zeros(sigma: float, t_max: float = DEFAULT_T_MAX,
               cfg: SolverConfig | None = None) -> ZeroSequence:
    """All zeros in ``(0, t_max]`` of the negative-time transcendent."""
    sigma = check_sigma(sigma)
    if not t_max > 0:
        raise ValueError(f"t_max must be positive, got {t_max}")
    traj = bounded_trajectory(sigma, t_max, cfg or DEFAULT_CONFIG)
    return trajectory_zeros(traj, 0.0, t_max)


def _segment_integral_sq(seg, t_lo, t_hi):
    """Gauss-Legendre integral of ``s^2`` over part of one interpolation segment."""
    h = t_hi - t_lo
    if h == 0.0:
        return 0.0
    total = 0.0
    for x, w in zip(_GL_X, _GL_W):
        s = _eval_segment(seg, t_lo + x * h)[0]
        total += w * s * s
    return total * h


def first_integral_residual(traj: Trajectory, n_points: int = 201) -> FirstIntegralReport:
    """Residual of the energy identity along a trajectory.

    For ``s'' = 2 s^3 + d t s`` (``d = -1`` in negative time) started at
    ``s(0) = 0, s'(0) = sigma``::

        s'^2 - d t s^2 = sigma^2 + s^4 - d int_0^t s^2

    The running integral is accumulated step by step with a 6-point
    Gauss-Legendre rule applied to the dense interpolant, which integrates
    the degree-10 integrand exactly. The residual is reported at every step
    boundary and on a uniform grid of ``n_points``.
    """
    dense = traj.dense
    d = traj.direction.sign
    sig2 = traj.initial_slope ** 2
    ts = dense.ts
    cumulative = [0.0]
    for k, seg in enumerate(dense.segments):
        cumulative.append(cumulative[-1] + _segment_integral_sq(seg, ts[k], ts[k + 1]))

    samples = []
    relative = 0.0

    def record(t, s, v, integral):
        nonlocal relative
        terms = (v * v, -d * t * s * s, -sig2, -s ** 4, d * integral)
        r = math.fsum(terms)
        relative = max(relative, abs(r) / sum(abs(x) for x in terms))
        samples.append((t, r))

    for k, (t, (s, v)) in enumerate(zip(ts, dense.ys)):
        record(t, s, v, cumulative[k])
    for t in np.linspace(ts[0], ts[-1], n_points)[1:-1]:
        t = float(t)
        k = dense.segment_index(t)
        seg = dense.segments[k]
        s, v = _eval_segment(seg, t)
        record(t, s, v, cumulative[k] + _segment_integral_sq(seg, ts[k], t))
    samples.sort()
    return FirstIntegralReport(max(abs(r) for _, r in samples), tuple(samples), relative)


def sup_squared(traj: Trajectory, per_step: int = 10) -> float:
    """Maximum of ``s^2`` over the dense output, ``per_step`` probes per step."""
    return _sup_squared_at(traj, per_step)[0]


def _sup_squared_at(traj, per_step=10):
    dense = traj.dense
    best, where = 0.0, 0.0
    for k, seg in enumerate(dense.segments):
        t0, t1 = dense.ts[k], dense.ts[k + 1]
        for j in range(per_step + 1):
            t = t0 + (t1 - t0) * j / per_step
            s = _eval_segment(seg, t)[0]
            if s * s > best:
                best, where = s * s, t
    return best, where


def airy_solution(spec: AirySpec, t_to: float, cfg: SolverConfig | None = None):
    cfg = cfg or DEFAULT_CONFIG
    dense, term = solve(airy_system(spec.lam), spec.t0, (spec.g0, spec.h0), t_to, cfg)
    if term.kind is not TerminalKind.REACHED_END:
        raise StepFailure(f"Airy integration stopped: {term.kind.value}", term.time)
    return dense


def airy_zeros(spec: AirySpec, t_from: float, t_to: float,
               cfg: SolverConfig | None = None) -> ZeroSequence:
    """Zeros on ``(t_from, t_to]`` of the solution of ``g'' + lam t g = 0``
    with the initial data in ``spec``."""
    cfg = cfg or DEFAULT_CONFIG
    if not t_to > t_from >= 0:
        raise ValueError(f"need t_to > t_from >= 0, got ({t_from}, {t_to})")
    if t_from < spec.t0:
        raise ValueError(f"t_from = {t_from} precedes the initial time {spec.t0}")
    dense = airy_solution(spec, t_to, cfg)
    roots = sign_changes(dense, lambda t, g, h: g, t_from, t_to, cfg.event_tol)
    return ZeroSequence(tuple(Zero(t, lo, hi) for t, (lo, hi) in roots), t_to, lam=spec.lam)


def _witness(candidates, a, b):
    for z in candidates:
        if a < z < b:
            return z
        if z >= b:
            break
    return None


def check_sturm_lower(s_zeros: ZeroSequence, airy: AirySpec | None = None,
                      cfg: SolverConfig | None = None,
                      include_origin: bool = False) -> SturmReport:
    """Check that each gap between consecutive zeros holds an Airy zero.

    ``include_origin`` adds the zero every transcendent has at ``t = 0``.
    """
    airy = airy or AirySpec(1.0, *AIRY_BASIS[0])
    if airy.lam != 1.0:
        raise ValueError("the lower comparison uses true Airy functions (lam = 1)")
    times = ([0.0] if include_origin else []) + s_zeros.times
    if len(times) < 2:
        return SturmReport(0, ())
    if airy.t0 > times[0]:
        raise ValueError("Airy initial time must not exceed the first zero")
    t_from = max(airy.t0, times[0])
    t_to = times[-1]
    g_zeros = airy_zeros(airy, t_from, t_to, cfg).times if t_to > t_from else []
    intervals, violations = [], []
    for a, b in zip(times, times[1:]):
        z = _witness(g_zeros, a, b)
        intervals.append((a, b, z))
        if z is None:
            violations.append((a, b))
    return SturmReport(len(intervals), tuple(violations), lam=1.0,
                       intervals=tuple(intervals))


def check_sturm_upper(sigma: float, T: float, t_max: float = DEFAULT_T_MAX,
                      cfg: SolverConfig | None = None,
                      airy_data: Sequence[tuple[float, float]] = AIRY_BASIS) -> SturmReport:
    """Check that the transcendent vanishes between consecutive lambda-Airy zeros past ``T``.

    ``M`` is the largest ``s^2`` seen on ``[0, t_max]`` (a horizon-limited
    stand-in for the bound on all of ``[0, inf)``), and ``lam = 1 - 2M/T``.
    Each entry of ``airy_data`` gives ``(g(0), g'(0))`` for one comparison
    function. A note is attached when the maximum of ``s^2`` sits in the last
    tenth of the horizon, since ``M`` may then underestimate the true bound.
    """
    sigma = check_sigma(sigma)
    cfg = cfg or DEFAULT_CONFIG
    if not t_max > T:
        raise ValueError(f"t_max = {t_max} must exceed T = {T}")
    traj = bounded_trajectory(sigma, t_max, cfg, error=NotBounded)
    M, t_at = _sup_squared_at(traj)
    if not T > 2 * M:
        raise HypothesisViolated(f"requires T > 2M = {2 * M:.6g}, got T = {T}")
    lam = 1.0 - 2.0 * M / T
    notes = []
    if t_at > 0.9 * t_max:
        notes.append(f"max of s^2 attained at t = {t_at:.6g}, near the horizon")
    s_times = trajectory_zeros(traj, 0.0, t_max).times
    intervals, violations = [], []
    for g0, h0 in airy_data:
        g_times = airy_zeros(AirySpec(lam, g0, h0), T, t_max, cfg).times
        if len(g_times) < 2:
            raise HorizonTooSmall(
                f"only {len(g_times)} lambda-Airy zeros in [{T}, {t_max}]")
        for a, b in zip(g_times, g_times[1:]):
            z = _witness(s_times, a, b)
            intervals.append((a, b, z))
            if z is None:
                violations.append((a, b))
    return SturmReport(len(intervals), tuple(violations), lam=lam, T=T, M=M, t_max=t_max,
                       intervals=tuple(intervals), notes=tuple(notes))


def random_airy_data(rng: np.random.Generator, n: int) -> list[tuple[float, float]]:
    """Random combinations of the two basis solutions, normalised to unit length."""
    out = []
    for _ in range(n):
        angle = rng.uniform(0.0, math.pi)
        out.append((math.cos(angle), math.sin(angle)))
    return out
