"""Domain types and right-hand sides for the homogeneous Painleve II problem.

Two equations are handled, both started from ``s(0) = 0, s'(0) = sigma``:

* positive time:  s'' = 2 s^3 + t s
* negative time (with time reversed so that t >= 0):  s'' = 2 s^3 - t s

Alongside them live the reciprocal form (``w = 1/s``) used to pass through
poles, and the lambda-Airy comparison equation ``g'' + lambda t g = 0``.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

from .errors import DivisionNearZero, NonFiniteState, NonPositiveValue

SQRT3_OVER_2 = math.sqrt(3.0) / 2.0

#: experimentally reported location of the explosive/oscillatory threshold
SIGMA0_REPORTED = (0.5950, 0.5951)

#: below this |w| the reciprocal right-hand side switches to its pole limit
POLE_FLOOR = 1e-10


class Direction(enum.Enum):
    POSITIVE = "pos"
    NEGATIVE = "neg"

    @property
    def sign(self) -> float:
        """Sign of the ``t s`` term in the equation."""
        return 1.0 if self is Direction.POSITIVE else -1.0

    @classmethod
    def parse(cls, value) -> "Direction":
        if isinstance(value, cls):
            return value
        key = str(value).strip().lower()
        aliases = {"pos": cls.POSITIVE, "positive": cls.POSITIVE, "+": cls.POSITIVE,
                   "neg": cls.NEGATIVE, "negative": cls.NEGATIVE, "-": cls.NEGATIVE}
        try:
            return aliases[key]
        except KeyError:
            raise ValueError(f"unknown direction {value!r}; use 'pos' or 'neg'") from None


def check_sigma(sigma: float) -> float:
    """Validate an initial slope and return it as a float.

    Only positive slopes are accepted: zero gives the trivial solution and a
    negative slope is the mirror image of a positive one (see
    :func:`negate_solution`).
    """
    sigma = float(sigma)
    if not math.isfinite(sigma):
        raise NonFiniteState(f"sigma must be finite, got {sigma}")
    if sigma == 0.0:
        raise NonPositiveValue("sigma = 0 gives the identically zero solution")
    if sigma < 0.0:
        raise NonPositiveValue(
            f"sigma = {sigma} < 0: integrate with |sigma| and apply negate_solution "
            "(the equation is odd in s)")
    return sigma


def _require_finite(*values):
    for x in values:
        if not math.isfinite(x):
            raise NonFiniteState(f"non-finite value {x!r}")


@dataclass(frozen=True)
class State:
    t: float
    s: float
    v: float

    def __post_init__(self):
        _require_finite(self.t, self.s, self.v)

    def to_reciprocal(self) -> "ReciprocalState":
        if self.s == 0.0:
            raise DivisionNearZero("s = 0 has no reciprocal")
        return ReciprocalState(self.t, 1.0 / self.s, -self.v / (self.s * self.s))


@dataclass(frozen=True)
class ReciprocalState:
    """State in the coordinates ``w = 1/s``, ``u = w'``."""

    t: float
    w: float
    u: float

    def __post_init__(self):
        _require_finite(self.t, self.w, self.u)
        if self.w == 0.0:
            raise DivisionNearZero("w = 0 is a pole of s; it is located, not stored")

    def to_direct(self) -> State:
        return State(self.t, 1.0 / self.w, -self.u / (self.w * self.w))


@dataclass(frozen=True)
class AirySpec:
    """Initial data ``g(t0) = g0, g'(t0) = h0`` for ``g'' + lam t g = 0``."""

    lam: float = 1.0
    g0: float = 1.0
    h0: float = 0.0
    t0: float = 0.0

    def __post_init__(self):
        _require_finite(self.lam, self.g0, self.h0, self.t0)
        if self.lam <= 0.0:
            raise NonPositiveValue(f"lambda must be positive, got {self.lam}")
        if self.g0 == 0.0 and self.h0 == 0.0:
            raise ValueError("(g0, h0) = (0, 0) gives the zero function")
        if self.t0 < 0.0:
            raise ValueError(f"t0 must be nonnegative, got {self.t0}")


# Raw scalar right-hand sides used inside the integrator loop. They skip the
# validation that the public wrappers below perform.

def pii_pos(t, s, v):
    return v, (2.0 * s * s + t) * s


def pii_neg(t, s, v):
    return v, (2.0 * s * s - t) * s


def recip_pos(t, w, u):
    if abs(w) < POLE_FLOOR:
        return u, t * w
    return u, (2.0 * u * u - 2.0 - t * w * w) / w


def recip_neg(t, w, u):
    if abs(w) < POLE_FLOOR:
        return u, -t * w
    return u, (2.0 * u * u - 2.0 + t * w * w) / w


def direct_system(direction: Direction):
    return pii_pos if direction is Direction.POSITIVE else pii_neg


def reciprocal_system(direction: Direction):
    return recip_pos if direction is Direction.POSITIVE else recip_neg


def airy_system(lam: float):
    def rhs(t, g, h):
        return h, -lam * t * g
    return rhs


def pii_rhs(st: State, direction: Direction) -> tuple[float, float]:
    """Return ``(s', s'')`` for the equation selected by ``direction``."""
    _require_finite(st.t, st.s, st.v)
    return direct_system(Direction.parse(direction))(st.t, st.s, st.v)


def reciprocal_rhs(rs: ReciprocalState, direction: Direction, *,
                   floor: float = POLE_FLOOR, pole_armed: bool = False) -> tuple[float, float]:
    """Return ``(w', u')`` for the reciprocal form of the equation.

    Substituting ``s = 1/w`` gives ``u' = (2u^2 - 2 -/+ t w^2) / w``. The
    quotient is 0/0 at a simple pole, so for ``|w| < floor`` the caller must
    arm pole handling, in which case the analytic limit ``u' ~ +/- t w`` of
    the Laurent expansion is used.
    """
    direction = Direction.parse(direction)
    _require_finite(rs.t, rs.w, rs.u)
    if abs(rs.w) < floor:
        if not pole_armed:
            raise DivisionNearZero(f"|w| = {abs(rs.w):.3g} is below the floor {floor:.3g}")
        return rs.u, direction.sign * rs.t * rs.w
    sgn = direction.sign
    return rs.u, (2.0 * rs.u * rs.u - 2.0 - sgn * rs.t * rs.w * rs.w) / rs.w


def airy_rhs(t: float, g: float, h: float, lam: float = 1.0) -> tuple[float, float]:
    if lam <= 0.0:
        raise NonPositiveValue(f"lambda must be positive, got {lam}")
    return h, -lam * t * g


def negate_solution(traj):
    """Mirror a trajectory through ``s -> -s``.

    The equation is odd in ``s``, so the result solves it with initial slope
    ``-sigma``. Applying this twice gives back the original trajectory.
    """
    return traj.negated()
