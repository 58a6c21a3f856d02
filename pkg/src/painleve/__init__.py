"""Numerics for the homogeneous second Painleve equation.

Integrates ``s'' = 2 s^3 +/- t s`` from ``s(0) = 0, s'(0) = sigma``, locates
poles, finds oscillation zeros, and checks the known bounds and comparison
results against the computed solutions.
"""
from .blowup import (PoleEstimate, estimate_pole, tangent_envelope_check, theorem1_escape_bound,
                     theorem2_upper, theorem3_lower, theorem6_monotone_lower)
from .core import (AirySpec, Direction, ReciprocalState, State, airy_rhs, negate_solution,
                   pii_rhs, reciprocal_rhs)
from .integrate import (SolverConfig, Terminal, TerminalKind, Trajectory, evaluate_dense,
                        find_event_root, integrate)
from .oscillation import (FirstIntegralReport, SturmReport, ZeroSequence, airy_zeros,
                          check_sturm_lower, check_sturm_upper, find_zeros,
                          first_integral_residual, sup_squared)
from .quadrature import QuadResult, integral_sigma_quartic, integral_theorem3
from .threshold import Classification, ThresholdBracket, Verdict, classify, find_threshold

__version__ = "0.1.0"
