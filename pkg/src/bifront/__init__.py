"""Traveling fronts for reaction-convection equations with Born-Infeld diffusion.

The solver reduces the front equation to a first-order problem for
``y(v) = eps (1/sqrt(1 - v'^2) - 1)``, finds the critical speed by bisection
on admissibility, rebuilds the profile ``v(z)`` and analyses the vanishing
diffusion limit.
"""
from .errors import (BifrontError, ConstraintViolationError, DegenerateEndpointError, DomainError,
                     InconsistencyError, InvalidTrajectoryError, MalformedModelError, RegimeError,
                     ShootingError, StiffnessError)
from .kernel import BACKEND
from .limits import (LimitAnalysis, Regime, RegimeReport, analyze, classify_regime, find_v_plus,
                     inviscid_profile, limit_profile, limit_speed, sharpness_at_zero)
from .model import (ConvectionSpec, ModelSpec, ReactionSpec, fisher_burgers, power_model,
                    pure_convection, validate)
from .profile import FrontProfile, reconstruct, residual_second_order
from .reduction import (FrontProblem, Tolerances, Verdict, YTrajectory, integrate_backward,
                        series_start_at_one, y_upper_bound)
from .speed import CriticalSpeedResult, critical_speed, lower_bound, speed_bounds, upper_bound

__version__ = "0.1.0"
