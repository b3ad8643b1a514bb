"""Ricci flow of warped Berger metrics on S1 x S3: numerical laboratory."""

from .geometry import (CurvatureField, PeriodicGrid, Profile, base_distance,
                       circumference, fiber_curvatures, profile_extrema,
                       s_derivative, sectional_curvatures)
from .oracle import riemann_oracle
from .flow import (FlowState, SolverConfig, StopReason, Trajectory, estimate_T,
                   evolve, fit_singular_time, rhs, select_dt, step)
from .initial_data import (NeckBumpParams, ValidationReport, neck_bump,
                           perturb, product_data, validate_assumptions)
from .diagnostics import (BlowupFrame, EstimateSnapshot, HermiteSpectrum,
                          blowup_frame, cutoff_X, evolution_residual,
                          fit_decay, gaussian_norm, hermite_basis,
                          hermite_project, monitor_snapshot, neck_region,
                          nonlocal_I)
from .config import RunConfig, parse_config, format_config

__version__ = "0.1.0"
