"""Intermittent perfect CSIT in the K-user MISO broadcast channel.

Rotating-window CSIT schedules with zero-forcing transmission, Monte Carlo
sum-DoF estimation, and the outer-bound polytope that fixes the minimum
perfect-CSIT fraction per user at min(M, K)/K.
"""

from .bounds import (BoundReport, DofPolytope, build_polytope, lambda_star, lambda_star_via_lp,
                     max_weighted, summed_bound)
from .channel import RngStream, condition_number, invert, sample_channel, sample_noise
from .errors import (AuditFailure, BadLength, ConfigError, DegenerateGrid, EmptySchedule,
                     Infeasible, ParseError, Singular)
from .kernels import BACKEND
from .precoding import PrecodingPlan, select_served, slot_sinr, zf_beamformer
from .schedule import CsitSchedule, CsitState, audit, cyclic_window, lee_heath_block
from .simulator import SimReport, SnrGrid, fit_slope, simulate

__version__ = "0.1.0"
