"""Time-optimal trajectory planning for integrator chains.

Plans bang-zero motions between arbitrary states of an integrator chain
(order up to 4) under asymmetric input bounds and optional bounds on the
derivative states, by evaluating precomputed triangular polynomial systems
whose roots are the switching times.
"""

__version__ = "0.1.0"

from .model import InfeasibleProblemError, Problem  # noqa: F401
from .planner import NoSolutionError, Plan, plan  # noqa: F401
