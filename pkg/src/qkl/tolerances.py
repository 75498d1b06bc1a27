"""Default numerical tolerances.

The residual tolerance used by realizability checks and the Riccati solver can
be overridden globally through the ``QKL_TOL`` environment variable, or per
call via the ``tol`` arguments (CLI flag ``--tol``).
"""

from __future__ import annotations

import os

from .errors import ConfigurationError

#: Absolute entry tolerance for structure predicates; every built-in system is
#: O(1)-O(16) scaled, so an absolute tolerance is appropriate.
STRUCTURE_TOL = 1e-10

#: Acceptance tolerance on realizability and Riccati residual norms.
RESIDUAL_TOL = 1e-9

#: Eigenvalues with real part >= -STABLE_MARGIN are treated as not stable.
STABLE_MARGIN = 1e-12

#: Tolerance for cost equalities that hold exactly for passive systems.
EQUALITY_TOL = 1e-8

#: Tolerance for cost ordering (inequality) claims.
ORDERING_TOL = 1e-9

_ENV_VAR = "QKL_TOL"


def residual_tolerance(override: float | None = None) -> float:
    """Resolve the residual tolerance: explicit override > QKL_TOL > default."""
    if override is not None:
        return float(override)
    env = os.environ.get(_ENV_VAR)
    if env is None:
        return RESIDUAL_TOL
    try:
        return float(env)
    except ValueError as exc:
        raise ConfigurationError(f"{_ENV_VAR} must be a float, got {env!r}") from exc
