"""Splitting integrators for charged-particle dynamics in strong magnetic fields."""

from ._core import *  # noqa: F401,F403
from ._core import (  # noqa: F401
    ArgumentError,
    BlowUpError,
    CpdError,
    MaxStepsError,
    Method,
    ParticleState,
    SchemeContext,
    SingularityError,
    SweepResult,
)

__all__ = [name for name in dir() if not name.startswith("_")]
