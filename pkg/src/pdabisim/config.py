"""Budget settings shared by the command line and embedding callers."""

from __future__ import annotations

from dataclasses import dataclass

from .errors import InputError
from .reachability import TRUNCATION_DEPTH_LIMIT


@dataclass(frozen=True)
class AnalysisConfig:
    """Budgets for the semidecision procedures.

    cutoff bounds eq-level games, omega_budget bounds bisimulation-relation
    search, truncation_max bounds the positive side's depth ladder,
    path_budget bounds loop-path exploration and candidate_budget the number
    of witnesses tried.  output_mode picks between prose and a structured
    document.
    """

    cutoff: int = 64
    omega_budget: int = 512
    truncation_max: int = 8
    path_budget: int = 10000
    candidate_budget: int = 200
    output_mode: str = "human"

    def __post_init__(self):
        for name in ("cutoff", "omega_budget", "truncation_max", "path_budget", "candidate_budget"):
            value = getattr(self, name)
            if not isinstance(value, int) or value < 1:
                raise InputError("%s must be a positive integer, got %r" % (name, value))
        if self.truncation_max > TRUNCATION_DEPTH_LIMIT:
            raise InputError(
                "truncation_max is capped at %d, got %d"
                % (TRUNCATION_DEPTH_LIMIT, self.truncation_max)
            )
        if self.output_mode not in ("human", "structured"):
            raise InputError(
                "output_mode must be 'human' or 'structured', got %r" % (self.output_mode,)
            )
