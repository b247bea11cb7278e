"""Per-analysis state: signature, fresh-variable supply and solver session."""

import logging
from dataclasses import dataclass, field
from typing import Optional

from server.lctrs.config import ConfigManager
from server.lctrs.terms import App, FreshVariables, Signature, Term, Var
from server.solver.backend import ConstraintSolver
from server.solver.results import SatResult

logger = logging.getLogger(__name__)


@dataclass
class AnalysisContext:
    signature: Signature
    solver: ConstraintSolver = field(default_factory=ConstraintSolver)
    fresh: FreshVariables = field(default_factory=FreshVariables)
    equiv_mode: str = "syntactic"
    max_diff_steps: int = 10000

    @classmethod
    def from_config(cls, signature: Signature, config: Optional[ConfigManager] = None) -> "AnalysisContext":
        config = config or ConfigManager()
        return cls(
            signature=signature,
            solver=ConstraintSolver(config.solver),
            equiv_mode=config.analysis.equiv_mode,
            max_diff_steps=config.analysis.max_diff_steps,
        )

    def reserve(self, *items) -> None:
        """Register the variable names of terms or constrained terms as taken."""
        for item in items:
            if isinstance(item, (Var, App)):
                self.fresh.reserve(item)
            else:
                self.fresh.reserve(item.term, item.constraint)

    def is_satisfiable(self, phi: Term) -> SatResult:
        return self.solver.is_satisfiable(phi)

    def close(self) -> None:
        self.solver.close()

    def __enter__(self) -> "AnalysisContext":
        return self

    def __exit__(self, *exc_info) -> None:
        self.close()
