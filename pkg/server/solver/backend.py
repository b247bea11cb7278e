"""
Two-tier constraint solving: the configured backend answers first and the
other one is consulted when the answer is Unknown (if fallback is enabled
and the external process is installed).
"""

import logging
from collections import Counter
from typing import Dict, Optional, Sequence, Tuple

from server.lctrs.config import SolverConfig
from server.lctrs.errors import SolverError, SolverUnavailable
from server.lctrs.terms import Term, Var
from server.solver.builtin import builtin_equiv, builtin_sat
from server.solver.results import EquivVerdict, SatResult
from server.solver.smtlib import ExternalSolver

logger = logging.getLogger(__name__)


class ConstraintSolver:
    """Solver session; owns the external process when one is started."""

    def __init__(self, config: Optional[SolverConfig] = None):
        self.config = config or SolverConfig()
        self._external: Optional[ExternalSolver] = None
        self._sat_cache: Dict[Term, SatResult] = {}
        self._equiv_cache: Dict[Tuple, EquivVerdict] = {}
        self.stats: Counter = Counter()
        if self.config.backend == "external" and not self.external.available:
            raise SolverUnavailable(f"external solver {self.config.command!r} is not installed")

    @property
    def external(self) -> ExternalSolver:
        if self._external is None:
            self._external = ExternalSolver(self.config.command, self.config.timeout_ms)
        return self._external

    def _order(self):
        if self.config.backend == "external":
            tiers = ["external", "builtin"]
        else:
            tiers = ["builtin", "external"]
        return tiers if self.config.fallback else tiers[:1]

    def is_satisfiable(self, phi: Term) -> SatResult:
        cached = self._sat_cache.get(phi)
        if cached is not None:
            self.stats["cache_hits"] += 1
            return cached
        result = SatResult.unknown("no backend answered")
        for tier in self._order():
            if tier == "builtin":
                result = builtin_sat(phi)
            else:
                if not self.external.available:
                    logger.debug("external solver not installed; keeping %s", result)
                    continue
                try:
                    result = self.external.is_satisfiable(phi)
                except SolverError as exc:
                    logger.warning("external solver failed on %s: %s", phi, exc)
                    result = SatResult.unknown(str(exc), backend="external")
            self.stats[f"{tier}_{result.verdict.value}"] += 1
            logger.debug("%s solver: %s is %s", tier, phi, result)
            if not result.is_unknown:
                break
            logger.debug("falling back after unknown (%s)", result.reason)
        self._sat_cache[phi] = result
        return result

    def check_equiv(self, phi: Term, psi: Term,
                    exist_phi: Sequence[Var] = (), exist_psi: Sequence[Var] = ()) -> EquivVerdict:
        key = (phi, psi, tuple(exist_phi), tuple(exist_psi))
        if key in self._equiv_cache:
            self.stats["cache_hits"] += 1
            return self._equiv_cache[key]
        verdict = EquivVerdict.UNKNOWN
        for tier in self._order():
            if tier == "builtin":
                verdict = builtin_equiv(phi, psi, exist_phi, exist_psi)
            else:
                if not self.external.available:
                    continue
                try:
                    verdict = self.external.check_equiv(phi, psi, exist_phi, exist_psi)
                except SolverError as exc:
                    logger.warning("external equivalence check failed: %s", exc)
                    verdict = EquivVerdict.UNKNOWN
            if verdict is not EquivVerdict.UNKNOWN:
                break
        self._equiv_cache[key] = verdict
        return verdict

    def close(self) -> None:
        if self._external is not None:
            self._external.close()
            self._external = None

    def __enter__(self) -> "ConstraintSolver":
        return self

    def __exit__(self, *exc_info) -> None:
        self.close()
