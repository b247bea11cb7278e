"""Solver verdict types shared by the builtin and external backends."""

from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, Union

from server.lctrs.terms import Var

Value = Union[int, bool]


class Verdict(Enum):
    SAT = "sat"
    UNSAT = "unsat"
    UNKNOWN = "unknown"


@dataclass(frozen=True)
class SatResult:
    verdict: Verdict
    model: Dict[Var, Value] = field(default_factory=dict, compare=False)
    reason: str = ""
    backend: str = field(default="builtin", compare=False)

    @classmethod
    def sat(cls, model: Dict[Var, Value], backend: str = "builtin") -> "SatResult":
        return cls(Verdict.SAT, dict(model), "", backend)

    @classmethod
    def unsat(cls, backend: str = "builtin") -> "SatResult":
        return cls(Verdict.UNSAT, {}, "", backend)

    @classmethod
    def unknown(cls, reason: str, backend: str = "builtin") -> "SatResult":
        return cls(Verdict.UNKNOWN, {}, reason, backend)

    @property
    def is_sat(self) -> bool:
        return self.verdict is Verdict.SAT

    @property
    def is_unsat(self) -> bool:
        return self.verdict is Verdict.UNSAT

    @property
    def is_unknown(self) -> bool:
        return self.verdict is Verdict.UNKNOWN

    def __str__(self) -> str:
        if self.is_sat:
            return "sat " + ", ".join(f"{v}={x}" for v, x in self.model.items())
        if self.is_unknown:
            return f"unknown ({self.reason})"
        return "unsat"


class EquivVerdict(Enum):
    EQUIV = "equiv"
    NOT_EQUIV = "not-equiv"
    UNKNOWN = "unknown"
