from __future__ import annotations

from typing import Optional


class EngineError(ValueError):
    """Base class for every domain failure raised by the engine."""

    @property
    def rule(self) -> str:
        return type(self).__name__


# --- Current algebra ----------------------------------------------------------

class MalformedTerm(EngineError):
    pass


class ImproperIntersection(EngineError):
    pass


class DegenerateSigma(EngineError):
    pass


# --- Weights and products -----------------------------------------------------

class PreconditionViolated(EngineError):
    pass


class NotSmoothAlpha(EngineError):
    pass


class BadSpec(EngineError):
    pass


class UnsupportedPushforward(EngineError):
    pass


class MultipleSigmaFamilies(EngineError):
    pass


# --- Oracle -------------------------------------------------------------------

class BudgetExceeded(EngineError):
    pass


class NonHermitianHessian(EngineError):
    pass


class NoConvergence(EngineError):
    pass


# --- Scenario files -----------------------------------------------------------

class ScenarioError(EngineError):
    def __init__(self, message: str, line: Optional[int] = None, column: Optional[int] = None) -> None:
        self.line = line
        self.column = column
        where = ""
        if line is not None:
            where = f"line {line}" + (f", column {column}" if column is not None else "") + ": "
        super().__init__(where + message)


class ParseError(ScenarioError):
    pass


class UndeclaredSymbol(ScenarioError):
    pass


class RankMismatch(ScenarioError):
    pass
