"""Exception hierarchy shared by all modules."""

from __future__ import annotations


class HodlError(Exception):
    """Base class for every error raised by the toolchain."""


class ParseError(HodlError):
    def __init__(self, message: str, pos: tuple[int, int] | None = None):
        self.pos = pos
        where = f"line {pos[0]}, col {pos[1]}: " if pos else ""
        super().__init__(where + message)


class TypeCheckError(HodlError):
    def __init__(self, message: str, rule_index: int | None = None):
        self.rule_index = rule_index
        where = f"rule {rule_index}: " if rule_index is not None else ""
        super().__init__(where + message)


class DomainExplosion(HodlError):
    """A domain enumeration would exceed the configured element limit."""

    def __init__(self, type_repr: str, estimate: int, limit: int):
        self.type_repr = type_repr
        self.estimate = estimate
        self.limit = limit
        if estimate.bit_length() > 64:
            est = f"2^{estimate.bit_length() - 1}+"
        else:
            est = str(estimate)
        super().__init__(f"domain of {type_repr} has {est} elements (limit {limit})")


class BudgetExceeded(HodlError):
    """The evaluation step budget ran out."""


class NonMonotoneStep(HodlError):
    """Internal guard: a fixpoint iterate decreased, or iteration did not settle."""


class EvaluationError(HodlError):
    """Invalid request to the engine (unknown predicate, bad arguments, ...)."""


class TransformError(HodlError):
    pass


class GeneratorError(HodlError):
    pass
