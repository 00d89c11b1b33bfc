"""Exception hierarchy shared by every stage of the pipeline."""

from __future__ import annotations


class EssenceError(Exception):
    """Base class for all user-facing errors."""


class ParseError(EssenceError):
    def __init__(self, message: str, line: int = 0, column: int = 0,
                 expected: list[str] | None = None) -> None:
        self.message = message
        self.line = line
        self.column = column
        self.expected = list(expected or [])
        where = f"{line}:{column}: " if line else ""
        extra = f" (expected {', '.join(self.expected)})" if self.expected else ""
        super().__init__(f"{where}{message}{extra}")


class TypeCheckError(EssenceError):
    def __init__(self, message: str, where: object = None) -> None:
        self.message = message
        self.where = where
        super().__init__(message)


EVAL_ERROR_KINDS = frozenset({
    "division-by-zero",
    "undefined-application",
    "negative-exponent",
    "overflow",
    "bad-index",
    "not-a-participant",
    "arity-mismatch",
    "infinite-domain",
    "unbound-name",
    "type-mismatch",
    "invalid-value",
})


class EvalError(EssenceError):
    def __init__(self, kind: str, message: str) -> None:
        assert kind in EVAL_ERROR_KINDS, kind
        self.kind = kind
        self.message = message
        super().__init__(f"{kind}: {message}")


class InstantiationError(EssenceError):
    """Raised when parameters do not fit the model or a where clause fails."""
