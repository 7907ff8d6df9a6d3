"""Exception types shared across the gateway."""

from __future__ import annotations


class GatewayError(Exception):
    """Base class for all gateway errors."""


class ValidationIssue:
    """One problem found while validating an inbound event document."""

    __slots__ = ("kind", "field", "detail")

    def __init__(self, kind: str, field: str | None = None, detail: str | None = None):
        self.kind = kind
        self.field = field
        self.detail = detail

    def to_dict(self) -> dict:
        doc: dict = {"kind": self.kind}
        if self.field is not None:
            doc["field"] = self.field
        if self.detail is not None:
            doc["detail"] = self.detail
        return doc

    def __repr__(self) -> str:  # pragma: no cover
        return f"ValidationIssue({self.kind!r}, field={self.field!r})"


class EventValidationError(GatewayError):
    """Inbound event document rejected. Carries the full validation report."""

    def __init__(self, issues: list[ValidationIssue]):
        self.issues = issues
        super().__init__("; ".join(i.kind + (f"({i.field})" if i.field else "") for i in issues))

    def report(self) -> dict:
        return {"accepted": False, "errors": [i.to_dict() for i in self.issues]}


class DisabledWatcher(GatewayError):
    pass


class UnknownWatcher(GatewayError):
    pass


class NonPositiveWindow(GatewayError):
    pass


class UnsortedInput(GatewayError):
    def __init__(self, line_no: int):
        self.line_no = line_no
        super().__init__(f"out-of-order occurred_at at line {line_no}")


class UnclassifiedAlert(GatewayError):
    pass


class EmptyWindow(GatewayError):
    pass


class DimensionMismatch(GatewayError):
    pass


class NonFiniteReward(GatewayError):
    pass


class NonTerminalSignal(GatewayError):
    pass


class DuplicateFeedback(GatewayError):
    pass


class UnknownEntity(GatewayError):
    pass


class StorageFull(GatewayError):
    pass


class SerializationError(GatewayError):
    pass


class NonMonotonicTick(GatewayError):
    pass


class ScenarioAssertionFailed(GatewayError):
    def __init__(self, failures: list[dict]):
        self.failures = failures
        super().__init__(f"{len(failures)} scenario assertion(s) failed")
