from __future__ import annotations

from dataclasses import dataclass, field


@dataclass(frozen=True)
class Verdict:
    """Pass/fail outcome of a check; falsy on failure."""

    passed: bool
    reason: str | None = None
    detail: dict = field(default_factory=dict)

    def __bool__(self) -> bool:
        return self.passed

    @classmethod
    def ok(cls, **detail) -> "Verdict":
        return cls(True, None, detail)

    @classmethod
    def fail(cls, reason: str, **detail) -> "Verdict":
        return cls(False, reason, detail)

    def to_json(self) -> dict:
        out = {"verdict": "pass" if self.passed else "fail"}
        if self.reason:
            out["reason"] = self.reason
        out.update(self.detail)
        return out
