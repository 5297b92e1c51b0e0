"""Verdict objects produced by every checker."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Any


def jsonable(value):
    """Recursively convert tuples/sets/frozensets so json.dumps accepts them."""
    if isinstance(value, (list, tuple)):
        return [jsonable(v) for v in value]
    if isinstance(value, (set, frozenset)):
        return sorted(jsonable(v) for v in value)
    if isinstance(value, dict):
        return {str(k): jsonable(v) for k, v in sorted(value.items(), key=lambda kv: str(kv[0]))}
    return value


@dataclass(frozen=True)
class CheckReport:
    """Outcome of a single check: verdict plus witness and statistics.

    Failures of a checked property are verdicts, never exceptions; the witness
    names the violating object so it can be re-verified independently.
    """

    check: str
    verdict: bool
    witness: Any = None
    stats: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.verdict

    def as_dict(self) -> dict:
        return {
            "check": self.check,
            "verdict": "pass" if self.verdict else "fail",
            "witness": jsonable(self.witness),
            "stats": jsonable(self.stats),
        }

    def to_json(self, indent=None) -> str:
        return json.dumps(self.as_dict(), indent=indent, sort_keys=True)
