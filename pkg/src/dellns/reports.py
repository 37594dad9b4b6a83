"""Verification reports: one case per (input, layer) comparison."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Any


def _render(value) -> Any:
    if value is None or isinstance(value, (str, int, float, bool)):
        return value
    if isinstance(value, (list, tuple)):
        return [_render(v) for v in value]
    if isinstance(value, dict):
        return {str(k): _render(v) for k, v in value.items()}
    return str(value)


@dataclass
class Case:
    input: Any
    layer: tuple[int, int] | None
    ok: bool
    lhs: Any = None
    rhs: Any = None

    def to_json(self) -> dict:
        return {
            "input": _render(self.input),
            "layer": list(self.layer) if self.layer is not None else None,
            "status": "pass" if self.ok else "fail",
            "lhs": _render(self.lhs),
            "rhs": _render(self.rhs),
        }


@dataclass
class Report:
    suite: str
    params: dict = field(default_factory=dict)
    cases: list[Case] = field(default_factory=list)

    def add(self, input, layer, ok: bool, lhs=None, rhs=None, verbose: bool = False) -> None:
        # passing cases keep the payload small unless asked otherwise
        if ok and not verbose:
            lhs = rhs = None
        self.cases.append(Case(input, layer, bool(ok), lhs, rhs))

    def extend(self, other: "Report") -> None:
        self.cases.extend(other.cases)

    @property
    def passed(self) -> bool:
        return all(c.ok for c in self.cases)

    @property
    def failures(self) -> list[Case]:
        return [c for c in self.cases if not c.ok]

    def to_json(self) -> dict:
        return {
            "suite": self.suite,
            "params": _render(self.params),
            "cases": [c.to_json() for c in self.cases],
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2, sort_keys=False)

    def summary(self) -> str:
        n_fail = len(self.failures)
        status = "PASS" if n_fail == 0 else "FAIL"
        return f"{self.suite}: {status} ({len(self.cases) - n_fail}/{len(self.cases)} cases)"

    def text(self) -> str:
        lines = [self.summary()]
        for c in self.failures:
            lines.append(f"  fail input={_render(c.input)} layer={c.layer}")
            if c.lhs is not None or c.rhs is not None:
                lines.append(f"    lhs: {_render(c.lhs)}")
                lines.append(f"    rhs: {_render(c.rhs)}")
        return "\n".join(lines)


def merge(suite: str, reports: list[Report], params: dict | None = None) -> Report:
    out = Report(suite, params or {})
    for r in reports:
        for c in r.cases:
            out.cases.append(Case({"suite": r.suite, "input": c.input}, c.layer, c.ok, c.lhs, c.rhs))
    return out
