"""Recorded rewrite traces: checkable, serializable, replayable.

A trace is a list of steps, each either an atomic rule application or a
named segment grouping sub-steps (scripted derivations mirror a written
proof, whose displayed equalities usually bundle several atomic rules).
Every step records the oracle scalar relating the diagram after the step to
the one before it, measured when the trace was produced in checked mode.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from ..diagram import Diagram
from ..errors import CheckFailedError
from ..semantics import DEFAULT_TOL, EqMode, eq_up_to, interpret
from .rules import Direction, MatchSite, RuleId, TheoryLevel, apply_rule, require_rule


@dataclass
class TraceStep:
    rule: str
    binding: dict
    scalar: complex | None = None
    direction: str = Direction.FORWARD.value
    color_swapped: bool = False
    steps: list["TraceStep"] = field(default_factory=list)

    def to_dict(self) -> dict:
        out: dict = {"rule": self.rule, "binding": _jsonable(self.binding)}
        if self.scalar is not None:
            out["scalar"] = [self.scalar.real, self.scalar.imag]
        if self.direction != Direction.FORWARD.value:
            out["direction"] = self.direction
        if self.color_swapped:
            out["color_swapped"] = True
        if self.steps:
            out["steps"] = [s.to_dict() for s in self.steps]
        return out

    @staticmethod
    def from_dict(data: dict) -> "TraceStep":
        scalar = None
        if "scalar" in data:
            re, im = data["scalar"]
            scalar = complex(re, im)
        return TraceStep(
            rule=data["rule"],
            binding=data.get("binding", {}),
            scalar=scalar,
            direction=data.get("direction", Direction.FORWARD.value),
            color_swapped=data.get("color_swapped", False),
            steps=[TraceStep.from_dict(s) for s in data.get("steps", [])],
        )


@dataclass
class RewriteTrace:
    initial: Diagram
    final: Diagram
    steps: list[TraceStep]

    def atomic_steps(self) -> list[TraceStep]:
        out: list[TraceStep] = []

        def walk(steps):
            for s in steps:
                if s.steps:
                    walk(s.steps)
                else:
                    out.append(s)

        walk(self.steps)
        return out

    def scalar_product(self) -> complex:
        total = 1.0 + 0.0j
        for s in self.atomic_steps():
            if s.scalar is not None:
                total *= s.scalar
        return total

    def to_dict(self) -> dict:
        return {
            "initial": self.initial.to_dict(),
            "steps": [s.to_dict() for s in self.steps],
        }

    def to_json(self, **kwargs) -> str:
        return json.dumps(self.to_dict(), **kwargs)

    @staticmethod
    def from_json(text: str) -> tuple[Diagram, list[TraceStep]]:
        data = json.loads(text)
        return (
            Diagram.from_dict(data["initial"]),
            [TraceStep.from_dict(s) for s in data["steps"]],
        )


def _jsonable(value):
    if isinstance(value, dict):
        return {k: _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    return value


class Tracer:
    """Applies steps to a working diagram, oracle-checking each one.

    In checked mode the interpretation of the current diagram is cached so
    each step costs a single extra contraction.
    """

    def __init__(
        self,
        diagram: Diagram,
        checked: bool = True,
        tol: float = DEFAULT_TOL,
        theory: TheoryLevel = TheoryLevel.ZX_PLUS_EU,
    ):
        self.initial = diagram
        self.current = diagram
        self.checked = checked
        self.tol = tol
        self.theory = theory
        self.steps: list[TraceStep] = []
        self._segments: list[list[TraceStep]] = []
        self._value = interpret(diagram) if checked else None

    # -- recording ---------------------------------------------------------

    def _sink(self) -> list[TraceStep]:
        return self._segments[-1] if self._segments else self.steps

    def begin_segment(self, label: str, binding: dict | None = None) -> None:
        self._sink().append(TraceStep(rule=label, binding=binding or {}))
        self._segments.append(self._sink()[-1].steps)

    def end_segment(self) -> None:
        self._segments.pop()

    def _record(self, step: TraceStep, new_diagram: Diagram) -> None:
        if self.checked:
            new_value = interpret(new_diagram)
            res = eq_up_to(self._value, new_value, EqMode.UP_TO_SCALAR, self.tol)
            if not res.equal:
                raise CheckFailedError(
                    f"step {step.rule} at {step.binding} changed the semantics"
                )
            step.scalar = res.scalar
            self._value = new_value
        self._sink().append(step)
        self.current = new_diagram

    # -- step kinds ----------------------------------------------------------

    def apply_site(self, site: MatchSite) -> None:
        require_rule(site.rule, self.theory)
        new_d = apply_rule(self.current, site)
        self._record(
            TraceStep(
                rule=site.rule.value,
                binding=dict(site.binding),
                direction=site.direction.value,
                color_swapped=site.color_swapped,
            ),
            new_d,
        )

    def apply_custom(
        self,
        rule_name: str,
        binding: dict,
        new_diagram: Diagram,
        rule_for_theory: RuleId | None = None,
    ) -> None:
        """Record a non-RuleId step (parametric split/insert, registered
        equality, derived loop elimination) produced by the caller.
        ``rule_for_theory`` names the rule justifying the step, enforced
        against the active theory level; equalities pass None."""
        if rule_for_theory is not None:
            require_rule(rule_for_theory, self.theory)
        self._record(TraceStep(rule=rule_name, binding=dict(binding)), new_diagram)

    def finish(self) -> RewriteTrace:
        if self._segments:
            raise CheckFailedError("unbalanced trace segments")
        return RewriteTrace(self.initial, self.current, self.steps)
