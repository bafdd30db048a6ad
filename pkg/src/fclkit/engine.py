"""Mamdani inference over a RuleBase.

The pipeline is: fuzzify crisp inputs, evaluate each rule's antecedent with
the block's connectives, damp by the rule weight, fold activations per
output term with the accumulation method, implicate each term's curve, and
defuzzify the point-wise accumulated curve.

A RuleBase is never mutated; every run builds its own EvaluationContext, so
any number of inferences may share one RuleBase across threads.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping

from .defuzz import DEFAULT_SAMPLES, EvaluationError, NoRulesFiredError, defuzzify
from .membership import MembershipFunction
from .model import (
    And,
    Atom,
    ConnectiveSet,
    FuzzyExpression,
    LinguisticVariable,
    Not,
    Or,
    Rule,
    RuleBase,
)
from .operators import (
    AccumulationMethod,
    ActivationMethod,
    accumulate_pair,
    and_connect,
    apply_hedge,
    implicate,
    or_connect,
)

__all__ = [
    "AggregatedOutput",
    "EvaluationContext",
    "EvaluationError",
    "FuzzifiedValue",
    "NoRulesFiredError",
    "OutputResult",
    "RuleTraceEntry",
    "TermActivation",
    "accumulate",
    "evaluate_expression",
    "evaluate_rule",
    "fuzzify_all",
    "infer",
]


@dataclass(frozen=True)
class FuzzifiedValue:
    """Per-term membership degrees of one crisp input."""

    variable: str
    crisp: float
    degrees: dict[str, float]


def fuzzify_all(rb: RuleBase, inputs: Mapping[str, float]) -> dict[str, FuzzifiedValue]:
    """Fuzzify every input variable; inputs must cover them exactly.

    Raises EvaluationError on a missing or unknown input name.
    """
    known = {v.name for v in rb.input_vars}
    for name in inputs:
        if name not in known:
            raise EvaluationError(f"unknown input variable {name!r}")
    fuzzified: dict[str, FuzzifiedValue] = {}
    for var in rb.input_vars:
        if var.name not in inputs:
            raise EvaluationError(f"missing input variable {var.name!r}")
        x = float(inputs[var.name])
        degrees = {term.name: term.mf.evaluate(x) for term in var.terms}
        fuzzified[var.name] = FuzzifiedValue(var.name, x, degrees)
    return fuzzified


def evaluate_expression(
    expr: FuzzyExpression,
    fuzzified: Mapping[str, FuzzifiedValue],
    connectives: ConnectiveSet = ConnectiveSet(),
) -> float:
    """Degree of an antecedent tree; hedges on atoms apply right-to-left."""
    if isinstance(expr, Atom):
        degree = fuzzified[expr.variable].degrees[expr.term]
        for hedge in reversed(expr.hedges):
            degree = apply_hedge(hedge, degree)
        return degree
    if isinstance(expr, Not):
        return 1.0 - evaluate_expression(expr.operand, fuzzified, connectives)
    if isinstance(expr, And):
        return and_connect(
            evaluate_expression(expr.left, fuzzified, connectives),
            evaluate_expression(expr.right, fuzzified, connectives),
            connectives.and_method,
        )
    if isinstance(expr, Or):
        return or_connect(
            evaluate_expression(expr.left, fuzzified, connectives),
            evaluate_expression(expr.right, fuzzified, connectives),
            connectives.or_method,
        )
    raise TypeError(f"unknown expression node {type(expr).__name__}")


def evaluate_rule(
    rule: Rule,
    fuzzified: Mapping[str, FuzzifiedValue],
    connectives: ConnectiveSet = ConnectiveSet(),
) -> float:
    """Rule activation: antecedent degree times the rule weight."""
    return evaluate_expression(rule.antecedent, fuzzified, connectives) * rule.weight


@dataclass(frozen=True)
class TermActivation:
    """Net activation of one output term after the accumulation fold."""

    term: str
    activation: float
    mf: MembershipFunction


@dataclass(frozen=True)
class AggregatedOutput:
    """Point-wise accumulated fuzzy result for one output variable."""

    variable: str
    universe: tuple[float, float]
    components: tuple[TermActivation, ...]
    activation_method: ActivationMethod = ActivationMethod.MIN
    accumulation: AccumulationMethod = AccumulationMethod.MAX

    def membership(self, x: float) -> float:
        """Accumulated curve value; zero-activation terms contribute nothing."""
        result = 0.0
        first = True
        for c in self.components:
            if c.activation <= 0.0:
                continue
            value = implicate(c.activation, c.mf.evaluate(x), self.activation_method)
            result = value if first else accumulate_pair(result, value, self.accumulation)
            first = False
        return result

    @property
    def fired(self) -> bool:
        return any(c.activation > 0.0 for c in self.components)

    def net_activations(self) -> dict[str, float]:
        return {c.term: c.activation for c in self.components}


def accumulate(
    var: LinguisticVariable,
    activations: Iterable[tuple[str, float]],
    act_method: ActivationMethod = ActivationMethod.MIN,
    accu_method: AccumulationMethod | None = None,
) -> AggregatedOutput:
    """Fold raw (term, activation) pairs into an aggregated output.

    Per-term net activation is the accumulation fold of that term's
    activations, in arrival order; terms nothing fired for stay at zero.
    """
    if accu_method is None:
        accu_method = var.settings.accumulation if var.settings else AccumulationMethod.MAX
    net: dict[str, float] = {}
    for term, degree in activations:
        if term in net:
            net[term] = accumulate_pair(net[term], degree, accu_method)
        else:
            net[term] = degree
    components = tuple(
        TermActivation(term.name, net.get(term.name, 0.0), term.mf) for term in var.terms
    )
    return AggregatedOutput(var.name, var.universe, components, act_method, accu_method)


@dataclass(frozen=True)
class RuleTraceEntry:
    """One rule firing, recorded once per consequent."""

    block: str
    rule: str
    activation: float
    variable: str
    term: str


@dataclass(frozen=True)
class OutputResult:
    aggregate: AggregatedOutput
    crisp: float | None
    fired: bool
    error: str | None = None


@dataclass(frozen=True)
class EvaluationContext:
    """Everything one inference run produced, in deterministic order."""

    inputs: dict[str, float]
    fuzzified: dict[str, FuzzifiedValue]
    trace: tuple[RuleTraceEntry, ...]
    outputs: dict[str, OutputResult]


def infer(rb: RuleBase, inputs: Mapping[str, float], samples: int = DEFAULT_SAMPLES) -> EvaluationContext:
    """Run the full pipeline for one set of crisp inputs.

    A failed output (no rules fired without a DEFAULT) is reported in its
    OutputResult.error; other outputs still evaluate.
    """
    fuzzified = fuzzify_all(rb, inputs)
    trace: list[RuleTraceEntry] = []
    contributions: dict[str, list[tuple[str, float]]] = {v.name: [] for v in rb.output_vars}
    act_methods: dict[str, ActivationMethod] = {}
    for block in rb.rule_blocks:
        for rule in block.rules:
            degree = evaluate_rule(rule, fuzzified, block.connectives)
            for cons in rule.consequents:
                trace.append(RuleTraceEntry(block.name, rule.label, degree, cons.variable, cons.term))
                contributions[cons.variable].append((cons.term, degree))
                act_methods.setdefault(cons.variable, block.activation)

    outputs: dict[str, OutputResult] = {}
    for var in rb.output_vars:
        act = act_methods.get(var.name, ActivationMethod.MIN)
        agg = accumulate(var, contributions[var.name], act)
        settings = var.settings
        assert settings is not None  # guaranteed for output variables
        try:
            crisp = defuzzify(agg, settings.method, samples, settings.default)
            outputs[var.name] = OutputResult(agg, crisp, agg.fired)
        except EvaluationError as exc:
            outputs[var.name] = OutputResult(agg, None, agg.fired, str(exc))

    canonical_inputs = {v.name: float(inputs[v.name]) for v in rb.input_vars}
    return EvaluationContext(canonical_inputs, fuzzified, tuple(trace), outputs)
