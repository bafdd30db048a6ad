"""Canonical FCL text for a RuleBase.

The emitted text always re-parses to a structurally equal RuleBase: ranges
and method settings are spelled out explicitly, expressions are fully
parenthesized, and numbers use the shortest representation that round-trips
exactly through float().
"""

from __future__ import annotations

from ..membership import (
    Gaussian,
    GeneralizedBell,
    MembershipFunction,
    PiecewiseLinear,
    Sigmoidal,
    Singleton,
    Trapezoidal,
    Triangular,
)
from ..model import And, Atom, FuzzyExpression, LinguisticVariable, Not, Or, Rule, RuleBase


def fmt_number(x: float) -> str:
    if x == int(x) and abs(x) < 1e15:
        return str(int(x))
    return repr(x)


def _shape_text(mf: MembershipFunction) -> str:
    if isinstance(mf, Singleton):
        return fmt_number(mf.x)
    if isinstance(mf, PiecewiseLinear):
        return " ".join(f"({fmt_number(x)}, {fmt_number(m)})" for x, m in mf.points)
    if isinstance(mf, Gaussian):
        return f"GAUSS({fmt_number(mf.mean)}, {fmt_number(mf.sigma)})"
    if isinstance(mf, GeneralizedBell):
        return f"GBELL({fmt_number(mf.a)}, {fmt_number(mf.b)}, {fmt_number(mf.mean)})"
    if isinstance(mf, Sigmoidal):
        return f"SIGM({fmt_number(mf.gain)}, {fmt_number(mf.center)})"
    if isinstance(mf, Triangular):
        return f"TRIAN({fmt_number(mf.a)}, {fmt_number(mf.b)}, {fmt_number(mf.c)})"
    if isinstance(mf, Trapezoidal):
        return f"TRAPE({fmt_number(mf.a)}, {fmt_number(mf.b)}, {fmt_number(mf.c)}, {fmt_number(mf.d)})"
    raise TypeError(f"no FCL syntax for membership shape {type(mf).__name__}")


def _expression_text(expr: FuzzyExpression) -> str:
    if isinstance(expr, Atom):
        hedges = "".join(h.value + " " for h in expr.hedges)
        return f"{expr.variable} IS {hedges}{expr.term}"
    if isinstance(expr, Not):
        return f"NOT ({_expression_text(expr.operand)})"
    if isinstance(expr, And):
        return f"({_expression_text(expr.left)}) AND ({_expression_text(expr.right)})"
    if isinstance(expr, Or):
        return f"({_expression_text(expr.left)}) OR ({_expression_text(expr.right)})"
    raise TypeError(f"unknown expression node {type(expr).__name__}")


def _rule_text(rule: Rule) -> str:
    consequents = " AND ".join(f"{c.variable} IS {c.term}" for c in rule.consequents)
    with_clause = f" WITH {fmt_number(rule.weight)}" if rule.weight != 1.0 else ""
    return f"RULE {rule.label} : IF {_expression_text(rule.antecedent)} THEN {consequents}{with_clause};"


def _variable_lines(var: LinguisticVariable, out: list[str]) -> None:
    for term in var.terms:
        out.append(f"    TERM {term.name} := {_shape_text(term.mf)};")
    lo, hi = var.universe
    out.append(f"    RANGE := ({fmt_number(lo)} .. {fmt_number(hi)});")
    if var.settings is not None:
        out.append(f"    ACCU : {var.settings.accumulation.value};")
        out.append(f"    METHOD : {var.settings.method.value};")
        if var.settings.default is not None:
            out.append(f"    DEFAULT := {fmt_number(var.settings.default)};")


def pretty_print(rb: RuleBase) -> str:
    """Render a RuleBase as canonical FCL text (bare-blocks layout)."""
    out: list[str] = []
    out.append("VAR_INPUT")
    for var in rb.input_vars:
        out.append(f"    {var.name} : REAL;")
    out.append("END_VAR")
    out.append("")
    out.append("VAR_OUTPUT")
    for var in rb.output_vars:
        out.append(f"    {var.name} : REAL;")
    out.append("END_VAR")
    for var in rb.input_vars:
        out.append("")
        out.append(f"FUZZIFY {var.name}")
        _variable_lines(var, out)
        out.append("END_FUZZIFY")
    for var in rb.output_vars:
        out.append("")
        out.append(f"DEFUZZIFY {var.name}")
        _variable_lines(var, out)
        out.append("END_DEFUZZIFY")
    for block in rb.rule_blocks:
        out.append("")
        out.append(f"RULEBLOCK {block.name}")
        out.append(f"    AND : {block.connectives.and_method.value};")
        out.append(f"    OR : {block.connectives.or_method.value};")
        out.append(f"    ACT : {block.activation.value};")
        for rule in block.rules:
            out.append(f"    {_rule_text(rule)}")
        out.append("END_RULEBLOCK")
    out.append("")
    return "\n".join(out)
