"""Immutable domain model: linguistic variables, rules and rule bases.

Everything here is a frozen dataclass validated on construction, so a built
``RuleBase`` is always internally consistent and safe to share between
threads. The FCL frontend produces these objects; the inference engine only
reads them.
"""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass, field
from typing import Union

from .membership import MembershipFunction, Singleton
from .operators import (
    AccumulationMethod,
    ActivationMethod,
    AndMethod,
    DefuzzMethod,
    Hedge,
    OrMethod,
)

_IDENT_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")

# Words the FCL grammar claims for itself; they cannot name variables/terms.
RESERVED_WORDS = frozenset(
    {
        "FUNCTION_BLOCK", "END_FUNCTION_BLOCK", "VAR_INPUT", "VAR_OUTPUT", "END_VAR",
        "FUZZIFY", "END_FUZZIFY", "DEFUZZIFY", "END_DEFUZZIFY", "RULEBLOCK", "END_RULEBLOCK",
        "TERM", "RANGE", "METHOD", "DEFAULT", "ACCU", "ACT", "AND", "OR", "NOT",
        "RULE", "IF", "THEN", "IS", "WITH", "REAL", "NC", "VERY", "SOMEWHAT",
        "GAUSS", "GBELL", "SIGM", "TRIAN", "TRAPE",
    }
)


def _check_identifier(name: str, what: str) -> None:
    if not _IDENT_RE.match(name):
        raise ValueError(f"{what} {name!r} is not a valid identifier")
    if name.upper() in RESERVED_WORDS:
        raise ValueError(f"{what} {name!r} collides with a reserved word")


class VariableRole(enum.Enum):
    INPUT = "input"
    OUTPUT = "output"


@dataclass(frozen=True)
class ConnectiveSet:
    """The AND/OR formula pair a rule block evaluates antecedents with."""

    and_method: AndMethod = AndMethod.MIN
    or_method: OrMethod = OrMethod.MAX


@dataclass(frozen=True)
class OutputSettings:
    """Accumulation/defuzzification configuration of an output variable."""

    method: DefuzzMethod
    accumulation: AccumulationMethod = AccumulationMethod.MAX
    default: float | None = None

    def __post_init__(self):
        if self.default is not None:
            object.__setattr__(self, "default", float(self.default))


@dataclass(frozen=True)
class Term:
    """One named value of a linguistic variable."""

    name: str
    mf: MembershipFunction

    def __post_init__(self):
        _check_identifier(self.name, "term name")


@dataclass(frozen=True)
class LinguisticVariable:
    """Named universe with named terms.

    ``universe`` is (lo, hi) with lo < hi. When not declared explicitly it is
    derived from the terms' x-coordinates (see ``derive_universe``); the
    ``universe_declared`` flag only controls provenance, not identity.
    """

    name: str
    role: VariableRole
    terms: tuple[Term, ...]
    universe: tuple[float, float]
    settings: OutputSettings | None = None
    universe_declared: bool = field(default=False, compare=False)

    def __post_init__(self):
        _check_identifier(self.name, "variable name")
        object.__setattr__(self, "terms", tuple(self.terms))
        lo, hi = (float(self.universe[0]), float(self.universe[1]))
        object.__setattr__(self, "universe", (lo, hi))
        if not lo < hi:
            raise ValueError(f"variable {self.name}: universe ({lo}, {hi}) requires lo < hi")
        seen = set()
        for term in self.terms:
            if term.name in seen:
                raise ValueError(f"variable {self.name}: duplicate term {term.name!r}")
            seen.add(term.name)
            for x in term.mf.defining_xs():
                if not lo <= x <= hi:
                    raise ValueError(
                        f"variable {self.name}: term {term.name!r} has x={x} outside universe ({lo}, {hi})"
                    )
        if self.role is VariableRole.OUTPUT:
            if self.settings is None:
                raise ValueError(f"output variable {self.name} requires accumulation/defuzzification settings")
        elif self.settings is not None:
            raise ValueError(f"input variable {self.name} cannot carry output settings")

    def term(self, name: str) -> Term:
        for t in self.terms:
            if t.name == name:
                return t
        raise KeyError(f"variable {self.name} has no term {name!r}")

    def term_names(self) -> tuple[str, ...]:
        return tuple(t.name for t in self.terms)

    def has_term(self, name: str) -> bool:
        return any(t.name == name for t in self.terms)

    @property
    def all_singleton(self) -> bool:
        return bool(self.terms) and all(t.mf.is_singleton for t in self.terms)


def derive_universe(
    terms: tuple[Term, ...] | list[Term],
    declared: tuple[float, float] | None = None,
) -> tuple[float, float]:
    """Universe of a variable: the declared range if any, otherwise the
    min/max x-coordinate over all terms."""
    if declared is not None:
        return (float(declared[0]), float(declared[1]))
    if not terms:
        raise ValueError("cannot derive a universe: variable has no terms and no declared range")
    xs = [x for t in terms for x in t.mf.extent_xs()]
    return (min(xs), max(xs))


# ---------------------------------------------------------------------------
# Antecedent expression tree


@dataclass(frozen=True)
class Atom:
    """`variable IS [hedges] term` leaf; hedges apply right-to-left."""

    variable: str
    term: str
    hedges: tuple[Hedge, ...] = ()


@dataclass(frozen=True)
class And:
    left: "FuzzyExpression"
    right: "FuzzyExpression"


@dataclass(frozen=True)
class Or:
    left: "FuzzyExpression"
    right: "FuzzyExpression"


@dataclass(frozen=True)
class Not:
    operand: "FuzzyExpression"


FuzzyExpression = Union[Atom, And, Or, Not]


def expression_atoms(expr: FuzzyExpression):
    """Yield every Atom in the tree, left to right."""
    if isinstance(expr, Atom):
        yield expr
    elif isinstance(expr, Not):
        yield from expression_atoms(expr.operand)
    else:
        yield from expression_atoms(expr.left)
        yield from expression_atoms(expr.right)


# ---------------------------------------------------------------------------
# Rules


@dataclass(frozen=True)
class Consequent:
    variable: str
    term: str


@dataclass(frozen=True)
class Rule:
    """IF antecedent THEN consequents, optionally damped by a weight in (0, 1]."""

    label: str
    antecedent: FuzzyExpression
    consequents: tuple[Consequent, ...]
    weight: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "label", str(self.label))
        object.__setattr__(self, "consequents", tuple(self.consequents))
        object.__setattr__(self, "weight", float(self.weight))
        if not re.fullmatch(r"[A-Za-z0-9_.]+", self.label):
            raise ValueError(f"rule label {self.label!r} must be a number or a name")
        if not self.consequents:
            raise ValueError(f"rule {self.label}: at least one consequent required")
        if not 0.0 < self.weight <= 1.0:
            raise ValueError(f"rule {self.label}: weight {self.weight} outside (0, 1]")


@dataclass(frozen=True)
class RuleBlock:
    name: str
    rules: tuple[Rule, ...]
    connectives: ConnectiveSet = ConnectiveSet()
    activation: ActivationMethod = ActivationMethod.MIN

    def __post_init__(self):
        _check_identifier(self.name, "rule block name")
        object.__setattr__(self, "rules", tuple(self.rules))
        seen = set()
        for rule in self.rules:
            if rule.label in seen:
                raise ValueError(f"rule block {self.name}: duplicate rule label {rule.label!r}")
            seen.add(rule.label)


@dataclass(frozen=True)
class RuleBase:
    """A fully linked knowledge base ready for inference.

    ``source_name`` is provenance only and never takes part in equality,
    so round-tripping through the pretty-printer compares equal.
    """

    input_vars: tuple[LinguisticVariable, ...]
    output_vars: tuple[LinguisticVariable, ...]
    rule_blocks: tuple[RuleBlock, ...]
    source_name: str = field(default="<memory>", compare=False)

    def __post_init__(self):
        object.__setattr__(self, "input_vars", tuple(self.input_vars))
        object.__setattr__(self, "output_vars", tuple(self.output_vars))
        object.__setattr__(self, "rule_blocks", tuple(self.rule_blocks))
        if not self.output_vars:
            raise ValueError("rule base requires at least one output variable")
        names = set()
        for var in self.input_vars + self.output_vars:
            if var.name in names:
                raise ValueError(f"duplicate variable name {var.name!r}")
            names.add(var.name)
        for var in self.input_vars:
            if var.role is not VariableRole.INPUT:
                raise ValueError(f"{var.name} listed as input but declared {var.role.value}")
        for var in self.output_vars:
            if var.role is not VariableRole.OUTPUT:
                raise ValueError(f"{var.name} listed as output but declared {var.role.value}")
        self._check_references()

    def _check_references(self):
        inputs = {v.name: v for v in self.input_vars}
        outputs = {v.name: v for v in self.output_vars}
        for block in self.rule_blocks:
            for rule in block.rules:
                for atom in expression_atoms(rule.antecedent):
                    var = inputs.get(atom.variable)
                    if var is None:
                        kind = "output variable" if atom.variable in outputs else "unknown variable"
                        raise ValueError(
                            f"rule {rule.label}: antecedent references {kind} {atom.variable!r}"
                        )
                    if not var.has_term(atom.term):
                        raise ValueError(
                            f"rule {rule.label}: variable {atom.variable!r} has no term {atom.term!r}"
                        )
                for cons in rule.consequents:
                    var = outputs.get(cons.variable)
                    if var is None:
                        kind = "input variable" if cons.variable in inputs else "unknown variable"
                        raise ValueError(
                            f"rule {rule.label}: consequent references {kind} {cons.variable!r}"
                        )
                    if not var.has_term(cons.term):
                        raise ValueError(
                            f"rule {rule.label}: variable {cons.variable!r} has no term {cons.term!r}"
                        )

    def variable(self, name: str) -> LinguisticVariable:
        for var in self.input_vars + self.output_vars:
            if var.name == name:
                return var
        raise KeyError(f"no variable named {name!r}")

    def has_variable(self, name: str) -> bool:
        return any(v.name == name for v in self.input_vars + self.output_vars)

    def input_names(self) -> tuple[str, ...]:
        return tuple(v.name for v in self.input_vars)

    def output_names(self) -> tuple[str, ...]:
        return tuple(v.name for v in self.output_vars)

    def rules(self) -> tuple[tuple[RuleBlock, Rule], ...]:
        return tuple((block, rule) for block in self.rule_blocks for rule in block.rules)


def singleton_output_check(var: LinguisticVariable) -> str | None:
    """Mixed singleton/polygon outputs cannot be defuzzified consistently.

    Returns an error message, or None when the combination is sound.
    """
    if not var.terms:
        return f"output variable {var.name} has no terms"
    kinds = {t.mf.is_singleton for t in var.terms}
    if kinds == {True, False}:
        return f"output variable {var.name} mixes singleton and polygonal terms"
    method = var.settings.method if var.settings else None
    if method is DefuzzMethod.COGS and not var.all_singleton:
        return f"output variable {var.name} uses COGS but has non-singleton terms"
    return None


__all__ = [
    "And",
    "Atom",
    "Consequent",
    "ConnectiveSet",
    "FuzzyExpression",
    "LinguisticVariable",
    "Not",
    "Or",
    "OutputSettings",
    "RESERVED_WORDS",
    "Rule",
    "RuleBase",
    "RuleBlock",
    "Singleton",
    "Term",
    "VariableRole",
    "derive_universe",
    "expression_atoms",
    "singleton_output_check",
]
