"""Recursive-descent parser and linker for the FCL dialect.

Two layouts are accepted: the IEC-style `FUNCTION_BLOCK ... END_FUNCTION_BLOCK`
wrapper, and bare top-level blocks (VAR_INPUT / VAR_OUTPUT / FUZZIFY /
DEFUZZIFY, with rules either in a RULEBLOCK or as a bare RULE list). Keywords
are case-insensitive, identifiers are case-sensitive.

Parsing never raises on bad input: all problems are collected as Diagnostics
(syntax errors first, link errors after) and the result carries a RuleBase
only when no error-severity diagnostic was produced. Several sources can be
merged before linking, which is how multi-file knowledge bases are loaded.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

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
from ..model import (
    And,
    Atom,
    Consequent,
    ConnectiveSet,
    LinguisticVariable,
    Not,
    Or,
    OutputSettings,
    Rule,
    RuleBase,
    RuleBlock,
    Term,
    VariableRole,
    derive_universe,
    expression_atoms,
)
from ..operators import (
    AccumulationMethod,
    ActivationMethod,
    AndMethod,
    DefuzzMethod,
    Hedge,
    OrMethod,
)
from .diagnostics import Diagnostic, Severity
from .lexer import Token, TokenKind, tokenize

_HEDGE_WORDS = {"NOT": Hedge.NOT, "VERY": Hedge.VERY, "SOMEWHAT": Hedge.SOMEWHAT}

_SHAPE_ARITY = {"GAUSS": 2, "GBELL": 3, "SIGM": 2, "TRIAN": 3, "TRAPE": 4}

# Words that begin a statement or close a block; used to resynchronize
# after a syntax error.
_SYNC_WORDS = {
    "TERM", "RANGE", "ACCU", "METHOD", "DEFAULT", "RULE", "AND", "OR", "ACT",
    "VAR_INPUT", "VAR_OUTPUT", "END_VAR", "FUZZIFY", "END_FUZZIFY",
    "DEFUZZIFY", "END_DEFUZZIFY", "RULEBLOCK", "END_RULEBLOCK",
    "FUNCTION_BLOCK", "END_FUNCTION_BLOCK",
}


@dataclass
class ParseResult:
    """Outcome of a parse: a linked RuleBase, or the diagnostics explaining why not."""

    rulebase: RuleBase | None
    diagnostics: list[Diagnostic]

    @property
    def ok(self) -> bool:
        return self.rulebase is not None

    def errors(self) -> list[Diagnostic]:
        return [d for d in self.diagnostics if d.is_error]

    def warnings(self) -> list[Diagnostic]:
        return [d for d in self.diagnostics if not d.is_error]


# ---------------------------------------------------------------------------
# Raw (unlinked) syntax tree


@dataclass
class _RawTerm:
    name: Token
    shape: MembershipFunction | None  # None when the shape itself was invalid


@dataclass
class _RawVarBlock:
    kind: str  # "fuzzify" | "defuzzify"
    var: Token
    terms: list[_RawTerm] = field(default_factory=list)
    range_decl: tuple[float, float] | None = None
    accu: AccumulationMethod | None = None
    method: DefuzzMethod | None = None
    method_tok: Token | None = None
    default: float | None = None
    has_default: bool = False


@dataclass
class _RawAtom:
    var: Token
    hedges: tuple[Hedge, ...]
    term: Token


@dataclass
class _RawRule:
    label: Token
    antecedent: object  # nested tuples over _RawAtom
    consequents: list[tuple[Token, Token]]
    weight: float
    weight_tok: Token | None


@dataclass
class _RawRuleBlock:
    name: str
    name_tok: Token
    and_method: AndMethod = AndMethod.MIN
    or_method: OrMethod = OrMethod.MAX
    activation: ActivationMethod = ActivationMethod.MIN
    accu: AccumulationMethod | None = None
    rules: list[_RawRule] = field(default_factory=list)


@dataclass
class _RawKb:
    source_name: str
    inputs: list[Token] = field(default_factory=list)
    outputs: list[Token] = field(default_factory=list)
    var_blocks: list[_RawVarBlock] = field(default_factory=list)
    rule_blocks: list[_RawRuleBlock] = field(default_factory=list)
    bare_rules: list[_RawRule] = field(default_factory=list)


class _Parser:
    def __init__(self, source: str, source_name: str, diagnostics: list[Diagnostic]):
        self.source_name = source_name
        self.diagnostics = diagnostics
        self.tokens = tokenize(source, source_name, diagnostics)
        self.pos = 0
        self.kb = _RawKb(source_name)

    # -- token helpers ------------------------------------------------------

    def peek(self) -> Token:
        return self.tokens[self.pos]

    def advance(self) -> Token:
        tok = self.tokens[self.pos]
        if tok.kind is not TokenKind.EOF:
            self.pos += 1
        return tok

    def at_word(self, *words: str) -> bool:
        tok = self.peek()
        return tok.kind is TokenKind.IDENT and tok.upper() in words

    def take_word(self, *words: str) -> Token | None:
        if self.at_word(*words):
            return self.advance()
        return None

    def error(self, message: str, tok: Token | None = None) -> None:
        tok = tok or self.peek()
        self.diagnostics.append(
            Diagnostic(Severity.ERROR, message, tok.line, tok.column, self.source_name)
        )

    def expect(self, kind: TokenKind, what: str | None = None) -> Token | None:
        tok = self.peek()
        if tok.kind is kind:
            return self.advance()
        shown = tok.text or str(tok.kind.value)
        self.error(f"expected {what or kind.value}, found {shown!r}")
        return None

    def expect_word(self, word: str) -> Token | None:
        tok = self.peek()
        if tok.kind is TokenKind.IDENT and tok.upper() == word:
            return self.advance()
        shown = tok.text or str(tok.kind.value)
        self.error(f"expected {word}, found {shown!r}")
        return None

    def sync(self) -> None:
        """Skip past the current statement after a syntax error."""
        while True:
            tok = self.peek()
            if tok.kind is TokenKind.EOF:
                return
            if tok.kind is TokenKind.SEMI:
                self.advance()
                return
            if tok.kind is TokenKind.IDENT and tok.upper() in _SYNC_WORDS:
                return
            self.advance()

    def number(self, what: str = "number") -> float | None:
        tok = self.expect(TokenKind.NUMBER, what)
        return float(tok.text) if tok else None

    # -- grammar ------------------------------------------------------------

    def parse(self) -> _RawKb:
        while self.peek().kind is not TokenKind.EOF:
            if self.take_word("FUNCTION_BLOCK"):
                if self.peek().kind is TokenKind.IDENT and not self.at_word(*_SYNC_WORDS):
                    self.advance()  # optional function block name
                while self.peek().kind is not TokenKind.EOF and not self.at_word("END_FUNCTION_BLOCK"):
                    self.block_item()
                if not self.take_word("END_FUNCTION_BLOCK"):
                    self.error("missing END_FUNCTION_BLOCK")
                continue
            self.block_item()
        return self.kb

    def block_item(self) -> None:
        if not self.section():
            tok = self.peek()
            shown = tok.text or "end of input"
            self.error(f"unexpected {shown!r}, expected a declaration block or rule")
            self.advance()
            self.sync()

    def section(self) -> bool:
        """Dispatch one top-level block; False when the current token starts none."""
        if self.at_word("VAR_INPUT", "VAR_OUTPUT"):
            self.var_section()
            return True
        if self.at_word("FUZZIFY"):
            self.fuzzify_section()
            return True
        if self.at_word("DEFUZZIFY"):
            self.defuzzify_section()
            return True
        if self.at_word("RULEBLOCK"):
            self.ruleblock_section()
            return True
        if self.at_word("RULE"):
            rule = self.rule_statement()
            if rule is not None:
                self.kb.bare_rules.append(rule)
            return True
        return False

    def var_section(self) -> None:
        kw = self.advance()
        target = self.kb.inputs if kw.upper() == "VAR_INPUT" else self.kb.outputs
        while self.peek().kind is not TokenKind.EOF and not self.at_word("END_VAR"):
            name = self.expect(TokenKind.IDENT, "variable name")
            if name is None:
                self.sync()
                continue
            if name.upper() in _SYNC_WORDS:
                self.error(f"expected variable name, found {name.text!r}", name)
                self.sync()
                continue
            if self.expect(TokenKind.COLON) is None:
                self.sync()
                continue
            if self.expect_word("REAL") is None:
                self.sync()
                continue
            if self.expect(TokenKind.SEMI) is None:
                self.sync()
            target.append(name)
        if not self.take_word("END_VAR"):
            self.error(f"missing END_VAR for {kw.text}")

    def fuzzify_section(self) -> None:
        self.advance()
        var = self.expect(TokenKind.IDENT, "variable name")
        block = _RawVarBlock("fuzzify", var if var else self.peek())
        while self.peek().kind is not TokenKind.EOF and not self.at_word("END_FUZZIFY"):
            if self.at_word("TERM"):
                term = self.term_statement()
                if term:
                    block.terms.append(term)
            elif self.at_word("RANGE"):
                block.range_decl = self.range_statement() or block.range_decl
            else:
                tok = self.peek()
                self.error(f"unexpected {tok.text!r} in FUZZIFY block")
                self.advance()
                self.sync()
        if not self.take_word("END_FUZZIFY"):
            self.error("missing END_FUZZIFY")
        if var is not None:
            self.kb.var_blocks.append(block)

    def defuzzify_section(self) -> None:
        self.advance()
        var = self.expect(TokenKind.IDENT, "variable name")
        block = _RawVarBlock("defuzzify", var if var else self.peek())
        while self.peek().kind is not TokenKind.EOF and not self.at_word("END_DEFUZZIFY"):
            if self.at_word("TERM"):
                term = self.term_statement()
                if term:
                    block.terms.append(term)
            elif self.at_word("RANGE"):
                block.range_decl = self.range_statement() or block.range_decl
            elif self.at_word("ACCU"):
                tok = self.advance()
                value = self.setting_keyword(AccumulationMethod, "accumulation method")
                if value is not None:
                    if block.accu is not None:
                        self.error("duplicate ACCU setting", tok)
                    block.accu = value
            elif self.at_word("METHOD"):
                tok = self.advance()
                value = self.setting_keyword(DefuzzMethod, "defuzzification method")
                if value is not None:
                    if block.method is not None:
                        self.error("duplicate METHOD setting", tok)
                    block.method = value
                    block.method_tok = tok
            elif self.at_word("DEFAULT"):
                tok = self.advance()
                if self.expect(TokenKind.ASSIGN) is None:
                    self.sync()
                    continue
                if self.take_word("NC"):
                    value = None
                else:
                    value = self.number("default value or NC")
                    if value is None:
                        self.sync()
                        continue
                if self.expect(TokenKind.SEMI) is None:
                    self.sync()
                if block.has_default:
                    self.error("duplicate DEFAULT setting", tok)
                block.has_default = True
                block.default = value
            else:
                tok = self.peek()
                self.error(f"unexpected {tok.text!r} in DEFUZZIFY block")
                self.advance()
                self.sync()
        if not self.take_word("END_DEFUZZIFY"):
            self.error("missing END_DEFUZZIFY")
        if var is not None:
            self.kb.var_blocks.append(block)

    def setting_keyword(self, enum_cls, what: str):
        """`: KEYWORD ;` tail of ACCU/METHOD/AND/OR/ACT settings."""
        if self.expect(TokenKind.COLON) is None:
            self.sync()
            return None
        tok = self.expect(TokenKind.IDENT, what)
        if tok is None:
            self.sync()
            return None
        try:
            value = enum_cls(tok.upper())
        except ValueError:
            self.error(f"unknown {what} {tok.text!r}", tok)
            self.sync()
            return None
        if self.expect(TokenKind.SEMI) is None:
            self.sync()
        return value

    def term_statement(self) -> _RawTerm | None:
        self.advance()  # TERM
        name = self.expect(TokenKind.IDENT, "term name")
        if name is None or self.expect(TokenKind.ASSIGN) is None:
            self.sync()
            return None
        shape = self.term_shape()
        if shape is _SHAPE_ERROR:
            self.sync()
            return _RawTerm(name, None) if name else None
        if self.expect(TokenKind.SEMI) is None:
            self.sync()
        return _RawTerm(name, shape)

    def term_shape(self):
        tok = self.peek()
        if tok.kind is TokenKind.NUMBER:
            self.advance()
            return Singleton(float(tok.text))
        if tok.kind is TokenKind.IDENT and tok.upper() in _SHAPE_ARITY:
            return self.parametric_shape()
        if tok.kind is TokenKind.LPAREN:
            return self.point_list()
        shown = tok.text or str(tok.kind.value)
        self.error(f"expected a term shape (number, point list or shape keyword), found {shown!r}")
        return _SHAPE_ERROR

    def point_list(self):
        points = []
        while self.peek().kind is TokenKind.LPAREN:
            lparen = self.advance()
            x = self.number("x coordinate")
            if x is None or self.expect(TokenKind.COMMA) is None:
                return _SHAPE_ERROR
            mu = self.number("membership degree")
            if mu is None or self.expect(TokenKind.RPAREN, "')'") is None:
                return _SHAPE_ERROR
            points.append(((x, mu), lparen))
        try:
            return PiecewiseLinear(tuple(p for p, _ in points))
        except ValueError as exc:
            self.error(str(exc), points[0][1] if points else None)
            return None

    def parametric_shape(self):
        kw = self.advance()
        arity = _SHAPE_ARITY[kw.upper()]
        if self.expect(TokenKind.LPAREN, "'('") is None:
            return _SHAPE_ERROR
        args: list[float] = []
        for i in range(arity):
            if i and self.expect(TokenKind.COMMA) is None:
                return _SHAPE_ERROR
            value = self.number("shape parameter")
            if value is None:
                return _SHAPE_ERROR
            args.append(value)
        if self.expect(TokenKind.RPAREN, "')'") is None:
            return _SHAPE_ERROR
        try:
            if kw.upper() == "GAUSS":
                return Gaussian(*args)
            if kw.upper() == "GBELL":
                return GeneralizedBell(*args)
            if kw.upper() == "SIGM":
                return Sigmoidal(*args)
            if kw.upper() == "TRIAN":
                return Triangular(*args)
            return Trapezoidal(*args)
        except ValueError as exc:
            self.error(str(exc), kw)
            return None

    def range_statement(self) -> tuple[float, float] | None:
        self.advance()  # RANGE
        if self.expect(TokenKind.ASSIGN) is None:
            self.sync()
            return None
        if self.expect(TokenKind.LPAREN, "'('") is None:
            self.sync()
            return None
        lo = self.number("range lower bound")
        if lo is None or self.expect(TokenKind.DOTDOT, "'..'") is None:
            self.sync()
            return None
        hi = self.number("range upper bound")
        if hi is None or self.expect(TokenKind.RPAREN, "')'") is None:
            self.sync()
            return None
        if self.expect(TokenKind.SEMI) is None:
            self.sync()
        return (lo, hi)

    def ruleblock_section(self) -> None:
        kw = self.advance()
        name_tok = self.peek()
        if name_tok.kind is TokenKind.IDENT and name_tok.upper() not in _SYNC_WORDS:
            self.advance()
            name = name_tok.text
        else:
            name_tok = kw
            name = ""
        block = _RawRuleBlock(name, name_tok)
        while self.peek().kind is not TokenKind.EOF and not self.at_word("END_RULEBLOCK"):
            if self.at_word("AND"):
                self.advance()
                value = self.setting_keyword(AndMethod, "AND method")
                if value is not None:
                    block.and_method = value
            elif self.at_word("OR"):
                self.advance()
                value = self.setting_keyword(OrMethod, "OR method")
                if value is not None:
                    block.or_method = value
            elif self.at_word("ACT"):
                self.advance()
                value = self.setting_keyword(ActivationMethod, "activation method")
                if value is not None:
                    block.activation = value
            elif self.at_word("ACCU"):
                self.advance()
                value = self.setting_keyword(AccumulationMethod, "accumulation method")
                if value is not None:
                    block.accu = value
            elif self.at_word("RULE"):
                rule = self.rule_statement()
                if rule is not None:
                    block.rules.append(rule)
            else:
                tok = self.peek()
                self.error(f"unexpected {tok.text!r} in RULEBLOCK")
                self.advance()
                self.sync()
        if not self.take_word("END_RULEBLOCK"):
            self.error("missing END_RULEBLOCK")
        self.kb.rule_blocks.append(block)

    def rule_statement(self) -> _RawRule | None:
        self.advance()  # RULE
        label = self.peek()
        if label.kind in (TokenKind.IDENT, TokenKind.NUMBER):
            self.advance()
        else:
            self.error("expected rule number or name")
            self.sync()
            return None
        if self.expect(TokenKind.COLON) is None:
            self.sync()
            return None
        if self.expect_word("IF") is None:
            self.sync()
            return None
        antecedent = self.expression()
        if antecedent is None:
            self.sync()
            return None
        if self.expect_word("THEN") is None:
            self.sync()
            return None
        consequents: list[tuple[Token, Token]] = []
        weight = 1.0
        weight_tok: Token | None = None
        while True:
            var = self.expect(TokenKind.IDENT, "output variable name")
            if var is None or self.expect_word("IS") is None:
                self.sync()
                return None
            term = self.expect(TokenKind.IDENT, "term name")
            if term is None:
                self.sync()
                return None
            consequents.append((var, term))
            if self.take_word("AND"):
                continue
            break
        if self.take_word("WITH"):
            tok = self.peek()
            value = self.number("rule weight")
            if value is None:
                self.sync()
                return None
            weight = value
            weight_tok = tok
        if self.expect(TokenKind.SEMI) is None:
            self.sync()
        return _RawRule(label, antecedent, consequents, weight, weight_tok)

    # Expression grammar: NOT binds tighter than AND, AND tighter than OR.

    def expression(self):
        return self.or_expression()

    def or_expression(self):
        left = self.and_expression()
        if left is None:
            return None
        while self.take_word("OR"):
            right = self.and_expression()
            if right is None:
                return None
            left = ("or", left, right)
        return left

    def and_expression(self):
        left = self.unary_expression()
        if left is None:
            return None
        while self.take_word("AND"):
            right = self.unary_expression()
            if right is None:
                return None
            left = ("and", left, right)
        return left

    def unary_expression(self):
        if self.take_word("NOT"):
            operand = self.unary_expression()
            if operand is None:
                return None
            return ("not", operand)
        if self.peek().kind is TokenKind.LPAREN:
            self.advance()
            inner = self.expression()
            if inner is None:
                return None
            if self.expect(TokenKind.RPAREN, "')'") is None:
                return None
            return inner
        return self.atom()

    def atom(self):
        var = self.peek()
        if var.kind is not TokenKind.IDENT or var.upper() in _SYNC_WORDS:
            shown = var.text or str(var.kind.value)
            self.error(f"expected a condition, found {shown!r}")
            return None
        self.advance()
        if self.expect_word("IS") is None:
            return None
        hedges: list[Hedge] = []
        while self.peek().kind is TokenKind.IDENT and self.peek().upper() in _HEDGE_WORDS:
            hedges.append(_HEDGE_WORDS[self.advance().upper()])
        term = self.expect(TokenKind.IDENT, "term name")
        if term is None:
            return None
        return ("atom", _RawAtom(var, tuple(hedges), term))


_SHAPE_ERROR = object()  # sentinel: shape unparsable, statement already reported


# ---------------------------------------------------------------------------
# Linker


def _link(raw_kbs: list[_RawKb], diagnostics: list[Diagnostic]) -> RuleBase | None:
    def err(tok: Token, source: str, message: str) -> None:
        diagnostics.append(Diagnostic(Severity.ERROR, message, tok.line, tok.column, source))

    def warn(tok: Token, source: str, message: str) -> None:
        diagnostics.append(Diagnostic(Severity.WARNING, message, tok.line, tok.column, source))

    # Declared variables, in declaration order.
    declared: dict[str, tuple[VariableRole, Token, str]] = {}
    order: list[str] = []
    for kb in raw_kbs:
        for role, decls in ((VariableRole.INPUT, kb.inputs), (VariableRole.OUTPUT, kb.outputs)):
            for tok in decls:
                if tok.text in declared:
                    err(tok, kb.source_name, f"variable {tok.text!r} already declared")
                    continue
                declared[tok.text] = (role, tok, kb.source_name)
                order.append(tok.text)

    if not any(role is VariableRole.OUTPUT for role, _, _ in declared.values()):
        first = raw_kbs[0] if raw_kbs else None
        name = first.source_name if first else "<string>"
        diagnostics.append(Diagnostic(Severity.ERROR, "no output variable declared", 1, 1, name))

    # Attach FUZZIFY/DEFUZZIFY blocks to their variables.
    blocks: dict[str, tuple[_RawVarBlock, str]] = {}
    for kb in raw_kbs:
        for block in kb.var_blocks:
            name = block.var.text
            info = declared.get(name)
            if info is None:
                err(block.var, kb.source_name, f"{block.kind.upper()} block references undeclared variable {name!r}")
                continue
            role = info[0]
            if block.kind == "fuzzify" and role is not VariableRole.INPUT:
                err(block.var, kb.source_name, f"FUZZIFY block for non-input variable {name!r}")
                continue
            if block.kind == "defuzzify" and role is not VariableRole.OUTPUT:
                err(block.var, kb.source_name, f"DEFUZZIFY block for non-output variable {name!r}")
                continue
            if name in blocks:
                err(block.var, kb.source_name, f"duplicate {block.kind.upper()} block for variable {name!r}")
                continue
            blocks[name] = (block, kb.source_name)

    # A RULEBLOCK-level ACCU acts as fallback for outputs that declare none.
    fallback_accu: AccumulationMethod | None = None
    for kb in raw_kbs:
        for rb in kb.rule_blocks:
            if rb.accu is not None:
                fallback_accu = rb.accu
                break
        if fallback_accu is not None:
            break

    variables: dict[str, LinguisticVariable] = {}
    for name in order:
        role, decl_tok, decl_source = declared[name]
        entry = blocks.get(name)
        if entry is None:
            kind = "FUZZIFY" if role is VariableRole.INPUT else "DEFUZZIFY"
            err(decl_tok, decl_source, f"variable {name!r} has no {kind} block")
            continue
        block, source = entry
        terms: list[Term] = []
        seen: set[str] = set()
        for raw_term in block.terms:
            if raw_term.shape is None:
                continue  # shape error already reported
            tname = raw_term.name.text
            if tname in seen:
                err(raw_term.name, source, f"duplicate term {tname!r} in variable {name!r}")
                continue
            seen.add(tname)
            try:
                terms.append(Term(tname, raw_term.shape))
            except ValueError as exc:
                err(raw_term.name, source, str(exc))
        if not terms:
            err(block.var, source, f"variable {name!r} declares no terms")
            continue
        if block.range_decl is not None and not block.range_decl[0] < block.range_decl[1]:
            err(block.var, source, f"variable {name!r}: range requires lo < hi")
            continue
        try:
            universe = derive_universe(terms, block.range_decl)
        except ValueError as exc:
            err(block.var, source, str(exc))
            continue

        settings = None
        if role is VariableRole.OUTPUT:
            if block.method is None:
                err(block.var, source, f"output variable {name!r} declares no defuzzification METHOD")
                continue
            accu = block.accu or fallback_accu or AccumulationMethod.MAX
            settings = OutputSettings(block.method, accu, block.default)
            singletons = [t.mf.is_singleton for t in terms]
            if any(singletons) and not all(singletons):
                err(block.var, source, f"output variable {name!r} mixes singleton and polygonal terms")
                continue
            if block.method is DefuzzMethod.COGS and not all(singletons):
                err(block.var, source, f"output variable {name!r} uses COGS but has non-singleton terms")
                continue
            if block.method is DefuzzMethod.COG and all(singletons):
                warn(
                    block.method_tok or block.var,
                    source,
                    f"output variable {name!r} is all-singleton; COG integrates to zero area, use COGS",
                )
        try:
            variables[name] = LinguisticVariable(
                name=name,
                role=role,
                terms=tuple(terms),
                universe=universe,
                settings=settings,
                universe_declared=block.range_decl is not None,
            )
        except ValueError as exc:
            err(block.var, source, str(exc))

    # Rule blocks; bare rules form an implicit block.
    def link_expression(raw, source: str):
        kind = raw[0]
        if kind == "atom":
            ra: _RawAtom = raw[1]
            var = variables.get(ra.var.text)
            if var is None:
                if ra.var.text not in declared:
                    err(ra.var, source, f"unknown variable {ra.var.text!r} in rule condition")
                return None
            if var.role is not VariableRole.INPUT:
                err(ra.var, source, f"rule condition references output variable {ra.var.text!r}")
                return None
            if not var.has_term(ra.term.text):
                err(ra.term, source, f"variable {ra.var.text!r} has no term {ra.term.text!r}")
                return None
            return Atom(ra.var.text, ra.term.text, ra.hedges)
        if kind == "not":
            operand = link_expression(raw[1], source)
            return Not(operand) if operand is not None else None
        left = link_expression(raw[1], source)
        right = link_expression(raw[2], source)
        if left is None or right is None:
            return None
        return And(left, right) if kind == "and" else Or(left, right)

    def link_rule(raw: _RawRule, source: str, seen_labels: set[str]) -> Rule | None:
        label = raw.label.text
        if label in seen_labels:
            err(raw.label, source, f"duplicate rule label {label!r}")
            return None
        antecedent = link_expression(raw.antecedent, source)
        consequents: list[Consequent] = []
        bad = antecedent is None
        for var_tok, term_tok in raw.consequents:
            var = variables.get(var_tok.text)
            if var is None:
                if var_tok.text not in declared:
                    err(var_tok, source, f"unknown variable {var_tok.text!r} in rule conclusion")
                bad = True
                continue
            if var.role is not VariableRole.OUTPUT:
                err(var_tok, source, f"rule conclusion targets input variable {var_tok.text!r}")
                bad = True
                continue
            if not var.has_term(term_tok.text):
                err(term_tok, source, f"variable {var_tok.text!r} has no term {term_tok.text!r}")
                bad = True
                continue
            consequents.append(Consequent(var_tok.text, term_tok.text))
        if not 0.0 < raw.weight <= 1.0:
            err(raw.weight_tok or raw.label, source, f"rule weight {raw.weight} outside (0, 1]")
            bad = True
        if bad or not consequents:
            return None
        seen_labels.add(label)
        return Rule(label, antecedent, tuple(consequents), raw.weight)

    rule_blocks: list[RuleBlock] = []
    block_names: set[str] = set()

    def unique_block_name(base: str) -> str:
        if base and base not in block_names:
            return base
        base = base or "rules"
        candidate = base
        i = 1
        while candidate in block_names:
            i += 1
            candidate = f"{base}_{i}"
        return candidate

    for kb in raw_kbs:
        implicit: list[_RawRule] = list(kb.bare_rules)
        for raw_block in kb.rule_blocks:
            labels: set[str] = set()
            rules = [link_rule(r, kb.source_name, labels) for r in raw_block.rules]
            name = unique_block_name(raw_block.name)
            block_names.add(name)
            rule_blocks.append(
                RuleBlock(
                    name=name,
                    rules=tuple(r for r in rules if r is not None),
                    connectives=ConnectiveSet(raw_block.and_method, raw_block.or_method),
                    activation=raw_block.activation,
                )
            )
        if implicit:
            labels = set()
            rules = [link_rule(r, kb.source_name, labels) for r in implicit]
            name = unique_block_name("rules")
            block_names.add(name)
            rule_blocks.append(RuleBlock(name=name, rules=tuple(r for r in rules if r is not None)))

    if any(d.is_error for d in diagnostics):
        return None

    inputs = tuple(variables[n] for n in order if declared[n][0] is VariableRole.INPUT)
    outputs = tuple(variables[n] for n in order if declared[n][0] is VariableRole.OUTPUT)
    source_name = raw_kbs[0].source_name if len(raw_kbs) == 1 else "+".join(kb.source_name for kb in raw_kbs)
    try:
        return RuleBase(inputs, outputs, tuple(rule_blocks), source_name)
    except ValueError as exc:
        diagnostics.append(Diagnostic(Severity.ERROR, str(exc), 1, 1, source_name))
        return None


# ---------------------------------------------------------------------------
# Public entry points


def parse_sources(sources: Sequence[tuple[str, str]]) -> ParseResult:
    """Parse and link several named FCL sources as one knowledge base."""
    diagnostics: list[Diagnostic] = []
    raw = [_Parser(text, name, diagnostics).parse() for name, text in sources]
    rulebase = _link(raw, diagnostics)
    return ParseResult(rulebase, diagnostics)


def parse_fcl(source: str, source_name: str = "<string>") -> ParseResult:
    """Parse one FCL source into a linked RuleBase plus diagnostics."""
    return parse_sources([(source_name, source)])
