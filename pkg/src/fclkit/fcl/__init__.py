"""FCL frontend: lexer, parser/linker, diagnostics and pretty-printer."""

from .diagnostics import Diagnostic, Severity
from .parser import ParseResult, parse_fcl, parse_sources
from .printer import pretty_print

__all__ = ["Diagnostic", "ParseResult", "Severity", "parse_fcl", "parse_sources", "pretty_print"]
