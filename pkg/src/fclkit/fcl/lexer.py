"""Tokenizer for the FCL dialect.

Keywords are matched case-insensitively by the parser; the lexer only
classifies raw shapes. Comments are `// ...` to end of line and `(* ... *)`
block comments. Numbers are signed decimals without exponent notation.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

from .diagnostics import Diagnostic, Severity


class TokenKind(enum.Enum):
    IDENT = "identifier"
    NUMBER = "number"
    LPAREN = "("
    RPAREN = ")"
    COMMA = ","
    SEMI = ";"
    COLON = ":"
    ASSIGN = ":="
    DOTDOT = ".."
    EOF = "end of input"


@dataclass(frozen=True)
class Token:
    kind: TokenKind
    text: str
    line: int
    column: int

    def upper(self) -> str:
        return self.text.upper()


_PUNCT = {
    "(": TokenKind.LPAREN,
    ")": TokenKind.RPAREN,
    ",": TokenKind.COMMA,
    ";": TokenKind.SEMI,
}


def tokenize(source: str, source_name: str, diagnostics: list[Diagnostic]) -> list[Token]:
    """Produce the token stream, appending lexical errors to ``diagnostics``.

    Unknown characters are reported once each and skipped, so parsing can
    continue and collect further errors.
    """
    tokens: list[Token] = []
    line = 1
    col = 1
    i = 0
    n = len(source)

    def error(msg: str, at_line: int, at_col: int):
        diagnostics.append(Diagnostic(Severity.ERROR, msg, at_line, at_col, source_name))

    while i < n:
        ch = source[i]
        if ch == "\n":
            line += 1
            col = 1
            i += 1
            continue
        if ch in " \t\r":
            i += 1
            col += 1
            continue
        if ch == "/" and source.startswith("//", i):
            while i < n and source[i] != "\n":
                i += 1
            continue
        if ch == "(" and source.startswith("(*", i):
            start_line, start_col = line, col
            i += 2
            col += 2
            while i < n and not source.startswith("*)", i):
                if source[i] == "\n":
                    line += 1
                    col = 1
                else:
                    col += 1
                i += 1
            if i >= n:
                error("unterminated block comment", start_line, start_col)
            else:
                i += 2
                col += 2
            continue
        if ch in _PUNCT:
            tokens.append(Token(_PUNCT[ch], ch, line, col))
            i += 1
            col += 1
            continue
        if ch == ":":
            if source.startswith(":=", i):
                tokens.append(Token(TokenKind.ASSIGN, ":=", line, col))
                i += 2
                col += 2
            else:
                tokens.append(Token(TokenKind.COLON, ":", line, col))
                i += 1
                col += 1
            continue
        if ch == ".":
            if source.startswith("..", i):
                tokens.append(Token(TokenKind.DOTDOT, "..", line, col))
                i += 2
                col += 2
                continue
            # fall through to number handling for a leading-dot fraction
        if ch.isdigit() or (ch in "+-." and i + 1 < n and (source[i + 1].isdigit() or source[i + 1] == ".")):
            start = i
            start_col = col
            if ch in "+-":
                i += 1
                col += 1
            digits_before = False
            while i < n and source[i].isdigit():
                i += 1
                col += 1
                digits_before = True
            digits_after = False
            if i < n and source[i] == "." and not source.startswith("..", i):
                i += 1
                col += 1
                while i < n and source[i].isdigit():
                    i += 1
                    col += 1
                    digits_after = True
            text = source[start:i]
            if not digits_before and not digits_after:
                error(f"malformed number {text!r}", line, start_col)
                continue
            tokens.append(Token(TokenKind.NUMBER, text, line, start_col))
            continue
        if ch.isalpha() or ch == "_":
            start = i
            start_col = col
            while i < n and (source[i].isalnum() or source[i] == "_"):
                i += 1
                col += 1
            tokens.append(Token(TokenKind.IDENT, source[start:i], line, start_col))
            continue
        error(f"unexpected character {ch!r}", line, col)
        i += 1
        col += 1

    tokens.append(Token(TokenKind.EOF, "", line, col))
    return tokens
