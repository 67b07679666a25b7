"""Textual grammar for type descriptors.

    scalar  := i8 u8 i16 u16 i32 u32 i64 u64 f32 f64 ptr cstr void
    array   := "[" COUNT "x" type "]"
    struct  := "{" name ":" type ("," name ":" type)* "}"
    union   := "union" "{" name ":" type ("," name ":" type)* "}"
    type    := scalar | array | struct | union | NAME

NAME resolves against a caller-supplied mapping of previously defined
type names (the CLI's deftype bindings); parsing with no mapping only
accepts the closed grammar above.
"""

from __future__ import annotations

import re

from . import ftypes
from .errors import FfiError, ScriptError
from .ftypes import TypeDescriptor

_TOKEN = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<number>-?\d+(?:\.\d+)?(?:[eE][+-]?\d+)?)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<string>"(?:\\.|[^"\\])*")
  | (?P<punct>[\[\]{}():,=])
    """,
    re.VERBOSE,
)

_ESCAPES = {"n": "\n", "t": "\t", "r": "\r", '"': '"', "\\": "\\", "0": "\x00"}


class Token:
    __slots__ = ("kind", "text", "column")

    def __init__(self, kind: str, text: str, column: int):
        self.kind = kind
        self.text = text
        self.column = column

    def __repr__(self) -> str:
        return f"Token({self.kind}, {self.text!r})"


def tokenize(text: str, line: int | None = None) -> list[Token]:
    tokens = []
    pos = 0
    while pos < len(text):
        if text[pos] == "#":
            break
        m = _TOKEN.match(text, pos)
        if m is None:
            raise ScriptError(f"unexpected character {text[pos]!r}", line=line, column=pos + 1)
        if m.lastgroup != "ws":
            tokens.append(Token(m.lastgroup, m.group(), pos + 1))
        pos = m.end()
    return tokens


def unquote(raw: str) -> str:
    out = []
    i = 1
    while i < len(raw) - 1:
        ch = raw[i]
        if ch == "\\":
            i += 1
            out.append(_ESCAPES.get(raw[i], raw[i]))
        else:
            out.append(ch)
        i += 1
    return "".join(out)


class TokenStream:
    def __init__(self, tokens: list[Token], line: int | None = None):
        self.tokens = tokens
        self.index = 0
        self.line = line

    def peek(self) -> Token | None:
        return self.tokens[self.index] if self.index < len(self.tokens) else None

    def next(self) -> Token:
        tok = self.peek()
        if tok is None:
            raise ScriptError("unexpected end of input", line=self.line)
        self.index += 1
        return tok

    def expect(self, text: str) -> Token:
        tok = self.next()
        if tok.text != text:
            raise ScriptError(
                f"expected {text!r}, found {tok.text!r}", line=self.line, column=tok.column
            )
        return tok

    def at_end(self) -> bool:
        return self.index >= len(self.tokens)

    def error(self, message: str) -> ScriptError:
        tok = self.peek()
        return ScriptError(message, line=self.line,
                           column=tok.column if tok else None)


def parse_type_stream(stream: TokenStream, names=None) -> TypeDescriptor:
    tok = stream.next()
    if tok.kind == "ident":
        if tok.text in ftypes.SCALARS:
            return ftypes.SCALARS[tok.text]
        if tok.text == "union":
            stream.expect("{")
            return _parse_members(stream, names, union=True)
        if names and tok.text in names:
            return names[tok.text]
        raise ScriptError(f"unknown type name {tok.text!r}",
                          line=stream.line, column=tok.column)
    if tok.text == "[":
        count_tok = stream.next()
        if count_tok.kind != "number" or not count_tok.text.lstrip("-").isdigit():
            raise ScriptError("array count must be an integer",
                              line=stream.line, column=count_tok.column)
        count = int(count_tok.text)
        x_tok = stream.next()
        if x_tok.text != "x":
            raise ScriptError(f"expected 'x' in array type, found {x_tok.text!r}",
                              line=stream.line, column=x_tok.column)
        element = parse_type_stream(stream, names)
        stream.expect("]")
        try:
            return ftypes.make_array(element, count)
        except (ValueError, FfiError) as exc:
            raise ScriptError(str(exc), line=stream.line, column=tok.column) from exc
    if tok.text == "{":
        return _parse_members(stream, names, union=False)
    raise ScriptError(f"expected a type, found {tok.text!r}",
                      line=stream.line, column=tok.column)


def _parse_members(stream: TokenStream, names, union: bool) -> TypeDescriptor:
    members = []
    while True:
        name_tok = stream.next()
        if name_tok.kind != "ident":
            raise ScriptError("expected a field name",
                              line=stream.line, column=name_tok.column)
        stream.expect(":")
        members.append((name_tok.text, parse_type_stream(stream, names)))
        sep = stream.next()
        if sep.text == "}":
            break
        if sep.text != ",":
            raise ScriptError(f"expected ',' or '}}', found {sep.text!r}",
                              line=stream.line, column=sep.column)
    try:
        return ftypes.make_union(members) if union else ftypes.make_struct(members)
    except (ValueError, FfiError) as exc:
        raise ScriptError(str(exc), line=stream.line) from exc


def parse_type(text: str, names=None) -> TypeDescriptor:
    """Parse a complete type expression; trailing input is an error."""
    stream = TokenStream(tokenize(text))
    t = parse_type_stream(stream, names)
    if not stream.at_end():
        raise stream.error("trailing input after type expression")
    return t


def format_type(t: TypeDescriptor) -> str:
    """Canonical grammar rendering (str(t) delegates to the same form)."""
    return str(t)
