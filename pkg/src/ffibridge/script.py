"""Line-oriented script language for driving the FFI from the CLI.

One statement per line; '#' starts a comment.  Statement forms:

    openlib NAME = "library" [path "/explicit/file.so"]
    deftype NAME = TYPE
    defn    NAME = fn("symbol") RET(ARG, ...)
    defn    NAME = fn(LIB, "symbol") RET(ARG, ...)
    set     NAME = TYPE LITERAL
    call    NAME = FUNCTION(ARG, ...)
    print   NAME
    print   sizeof(TYPE-or-NAME)
    release NAME

TYPE uses the grammar in typeexpr (plus names bound by deftype).
Literals: integers, reals, "strings", null, [list, ...] and
{field: literal, ...} records.  Call arguments are literals or names
bound by set/call.  A script is fully validated (names, arity of
binding forms) before any statement executes, so a misspelled name in
the last line prevents the first foreign call.

Printing is deterministic by construction: integers render exactly,
reals with up to 15 significant digits, and machine addresses render as
"<address>", never as a number.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from . import calling, typeexpr
from .codec import Address, ForeignValue
from .errors import FfiError, ScriptError
from .ftypes import Kind, TypeDescriptor
from .loader import LibraryHandle, open_library
from .memory import MemoryArena
from .typeexpr import Token, TokenStream, tokenize, unquote


@dataclass
class Statement:
    kind: str
    line: int
    name: str | None = None
    text: str | None = None          # openlib library name / defn symbol
    path: str | None = None          # openlib explicit path
    lib: str | None = None           # defn library reference
    type_tokens: list = field(default_factory=list)
    ret_tokens: list = field(default_factory=list)
    param_tokens: list = field(default_factory=list)   # list of token lists
    literal: object = None
    fn: str | None = None
    args: list = field(default_factory=list)
    target: tuple | None = None      # print target


def _parse_literal(stream: TokenStream):
    tok = stream.next()
    if tok.kind == "number":
        text = tok.text
        if any(c in text for c in ".eE"):
            return float(text)
        return int(text)
    if tok.kind == "string":
        return unquote(tok.text)
    if tok.kind == "ident" and tok.text == "null":
        return None
    if tok.text == "[":
        items = []
        if stream.peek() and stream.peek().text == "]":
            stream.next()
            return items
        while True:
            items.append(_parse_literal(stream))
            sep = stream.next()
            if sep.text == "]":
                return items
            if sep.text != ",":
                raise ScriptError(f"expected ',' or ']', found {sep.text!r}",
                                  line=stream.line, column=sep.column)
    if tok.text == "{":
        record = {}
        while True:
            key = stream.next()
            if key.kind != "ident":
                raise ScriptError("expected a field name",
                                  line=stream.line, column=key.column)
            stream.expect(":")
            record[key.text] = _parse_literal(stream)
            sep = stream.next()
            if sep.text == "}":
                return record
            if sep.text != ",":
                raise ScriptError(f"expected ',' or '}}', found {sep.text!r}",
                                  line=stream.line, column=sep.column)
    raise ScriptError(f"expected a literal, found {tok.text!r}",
                      line=stream.line, column=tok.column)


def _collect_type_tokens(stream: TokenStream) -> list[Token]:
    """Consume one type expression, returning its tokens (balanced for
    composites, a single token for scalars and names)."""
    start = stream.index
    depth = 0
    first = stream.next()
    if first.text in ("[", "{"):
        depth = 1
    elif first.kind == "ident" and first.text == "union":
        stream.expect("{")
        depth = 1
    elif first.kind == "ident":
        return stream.tokens[start:stream.index]
    else:
        raise ScriptError(f"expected a type, found {first.text!r}",
                          line=stream.line, column=first.column)
    while depth > 0:
        tok = stream.next()
        if tok.text in ("[", "{"):
            depth += 1
        elif tok.text in ("]", "}"):
            depth -= 1
    return stream.tokens[start:stream.index]


def _expect_ident(stream: TokenStream, what: str) -> str:
    tok = stream.next()
    if tok.kind != "ident":
        raise ScriptError(f"expected {what}, found {tok.text!r}",
                          line=stream.line, column=tok.column)
    return tok.text


def parse_line(line_text: str, line_number: int) -> Statement | None:
    tokens = tokenize(line_text, line=line_number)
    if not tokens:
        return None
    stream = TokenStream(tokens, line=line_number)
    keyword = stream.next()
    if keyword.kind != "ident":
        raise ScriptError(f"expected a statement keyword, found {keyword.text!r}",
                          line=line_number, column=keyword.column)
    kind = keyword.text

    if kind == "openlib":
        name = _expect_ident(stream, "a library binding name")
        stream.expect("=")
        lib_tok = stream.next()
        if lib_tok.kind != "string":
            raise ScriptError("expected a quoted library name",
                              line=line_number, column=lib_tok.column)
        stmt = Statement(kind=kind, line=line_number, name=name,
                         text=unquote(lib_tok.text))
        nxt = stream.peek()
        if nxt is not None and nxt.kind == "ident" and nxt.text == "path":
            stream.next()
            path_tok = stream.next()
            if path_tok.kind != "string":
                raise ScriptError("expected a quoted path",
                                  line=line_number, column=path_tok.column)
            stmt.path = unquote(path_tok.text)
    elif kind == "deftype":
        name = _expect_ident(stream, "a type name")
        stream.expect("=")
        stmt = Statement(kind=kind, line=line_number, name=name,
                         type_tokens=_collect_type_tokens(stream))
    elif kind == "defn":
        name = _expect_ident(stream, "a function binding name")
        stream.expect("=")
        fn_tok = stream.next()
        if fn_tok.text != "fn":
            raise ScriptError("expected fn(...)", line=line_number, column=fn_tok.column)
        stream.expect("(")
        first = stream.next()
        lib = None
        if first.kind == "ident":
            lib = first.text
            stream.expect(",")
            first = stream.next()
        if first.kind != "string":
            raise ScriptError("expected a quoted symbol name",
                              line=line_number, column=first.column)
        symbol = unquote(first.text)
        stream.expect(")")
        ret_tokens = _collect_type_tokens(stream)
        stream.expect("(")
        param_tokens = []
        nxt = stream.peek()
        if nxt is not None and nxt.text == ")":
            stream.next()
        else:
            while True:
                param_tokens.append(_collect_type_tokens(stream))
                sep = stream.next()
                if sep.text == ")":
                    break
                if sep.text != ",":
                    raise ScriptError(f"expected ',' or ')', found {sep.text!r}",
                                      line=line_number, column=sep.column)
        stmt = Statement(kind=kind, line=line_number, name=name, text=symbol,
                         lib=lib, ret_tokens=ret_tokens, param_tokens=param_tokens)
    elif kind == "set":
        name = _expect_ident(stream, "a value binding name")
        stream.expect("=")
        type_tokens = _collect_type_tokens(stream)
        literal = _parse_literal(stream)
        stmt = Statement(kind=kind, line=line_number, name=name,
                         type_tokens=type_tokens, literal=literal)
    elif kind == "call":
        name = _expect_ident(stream, "a result binding name")
        stream.expect("=")
        fn = _expect_ident(stream, "a function name")
        stream.expect("(")
        args = []
        nxt = stream.peek()
        if nxt is not None and nxt.text == ")":
            stream.next()
        else:
            while True:
                arg_tok = stream.peek()
                if arg_tok is not None and arg_tok.kind == "ident" and arg_tok.text != "null":
                    stream.next()
                    args.append(("name", arg_tok.text))
                else:
                    args.append(("literal", _parse_literal(stream)))
                sep = stream.next()
                if sep.text == ")":
                    break
                if sep.text != ",":
                    raise ScriptError(f"expected ',' or ')', found {sep.text!r}",
                                      line=line_number, column=sep.column)
        stmt = Statement(kind=kind, line=line_number, name=name, fn=fn, args=args)
    elif kind == "print":
        tok = stream.next()
        if tok.kind == "ident" and tok.text == "sizeof":
            stream.expect("(")
            type_tokens = _collect_type_tokens(stream)
            stream.expect(")")
            stmt = Statement(kind=kind, line=line_number,
                             target=("sizeof", type_tokens))
        elif tok.kind == "ident":
            stmt = Statement(kind=kind, line=line_number, target=("name", tok.text))
        else:
            raise ScriptError("expected a name or sizeof(...)",
                              line=line_number, column=tok.column)
    elif kind == "release":
        stmt = Statement(kind=kind, line=line_number,
                         name=_expect_ident(stream, "a binding name"))
    else:
        raise ScriptError(f"unknown statement {kind!r}",
                          line=line_number, column=keyword.column)

    if not stream.at_end():
        raise stream.error("trailing input after statement")
    return stmt


def parse_script(text: str) -> list[Statement]:
    statements = []
    for line_number, line_text in enumerate(text.splitlines(), start=1):
        stmt = parse_line(line_text, line_number)
        if stmt is not None:
            statements.append(stmt)
    return statements


class _Names:
    """Static binding environment used by validation.  Type construction
    is pure, so deftype statements are evaluated here to real descriptors;
    nothing with side effects runs during validation."""

    def __init__(self):
        self.libs: set[str] = set()
        self.types: dict[str, TypeDescriptor] = {}
        self.fns: set[str] = set()
        self.vals: set[str] = set()


def validate(statements: Sequence[Statement], names: _Names | None = None) -> None:
    """Check every name is bound before use and every type expression is
    well formed; raises ScriptError without executing anything."""
    names = names or _Names()

    def check_type(tokens, line) -> TypeDescriptor:
        stream = TokenStream(list(tokens), line=line)
        t = typeexpr.parse_type_stream(stream, names.types)
        if not stream.at_end():
            raise stream.error("trailing input after type expression")
        return t

    for stmt in statements:
        if stmt.kind == "openlib":
            names.libs.add(stmt.name)
        elif stmt.kind == "deftype":
            names.types[stmt.name] = check_type(stmt.type_tokens, stmt.line)
        elif stmt.kind == "defn":
            if stmt.lib is not None and stmt.lib not in names.libs:
                raise ScriptError(f"unknown library {stmt.lib!r}", line=stmt.line)
            check_type(stmt.ret_tokens, stmt.line)
            for tokens in stmt.param_tokens:
                check_type(tokens, stmt.line)
            names.fns.add(stmt.name)
        elif stmt.kind == "set":
            check_type(stmt.type_tokens, stmt.line)
            names.vals.add(stmt.name)
        elif stmt.kind == "call":
            if stmt.fn not in names.fns:
                raise ScriptError(f"unknown function {stmt.fn!r}", line=stmt.line)
            for kind, value in stmt.args:
                if kind == "name" and value not in names.vals:
                    raise ScriptError(f"unknown value {value!r}", line=stmt.line)
            names.vals.add(stmt.name)
        elif stmt.kind == "print":
            if stmt.target[0] == "name":
                target = stmt.target[1]
                if target not in names.vals and target not in names.libs:
                    raise ScriptError(f"unknown name {target!r}", line=stmt.line)
            else:
                check_type(stmt.target[1], stmt.line)
        elif stmt.kind == "release":
            if stmt.name not in names.libs and stmt.name not in names.vals:
                raise ScriptError(f"unknown name {stmt.name!r}", line=stmt.line)


def render_value(value) -> str:
    if value is None:
        return "null"
    if isinstance(value, Address):
        return "<address>"
    if isinstance(value, bool):
        return "1" if value else "0"
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        return format(value, ".15g")
    if isinstance(value, str):
        return value
    if isinstance(value, list):
        return "[" + ", ".join(render_value(v) for v in value) + "]"
    if isinstance(value, dict):
        return "{" + ", ".join(f"{k}: {render_value(v)}" for k, v in value.items()) + "}"
    return str(value)


class Interpreter:
    """Executes parsed statements against live bindings.

    Owns one arena for boxed values; close() releases everything that is
    still alive, newest first.
    """

    def __init__(self):
        self.arena = MemoryArena()
        self.libs: dict[str, LibraryHandle] = {}
        self.types: dict[str, TypeDescriptor] = {}
        self.fns: dict[str, calling.ForeignFunction] = {}
        self.vals: dict[str, tuple] = {}   # name -> ("fv", ForeignValue) | ("host", value, type)

    def close(self) -> None:
        self.arena.release()
        for lib in reversed(list(self.libs.values())):
            lib.close()
        self.libs.clear()

    def __enter__(self) -> "Interpreter":
        return self

    def __exit__(self, *exc) -> None:
        self.close()

    def names(self) -> _Names:
        snapshot = _Names()
        snapshot.libs = set(self.libs)
        snapshot.types = dict(self.types)
        snapshot.fns = set(self.fns)
        snapshot.vals = set(self.vals)
        return snapshot

    def _parse_type(self, tokens, line) -> TypeDescriptor:
        stream = TokenStream(list(tokens), line=line)
        t = typeexpr.parse_type_stream(stream, self.types)
        if not stream.at_end():
            raise stream.error("trailing input after type expression")
        return t

    def execute(self, stmt: Statement) -> list[str]:
        """Run one statement; returns transcript lines it produced."""
        out: list[str] = []
        if stmt.kind == "openlib":
            handle = open_library(stmt.text, explicit_path=stmt.path)
            self.libs[stmt.name] = handle
        elif stmt.kind == "deftype":
            self.types[stmt.name] = self._parse_type(stmt.type_tokens, stmt.line)
        elif stmt.kind == "defn":
            lib = self.libs[stmt.lib] if stmt.lib is not None else None
            ret = self._parse_type(stmt.ret_tokens, stmt.line)
            params = [self._parse_type(toks, stmt.line) for toks in stmt.param_tokens]
            self.fns[stmt.name] = calling.foreign_function(
                stmt.text, ret, params, lib=lib)
        elif stmt.kind == "set":
            t = self._parse_type(stmt.type_tokens, stmt.line)
            self.vals[stmt.name] = ("fv", self.arena.box(stmt.literal, t))
        elif stmt.kind == "call":
            fn = self.fns[stmt.fn]
            args = []
            for kind, value in stmt.args:
                if kind == "literal":
                    args.append(value)
                else:
                    bound = self.vals[value]
                    args.append(bound[1])
            result = fn.invoke(args)
            self.vals[stmt.name] = ("host", result, fn.return_type)
        elif stmt.kind == "print":
            out.append(self._render_print(stmt))
        elif stmt.kind == "release":
            if stmt.name in self.libs:
                self.libs.pop(stmt.name).close()
            else:
                tag = self.vals.pop(stmt.name)
                if tag[0] == "fv" and tag[1].owner is not None:
                    tag[1].owner.release()
        return out

    def _render_print(self, stmt: Statement) -> str:
        what = stmt.target[0]
        if what == "sizeof":
            t = self._parse_type(stmt.target[1], stmt.line)
            label = "".join(tok.text for tok in stmt.target[1])
            return f"sizeof({label}) = {t.size} : u64"
        name = stmt.target[1]
        if name in self.libs:
            return f"{name} = {self.libs[name].name} : library"
        tag = self.vals[name]
        if tag[0] == "fv":
            fv: ForeignValue = tag[1]
            if fv.type.kind is Kind.UNION:
                return f"{name} = <union> : {fv.type}"
            return f"{name} = {render_value(fv.decode())} : {fv.type}"
        _, value, t = tag
        rendered = render_value(value) if t.kind is not Kind.VOID else "null"
        return f"{name} = {rendered} : {t}"


def run_statements(statements: Sequence[Statement], interp: Interpreter,
                   emit) -> None:
    """Execute validated statements, passing transcript lines to emit.
    Execution errors carry the statement index and source line."""
    for index, stmt in enumerate(statements):
        try:
            lines = interp.execute(stmt)
        except ScriptError:
            raise
        except FfiError as exc:
            raise ScriptError(f"{stmt.kind} failed: {exc}",
                              line=stmt.line, statement=index) from exc
        for line in lines:
            emit(line)


def run_script(text: str, emit=None) -> str:
    """Parse, validate, and execute a script; returns the transcript.

    `emit`, when given, receives each transcript line as it is produced
    (the CLI uses this to interleave with foreign output).
    """
    transcript: list[str] = []

    def record(line: str) -> None:
        transcript.append(line)
        if emit is not None:
            emit(line)

    statements = parse_script(text)
    validate(statements)
    with Interpreter() as interp:
        run_statements(statements, interp, record)
    return "".join(line + "\n" for line in transcript)
