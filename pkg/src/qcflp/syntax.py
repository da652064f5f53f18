"""Concrete syntax: lexer, parser, pretty-printer and validation.

Source programs are lists of declarations and rewrite rules:

    type pages, id = int
    data level = easy | medium | difficult
    f(X, c(Y)) -0.9-> rhs <== cond1, cond2

Rules may carry an attenuation factor between the dashes of the arrow;
a plain ``-->`` means the top factor.  Uppercase or underscore-initial
identifiers are variables, lowercase identifiers are symbols, strings
are character lists, ``[a, b]`` and ``H:T`` are list sugar.  Line
comments start with ``--``.

Goals are threshold-annotated constraint conjunctions:

    (search("German", "Essay", intermediate) == R) # W | W >= 0.65

The printer emits canonical text that parses back to a structurally
equal syntax tree.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Optional

from .domains import MalformedValueError, QualDomain, U
from .terms import (App, AtomicConstraint, Basic, Bottom, BOTTOM, BUILTIN_PF,
                    Expr, FALSE, Signature, SignatureError, TRUE, Var,
                    char_atom, format_real, is_char_atom, is_term, mklist,
                    mkstring, vars_of)

RESERVED = {"type", "data"}


# ======================================================================
# Diagnostics
# ======================================================================

@dataclass(frozen=True)
class Diagnostic:
    line: int
    col: int
    message: str

    def __str__(self):
        return f"{self.line}:{self.col}: {self.message}"


class ParseError(Exception):
    def __init__(self, diagnostics):
        self.diagnostics = list(diagnostics)
        super().__init__("; ".join(map(str, self.diagnostics)))


def _fail(line: int, col: int, message: str):
    raise ParseError([Diagnostic(line, col, message)])


# ======================================================================
# Lexer
# ======================================================================

@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    line: int
    col: int


_NUMBER = re.compile(r"\d+(\.\d+)?([eE][+-]?\d+)?")
_IDENT = re.compile(r"[a-z][A-Za-z0-9_']*")
_VAR = re.compile(r"[A-Z_][A-Za-z0-9_']*(\.[0-9]+)*")
_STRING = re.compile(r'"(\\.|[^"\\])*"')
_CHAR = re.compile(r"'(\\.|[^'\\])'")

_PUNCT = ["<==", "-->", "->", "::", "==", "/=", "<=", ">=",
          "<", ">", "+", "-", "*", ":", "=", "|", "#",
          "(", ")", "[", "]", ","]


def lex(text: str) -> list:
    tokens = []
    i, line, col = 0, 1, 1
    n = len(text)
    while i < n:
        c = text[i]
        if c == "\n":
            i += 1
            line += 1
            col = 1
            continue
        if c in " \t\r":
            i += 1
            col += 1
            continue
        if text.startswith("--", i) and not text.startswith("-->", i):
            while i < n and text[i] != "\n":
                i += 1
            continue
        if text.startswith("_|_", i):
            tokens.append(Token("BOTTOM", "_|_", line, col))
            i += 3
            col += 3
            continue
        m = _NUMBER.match(text, i)
        if m:
            tokens.append(Token("NUMBER", m.group(), line, col))
            col += m.end() - i
            i = m.end()
            continue
        m = _STRING.match(text, i)
        if m:
            tokens.append(Token("STRING", m.group(), line, col))
            col += m.end() - i
            i = m.end()
            continue
        m = _CHAR.match(text, i)
        if m:
            tokens.append(Token("CHAR", m.group(), line, col))
            col += m.end() - i
            i = m.end()
            continue
        m = _IDENT.match(text, i)
        if m:
            tokens.append(Token("IDENT", m.group(), line, col))
            col += m.end() - i
            i = m.end()
            continue
        m = _VAR.match(text, i)
        if m:
            tokens.append(Token("VAR", m.group(), line, col))
            col += m.end() - i
            i = m.end()
            continue
        for p in _PUNCT:
            if text.startswith(p, i):
                tokens.append(Token(p, p, line, col))
                i += len(p)
                col += len(p)
                break
        else:
            _fail(line, col, f"unexpected character {c!r}")
    tokens.append(Token("EOF", "", line, col))
    return tokens


def _unescape(body: str) -> str:
    out = []
    i = 0
    while i < len(body):
        c = body[i]
        if c == "\\" and i + 1 < len(body):
            nxt = body[i + 1]
            out.append({"n": "\n", "t": "\t"}.get(nxt, nxt))
            i += 2
        else:
            out.append(c)
            i += 1
    return "".join(out)


def _escape(body: str, quote: str) -> str:
    out = []
    for c in body:
        if c == "\\" or c == quote:
            out.append("\\" + c)
        elif c == "\n":
            out.append("\\n")
        elif c == "\t":
            out.append("\\t")
        else:
            out.append(c)
    return "".join(out)


# ======================================================================
# Syntax trees for programs and goals
# ======================================================================

@dataclass(frozen=True)
class ProgramRule:
    name: str
    patterns: tuple
    attenuation: object          # float or nested pair, validated per domain
    rhs: Expr
    conditions: tuple            # of AtomicConstraint
    line: int = field(default=0, compare=False)


@dataclass
class Program:
    signature: Signature
    rules: list

    def __eq__(self, other):
        return isinstance(other, Program) and self.signature == other.signature \
            and self.rules == other.rules

    def rules_for(self, symbol: str) -> list:
        return [(i, r) for i, r in enumerate(self.rules) if r.name == symbol]


@dataclass(frozen=True)
class GoalItem:
    constraint: AtomicConstraint
    wvar: str
    threshold: object = None     # raw qualification literal, or None


@dataclass(frozen=True)
class Goal:
    items: tuple


# ======================================================================
# Parser
# ======================================================================

class _Parser:
    def __init__(self, text: str):
        self.tokens = lex(text)
        self.pos = 0
        self.anon = 0

    # -- token plumbing ------------------------------------------------

    def peek(self, k: int = 0) -> Token:
        return self.tokens[min(self.pos + k, len(self.tokens) - 1)]

    def next(self) -> Token:
        t = self.tokens[self.pos]
        if t.kind != "EOF":
            self.pos += 1
        return t

    def expect(self, kind: str) -> Token:
        t = self.peek()
        if t.kind != kind:
            _fail(t.line, t.col, f"expected {kind!r}, found {t.text!r}")
        return self.next()

    def at(self, kind: str) -> bool:
        return self.peek().kind == kind

    # -- expressions -----------------------------------------------------

    def parse_expr(self) -> Expr:
        return self.parse_cmp()

    def parse_cmp(self) -> Expr:
        lhs = self.parse_cons()
        t = self.peek()
        if t.kind in ("==", "/=", "<=", "<", ">=", ">"):
            self.next()
            rhs = self.parse_cons()
            if t.kind == "/=":
                return App("==", (App("==", (lhs, rhs)), FALSE))
            return App(t.kind, (lhs, rhs))
        return lhs

    def parse_cons(self) -> Expr:
        head = self.parse_add()
        if self.at(":"):
            self.next()
            tail = self.parse_cons()
            return App(":", (head, tail))
        return head

    def parse_add(self) -> Expr:
        e = self.parse_mul()
        while self.peek().kind in ("+", "-"):
            op = self.next().kind
            e = App(op, (e, self.parse_mul()))
        return e

    def parse_mul(self) -> Expr:
        e = self.parse_atom()
        while self.at("*"):
            self.next()
            e = App("*", (e, self.parse_atom()))
        return e

    def parse_atom(self) -> Expr:
        t = self.peek()
        if t.kind == "NUMBER":
            self.next()
            return Basic(float(t.text))
        if t.kind == "-" and self.peek(1).kind == "NUMBER":
            self.next()
            num = self.next()
            return Basic(-float(num.text))
        if t.kind == "STRING":
            self.next()
            return mkstring(_unescape(t.text[1:-1]))
        if t.kind == "CHAR":
            self.next()
            return char_atom(_unescape(t.text[1:-1]))
        if t.kind == "BOTTOM":
            self.next()
            return BOTTOM
        if t.kind == "VAR":
            self.next()
            if t.text == "_":
                self.anon += 1
                return Var(f"_u{self.anon}")
            return Var(t.text)
        if t.kind == "IDENT":
            if t.text in RESERVED:
                _fail(t.line, t.col, f"reserved word {t.text!r} cannot be used in an expression")
            self.next()
            if self.at("("):
                self.next()
                args = [self.parse_expr()]
                while self.at(","):
                    self.next()
                    args.append(self.parse_expr())
                self.expect(")")
                return App(t.text, tuple(args))
            return App(t.text)
        if t.kind == "(":
            self.next()
            e = self.parse_expr()
            self.expect(")")
            return e
        if t.kind == "[":
            self.next()
            items = []
            if not self.at("]"):
                items.append(self.parse_expr())
                while self.at(","):
                    self.next()
                    items.append(self.parse_expr())
            self.expect("]")
            return mklist(items)
        _fail(t.line, t.col, f"unexpected token {t.text!r}")

    # -- constraints -----------------------------------------------------

    def parse_constraint(self) -> AtomicConstraint:
        t = self.peek()
        e = self.parse_cmp()
        c = classify_constraint(e)
        if c is None:
            _fail(t.line, t.col, "expected an atomic constraint")
        return c

    def parse_constraint_list(self) -> list:
        out = [self.parse_constraint()]
        while self.at(","):
            self.next()
            out.append(self.parse_constraint())
        return out

    # -- qualification literals -------------------------------------------

    def parse_qual_literal(self):
        t = self.peek()
        if t.kind == "NUMBER":
            self.next()
            return float(t.text)
        if t.kind == "(":
            self.next()
            left = self.parse_qual_literal()
            self.expect(",")
            right = self.parse_qual_literal()
            self.expect(")")
            return (left, right)
        _fail(t.line, t.col, f"expected a qualification value, found {t.text!r}")

    # -- declarations and rules ---------------------------------------------

    def parse_type_expr(self):
        t = self.peek()
        if t.kind in ("IDENT", "VAR"):
            self.next()
        elif t.kind == "[":
            self.next()
            self.parse_type_expr()
            self.expect("]")
        elif t.kind == "(":
            self.next()
            self.parse_type_expr()
            while self.at(","):
                self.next()
                self.parse_type_expr()
            self.expect(")")
        else:
            _fail(t.line, t.col, f"expected a type, found {t.text!r}")
        if self.at("->"):
            self.next()
            self.parse_type_expr()

    def parse_program_items(self):
        decls = []  # (ctor, arity)
        rules = []
        while not self.at("EOF"):
            t = self.peek()
            if t.kind == "IDENT" and t.text == "type":
                self.next()
                self.expect("IDENT")
                while self.at(","):
                    self.next()
                    self.expect("IDENT")
                self.expect("=")
                self.parse_type_expr()
                continue
            if t.kind == "IDENT" and t.text == "data":
                self.next()
                self.expect("IDENT")
                self.expect("=")
                while True:
                    ctor = self.expect("IDENT")
                    arity = 0
                    if self.at("("):
                        self.next()
                        self.parse_type_expr()
                        arity = 1
                        while self.at(","):
                            self.next()
                            self.parse_type_expr()
                            arity += 1
                        self.expect(")")
                    decls.append((ctor.text, arity, ctor.line, ctor.col))
                    if self.at("|"):
                        self.next()
                        continue
                    break
                continue
            if t.kind == "IDENT" and self.peek(1).kind == "::":
                self.next()
                self.next()
                self.parse_type_expr()
                continue
            if t.kind == "IDENT":
                rules.append(self.parse_rule())
                continue
            _fail(t.line, t.col, f"expected a declaration or rule, found {t.text!r}")
        return decls, rules

    def parse_rule(self) -> ProgramRule:
        head = self.expect("IDENT")
        patterns = []
        if self.at("("):
            self.next()
            patterns.append(self.parse_expr())
            while self.at(","):
                self.next()
                patterns.append(self.parse_expr())
            self.expect(")")
        t = self.peek()
        if t.kind == "-->":
            self.next()
            atten = 1.0
        elif t.kind == "-":
            self.next()
            atten = self.parse_qual_literal()
            self.expect("->")
        else:
            _fail(t.line, t.col, f"expected an arrow, found {t.text!r}")
        rhs = self.parse_expr()
        conditions = []
        if self.at("<=="):
            self.next()
            conditions = self.parse_constraint_list()
        return ProgramRule(head.text, tuple(patterns), atten, rhs,
                           tuple(conditions), line=head.line)

    # -- goals ----------------------------------------------------------------

    def parse_goal(self) -> Goal:
        entries = []
        while True:
            c = self.parse_constraint()
            self.expect("#")
            w = self.expect("VAR")
            entries.append((c, w))
            if self.at(","):
                self.next()
                continue
            break
        thresholds = {}
        if self.at("|"):
            self.next()
            while True:
                w = self.expect("VAR")
                self.expect(">=")
                beta = self.parse_qual_literal()
                if w.text in thresholds:
                    _fail(w.line, w.col, f"duplicate threshold for {w.text}")
                thresholds[w.text] = beta
                if self.at(","):
                    self.next()
                    continue
                break
        seen = set()
        items = []
        for c, w in entries:
            if w.text in seen:
                _fail(w.line, w.col, f"duplicate qualification variable {w.text}")
            seen.add(w.text)
            items.append(GoalItem(c, w.text, thresholds.pop(w.text, None)))
        for name in thresholds:
            _fail(0, 0, f"threshold for undeclared qualification variable {name}")
        self.expect("EOF")
        return Goal(tuple(items))


def classify_constraint(e: Expr) -> Optional[AtomicConstraint]:
    """Canonical atomic-constraint form of a parsed condition expression."""
    if not isinstance(e, App):
        return None
    if e.symbol == "==" and len(e.args) == 2:
        lhs, rhs = e.args
        if isinstance(lhs, App) and lhs.symbol in BUILTIN_PF and _is_vform(rhs):
            return AtomicConstraint(lhs.symbol, lhs.args, rhs)
        return AtomicConstraint("==", (lhs, rhs), TRUE)
    if e.symbol in BUILTIN_PF:
        return AtomicConstraint(e.symbol, e.args, TRUE)
    # bare application of a non-primitive symbol abbreviates equality to true
    return AtomicConstraint("==", (e, TRUE), TRUE)


def _is_vform(e: Expr) -> bool:
    return isinstance(e, (Var, Basic)) or (isinstance(e, App) and not e.args)


# ======================================================================
# Signature assembly and validation
# ======================================================================

def _register_use_sites(e: Expr, sig: Signature, diags: list, line: int) -> None:
    if isinstance(e, App):
        kind = sig.kind(e.symbol)
        if kind is None:
            try:
                sig.register_dc(e.symbol, len(e.args))
            except SignatureError as exc:
                diags.append(Diagnostic(line, 0, str(exc)))
        else:
            try:
                if sig.arity(e.symbol) != len(e.args):
                    diags.append(Diagnostic(
                        line, 0,
                        f"{e.symbol!r} used with {len(e.args)} argument(s), "
                        f"expected {sig.arity(e.symbol)}"))
            except SignatureError as exc:
                diags.append(Diagnostic(line, 0, str(exc)))
        for a in e.args:
            _register_use_sites(a, sig, diags, line)
    elif isinstance(e, AtomicConstraint):
        for x in e.args:
            _register_use_sites(x, sig, diags, line)
        _register_use_sites(e.result, sig, diags, line)


def _contains_bottom(e) -> bool:
    if isinstance(e, Bottom):
        return True
    if isinstance(e, App):
        return any(_contains_bottom(a) for a in e.args)
    if isinstance(e, AtomicConstraint):
        return any(_contains_bottom(x) for x in (*e.args, e.result))
    return False


def build_program(decls, rules, dom: QualDomain = U) -> tuple:
    """Assemble the signature and run the validator; returns (Program, diags)."""
    sig = Signature()
    diags = []
    for r in rules:
        try:
            sig.register_df(r.name, len(r.patterns))
        except SignatureError as exc:
            diags.append(Diagnostic(r.line, 0, str(exc)))
    for entry in decls:
        name, arity, line, col = entry
        try:
            sig.register_dc(name, arity)
        except SignatureError as exc:
            diags.append(Diagnostic(line, col, str(exc)))
    for r in rules:
        for p in r.patterns:
            _register_use_sites(p, sig, diags, r.line)
        _register_use_sites(r.rhs, sig, diags, r.line)
        for c in r.conditions:
            _register_use_sites(c, sig, diags, r.line)
    program = Program(sig, list(rules))
    diags.extend(validate_program(program, dom))
    return program, diags


def validate_program(program: Program, dom: QualDomain = U) -> list:
    diags = []
    sig = program.signature
    for r in program.rules:
        seen = set()
        for p in r.patterns:
            if not is_term(p, sig):
                diags.append(Diagnostic(r.line, 0,
                                        f"rule for {r.name!r}: head patterns must be constructor terms"))
            for v in _vars_in_order(p):
                if v in seen:
                    diags.append(Diagnostic(r.line, 0,
                                            f"rule for {r.name!r}: non-linear head (variable {v} repeats)"))
                seen.add(v)
        if any(_contains_bottom(x) for x in (*r.patterns, r.rhs, *r.conditions)):
            diags.append(Diagnostic(r.line, 0,
                                    f"rule for {r.name!r}: the undefined value cannot occur in rules"))
        try:
            a = dom.coerce(r.attenuation)
            if not dom.is_strict(a):
                diags.append(Diagnostic(r.line, 0,
                                        f"rule for {r.name!r}: attenuation factor must be above bottom"))
        except MalformedValueError as exc:
            diags.append(Diagnostic(r.line, 0, f"rule for {r.name!r}: {exc}"))
    return diags


def _vars_in_order(e: Expr):
    if isinstance(e, Var):
        yield e.name
    elif isinstance(e, App):
        for a in e.args:
            yield from _vars_in_order(a)


def validate_goal(goal: Goal, dom: QualDomain = U) -> list:
    diags = []
    for item in goal.items:
        if item.wvar in vars_of(item.constraint):
            diags.append(Diagnostic(0, 0,
                                    f"qualification variable {item.wvar} occurs inside its constraint"))
        if item.threshold is not None:
            try:
                b = dom.coerce(item.threshold)
                if not dom.is_strict(b):
                    diags.append(Diagnostic(0, 0, f"threshold for {item.wvar} must be above bottom"))
            except MalformedValueError as exc:
                diags.append(Diagnostic(0, 0, f"threshold for {item.wvar}: {exc}"))
    return diags


# ======================================================================
# Public parse entry points
# ======================================================================

def parse_program(text: str, dom: QualDomain = U) -> Program:
    p = _Parser(text)
    decls, rules = p.parse_program_items()
    program, diags = build_program(decls, rules, dom)
    if diags:
        raise ParseError(diags)
    return program


def parse_goal(text: str, dom: QualDomain = U) -> Goal:
    p = _Parser(text)
    goal = p.parse_goal()
    diags = validate_goal(goal, dom)
    if diags:
        raise ParseError(diags)
    return goal


def parse_constraints(text: str) -> list:
    """A bare comma-separated constraint conjunction (translated goals)."""
    p = _Parser(text)
    out = p.parse_constraint_list()
    p.expect("EOF")
    return out


def parse_expr(text: str) -> Expr:
    p = _Parser(text)
    e = p.parse_expr()
    p.expect("EOF")
    return e


# ======================================================================
# Printer
# ======================================================================

_PREC_CMP, _PREC_CONS, _PREC_ADD, _PREC_MUL, _PREC_ATOM = 1, 2, 3, 4, 5


def _spine(e: Expr):
    """Decompose a cons spine; returns (items, tail) with tail None for nil."""
    items = []
    while isinstance(e, App) and e.symbol == ":" and len(e.args) == 2:
        items.append(e.args[0])
        e = e.args[1]
    if isinstance(e, App) and e.symbol == "[]" and not e.args:
        return items, None
    return items, e


def print_expr(e: Expr, prec: int = 0) -> str:
    if isinstance(e, Bottom):
        return "_|_"
    if isinstance(e, Var):
        return e.name
    if isinstance(e, Basic):
        return format_real(e.value)
    if isinstance(e, App):
        if is_char_atom(e):
            return f"'{_escape(e.symbol[1:-1], chr(39))}'"
        if e.symbol == "==" and len(e.args) == 2 and e.args[1] == FALSE \
                and isinstance(e.args[0], App) and e.args[0].symbol == "==":
            inner = e.args[0]
            s = f"{print_expr(inner.args[0], _PREC_CONS)} /= {print_expr(inner.args[1], _PREC_CONS)}"
            return f"({s})" if prec > _PREC_CMP else s
        if e.symbol == ":" and len(e.args) == 2:
            items, tail = _spine(e)
            if tail is None:
                if items and all(is_char_atom(x) for x in items):
                    return '"' + _escape("".join(x.symbol[1:-1] for x in items), '"') + '"'
                return "[" + ", ".join(print_expr(x) for x in items) + "]"
            s = f"{print_expr(e.args[0], _PREC_ADD)}:{print_expr(e.args[1], _PREC_CONS)}"
            return f"({s})" if prec > _PREC_CONS else s
        if e.symbol == "[]" and not e.args:
            return "[]"
        if e.symbol in ("==", "<=", "<", ">=", ">") and len(e.args) == 2:
            s = f"{print_expr(e.args[0], _PREC_CONS)} {e.symbol} {print_expr(e.args[1], _PREC_CONS)}"
            return f"({s})" if prec > _PREC_CMP else s
        if e.symbol in ("+", "-") and len(e.args) == 2:
            s = f"{print_expr(e.args[0], _PREC_ADD)} {e.symbol} {print_expr(e.args[1], _PREC_MUL)}"
            return f"({s})" if prec > _PREC_ADD else s
        if e.symbol == "*" and len(e.args) == 2:
            s = f"{print_expr(e.args[0], _PREC_MUL)}*{print_expr(e.args[1], _PREC_ATOM)}"
            return f"({s})" if prec > _PREC_MUL else s
        if not e.args:
            return e.symbol
        return f"{e.symbol}({', '.join(print_expr(a) for a in e.args)})"
    raise TypeError(f"cannot print {e!r}")


def print_constraint(c: AtomicConstraint) -> str:
    if c.result == TRUE:
        if c.symbol == "==":
            lhs, rhs = c.args
            # bare-application sugar for defined-function conditions
            if rhs == TRUE and isinstance(lhs, App) and lhs.args \
                    and lhs.symbol not in BUILTIN_PF:
                return print_expr(lhs)
            return f"{print_expr(lhs, _PREC_CONS)} == {print_expr(rhs, _PREC_CONS)}"
        if c.symbol in ("<=", "<", ">=", ">"):
            return f"{print_expr(c.args[0], _PREC_CONS)} {c.symbol} {print_expr(c.args[1], _PREC_CONS)}"
        return f"{c.symbol}({', '.join(print_expr(a) for a in c.args)})"
    if c.result == FALSE and c.symbol == "==":
        return f"{print_expr(c.args[0], _PREC_CONS)} /= {print_expr(c.args[1], _PREC_CONS)}"
    if c.symbol == "==":
        return f"({print_expr(c.args[0], _PREC_CONS)} == {print_expr(c.args[1], _PREC_CONS)}) == {print_expr(c.result)}"
    return f"{c.symbol}({', '.join(print_expr(a) for a in c.args)}) == {print_expr(c.result)}"


def format_attenuation(raw) -> str:
    if isinstance(raw, tuple):
        return "(" + ",".join(format_attenuation(x) for x in raw) + ")"
    return format_real(float(raw))


def print_rule(r: ProgramRule) -> str:
    head = r.name if not r.patterns else \
        f"{r.name}({', '.join(print_expr(p) for p in r.patterns)})"
    if isinstance(r.attenuation, tuple) or float(r.attenuation) != 1.0:
        arrow = f"-{format_attenuation(r.attenuation)}->"
    else:
        arrow = "-->"
    text = f"{head} {arrow} {print_expr(r.rhs)}"
    if r.conditions:
        text += " <== " + ", ".join(print_constraint(c) for c in r.conditions)
    return text


def print_program(program: Program) -> str:
    lines = []
    i = 0
    for name, arity in program.signature.dc.items():
        if name in ("true", "false", "[]", ":") or name.startswith("'"):
            continue
        params = ", ".join(["t"] * arity)
        lines.append(f"data t{i} = {name}({params})" if arity else f"data t{i} = {name}")
        i += 1
    for r in program.rules:
        lines.append(print_rule(r))
    return "\n".join(lines) + ("\n" if lines else "")


def print_goal(goal: Goal) -> str:
    left = ", ".join(f"{print_constraint(it.constraint)} # {it.wvar}" for it in goal.items)
    bounds = [f"{it.wvar} >= {format_attenuation(it.threshold)}"
              for it in goal.items if it.threshold is not None]
    return left + (" | " + ", ".join(bounds) if bounds else "")


def print_constraints(constraints) -> str:
    return ", ".join(print_constraint(c) for c in constraints)
