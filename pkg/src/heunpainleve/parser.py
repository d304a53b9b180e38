"""Operator spec text: tokenizer, recursive-descent parser, printer.

Grammar (EBNF)::

    spec      = { sep } [ statement { sep { sep } statement } ] { sep } ;
    sep       = ";" | newline ;
    statement = slot "=" expr
              | "param" ident { "," ident }
              | "time" ident ;
    slot      = "sigma" | "tau" | "eta" | "p" | "q" ;
    expr      = term { ( "+" | "-" ) term } ;
    term      = unary { ( "*" | "/" ) unary } ;
    unary     = ( "+" | "-" ) unary | power ;
    power     = atom [ "^" integer ] ;
    atom      = integer | ident | "(" expr ")" ;

``#`` starts a comment running to the end of the line. Identifiers other than
``z`` must be declared with ``param`` or ``time`` (anywhere in the text).
``sigma`` must be a constant times a product of powers of factors linear in z.
A spec with ``p``/``q`` describes a principal operator ∂² + p∂ + q instead.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from .errors import (SigmaNotFactored, SpecSyntaxError, UndeclaredParameter,
                     ZeroDenominator)
from .heun_class import HeunOperator
from .polyalg import RatFunc, variable_key
from .sing_analysis import PrincipalOperator

SLOTS = ("sigma", "tau", "eta", "p", "q")
KEYWORDS = ("param", "time")
_KIND_NAMES = {"ident": "identifier", "int": "integer"}
# kernel variables used by the deformation engine and integrators
RESERVED = ("z", "lam", "mu", "lamp", "E")

_TOKEN = re.compile(r"""
    (?P<ws>[ \t\r]+) | (?P<comment>\#[^\n]*) | (?P<nl>\n) |
    (?P<int>\d+) | (?P<ident>[A-Za-z_][A-Za-z0-9_]*) |
    (?P<op>[-+*/^()=;,])
""", re.VERBOSE)


@dataclass(frozen=True)
class Token:
    kind: str  # int, ident, op, sep, eof
    text: str
    line: int
    column: int


def tokenize(text: str) -> list[Token]:
    out: list[Token] = []
    pos, line, col0 = 0, 1, 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        col = pos - col0 + 1
        if not m:
            raise SpecSyntaxError(f"unexpected character {text[pos]!r}", line, col)
        kind = m.lastgroup
        if kind == "nl":
            out.append(Token("sep", "\\n", line, col))
            line, col0 = line + 1, m.end()
        elif kind == "op" and m.group() == ";":
            out.append(Token("sep", ";", line, col))
        elif kind not in ("ws", "comment"):
            out.append(Token(kind, m.group(), line, col))
        pos = m.end()
    out.append(Token("eof", "", line, len(text) - col0 + 1))
    return out


# expression trees: ("num", n) ("name", tok) ("neg", e) ("add"|"sub"|"mul"|"div", a, b, tok)
# ("pow", base, n)


class _Parser:
    def __init__(self, text: str):
        self.toks = tokenize(text)
        self.i = 0

    @property
    def tok(self) -> Token:
        return self.toks[self.i]

    def fail(self, expected, what=None):
        t = self.tok
        shown = "end of input" if t.kind == "eof" else repr(t.text)
        raise SpecSyntaxError(what or f"unexpected {shown}", t.line, t.column, expected)

    def take(self, kind, text=None) -> Token:
        t = self.tok
        if t.kind != kind or (text is not None and t.text != text):
            self.fail([f"'{text}'" if text else _KIND_NAMES.get(kind, kind)])
        self.i += 1
        return t

    def at(self, kind, text=None) -> bool:
        t = self.tok
        return t.kind == kind and (text is None or t.text == text)

    def spec(self):
        stmts = []
        while self.at("sep"):
            self.i += 1
        while not self.at("eof"):
            stmts.append(self.statement())
            if not (self.at("sep") or self.at("eof")):
                self.fail(["';'", "newline", "'+'", "'-'", "'*'", "'/'", "'^'"])
            while self.at("sep"):
                self.i += 1
        return stmts

    def statement(self):
        t = self.tok
        if t.kind == "ident" and t.text in KEYWORDS:
            self.i += 1
            names = [self.take("ident")]
            while t.text == "param" and self.at("op", ","):
                self.i += 1
                names.append(self.take("ident"))
            return (t.text, names, t)
        if t.kind == "ident" and t.text in SLOTS:
            self.i += 1
            self.take("op", "=")
            return ("slot", t, self.expr())
        self.fail(list(SLOTS + KEYWORDS))

    def expr(self):
        node = self.term()
        while self.at("op", "+") or self.at("op", "-"):
            op = self.take("op")
            node = ("add" if op.text == "+" else "sub", node, self.term(), op)
        return node

    def term(self):
        node = self.unary()
        while self.at("op", "*") or self.at("op", "/"):
            op = self.take("op")
            node = ("mul" if op.text == "*" else "div", node, self.unary(), op)
        return node

    def unary(self):
        if self.at("op", "-"):
            self.i += 1
            return ("neg", self.unary())
        if self.at("op", "+"):
            self.i += 1
            return self.unary()
        return self.power()

    def power(self):
        base = self.atom()
        if self.at("op", "^"):
            self.i += 1
            if not self.at("int"):
                self.fail(["nonnegative integer"])
            return ("pow", base, int(self.take("int").text))
        return base

    def atom(self):
        t = self.tok
        if t.kind == "int":
            self.i += 1
            return ("num", int(t.text))
        if t.kind == "ident":
            self.i += 1
            return ("name", t)
        if self.at("op", "("):
            self.i += 1
            node = self.expr()
            self.take("op", ")")
            return node
        self.fail(["integer", "identifier", "'('"])


def _evaluate(node, declared: set[str]) -> RatFunc:
    kind = node[0]
    if kind == "num":
        return RatFunc(node[1])
    if kind == "name":
        t = node[1]
        if t.text != "z" and t.text not in declared:
            raise UndeclaredParameter(f"undeclared name {t.text!r}", t.line, t.column,
                                      ["param declaration"])
        return RatFunc(t.text)
    if kind == "neg":
        return -_evaluate(node[1], declared)
    if kind == "pow":
        return _evaluate(node[1], declared) ** node[2]
    a, b = _evaluate(node[1], declared), _evaluate(node[2], declared)
    if kind == "add":
        return a + b
    if kind == "sub":
        return a - b
    if kind == "mul":
        return a * b
    if b.is_zero:
        t = node[3]
        raise ZeroDenominator("division by zero", t.line, t.column)
    return a / b


def _linear_factors(node, declared) -> tuple[RatFunc, list]:
    """(constant, [(root, multiplicity)]) for a product of linear factors."""
    kind = node[0]
    if kind == "mul":
        c1, r1 = _linear_factors(node[1], declared)
        c2, r2 = _linear_factors(node[2], declared)
        return c1 * c2, r1 + r2
    if kind == "neg":
        c, r = _linear_factors(node[1], declared)
        return -c, r
    if kind == "pow":
        c, r = _linear_factors(node[1], declared)
        return c ** node[2], [(x, m * node[2]) for x, m in r]
    val = _evaluate(node, declared)
    if val.free_of("z"):
        return val, []
    if kind == "div":
        c, r = _linear_factors(node[1], declared)
        d = _evaluate(node[2], declared)
        if not d.free_of("z"):
            raise SigmaNotFactored("sigma has z in a denominator")
        return c / d, r
    if val.is_polynomial_in("z") and val.degree("z") == 1:
        a, b = val.coeff("z", 1), val.coeff("z", 0)
        if not (a.free_of("z") and b.free_of("z")):
            raise SigmaNotFactored(f"factor {val} is not linear in z")
        return a, [(-b / a, 1)]
    raise SigmaNotFactored(f"factor {val} is not linear in z")


@dataclass
class ParsedSpec:
    operator: HeunOperator | PrincipalOperator
    params: tuple[str, ...] = ()
    time: str | None = None
    slots: dict = field(default_factory=dict)


def parse_spec(text: str) -> ParsedSpec:
    stmts = _Parser(text).spec()
    declared: list[str] = []
    time = None
    for st in stmts:
        if st[0] in KEYWORDS:
            for t in st[1]:
                if t.text in RESERVED + SLOTS + KEYWORDS:
                    raise SpecSyntaxError(f"{t.text!r} cannot be declared", t.line, t.column,
                                          ["identifier"])
                if t.text not in declared:
                    declared.append(t.text)
            if st[0] == "time":
                if time is not None:
                    raise SpecSyntaxError("time declared twice", st[2].line, st[2].column)
                time = st[1][0].text
    names = set(declared)
    slots: dict[str, tuple] = {}
    for st in stmts:
        if st[0] == "slot":
            key = st[1]
            if key.text in slots:
                raise SpecSyntaxError(f"{key.text} assigned twice", key.line, key.column)
            slots[key.text] = (key, st[2])
    principal = {"p", "q"} & set(slots)
    if principal and {"sigma", "tau", "eta"} & set(slots):
        key = slots[sorted(principal)[0]][0]
        raise SpecSyntaxError("cannot mix p/q with sigma/tau/eta", key.line, key.column)
    values = {k: _evaluate(node, names) for k, (_, node) in slots.items()}
    if principal:
        op = PrincipalOperator(values.get("p", RatFunc(0)), values.get("q", RatFunc(0)))
    else:
        if "sigma" not in slots:
            t = _Parser(text).toks[-1]
            raise SpecSyntaxError("missing sigma", t.line, t.column, ["sigma"])
        lead, roots = _linear_factors(slots["sigma"][1], names)
        if lead.is_zero:
            raise SigmaNotFactored("sigma is zero")
        op = HeunOperator.build(roots, values.get("tau", RatFunc(0)),
                                values.get("eta", RatFunc(0)), lead)
    params = tuple(sorted(declared, key=variable_key))
    return ParsedSpec(op, params, time, values)


def parse_operator(text: str) -> HeunOperator | PrincipalOperator:
    return parse_spec(text).operator


def format_sigma(op: HeunOperator) -> str:
    parts = []
    if op.lead != 1 or not op.roots:
        parts.append(f"({op.lead})")
    for r, m in sorted(op.roots, key=lambda rm: str(rm[0])):
        f = f"({RatFunc('z') - r})"
        parts.append(f if m == 1 else f"{f}^{m}")
    return "*".join(parts)


def _free_names(op) -> list[str]:
    if isinstance(op, HeunOperator):
        fs = [op.lead, op.tau, op.eta] + [r for r, _ in op.roots]
    else:
        fs = [op.p, op.q]
    out: set[str] = set()
    for f in fs:
        out |= set(f.variables)
    out.discard("z")
    return sorted(out, key=variable_key)


def format_operator(op, time: str | None = None, params=None) -> str:
    """Canonical text; parsing it returns an equal operator."""
    names = list(params) if params is not None else _free_names(op)
    lines = []
    decl = [n for n in names if n != time]
    if decl:
        lines.append("param " + ", ".join(decl))
    if time:
        lines.append(f"time {time}")
    if isinstance(op, HeunOperator):
        lines.append(f"sigma = {format_sigma(op)}")
        lines.append(f"tau = {op.tau}")
        lines.append(f"eta = {op.eta}")
    else:
        lines.append(f"p = {op.p}")
        lines.append(f"q = {op.q}")
    return "\n".join(lines) + "\n"


def format_spec(ps: ParsedSpec) -> str:
    return format_operator(ps.operator, ps.time, ps.params)
