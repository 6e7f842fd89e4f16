"""Recursive-descent parser for the line-oriented ``.eps`` language.

A ``#`` followed by whitespace (or ending the line) starts a comment; a ``#``
glued to a name is a signal inside a trace literal. Blocks open with ``{`` at
the end of a header line and close with a ``}`` line. See ``docs/grammar.md``
for the full grammar.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Optional

from ..core import parse_trace
from ..errors import DuplicateName, EmptyDomain, SpecSyntaxError, UnknownName
from . import ast

_TOKEN = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<int>[0-9]+)
  | (?P<name>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<op>:=|==|!=|->|\.\.|[{}(),:=])
    """,
    re.VERBOSE,
)

KEYWORDS = {
    "domain", "system", "traces", "universe", "subject", "attacker", "policy",
    "input", "output", "signal", "assign", "dump", "if", "else",
    "and", "or", "not", "in", "null", "type0", "type1", "type2", "cond", "cases", "as",
}


@dataclass
class Tok:
    kind: str  # "int" | "name" | "op" | "eol"
    text: str
    line: int
    col: int


def strip_comment(line: str) -> str:
    for m in re.finditer(r"#", line):
        i = m.start()
        nxt = line[i + 1 : i + 2]
        if nxt == "" or nxt.isspace() or nxt == "#":
            return line[:i]
    return line


def tokenize_line(text: str, lineno: int) -> list:
    toks = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise SpecSyntaxError(lineno, pos + 1, "a token", text[pos])
        kind = m.lastgroup
        if kind != "ws":
            toks.append(Tok(kind, m.group(), lineno, pos + 1))
        pos = m.end()
    toks.append(Tok("eol", "", lineno, len(text) + 1))
    return toks


class Parser:
    def __init__(self, text: str):
        self.lines = [strip_comment(l).rstrip() for l in text.splitlines()]
        self.lineno = 0  # index of next unread line
        self.toks: list = []
        self.i = 0
        self.domain_refs: list = []  # (name, line, col) checked after parsing
        self.symbol_refs: list = []
        self.defined: Optional[set] = None  # variables in scope inside a process

    # -- line and token plumbing ------------------------------------------

    def next_line(self) -> bool:
        """Advance to the next non-blank line; False at end of file."""
        while self.lineno < len(self.lines):
            raw = self.lines[self.lineno]
            self.lineno += 1
            if raw.strip():
                self.toks = tokenize_line(raw, self.lineno)
                self.i = 0
                return True
        return False

    def raw_line(self) -> Optional[tuple]:
        while self.lineno < len(self.lines):
            raw = self.lines[self.lineno]
            self.lineno += 1
            if raw.strip():
                return raw.strip(), self.lineno
        return None

    @property
    def tok(self) -> Tok:
        return self.toks[self.i]

    def at(self, text: str) -> bool:
        t = self.tok
        return t.kind != "eol" and t.text == text

    def take(self) -> Tok:
        t = self.tok
        if t.kind != "eol":
            self.i += 1
        return t

    def fail(self, expected: str):
        t = self.tok
        raise SpecSyntaxError(t.line, t.col, expected, t.text or "end of line")

    def expect(self, text: str) -> Tok:
        if not self.at(text):
            self.fail(repr(text))
        return self.take()

    def name(self, what="a name") -> str:
        t = self.tok
        if t.kind != "name" or t.text in KEYWORDS:
            self.fail(what)
        return self.take().text

    def channel(self, what="a channel") -> str:
        """Channel and signal names may reuse keywords (``output dump = x``)."""
        if self.tok.kind != "name":
            self.fail(what)
        return self.take().text

    def integer(self) -> str:
        if self.tok.kind != "int":
            self.fail("an integer")
        return self.take().text

    def literal(self) -> str:
        t = self.tok
        if t.kind == "int" or (t.kind == "name" and t.text not in KEYWORDS):
            return self.take().text
        self.fail("a literal")

    def end_line(self):
        if self.tok.kind != "eol":
            self.fail("end of line")

    def block_close(self) -> bool:
        """True (consuming it) when the current line is a lone ``}``."""
        if self.at("}") and self.toks[self.i + 1].kind == "eol":
            self.take()
            return True
        return False

    # -- top level ---------------------------------------------------------

    def parse(self) -> ast.SpecModel:
        cats = {k: [] for k in ("domains", "systems", "universes", "subjects", "attackers", "policies")}
        while self.next_line():
            head = self.tok
            word = head.text
            if word == "domain":
                cats["domains"].append((self.domain(), head))
            elif word == "system":
                cats["systems"].append((self.system(), head))
            elif word == "universe":
                cats["universes"].append((self.universe(), head))
            elif word == "subject":
                cats["subjects"].append((self.subject(), head))
            elif word == "attacker":
                cats["attackers"].append((self.attacker(), head))
            elif word == "policy":
                cats["policies"].append((self.policy(), head))
            else:
                self.fail("domain, system, universe, subject, attacker or policy")
        model = ast.SpecModel(**{k: tuple(d for d, _ in v) for k, v in cats.items()})
        _resolve(model, cats, self.domain_refs, self.symbol_refs)
        return model

    def domain_ref(self, what="a domain name") -> str:
        t = self.tok
        name = self.name(what)
        self.domain_refs.append((name, t.line, t.col))
        return name

    def domain(self) -> ast.DomainDef:
        self.expect("domain")
        pos = self.tok
        name = self.name("a domain name")
        self.expect("=")
        if self.at("{"):
            self.take()
            items = []
            if not self.at("}"):
                items.append(self.literal())
                while self.at(","):
                    self.take()
                    items.append(self.literal())
            self.expect("}")
            self.end_line()
            if not items:
                raise EmptyDomain(name, pos.line, pos.col)
            return ast.DomainDef(name, items=tuple(items))
        lo = self.integer()
        self.expect("..")
        hi = self.integer()
        self.end_line()
        if int(hi) < int(lo):
            raise EmptyDomain(name, pos.line, pos.col)
        return ast.DomainDef(name, lo=lo, hi=hi)

    def system(self) -> ast.SystemDef:
        self.expect("system")
        name = self.name("a system name")
        if self.at("traces"):
            self.take()
            self.expect("{")
            self.end_line()
            return ast.SystemDef(name, traces=self.trace_block())
        self.expect("{")
        self.end_line()
        self.defined = set()
        body, closer = self.statements()
        self.defined = None
        if closer != "}":
            self.fail("'}'")
        return ast.SystemDef(name, body=body)

    def trace_block(self) -> tuple:
        traces = []
        while True:
            got = self.raw_line()
            if got is None:
                raise SpecSyntaxError(len(self.lines), 1, "'}' closing the trace block")
            text, lineno = got
            if text == "}":
                return tuple(traces)
            try:
                traces.append(str(parse_trace(text)))
            except ValueError as exc:
                raise SpecSyntaxError(lineno, 1, "a trace literal", f"{text} ({exc})") from None

    def universe(self) -> ast.UniverseDef:
        self.expect("universe")
        name = self.name("a system name")
        self.expect("{")
        self.end_line()
        return ast.UniverseDef(name, self.trace_block())

    def subject(self) -> ast.SubjectDef:
        self.expect("subject")
        name = self.name("a system name")
        self.expect("=")
        word = self.tok.text
        if word == "first_input":
            self.take()
            sel = ast.Selector("first_input")
        elif word == "input":
            self.take()
            self.expect("(")
            ch = self.channel()
            k = None
            if self.at(","):
                self.take()
                k = int(self.integer())
            self.expect(")")
            sel = ast.Selector("input", channel=ch, k=k)
        elif word == "input_k":
            self.take()
            self.expect("(")
            k = int(self.integer())
            self.expect(")")
            sel = ast.Selector("input_k", k=k)
        elif word == "const":
            self.take()
            self.expect("(")
            v = self.literal()
            self.expect(")")
            sel = ast.Selector("const", value=v)
        else:
            self.fail("first_input, input(...), input_k(...) or const(...)")
        self.end_line()
        return ast.SubjectDef(name, sel)

    def attacker(self) -> ast.AttackerDef:
        self.expect("attacker")
        name = self.name("an attacker name")
        self.expect("=")
        obs = self.obs()
        self.end_line()
        return ast.AttackerDef(name, obs)

    def obs(self) -> ast.Obs:
        word = self.tok.text
        if word in ("all", "none"):
            self.take()
            return ast.Obs(word)
        if word == "after":
            self.take()
            self.expect("(")
            sig = self.channel("a signal name")
            self.expect(")")
            return ast.Obs("after", (sig,))
        if word == "channels":
            self.take()
            self.expect("(")
            chans = [self.channel()]
            while self.at(","):
                self.take()
                chans.append(self.channel())
            self.expect(")")
            return ast.Obs("channels", tuple(chans))
        if word == "compose":
            self.take()
            self.expect("(")
            parts = [self.obs()]
            while self.at(","):
                self.take()
                parts.append(self.obs())
            self.expect(")")
            return ast.Obs("compose", tuple(parts))
        self.fail("all, none, after(...), channels(...) or compose(...)")

    # -- policies ----------------------------------------------------------

    def policy(self) -> ast.PolicyDef:
        self.expect("policy")
        name = self.name("a policy name")
        self.expect("=")
        if self.at("type0"):
            self.take()
            er = self.er()
            self.end_line()
            return ast.PolicyDef(name, ast.Type0Def(er))
        if self.at("type1"):
            return ast.PolicyDef(name, self.type1())
        if self.at("type2"):
            self.take()
            self.expect("cases")
            cases = self.classifier()
            self.expect("{")
            self.end_line()
            return ast.PolicyDef(name, ast.Type2Def(cases, self.arms(nested=True)))
        self.fail("type0, type1 or type2")

    def type1(self) -> ast.Type1Def:
        self.expect("type1")
        self.expect("cond")
        cond = self.classifier()
        self.expect("{")
        self.end_line()
        return ast.Type1Def(cond, self.arms(nested=False))

    def arms(self, nested: bool) -> tuple:
        arms = []
        while True:
            if not self.next_line():
                raise SpecSyntaxError(len(self.lines), 1, "'}' closing the policy block")
            if self.block_close():
                return tuple(arms)
            label = self.literal()
            alias = None
            if self.at("as"):
                self.take()
                alias = self.name("an alias")
            self.expect("->")
            if nested and self.at("type1"):
                body = self.type1()
            else:
                body = self.er()
                self.end_line()
            arms.append(ast.Arm(label, body, alias))

    def er(self) -> ast.Er:
        word = self.tok.text
        if word in ("all", "id"):
            self.take()
            return ast.Er(word)
        if word == "by":
            self.take()
            return ast.Er("by", (self.classifier(),))
        if word == "meet":
            self.take()
            self.expect("(")
            parts = [self.er()]
            while self.at(","):
                self.take()
                parts.append(self.er())
            self.expect(")")
            return ast.Er("meet", tuple(parts))
        self.fail("all, id, by <classifier> or meet(...)")

    def classifier(self) -> ast.Classifier:
        t = self.tok
        word = t.text
        if word in ("const", "id"):
            self.take()
            return ast.Classifier(word)
        if word in ("last", "mod"):
            self.take()
            self.expect("(")
            n = int(self.integer())
            self.expect(")")
            return ast.Classifier(word, (n,))
        if word == "in":
            self.take()
            self.expect("(")
            d = self.domain_ref()
            self.expect(")")
            return ast.Classifier("in", (d,))
        if word == "eq":
            self.take()
            self.expect("(")
            v = self.literal()
            self.expect(")")
            return ast.Classifier("eq", (v,))
        if word == "input":
            self.take()
            self.expect("(")
            k = int(self.integer())
            self.expect(")")
            return ast.Classifier("input", (k,))
        if word == "has_input":
            self.take()
            self.expect("(")
            ch = self.channel()
            args = (ch,)
            if self.at(","):
                self.take()
                args = (ch, self.literal())
            self.expect(")")
            return ast.Classifier("has_input", args)
        if word == "pair":
            self.take()
            self.expect("(")
            a = self.classifier()
            self.expect(",")
            b = self.classifier()
            self.expect(")")
            return ast.Classifier("pair", (a, b))
        self.fail("a classifier")

    # -- processes ---------------------------------------------------------

    def statements(self):
        """Read statement lines until a closing brace line.

        Returns the statements and the closer: ``"}"`` or ``"} else {"``.
        """
        body = []
        while True:
            if not self.next_line():
                raise SpecSyntaxError(len(self.lines), 1, "'}' closing the block")
            if self.at("}"):
                self.take()
                if self.at("else"):
                    self.take()
                    self.expect("{")
                    self.end_line()
                    return tuple(body), "} else {"
                self.end_line()
                return tuple(body), "}"
            body.append(self.statement())

    def statement(self) -> ast.Stmt:
        word = self.tok.text
        if word == "input":
            self.take()
            var = self.name("a variable")
            self.expect(":")
            dom = self.domain_ref()
            self.end_line()
            self.defined.add(var)
            return ast.Input(var, dom)
        if word == "output":
            self.take()
            ch = self.channel()
            self.expect("=")
            e = self.expr()
            self.end_line()
            return ast.Output(ch, e)
        if word == "signal":
            self.take()
            name = self.channel("a signal name")
            self.end_line()
            return ast.Signal(name)
        if word == "assign":
            self.take()
            var = self.name("a variable")
            self.expect(":=")
            e = self.expr()
            self.end_line()
            self.defined.add(var)
            return ast.Assign(var, e)
        if word == "dump":
            self.take()
            self.end_line()
            return ast.Dump()
        if word == "if":
            self.take()
            cond = self.expr()
            self.expect("{")
            self.end_line()
            before = set(self.defined)
            then, closer = self.statements()
            after_then, self.defined = self.defined, set(before)
            orelse = ()
            if closer == "} else {":
                orelse, closer = self.statements()
                if closer != "}":
                    self.fail("'}'")
            # Only variables bound on both branches stay in scope.
            self.defined &= after_then
            return ast.If(cond, then, orelse)
        self.fail("a statement")

    def expr(self) -> ast.Expr:
        left = self.conj()
        while self.at("or"):
            self.take()
            left = ast.BoolOp("or", left, self.conj())
        return left

    def conj(self) -> ast.Expr:
        left = self.negation()
        while self.at("and"):
            self.take()
            left = ast.BoolOp("and", left, self.negation())
        return left

    def negation(self) -> ast.Expr:
        if self.at("not"):
            self.take()
            return ast.Not(self.negation())
        return self.comparison()

    def comparison(self) -> ast.Expr:
        left = self.atom()
        if self.at("==") or self.at("!="):
            op = self.take().text
            return ast.Compare(op, left, self.atom())
        if self.at("in"):
            self.take()
            return ast.InDomain(left, self.domain_ref())
        return left

    def atom(self) -> ast.Expr:
        t = self.tok
        if t.kind == "int":
            return ast.Lit(self.take().text)
        if self.at("null"):
            self.take()
            return ast.Null()
        if self.at("("):
            self.take()
            e = self.expr()
            self.expect(")")
            return e
        if t.kind == "name" and t.text in ("last", "xor") and self.toks[self.i + 1].text == "(":
            fn = self.take().text
            self.expect("(")
            a = self.expr()
            self.expect(",")
            if fn == "last":
                b = ast.Lit(self.integer())
            else:
                b = self.expr()
            self.expect(")")
            return ast.Call(fn, (a, b))
        if t.kind == "name" and t.text not in KEYWORDS:
            if t.text in self.defined:
                return ast.Var(self.take().text)
            # Not a variable in scope: must be a symbol of some declared domain.
            self.symbol_refs.append((t.text, t.line, t.col))
            return ast.Lit(self.take().text)
        self.fail("an expression")


# -- name resolution --------------------------------------------------------

def _resolve(model: ast.SpecModel, cats, domain_refs, symbol_refs) -> None:
    for key, attr in (("domains", "name"), ("systems", "name"), ("attackers", "name"),
                      ("policies", "name"), ("universes", "system"), ("subjects", "system")):
        seen = set()
        for d, tok in cats[key]:
            n = getattr(d, attr)
            if n in seen:
                raise DuplicateName(n, tok.line, tok.col)
            seen.add(n)
    systems = {s.name for s in model.systems}
    for d, tok in cats["universes"] + cats["subjects"]:
        if d.system not in systems:
            raise UnknownName(d.system, tok.line, tok.col + len(tok.text) + 1)
    domains = {d.name for d in model.domains}
    for name, line, col in domain_refs:
        if name not in domains:
            raise UnknownName(name, line, col)
    symbols = {item for d in model.domains for item in d.items}
    for name, line, col in symbol_refs:
        if name not in symbols:
            raise UnknownName(name, line, col)


def parse_spec(text: str) -> ast.SpecModel:
    return Parser(text).parse()
