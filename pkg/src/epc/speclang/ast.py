"""Syntax tree of ``.eps`` specification files.

Nodes are frozen dataclasses without source positions, so two parses of
equivalent text compare equal.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Union


# -- expressions ------------------------------------------------------------

@dataclass(frozen=True)
class Lit:
    text: str


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Null:
    pass


@dataclass(frozen=True)
class Call:
    fn: str  # "last" | "xor"
    args: tuple


@dataclass(frozen=True)
class Compare:
    op: str  # "==" | "!="
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class InDomain:
    expr: "Expr"
    domain: str


@dataclass(frozen=True)
class Not:
    expr: "Expr"


@dataclass(frozen=True)
class BoolOp:
    op: str  # "and" | "or"
    left: "Expr"
    right: "Expr"


Expr = Union[Lit, Var, Null, Call, Compare, InDomain, Not, BoolOp]


# -- process statements -----------------------------------------------------

@dataclass(frozen=True)
class Input:
    var: str
    domain: str


@dataclass(frozen=True)
class Output:
    channel: str
    expr: Expr


@dataclass(frozen=True)
class Signal:
    name: str


@dataclass(frozen=True)
class Assign:
    var: str
    expr: Expr


@dataclass(frozen=True)
class Dump:
    pass


@dataclass(frozen=True)
class If:
    cond: Expr
    then: tuple
    orelse: tuple = ()


Stmt = Union[Input, Output, Signal, Assign, Dump, If]


# -- declarations -----------------------------------------------------------

@dataclass(frozen=True)
class DomainDef:
    name: str
    items: tuple = ()  # literal texts for an explicit set
    lo: Optional[str] = None  # integer range bounds, inclusive
    hi: Optional[str] = None


@dataclass(frozen=True)
class SystemDef:
    name: str
    body: Optional[tuple] = None  # process statements
    traces: Optional[tuple] = None  # rendered trace literals


@dataclass(frozen=True)
class UniverseDef:
    system: str
    traces: tuple


@dataclass(frozen=True)
class Selector:
    kind: str  # "first_input" | "input" | "input_k" | "const"
    channel: Optional[str] = None
    k: Optional[int] = None
    value: Optional[str] = None


@dataclass(frozen=True)
class SubjectDef:
    system: str
    selector: Selector


@dataclass(frozen=True)
class Obs:
    kind: str  # "all" | "none" | "after" | "channels" | "compose"
    args: tuple = ()


@dataclass(frozen=True)
class AttackerDef:
    name: str
    obs: Obs


@dataclass(frozen=True)
class Classifier:
    """``kind`` in last, mod, in, eq, id, const, pair (values) or
    input, has_input, const, pair (traces)."""

    kind: str
    args: tuple = ()


@dataclass(frozen=True)
class Er:
    kind: str  # "all" | "id" | "by" | "meet"
    args: tuple = ()


@dataclass(frozen=True)
class Arm:
    label: str  # "_" matches every label not named elsewhere
    body: object  # Er, or Type1Def inside a type2 policy
    alias: Optional[str] = None


@dataclass(frozen=True)
class Type0Def:
    er: Er


@dataclass(frozen=True)
class Type1Def:
    cond: Classifier
    arms: tuple


@dataclass(frozen=True)
class Type2Def:
    cases: Classifier
    arms: tuple


@dataclass(frozen=True)
class PolicyDef:
    name: str
    body: Union[Type0Def, Type1Def, Type2Def]


@dataclass(frozen=True)
class SpecModel:
    domains: tuple = ()
    systems: tuple = ()
    universes: tuple = ()
    subjects: tuple = ()
    attackers: tuple = ()
    policies: tuple = ()

    def _find(self, items, name, attr="name"):
        for d in items:
            if getattr(d, attr) == name:
                return d
        return None

    def domain(self, name):
        return self._find(self.domains, name)

    def system(self, name):
        return self._find(self.systems, name)

    def universe(self, system):
        return self._find(self.universes, system, "system")

    def subject(self, system):
        return self._find(self.subjects, system, "system")

    def attacker(self, name):
        return self._find(self.attackers, name)

    def policy(self, name):
        return self._find(self.policies, name)
