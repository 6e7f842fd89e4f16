"""Semantics of specification files: expansion, classifiers, attackers, policies."""

from __future__ import annotations

from pathlib import Path
from typing import Optional

from ..core import (
    NULL,
    Event,
    EventKind,
    SubjectFn,
    System,
    Trace,
    Value,
    parse_trace,
    restrict_universe,
    subject_domain,
)
from ..errors import EpcError, ExprError, UnknownName, UnknownSignal
from ..kspace import Attacker
from ..partitions import Partition, from_classifier, identity, labelled_fibers, meet, total
from ..policy import Type0Policy, Type1Policy, Type2Policy
from . import ast
from .parser import parse_spec

# Observation of the erasure attacker on a trace that never signals erasure.
# Rendered traces never start with '<n', so it cannot collide with a suffix.
NO_SIGNAL = "<no-signal>"

TRUE = Value.sym("true")
FALSE = Value.sym("false")


def domain_values(d: ast.DomainDef) -> tuple:
    if d.lo is not None:
        width = len(d.lo)
        return tuple(Value.num(n, width) for n in range(int(d.lo), int(d.hi) + 1))
    return tuple(sorted(Value.parse(x) for x in d.items))


def _eq(a: Value, b: Value) -> bool:
    return a == b


def eval_expr(e: ast.Expr, env: dict, domains: dict):
    """Evaluate to a ``Value`` or, for conditions, a ``bool``."""
    if isinstance(e, ast.Lit):
        return Value.parse(e.text)
    if isinstance(e, ast.Null):
        return NULL
    if isinstance(e, ast.Var):
        try:
            return env[e.name]
        except KeyError:
            raise ExprError(f"variable {e.name} is unbound on this path") from None
    if isinstance(e, ast.Call):
        a = _value(eval_expr(e.args[0], env, domains))
        if e.fn == "last":
            k = int(e.args[1].text)
            if not a.is_int:
                raise ExprError(f"last() needs an integer, got {a}")
            if a.width < k:
                raise ExprError(f"last({a}, {k}) is wider than the value's {a.width} digits")
            return Value.num(a.number % 10**k, k)
        b = _value(eval_expr(e.args[1], env, domains))
        if not (a.is_int and b.is_int):
            raise ExprError(f"xor() needs integers, got {a} and {b}")
        return Value.num(a.number ^ b.number, max(a.width, b.width))
    if isinstance(e, ast.Compare):
        same = _eq(_value(eval_expr(e.left, env, domains)), _value(eval_expr(e.right, env, domains)))
        return same if e.op == "==" else not same
    if isinstance(e, ast.InDomain):
        v = _value(eval_expr(e.expr, env, domains))
        return any(_eq(v, x) for x in domains[e.domain])
    if isinstance(e, ast.Not):
        return not _bool(eval_expr(e.expr, env, domains))
    left = _bool(eval_expr(e.left, env, domains))
    if e.op == "and":
        return left and _bool(eval_expr(e.right, env, domains))
    return left or _bool(eval_expr(e.right, env, domains))


def _value(x) -> Value:
    if isinstance(x, bool):
        return TRUE if x else FALSE
    return x


def _bool(x) -> bool:
    if isinstance(x, bool):
        return x
    if x == TRUE or x == FALSE:
        return x == TRUE
    raise ExprError(f"expected a condition, got value {x}")


def expand_process(body: tuple, domains: dict) -> frozenset:
    """All maximal traces: branch on every input value, run the rest deterministically."""
    traces = set()

    def run(stmts, i, env, events, k):
        if i == len(stmts):
            k(env, events)
            return
        st = stmts[i]
        nxt = lambda env2, ev2: run(stmts, i + 1, env2, ev2, k)  # noqa: E731
        if isinstance(st, ast.Input):
            for v in domains[st.domain]:
                env2 = dict(env)
                env2[st.var] = v
                nxt(env2, events + (Event(EventKind.INPUT, st.var, v),))
        elif isinstance(st, ast.Output):
            v = _value(eval_expr(st.expr, env, domains))
            nxt(env, events + (Event(EventKind.OUTPUT, st.channel, v),))
        elif isinstance(st, ast.Signal):
            nxt(env, events + (Event.signal(st.name),))
        elif isinstance(st, ast.Assign):
            env2 = dict(env)
            env2[st.var] = _value(eval_expr(st.expr, env, domains))
            nxt(env2, events)
        elif isinstance(st, ast.Dump):
            dumped = tuple(Event(EventKind.OUTPUT, "dump", v) for v in env.values())
            nxt(env, events + dumped)
        else:
            branch = st.then if _bool(eval_expr(st.cond, env, domains)) else st.orelse
            run(branch, 0, env, events, nxt)

    run(body, 0, {}, (), lambda env, events: traces.add(Trace(events)))
    return frozenset(traces)


# -- classifiers --------------------------------------------------------------

def _bool_label(b: bool) -> str:
    return "true" if b else "false"


def eval_classifier(c: ast.Classifier, x, domains: Optional[dict] = None) -> str:
    """Label of a subject value or a trace under classifier ``c``."""
    kind = c.kind
    if kind == "const":
        return "*"
    if kind == "pair":
        return f"({eval_classifier(c.args[0], x, domains)},{eval_classifier(c.args[1], x, domains)})"
    if kind == "id":
        return str(x)
    if isinstance(x, Trace):
        if kind == "input":
            inputs = x.inputs()
            k = c.args[0]
            if not 1 <= k <= len(inputs):
                raise ExprError(f"trace {x} has no input number {k}")
            return str(inputs[k - 1])
        if kind == "has_input":
            ch = c.args[0]
            want = Value.parse(c.args[1]) if len(c.args) > 1 else None
            return _bool_label(any(want is None or _eq(v, want) for v in x.inputs(ch)))
        raise ExprError(f"classifier {kind} does not apply to traces")
    if not isinstance(x, Value):
        raise ExprError(f"cannot classify {x!r}")
    if kind == "last":
        k = c.args[0]
        if not x.is_int or x.width < k:
            raise ExprError(f"last({k}) undefined on {x}")
        return str(x.number % 10**k).zfill(k)
    if kind == "mod":
        if not x.is_int:
            raise ExprError(f"mod() undefined on {x}")
        return str(x.number % c.args[0])
    if kind == "in":
        if domains is None or c.args[0] not in domains:
            raise UnknownName(c.args[0])
        return _bool_label(any(_eq(x, y) for y in domains[c.args[0]]))
    if kind == "eq":
        return _bool_label(_eq(x, Value.parse(c.args[0])))
    raise ExprError(f"classifier {kind} does not apply to values")


# -- attackers ----------------------------------------------------------------

def _observer(obs: ast.Obs):
    if obs.kind == "all":
        return str
    if obs.kind == "none":
        return lambda t: ""
    if obs.kind == "after":
        sig = Event.signal(obs.args[0])

        def after(t: Trace):
            for i, e in enumerate(t.events):
                if e == sig:
                    return str(Trace(t.events[i + 1 :]))
            return NO_SIGNAL

        return after
    if obs.kind == "channels":
        chans = frozenset(obs.args)
        return lambda t: str(Trace(tuple(e for e in t.events if e.channel in chans)))
    parts = [_observer(o) for o in obs.args]
    return lambda t: tuple(p(t) for p in parts)


def _signals(obs: ast.Obs):
    if obs.kind == "after":
        yield obs.args[0]
    elif obs.kind == "compose":
        for o in obs.args:
            yield from _signals(o)


def build_attacker(obs: ast.Obs, universe=None, name: str = "A") -> Attacker:
    if universe is not None:
        present = {e.channel for t in universe for e in t.events if e.kind is EventKind.SIGNAL}
        for sig in _signals(obs):
            if sig not in present:
                raise UnknownSignal(sig)
    return Attacker(_observer(obs), name)


# -- policies -----------------------------------------------------------------

def er_on(er: ast.Er, carrier, domains: dict) -> Partition:
    carrier = frozenset(carrier)
    if er.kind == "all":
        return total(carrier)
    if er.kind == "id":
        return identity(carrier)
    if er.kind == "by":
        return from_classifier(carrier, lambda v: eval_classifier(er.args[0], v, domains))
    return meet([er_on(a, carrier, domains) for a in er.args])


def _pick_arm(arms, label: str, where: str) -> ast.Arm:
    for a in arms:
        if a.label == label:
            return a
    for a in arms:
        if a.label == "_":
            return a
    raise ExprError(f"{where}: no arm for label {label!r}")


def _arm_label(arm: ast.Arm, label: str) -> str:
    return arm.alias or label


def instantiate_type1(t: ast.Type1Def, domain, t_w, domains: dict, name: str = "") -> Type1Policy:
    fibers = labelled_fibers(t_w, lambda tr: eval_classifier(t.cond, tr, domains))
    cond = Partition(frozenset(t_w), tuple(fibers.values()))
    rels, labels = {}, {}
    for label, block in fibers.items():
        arm = _pick_arm(t.arms, label, name or "type1")
        rels[block] = er_on(arm.body, domain, domains)
        labels[block] = _arm_label(arm, label)
    return Type1Policy(cond, rels, labels, name)


def instantiate_policy(p: ast.PolicyDef, system: System, domains: dict):
    """Concrete policy for ``system``'s subject domain and trace universe."""
    v = subject_domain(system)
    body = p.body
    if isinstance(body, ast.Type0Def):
        return Type0Policy(er_on(body.er, v, domains), p.name)
    if isinstance(body, ast.Type1Def):
        t_v = restrict_universe(system.universe, system.subject, v)
        return instantiate_type1(body, v, t_v, domains, p.name)
    fibers = labelled_fibers(v, lambda x: eval_classifier(body.cases, x, domains))
    cases = Partition(v, tuple(fibers.values()))
    subs, labels = {}, {}
    for label, w in fibers.items():
        arm = _pick_arm(body.arms, label, p.name)
        t_w = restrict_universe(system.universe, system.subject, w)
        if isinstance(arm.body, ast.Er):
            one = ast.Type1Def(ast.Classifier("const"), (ast.Arm("_", arm.body),))
            subs[w] = instantiate_type1(one, w, t_w, domains)
        else:
            subs[w] = instantiate_type1(arm.body, w, t_w, domains)
        labels[w] = _arm_label(arm, label)
    return Type2Policy(cases, subs, labels, p.name)


def subject_fn(sel: Optional[ast.Selector]) -> SubjectFn:
    if sel is None or sel.kind == "first_input":
        return SubjectFn()
    if sel.kind == "input":
        if sel.k is None:
            return SubjectFn("first_input", channel=sel.channel)
        return SubjectFn("kth_input", channel=sel.channel, k=sel.k)
    if sel.kind == "input_k":
        return SubjectFn("kth_input", k=sel.k)
    return SubjectFn("constant", constant=Value.parse(sel.value))


class Spec:
    """A parsed specification with its declarations evaluated on demand."""

    def __init__(self, model: ast.SpecModel, source: str = "<spec>"):
        self.model = model
        self.source = source
        self.domains = {d.name: domain_values(d) for d in model.domains}
        self._systems: dict = {}

    @classmethod
    def from_text(cls, text: str, source: str = "<spec>") -> "Spec":
        return cls(parse_spec(text), source)

    @classmethod
    def from_path(cls, path) -> "Spec":
        path = Path(path)
        return cls.from_text(path.read_text(encoding="utf-8"), str(path))

    def pick(self, items, name: Optional[str], what: str):
        """Declaration called ``name``, or the only one when ``name`` is None."""
        if name is None:
            if len(items) != 1:
                raise EpcError(f"--{what} is required: the file declares {len(items)} {what}s")
            return items[0]
        for d in items:
            if d.name == name:
                return d
        raise UnknownName(name)

    def system_names(self) -> list:
        return [s.name for s in self.model.systems]

    def system(self, name: Optional[str] = None) -> System:
        d = self.pick(self.model.systems, name, "system")
        if d.name not in self._systems:
            if d.body is not None:
                traces = expand_process(d.body, self.domains)
            else:
                traces = frozenset(parse_trace(t) for t in d.traces)
            extra = self.model.universe(d.name)
            universe = traces | frozenset(parse_trace(t) for t in (extra.traces if extra else ()))
            sub = self.model.subject(d.name)
            self._systems[d.name] = System(universe, traces, subject_fn(sub.selector if sub else None))
        return self._systems[d.name]

    def attacker(self, name: Optional[str] = None, universe=None) -> Attacker:
        d = self.pick(self.model.attackers, name, "attacker")
        return build_attacker(d.obs, universe, d.name)

    def policy(self, name: Optional[str], system: System):
        d = self.pick(self.model.policies, name, "policy")
        return instantiate_policy(d, system, self.domains)
