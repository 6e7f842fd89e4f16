import pytest

from epc.core import Value, parse_trace
from epc.errors import (
    DuplicateName,
    EmptyDomain,
    ExprError,
    SpecSyntaxError,
    UnknownName,
    UnknownSignal,
)
from epc.speclang import Spec, build_attacker, eval_classifier, expand_process, parse_spec, print_spec
from epc.speclang import ast
from epc.speclang.evaluate import NO_SIGNAL

from conftest import CORPUS, FIXTURES

L2 = """\
domain CC = 00..99
system vend {
  input cc : CC
  output charge = cc
  assign log := last(cc, 1)
  output log = log
  assign cc := null
  signal erased
  dump
}
attacker AS = after(erased)
policy L4 = type0 by last(1)
"""

OTP = """\
domain Bit = {0, 1}
system otp {
  input d : Bit
  input k : Bit
  assign out := xor(d, k)
  output out = out
  signal erased
  output dump = out
}
"""


def test_listing2_toy_counts():
    m = parse_spec(L2)
    assert (len(m.systems), len(m.attackers), len(m.policies)) == (1, 1, 1)


def test_listing4_policy_shape(listing):
    body = listing(4).model.policy("P2").body
    assert isinstance(body, ast.Type2Def) and len(body.arms) == 2
    non_stealth = next(a for a in body.arms if a.label == "false")
    assert isinstance(non_stealth.body, ast.Type1Def)
    s = listing(4).system()
    p = listing(4).policy("P2", s)
    assert len(p.cases.blocks) == 2
    sub = p.subpolicies[next(w for w, lab in p.labels.items() if lab == "nonSC")]
    assert len(sub.condition.blocks) == 2


@pytest.mark.parametrize("path", sorted(CORPUS.glob("*.eps")) + [FIXTURES / "listing4_leaky.eps"],
                         ids=lambda p: p.name)
def test_round_trip(path):
    m = parse_spec(path.read_text())
    printed = print_spec(m)
    assert parse_spec(printed) == m
    assert print_spec(parse_spec(printed)) == printed


def test_comments_and_signals_in_trace_literals():
    m = parse_spec("""\
# a comment
domain D = {a}   # trailing
system s traces {
  ?x=a.#erased.!y=a
}
""")
    assert m.system("s").traces == ("?x=a.#erased.!y=a",)
    assert Spec(m).system().traces == {parse_trace("?x=a.#erased.!y=a")}


@pytest.mark.parametrize("text, exc, line, col", [
    (L2.replace("input cc : CC", "input cc : CCX"), UnknownName, 3, 14),
    ("domain D = {a}\ndomain D = {b}\n", DuplicateName, 2, 1),
    ("domain D = 5..3\n", EmptyDomain, 1, 8),
    ("domain D = {}\n", EmptyDomain, 1, 8),
    ("domain D = {a}\nsystem s {\n  output o = zz\n}\n", UnknownName, 3, 14),
    ("domain D = {a}\nsystem s {\n  output o = a\n", SpecSyntaxError, 3, 1),
    ("policy P = type3 all\n", SpecSyntaxError, 1, 12),
    ("attacker A = after(\n", SpecSyntaxError, 1, 20),
    ("subject s = first_input\n", UnknownName, 1, 9),
    ("frobnicate\n", SpecSyntaxError, 1, 1),
])
def test_diagnostics_carry_positions(text, exc, line, col):
    with pytest.raises(exc) as info:
        parse_spec(text)
    assert (info.value.line, info.value.col) == (line, col)


def test_variable_scope_after_conditional():
    text = """\
domain D = {a, b}
system s {
  input x : D
  if x == a {
    assign y := x
  }
  output o = y
}
"""
    with pytest.raises(UnknownName):
        parse_spec(text)


def test_expand_otp():
    spec = Spec.from_text(OTP)
    traces = spec.system().traces
    assert len(traces) == 4
    assert parse_trace("?d=1.?k=1.!out=0.#erased.!dump=0") in traces


def test_expand_listing2_logs_digit_before_erasure(listing):
    traces = listing(2).system().traces
    assert len(traces) == 100
    for t in traces:
        rendered = [str(e) for e in t.events]
        cc = t.events[0].value
        assert rendered.index(f"!log={cc.number % 10}") < rendered.index("#erased")


def test_expand_listing4_respects_conditional(listing):
    for t in listing(4).system().traces:
        stealth = t.events[0].value.number < 10
        assert bool(t.inputs("choice")) != stealth
    assert len(listing(4).system().traces) == 10 + 90 * 2


def test_expansion_is_deterministic_and_counts_match_product(listing):
    spec = listing(3)
    body = spec.model.system("vend").body
    assert expand_process(body, spec.domains) == expand_process(body, spec.domains)
    assert len(expand_process(body, spec.domains)) == 100 * 2


def test_last_wider_than_value_is_an_error():
    text = "domain D = 0..9\nsystem s {\n  input x : D\n  output o = last(x, 2)\n}\n"
    with pytest.raises(ExprError):
        Spec.from_text(text).system()


def test_classifier_examples(listing):
    seven = Value.parse("07")
    assert eval_classifier(ast.Classifier("last", (1,)), seven) == "7"
    domains = {"SC": tuple(Value.num(n, 2) for n in range(10))}
    assert eval_classifier(ast.Classifier("in", ("SC",)), Value.parse("17"), domains) == "false"
    t = next(t for t in listing(3).system().traces if t.inputs("choice") == [Value.parse("a")])
    assert eval_classifier(ast.Classifier("has_input", ("choice", "a")), t) == "true"
    assert eval_classifier(ast.Classifier("input", (2,)), t) == "a"
    pair = ast.Classifier("pair", (ast.Classifier("mod", (2,)), ast.Classifier("const")))
    assert eval_classifier(pair, seven) == "(1,*)"
    with pytest.raises(ExprError):
        eval_classifier(ast.Classifier("last", (1,)), t)
    with pytest.raises(ExprError):
        eval_classifier(ast.Classifier("input", (5,)), t)


def test_attacker_observations(listing):
    t = parse_trace("?cc=07.#erased.!dump=7")
    assert build_attacker(ast.Obs("after", ("erased",)))(t) == "!dump=7"
    assert build_attacker(ast.Obs("after", ("erased",)))(parse_trace("?cc=07")) == NO_SIGNAL
    u = listing(2).system().universe
    none = build_attacker(ast.Obs("none"), u)
    assert len(none.relation(u).blocks) == 1
    log = build_attacker(ast.Obs("channels", ("log",)), u)
    rel = log.relation(u)
    assert len(rel.blocks) == 10
    assert all(len({tr.events[0].value.number % 10 for tr in b}) == 1 for b in rel.blocks)
    with pytest.raises(UnknownSignal):
        build_attacker(ast.Obs("after", ("nosuch",)), u)


def test_selectors_default_to_unique_declaration(listing):
    spec = listing(2)
    assert spec.system() is spec.system("vend")
    with pytest.raises(Exception, match="--attacker is required"):
        spec.attacker(None)
    with pytest.raises(UnknownName):
        spec.policy("nope", spec.system())


def test_subject_selector_declaration():
    text = OTP + "subject otp = input(k)\n"
    spec = Spec.from_text(text)
    s = spec.system()
    assert all(s.subject(t) == t.inputs("k")[0] for t in s.traces)
    assert parse_spec(print_spec(spec.model)) == spec.model


def test_universe_block_widens_universe():
    text = OTP + "universe otp {\n  ?d=0.?k=0.#erased.!out=1\n}\n"
    s = Spec.from_text(text).system()
    assert len(s.traces) == 4 and len(s.universe) == 5
