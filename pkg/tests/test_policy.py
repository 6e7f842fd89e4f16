import random

import pytest

from epc.core import SubjectFn, System, Value, parse_trace, restrict_universe, subject_domain
from epc.enumeration import (
    condition_of,
    product_universe,
    random_attacker,
    random_partition,
    random_system,
    random_type0,
    random_type1,
)
from epc.errors import DomainMismatch, TotalityViolation
from epc.kspace import ALL_ORDERINGS, Attacker, Ordering
from epc.partitions import Partition, dagger, er_leq, from_classifier, identity, meet, total
from epc.policy import (
    NOT_FULL_DOMAIN,
    ORDER_VIOLATION,
    Type0Policy,
    Type1Policy,
    Type2Policy,
    as_type1,
    as_type2,
    bound,
    bound_type1,
    bound_type2,
    check,
    check_type0,
    check_type1,
    check_type2,
    explicitness_holds,
    weakly_compatible_oracle,
    weakly_compatible_type0,
)
from epc.speclang import Spec

from conftest import FIXTURES

CC = frozenset(Value.num(n, 2) for n in range(100))
SC = frozenset(Value.num(n, 2) for n in range(10))


def last_digit(carrier):
    return from_classifier(carrier, lambda v: v.number % 10)


# -- type 0 --------------------------------------------------------------------

def test_listing2_type0(listing):
    spec = listing(2)
    s = spec.system()
    as_ = spec.attacker("AS", s.universe)
    l4 = spec.policy("L4", s)
    assert l4.relation == last_digit(CC)
    for o in ALL_ORDERINGS:
        assert check_type0(s, as_, l4, o).satisfied
    v = check_type0(s, spec.attacker("Full", s.universe), l4, Ordering.EM)
    assert not v.satisfied
    assert v.failures[0].reason == ORDER_VIOLATION


def test_identity_policy_always_satisfied():
    rng = random.Random(11)
    u = product_universe(3, 2, 2)
    for _ in range(100):
        s = random_system(rng, u)
        a = random_attacker(rng, u)
        p = Type0Policy(identity(subject_domain(s)))
        for o in ALL_ORDERINGS:
            assert check_type0(s, a, p, o).satisfied


def test_type0_domain_mismatch(listing):
    s = listing(2).system()
    with pytest.raises(DomainMismatch):
        check_type0(s, Attacker(str), Type0Policy(total(SC)), Ordering.U)


# -- type 1 --------------------------------------------------------------------

def test_listing3_type1(listing):
    spec = listing(3)
    s = spec.system()
    ch = spec.policy("Ch", s)
    assert sorted(ch.labels.values()) == ["Y", "Ybar"]
    for label, block, _ in ch.blocks():
        assert subject_domain(s.restrict(block)) == CC
    for o in ALL_ORDERINGS:
        assert check_type1(s, spec.attacker("AS", s.universe), ch, o).satisfied
    assert bound_type1(ch) == last_digit(CC)
    assert explicitness_holds(s, spec.attacker("AS", s.universe), ch, Ordering.EM)


def test_condition_on_subject_is_not_total(listing):
    s = listing(3).system()
    cond = from_classifier(s.universe, s.subject)
    p = Type1Policy(cond, {b: total(CC) for b in cond.blocks})
    with pytest.raises(TotalityViolation):
        check_type1(s, Attacker(str), p, Ordering.U)


def test_not_full_domain_failure():
    u = product_universe(2, 2, 1)
    s = System(u, frozenset(t for t in u if not (condition_of(t).number == 1 and t.events[0].value.number == 0)))
    v = subject_domain(s)
    cond = from_classifier(u, condition_of)
    p = Type1Policy(cond, {b: total(v) for b in cond.blocks}, {b: f"c{i}" for i, b in enumerate(cond.blocks)})
    verdict = check_type1(s, Attacker(lambda t: 0), p, Ordering.U)
    assert not verdict.satisfied
    [f] = verdict.failures
    assert f.reason == NOT_FULL_DOMAIN and f.label == "c1" and f.missing == {Value.num(0)}
    assert verdict.render() == ["VIOLATED (c1: NotFullDomain missing {0})"]


def test_type1_map_must_be_total():
    cond = Partition.from_blocks([{1}, {2}])
    with pytest.raises(DomainMismatch):
        Type1Policy(cond, {frozenset({1}): total({"a"})})


def test_bound_type1_examples():
    cond = Partition.from_blocks([{1}, {2}, {3}])
    r = last_digit(CC)
    assert bound_type1(Type1Policy(cond, {b: r for b in cond.blocks})) == r
    parity = from_classifier(CC, lambda v: v.number % 2)
    two = Partition.from_blocks([{1}, {2}])
    assert bound_type1(Type1Policy(two, {frozenset({1}): r, frozenset({2}): parity})) == r


def test_degenerate_type1_equals_type0():
    rng = random.Random(5)
    u = product_universe(3, 2, 2)
    for _ in range(150):
        s = random_system(rng, u)
        a = random_attacker(rng, u)
        p0 = random_type0(rng, subject_domain(s))
        p1 = as_type1(p0, restrict_universe(u, s.subject, p0.domain))
        for o in ALL_ORDERINGS:
            assert check(s, a, p0, o).satisfied == check(s, a, p1, o).satisfied


# -- type 2 --------------------------------------------------------------------

def test_listing4_type2(listing):
    spec = listing(4)
    s = spec.system()
    p2 = spec.policy("P2", s)
    assert p2.cases == Partition(CC, (SC, CC - SC))
    assert sorted(p2.labels.values()) == ["SC", "nonSC"]
    for o in ALL_ORDERINGS:
        assert check_type2(s, spec.attacker("AS", s.universe), p2, o).satisfied
    expected = dagger(last_digit(CC - SC), CC)
    assert bound_type2(p2) == expected
    assert SC in expected.blocks and len(expected.blocks) == 11


def test_leaky_listing4_names_stealth_block():
    spec = Spec.from_path(FIXTURES / "listing4_leaky.eps")
    s = spec.system()
    v = check_type2(s, spec.attacker("AS", s.universe), spec.policy("P2", s), Ordering.EM)
    assert not v.satisfied
    assert {f.label.split("/")[0] for f in v.failures} == {"SC"}


def test_degenerate_type2_equals_type1():
    rng = random.Random(9)
    u = product_universe(3, 3, 2)
    for _ in range(150):
        s = random_system(rng, u)
        a = random_attacker(rng, u)
        p1 = random_type1(rng, u, s.subject, subject_domain(s))
        p2 = as_type2(p1)
        assert bound(p2) == bound(p1)
        for o in ALL_ORDERINGS:
            try:
                expected = check(s, a, p1, o).satisfied
            except TotalityViolation:
                with pytest.raises(TotalityViolation):
                    check(s, a, p2, o)
                continue
            assert check(s, a, p2, o).satisfied == expected


def test_bound_type2_of_total_erasure_cases_is_case_partition():
    u = product_universe(4, 2, 1)
    v = frozenset(Value.num(i) for i in range(4))
    cases = Partition.from_blocks([{Value.num(0), Value.num(1)}, {Value.num(2), Value.num(3)}])
    subs = {}
    for w in cases.blocks:
        t_w = restrict_universe(u, SubjectFn(), w)
        subs[w] = Type1Policy(Partition(t_w, (t_w,)), {t_w: total(w)})
    assert bound_type2(Type2Policy(cases, subs)) == cases
    # A single case reduces to the Type-1 bound.
    t_v = restrict_universe(u, SubjectFn(), v)
    p1 = Type1Policy(Partition(t_v, (t_v,)), {t_v: identity(v)})
    assert bound_type2(as_type2(p1)) == bound_type1(p1)


# -- monotonicity and compatibility ----------------------------------------------

def test_satisfaction_is_downward_closed_in_permissiveness():
    """Satisfying a coarser policy implies satisfying every finer one."""
    rng = random.Random(21)
    u = product_universe(4, 2, 2)
    checked = 0
    for _ in range(300):
        s = random_system(rng, u)
        a = random_attacker(rng, u)
        v = subject_domain(s)
        r2 = random_partition(rng, v)
        r1 = meet(r2, random_partition(rng, v))
        assert er_leq(r1, r2)
        for o in ALL_ORDERINGS:
            if check_type0(s, a, Type0Policy(r2), o).satisfied:
                checked += 1
                assert check_type0(s, a, Type0Policy(r1), o).satisfied
    assert checked > 100


def test_weak_compatibility_trivial_cases():
    u = frozenset(parse_trace(f"?x={i}.!y={j}") for i in range(3) for j in range(2))
    v = frozenset(Value.num(i) for i in range(3))
    phi = SubjectFn()
    assert weakly_compatible_type0(identity(v), Attacker(lambda t: 0), u, phi)
    assert not weakly_compatible_type0(total(v), Attacker(str), u, phi)


def test_weak_compatibility_characterization_is_exact_for_lower_order():
    rng = random.Random(4)
    phi = SubjectFn()
    for _ in range(200):
        u = product_universe(3, 1, rng.randint(1, 3))
        a = random_attacker(rng, u, max_labels=4)
        r = random_partition(rng, frozenset(Value.num(i) for i in range(3)))
        assert weakly_compatible_type0(r, a, u, phi) == weakly_compatible_oracle(r, a, u, phi, Ordering.L)


def test_weak_u_compatibility_characterization_counterexample():
    """Two observation classes can jointly cover a policy class neither covers alone."""
    traces = [parse_trace(x) for x in ("?x=1.!o=p", "?x=2.!o=p", "?x=1.!o=q", "?x=3.!o=q")]
    u = frozenset(traces)
    obs = Attacker(lambda t: str(t.events[1]))
    one, two, three = (Value.num(i) for i in (1, 2, 3))
    r = Partition.from_blocks([{one}, {two, three}])
    assert weakly_compatible_oracle(r, obs, u, SubjectFn(), Ordering.U)
    assert not weakly_compatible_type0(r, obs, u, SubjectFn())
