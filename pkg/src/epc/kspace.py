"""Attackers, knowledge sets, K-spaces and the five K-space orderings.

Orderings are decided exactly. Upper and lower use the powerdomain
characterisations. Will-answer compares the connected-component partitions
of the two K-spaces, which is exact for any pair. Can-answer is exact in
closed form when the left operand is a partition (the policy-satisfaction
case); otherwise it falls back to enumerating queries, bounded by ``cap``.

``kleq_query_oracle`` decides the same orderings straight from their
quantified definitions over all facts or queries and is kept independent of
the code paths in ``kleq``.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Callable, Iterable, Optional

from .core import System
from .errors import CapExceeded, DomainMismatch, EmptySystem, EpcError
from .partitions import Partition, from_classifier

DEFAULT_CAP = 22


class Ordering(str, enum.Enum):
    U = "u"
    L = "l"
    EM = "em"
    CA = "ca"
    WA = "wa"

    @classmethod
    def parse(cls, text) -> "Ordering":
        if isinstance(text, Ordering):
            return text
        return cls(str(text).lower())


ALL_ORDERINGS = tuple(Ordering)

@dataclass(frozen=True)
class Attacker:
    """Passive observer given by an observation function on traces.

    Two traces are indistinguishable iff their observations are equal, so
    the induced relation is an equivalence by construction.
    """

    observe: Callable
    name: str = "A"

    def relation(self, universe: Iterable) -> Partition:
        return from_classifier(universe, self.observe)

    def __call__(self, trace):
        return self.observe(trace)


def attacker_from_partition(rel: Partition, name: str = "A") -> Attacker:
    """Attacker whose observation is the block containing the trace."""
    return Attacker(rel.class_of, name)


@dataclass(frozen=True)
class KSpace:
    """A set of non-empty knowledge sets covering ``domain``."""

    sets: frozenset
    domain: frozenset

    def __post_init__(self):
        sets = frozenset(frozenset(x) for x in self.sets)
        object.__setattr__(self, "sets", sets)
        object.__setattr__(self, "domain", frozenset(self.domain))
        if any(not x for x in sets):
            raise EpcError("knowledge sets must be non-empty")
        if frozenset().union(*sets) != self.domain:
            raise EpcError("K-space does not cover its domain")

    @classmethod
    def of(cls, sets: Iterable[Iterable]) -> "KSpace":
        sets = frozenset(frozenset(x) for x in sets)
        return cls(sets, frozenset().union(*sets))

    @classmethod
    def from_partition(cls, p: Partition) -> "KSpace":
        return cls(frozenset(p.blocks), p.carrier)

    @classmethod
    def union(cls, spaces: Iterable["KSpace"]) -> "KSpace":
        spaces = list(spaces)
        return cls(
            frozenset().union(*(k.sets for k in spaces)),
            frozenset().union(*(k.domain for k in spaces)),
        )

    def __iter__(self):
        return iter(self.sets)

    def __len__(self):
        return len(self.sets)

    def __contains__(self, x):
        return frozenset(x) in self.sets

    @property
    def is_partition(self) -> bool:
        return sum(len(x) for x in self.sets) == len(self.domain)

    def to_partition(self) -> Partition:
        if not self.is_partition:
            raise EpcError("K-space is not a partition")
        return Partition(self.domain, tuple(self.sets))

    def canonical(self) -> list:
        return sorted((tuple(sorted(x)) for x in self.sets), key=lambda t: (t[0], t))

    def render(self) -> str:
        return "\n".join("{" + " ".join(str(v) for v in x) + "}" for x in self.canonical())


def knowledge_set(system: System, observation_class: Iterable) -> frozenset:
    return frozenset(system.subject(t) for t in system.traces.intersection(observation_class))


def build_kspace(system: System, attacker: Attacker) -> KSpace:
    """K(S, A): one knowledge set per observation class meeting S."""
    if not system.traces:
        raise EmptySystem()
    by_obs: dict = {}
    for t in system.traces:
        by_obs.setdefault(attacker.observe(t), set()).add(system.subject(t))
    sets = frozenset(frozenset(v) for v in by_obs.values())
    return KSpace(sets, frozenset().union(*sets))


# -- pointwise deduction predicates -----------------------------------------

def _check_within(x, domain, what):
    if not frozenset(x) <= domain:
        raise DomainMismatch(f"{what} is not a subset of the subject domain")


def confirms(x: Iterable, fact: Iterable) -> bool:
    return frozenset(x) <= frozenset(fact)


def has_uncertainty(x: Iterable, fact: Iterable) -> bool:
    return frozenset(fact) <= frozenset(x)


def answers(x: Iterable, query: Iterable, domain: Iterable) -> bool:
    x, query, domain = frozenset(x), frozenset(query), frozenset(domain)
    _check_within(x, domain, "knowledge set")
    _check_within(query, domain, "query")
    return x <= query or x <= domain - query


def can_confirm(k: KSpace, fact: Iterable) -> bool:
    fact = frozenset(fact)
    _check_within(fact, k.domain, "fact")
    return any(x <= fact for x in k.sets)


def can_have_uncertainty(k: KSpace, fact: Iterable) -> bool:
    fact = frozenset(fact)
    _check_within(fact, k.domain, "fact")
    return any(fact <= x for x in k.sets)


def will_answer(k: KSpace, query: Iterable) -> bool:
    return all(answers(x, query, k.domain) for x in k.sets)


def can_answer(k: KSpace, query: Iterable) -> bool:
    return any(answers(x, query, k.domain) for x in k.sets)


def keeps_fact_secret(system: System, attacker: Attacker, fact: Iterable) -> bool:
    return not can_confirm(build_kspace(system, attacker), fact)


def keeps_query_secret(system: System, attacker: Attacker, query: Iterable) -> bool:
    return not can_answer(build_kspace(system, attacker), query)


# -- orderings --------------------------------------------------------------

@dataclass(frozen=True)
class Witness:
    """Why ``K1 ⊑o K2`` fails.

    ``kind`` is ``"upper"`` (a member of K2 with no member of K1 inside it),
    ``"lower"`` (a member of K1 inside no member of K2) or ``"query"`` (a
    query K2 can/will answer that K1 cannot/will not).
    """

    ordering: Ordering
    kind: str
    subset: frozenset

    def render(self) -> str:
        body = "{" + " ".join(str(v) for v in sorted(self.subset)) + "}"
        if self.kind == "upper":
            return f"knowledge set {body} contains no block"
        if self.kind == "lower":
            return f"block {body} lies in no knowledge set"
        verb = "can" if self.ordering is Ordering.CA else "will"
        return f"query {body}: attacker {verb} answer, policy does not"


def _same_domain(k1: KSpace, k2: KSpace):
    if k1.domain != k2.domain:
        raise DomainMismatch("K-spaces are over different subject domains")


def _upper_witness(k1: KSpace, k2: KSpace) -> Optional[frozenset]:
    for x2 in sorted(k2.sets, key=sorted):
        if not any(x1 <= x2 for x1 in k1.sets):
            return x2
    return None


def _lower_witness(k1: KSpace, k2: KSpace) -> Optional[frozenset]:
    for x1 in sorted(k1.sets, key=sorted):
        if not any(x1 <= x2 for x2 in k2.sets):
            return x1
    return None


def components(k: KSpace) -> Partition:
    """Finest partition each of whose blocks is a union of members of ``k``."""
    parent = {v: v for v in k.domain}

    def find(v):
        while parent[v] != v:
            parent[v] = parent[parent[v]]
            v = parent[v]
        return v

    for x in k.sets:
        it = iter(x)
        root = find(next(it))
        for v in it:
            r = find(v)
            if r != root:
                parent[r] = root
    return from_classifier(k.domain, find)


def _wa_witness(k1: KSpace, k2: KSpace) -> Optional[frozenset]:
    # K will answer Q iff Q is a union of components of K.
    c1, c2 = components(k1), components(k2)
    for block in c2.blocks:
        if not all(c1.class_of(v) <= block for v in block):
            return block
    return None


def _ca_witness_partition(p: KSpace, k2: KSpace) -> Optional[frozenset]:
    # A singleton block answers every query.
    if any(len(b) == 1 for b in p.sets):
        return None
    x2 = _upper_witness(p, k2)
    if x2 is None:
        return None
    # Every block straddles q: blocks meeting x2 already do; add one element
    # of each block disjoint from x2 (blocks have >= 2 elements).
    q = set(x2)
    for b in p.sets:
        if not (b & x2):
            q.add(min(b))
    return frozenset(q)


class _Bits:
    """Bitmask encoding of subsets of a fixed domain."""

    def __init__(self, domain: frozenset):
        self.elems = sorted(domain)
        self.pos = {v: i for i, v in enumerate(self.elems)}
        self.full = (1 << len(self.elems)) - 1

    def mask(self, xs) -> int:
        m = 0
        for v in xs:
            m |= 1 << self.pos[v]
        return m

    def unmask(self, m: int) -> frozenset:
        return frozenset(v for i, v in enumerate(self.elems) if m >> i & 1)


def _enumerated_query_witness(o: Ordering, k1: KSpace, k2: KSpace, cap: int) -> Optional[frozenset]:
    n = len(k1.domain)
    if n > cap:
        raise CapExceeded(n, cap)
    bits = _Bits(k1.domain)
    full = bits.full
    m1 = [bits.mask(x) for x in k1.sets]
    m2 = [bits.mask(x) for x in k2.sets]

    def ans(m, q):
        return m & ~q & full == 0 or m & q == 0

    # Answering q and its complement coincide, so fix the top element in q.
    top = 1 << (n - 1) if n else 0
    for low in range(1 << max(n - 1, 0)):
        q = low | top
        if o is Ordering.CA:
            if any(ans(m, q) for m in m2) and not any(ans(m, q) for m in m1):
                return bits.unmask(q)
        elif all(ans(m, q) for m in m2) and not all(ans(m, q) for m in m1):
            return bits.unmask(q)
    return None


def korder_witness(o, k1: KSpace, k2: KSpace, cap: int = DEFAULT_CAP) -> Optional[Witness]:
    """``None`` iff ``K1 ⊑o K2``; otherwise a concrete reason it fails."""
    o = Ordering.parse(o)
    _same_domain(k1, k2)
    if o in (Ordering.U, Ordering.EM):
        x = _upper_witness(k1, k2)
        if x is not None:
            return Witness(o, "upper", x)
    if o in (Ordering.L, Ordering.EM):
        x = _lower_witness(k1, k2)
        if x is not None:
            return Witness(o, "lower", x)
    if o is Ordering.WA:
        q = _wa_witness(k1, k2)
        if q is not None:
            return Witness(o, "query", q)
    if o is Ordering.CA:
        if k1.is_partition:
            q = _ca_witness_partition(k1, k2)
        else:
            q = _enumerated_query_witness(o, k1, k2, cap)
        if q is not None:
            return Witness(o, "query", q)
    return None


def kleq(o, k1: KSpace, k2: KSpace, cap: int = DEFAULT_CAP) -> bool:
    return korder_witness(o, k1, k2, cap) is None


def kleq_query_oracle(o, k1: KSpace, k2: KSpace, cap: int = DEFAULT_CAP) -> bool:
    """Decide ``K1 ⊑o K2`` by enumerating every fact or query ``⊆ V``."""
    o = Ordering.parse(o)
    _same_domain(k1, k2)
    n = len(k1.domain)
    if n > cap:
        raise CapExceeded(n, cap)
    if o is Ordering.EM:
        return kleq_query_oracle(Ordering.U, k1, k2, cap) and kleq_query_oracle(Ordering.L, k1, k2, cap)
    bits = _Bits(k1.domain)
    full = bits.full
    s1 = [bits.mask(x) for x in k1.sets]
    s2 = [bits.mask(x) for x in k2.sets]

    def confirm(k, f):
        return any(x & ~f == 0 for x in k)

    def uncertain(k, f):
        return any(f & ~x == 0 for x in k)

    def answer(x, q):
        return x & ~q & full == 0 or x & q == 0

    for f in range(1 << n):
        if o is Ordering.U:
            ok = not confirm(s2, f) or confirm(s1, f)
        elif o is Ordering.L:
            ok = not uncertain(s1, f) or uncertain(s2, f)
        elif o is Ordering.CA:
            ok = not any(answer(x, f) for x in s2) or any(answer(x, f) for x in s1)
        else:
            ok = not all(answer(x, f) for x in s2) or all(answer(x, f) for x in s1)
        if not ok:
            return False
    return True

