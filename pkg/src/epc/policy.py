"""Type 0/1/2 erasure policies, satisfaction, explicitness bounds, compatibility."""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from typing import Mapping, Optional, Union

from .core import System, image, restrict_universe, subject_domain
from .errors import CapExceeded, DomainMismatch, SubDomainGap, TotalityViolation
from .kspace import (
    DEFAULT_CAP,
    Attacker,
    KSpace,
    Ordering,
    Witness,
    build_kspace,
    korder_witness,
    kleq,
)
from .partitions import Partition, dagger, meet

NOT_FULL_DOMAIN = "NotFullDomain"
ORDER_VIOLATION = "OrderViolation"


@dataclass(frozen=True)
class Type0Policy:
    relation: Partition
    name: str = ""

    @property
    def domain(self) -> frozenset:
        return self.relation.carrier


def _default_labels(blocks) -> dict:
    return {b: f"block{i}" for i, b in enumerate(blocks)}


@dataclass(frozen=True)
class Type1Policy:
    """Erasure conditioned on non-subject trace data.

    ``condition`` partitions the traces ``T_V``; ``relations`` maps each of its
    blocks to a visibility relation on ``V``.
    """

    condition: Partition
    relations: Mapping
    labels: Mapping = field(default=None, compare=False)
    name: str = ""

    def __post_init__(self):
        rels = {frozenset(k): v for k, v in self.relations.items()}
        if set(rels) != set(self.condition.blocks):
            raise DomainMismatch("relation map must be total on the condition blocks")
        carriers = {r.carrier for r in rels.values()}
        if len(carriers) > 1:
            raise DomainMismatch("all mapped relations must share one carrier")
        object.__setattr__(self, "relations", rels)
        labels = _default_labels(self.condition.blocks)
        labels.update({frozenset(k): v for k, v in (self.labels or {}).items()})
        object.__setattr__(self, "labels", labels)

    @property
    def domain(self) -> frozenset:
        return next(iter(self.relations.values())).carrier

    def blocks(self):
        """Condition blocks in canonical order with label and relation."""
        for b in self.condition.blocks:
            yield self.labels[b], b, self.relations[b]

    def totality_gaps(self, subject) -> dict:
        """Blocks X with ``Φ(X) ≠ V``, mapped to the missing subjects."""
        v = self.domain
        gaps = {}
        for label, b, _ in self.blocks():
            missing = v - image(subject, b)
            if missing:
                gaps[label] = missing
        return gaps

    def is_total(self, subject) -> bool:
        return not self.totality_gaps(subject)


@dataclass(frozen=True)
class Type2Policy:
    """Erasure conditioned on the subject itself.

    ``cases`` partitions ``V``; each case ``W`` carries a Type-1 policy over
    the sub-domain ``W``.
    """

    cases: Partition
    subpolicies: Mapping
    labels: Mapping = field(default=None, compare=False)
    name: str = ""

    def __post_init__(self):
        subs = {frozenset(k): v for k, v in self.subpolicies.items()}
        if set(subs) != set(self.cases.blocks):
            raise DomainMismatch("sub-policy map must be total on the cases")
        for w, p in subs.items():
            if p.domain != w:
                raise DomainMismatch("sub-policy carrier differs from its case")
        object.__setattr__(self, "subpolicies", subs)
        labels = _default_labels(self.cases.blocks)
        labels.update({frozenset(k): v for k, v in (self.labels or {}).items()})
        object.__setattr__(self, "labels", labels)

    @property
    def domain(self) -> frozenset:
        return self.cases.carrier

    def blocks(self):
        for w in self.cases.blocks:
            yield self.labels[w], w, self.subpolicies[w]


Policy = Union[Type0Policy, Type1Policy, Type2Policy]


@dataclass(frozen=True)
class Failure:
    label: str
    reason: str
    witness: Optional[Witness] = None
    missing: frozenset = frozenset()

    def render(self) -> str:
        if self.reason == NOT_FULL_DOMAIN:
            shown = " ".join(str(v) for v in sorted(self.missing))
            return f"{self.label}: {NOT_FULL_DOMAIN} missing {{{shown}}}"
        return f"{self.label}: {ORDER_VIOLATION} {self.witness.render()}"


@dataclass(frozen=True)
class Verdict:
    satisfied: bool
    ordering: Ordering
    failures: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "failures", tuple(self.failures))
        if self.satisfied == bool(self.failures):
            raise ValueError("satisfied iff there are no failures")

    @classmethod
    def of(cls, ordering: Ordering, failures) -> "Verdict":
        failures = tuple(failures)
        return cls(not failures, ordering, failures)

    def relabel(self, prefix: str) -> "Verdict":
        return Verdict(
            self.satisfied,
            self.ordering,
            tuple(Failure(f"{prefix}/{f.label}", f.reason, f.witness, f.missing) for f in self.failures),
        )

    def render(self) -> list:
        if self.satisfied:
            return ["SATISFIED"]
        return [f"VIOLATED ({f.render()})" for f in self.failures]


def _relation_domain_check(system: System, v: frozenset) -> frozenset:
    dom = subject_domain(system)
    if dom != v:
        raise DomainMismatch("policy carrier differs from the system's subject domain")
    return dom


def check_type0(
    system: System, attacker: Attacker, p: Type0Policy, o, cap: int = DEFAULT_CAP, label: str = "*"
) -> Verdict:
    o = Ordering.parse(o)
    _relation_domain_check(system, p.domain)
    k = build_kspace(system, attacker)
    w = korder_witness(o, KSpace.from_partition(p.relation), k, cap)
    return Verdict.of(o, [] if w is None else [Failure(label, ORDER_VIOLATION, w)])


def check_type1(system: System, attacker: Attacker, p: Type1Policy, o, cap: int = DEFAULT_CAP) -> Verdict:
    o = Ordering.parse(o)
    v = _relation_domain_check(system, p.domain)
    t_v = restrict_universe(system.universe, system.subject, v)
    if p.condition.carrier != t_v:
        raise DomainMismatch("condition does not partition the traces with subject in V")
    gaps = p.totality_gaps(system.subject)
    if gaps:
        label = min(gaps)
        raise TotalityViolation(label, gaps[label])
    failures = []
    for label, block, rel in p.blocks():
        sub = system.restrict(block)
        missing = v - subject_domain(sub)
        if missing:
            failures.append(Failure(label, NOT_FULL_DOMAIN, missing=missing))
            continue
        failures.extend(check_type0(sub, attacker, Type0Policy(rel), o, cap, label).failures)
    return Verdict.of(o, failures)


def check_type2(system: System, attacker: Attacker, p: Type2Policy, o, cap: int = DEFAULT_CAP) -> Verdict:
    o = Ordering.parse(o)
    _relation_domain_check(system, p.domain)
    failures = []
    for label, w, sub_policy in p.blocks():
        sub = system.restrict(restrict_universe(system.universe, system.subject, w))
        missing = w - subject_domain(sub)
        if missing:
            raise SubDomainGap(label, missing)
        failures.extend(check_type1(sub, attacker, sub_policy, o, cap).relabel(label).failures)
    return Verdict.of(o, failures)


def check(system: System, attacker: Attacker, p: Policy, o, cap: int = DEFAULT_CAP) -> Verdict:
    if isinstance(p, Type0Policy):
        return check_type0(system, attacker, p, o, cap)
    if isinstance(p, Type1Policy):
        return check_type1(system, attacker, p, o, cap)
    return check_type2(system, attacker, p, o, cap)


def bound_type1(p: Type1Policy) -> Partition:
    return meet(list(p.relations.values()))


def bound_type2(p: Type2Policy) -> Partition:
    v = p.domain
    parts = [p.cases]
    parts.extend(dagger(bound_type1(sub), v) for _, _, sub in p.blocks())
    return meet(parts)


def bound(p: Policy) -> Partition:
    if isinstance(p, Type0Policy):
        return p.relation
    if isinstance(p, Type1Policy):
        return bound_type1(p)
    return bound_type2(p)


def explicitness_holds(system: System, attacker: Attacker, p: Policy, o, cap: int = DEFAULT_CAP) -> bool:
    """Whether the policy's bound lies below the attacker's K-space under ``o``."""
    return kleq(o, KSpace.from_partition(bound(p)), build_kspace(system, attacker), cap)


def as_type1(p: Type0Policy, traces) -> Type1Policy:
    """The one-block Type-1 policy with condition ``{traces}``."""
    traces = frozenset(traces)
    return Type1Policy(Partition(traces, (traces,)), {traces: p.relation}, {traces: "*"}, p.name)


def as_type2(p: Type1Policy) -> Type2Policy:
    v = p.domain
    return Type2Policy(Partition(v, (v,)), {v: p}, {v: "*"}, p.name)


def observation_images(attacker: Attacker, universe, subject) -> list:
    """``Φ(O)`` for every observation class ``O`` of the universe."""
    imgs: dict = {}
    for t in universe:
        imgs.setdefault(attacker.observe(t), set()).add(subject(t))
    return [frozenset(s) for s in imgs.values()]


def weakly_compatible_type0(relation: Partition, attacker: Attacker, universe, subject) -> bool:
    """Every class of ``relation`` fits inside the subject image of one observation class."""
    imgs = observation_images(attacker, universe, subject)
    return all(any(block <= img for img in imgs) for block in relation.blocks)


def weakly_compatible_oracle(
    relation: Partition,
    attacker: Attacker,
    universe,
    subject,
    o=Ordering.U,
    limit: int = 16,
    cap: int = DEFAULT_CAP,
) -> bool:
    """Search all systems ``S ⊆ T_V`` with ``Φ(S) = V`` for one satisfying ``relation``."""
    o = Ordering.parse(o)
    v = relation.carrier
    t_v = sorted(restrict_universe(universe, subject, v))
    if len(t_v) > limit:
        raise CapExceeded(len(t_v), limit)
    policy = Type0Policy(relation)
    universe = frozenset(universe)
    for r in range(1, len(t_v) + 1):
        for traces in combinations(t_v, r):
            sys_ = System(universe, frozenset(traces), subject)
            if subject_domain(sys_) != v:
                continue
            if check_type0(sys_, attacker, policy, o, cap).satisfied:
                return True
    return False
