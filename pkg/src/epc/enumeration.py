"""Exhaustive enumerators and seeded random generators for desk-scale checks."""

from __future__ import annotations

import random
from itertools import combinations, product
from typing import Iterable, Iterator, Sequence

from .core import Event, SubjectFn, System, Trace, Value, restrict_universe, subject_domain
from .kspace import Attacker, KSpace
from .partitions import Partition, from_classifier
from .policy import Type0Policy, Type1Policy, Type2Policy


def all_partitions(elements: Sequence) -> Iterator[Partition]:
    """Every partition of ``elements`` (restricted-growth strings)."""
    elements = list(elements)
    n = len(elements)
    if n == 0:
        yield Partition(frozenset(), ())
        return

    def grow(i, labels, k):
        if i == n:
            blocks = [[] for _ in range(k)]
            for e, lab in zip(elements, labels):
                blocks[lab].append(e)
            yield Partition(frozenset(elements), tuple(frozenset(b) for b in blocks))
            return
        for lab in range(k + 1):
            labels.append(lab)
            yield from grow(i + 1, labels, max(k, lab + 1))
            labels.pop()

    yield from grow(0, [], 0)


def nonempty_subsets(elements: Sequence) -> list:
    elements = list(elements)
    return [frozenset(c) for r in range(1, len(elements) + 1) for c in combinations(elements, r)]


def all_kspaces(domain: Sequence) -> Iterator[KSpace]:
    """Every K-space over ``domain``: families of non-empty subsets covering it."""
    domain = frozenset(domain)
    subsets = nonempty_subsets(sorted(domain))
    for mask in range(1, 1 << len(subsets)):
        fam = [s for i, s in enumerate(subsets) if mask >> i & 1]
        if frozenset().union(*fam) == domain:
            yield KSpace(frozenset(fam), domain)


def random_partition(rng: random.Random, elements: Iterable, max_blocks: int | None = None) -> Partition:
    elements = sorted(elements)
    if not elements:
        return Partition(frozenset(), ())
    k = rng.randint(1, max_blocks or len(elements))
    labels = {e: rng.randrange(k) for e in elements}
    return from_classifier(elements, labels.__getitem__)


def random_kspace(rng: random.Random, domain: Iterable, max_sets: int = 6) -> KSpace:
    domain = sorted(domain)
    sets = set()
    for _ in range(rng.randint(1, max_sets)):
        size = rng.randint(1, len(domain))
        sets.add(frozenset(rng.sample(domain, size)))
    covered = frozenset().union(*sets)
    for v in domain:
        if v not in covered:
            # Attach each uncovered value to a random existing or fresh set.
            if sets and rng.random() < 0.5:
                x = rng.choice(sorted(sets, key=sorted))
                sets.discard(x)
                sets.add(x | {v})
            else:
                sets.add(frozenset([v]))
    return KSpace(frozenset(sets), frozenset(domain))


def random_partition_kspace(rng: random.Random, domain: Iterable) -> KSpace:
    return KSpace.from_partition(random_partition(rng, domain))


# -- random systems ---------------------------------------------------------

def product_universe(n_subjects: int, n_conditions: int, n_noise: int) -> frozenset:
    """Traces ``?s=v.?c=c.!o=y`` for every subject, condition and noise value."""
    return frozenset(
        Trace((Event.inp("s", Value.num(v)), Event.inp("c", Value.num(c)), Event.out("o", Value.num(y))))
        for v, c, y in product(range(n_subjects), range(n_conditions), range(n_noise))
    )


def random_attacker(rng: random.Random, universe: Iterable, max_labels: int = 4) -> Attacker:
    universe = sorted(universe)
    k = rng.randint(1, max_labels)
    table = {t: rng.randrange(k) for t in universe}
    return Attacker(table.__getitem__, f"rand{k}")


def random_system(rng: random.Random, universe: Iterable, subject=SubjectFn(), full_domain=True) -> System:
    """Uniform non-empty subset of ``universe``, optionally keeping every subject."""
    universe = sorted(universe)
    want = frozenset(subject(t) for t in universe)
    while True:
        traces = frozenset(t for t in universe if rng.random() < 0.5)
        if not traces:
            continue
        sys_ = System(frozenset(universe), traces, subject)
        if not full_domain or subject_domain(sys_) == want:
            return sys_


def condition_of(trace: Trace) -> Value:
    return trace.events[1].value


def random_type1(rng: random.Random, universe, subject, domain) -> Type1Policy:
    """Condition blocks group traces by a random labelling of the condition input."""
    t_v = restrict_universe(universe, subject, domain)
    conds = sorted({condition_of(t) for t in t_v})
    k = rng.randint(1, len(conds))
    lab = {c: rng.randrange(k) for c in conds}
    cond = from_classifier(t_v, lambda t: lab[condition_of(t)])
    rels = {b: random_partition(rng, domain) for b in cond.blocks}
    return Type1Policy(cond, rels)


def random_type2(rng: random.Random, universe, subject, domain) -> Type2Policy:
    cases = random_partition(rng, domain)
    subs = {w: random_type1(rng, universe, subject, w) for w in cases.blocks}
    return Type2Policy(cases, subs)


def random_type0(rng: random.Random, domain) -> Type0Policy:
    return Type0Policy(random_partition(rng, domain))
