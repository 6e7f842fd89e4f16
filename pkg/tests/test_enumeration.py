import random

import pytest

from epc.core import subject_domain
from epc.enumeration import (
    all_kspaces,
    all_partitions,
    nonempty_subsets,
    product_universe,
    random_attacker,
    random_kspace,
    random_partition,
    random_system,
    random_type1,
    random_type2,
)


@pytest.mark.parametrize("n, bell", [(0, 1), (1, 1), (2, 2), (3, 5), (4, 15), (5, 52)])
def test_partition_counts(n, bell):
    parts = list(all_partitions(range(n)))
    assert len(parts) == bell
    assert len(set(parts)) == bell


@pytest.mark.parametrize("n, count", [(1, 1), (2, 5), (3, 109)])
def test_kspace_counts(n, count):
    spaces = list(all_kspaces(range(n)))
    assert len(spaces) == count
    assert all(frozenset().union(*k.sets) == frozenset(range(n)) for k in spaces)


def test_nonempty_subsets():
    assert len(nonempty_subsets(range(4))) == 15


def test_random_generators_are_seeded():
    def draw(seed):
        rng = random.Random(seed)
        return random_partition(rng, range(6)), random_kspace(rng, range(6))

    assert draw(9) == draw(9)


def test_random_objects_are_well_formed():
    rng = random.Random(2)
    u = product_universe(3, 2, 2)
    assert len(u) == 12
    for _ in range(50):
        s = random_system(rng, u)
        assert subject_domain(s) == frozenset(t.events[0].value for t in u)
        a = random_attacker(rng, u)
        assert a.relation(u).carrier == u
        v = subject_domain(s)
        p1 = random_type1(rng, u, s.subject, v)
        assert p1.is_total(s.subject)
        p2 = random_type2(rng, u, s.subject, v)
        assert p2.cases.carrier == v
