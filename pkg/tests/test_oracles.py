import json
import random

import pytest
from conftest import FIXTURES

from epc.core import Value
from epc.enumeration import all_kspaces, all_partitions, random_kspace
from epc.kspace import KSpace, Ordering, kleq, kleq_query_oracle
from epc.oracles import (
    STRICTNESS_CLAIMS,
    canonical_universes,
    claim_holds,
    compat_exhaustive,
    containment_exhaustive,
    containment_pair,
    covering_families,
    family_to_kspace,
    find_strictness_witness,
    kspace_to_family,
    union_lemma_exhaustive,
    universe_from_classes,
)
from epc.partitions import Partition
from epc.policy import weakly_compatible_oracle, weakly_compatible_type0


@pytest.mark.parametrize("n, count", [(1, 1), (2, 5), (3, 109), (4, 32297)])
def test_covering_family_counts(n, count):
    assert len(covering_families(n)) == count


def test_family_encoding_round_trips():
    spaces = list(all_kspaces(range(3)))
    assert sorted(kspace_to_family(k) for k in spaces) == sorted(int(f) for f in covering_families(3))
    for k in spaces:
        assert family_to_kspace(kspace_to_family(k), 3) == k


def test_containment_engine_matches_real_functions():
    rng = random.Random(3)
    for _ in range(200):
        n = rng.randint(1, 4)
        k1, k2 = random_kspace(rng, range(n)), random_kspace(rng, range(n))
        got = containment_pair(kspace_to_family(k1), kspace_to_family(k2), n)
        want = (kleq("u", k1, k2), kleq_query_oracle("u", k1, k2), kleq("l", k1, k2), kleq_query_oracle("l", k1, k2))
        assert got == want, (k1, k2)


def test_containment_exhaustive_small():
    r = containment_exhaustive(3)
    assert r.pairs == 109 ** 2
    assert r.upper_disagreements == r.lower_disagreements == 0


def test_union_engine_detects_non_closed_relations():
    # "K1 is a single knowledge set" is not preserved by unions over distinct sub-domains.
    r = union_lemma_exhaustive(2, Ordering.U, decide=lambda o, k1, k2: len(k1.sets) == 1)
    assert r.failures


def test_union_engine_passes_real_orderings_small():
    for o in ("u", "wa"):
        assert union_lemma_exhaustive(2, o).failures == ()


def test_canonical_universes():
    assert list(canonical_universes(1, 3)) == [(1,), (1, 1), (1, 1, 1)]
    for classes in canonical_universes(3, 5):
        assert sum(bin(c).count("1") for c in classes) <= 5
        assert classes == tuple(sorted(classes))


def _relation(p: Partition) -> Partition:
    return Partition.from_blocks([{Value.num(v) for v in b} for b in p.blocks])


@pytest.mark.parametrize("o", ["u", "l"])
def test_compat_engine_matches_concrete_oracle(o):
    """Re-decide every universe up to |T| = 5 over |V| <= 3 with the concrete search."""
    for n in (1, 2, 3):
        engine = {(c, p) for c, p in compat_exhaustive(n, 5, o).disagreements}
        for classes in canonical_universes(n, 5):
            universe, attacker = universe_from_classes(classes)
            subject = lambda t: t.events[0].value  # noqa: E731
            for p in all_partitions(range(n)):
                r = _relation(p)
                oracle = weakly_compatible_oracle(r, attacker, universe, subject, o)
                char = weakly_compatible_type0(r, attacker, universe, subject)
                assert ((classes, p) in engine) == (oracle != char), (classes, p)


def test_upper_characterisation_only_if_direction_fails():
    r = compat_exhaustive(3, 4, "u")
    assert r.if_failures == 0
    assert ((3, 5), Partition.from_blocks([{0}, {1, 2}])) in r.disagreements
    assert compat_exhaustive(3, 10, "l").disagreements == ()


def test_stored_witnesses_match_fresh_search():
    stored = json.loads((FIXTURES / "witnesses.json").read_text(encoding="utf-8"))
    assert set(stored) == set(STRICTNESS_CLAIMS)
    for name, w in stored.items():
        k1, k2 = find_strictness_witness(name)
        assert [list(x) for x in k1.canonical()] == w["k1"]
        assert [list(x) for x in k2.canonical()] == w["k2"]
        assert claim_holds(KSpace.of(w["k1"]), KSpace.of(w["k2"]), name)
