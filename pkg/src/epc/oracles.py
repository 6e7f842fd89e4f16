"""Vectorised brute-force engines for exhaustive checks over tiny domains.

Subject values are ``0..n-1``; a subset of them is an integer bitmask (its
*code*), and a family of subsets is a bitmask over codes. With ``n <= 4`` a
family fits in 16 bits, so every K-space over ``V`` can be processed at once
with numpy. The engines evaluate the textbook quantified definitions (over all
facts, queries or systems) independently from the fast decision procedures
in :mod:`epc.kspace` and :mod:`epc.policy`, and the tests cross-check the
engines against those functions on samples.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .enumeration import all_partitions
from .kspace import KSpace, Ordering, kleq

# -- families of subsets -----------------------------------------------------

def all_families(n: int) -> np.ndarray:
    """Every family of non-empty subsets of ``range(n)`` (bit ``s`` = subset ``s``)."""
    if n > 4:
        raise ValueError("families are enumerated for n <= 4 only")
    codes = (1 << n) - 1
    return np.arange(1 << codes, dtype=np.int64) << 1


def family_union(fams: np.ndarray, n: int) -> np.ndarray:
    uni = np.zeros_like(fams)
    for s in range(1, 1 << n):
        uni |= np.where(fams >> s & 1, s, 0)
    return uni


def covering_families(n: int, target: int | None = None) -> np.ndarray:
    """Families whose union is ``target`` (default: all of ``range(n)``)."""
    fams = all_families(n)
    target = (1 << n) - 1 if target is None else target
    return fams[family_union(fams, n) == target]


def family_to_kspace(fam: int, n: int) -> KSpace:
    sets = [frozenset(i for i in range(n) if s >> i & 1) for s in range(1, 1 << n) if fam >> s & 1]
    return KSpace.of(sets)


def kspace_to_family(k: KSpace) -> int:
    fam = 0
    for x in k.sets:
        fam |= 1 << sum(1 << i for i in x)
    return fam


def _member_table(n: int, pred) -> list:
    """For each code ``a``, the bitmask of codes ``b`` (``b >= 1``) with ``pred(a, b)``."""
    return [sum(1 << b for b in range(1, 1 << n) if pred(a, b)) for a in range(1 << n)]


# -- upper/lower characterisation versus fact enumeration ----------------------

def upper_closure(fams: np.ndarray, n: int) -> np.ndarray:
    """Codes ``X`` such that some member ``X1`` satisfies ``X1 ⊆ X``."""
    supersets = _member_table(n, lambda a, b: a & b == a)
    out = np.zeros_like(fams)
    for s in range(1, 1 << n):
        out |= np.where(fams >> s & 1, supersets[s], 0)
    return out


def lower_closure(fams: np.ndarray, n: int) -> np.ndarray:
    """Codes ``X`` such that some member ``X2`` satisfies ``X ⊆ X2``."""
    subsets = _member_table(n, lambda a, b: a & b == b)
    out = np.zeros_like(fams)
    for s in range(1, 1 << n):
        out |= np.where(fams >> s & 1, subsets[s], 0)
    return out


def confirmable_facts(fams: np.ndarray, n: int) -> np.ndarray:
    """Bit ``F`` set iff the K-space can confirm fact ``F`` (all ``2^n`` facts)."""
    within = _member_table(n, lambda f, x: x & ~f == 0)
    out = np.zeros_like(fams)
    for f in range(1 << n):
        out |= np.where(fams & within[f] != 0, 1 << f, 0)
    return out


def uncertain_facts(fams: np.ndarray, n: int) -> np.ndarray:
    """Bit ``F`` set iff the K-space can have uncertainty ``F``."""
    above = _member_table(n, lambda f, x: f & ~x == 0)
    out = np.zeros_like(fams)
    for f in range(1 << n):
        out |= np.where(fams & above[f] != 0, 1 << f, 0)
    return out


@dataclass(frozen=True)
class ContainmentReport:
    n: int
    pairs: int
    upper_disagreements: int
    lower_disagreements: int


def containment_exhaustive(n: int) -> ContainmentReport:
    """Compare the containment characterisations with fact enumeration on all pairs.

    ``K1 ⊑U K2`` by containment depends on ``K1`` only through its upper
    closure and by enumeration only through its confirmable facts, so each
    distinct pair of those keys is checked against every ``K2`` at once and
    weighted by how many ``K1`` share it. The lower case is symmetric.
    """
    fams = covering_families(n)
    up, conf = upper_closure(fams, n), confirmable_facts(fams, n)
    down, unc = lower_closure(fams, n), uncertain_facts(fams, n)

    keys, counts = np.unique(np.stack([up, conf], axis=1), axis=0, return_counts=True)
    upper_bad = 0
    for (up1, conf1), c in zip(keys, counts):
        by_char = (fams & ~up1) == 0
        by_facts = (conf & ~conf1) == 0
        upper_bad += int(c) * int(np.count_nonzero(by_char != by_facts))

    keys, counts = np.unique(np.stack([down, unc], axis=1), axis=0, return_counts=True)
    lower_bad = 0
    for (down2, unc2), c in zip(keys, counts):
        by_char = (fams & ~down2) == 0
        by_facts = (unc & ~unc2) == 0
        lower_bad += int(c) * int(np.count_nonzero(by_char != by_facts))

    return ContainmentReport(n, len(fams) ** 2, upper_bad, lower_bad)


def containment_pair(fam1: int, fam2: int, n: int) -> tuple:
    """Engine verdicts (upper by containment, upper by facts, lower ..., lower ...) for one pair."""
    f = np.array([fam1, fam2], dtype=np.int64)
    up, conf = upper_closure(f, n), confirmable_facts(f, n)
    down, unc = lower_closure(f, n), uncertain_facts(f, n)
    return (
        bool(fam2 & ~up[0] == 0),
        bool(conf[1] & ~conf[0] == 0),
        bool(fam1 & ~down[1] == 0),
        bool(unc[0] & ~unc[1] == 0),
    )


# -- union preserves the orderings -----------------------------------------------

@dataclass(frozen=True)
class UnionReport:
    ordering: Ordering
    hypothesis_pairs: int
    unions_checked: int
    failures: tuple  # (family1, family2) union pairs outside the ordering


def union_lemma_exhaustive(n: int, o, chunk: int = 256, decide=kleq) -> UnionReport:
    """Union of ordered pairs over sub-domains is ordered, for all index families.

    A hypothesis pair is ``(K, K')`` over some non-empty ``W ⊆ V`` with
    ``K ⊑o K'``, decided by ``decide`` (:func:`epc.kspace.kleq`). The table of hypothesis
    pairs therefore lists *every* ordered pair over *every* sub-domain, so a
    union pair is ordered iff it appears in the table. Checking all pairwise
    unions suffices: a set closed under binary union is closed under every
    finite non-empty union.
    """
    o = Ordering.parse(o)
    codes = (1 << n) - 1
    fams = all_families(n)
    uni = family_union(fams, n)
    hyp = []
    for w in range(1, 1 << n):
        over_w = [int(f) for f in fams[uni == w]]
        ks = {f: family_to_kspace(f, n) for f in over_w}
        hyp.extend((f1 << codes >> 1) | (f2 >> 1) for f1 in over_w for f2 in over_w if decide(o, ks[f1], ks[f2]))
    hyp = np.unique(np.array(hyp, dtype=np.int64))
    ordered = np.zeros(1 << (2 * codes), dtype=bool)
    ordered[hyp] = True

    bad = set()
    for i in range(0, hyp.size, chunk):
        unions = (hyp[i:i + chunk, None] | hyp[None, :]).ravel()
        bad.update(int(c) for c in np.unique(unions[~ordered[unions]]))
    low = (1 << codes) - 1
    failures = tuple(sorted(((c >> codes) << 1, (c & low) << 1) for c in bad))
    return UnionReport(o, int(hyp.size), int(hyp.size) ** 2, failures)


# -- weak compatibility --------------------------------------------------------

def canonical_universes(n: int, max_traces: int):
    """Universes over ``V = range(n)`` up to renaming, as observation-class images.

    Only which subject values occur in each observation class matters for the
    K-spaces reachable by systems inside the universe, so a universe is a
    multiset of non-empty subsets of ``V`` (one per class) that covers ``V``
    and has total size at most ``max_traces``.
    """
    full = (1 << n) - 1
    subsets = list(range(1, 1 << n))
    sizes = {s: bin(s).count("1") for s in subsets}

    def grow(start, total, acc, covered):
        if acc and covered == full:
            yield tuple(acc)
        for i in range(start, len(subsets)):
            s = subsets[i]
            if total + sizes[s] <= max_traces:
                acc.append(s)
                yield from grow(i, total + sizes[s], acc, covered | s)
                acc.pop()

    yield from grow(0, 0, [], 0)


def _verdict_tables(n: int, o: Ordering) -> list:
    """Per partition ``R`` of ``V``: a table over family masks deciding ``[R] ⊑o K``.

    Entries are computed from the quantified definition on members: for the
    upper ordering every knowledge set must contain a block of ``R``, for the
    lower ordering every block must lie in a knowledge set.
    """
    fams = np.arange(1 << (1 << n), dtype=np.int64)
    out = []
    for p in all_partitions(range(n)):
        blocks = [sum(1 << v for v in b) for b in p.blocks]
        if o is Ordering.U:
            holding = sum(1 << x for x in range(1, 1 << n) if any(b & x == b for b in blocks))
            ok = (fams & ~holding & ~1) == 0
        else:
            ok = np.ones(len(fams), dtype=bool)
            for b in blocks:
                ok &= (fams & sum(1 << x for x in range(1, 1 << n) if b & x == b)) != 0
        out.append((p, blocks, ok))
    return out


def _system_families(classes: tuple, n: int) -> np.ndarray:
    """Distinct K-spaces (as family masks) of systems ``S`` with ``Φ(S) = V``.

    Traces are laid out class by class and ``S`` ranges over all subsets of
    traces; each system contributes the family of its non-empty class images.
    """
    traces = [(j, 1 << v) for j, c in enumerate(classes) for v in range(c.bit_length()) if c >> v & 1]
    img = np.zeros((1, len(classes)), dtype=np.int64)
    for j, bit in traces:
        with_t = img.copy()
        with_t[:, j] |= bit
        img = np.concatenate([img, with_t])
    img = img[np.bitwise_or.reduce(img, axis=1) == (1 << n) - 1]
    fam = np.bitwise_or.reduce(np.left_shift(1, img), axis=1) & ~1
    return np.unique(fam)


@dataclass(frozen=True)
class CompatReport:
    n: int
    universes: int
    instances: int
    disagreements: tuple  # (classes, partition) where characterisation != oracle
    only_if_failures: int  # oracle true but characterisation false
    if_failures: int  # characterisation true but oracle false


def compat_exhaustive(n: int, max_traces: int, o=Ordering.U) -> CompatReport:
    """Characterisation versus "some system with full domain satisfies R".

    The oracle enumerates every subset ``S`` of the universe's traces, keeps
    those with ``Φ(S) = V`` and tests the ordering on the resulting K-space;
    the characterisation asks that every class of ``R`` sits inside the image
    of a single observation class.
    """
    o = Ordering.parse(o)
    if o not in (Ordering.U, Ordering.L):
        raise ValueError("the vectorised engine decides the upper and lower orderings only")
    tables = _verdict_tables(n, o)
    universes = instances = only_if = if_ = 0
    bad = []
    for classes in canonical_universes(n, max_traces):
        universes += 1
        fams = _system_families(classes, n)
        for p, blocks, ok in tables:
            instances += 1
            oracle = bool(ok[fams].any())
            char = all(any(b & c == b for c in classes) for b in blocks)
            if oracle != char:
                bad.append((classes, p))
                only_if += oracle and not char
                if_ += char and not oracle
    return CompatReport(n, universes, instances, tuple(bad), only_if, if_)


# -- strictness witnesses ---------------------------------------------------------

#: claim name -> (operands must be partitions, orderings that hold, orderings that fail).
#: ``er`` stands for inclusion of the relations themselves.
STRICTNESS_CLAIMS = {
    "em_below_l_strict": (False, ("l",), ("em",)),
    "l_below_wa_strict": (False, ("wa",), ("l",)),
    "em_below_u_strict": (False, ("u",), ("em",)),
    "u_below_ca_strict": (False, ("ca",), ("u",)),
    "partition_wa_not_ca": ("first", ("wa",), ("ca",)),
    "partitions_u_not_er": ("both", ("u",), ("er",)),
    "partitions_ca_not_u": ("both", ("ca",), ("u",)),
}


def claim_holds(k1: KSpace, k2: KSpace, name: str) -> bool:
    from .partitions import er_leq

    shape, hold, fail = STRICTNESS_CLAIMS[name]
    if shape == "first" and not k1.is_partition:
        return False
    if shape == "both" and not (k1.is_partition and k2.is_partition):
        return False

    def decide(o):
        if o == "er":
            return er_leq(k1.to_partition(), k2.to_partition())
        return kleq(o, k1, k2)

    return all(decide(o) for o in hold) and not any(decide(o) for o in fail)


def find_strictness_witness(name: str, max_n: int = 4):
    """First pair (in enumeration order, smallest domain first) demonstrating ``name``."""
    from .enumeration import all_kspaces

    shape = STRICTNESS_CLAIMS[name][0]
    for n in range(1, max_n + 1):
        spaces = list(all_kspaces(range(n)))
        firsts = [k for k in spaces if k.is_partition] if shape else spaces
        seconds = [k for k in spaces if k.is_partition] if shape == "both" else spaces
        for k1 in firsts:
            for k2 in seconds:
                if claim_holds(k1, k2, name):
                    return k1, k2
    return None


def universe_from_classes(classes: tuple):
    """A concrete trace universe and attacker realising ``classes``."""
    from .core import Event, Trace, Value
    from .kspace import Attacker

    traces = []
    for j, c in enumerate(classes):
        for v in range(c.bit_length()):
            if c >> v & 1:
                traces.append(Trace((Event.inp("s", Value.num(v)), Event.out("o", Value.num(j)))))
    attacker = Attacker(lambda t: t.events[1].value, "classes")
    return frozenset(traces), attacker


__all__ = [
    "STRICTNESS_CLAIMS",
    "CompatReport",
    "ContainmentReport",
    "UnionReport",
    "all_families",
    "canonical_universes",
    "claim_holds",
    "find_strictness_witness",
    "compat_exhaustive",
    "covering_families",
    "family_to_kspace",
    "kspace_to_family",
    "containment_exhaustive",
    "containment_pair",
    "union_lemma_exhaustive",
    "universe_from_classes",
]
