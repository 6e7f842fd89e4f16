"""Equivalence relations on finite carriers, stored as canonical partitions.

Elements may be anything hashable and mutually orderable (``Value``,
``Trace``, plain ints in tests). The relation ``R`` and its partition ``[R]``
are the same object here.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Hashable, Iterable

from .errors import CarrierMismatch, CarrierNotSuperset, EpcError, LabelUndefined, NotInCarrier


def _block_key(block):
    return min(block)


@dataclass(frozen=True)
class Partition:
    carrier: frozenset
    blocks: tuple
    _index: dict = field(init=False, repr=False, compare=False, hash=False)

    def __post_init__(self):
        blocks = [frozenset(b) for b in self.blocks]
        if not all(blocks):
            raise EpcError("partition blocks must be non-empty")
        blocks = tuple(sorted(blocks, key=_block_key))
        object.__setattr__(self, "blocks", blocks)
        object.__setattr__(self, "carrier", frozenset(self.carrier))
        index = {}
        for b in blocks:
            for x in b:
                if x in index:
                    raise EpcError(f"element {x} lies in two blocks")
                index[x] = b
        if index.keys() != self.carrier:
            raise EpcError("blocks do not cover the carrier exactly")
        object.__setattr__(self, "_index", index)

    @classmethod
    def from_blocks(cls, blocks: Iterable[Iterable]) -> "Partition":
        blocks = [frozenset(b) for b in blocks]
        return cls(frozenset().union(*blocks), tuple(blocks))

    def __len__(self):
        return len(self.blocks)

    def __iter__(self):
        return iter(self.blocks)

    def __contains__(self, block):
        return frozenset(block) in self.blocks

    def related(self, x, y) -> bool:
        return self.class_of(x) is self.class_of(y)

    def class_of(self, x) -> frozenset:
        try:
            return self._index[x]
        except KeyError:
            raise NotInCarrier(x) from None

    def pairs(self) -> frozenset:
        """The relation as an explicit pair set (small carriers only)."""
        return frozenset((x, y) for b in self.blocks for x in b for y in b)

    def restrict(self, subset: Iterable) -> "Partition":
        """The induced relation on ``subset``."""
        subset = frozenset(subset)
        if not subset <= self.carrier:
            raise CarrierMismatch("restriction target is not inside the carrier")
        return Partition(subset, tuple(b & subset for b in self.blocks if b & subset))

    @property
    def is_identity(self) -> bool:
        return len(self.blocks) == len(self.carrier)

    @property
    def is_total(self) -> bool:
        return len(self.blocks) <= 1

    def render(self) -> str:
        return " ".join("{" + " ".join(str(x) for x in sorted(b)) + "}" for b in self.blocks)

    def __str__(self):
        return self.render()


EquivRel = Partition


def identity(carrier: Iterable) -> Partition:
    carrier = frozenset(carrier)
    return Partition(carrier, tuple(frozenset([x]) for x in carrier))


def total(carrier: Iterable) -> Partition:
    carrier = frozenset(carrier)
    return Partition(carrier, (carrier,) if carrier else ())


def from_classifier(carrier: Iterable, label: Callable[[object], Hashable]) -> Partition:
    """Fibers of ``label`` over ``carrier``."""
    fibers: dict = {}
    for x in carrier:
        try:
            key = label(x)
        except (LabelUndefined, NotInCarrier):
            raise
        except EpcError as exc:
            raise LabelUndefined(x, str(exc)) from exc
        fibers.setdefault(key, set()).add(x)
    return Partition(frozenset(carrier), tuple(frozenset(b) for b in fibers.values()))


def labelled_fibers(carrier: Iterable, label: Callable) -> dict:
    """Like ``from_classifier`` but keeps the label of each block."""
    fibers: dict = {}
    for x in carrier:
        fibers.setdefault(label(x), set()).add(x)
    return {k: frozenset(v) for k, v in fibers.items()}


def _same_carrier(rels) -> frozenset:
    carrier = rels[0].carrier
    for r in rels[1:]:
        if r.carrier != carrier:
            raise CarrierMismatch("relations are over different carriers")
    return carrier


def meet(*rels: Partition) -> Partition:
    """Intersection of relations: all non-empty block intersections."""
    if len(rels) == 1 and not isinstance(rels[0], Partition):
        rels = tuple(rels[0])
    if not rels:
        raise ValueError("meet of an empty family")
    carrier = _same_carrier(rels)
    return from_classifier(carrier, lambda x: tuple(r.class_of(x) for r in rels))


def er_leq(r1: Partition, r2: Partition) -> bool:
    """``r1 ⊆ r2`` as pair sets: every r1-block sits inside one r2-block."""
    _same_carrier((r1, r2))
    for b in r1.blocks:
        target = r2.class_of(next(iter(b)))
        if not b <= target:
            return False
    return True


def class_of(r: Partition, x) -> frozenset:
    return r.class_of(x)


def dagger(r: Partition, carrier: Iterable) -> Partition:
    """Extend ``r`` to ``carrier`` by one extra block holding the missing elements."""
    carrier = frozenset(carrier)
    if not r.carrier <= carrier:
        raise CarrierNotSuperset("dagger target must contain the relation's carrier")
    rest = carrier - r.carrier
    return Partition(carrier, r.blocks + ((rest,) if rest else ()))
