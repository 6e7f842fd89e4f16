"""Finite trace models: values, events, traces, subject functions and systems.

Traces render as events joined by ``.``::

    ?cc=07.!log=7.#erased.!dump=null

where ``?c=v`` is an input on channel ``c``, ``!c=v`` an output and ``#name``
a signal. The empty trace renders as ``<>``.
"""

from __future__ import annotations

import enum
import functools
import re
from dataclasses import dataclass, field
from typing import Callable, Iterable, Optional

from .errors import EpcError, SubjectUndefined

_IDENT = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")
_DIGITS = re.compile(r"[0-9]+\Z")


@functools.total_ordering
@dataclass(frozen=True)
class Value:
    """A symbol or a non-negative integer with a fixed decimal width.

    Integers of different widths are different values: ``07`` and ``7`` never
    compare equal.
    """

    symbol: Optional[str] = None
    number: Optional[int] = None
    width: int = 0

    def __post_init__(self):
        if (self.symbol is None) == (self.number is None):
            raise ValueError("a Value is exactly one of symbol or number")
        if self.number is not None and (self.number < 0 or self.width < 1):
            raise ValueError(f"bad integer value {self.number} (width {self.width})")

    @classmethod
    def sym(cls, name: str) -> "Value":
        return cls(symbol=name)

    @classmethod
    def num(cls, n: int, width: int = 1) -> "Value":
        return cls(number=n, width=max(width, len(str(n))))

    @classmethod
    def parse(cls, text: str) -> "Value":
        if _DIGITS.match(text):
            return cls(number=int(text), width=len(text))
        if _IDENT.match(text):
            return cls(symbol=text)
        raise ValueError(f"not a value literal: {text!r}")

    @property
    def is_int(self) -> bool:
        return self.number is not None

    def _key(self):
        if self.number is not None:
            return (0, self.number, self.width, "")
        return (1, 0, 0, self.symbol)

    def __lt__(self, other):
        if not isinstance(other, Value):
            return NotImplemented
        return self._key() < other._key()

    def __str__(self):
        if self.number is not None:
            return f"{self.number:0{self.width}d}"
        return self.symbol

    def __repr__(self):
        return f"Value({self})"


NULL = Value.sym("null")


class EventKind(enum.Enum):
    INPUT = "?"
    OUTPUT = "!"
    SIGNAL = "#"


@dataclass(frozen=True)
class Event:
    kind: EventKind
    channel: str
    value: Optional[Value] = None

    def __post_init__(self):
        if not _IDENT.match(self.channel or ""):
            raise ValueError(f"bad channel identifier {self.channel!r}")
        if (self.kind is EventKind.SIGNAL) != (self.value is None):
            raise ValueError("signals carry no value; inputs and outputs carry exactly one")

    @classmethod
    def inp(cls, channel: str, value) -> "Event":
        return cls(EventKind.INPUT, channel, _as_value(value))

    @classmethod
    def out(cls, channel: str, value) -> "Event":
        return cls(EventKind.OUTPUT, channel, _as_value(value))

    @classmethod
    def signal(cls, name: str) -> "Event":
        return cls(EventKind.SIGNAL, name)

    def __str__(self):
        if self.kind is EventKind.SIGNAL:
            return f"#{self.channel}"
        return f"{self.kind.value}{self.channel}={self.value}"


def _as_value(v) -> Value:
    if isinstance(v, Value):
        return v
    if isinstance(v, int):
        return Value.num(v)
    return Value.parse(str(v))


@functools.total_ordering
@dataclass(frozen=True)
class Trace:
    """A finite event sequence, ordered lexicographically on rendered events."""

    events: tuple = ()
    _rendered: tuple = field(init=False, repr=False, compare=False, hash=False)

    def __post_init__(self):
        object.__setattr__(self, "events", tuple(self.events))
        object.__setattr__(self, "_rendered", tuple(str(e) for e in self.events))

    def __lt__(self, other):
        if not isinstance(other, Trace):
            return NotImplemented
        return self._rendered < other._rendered

    def __len__(self):
        return len(self.events)

    def __iter__(self):
        return iter(self.events)

    def __add__(self, other: "Trace") -> "Trace":
        return Trace(self.events + tuple(other.events))

    def inputs(self, channel: Optional[str] = None) -> list:
        return [
            e.value
            for e in self.events
            if e.kind is EventKind.INPUT and (channel is None or e.channel == channel)
        ]

    def __str__(self):
        return ".".join(self._rendered) if self.events else "<>"

    def __repr__(self):
        return f"Trace({self})"


def parse_event(text: str) -> Event:
    text = text.strip()
    if not text:
        raise ValueError("empty event")
    head, body = text[0], text[1:]
    if head == "#":
        return Event.signal(body)
    if head in "?!":
        channel, eq, value = body.partition("=")
        if not eq:
            raise ValueError(f"event {text!r} lacks '=value'")
        kind = EventKind.INPUT if head == "?" else EventKind.OUTPUT
        return Event(kind, channel, Value.parse(value))
    raise ValueError(f"event {text!r} must start with ?, ! or #")


def parse_trace(text: str) -> Trace:
    """Inverse of ``str(trace)``."""
    text = text.strip()
    if text == "<>":
        return Trace()
    return Trace(tuple(parse_event(part) for part in text.split(".")))


@dataclass(frozen=True)
class SubjectFn:
    """Selector extracting the erasure subject from a trace.

    ``kind`` is one of ``first_input`` (optionally restricted to ``channel``),
    ``kth_input`` (1-based ``k``, optionally per channel) or ``constant``.
    """

    kind: str = "first_input"
    channel: Optional[str] = None
    k: int = 1
    constant: Optional[Value] = None

    def __post_init__(self):
        if self.kind not in ("first_input", "kth_input", "constant"):
            raise ValueError(f"unknown subject selector {self.kind!r}")
        if self.kind == "constant" and self.constant is None:
            raise ValueError("constant selector needs a value")
        if self.k < 1:
            raise ValueError("k is 1-based")

    def __call__(self, trace: Trace) -> Value:
        if self.kind == "constant":
            return self.constant
        values = trace.inputs(self.channel)
        idx = 0 if self.kind == "first_input" else self.k - 1
        if idx >= len(values):
            raise SubjectUndefined(trace)
        return values[idx]

    def describe(self) -> str:
        if self.kind == "constant":
            return f"const({self.constant})"
        if self.kind == "first_input":
            return f"input({self.channel})" if self.channel else "first_input"
        return f"input({self.channel}, {self.k})" if self.channel else f"input_k({self.k})"


FIRST_INPUT = SubjectFn()


@dataclass(frozen=True)
class System:
    """Maximal traces ``traces`` drawn from an explicit ambient ``universe``."""

    universe: frozenset
    traces: frozenset
    subject: Callable[[Trace], Value] = FIRST_INPUT

    def __post_init__(self):
        object.__setattr__(self, "universe", frozenset(self.universe))
        object.__setattr__(self, "traces", frozenset(self.traces))
        if not self.traces <= self.universe:
            stray = min(self.traces - self.universe)
            raise EpcError(f"trace {stray} is not in the universe")
        for t in self.universe:
            self.subject(t)

    @classmethod
    def of(cls, traces: Iterable[Trace], subject=FIRST_INPUT, universe=None) -> "System":
        traces = frozenset(traces)
        return cls(traces if universe is None else frozenset(universe) | traces, traces, subject)

    def restrict(self, traces: Iterable[Trace]) -> "System":
        """The sub-system ``S ∩ traces`` over the same universe."""
        return System(self.universe, self.traces & frozenset(traces), self.subject)

    def __len__(self):
        return len(self.traces)


def subject_domain(system: System) -> frozenset:
    return frozenset(system.subject(t) for t in system.traces)


def image(subject, traces: Iterable[Trace]) -> frozenset:
    return frozenset(subject(t) for t in traces)


def restrict_universe(universe: Iterable[Trace], subject, values) -> frozenset:
    """All traces of ``universe`` whose subject lies in ``values``."""
    values = frozenset(values)
    return frozenset(t for t in universe if subject(t) in values)


def is_functional(system: System) -> bool:
    return len(subject_domain(system)) == len(system.traces)
