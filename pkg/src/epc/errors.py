"""Exception hierarchy shared by every epc module."""

from __future__ import annotations


class EpcError(Exception):
    """Base class for all checker errors."""


class SubjectUndefined(EpcError):
    def __init__(self, trace):
        super().__init__(f"subject function undefined on trace {trace}")
        self.trace = trace


class LabelUndefined(EpcError):
    def __init__(self, element, detail: str = ""):
        msg = f"classifier undefined on {element}"
        super().__init__(f"{msg}: {detail}" if detail else msg)
        self.element = element


class CarrierMismatch(EpcError):
    pass


class NotInCarrier(EpcError):
    def __init__(self, element):
        super().__init__(f"{element} is not in the carrier")
        self.element = element


class CarrierNotSuperset(EpcError):
    pass


class EmptySystem(EpcError):
    def __init__(self):
        super().__init__("K-space of an empty system is undefined")


class DomainMismatch(EpcError):
    pass


class CapExceeded(EpcError):
    def __init__(self, size: int, cap: int):
        super().__init__(f"query enumeration over |V|={size} exceeds cap {cap}")
        self.size = size
        self.cap = cap


class PolicyIllFormed(EpcError):
    """The policy does not apply to the system; distinct from a leak."""

    reason = "IllFormed"

    def __init__(self, label: str, message: str):
        super().__init__(message)
        self.label = label


class TotalityViolation(PolicyIllFormed):
    reason = "TotalityViolation"

    def __init__(self, label: str, missing):
        super().__init__(label, f"condition block {label} is not total: missing subjects {missing}")
        self.missing = missing


class SubDomainGap(PolicyIllFormed):
    reason = "SubDomainGap"

    def __init__(self, label: str, missing):
        super().__init__(label, f"sub-system for case {label} misses subjects {missing}")
        self.missing = missing


class SpecError(EpcError):
    """Any diagnostic raised while reading a specification file."""

    def __init__(self, message: str, line: int = 0, col: int = 0):
        where = f"{line}:{col}: " if line else ""
        super().__init__(f"{where}{message}")
        self.line = line
        self.col = col


class SpecSyntaxError(SpecError):
    def __init__(self, line: int, col: int, expected: str, found: str = ""):
        msg = f"expected {expected}"
        if found:
            msg += f", found {found!r}"
        super().__init__(msg, line, col)
        self.expected = expected


class UnknownName(SpecError):
    def __init__(self, name: str, line: int = 0, col: int = 0):
        super().__init__(f"unknown name {name!r}", line, col)
        self.name = name


class DuplicateName(SpecError):
    def __init__(self, name: str, line: int = 0, col: int = 0):
        super().__init__(f"duplicate name {name!r}", line, col)
        self.name = name


class EmptyDomain(SpecError):
    def __init__(self, name: str, line: int = 0, col: int = 0):
        super().__init__(f"domain {name!r} is empty", line, col)
        self.name = name


class ExprError(EpcError):
    pass


class UnknownSignal(EpcError):
    def __init__(self, name: str):
        super().__init__(f"signal #{name} never occurs in the trace universe")
        self.name = name


class MissingExpectation(EpcError):
    def __init__(self, path):
        super().__init__(f"no .expect sidecar for {path}")
        self.path = path
