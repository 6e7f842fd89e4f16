"""Knowledge-based erasure policies over finite trace systems.

The package computes what an observer can deduce about an erasure subject
(``kspace``), compares such knowledge with visibility policies under five
orderings, and checks unconditional, low dependent and high dependent
erasure policies (``policy``). Systems, attackers and policies can be
written in a small specification language (``speclang``) and checked from
the ``epc`` command line.
"""

from .core import Event, EventKind, SubjectFn, System, Trace, Value, parse_trace, restrict_universe, subject_domain
from .errors import EpcError
from .kspace import Attacker, KSpace, Ordering, build_kspace, kleq, kleq_query_oracle
from .partitions import Partition, dagger, er_leq, from_classifier, meet
from .policy import Type0Policy, Type1Policy, Type2Policy, Verdict, bound, check, explicitness_holds

__all__ = [
    "Attacker", "EpcError", "Event", "EventKind", "KSpace", "Ordering", "Partition", "SubjectFn",
    "System", "Trace", "Type0Policy", "Type1Policy", "Type2Policy", "Value", "Verdict", "bound",
    "build_kspace", "check", "dagger", "er_leq", "explicitness_holds", "from_classifier", "kleq",
    "kleq_query_oracle", "meet", "parse_trace", "restrict_universe", "subject_domain",
]
