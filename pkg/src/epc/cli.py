"""``epc``: check erasure policies written in ``.eps`` files.

Every command ends with a ``key=value`` trailer line. Exit codes:

* 0 satisfied / holds / agreement
* 1 violated / incompatible / disagreement / corpus mismatch
* 2 usage, parse or evaluation error
* 3 query enumeration cap exceeded
"""

from __future__ import annotations

import sys
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Optional

import click

from .errors import CapExceeded, EpcError, MissingExpectation, PolicyIllFormed
from .kspace import ALL_ORDERINGS, DEFAULT_CAP, KSpace, Ordering, build_kspace, kleq, kleq_query_oracle
from .policy import Type0Policy, bound, check, weakly_compatible_type0
from .speclang.evaluate import Spec

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_CAP = 0, 1, 2, 3

ORDER_CHOICES = [o.value for o in ALL_ORDERINGS] + ["all"]


def orderings(flag: str) -> tuple:
    return ALL_ORDERINGS if flag == "all" else (Ordering.parse(flag),)


@dataclass
class Outcome:
    """Result of checking one ordering."""

    order: Ordering
    result: str  # "sat" | "viol" | "error"
    lines: list
    reason: str = ""
    exit_code: int = EXIT_OK

    def trailer(self, policy: str) -> str:
        s = f"result={self.result} order={self.order.value} policy={policy}"
        return f"{s} reason={self.reason}" if self.reason else s


def run_check(spec: Spec, system: Optional[str], policy: Optional[str], attacker: Optional[str],
              orders, cap: int) -> list:
    """Check one (system, attacker, policy) triple under each ordering."""
    sys_ = spec.system(system)
    att = spec.attacker(attacker, sys_.universe)
    pol = spec.policy(policy, sys_)
    out = []
    for o in orders:
        try:
            v = check(sys_, att, pol, o, cap)
        except PolicyIllFormed as exc:
            out.append(Outcome(o, "viol", [f"VIOLATED ({exc.label}: {exc.reason})"], exc.reason, EXIT_FAIL))
            continue
        except CapExceeded as exc:
            out.append(Outcome(o, "error", [f"error: {exc}"], "CapExceeded", EXIT_CAP))
            continue
        if v.satisfied:
            out.append(Outcome(o, "sat", v.render()))
        else:
            out.append(Outcome(o, "viol", v.render(), v.failures[0].reason, EXIT_FAIL))
    return out


def _load(path: str) -> Spec:
    return Spec.from_path(path)


def _fail(ctx: click.Context, exc: Exception, code: int = EXIT_USAGE, trailer: str = "result=error"):
    click.echo(f"error: {exc}", err=True)
    click.echo(f"{trailer} reason={type(exc).__name__}")
    ctx.exit(code)


def _worst(codes) -> int:
    codes = list(codes)
    if EXIT_CAP in codes:
        return EXIT_CAP
    return max(codes, default=EXIT_OK)


spec_arg = click.argument("spec", type=click.Path(exists=True, dir_okay=False))
system_opt = click.option("--system", help="System name (optional when only one is declared).")
policy_opt = click.option("--policy", help="Policy name (optional when only one is declared).")
attacker_opt = click.option("--attacker", help="Attacker name (optional when only one is declared).")
order_opt = click.option("--order", type=click.Choice(ORDER_CHOICES, case_sensitive=False), default="all",
                         show_default=True, help="Ordering used to compare knowledge with the policy.")
cap_opt = click.option("--cap", type=click.IntRange(min=1), envvar="EPC_CAP", default=DEFAULT_CAP,
                       show_default=True, help="Largest subject domain for query enumeration.")
format_opt = click.option("--format", "fmt", type=click.Choice(["text", "lines"]), default="text",
                          show_default=True, help="'lines' prints only the key=value lines.")


@click.group()
def main():
    """Knowledge-based erasure policy checker."""


@main.command("check")
@spec_arg
@system_opt
@policy_opt
@attacker_opt
@order_opt
@cap_opt
@format_opt
@click.pass_context
def check_cmd(ctx, spec, system, policy, attacker, order, cap, fmt):
    """Decide whether a system satisfies a policy against an attacker."""
    try:
        s = _load(spec)
        name = s.pick(s.model.policies, policy, "policy").name
        outcomes = run_check(s, system, policy, attacker, orderings(order), cap)
    except EpcError as exc:
        _fail(ctx, exc)
    for oc in outcomes:
        if fmt == "text":
            for line in oc.lines:
                click.echo(f"[{oc.order.value}] {line}")
        click.echo(oc.trailer(name))
    ctx.exit(_worst(oc.exit_code for oc in outcomes))


@main.command("kspace")
@spec_arg
@system_opt
@attacker_opt
@format_opt
@click.pass_context
def kspace_cmd(ctx, spec, system, attacker, fmt):
    """Print the attacker's K-space, one knowledge set per line."""
    try:
        s = _load(spec)
        sys_ = s.system(system)
        att = s.attacker(attacker, sys_.universe)
        k = build_kspace(sys_, att)
    except EpcError as exc:
        _fail(ctx, exc)
    if fmt == "text":
        click.echo(k.render())
    partition = "yes" if k.is_partition else "no"
    click.echo(f"result=ok sets={len(k.sets)} domain={len(k.domain)} partition={partition} attacker={att.name}")


@main.command("bound")
@spec_arg
@system_opt
@policy_opt
@format_opt
@click.pass_context
def bound_cmd(ctx, spec, system, policy, fmt):
    """Print the explicitness bound of a policy as a partition."""
    try:
        s = _load(spec)
        sys_ = s.system(system)
        p = s.policy(policy, sys_)
        b = bound(p)
    except EpcError as exc:
        _fail(ctx, exc)
    if fmt == "text":
        click.echo(b.render())
    click.echo(f"result=ok blocks={len(b.blocks)} policy={p.name}")


@main.command("compat")
@spec_arg
@system_opt
@policy_opt
@attacker_opt
@click.pass_context
def compat_cmd(ctx, spec, system, policy, attacker):
    """Weak compatibility of an unconditional policy with an attacker."""
    try:
        s = _load(spec)
        sys_ = s.system(system)
        p = s.policy(policy, sys_)
        if not isinstance(p, Type0Policy):
            raise EpcError("compat applies to type0 policies only")
        att = s.attacker(attacker, sys_.universe)
        ok = weakly_compatible_type0(p.relation, att, sys_.universe, sys_.subject)
    except EpcError as exc:
        _fail(ctx, exc)
    click.echo(f"result={'compatible' if ok else 'incompatible'} policy={p.name} attacker={att.name}")
    ctx.exit(EXIT_OK if ok else EXIT_FAIL)


@main.command("oracle")
@spec_arg
@system_opt
@policy_opt
@attacker_opt
@order_opt
@cap_opt
@click.pass_context
def oracle_cmd(ctx, spec, system, policy, attacker, order, cap):
    """Cross-check the ordering decisions against fact/query enumeration.

    The instance compared is the policy's explicitness bound (the relation
    itself for type0) against the attacker's K-space.
    """
    try:
        s = _load(spec)
        sys_ = s.system(system)
        p = s.policy(policy, sys_)
        att = s.attacker(attacker, sys_.universe)
        k1 = build_kspace_of_policy(p)
        k2 = build_kspace(sys_, att)
        rows = []
        for o in orderings(order):
            fast = kleq(o, k1, k2, cap)
            slow = kleq_query_oracle(o, k1, k2, cap)
            rows.append((o, fast, slow))
    except CapExceeded as exc:
        _fail(ctx, exc, EXIT_CAP)
    except EpcError as exc:
        _fail(ctx, exc)
    agree = all(fast == slow for _, fast, slow in rows)
    for o, fast, slow in rows:
        click.echo(f"order={o.value} kleq={str(fast).lower()} oracle={str(slow).lower()}")
    click.echo(f"result={'agree' if agree else 'disagree'} policy={p.name}")
    ctx.exit(EXIT_OK if agree else EXIT_FAIL)


def build_kspace_of_policy(p) -> KSpace:
    return KSpace.from_partition(p.relation if isinstance(p, Type0Policy) else bound(p))


# -- corpus -----------------------------------------------------------------

def parse_expect_line(line: str) -> dict:
    fields = dict(tok.split("=", 1) for tok in line.split())
    if "result" not in fields or "order" not in fields:
        raise EpcError(f"expectation needs result= and order=: {line!r}")
    return fields


def _expect_lines(path: Path) -> list:
    side = path.with_suffix(".expect")
    if not side.is_file():
        raise MissingExpectation(path.name)
    out = []
    for n, raw in enumerate(side.read_text(encoding="utf-8").splitlines(), 1):
        line = raw.strip()
        if line and not line.startswith("#"):
            out.append((n, parse_expect_line(line)))
    return out


def run_corpus(directory, cap: int = DEFAULT_CAP) -> tuple:
    """Run every fixture in ``directory``; return (report lines, mismatches)."""
    directory = Path(directory)
    fixtures = sorted(directory.glob("*.eps"))
    if not fixtures:
        raise EpcError(f"no .eps fixtures in {directory}")
    report, mismatches, checks = [], 0, 0
    for path in fixtures:
        expectations = _expect_lines(path)
        try:
            spec = Spec.from_path(path)
            load_error = None
        except EpcError as exc:
            spec, load_error = None, exc
        for n, exp in expectations:
            orders = orderings(exp["order"])
            if load_error is not None:
                actual = [(o, "error") for o in orders]
            else:
                try:
                    actual = [(oc.order, oc.result) for oc in run_check(
                        spec, exp.get("system"), exp.get("policy"), exp.get("attacker"), orders, cap)]
                except EpcError:
                    actual = [(o, "error") for o in orders]
            for o, got in actual:
                checks += 1
                ok = got == exp["result"]
                mismatches += not ok
                who = " ".join(f"{k}={exp[k]}" for k in ("system", "policy", "attacker") if k in exp)
                status = "PASS" if ok else "FAIL"
                line = f"{status} {path.name}:{n} order={o.value} expected={exp['result']} actual={got}"
                report.append(f"{line} {who}".rstrip())
    report.append(f"corpus fixtures={len(fixtures)} checks={checks} mismatches={mismatches}")
    return report, mismatches


def shipped_corpus() -> Path:
    return Path(str(resources.files("epc") / "corpus"))


@main.command("corpus")
@click.argument("directory", required=False, type=click.Path(exists=True, file_okay=False))
@cap_opt
@click.pass_context
def corpus_cmd(ctx, directory, cap):
    """Run every fixture of a corpus directory against its .expect sidecar.

    Without DIRECTORY the corpus shipped with the package is used.
    """
    try:
        report, mismatches = run_corpus(directory or shipped_corpus(), cap)
    except EpcError as exc:
        _fail(ctx, exc)
    for line in report:
        click.echo(line)
    ctx.exit(EXIT_FAIL if mismatches else EXIT_OK)


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
