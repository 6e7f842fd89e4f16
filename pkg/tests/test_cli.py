import shutil

import pytest
from click.testing import CliRunner

from epc.cli import main, run_corpus

from conftest import CORPUS, FIXTURES


def run(*args, env=None):
    return CliRunner().invoke(main, [str(a) for a in args], env=env)


def listing(n):
    return CORPUS / f"listing{n}.eps"


def trailer_lines(out):
    return [line for line in out.splitlines() if line.startswith("result=")]


def test_check_listing2_all_orders():
    r = run("check", listing(2), "--system", "vend", "--policy", "L4", "--attacker", "AS", "--order", "all")
    assert r.exit_code == 0
    assert trailer_lines(r.output) == [f"result=sat order={o} policy=L4" for o in ("u", "l", "em", "ca", "wa")]


def test_check_violation_exit_code_and_verdict_line():
    r = run("check", listing(5), "--system", "otp", "--policy", "TOTAL", "--attacker", "FullWithKey",
            "--order", "em")
    assert r.exit_code == 1
    assert r.output.splitlines() == [
        "[em] VIOLATED (*: OrderViolation knowledge set {0} contains no block)",
        "result=viol order=em policy=TOTAL reason=OrderViolation",
    ]


def test_check_lines_format():
    r = run("check", listing(4), "--policy", "P2", "--attacker", "AS", "--order", "u", "--format", "lines")
    assert r.exit_code == 0
    assert r.output == "result=sat order=u policy=P2\n"


def test_bound_prints_dagger_partition():
    r = run("bound", listing(4), "--policy", "P2")
    assert r.exit_code == 0
    first, trailer = r.output.splitlines()
    assert first.startswith("{00 01 02 03 04 05 06 07 08 09} {10 20 30 40 50 60 70 80 90}")
    assert trailer == "result=ok blocks=11 policy=P2"


def test_kspace_listing():
    r = run("kspace", listing(2), "--attacker", "AS")
    lines = r.output.splitlines()
    assert r.exit_code == 0 and len(lines) == 11
    assert lines[7] == "{07 17 27 37 47 57 67 77 87 97}"
    assert lines[-1] == "result=ok sets=10 domain=100 partition=yes attacker=AS"


def test_compat():
    assert run("compat", listing(2), "--policy", "L4", "--attacker", "AS").exit_code == 0
    r = run("compat", listing(2), "--policy", "L4", "--attacker", "Full")
    assert r.exit_code == 1 and r.output == "result=incompatible policy=L4 attacker=Full\n"
    assert run("compat", listing(3), "--policy", "Ch", "--attacker", "AS").exit_code == 2


def test_oracle_agreement_and_cap():
    r = run("oracle", listing(5), "--attacker", "FullWithKey")
    assert r.exit_code == 0 and r.output.splitlines()[-1] == "result=agree policy=TOTAL"
    r = run("oracle", listing(2), "--policy", "L4", "--attacker", "AS")
    assert r.exit_code == 3 and "reason=CapExceeded" in r.output
    assert run("oracle", listing(5), "--attacker", "AS", "--cap", "1").exit_code == 3
    assert run("oracle", listing(5), "--attacker", "AS", env={"EPC_CAP": "1"}).exit_code == 3
    assert run("oracle", listing(5), "--attacker", "AS", "--cap", "0").exit_code == 2


@pytest.mark.parametrize("args", [
    ("check", "nonexistent.eps"),
    ("check", listing(2), "--order", "xx"),
    ("check", listing(2), "--policy", "L4"),  # three attackers: selector required
    ("check", listing(2), "--policy", "NOPE", "--attacker", "AS"),
    ("bogus",),
])
def test_usage_errors_exit_2(args):
    assert run(*args).exit_code == 2


def test_parse_error_exit_2(tmp_path):
    bad = tmp_path / "bad.eps"
    bad.write_text("domain CC = 00..99\nsystem s {\n  input cc : CCX\n}\n")
    r = run("check", bad)
    assert r.exit_code == 2
    assert "result=error reason=UnknownName" in r.output
    assert "3:14: unknown name 'CCX'" in r.stderr


def test_totality_violation_reported_as_violation(tmp_path):
    spec = tmp_path / "t.eps"
    spec.write_text(listing(3).read_text() + "\npolicy BAD = type1 cond input(1) {\n  _ -> all\n}\n")
    r = run("check", spec, "--policy", "BAD", "--attacker", "AS", "--order", "u")
    assert r.exit_code == 1
    assert r.output.splitlines()[-1].endswith("reason=TotalityViolation")


def test_shipped_corpus_passes():
    r = run("corpus")
    assert r.exit_code == 0, r.output
    assert r.output.splitlines()[-1] == "corpus fixtures=5 checks=69 mismatches=0"


def test_corpus_reports_exactly_one_mismatch(tmp_path):
    for p in CORPUS.glob("listing[1235].*"):
        shutil.copy(p, tmp_path)
    shutil.copy(FIXTURES / "listing4_leaky.eps", tmp_path / "listing4.eps")
    (tmp_path / "listing4.expect").write_text("result=sat order=em system=vend policy=P2 attacker=AS\n")
    report, mismatches = run_corpus(tmp_path)
    assert mismatches == 1
    assert [line for line in report if line.startswith("FAIL")] == [
        "FAIL listing4.eps:1 order=em expected=sat actual=viol system=vend policy=P2 attacker=AS"]
    assert run("corpus", tmp_path).exit_code == 1


def test_corpus_empty_and_missing_expectation(tmp_path):
    assert run("corpus", tmp_path).exit_code == 2
    shutil.copy(listing(1), tmp_path)
    r = run("corpus", tmp_path)
    assert r.exit_code == 2 and "reason=MissingExpectation" in r.output


def test_corpus_expects_errors_for_broken_fixture(tmp_path):
    (tmp_path / "broken.eps").write_text("domain D = {}\n")
    (tmp_path / "broken.expect").write_text("result=error order=u\n")
    report, mismatches = run_corpus(tmp_path)
    assert mismatches == 0 and report[0].startswith("PASS broken.eps:1")


def test_output_is_byte_identical_across_runs():
    a, b = run("corpus"), run("corpus")
    assert a.output == b.output
    args = ("check", listing(3), "--policy", "TOTAL", "--attacker", "AS")
    assert run(*args).output == run(*args).output
