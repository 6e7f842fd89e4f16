"""Regenerate tests/fixtures/witnesses.json by exhaustive search (|V| <= 4)."""

import json
from pathlib import Path

from epc.oracles import STRICTNESS_CLAIMS, find_strictness_witness

OUT = Path(__file__).resolve().parents[1] / "tests" / "fixtures" / "witnesses.json"


def encode(k):
    return [sorted(x) for x in k.canonical()]


def main():
    data = {}
    for name, (_, hold, fail) in STRICTNESS_CLAIMS.items():
        found = find_strictness_witness(name)
        if found is None:
            raise SystemExit(f"no witness for {name}")
        k1, k2 = found
        data[name] = {"holds": list(hold), "fails": list(fail), "k1": encode(k1), "k2": encode(k2)}
        print(name, encode(k1), encode(k2))
    OUT.write_text(json.dumps(data, indent=2, sort_keys=True) + "\n", encoding="utf-8")


if __name__ == "__main__":
    main()
