"""Rewrite the files under tests/golden.

CLI payloads come from the tool itself and are reviewed by hand when they
change. The HH tables come from the blind enumeration oracle in oracles.py.

    python3 tests/regen_golden.py
"""
import json
import sys
from pathlib import Path

HERE = Path(__file__).resolve().parent
sys.path.insert(0, str(HERE))

from dgformal import associated_graded  # noqa: E402
from dgformal.cli import run  # noqa: E402
from dgformal.samples import e0, e1, e2, e4  # noqa: E402

from oracles import ClassicalHochschild  # noqa: E402

GOLDEN = HERE / "golden"

CLI_CASES = {
    "certify_E0": ["certify", "E0"],
    "certify_E1": ["certify", "E1"],
    "certify_E2": ["certify", "E2"],
    "certify_E4": ["certify", "E4"],
    "hh_E1_2_-1": ["hh", "E1", "--degree", "2", "--weight", "-1"],
    "hh_E4": ["hh", "E4"],
    "scan_E3": ["scan", "E3", "--points", "0,1,2", "--pmax", "3"],
    "scan_E1t": ["scan", "E1t", "--points", "0,1", "--pmax", "2"],
    "scan_E4t": ["scan", "E4t", "--points", "0,5", "--pmax", "3"],
}

HH_FIXTURES = {"E0": e0, "E1": e1, "E2": e2, "E4": e4}
DEGREES = range(0, 5)
WEIGHTS = range(0, -6, -1)


def dump(name, data):
    (GOLDEN / f"{name}.json").write_text(json.dumps(data, indent=2, sort_keys=True) + "\n", encoding="utf-8")


def hh_table(make):
    O = ClassicalHochschild(associated_graded(make()).algebra)
    rows = []
    for w in WEIGHTS:
        dims = O.dims(w, DEGREES)
        rows += [{"n": n, "w": w, "dim": dims[n]} for n in DEGREES]
    return sorted(rows, key=lambda r: (r["n"], -r["w"]))


def main():
    GOLDEN.mkdir(exist_ok=True)
    for name, argv in CLI_CASES.items():
        code, report = run(argv)
        assert code == 0, (name, report.payload)
        dump(name, {"argv": argv, "payload": report.payload})
    for name, make in HH_FIXTURES.items():
        dump(f"hh_table_{name}", hh_table(make))


if __name__ == "__main__":
    main()
