"""Rewrite tests/golden/*.json from the current CLI.  Review the diff before committing."""

import sys
from pathlib import Path

from fglring.cli import run

HERE = Path(__file__).parent / "golden"

CASES = {
    "expand_krichever_4": ["expand", "--kind", "krichever", "--order", "4"],
    "defect_krichever_6": ["defect", "--kind", "krichever", "--order", "6"],
    "exponential_krichever_6": ["exponential", "--kind", "krichever", "--order", "6"],
    "verify_iso_12": ["verify-iso", "--max-weight", "12"],
    "rho_10": ["rho", "--max-n", "10", "--perturb", "--certificates"],
    "torsion_8": ["torsion", "--max-weight", "8", "--kind", "both"],
    "en_9": ["en", "--n", "9", "--kind", "both"],
    "ode_check_10": ["ode-check", "--order", "10"],
    "membership_6": ["membership", "--max-weight", "6", "--certificates"],
}


def main():
    HERE.mkdir(exist_ok=True)
    for name, argv in CASES.items():
        code = run(argv + ["--output", str(HERE / f"{name}.json")])
        print(name, code, file=sys.stderr)


if __name__ == "__main__":
    main()
