"""Scan the modular/digit commutation rules across lattice sizes.

For each rule, prints how many cells the rule says should commute, the
largest commutator norm among them, and the smallest norm among the cells
outside the rule.

    python3 scripts/commutation_scan.py --sizes 1 2 4
"""

import argparse

from cvghz.lattice import make_lattice
from cvghz.modular import commutation_table


def scan(s: int) -> None:
    rows = commutation_table(make_lattice(s))
    print(f"s = {s}")
    for kind in sorted({r["kind"] for r in rows}):
        inside = [r["commutator_norm"] for r in rows if r["kind"] == kind and r["expected_zero"]]
        outside = [r["commutator_norm"] for r in rows if r["kind"] == kind and not r["expected_zero"]]
        worst = max(inside, default=0.0)
        least = min(outside, default=float("nan"))
        print(f"  {kind:14s} commuting cells {len(inside):3d}  max norm {worst:.1e}  "
              f"other cells {len(outside):3d}  min norm {least:.3f}")


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sizes", type=int, nargs="+", default=[1, 2, 4])
    for s in ap.parse_args().sizes:
        scan(s)


if __name__ == "__main__":
    main()
