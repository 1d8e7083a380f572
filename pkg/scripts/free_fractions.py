"""Totient-free shares for a growing sequence of explicit instances.

For each instance we report the covered share, how many covered classes are
still solvable, the measured share of free classes mod 4m, and whether the
exponent exclusions held.
"""

import argparse
import json

from totient_classes.constructions import (
    assemble,
    exclusion_check,
    instance_from_lists,
    measured_free_fraction,
)

INSTANCES = [
    ([3], [5], []),
    ([3], [5], [13]),
    ([3], [5], [13, 17]),
    ([3], [5], [13, 17, 29]),
    ([3, 5], [7], [13]),
    ([3, 5], [7], [13, 37]),
    ([3], [7], [13, 19]),
]


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--json", action="store_true")
    ap.add_argument("--assembled", type=int, nargs="*", default=[20, 30],
                    help="also assemble eps=3.9 instances with these y values")
    args = ap.parse_args()
    insts = [instance_from_lists(p, q, r) for p, q, r in INSTANCES]
    insts += [assemble(3.9, y) for y in args.assembled]
    for inst in insts:
        if inst.m > 10**5:
            print(f"skip m={inst.m}: above the exclusion scan cap")
            continue
        rep = exclusion_check(inst)
        rec = {
            "P": inst.p_list, "Q": inst.q_list, "R": inst.r_list, "m": inst.m, "n": inst.n,
            "covered": rep.covered_classes / inst.m,
            "covered_solvable": rep.solvable_fraction,
            "free_mod_4m": measured_free_fraction(inst),
            "violations": len(rep.violations),
        }
        if args.json:
            print(json.dumps(rec))
        else:
            print(f"m={rec['m']:>7} P={rec['P']} Q={rec['Q']} R={rec['R']} covered={rec['covered']:.4f} "
                  f"solvable-in-covered={rec['covered_solvable']:.4f} free={rec['free_mod_4m']:.4f} "
                  f"violations={rec['violations']}")


if __name__ == "__main__":
    main()
