"""Good-number and forbidden-number densities over doubling ranges."""

import argparse

from totient_classes.goodness import forbidden_scan, good_scan


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--good-max", type=int, default=4000)
    ap.add_argument("--forbidden-max", type=int, default=10**5)
    args = ap.parse_args()

    x = 100
    while 2 * x <= args.good_max:
        rep, _ = good_scan(x + 1, 2 * x)
        print(f"good      ({x}, {2 * x}]: {rep.count}/{rep.total} = {rep.fraction:.4f}")
        x *= 2
    x = 100
    while 2 * x <= args.forbidden_max:
        rep, _ = forbidden_scan(x)
        print(f"forbidden ({x}, {2 * x}]: {rep.count}/{rep.total} = {rep.fraction:.4f}"
              f"  x/log^5 x = {rep.comparison:.4f}")
        x *= 2


if __name__ == "__main__":
    main()
