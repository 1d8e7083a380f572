"""Not-good odd m with all prime factors above p0 and no forbidden divisor.

Each hit shows that the threshold p0 in the prime-by-prime construction
must be larger than the configured value.
"""

import argparse

from totient_classes.goodness import corollary_contrapositive_scan


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--limit", type=int, default=3000)
    ap.add_argument("--p0", type=int, nargs="*", default=[1, 3, 5])
    args = ap.parse_args()
    for p0 in args.p0:
        hits = corollary_contrapositive_scan(args.limit, p0)
        shown = ", ".join(f"{v.m} (a={v.failing_a})" for v in hits[:10])
        print(f"p0={p0}: {len(hits)} violations up to {args.limit}" + (f": {shown}" if hits else ""))


if __name__ == "__main__":
    main()
