"""Classify the worked examples and time each one."""

import time

from totient_classes import ResidueClass, classify
from totient_classes.modmath import factorize, period_cap

CASES = [
    (302, "2^2 * 3 * 7 * 13"),
    (790, "2^2 * 3 * 7 * 13"),
    (14, "2^2 * 3 * 5 * 13 * 37"),
    (10, "2^2 * 3 * 7 * 11 * 13 * 29 * 31 * 41 * 43 * 101 * 151 * 211 * 281 * 701"),
    (2, "2^2 * 3"),
]


def main():
    for a, M in CASES:
        t0 = time.perf_counter()
        c = classify(ResidueClass.of(a, M))
        dt = time.perf_counter() - t0
        n = period_cap(factorize(c.rc.M.m))
        print(f"{a} mod {M}: {c.verdict.value} ({c.rationale.value}) k-cap={n} "
              f"totient={c.totient} prime={c.prime} [{dt * 1e3:.1f} ms]")


if __name__ == "__main__":
    main()
