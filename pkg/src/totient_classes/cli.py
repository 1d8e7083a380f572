"""Command-line front end.

Records go to stdout (one per line under ``--format json``), diagnostics to
stderr.  Exit codes: 0 success, 1 usage error, 2 verification failure.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
from dataclasses import dataclass
from fractions import Fraction

from . import checks
from .classifier import (
    CLASS_SCAN_CAP,
    SCHEMA,
    FactoredModulus,
    Rationale,
    ResidueClass,
    classify,
    scan_classes,
    witness_prime,
)
from .constructions import assemble, exclusion_check, instance_from_lists, measured_free_fraction
from .goodness import forbidden_scan, good_scan
from .modmath import FactorizationError
from .oracle import build_sieve, cross_validate, inverse_phi, question_scan
from .valueset import ENUMERATION_CAP, MATERIALIZE_BUDGET, TableCache

ENV_PREFIX = "TOTIENT_CLASSES_"
FORMATS = ("text", "json", "csv")
CLASS_COLUMNS = ("schema", "a", "M", "verdict", "rationale", "witness", "totient", "prime")


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    sieve_limit: int = 10**7
    class_scan_cap: int = CLASS_SCAN_CAP
    enumeration_cap: int = ENUMERATION_CAP
    worker_count: int = os.cpu_count() or 1
    output_format: str = "text"
    cache_path: str | None = None

    def __post_init__(self):
        for name in ("sieve_limit", "class_scan_cap", "enumeration_cap", "worker_count"):
            if getattr(self, name) < 1:
                raise UsageError(f"{name} must be positive")
        if self.output_format not in FORMATS:
            raise UsageError(f"format must be one of {FORMATS}")

    @classmethod
    def from_sources(cls, args: argparse.Namespace, env=os.environ) -> RunConfig:
        def pick(flag, key, conv, default):
            val = getattr(args, flag, None)
            if val is None and ENV_PREFIX + key in env:
                try:
                    val = conv(env[ENV_PREFIX + key])
                except ValueError as exc:
                    raise UsageError(f"bad {ENV_PREFIX + key}: {exc}") from exc
            return default if val is None else val

        fmt = "json" if getattr(args, "json", False) else pick("format", "FORMAT", str, "text")
        return cls(
            sieve_limit=pick("sieve_limit", "SIEVE_LIMIT", int, cls.sieve_limit),
            class_scan_cap=pick("class_scan_cap", "CLASS_SCAN_CAP", int, cls.class_scan_cap),
            enumeration_cap=pick("enumeration_cap", "ENUMERATION_CAP", int, cls.enumeration_cap),
            worker_count=pick("workers", "WORKERS", int, os.cpu_count() or 1),
            output_format=fmt,
            cache_path=pick("cache_path", "CACHE_PATH", str, None),
        )


class Emitter:
    def __init__(self, fmt: str, out=None):
        self.fmt = fmt
        self.out = out or sys.stdout
        self._csv_keys = None

    def record(self, rec: dict, text: str | None = None, columns=None) -> None:
        if self.fmt == "json":
            self.out.write(json.dumps(rec, default=str) + "\n")
        elif self.fmt == "csv":
            flat = {k: json.dumps(v) if isinstance(v, (dict, list)) else v for k, v in rec.items()}
            keys = list(columns) if columns else list(flat)
            if keys != self._csv_keys:
                self._csv_keys = keys
                csv.writer(self.out, lineterminator="\n").writerow(keys)
            csv.writer(self.out, lineterminator="\n").writerow([flat.get(k, "") for k in keys])
        else:
            self.out.write((text if text is not None else _text(rec)) + "\n")


def _text(rec: dict) -> str:
    return " ".join(f"{k}={v}" for k, v in rec.items() if k != "schema")


def _modulus(args) -> FactoredModulus:
    if args.factored:
        try:
            M = FactoredModulus.parse(args.factored)
        except ValueError as exc:
            raise UsageError(str(exc)) from exc
        if args.modulus is not None and args.modulus != M.value:
            raise UsageError("--modulus and --factored disagree")
        return M
    if args.modulus is None:
        raise UsageError("give --modulus or --factored")
    if args.modulus < 1:
        raise UsageError("modulus must be positive")
    try:
        return FactoredModulus.from_int(args.modulus)
    except FactorizationError as exc:
        raise UsageError(str(exc)) from exc


def _warm_cache(cfg: RunConfig, M: FactoredModulus) -> None:
    if not cfg.cache_path:
        return
    cache = TableCache(cfg.cache_path)
    for p, e in M.odd:
        q = p**e
        if q <= cfg.enumeration_cap and (p - 1) * p ** (e - 1) * q <= MATERIALIZE_BUDGET:
            cache.get(q)


def _classification_text(c) -> str:
    head = f"{c.rc.a} mod {c.rc.M.value}: {c.verdict.value} ({c.rationale.value})"
    if c.witness is not None:
        head += f" witness x={c.witness.x} k={c.witness.k} y={c.witness.y}"
    if c.totient is not None:
        head += f" totient={c.totient}"
    if c.prime is not None:
        head += f" prime={c.prime}"
    return head


def cmd_classify(args, cfg: RunConfig, em: Emitter) -> int:
    M = _modulus(args)
    if M.value < 2:
        raise UsageError("modulus must be at least 2")
    _warm_cache(cfg, M)
    c = classify(ResidueClass.of(args.residue, M), cap=cfg.enumeration_cap)
    rec = c.to_record()
    text = _classification_text(c)
    if args.find_prime and c.rationale is Rationale.UNIT_SOLUTION:
        pw = witness_prime(c.rc, c.witness, args.find_prime)
        if pw is not None:
            rec["prime_witness"] = {"p": pw.p, "k": pw.k, "value_mod_M": str(pw.value_mod_M), "ok": pw.ok}
            text += f" prime p={pw.p} phi(p^{pw.k}) = {pw.value_mod_M} mod M"
    em.record(rec, text)
    return 0


def cmd_scan(args, cfg: RunConfig, em: Emitter) -> int:
    M = _modulus(args)
    _warm_cache(cfg, M)
    report = scan_classes(
        M, args.filter, class_cap=cfg.class_scan_cap, workers=cfg.worker_count, cap=cfg.enumeration_cap
    )
    if not args.summary_only:
        for c in report.classifications:
            em.record(c.to_record(), _classification_text(c), CLASS_COLUMNS)
    s = report.summary()
    em.record(s, f"summary: {s['classes']} classes, counts {s['counts']}, "
                 f"totient-free fraction {s['totient_free_fraction']:.6f}")
    return 0


def cmd_sieve_verify(args, cfg: RunConfig, em: Emitter) -> int:
    M = _modulus(args)
    limit = args.limit or cfg.sieve_limit
    report = cross_validate(M, build_sieve(limit))
    for e in report.evidence:
        if not args.summary_only or e.status == "contradiction":
            em.record(e.to_record(), f"{_classification_text(e.classification)} hits={len(e.hits)} [{e.status}]")
    s = report.summary()
    em.record(s, f"summary: {s['classes']} classes, statuses {s['statuses']}, "
                 f"{s['contradictions']} contradictions")
    return 2 if report.contradictions else 0


def cmd_construct_t2(args, cfg: RunConfig, em: Emitter) -> int:
    theta = Fraction(args.theta)
    p_list = _int_list(args.p_list)
    q_list = _int_list(args.q_list)
    if args.r_list is not None:
        inst = instance_from_lists(p_list, q_list, _int_list(args.r_list), y=args.y, theta=theta)
    else:
        inst = assemble(args.eps, args.y, theta, p_list, q_list)
    doc = {"schema": SCHEMA, "type": "instance", **inst.to_document()}
    em.record(doc, json.dumps(doc, default=str))
    status = 0
    if args.check:
        rep = exclusion_check(inst)
        frac = measured_free_fraction(inst, cfg.class_scan_cap)
        rec = {
            "schema": SCHEMA,
            "type": "summary",
            "covered_classes": rep.covered_classes,
            "solvable_covered_classes": rep.solvable_covered_classes,
            "solvable_fraction": rep.solvable_fraction,
            "violations": len(rep.violations),
            "totient_free_fraction_mod_4m": frac,
        }
        em.record(rec)
        status = 2 if rep.violations else 0
    return status


def cmd_good_scan(args, cfg: RunConfig, em: Emitter) -> int:
    report, verdicts = good_scan(args.start, args.stop)
    if args.list:
        for v in verdicts:
            em.record(v.to_record())
    em.record(report.to_record())
    return 0


def cmd_forbidden_scan(args, cfg: RunConfig, em: Emitter) -> int:
    report, hits = forbidden_scan(args.x)
    if args.list:
        for c in hits:
            em.record(c.to_record())
    em.record(report.to_record())
    return 0


_SUITE_OPTS = {
    "1": lambda a: {"max_s": a.max_s, "max_k": a.max_k},
    "2": lambda a: {"primes": tuple(_int_list(a.primes)), "max_k": a.max_k, "max_l": a.max_l},
    "4": lambda a: {"max_prime": a.max_prime},
    "8": lambda a: {"max_prime": a.max_prime, "max_L": a.max_L},
}
_SUITE_DEFAULTS = {
    "1": {"max_k": 12},
    "2": {"max_k": 5},
    "4": {"max_prime": 199},
    "8": {"max_prime": 61},
}


def cmd_lemma_check(args, cfg: RunConfig, em: Emitter) -> int:
    for key, val in _SUITE_DEFAULTS[args.lemma].items():
        if getattr(args, key) is None:
            setattr(args, key, val)
    n, bad = checks.SUITES[args.lemma](**_SUITE_OPTS[args.lemma](args))
    for v in bad:
        em.record({"schema": SCHEMA, "violation": v}, f"violation: {v}")
    rec = {"schema": SCHEMA, "type": "summary", "suite": args.lemma, "cases": n, "violations": len(bad)}
    text = f"all checks passed: 0 violations ({n} cases)" if not bad else f"{len(bad)} violations ({n} cases)"
    em.record(rec, text)
    return 2 if bad else 0


def cmd_question_scan(args, cfg: RunConfig, em: Emitter) -> int:
    found = question_scan(args.limit)
    for c in found:
        em.record(
            {"schema": SCHEMA, "a": c.a, "preimages": list(c.preimages), "nontotient": c.nontotient},
            f"{c.a}: " + ("nontotient" if c.nontotient else f"preimages {list(c.preimages)}"),
        )
    em.record({"schema": SCHEMA, "type": "summary", "limit": args.limit, "count": len(found)})
    return 0


def cmd_inverse_phi(args, cfg: RunConfig, em: Emitter) -> int:
    pre = inverse_phi(args.value)
    em.record({"schema": SCHEMA, "value": args.value, "preimages": pre},
              f"phi^-1({args.value}) = {pre}")
    return 0


def _int_list(text):
    if text is None:
        return None
    try:
        return [int(t) for t in text.replace(" ", "").split(",") if t]
    except ValueError as exc:
        raise UsageError(f"bad integer list {text!r}") from exc


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--format", choices=FORMATS, default=None)
    common.add_argument("--json", action="store_true", help="shorthand for --format json")
    common.add_argument("--workers", type=int, default=None)
    common.add_argument("--sieve-limit", type=int, default=None)
    common.add_argument("--class-scan-cap", type=int, default=None)
    common.add_argument("--enumeration-cap", type=int, default=None)
    common.add_argument("--cache-path", default=None)

    parser = _Parser(prog="totient-classes", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def modulus_args(p):
        p.add_argument("--modulus", type=int)
        p.add_argument("--factored", help='e.g. "2^2 * 3*7*13"')

    p = sub.add_parser("classify", parents=[common], help="classify one residue class")
    p.add_argument("--residue", type=int, required=True)
    modulus_args(p)
    p.add_argument("--find-prime", type=int, default=0, metavar="BOUND",
                   help="also search BOUND candidates for a prime p with phi(p^k) in the class")
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("scan", parents=[common], help="classify every class mod M")
    modulus_args(p)
    p.add_argument("--filter", choices=("all", "two-mod-four"), default="all")
    p.add_argument("--summary-only", action="store_true")
    p.set_defaults(func=cmd_scan)

    p = sub.add_parser("sieve-verify", parents=[common], help="cross-check verdicts against a phi sieve")
    modulus_args(p)
    p.add_argument("--limit", type=int)
    p.add_argument("--summary-only", action="store_true")
    p.set_defaults(func=cmd_sieve_verify)

    p = sub.add_parser("construct-t2", parents=[common], help="build a modulus with many totient-free classes")
    p.add_argument("--eps", type=float)
    p.add_argument("--y", type=int, required=True)
    p.add_argument("--theta", default="9/20")
    p.add_argument("--p-list")
    p.add_argument("--q-list")
    p.add_argument("--r-list")
    p.add_argument("--check", action="store_true", help="run the exclusion scan and free-fraction measurement")
    p.set_defaults(func=cmd_construct_t2)

    p = sub.add_parser("good-scan", parents=[common], help="count good odd m in [start, stop]")
    p.add_argument("--start", type=int, default=3)
    p.add_argument("--stop", type=int, required=True)
    p.add_argument("--list", action="store_true")
    p.set_defaults(func=cmd_good_scan)

    p = sub.add_parser("forbidden-scan", parents=[common], help="count forbidden odd m in (x, 2x]")
    p.add_argument("--x", type=int, required=True)
    p.add_argument("--list", action="store_true")
    p.set_defaults(func=cmd_forbidden_scan)

    p = sub.add_parser("lemma-check", parents=[common], help="run a property suite")
    p.add_argument("lemma", choices=sorted(checks.SUITES))
    p.add_argument("--max-s", type=int, default=8)
    p.add_argument("--max-k", type=int, default=None)
    p.add_argument("--primes", default="3,7,11,19")
    p.add_argument("--max-l", type=int, default=6)
    p.add_argument("--max-prime", type=int, default=None)
    p.add_argument("--max-L", type=int, default=3)
    p.set_defaults(func=cmd_lemma_check)

    p = sub.add_parser("question-scan", parents=[common], help="a = 2 mod 4 that are nontotients or have preimages {p, 2p}")
    p.add_argument("--limit", type=int, required=True)
    p.set_defaults(func=cmd_question_scan)

    p = sub.add_parser("inverse-phi", parents=[common], help="all z with phi(z) = value")
    p.add_argument("value", type=int)
    p.set_defaults(func=cmd_inverse_phi)
    return parser


def main(argv=None, out=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = RunConfig.from_sources(args)
        return args.func(args, cfg, Emitter(cfg.output_format, out))
    except (UsageError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
