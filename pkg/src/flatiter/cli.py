"""Command-line front end.

Exit codes: 0 related/valid, 1 negative verdict, 2 usage or parse error.
Terms are given as arguments; an argument ``@path`` reads the term from a
file.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from .axioms import CertificateError, ProofError, check_proof, format_certificate, parse_certificate
from .equivalences import RelKind, bisimilar, congruent
from .normalize import FuelExhausted, NotPotential, phi, saturate, strong_saturate, to_normal_form
from .parallel import eliminate_parallel, net_transitions, parse_net
from .prover import prove_congruent
from .semantics import build_lts
from .terms import ParseError, parse_process

RELS = [k.value for k in RelKind]


class UsageError(Exception):
    pass


def _text(arg: str) -> str:
    if arg.startswith("@"):
        try:
            return Path(arg[1:]).read_text().strip()
        except OSError as exc:
            raise UsageError(f"cannot read {arg[1:]}: {exc.strerror}") from None
    return arg


def _term(arg: str):
    return parse_process(_text(arg))


def _emit(args, verdict: dict, line: str):
    if getattr(args, "json", False):
        print(json.dumps(verdict, sort_keys=True))
    else:
        print(line)


def _related(t1: str, t2: str, rel: str, mode: str) -> bool:
    p, q = parse_process(t1), parse_process(t2)
    return (bisimilar if mode == "equivalence" else congruent)(p, q, rel)


def cmd_check(args) -> int:
    if args.batch:
        return _check_batch(args)
    if args.term2 is None:
        raise UsageError("check needs two terms or --batch FILE")
    t0 = time.perf_counter()
    ok = _related(_text(args.term1), _text(args.term2), args.rel, args.mode)
    verdict = {"command": "check", "inputs": [_text(args.term1), _text(args.term2)],
               "rel": args.rel, "mode": args.mode, "result": ok}
    if args.timing:
        verdict["seconds"] = round(time.perf_counter() - t0, 6)
    _emit(args, verdict, f"{'related' if ok else 'not related'} ({args.rel} {args.mode})")
    return 0 if ok else 1


def _check_batch(args) -> int:
    pairs = []
    for n, line in enumerate(Path(args.batch).read_text().splitlines(), 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        left, sep, right = line.partition(";")
        if not sep:
            raise UsageError(f"{args.batch}:{n}: expected 'term ; term'")
        parse_process(left.strip())
        parse_process(right.strip())
        pairs.append((left.strip(), right.strip()))
    jobs = [(l, r, args.rel, args.mode) for l, r in pairs]
    if args.jobs > 1:
        with ProcessPoolExecutor(args.jobs) as ex:
            results = list(ex.map(_related, *zip(*jobs))) if jobs else []
    else:
        results = [_related(*j) for j in jobs]
    for (l, r), ok in zip(pairs, results):
        verdict = {"command": "check", "inputs": [l, r], "rel": args.rel,
                   "mode": args.mode, "result": ok}
        _emit(args, verdict, f"{'related' if ok else 'not related'}\t{l}\t{r}")
    return 0 if all(results) else 1


def cmd_prove(args) -> int:
    p, q = _term(args.term1), _term(args.term2)
    out = prove_congruent(p, q, args.rel)
    if not out:
        print(f"not {args.rel} congruent: {out.describe()}")
        return 1
    cert = format_certificate(out.proof)
    if args.out:
        Path(args.out).write_text(cert)
        print(f"proved ({len(out.proof.steps)} steps), certificate written to {args.out}")
    else:
        sys.stdout.write(cert)
    return 0


def cmd_verify(args) -> int:
    try:
        text = Path(args.proof).read_text()
    except OSError as exc:
        raise UsageError(f"cannot read {args.proof}: {exc.strerror}") from None
    proof = parse_certificate(text)
    try:
        check_proof(proof, args.rel)
    except ProofError as exc:
        print(f"invalid under E_{args.rel}: {exc}")
        return 1
    print(f"valid under E_{args.rel} ({len(proof.steps)} steps)")
    return 0


def cmd_lts(args) -> int:
    text = _text(args.term)
    if "|" in text:
        lts = build_lts(parse_net(text), net_transitions)
    else:
        lts = build_lts(parse_process(text))
    sys.stdout.write(lts.to_aut())
    return 0


def _with_proof(args, term, proof, budget_name="normalization") -> int:
    if args.fuel is not None and len(proof.steps) > args.fuel:
        print(f"{budget_name} exceeded the step budget of {args.fuel}")
        return 2
    print(term)
    if args.out:
        Path(args.out).write_text(format_certificate(proof))
    elif args.proof:
        sys.stdout.write(format_certificate(proof))
    return 0


def cmd_normalize(args) -> int:
    term, proof = to_normal_form(_term(args.term), args.mode)
    return _with_proof(args, term, proof)


def cmd_saturate(args) -> int:
    p = _term(args.term)
    term, proof = (strong_saturate if args.strong else saturate)(p, args.rel)
    return _with_proof(args, term, proof, "saturation")


def cmd_phi(args) -> int:
    try:
        print(phi(_term(args.term), "strong" if args.rel == "strong" else "weak"))
    except NotPotential as exc:
        print(str(exc))
        return 1
    return 0


def cmd_expand(args) -> int:
    net = parse_net(_text(args.net))
    print(eliminate_parallel(net))
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="flatiter", description="Basic CCS with flat iteration.")
    sub = ap.add_subparsers(dest="command", required=True)

    c = sub.add_parser("check", help="decide an equivalence or congruence")
    c.add_argument("term1", nargs="?")
    c.add_argument("term2", nargs="?")
    c.add_argument("--rel", choices=RELS, default="strong")
    c.add_argument("--mode", choices=["equivalence", "congruence"], default="congruence")
    c.add_argument("--batch", metavar="FILE", help="lines of 'term ; term'")
    c.add_argument("--jobs", type=int, default=1)
    c.add_argument("--json", action="store_true")
    c.add_argument("--timing", action="store_true")
    c.set_defaults(func=cmd_check)

    c = sub.add_parser("prove", help="emit a proof certificate")
    c.add_argument("term1")
    c.add_argument("term2")
    c.add_argument("--rel", choices=RELS, default="strong")
    c.add_argument("--out", metavar="FILE")
    c.set_defaults(func=cmd_prove)

    c = sub.add_parser("verify", help="check a proof certificate")
    c.add_argument("proof")
    c.add_argument("--rel", choices=RELS, default="strong")
    c.set_defaults(func=cmd_verify)

    c = sub.add_parser("lts", help="print the transition system")
    c.add_argument("term")
    c.add_argument("--format", choices=["aut"], default="aut")
    c.set_defaults(func=cmd_lts)

    for name, fn, helptext in (("normalize", cmd_normalize, "prove equal to a normal form"),
                               ("saturate", cmd_saturate, "prove equal to a saturated term")):
        c = sub.add_parser(name, help=helptext)
        c.add_argument("term")
        if name == "normalize":
            c.add_argument("--mode", choices=["strong", "branching"], default="strong")
        else:
            c.add_argument("--rel", choices=["eta", "delay", "weak"], default="weak")
            c.add_argument("--strong", action="store_true", help="strong saturation")
        c.add_argument("--proof", action="store_true", help="print the certificate too")
        c.add_argument("--out", metavar="FILE", help="write the certificate here")
        c.add_argument("--fuel", type=int, help="maximum number of proof steps")
        c.set_defaults(func=fn)

    c = sub.add_parser("phi", help="translate into prefix iteration")
    c.add_argument("term")
    c.add_argument("--rel", choices=RELS, default="weak")
    c.set_defaults(func=cmd_phi)

    c = sub.add_parser("expand", help="eliminate parallel composition")
    c.add_argument("net")
    c.set_defaults(func=cmd_expand)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code else 0
    try:
        return args.func(args)
    except (ParseError, CertificateError, UsageError, FuelExhausted, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
