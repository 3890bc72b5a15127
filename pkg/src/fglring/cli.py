"""Command-line front end.

Every subcommand writes one JSON document (``schema: 1``, sorted keys) to
stdout or ``--output``; progress goes to stderr.  Exit status: 0 when all
checks pass, 1 on a failed verification, 2 on a usage error.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Optional, Sequence

from . import __version__
from .exact_arith import ExactArithError
from .fgl import FglError, FglSpec, associativity_defect, exponential
from .genus import OdeError, krichever_ode_check
from .iso import IsoError, verify_report
from .poly import PolyError, gens_json, parse_poly
from .series import SeriesError
from .universal import (
    KINDS,
    MODULI,
    UniversalError,
    claim_memberships,
    d_of,
    expected_rho,
    kummer_d,
    lambda_certificate,
    membership_record,
    perturbed_certificate,
    torsion_scan,
    universal_ring,
)

SCHEMA = 1
ORDER_CAP = 14
THREADS_ENV = "FGLRING_THREADS"

log = logging.getLogger("fglring")


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    command: str
    order: Optional[int] = None
    weight: Optional[int] = None
    kind: str = "buchstaber"
    output: Optional[str] = None
    certificates: bool = False
    threads: int = 1
    cap: int = ORDER_CAP

    def check_bound(self, name: str, value: Optional[int], lo: int) -> None:
        if value is None:
            return
        if value < lo:
            raise UsageError(f"{name} must be >= {lo}")
        if value > self.cap:
            raise UsageError(f"{name} = {value} exceeds the cap {self.cap}; raise it with --cap")


def _threads(arg: Optional[int]) -> int:
    if arg is not None:
        n = arg
    else:
        raw = os.environ.get(THREADS_ENV, "1")
        try:
            n = int(raw)
        except ValueError:
            raise UsageError(f"{THREADS_ENV} must be an integer, got {raw!r}") from None
    if n < 1:
        raise UsageError("thread count must be >= 1")
    return n


def _pmap(fn, items: list, threads: int) -> list:
    """Order-preserving map, in worker processes when threads > 1."""
    if threads == 1 or len(items) < 2:
        return [fn(x) for x in items]
    with ProcessPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))


def _kinds(kind: str) -> list[str]:
    return list(KINDS) if kind == "both" else [kind]


def _spec(kind: str, order: int) -> FglSpec:
    if kind == "generic":
        return FglSpec.universal_generic(order)
    if kind == "buchstaber":
        return FglSpec.universal_buchstaber(order)
    return FglSpec.universal_krichever(order)


# subcommands; each returns (payload, passed)


def cmd_expand(cfg: RunConfig, args) -> tuple[dict, bool]:
    spec = _spec(cfg.kind, cfg.order)
    F = spec.expand(cfg.order)
    return {"kind": cfg.kind, "gens": gens_json(F.gens), "series": F.to_json()}, True


def cmd_defect(cfg: RunConfig, args) -> tuple[dict, bool]:
    spec = _spec(cfg.kind, cfg.order)
    N = associativity_defect(spec.expand(cfg.order), cfg.order)
    return {"kind": cfg.kind, "gens": gens_json(N.gens), "zero": not N, "series": N.to_json()}, True


def cmd_verify_iso(cfg: RunConfig, args) -> tuple[dict, bool]:
    records = verify_report(cfg.weight, args.order, args.slice_order, log=lambda m: log.info("verify-iso: %s", m))
    failed = [r for r in records if not r["passed"]]
    records.sort(key=lambda r: (r["identity"], r["weight"]))
    return {"max_weight": cfg.weight, "order": args.order, "records": records, "failed": failed}, not failed


def _rho_job(job):
    kind, n, perturb = job
    ring = universal_ring(kind, n)
    lam = lambda_certificate(n)
    rec = {"kind": kind, "n": n, "d": d_of(n + 1), "lambdas": lam, "rho": ring.rho(n, lam)}
    if perturb and n >= 2:
        alt = perturbed_certificate(n, lam)
        rec["lambdas_perturbed"] = alt
        rec["rho_perturbed"] = ring.rho(n, alt)
    return rec


def cmd_rho(cfg: RunConfig, args) -> tuple[dict, bool]:
    jobs = [(k, n, args.perturb) for k in _kinds(cfg.kind) for n in range(1, cfg.weight + 1)]
    rows = _pmap(_rho_job, jobs, cfg.threads)
    ok = True
    for r in rows:
        log.info("rho %s n=%d: %s", r["kind"], r["n"], r["rho"])
        r["expected"] = expected_rho(r["n"])
        r["match"] = r["rho"] == r["expected"] and r.get("rho_perturbed", r["rho"]) == r["rho"]
        if not cfg.certificates:
            r.pop("lambdas", None)
            r.pop("lambdas_perturbed", None)
        ok = ok and r["match"]
    if cfg.kind == "both":
        by = {(r["kind"], r["n"]): r["rho"] for r in rows}
        ok = ok and all(by["buchstaber", n] == by["krichever", n] for n in range(1, cfg.weight + 1))
    return {"note": "rho null means infinite order", "rows": rows}, ok


def _torsion_job(job):
    kind, w, modulo = job
    if modulo == "ass":
        return torsion_scan(kind, w)
    pres = universal_ring(kind, w).presentation(w, modulo)
    return {"kind": kind, "weight": w, "free_rank": pres.free_rank, "torsion": list(pres.torsion)}


def cmd_torsion(cfg: RunConfig, args) -> tuple[dict, bool]:
    jobs = [(k, w, args.modulo) for k in _kinds(cfg.kind) for w in range(1, cfg.weight + 1)]
    rows = _pmap(_torsion_job, jobs, cfg.threads)
    for r in rows:
        r["modulo"] = args.modulo
        log.info("torsion %s w=%d: rank %d torsion %s", r["kind"], r["weight"], r["free_rank"], r["torsion"])
    ok = all(not r.get("flagged") for r in rows)
    return {"rows": rows}, ok


def cmd_en(cfg: RunConfig, args) -> tuple[dict, bool]:
    n = cfg.weight
    lam = [int(x) for x in args.lambdas.split(",")] if args.lambdas else lambda_certificate(n)
    rows = []
    for kind in _kinds(cfg.kind):
        ring = universal_ring(kind, n)
        try:
            e = ring.e(n, lam)
        except UniversalError as exc:
            raise UsageError(str(exc)) from None
        rows.append({"kind": kind, "e_n": e.to_json(), "text": e.to_text(), "rho": ring.rho(n, lam)})
    d = d_of(n + 1)
    ok = d == kummer_d(n + 1)
    return {"n": n, "d": d, "kummer_d": kummer_d(n + 1), "lambdas": lam, "rows": rows}, ok


def cmd_exponential(cfg: RunConfig, args) -> tuple[dict, bool]:
    spec = _spec(cfg.kind, cfg.order + 1)
    f = exponential(spec.expand(cfg.order + 1), cfg.order)
    return {"kind": cfg.kind, "gens": gens_json(f.gens), "series": f.to_json()}, True


def cmd_ode_check(cfg: RunConfig, args) -> tuple[dict, bool]:
    check = krichever_ode_check(cfg.order)
    return check.to_json(), check.ok


def cmd_membership(cfg: RunConfig, args) -> tuple[dict, bool]:
    kind = "buchstaber" if cfg.kind == "both" else cfg.kind
    if args.poly is not None:
        ring = universal_ring(kind, cfg.weight)
        try:
            p = parse_poly(args.poly, ring.gens)
        except PolyError as exc:
            raise UsageError(str(exc)) from None
        ws = p.weights()
        if len(ws) > 1:
            raise UsageError("polynomial must be homogeneous")
        if ws and max(ws) > cfg.weight:
            raise UsageError(f"polynomial has weight {max(ws)} > --max-weight {cfg.weight}")
        rec = membership_record(ring, p, args.modulo, cfg.certificates)
        return {"kind": kind, "modulo": args.modulo, "gens": gens_json(ring.gens), "rows": [rec]}, rec["member"]
    if kind != "buchstaber":
        raise UsageError("the built-in claims are stated in Buchstaber coordinates")
    rows = []
    for rec in claim_memberships(cfg.weight, cfg.certificates):
        if not cfg.certificates:
            rec.pop("certificate", None)
        log.info("membership %s k=%d: %s", rec["claim"], rec["k"], rec["member"])
        rows.append(rec)
    gens = gens_json(universal_ring(kind, cfg.weight).gens)
    return {"kind": kind, "modulo": "ass", "gens": gens, "rows": rows}, all(r["member"] for r in rows)


COMMANDS = {
    "expand": cmd_expand,
    "defect": cmd_defect,
    "verify-iso": cmd_verify_iso,
    "rho": cmd_rho,
    "torsion": cmd_torsion,
    "en": cmd_en,
    "exponential": cmd_exponential,
    "ode-check": cmd_ode_check,
    "membership": cmd_membership,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--output", "-o", help="write the JSON report here instead of stdout")
    common.add_argument("--certificates", action="store_true", help="include certificates in the report")
    common.add_argument("--threads", type=int, help=f"worker processes (default ${THREADS_ENV} or 1)")
    common.add_argument("--cap", type=int, default=ORDER_CAP, help="largest accepted order or weight")
    common.add_argument("-v", "--verbose", action="store_true", help="progress records on stderr")

    p = argparse.ArgumentParser(prog="fglring", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    kinds3 = ("generic", "buchstaber", "krichever")
    s = sub.add_parser("expand", parents=[common], help="expand a universal law")
    s.add_argument("--kind", choices=kinds3, default="buchstaber")
    s.add_argument("--order", type=int, default=6)

    s = sub.add_parser("defect", parents=[common], help="associativity defect of a universal law")
    s.add_argument("--kind", choices=kinds3, default="buchstaber")
    s.add_argument("--order", type=int, default=5)

    s = sub.add_parser("verify-iso", parents=[common], help="check the isomorphism identities")
    s.add_argument("--max-weight", type=int, default=12)
    s.add_argument("--order", type=int, default=10, help="order of the law comparisons")
    s.add_argument("--slice-order", type=int, default=10, help="u-order of the defect slices")

    s = sub.add_parser("rho", parents=[common], help="orders of e_n modulo I_ass + I^2")
    s.add_argument("--max-n", type=int, default=10)
    s.add_argument("--kind", choices=KINDS + ("both",), default="both")
    s.add_argument("--perturb", action="store_true", help="also use a second lambda certificate")

    s = sub.add_parser("torsion", parents=[common], help="invariant factors of graded components")
    s.add_argument("--max-weight", type=int, default=8)
    s.add_argument("--kind", choices=KINDS + ("both",), default="buchstaber")
    s.add_argument("--modulo", choices=MODULI, default="ass")

    s = sub.add_parser("en", parents=[common], help="the element e_n and d(n+1)")
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--kind", choices=KINDS + ("both",), default="buchstaber")
    s.add_argument("--lambdas", help="comma separated certificate, default from extended gcd")

    s = sub.add_parser("exponential", parents=[common], help="exponential of a universal law")
    s.add_argument("--kind", choices=kinds3, default="krichever")
    s.add_argument("--order", type=int, default=8)

    s = sub.add_parser("ode-check", parents=[common], help="fit the differential equation to the Krichever exponential")
    s.add_argument("--order", type=int, default=10)

    s = sub.add_parser("membership", parents=[common], help="ideal membership with certificates")
    s.add_argument("--poly", help="homogeneous polynomial; default: the built-in claims for 3 <= k <= W")
    s.add_argument("--kind", choices=KINDS, default="buchstaber")
    s.add_argument("--modulo", choices=MODULI, default="ass")
    s.add_argument("--max-weight", type=int, default=8)
    return p


def make_config(args) -> RunConfig:
    cfg = RunConfig(
        command=args.command,
        kind=getattr(args, "kind", "buchstaber"),
        output=args.output,
        certificates=args.certificates,
        threads=_threads(args.threads),
        cap=args.cap,
    )
    if args.command in ("expand", "defect", "exponential", "ode-check"):
        cfg.order = args.order
        lo = {"ode-check": 6, "exponential": 2}.get(args.command, 2)
        cfg.check_bound("--order", cfg.order, lo)
    elif args.command == "rho":
        cfg.weight = args.max_n
        cfg.check_bound("--max-n", cfg.weight, 1)
    elif args.command == "en":
        cfg.weight = args.n
        cfg.check_bound("--n", cfg.weight, 1)
    else:
        cfg.weight = args.max_weight
        cfg.check_bound("--max-weight", cfg.weight, {"verify-iso": 3, "membership": 1}.get(args.command, 1))
        if args.command == "verify-iso":
            cfg.check_bound("--order", args.order, 2)
            cfg.check_bound("--slice-order", args.slice_order, 2)
    return cfg


def dumps(payload: dict) -> str:
    return json.dumps(payload, sort_keys=True, indent=1) + "\n"


def run(argv: Sequence[str] | None = None) -> int:
    handlers = list(log.handlers)
    try:
        return _run(argv)
    finally:
        for h in log.handlers[:]:
            if h not in handlers:
                log.removeHandler(h)


def _run(argv: Sequence[str] | None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    handler = logging.StreamHandler(sys.stderr)
    handler.setFormatter(logging.Formatter("%(levelname)s %(name)s: %(message)s"))
    log.addHandler(handler)
    log.setLevel(logging.INFO if args.verbose else logging.WARNING)
    try:
        cfg = make_config(args)
        payload, passed = COMMANDS[cfg.command](cfg, args)
    except UsageError as exc:
        print(f"fglring {args.command}: error: {exc}", file=sys.stderr)
        return 2
    except (IsoError, OdeError) as exc:
        payload, passed = {"error": str(exc)}, False
    except (FglError, SeriesError, PolyError, UniversalError, ExactArithError) as exc:
        print(f"fglring {args.command}: error: {exc}", file=sys.stderr)
        return 2
    report = {"schema": SCHEMA, "command": cfg.command, "version": __version__, "passed": passed}
    report.update(payload)
    text = dumps(report)
    if cfg.output:
        with open(cfg.output, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0 if passed else 1


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
