"""Command-line interface: ``bek verify | criteria | witness | sweep | search``.

Exit codes: 0 success, 1 failed check, 2 usage error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import secrets
import sys
from dataclasses import asdict, dataclass, field
from datetime import datetime, timezone
from fractions import Fraction
from pathlib import Path

from . import __version__, criteria, verification
from .optimizer import DEFAULT_SEED, SeeSawConfig, conjecture_evidence, sweep_b
from .states import flagged_mixture, rho_pent, werner
from .tensor_core import tensor
from .witness import threshold_lambda, witness_value

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2
VERDICT_TOL = 1e-9
SWEEP_COLUMNS = ("b", "lambda", "min_value", "best_start", "iterations", "converged")


class UsageError(Exception):
    pass


@dataclass
class RunManifest:
    command: str
    parameters: dict
    rng_seed: int | None = None
    tool_version: str = __version__
    timestamp: str = field(
        default_factory=lambda: datetime.now(timezone.utc).isoformat(timespec="seconds"))

    def to_dict(self) -> dict:
        return asdict(self)


def _fmt(x) -> str:
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, int):
        return str(x)
    return f"{float(x):.17g}"


def sweep_csv(records) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(SWEEP_COLUMNS)
    for r in records:
        w.writerow([_fmt(r.b), _fmt(r.lam), _fmt(r.min_value), r.best_start,
                    r.iterations, _fmt(r.converged)])
    return buf.getvalue()


def _emit(args, payload: dict, lines: list[str]):
    if args.json:
        print(json.dumps(payload, indent=2, sort_keys=True))
    else:
        print("\n".join(lines))


def _seed(args) -> int:
    return secrets.randbits(63) if args.entropy else args.seed


def cmd_verify(args) -> int:
    checks = verification.run_checks(args.inject_fault)
    failed = [c for c in checks if not c.passed]
    lines = [f"[{'PASS' if c.passed else 'FAIL'}] {c.name}  (residual {c.residual:.3g}, "
             f"tol {c.tolerance:.0e})" for c in checks]
    lines.append(f"{len(checks) - len(failed)}/{len(checks)} checks passed")
    if failed:
        lines.append("failed: " + ", ".join(c.name for c in failed))
    _emit(args, {"checks": [c.to_dict() for c in checks], "passed": not failed,
                 "failed": [c.name for c in failed]}, lines)
    return EXIT_FAIL if failed else EXIT_OK


def _criteria_state(name: str, lam):
    if name == "pent":
        return rho_pent()
    if lam is None:
        raise UsageError(f"state '{name}' requires --lambda")
    try:
        rw = werner(lam)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    if name == "werner":
        return rw
    if name == "product":
        return tensor(rw, rho_pent())
    return flagged_mixture(rho_pent(), rw)


def cmd_criteria(args) -> int:
    rep = criteria.report(_criteria_state(args.state, args.lam))
    d = rep.to_dict()
    payload = {"state": args.state, "lambda": args.lam, **d}
    lines = [f"state={args.state}" + (f" lambda={args.lam}" if args.lam is not None else "")]
    lines += [f"{k}={v}" for k, v in d.items()]
    _emit(args, payload, lines)
    return EXIT_OK


def cmd_witness(args) -> int:
    if args.lam <= 1 / 8:
        raise UsageError("--lambda must exceed 1/8")
    if args.lam < 0.5 and args.convention == "normalized":
        raise UsageError("normalized convention needs a valid Werner state, lambda >= 1/2")
    value = witness_value(args.lam, args.convention)
    verdict = "distillable" if value < -VERDICT_TOL else "not detected"
    payload = {"lambda": args.lam, "convention": args.convention, "value": value,
               "threshold": threshold_lambda(), "verdict": verdict}
    lines = [f"witness ({args.convention}) at lambda={args.lam}: {value:.17g}",
             f"threshold lambda: {threshold_lambda():.17g}",
             f"verdict: {verdict}"]
    _emit(args, payload, lines)
    return EXIT_OK


def _config(args, seed: int) -> SeeSawConfig:
    return SeeSawConfig(max_iters=args.max_iters, num_starts=args.starts, rng_seed=seed)


def cmd_sweep(args) -> int:
    b_min, b_max = args.b_min, args.b_max
    if not Fraction(1, 6) < b_min < b_max <= Fraction(1, 5):
        raise UsageError("need 1/6 < b-min < b-max <= 1/5")
    if args.steps < 2:
        raise UsageError("--steps must be >= 2")
    seed = _seed(args)
    grid = [b_min + k * (b_max - b_min) / (args.steps - 1) for k in range(args.steps)]
    records = sweep_b(grid, _config(args, seed))
    body = sweep_csv(records)
    manifest = RunManifest("sweep", {"b_min": str(b_min), "b_max": str(b_max),
                                     "steps": args.steps, "starts": args.starts,
                                     "max_iters": args.max_iters}, seed)
    out = Path(args.out)
    try:
        out.write_text(body, newline="")
        Path(f"{out}.manifest.json").write_text(json.dumps(manifest.to_dict(), indent=2) + "\n")
    except OSError as exc:
        raise UsageError(f"cannot write {out}: {exc}") from exc
    payload = {"manifest": manifest.to_dict(), "out": str(out),
               "records": [asdict(r) for r in records]}
    _emit(args, payload, [body.rstrip("\n"), f"wrote {out} ({len(records)} rows)"])
    return EXIT_OK


def cmd_search(args) -> int:
    if args.n not in (1, 2, 3):
        raise UsageError("--n must be 1, 2 or 3")
    if args.lam < 0.5:
        raise UsageError("--lambda must be >= 1/2")
    seed = _seed(args)
    res = conjecture_evidence(args.n, args.lam, _config(args, seed), min_lambda=0.5)
    found = res.value < -VERDICT_TOL
    verdict = "negativity found" if found else "no negativity found"
    manifest = RunManifest("search", {"n": args.n, "lambda": args.lam, "starts": args.starts,
                                      "max_iters": args.max_iters}, seed)
    payload = {"manifest": manifest.to_dict(), "n": args.n, "lambda": args.lam,
               "min_value": res.value, "best_start": res.starts[res.best_start].index,
               "iterations": res.iterations, "converged": res.converged, "verdict": verdict}
    if args.certificate:
        amps = res.ket.amplitudes
        cert = {"manifest": manifest.to_dict(), "value": res.value,
                "layout": [list(f) for f in res.ket.layout.factors],
                "amplitudes": [x for z in amps for x in (float(z.real), float(z.imag))]}
        Path(args.certificate).write_text(json.dumps(cert, indent=2) + "\n")
        payload["certificate"] = args.certificate
    lines = [f"n={args.n} lambda={args.lam} starts={args.starts} seed={seed}",
             f"min_value: {res.value:.17g}", f"verdict: {verdict}"]
    _emit(args, payload, lines)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", default=argparse.SUPPRESS,
                        help="machine-readable output")

    p = argparse.ArgumentParser(prog="bek", parents=[common],
                                description="Bound-entanglement activation toolkit")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("verify", parents=[common], help="run the closed-form check suite")
    s.add_argument("--inject-fault", choices=sorted(verification.FAULTS),
                   help="corrupt the pentagon constants (self-test of the suite)")
    s.set_defaults(func=cmd_verify)

    s = sub.add_parser("criteria", parents=[common], help="PT and reduction criteria")
    s.add_argument("state", choices=["werner", "pent", "product", "flagged"])
    s.add_argument("--lambda", dest="lam", type=float)
    s.set_defaults(func=cmd_criteria)

    s = sub.add_parser("witness", parents=[common], help="analytic witness value")
    s.add_argument("--lambda", dest="lam", type=float, required=True)
    g = s.add_mutually_exclusive_group()
    g.add_argument("--raw", dest="convention", action="store_const", const="raw")
    g.add_argument("--normalized", dest="convention", action="store_const", const="normalized")
    s.set_defaults(func=cmd_witness, convention="raw")

    def optimizer_opts(s, starts):
        s.add_argument("--starts", type=int, default=starts)
        s.add_argument("--seed", type=int, default=DEFAULT_SEED)
        s.add_argument("--entropy", action="store_true", help="draw a fresh random seed")
        s.add_argument("--max-iters", type=int, default=500)

    s = sub.add_parser("sweep", parents=[common], help="activation minimum versus b")
    s.add_argument("--b-min", type=Fraction, required=True)
    s.add_argument("--b-max", type=Fraction, required=True)
    s.add_argument("--steps", type=int, required=True)
    s.add_argument("--out", required=True)
    optimizer_opts(s, 32)
    s.set_defaults(func=cmd_sweep)

    s = sub.add_parser("search", parents=[common], help="n-copy rank-2 negativity search")
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--lambda", dest="lam", type=float, required=True)
    s.add_argument("--certificate", help="write the best vector to this JSON file")
    optimizer_opts(s, 64)
    s.set_defaults(func=cmd_search)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    args.json = getattr(args, "json", False)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (UsageError, ValueError) as exc:
        print(f"bek {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
