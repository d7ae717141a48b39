"""Command-line driver.

Every subcommand prints JSON (or CSV for ``measure --format csv``) and exits
0 when all its checks pass, 1 when one fails, 2 on usage errors.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import tempfile
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import checks
from .lattice import dft, dump_state, load_state, make_lattice, state_to_dict
from .lhv import check_associativity_gap, enumerate_digit_lhv, random_real_lhv
from .measurement import (
    SETTING_NAMES,
    RunConfig,
    correlators,
    mermin_statistic,
    records_to_csv,
    sample,
    setting_statistics,
)
from .modular import commutation_table, su2_ops, summarize_table
from .states import (
    SYSTEMS,
    BVector,
    labels_from_z,
    psi_bz,
    solution_for,
    solve_constraints,
    verify_eigensystem,
)
from .weyl import ghz_certificate

DEFAULTS = {"s": 2, "b": "1,0,0,0", "shots": 10_000, "seed": 42, "format": "json"}


class CheckFailed(Exception):
    def __init__(self, payload: dict):
        super().__init__(payload.get("failed"))
        self.payload = payload


def rational(text: str) -> Fraction:
    text = text.strip()
    if "." in text or "e" in text.lower():
        raise argparse.ArgumentTypeError(f"rationals are written num/den, got {text!r}")
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise argparse.ArgumentTypeError(f"bad rational {text!r}") from exc


def rationals(n: int):
    def parse(text: str) -> tuple[Fraction, ...]:
        vals = tuple(rational(t) for t in str(text).split(","))
        if len(vals) != n:
            raise argparse.ArgumentTypeError(f"expected {n} comma-separated rationals, got {len(vals)}")
        return vals

    return parse


def bvector(text) -> BVector:
    try:
        return BVector.parse(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from exc


def write_atomic(path: str | os.PathLike, text: str) -> None:
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent or ".", prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _emit(payload: dict, args) -> None:
    text = json.dumps(payload, indent=2) + "\n"
    if getattr(args, "output", None):
        write_atomic(args.output, text)
    else:
        sys.stdout.write(text)


def _finish(payload: dict, failed: list[str]) -> dict:
    payload["ok"] = not failed
    payload["failed"] = failed
    if failed:
        raise CheckFailed(payload)
    return payload


# -- subcommands ---------------------------------------------------------------

def cmd_verify_algebra(args) -> dict:
    cert = ghz_certificate()
    anti = checks.anticommutation_certificate()
    failed = []
    if not cert["pairwise_commute"]:
        failed.append("pairwise_commute")
    if not cert["product_is_minus_identity"]:
        failed.append("product_is_minus_identity")
    if not all(anti.values()):
        failed.append("anticommutation")
    return _finish({**cert, "anticommuting_parties": anti}, failed)


def cmd_lattice_checks(args) -> dict:
    params = make_lattice(args.s)
    F = dft(params).matrix
    unitarity = float(np.linalg.norm(F @ F.conj().T - np.eye(params.d), 2))
    anti = checks.anticommutator_norm(params)
    weyl = max(
        checks.weyl_relation_error(params, a, b)
        for a in (-1, 0, 1, 2)
        for b in (-1, 0, 1, 2)
    )
    hom = checks.homomorphism_error(params, seed=args.seed)
    rows = commutation_table(params)
    summary = summarize_table(rows)
    su2 = su2_ops(params, tol=np.inf).errors()
    tol = checks.TOL_OP
    failed = [
        name
        for name, ok in (
            ("dft_unitarity", unitarity <= tol),
            ("anticommutation", anti <= tol),
            ("weyl_relation", weyl <= tol),
            ("homomorphism", hom <= tol),
            ("su2_relations", max(su2.values()) <= tol),
            *((f"commutation_table:{k}", v["pass"]) for k, v in summary.items()),
        )
        if not ok
    ]
    return _finish(
        {
            "s": args.s,
            "d": params.d,
            "dft_unitarity_error": unitarity,
            "anticommutator_norm": anti,
            "weyl_relation_error": weyl,
            "homomorphism_error": hom,
            "su2_errors": su2,
            "commutation_summary": summary,
            "commutation_table": rows,
        },
        failed,
    )


def cmd_build_state(args) -> dict:
    params = make_lattice(args.s)
    z = args.labels or (Fraction(0),) * 6
    state = psi_bz(args.b, labels_from_z(z), params)
    sol = solution_for(args.b, z)
    reports = {name: verify_eigensystem(state, name) for name in SYSTEMS}
    failed = [name for name, r in reports.items() if not r["pass"]]
    predicted = [f"{e.numerator}/{e.denominator}" for e in sol.eta]
    if reports["GHZmodbin"]["eta"] != predicted:
        failed.append("eta_prediction")
    payload = {"solution": sol.to_dict(), "reports": reports}
    if args.state_out:
        write_atomic(args.state_out, dump_state(state) + "\n")
        payload["state_file"] = str(args.state_out)
    else:
        payload["state"] = state_to_dict(state)
    return _finish(payload, failed)


def cmd_solve(args) -> dict:
    params = make_lattice(args.s)
    sols = solve_constraints(args.b, args.eta, params)
    return {
        "s": args.s,
        "b": list(args.b),
        "eta": [f"{e.numerator}/{e.denominator}" for e in args.eta],
        "count": len(sols),
        "solutions": [sol.to_dict() for sol in sols],
        "ok": True,
        "failed": [],
    }


def _load(path: str):
    return load_state(Path(path).read_text())


def cmd_measure(args):
    state = _load(args.state)
    names = SETTING_NAMES if args.settings == "all" else (args.settings,)
    records, stats = [], {}
    for name in names:
        recs = sample(
            state, RunConfig(shots=args.shots, seed=args.seed, policy="fixed", settings=(name,))
        )
        records.extend(recs)
        st = setting_statistics(recs, args.expect_b)
        if args.expect_deterministic and args.expect_b is None:
            top = max(st["parity"].values())
            st["mismatches"] = round((1 - top) * len(recs))
        stats[name] = st
    failed = []
    if args.expect_deterministic:
        failed = [f"deterministic_parity:{n}" for n, st in stats.items() if st.get("mismatches", 0)]
    payload = {
        "state": args.state,
        "shots": args.shots,
        "seed": args.seed,
        "prng": "numpy Philox (counter-based, 64-bit seed)",
        "statistics": stats,
    }
    if args.format != "csv":
        return _finish(payload, failed)
    # CSV goes to --output (summary JSON on stdout) or, without --output, to
    # stdout alone with any failure summary on stderr
    text = records_to_csv(records)
    payload.update(ok=not failed, failed=failed, csv=args.output)
    if args.output:
        write_atomic(args.output, text)
        sys.stdout.write(json.dumps(payload, indent=2) + "\n")
    else:
        sys.stdout.write(text)
        payload["_stream"] = "stderr"
    if failed:
        raise CheckFailed(payload)
    return None


def cmd_mermin(args) -> dict:
    state = _load(args.state)
    m = mermin_statistic(state, args.b)
    return {
        "state": args.state,
        "b": list(args.b),
        "correlators": dict(zip(SETTING_NAMES, correlators(state))),
        "mermin": m,
        "lhv_bound": 2,
        "exceeds_lhv_bound": abs(m) > 2 + 1e-10,
        "ok": True,
        "failed": [],
    }


def cmd_lhv(args) -> dict:
    if args.mode == "digits":
        rep = enumerate_digit_lhv(args.b)
        failed = []
        if args.b.parity == 1 and rep["full_solutions"]:
            failed.append("full_solutions")
        if rep["parity_identity_violations"]:
            failed.append("parity_identity")
    elif args.mode == "real":
        eta = args.eta or (Fraction(1), Fraction(0), Fraction(0), Fraction(0))
        rep = random_real_lhv(eta, args.samples, args.seed)
        failed = [k for k in ("parity_identity_violations", "quantum_compatible") if rep[k]]
        if sum(eta) % 2 == 1 and rep["full_solutions"]:
            failed.append("full_solutions")
    else:
        rep = check_associativity_gap(make_lattice(args.s))
        failed = []
        if rep["spectrum_XY_vs_minus_YX"] > checks.TOL_OP:
            failed.append("spectrum_XY_vs_minus_YX")
        if rep["anticommutator_norm"] > checks.TOL_OP:
            failed.append("anticommutator_norm")
    return _finish(rep, failed)


def cmd_report(args) -> dict:
    result = checks.run_all()
    if not result["ok"]:
        raise CheckFailed(result)
    return result


# -- parser ---------------------------------------------------------------------

def build_parser(config: dict | None = None) -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="cvghz", description=__doc__.splitlines()[0])
    parser.add_argument("--config", help="JSON file of flag defaults; explicit flags win")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, *, s=False, b=False, seed=False, output=True):
        if s:
            p.add_argument("--s", type=int, help="lattice scale (power of two)")
        if b:
            p.add_argument("--b", type=bvector, help="four bits, e.g. 1,0,0,0")
        if seed:
            p.add_argument("--seed", type=int)
        if output:
            p.add_argument("--output", help="write the JSON result here (atomically)")
        p.add_argument("--format", choices=("json", "csv"))

    p = sub.add_parser("verify-algebra", help="exact GHZ word certificates")
    common(p)
    p.set_defaults(func=cmd_verify_algebra)

    p = sub.add_parser("lattice-checks", help="lattice identities and commutation table")
    common(p, s=True, seed=True)
    p.set_defaults(func=cmd_lattice_checks)

    p = sub.add_parser("build-state", help="construct psi(b, z) and verify its eigensystems")
    common(p, s=True, b=True)
    p.add_argument("--labels", type=rationals(6), help="x0A,x0B,x0C,p0A,p0B,p0C as num/den")
    p.add_argument("--state-out", help="write the state JSON to this file")
    p.set_defaults(func=cmd_build_state)

    p = sub.add_parser("solve", help="enumerate label tuples with the given eigenvalues")
    common(p, s=True, b=True)
    p.add_argument("--eta", type=rationals(4), required=True)
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("measure", help="Born-rule sampling of local x/p measurements")
    common(p, seed=True)
    p.add_argument("--state", required=True)
    p.add_argument("--settings", choices=(*SETTING_NAMES, "all"), default="all")
    p.add_argument("--shots", type=int)
    p.add_argument("--expect-deterministic", action="store_true")
    p.add_argument("--b", dest="expect_b", type=bvector, help="expected parities per setting")
    p.set_defaults(func=cmd_measure)

    p = sub.add_parser("mermin", help="exact Mermin statistic of a state")
    common(p, b=True)
    p.add_argument("--state", required=True)
    p.set_defaults(func=cmd_mermin)

    p = sub.add_parser("lhv", help="local-hidden-variable searches")
    common(p, s=True, b=True, seed=True)
    p.add_argument("--mode", choices=("digits", "real", "assoc"), required=True)
    p.add_argument("--samples", type=int, default=100_000)
    p.add_argument("--eta", type=rationals(4))
    p.set_defaults(func=cmd_lhv)

    p = sub.add_parser("report", help="run the full verification suite")
    common(p)
    p.add_argument("--all", action="store_true", required=True)
    p.set_defaults(func=cmd_report)

    defaults = dict(DEFAULTS)
    defaults.update({k.replace("-", "_"): v for k, v in (config or {}).items()})
    for name, sp in sub.choices.items():
        known = {a.dest for a in sp._actions}
        conv = {}
        for k, v in defaults.items():
            if k not in known:
                continue
            if k in ("b", "expect_b") and v is not None and not isinstance(v, BVector):
                v = bvector(v)
            elif k in ("eta", "labels") and isinstance(v, (str, list)):
                v = rationals(4 if k == "eta" else 6)(v if isinstance(v, str) else ",".join(map(str, v)))
            conv[k] = v
        sp.set_defaults(**conv)
    return parser


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--config")
    known, _ = pre.parse_known_args(argv)
    config = json.loads(Path(known.config).read_text()) if known.config else None
    try:
        args = build_parser(config).parse_args(argv)
    except argparse.ArgumentTypeError as exc:
        sys.stderr.write(f"cvghz: error: {exc}\n")
        return 2
    try:
        payload = args.func(args)
    except CheckFailed as exc:
        data = exc.payload
        stream = data.pop("_stream", None)
        if stream == "stderr":
            sys.stderr.write(json.dumps(data, indent=2) + "\n")
        elif not (args.func is cmd_measure and args.format == "csv"):
            _emit(data, args)
        return 1
    except (ValueError, OSError) as exc:
        sys.stdout.write(json.dumps({"ok": False, "failed": ["input"], "error": str(exc)}) + "\n")
        return 2
    if payload is not None:
        _emit(payload, args)
    return 0


if __name__ == "__main__":
    sys.exit(main())
