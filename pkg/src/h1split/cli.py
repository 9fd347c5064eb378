"""Command-line front door.

Subcommands:
  run         full pipeline on a scenario file, writes the JSON report
  verify      property suite on a scenario, writes per-check pass/fail
  norm        just the Markov operator norm bracket
  admissible  just the admissibility check of the scenario's measure pair

Exit codes: 0 success, 1 validation error, 2 spectral-gap hypothesis not
certified (bracket straddling or above 1), 3 property-suite failure.
Reports are byte-identical across reruns of the same scenario + seed.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .decomp import ContractionError, HypothesisViolatedError, decompose
from .measures import check_admissible
from .report import (
    build_report,
    dumps_report,
    hypothesis_status,
    jsonable,
    ratios_csv,
)
from .repspace import kappa_estimate, markov
from .scenario import Scenario, ScenarioError, load_scenario
from .verify import verify_scenario

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_HYPOTHESIS = 2
EXIT_PROPERTY = 3


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("scenario", type=Path, help="scenario JSON file")
    parser.add_argument("--seed", type=int, default=None, help="override the scenario seed")
    parser.add_argument("--tol", type=float, default=None, help="fixed-point tolerance")
    parser.add_argument("--max-iter", type=int, default=100_000)
    parser.add_argument("--restarts", type=int, default=16, help="norm-estimation restarts")
    parser.add_argument("--out", type=Path, default=Path("."), help="output directory")
    parser.add_argument(
        "--format",
        choices=("json", "csv"),
        default="json",
        help="csv additionally writes the per-sample projection-ratio table",
    )


def _load(args) -> tuple[Scenario, bytes]:
    sc, blob = load_scenario(args.scenario)
    if args.seed is not None:
        sc.seed = int(args.seed)
    if getattr(args, "tol", None) is not None:
        sc.tolerances["fixed_point"] = float(args.tol)
    return sc, blob


def _write(path: Path, blob: bytes) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_bytes(blob)


def cmd_run(args) -> int:
    sc, blob = _load(args)
    op = markov(sc.rep, sc.measure, seed=sc.seed, restarts=args.restarts)
    kappa = kappa_estimate(sc.rep, seed=sc.seed)
    adm = check_admissible(sc.admissible_pair) if sc.admissible_pair else None

    decomposition = None
    error = None
    try:
        decomposition = decompose(
            sc.rep,
            sc.measure,
            seed=sc.seed,
            tol=float(sc.tolerances["fixed_point"]),
            max_iter=args.max_iter,
            idempotence_tol=float(sc.tolerances["idempotence"]),
            rank_tol=float(sc.tolerances["rank"]),
            pnorm_samples=int(sc.samples.get("p_norm", 200)),
            lemma_trials=int(sc.samples.get("lemma", 20)),
            run_exact_oracle=sc.exact_oracle,
            op=op,
        )
    except HypothesisViolatedError as exc:
        error = str(exc)
    except ContractionError as exc:
        error = str(exc)

    report = build_report(
        scenario_name=args.scenario.name,
        scenario_bytes=blob,
        seed=sc.seed,
        rep=sc.rep,
        mu=sc.measure,
        op=op,
        kappa=kappa,
        admissibility=adm,
        decomposition=decomposition,
        error=error,
    )
    stem = args.scenario.stem
    report_path = args.out / f"{stem}.report.json"
    _write(report_path, dumps_report(report))
    print(f"report written to {report_path}")
    if args.format == "csv" and decomposition is not None:
        csv_path = args.out / f"{stem}.ratios.csv"
        _write(csv_path, ratios_csv(decomposition))
        print(f"ratios written to {csv_path}")

    status = report["hypothesis"]["status"]
    print(
        f"hypothesis: {status} "
        f"(lambda in [{op.bracket.lo:.6g}, {op.bracket.hi:.6g}])"
    )
    if decomposition is not None:
        dims = decomposition.dims
        print(f"dims: Z1={dims['z1']} B1={dims['b1']} H1={dims['h1']}")
    if status != "holds":
        return EXIT_HYPOTHESIS
    if error is not None:
        return EXIT_PROPERTY
    return EXIT_OK


def cmd_verify(args) -> int:
    sc, blob = _load(args)
    outcome = verify_scenario(sc)
    payload = {
        "scenario": {"name": args.scenario.name, "seed": sc.seed},
        "all_passed": outcome.all_passed,
        "checks": [
            {
                "name": r.name,
                "passed": r.passed,
                "residual": r.residual,
                "tolerance": r.tolerance,
                "note": r.note,
            }
            for r in outcome.results
        ],
        "observations": jsonable(outcome.observations),
    }
    path = args.out / f"{args.scenario.stem}.verify.json"
    _write(path, (json.dumps(jsonable(payload), sort_keys=True, indent=2) + "\n").encode())
    for r in outcome.results:
        mark = "PASS" if r.passed else "FAIL"
        print(f"{mark} {r.name} (residual {r.residual:.3e} <= {r.tolerance:.1e}) {r.note}")
    print(f"verify report written to {path}")
    return EXIT_OK if outcome.all_passed else EXIT_PROPERTY


def cmd_norm(args) -> int:
    sc, _ = _load(args)
    op = markov(sc.rep, sc.measure, seed=sc.seed, restarts=args.restarts)
    payload = {
        "lambda_lo": op.bracket.lo,
        "lambda_hi": op.bracket.hi,
        "method": op.bracket.method,
        "status": hypothesis_status(op.bracket.lo, op.bracket.hi),
        "witness": jsonable(op.bracket.witness),
        "p": jsonable(sc.rep.space.p),
    }
    print(json.dumps(jsonable(payload), sort_keys=True, indent=2))
    return EXIT_OK


def cmd_admissible(args) -> int:
    sc, _ = _load(args)
    if sc.admissible_pair is None:
        print("scenario specifies no admissibility pair", file=sys.stderr)
        return EXIT_VALIDATION
    res = check_admissible(sc.admissible_pair)
    payload = {"admissible": res.admissible, "violations": jsonable(res.violations)}
    print(json.dumps(jsonable(payload), sort_keys=True, indent=2))
    return EXIT_OK


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="h1split",
        description="Split the cocycle space into coboundaries and a harmonic complement",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, fn, doc in (
        ("run", cmd_run, "full decomposition pipeline"),
        ("verify", cmd_verify, "property suite"),
        ("norm", cmd_norm, "Markov operator norm bracket only"),
        ("admissible", cmd_admissible, "measure admissibility check only"),
    ):
        p = sub.add_parser(name, help=doc)
        _add_common(p)
        p.set_defaults(func=fn)
    return parser


def main(argv=None) -> int:
    args = make_parser().parse_args(argv)
    try:
        return args.func(args)
    except ScenarioError as exc:
        print(f"scenario error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())
