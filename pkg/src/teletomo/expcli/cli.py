"""``teletomo`` command-line interface.

Exit codes: 0 success, 2 usage or configuration error, 3 insufficient data,
4 numerical failure.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import sys
from pathlib import Path

import numpy as np

from .. import random_density
from ..errors import InvalidInputError, TeletomoError
from ..qstate import BellOutcome, minus_inputs, standard_inputs
from . import formats, runner

log = logging.getLogger("teletomo")

INPUT_SETS = {"standard": standard_inputs, "minus": minus_inputs}


def _outcomes(text: str | None, n: int):
    if text is None:
        return None
    labels = [x.strip() for x in text.split(",") if x.strip()]
    if len(labels) == 1 and n > 2:
        labels *= n - 1
    return tuple(BellOutcome.from_label(x) for x in labels)


def _int_list(text: str) -> list[int]:
    out: list[int] = []
    for part in text.split(","):
        part = part.strip()
        if ":" in part:
            lo, hi = part.split(":")
            out.extend(range(int(lo), int(hi)))
        elif part:
            out.append(int(float(part)))
    if not out:
        raise InvalidInputError(f"empty integer list {text!r}")
    return out


def cmd_gen(args) -> int:
    rho = random_density(args.qubits, args.rank, args.seed)
    formats.write_state(args.out, rho)
    lam = rho.eigenvalues()
    print(json.dumps({"qubits": rho.qubits, "rank": args.rank, "seed": args.seed,
                      "min_eigenvalue": float(lam[0]), "max_eigenvalue": float(lam[-1]),
                      "eigenvalues": [float(x) for x in lam]}))
    return 0


def cmd_simulate(args) -> int:
    shared = formats.read_state(args.state)
    config = formats.ExperimentConfig(
        qubits=shared.qubits,
        mode=args.mode,
        shots_per_probe=args.shots if args.mode == "sampled" else None,
        seed=args.seed,
        designated_outcomes=_outcomes(args.outcome, shared.qubits),
        input_set=tuple(INPUT_SETS[args.input_set]()),
        all_outcomes=args.all_outcomes,
        source={"state_path": str(args.state)},
    )
    rf = runner.simulate(shared, config, workers=args.workers)
    formats.write_records(args.out, rf)
    log.info("wrote %d records to %s", len(rf.records), args.out)
    return 0


def cmd_reconstruct(args) -> int:
    files = [formats.read_records(p) for p in args.records]
    rf = formats.merge_records(files) if len(files) > 1 else files[0]
    report = runner.reconstruct(rf, args.method, _outcomes(args.outcome, rf.config.qubits))
    formats.write_state(args.out, report.rho_hat, {"report": runner.report_json(report)})
    print(json.dumps({k: v for k, v in runner.report_json(report).items() if k != "raw"}))
    return 0


def cmd_verify(args) -> int:
    truth = formats.read_state(args.truth)
    estimate = formats.read_state(args.estimate)
    print(json.dumps(runner.compare(truth, estimate)))
    return 0


def cmd_convergence(args) -> int:
    shared = formats.read_state(args.state)
    grid = _int_list(args.shots)
    seeds = _int_list(args.seeds)
    rows = runner.convergence(shared, grid, seeds, args.method, _outcomes(args.outcome, shared.qubits), args.workers)
    with open(args.out, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["n_shots", "seed", "trace_distance"])
        for n_shots, seed, td in rows:
            w.writerow([n_shots, seed, repr(td)])
    for n_shots in grid:
        med = float(np.median([td for n, _, td in rows if n == n_shots]))
        log.info("n_shots=%d median trace distance %.3e", n_shots, med)
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="teletomo", description="Teleportation-based quantum state tomography")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", help="write a random density matrix")
    g.add_argument("--qubits", type=int, required=True)
    g.add_argument("--rank", type=int, required=True)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--out", type=Path, required=True)
    g.set_defaults(func=cmd_gen)

    s = sub.add_parser("simulate", help="run the protocol on a state file and write records")
    s.add_argument("state", type=Path)
    s.add_argument("--mode", choices=["exact", "sampled"], default="exact")
    s.add_argument("--shots", type=int, default=None, help="shots per Bob probe (sampled mode)")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--outcome", default=None, help="designated outcome tuple, e.g. PsiMinus,PsiMinus")
    s.add_argument("--all-outcomes", action="store_true", help="emit every outcome tuple (exact mode)")
    s.add_argument("--input-set", choices=sorted(INPUT_SETS), default="standard")
    s.add_argument("--workers", type=int, default=1)
    s.add_argument("--out", type=Path, required=True)
    s.set_defaults(func=cmd_simulate)

    r = sub.add_parser("reconstruct", help="reconstruct the shared state from record files")
    r.add_argument("records", type=Path, nargs="+")
    r.add_argument("--method", choices=["auto", "closed", "linear"], default="auto")
    r.add_argument("--outcome", default=None)
    r.add_argument("--out", type=Path, required=True)
    r.set_defaults(func=cmd_reconstruct)

    v = sub.add_parser("verify", help="compare an estimate against the true state")
    v.add_argument("truth", type=Path)
    v.add_argument("estimate", type=Path)
    v.set_defaults(func=cmd_verify)

    c = sub.add_parser("convergence", help="trace-distance error versus shot count")
    c.add_argument("state", type=Path)
    c.add_argument("--shots", required=True, help="comma list of shots per probe, e.g. 1000,10000")
    c.add_argument("--seeds", default="0:10", help="comma list or lo:hi range of seeds")
    c.add_argument("--method", choices=["auto", "closed", "linear"], default="auto")
    c.add_argument("--outcome", default=None)
    c.add_argument("--workers", type=int, default=1)
    c.add_argument("--out", type=Path, required=True)
    c.set_defaults(func=cmd_convergence)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except TeletomoError as exc:
        print(f"teletomo: error: {exc}", file=sys.stderr)
        return exc.exit_code
    except (OSError, ValueError) as exc:
        print(f"teletomo: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
