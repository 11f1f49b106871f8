"""Command-line front end: simulate, persistence, moments, sweep.

Every run that writes files first writes a manifest recording the resolved
parameters, the master seed, and the planned output paths; given the same
tool version, the parameters in a manifest fully determine the result files
byte for byte.  Exit codes: 0 success, 2 usage error, 3 a hard cap fired
(partial outputs are still written where possible), 4 internal invariant
violation.
"""

from __future__ import annotations

import argparse
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from datetime import datetime, timezone
from pathlib import Path

from . import __version__
from .errors import ExplosionError, InvariantViolationError
from .experiments import (
    PersistenceEstimate,
    estimates_to_csv,
    estimates_to_json,
    persistence_grid,
)
from .population import (
    DEFAULT_MAX_EVENTS,
    DEFAULT_MAX_POPULATION,
    SimConfig,
    simulate,
)
from .renewal import MomentTable
from .seeding import resolve_master_seed
from .tree import AttachmentRule, attachment_generator, build_tree, write_newick


@dataclass
class RunManifest:
    """Record of one CLI run, written before any result file."""

    command: str
    parameters: dict
    master_seed: int
    outputs: list[str]
    version: str = __version__
    created_utc: str = field(
        default_factory=lambda: datetime.now(timezone.utc).isoformat()
    )

    def write(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(asdict(self), fh, indent=2, sort_keys=True)
            fh.write("\n")

    @classmethod
    def read(cls, path) -> "RunManifest":
        with open(path, "r", encoding="utf-8") as fh:
            return cls(**json.load(fh))


def _positive_int(text: str) -> int:
    value = int(text)
    if value <= 0:
        raise argparse.ArgumentTypeError(f"must be a positive integer, got {text}")
    return value


def _positive_float(text: str) -> float:
    value = float(text)
    if value <= 0:
        raise argparse.ArgumentTypeError(f"must be positive, got {text}")
    return value


def _nonneg_float(text: str) -> float:
    value = float(text)
    if value < 0:
        raise argparse.ArgumentTypeError(f"must be non-negative, got {text}")
    return value


def _alpha_float(text: str) -> float:
    value = float(text)
    if not 0.0 < value < 1.0:
        raise argparse.ArgumentTypeError(
            f"alpha must lie strictly between 0 and 1, got {text}"
        )
    return value


def _add_cap_flags(sub: argparse.ArgumentParser) -> None:
    sub.add_argument(
        "--max-events", type=_positive_int, default=DEFAULT_MAX_EVENTS,
        help="hard cap on committed events (explosion guard)",
    )
    sub.add_argument(
        "--max-population", type=_positive_int, default=DEFAULT_MAX_POPULATION,
        help="hard cap on alive types (explosion guard)",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="phylodrift",
        description="Ranked-fitness birth-death phylogeny simulator and analytics",
    )
    parser.add_argument("--version", action="version", version=f"phylodrift {__version__}")
    subs = parser.add_subparsers(dest="command", required=True)

    sim = subs.add_parser("simulate", help="run one trajectory, optionally export its tree")
    sim.add_argument("--lambda", dest="lam", type=_positive_float, required=True)
    sim.add_argument("--t", dest="horizon", type=_nonneg_float, required=True)
    sim.add_argument("--seed", type=int, default=None)
    sim.add_argument("--tree", choices=["max", "random"], default=None,
                     help="attachment rule for tree construction")
    sim.add_argument("--newick", type=Path, default=None, help="write the tree here")
    sim.add_argument("--events", type=Path, default=None, help="write the event CSV here")
    sim.add_argument("--manifest", type=Path, default=None,
                     help="manifest path (default: first output + .manifest.json)")
    _add_cap_flags(sim)
    sim.set_defaults(func=cmd_simulate)

    per = subs.add_parser("persistence", help="estimate the dominance persistence probability")
    per.add_argument("--lambda", dest="lam", type=_positive_float, required=True)
    per.add_argument("--alpha", type=_alpha_float, required=True)
    per.add_argument("--t", dest="horizon", type=_positive_float, required=True)
    per.add_argument("--reps", type=_positive_int, required=True)
    per.add_argument("--estimator", choices=["direct", "conditional", "both"],
                     default="conditional")
    per.add_argument("--seed", type=int, default=None)
    per.add_argument("--out", type=Path, required=True, help="results CSV path")
    _add_cap_flags(per)
    per.set_defaults(func=cmd_persistence)

    mom = subs.add_parser("moments", help="first-passage moment tables (lambda > 1)")
    mom.add_argument("--lambda", dest="lam", type=_positive_float, required=True)
    mom.add_argument("--n-max", dest="n_max", type=_positive_int, required=True)
    mom.add_argument("--out", type=Path, required=True, help="table CSV path")
    mom.set_defaults(func=cmd_moments)

    swp = subs.add_parser("sweep", help="persistence estimates over a (lambda, alpha, t) grid")
    swp.add_argument("--lambda-list", dest="lams", type=_positive_float,
                     nargs="+", required=True)
    swp.add_argument("--alpha-list", dest="alphas", type=_alpha_float,
                     nargs="+", required=True)
    swp.add_argument("--t-list", dest="ts", type=_positive_float, nargs="+", required=True)
    swp.add_argument("--reps", type=_positive_int, required=True)
    swp.add_argument("--estimator", choices=["direct", "conditional", "both"],
                     default="conditional")
    swp.add_argument("--seed", type=int, default=None)
    swp.add_argument("--jobs", type=_positive_int, default=1,
                     help="parallel workers over grid cells (results never depend on it)")
    swp.add_argument("--out-dir", type=Path, required=True)
    _add_cap_flags(swp)
    swp.set_defaults(func=cmd_sweep)
    return parser


def cmd_simulate(args) -> int:
    if (args.tree is None) != (args.newick is None):
        print("error: --tree and --newick must be given together", file=sys.stderr)
        return 2
    seed = resolve_master_seed(args.seed)
    config = SimConfig(
        lam=args.lam,
        horizon=args.horizon,
        seed=seed,
        max_events=args.max_events,
        max_population=args.max_population,
    )
    outputs = [p for p in (args.events, args.newick) if p is not None]
    manifest_path = args.manifest
    if manifest_path is None and outputs:
        manifest_path = Path(str(outputs[0]) + ".manifest.json")
    if manifest_path is not None:
        RunManifest(
            command="simulate",
            parameters={
                "lambda": args.lam,
                "t": args.horizon,
                "seed": seed,
                "tree": args.tree,
                "max_events": args.max_events,
                "max_population": args.max_population,
            },
            master_seed=seed,
            outputs=[str(p) for p in outputs],
        ).write(manifest_path)

    def write_outputs(result) -> None:
        if args.events is not None and result.log is not None:
            result.log.to_csv(args.events)
        if args.newick is not None and result.log is not None and result.ledger is not None:
            rule = AttachmentRule.MAX_FITNESS if args.tree == "max" else AttachmentRule.RANDOM_ALIVE
            tree = build_tree(result, rule, attachment_generator(seed))
            write_newick(tree, args.newick)

    try:
        result = simulate(config)
    except ExplosionError as err:
        if err.partial is not None:
            write_outputs(err.partial)
        print(f"error: {err}", file=sys.stderr)
        return 3
    write_outputs(result)
    state = result.state
    rec = state.max_record()
    print(
        f"final population n={state.size} types_ever S={state.births_total} "
        f"record_holder id={rec.id} fitness={rec.fitness:.6f}"
    )
    return 0


def cmd_persistence(args) -> int:
    seed = resolve_master_seed(args.seed)
    out_csv = args.out
    out_json = out_csv.with_suffix(".json")
    manifest_path = Path(str(out_csv) + ".manifest.json")
    RunManifest(
        command="persistence",
        parameters={
            "lambda": args.lam,
            "alpha": args.alpha,
            "t": args.horizon,
            "reps": args.reps,
            "estimator": args.estimator,
            "seed": seed,
            "max_events": args.max_events,
            "max_population": args.max_population,
        },
        master_seed=seed,
        outputs=[str(out_csv), str(out_json)],
    ).write(manifest_path)
    estimates = persistence_grid(
        args.lam,
        [args.alpha],
        args.horizon,
        args.reps,
        seed,
        estimator=args.estimator,
        max_events=args.max_events,
        max_population=args.max_population,
    )
    estimates_to_csv(estimates, out_csv)
    estimates_to_json(estimates, out_json)
    for est in estimates:
        print(
            f"lambda={est.lam} alpha={est.alpha} t={est.t} {est.estimator}: "
            f"{est.point:.6f} (se {est.std_err:.6f})"
        )
    return 0


def cmd_moments(args) -> int:
    if args.lam <= 1.0:
        print(
            f"error: moment tables need lambda > 1 (upward-transient size chain); "
            f"got lambda={args.lam}",
            file=sys.stderr,
        )
        return 2
    out_csv = args.out
    manifest_path = Path(str(out_csv) + ".manifest.json")
    RunManifest(
        command="moments",
        parameters={"lambda": args.lam, "n_max": args.n_max},
        master_seed=0,
        outputs=[str(out_csv)],
    ).write(manifest_path)
    table = MomentTable.compute(args.lam, args.n_max)
    table.to_csv(out_csv)
    print(f"wrote {args.n_max} levels to {out_csv}")
    return 0


def _sweep_cell(cell) -> list[PersistenceEstimate]:
    lam, alphas, t, reps, seed, estimator, max_events, max_population = cell
    return persistence_grid(
        lam, alphas, t, reps, seed,
        estimator=estimator, max_events=max_events, max_population=max_population,
    )


def cmd_sweep(args) -> int:
    seed = resolve_master_seed(args.seed)
    out_dir = args.out_dir
    out_dir.mkdir(parents=True, exist_ok=True)
    out_csv = out_dir / "results.csv"
    out_json = out_dir / "results.json"
    RunManifest(
        command="sweep",
        parameters={
            "lambda_list": args.lams,
            "alpha_list": args.alphas,
            "t_list": args.ts,
            "reps": args.reps,
            "estimator": args.estimator,
            "seed": seed,
            "jobs": args.jobs,
            "max_events": args.max_events,
            "max_population": args.max_population,
        },
        master_seed=seed,
        outputs=[str(out_csv), str(out_json)],
    ).write(out_dir / "manifest.json")

    alphas = sorted(set(args.alphas))
    # one cell per (lambda, t); every cell shares the master seed, so alpha
    # comparisons ride on common trajectories and a 1x1x1 grid reproduces
    # `persistence` exactly
    cells = [
        (lam, alphas, t, args.reps, seed, args.estimator,
         args.max_events, args.max_population)
        for lam in args.lams
        for t in args.ts
    ]
    if args.jobs == 1:
        cell_rows = [_sweep_cell(c) for c in cells]
    else:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            cell_rows = list(pool.map(_sweep_cell, cells))

    # rows ordered by (lambda, alpha, t); "both" keeps direct before conditional
    per_alpha = 2 if args.estimator == "both" else 1
    rows: list[PersistenceEstimate] = []
    for i_lam in range(len(args.lams)):
        for i_alpha in range(len(alphas)):
            for i_t in range(len(args.ts)):
                cell = cell_rows[i_lam * len(args.ts) + i_t]
                rows.extend(
                    cell[i_alpha * per_alpha : (i_alpha + 1) * per_alpha]
                )
    estimates_to_csv(rows, out_csv)
    estimates_to_json(rows, out_json)
    print(f"wrote {len(rows)} rows to {out_csv}")
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ExplosionError as err:
        print(f"error: {err}", file=sys.stderr)
        return 3
    except InvariantViolationError as err:
        print(f"internal invariant violation: {err}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())
