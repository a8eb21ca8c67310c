"""Command-line entry point.

Subcommands:
  run                  detect communities and write assignments + reports
  sweep-seed-fraction  rerun dgtg across seed fractions, report mean NMI
  churn-report         edge churn statistics between consecutive snapshots

All randomness derives from --seed through a documented per-(repetition,
snapshot) derivation, so identical invocations write byte-identical files.
Exit codes: 0 success, 1 input/config error, 2 internal invariant failure.
"""

from __future__ import annotations

import argparse
import csv
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from .errors import AuditError, DgtError
from .gain_functions import GainContext
from .game_engine import GameConfig
from .initialization import GroundTruth, VariantKind, load_ground_truth
from .metrics import _mean_std, write_metrics_report
from .runner import evaluate_outcome, run_repetition
from .snapshot_graph import (
    SnapshotSequence,
    parse_node_file,
    read_edge_list,
    write_churn_report,
)


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on bad arguments; this tool reserves 2 for
    # internal invariant failures, so remap usage errors to 1.
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(1)


def _add_input_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--input", required=True, help="edge-list file: source target snapshot")
    p.add_argument("--undirected", action="store_true",
                   help="treat records as undirected (materialize both directions)")
    p.add_argument("--snapshot-by", default="column", metavar="MODE",
                   help="'column' (default) or 'window:<W>' to bucket a trailing "
                        "timestamp column into W-second snapshots")
    p.add_argument("--nodes", default=None,
                   help="optional node-list file declaring isolated nodes: label snapshot")
    p.add_argument("--out", required=True, help="output directory")


def _add_run_flags(p: argparse.ArgumentParser) -> None:
    _add_input_flags(p)
    p.add_argument("--variant", default="dgt", choices=["dgt", "dgts", "dgtp", "dgtg"])
    p.add_argument("--gain", default="similarity", choices=["similarity", "modularity"])
    p.add_argument("--seed-fraction", type=float, default=0.1,
                   help="fraction of nodes seeded from ground truth (dgtg only)")
    p.add_argument("--truth", default=None, help="ground-truth CSV: snapshot,node_label,community_label")
    p.add_argument("--repetitions", type=int, default=10)
    p.add_argument("--max-passes", type=int, default=8)
    p.add_argument("--threshold", type=float, default=0.05,
                   help="stop when the fraction of agents changing per pass drops below this")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--jobs", type=int, default=1, help="parallel repetitions")
    p.add_argument("--diagnostics", action="store_true",
                   help="write per-pass convergence telemetry CSVs")
    p.add_argument("--unlabeled-as-community", action="store_true",
                   help="score NMI with truth-unlabeled nodes pooled into one community "
                        "instead of excluding them")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="dgt", description=__doc__,
                     formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    run_p = sub.add_parser("run", help="run community detection")
    _add_run_flags(run_p)

    sweep_p = sub.add_parser("sweep-seed-fraction", help="NMI vs dgtg seed fraction")
    _add_run_flags(sweep_p)
    sweep_p.add_argument("--fractions", required=True,
                         help="comma-separated seed fractions, e.g. 0,0.1,0.2")

    churn_p = sub.add_parser("churn-report", help="edge churn between snapshots")
    _add_input_flags(churn_p)
    return parser


def _load_sequence(args) -> SnapshotSequence:
    extra = parse_node_file(args.nodes) if args.nodes else None
    return read_edge_list(args.input, snapshot_by=args.snapshot_by,
                          extra_nodes=extra, undirected=args.undirected)


def _load_truth(args, seq: SnapshotSequence) -> GroundTruth | None:
    if args.truth is None:
        return None
    return load_ground_truth(args.truth, seq)


def _make_variant(args, seed_fraction: float | None = None) -> VariantKind:
    fraction = args.seed_fraction if seed_fraction is None else seed_fraction
    if args.variant == "dgtg":
        if args.truth is None:
            raise DgtError("--variant dgtg requires --truth")
        return VariantKind("dgtg", seed_fraction=fraction)
    return VariantKind(args.variant)


def _make_config(args) -> GameConfig:
    return GameConfig(gain=args.gain, max_passes=args.max_passes,
                      change_fraction_threshold=args.threshold, rng_seed=args.seed)


def _rep_worker(payload):
    seq, variant, config, truth, rep, undirected, unlabeled = payload
    outcomes = run_repetition(seq, variant, config, truth=truth, repetition=rep)
    rows = []
    for outcome in outcomes:
        score, mod, n_true = evaluate_outcome(
            seq, outcome, truth=truth, undirected=undirected,
            unlabeled_as_community=unlabeled)
        rows.append((outcome, score, mod, n_true))
    return rep, rows


def _run_all_reps(seq, variant, config, truth, args):
    payloads = [
        (seq, variant, config, truth, rep, args.undirected, args.unlabeled_as_community)
        for rep in range(args.repetitions)
    ]
    if args.jobs > 1 and args.repetitions > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            results = list(pool.map(_rep_worker, payloads))
        results.sort(key=lambda item: item[0])
        return [rows for _, rows in results]
    contexts = [GainContext(g) for g in seq.snapshots]
    all_rows = []
    for rep in range(args.repetitions):
        outcomes = run_repetition(seq, variant, config, truth=truth,
                                  repetition=rep, contexts=contexts)
        rows = []
        for outcome in outcomes:
            score, mod, n_true = evaluate_outcome(
                seq, outcome, truth=truth, undirected=args.undirected,
                unlabeled_as_community=args.unlabeled_as_community)
            rows.append((outcome, score, mod, n_true))
        all_rows.append(rows)
    return all_rows


def _write_partition(path, seq: SnapshotSequence, partition: dict) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["node_label", "community_id"])
        for node in sorted(partition):
            writer.writerow([seq.label_of(node), partition[node]])


def _write_diagnostics(path, result) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["pass", "changed_agents", "total_utility", "potential"])
        for i, (changed, util, pot) in enumerate(
                zip(result.changed_trace, result.utility_trace, result.potential_trace)):
            writer.writerow([i, changed, repr(util), repr(pot)])


def _mean(values):
    values = [v for v in values if v is not None]
    if not values:
        return None
    return float(sum(values) / len(values))


def cmd_run(args) -> int:
    seq = _load_sequence(args)
    truth = _load_truth(args, seq)
    variant = _make_variant(args)
    config = _make_config(args)
    if args.repetitions < 1:
        raise DgtError("--repetitions must be >= 1")
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)

    per_rep = _run_all_reps(seq, variant, config, truth, args)

    for rep, rows in enumerate(per_rep):
        for outcome, _, _, _ in rows:
            _write_partition(out_dir / f"communities_t{outcome.t}_rep{rep}.csv",
                             seq, outcome.result.partition)
            if args.diagnostics:
                _write_diagnostics(out_dir / f"diagnostics_t{outcome.t}_rep{rep}.csv",
                                   outcome.result)

    metric_rows = []
    for t in range(seq.num_snapshots):
        preds = [rows[t][0].n_communities for rows in per_rep]
        nmis = [rows[t][1] for rows in per_rep]
        mods = [rows[t][2] for rows in per_rep]
        n_true = per_rep[0][t][3]
        metric_rows.append((t, _mean(preds), n_true, _mean(nmis), _mean(mods)))
    write_metrics_report(out_dir / "metrics.csv", metric_rows)
    write_churn_report(seq, out_dir / "churn.csv")
    return 0


def cmd_sweep(args) -> int:
    try:
        fractions = [float(s) for s in args.fractions.split(",") if s.strip() != ""]
    except ValueError as exc:
        raise DgtError(f"bad --fractions value: {exc}") from exc
    if not fractions:
        raise DgtError("--fractions must list at least one value")
    if any(not 0.0 <= f <= 1.0 for f in fractions):
        raise DgtError("--fractions values must lie in [0, 1]")
    if args.variant != "dgtg":
        raise DgtError("sweep-seed-fraction requires --variant dgtg")
    seq = _load_sequence(args)
    truth = _load_truth(args, seq)
    if truth is None:
        raise DgtError("--variant dgtg requires --truth")
    config = _make_config(args)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)

    rows = []
    for fraction in fractions:
        variant = VariantKind("dgtg", seed_fraction=fraction)
        per_rep = _run_all_reps(seq, variant, config, truth, args)
        rep_means = []
        for rep_rows in per_rep:
            scores = [score for _, score, _, _ in rep_rows if score is not None]
            if scores:
                rep_means.append(sum(scores) / len(scores))
        mean, std = _mean_std(rep_means) if rep_means else (float("nan"), 0.0)
        rows.append((fraction, mean, std))

    with open(out_dir / "sweep.csv", "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["fraction", "nmi_mean", "nmi_std"])
        for fraction, mean, std in rows:
            writer.writerow([repr(float(fraction)), repr(mean), repr(std)])
    return 0


def cmd_churn(args) -> int:
    seq = _load_sequence(args)
    if seq.num_snapshots < 2:
        raise DgtError("churn-report needs at least 2 snapshots")
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    write_churn_report(seq, out_dir / "churn.csv")
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    handlers = {
        "run": cmd_run,
        "sweep-seed-fraction": cmd_sweep,
        "churn-report": cmd_churn,
    }
    try:
        return handlers[args.command](args)
    except AuditError as exc:
        print(f"dgt: internal invariant failure: {exc}", file=sys.stderr)
        return 2
    except (DgtError, OSError) as exc:
        print(f"dgt: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
