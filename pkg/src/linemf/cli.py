"""Command-line entry point: ``linemf <command> ...``.

Exit codes: 0 success, 1 runtime/validation failure, 2 usage error,
3 verification threshold exceeded.

Every command writes ``<output>.manifest.json`` next to its main output.
``--config FILE`` reads flat ``key=value`` lines (keys are long option names,
dashes or underscores); explicit flags win over the file.  ``LINEMF_THREADS``
sets the default ``--threads``.
"""
from __future__ import annotations

import argparse
import csv
import json
import logging
import os
import sys
from datetime import datetime, timezone

import numpy as np

from linemf import __version__
from linemf.errors import LineMFError
from linemf.factorizer import svd_embed
from linemf.formats import load_embeddings, save_embeddings
from linemf.graph import Graph, load_edge_list
from linemf.linkpred import auc, sample_non_edges, split_edges
from linemf.matrices import (
    build_m1,
    build_m2,
    bidirect,
    export_triplets,
    import_triplets,
    truncate_nonnegative,
)
from linemf.trainer import TrainConfig, train
from linemf.verifier import compare, emit_report

log = logging.getLogger("linemf")

THREADS_ENV = "LINEMF_THREADS"
EXIT_OK, EXIT_RUNTIME, EXIT_USAGE, EXIT_THRESHOLD = 0, 1, 2, 3


class ThresholdExceeded(Exception):
    pass


def _now() -> str:
    return datetime.now(timezone.utc).isoformat()


def write_manifest(output: str, command: str, inputs: list, config: dict, seed, started: str) -> str:
    path = output + ".manifest.json"
    manifest = {
        "command": command,
        "inputs": [os.fspath(p) for p in inputs],
        "config": config,
        "seed": seed,
        "tool_version": __version__,
        "timestamps": {"start": started, "end": _now()},
    }
    with open(path, "w") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True, default=str)
        fh.write("\n")
    return path


def read_config_file(path: str) -> dict:
    """Flat ``key=value`` file; ``#`` comments and blank lines are ignored."""
    out = {}
    with open(path) as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            key, sep, value = line.partition("=")
            if not sep:
                raise LineMFError(f"{path}:{lineno}: expected key=value")
            out[key.strip().lstrip("-").replace("-", "_")] = value.strip()
    return out


def _read_graph(args) -> Graph:
    with open(args.input) as fh:
        return load_edge_list(fh, directed=args.directed, self_loop_policy=args.self_loops)


def _graph_args(p):
    p.add_argument("input", help="edge-list file")
    p.add_argument("--directed", action="store_true", help="treat edges as directed")
    p.add_argument("--self-loops", choices=("reject", "drop"), default="reject")


def _train_args(p):
    p.add_argument("--order", type=int, choices=(1, 2), default=2)
    p.add_argument("--dim", type=int, help="embedding dimension (required)")
    p.add_argument("--k", type=int, default=5, help="negatives per positive edge")
    p.add_argument("--samples", type=int, default=1_000_000, help="number of edge draws")
    p.add_argument("--lr", type=float, default=0.025, help="initial learning rate")
    p.add_argument("--final-lr", type=float, default=0.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--threads", type=int, default=int(os.environ.get(THREADS_ENV, "1")))
    p.add_argument("--exponent", type=float, default=1.0, help="noise distribution exponent in (0, 1]")
    p.add_argument("--sigmoid-table", action="store_true", help="use the lookup-table sigmoid")
    p.add_argument(
        "--self-negatives", choices=("auto", "skip", "keep"), default="auto",
        help="negatives equal to the source vertex (auto: skip for first order)",
    )


def _train_config(args) -> TrainConfig:
    skip = {"auto": None, "skip": True, "keep": False}[args.self_negatives]
    return TrainConfig(
        order="first" if args.order == 1 else "second",
        d=args.dim,
        k=args.k,
        total_samples=args.samples,
        initial_lr=args.lr,
        final_lr=args.final_lr,
        seed=args.seed,
        sampler_exponent=args.exponent,
        threads=args.threads,
        sigmoid_table=args.sigmoid_table,
        skip_self_negatives=skip,
    )


def _prepare_for_order(g: Graph, order: str) -> Graph:
    if order == "second" and not g.directed:
        log.warning("second order on undirected input: replacing each edge by two directed edges")
        return bidirect(g)
    return g


def cmd_train(args) -> int:
    started = _now()
    cfg = _train_config(args)
    g = _prepare_for_order(_read_graph(args), cfg.order)
    emb = train(g, cfg)
    written = save_embeddings(emb, args.out, binary=args.binary or None)
    write_manifest(args.out, "train", [args.input], {**vars_for_manifest(args), "train_config": cfg.to_dict()}, cfg.seed, started)
    log.info("wrote %s", ", ".join(written))
    return EXIT_OK


def cmd_build_matrix(args) -> int:
    started = _now()
    g = _read_graph(args)
    if args.kind == 1:
        m = build_m1(g, args.k)
    else:
        m = build_m2(_prepare_for_order(g, "second"), args.k)
    if args.truncate:
        m = truncate_nonnegative(m)
    with open(args.out, "w") as fh:
        export_triplets(m, fh)
    write_manifest(args.out, "build-matrix", [args.input], vars_for_manifest(args), None, started)
    log.info("wrote %s (%d entries)", args.out, m.nnz)
    return EXIT_OK


def cmd_factorize(args) -> int:
    started = _now()
    with open(args.matrix) as fh:
        m = import_triplets(fh)
    if not m.truncated and np.any(m.values < 0):
        log.warning("matrix is not truncated; negative entries are factorized as given")
    f = svd_embed(m, args.dim, symmetric=args.symmetric)
    save_embeddings(f.to_embeddings(), args.out, binary=args.binary or None)
    extra = {
        "reconstruction_error": f.reconstruction_error,
        "discarded_negative_mass": f.discarded_negative_mass,
    }
    write_manifest(args.out, "factorize", [args.matrix], {**vars_for_manifest(args), **extra}, None, started)
    log.info("reconstruction error %.6g", f.reconstruction_error)
    return EXIT_OK


def cmd_verify(args) -> int:
    started = _now()
    emb = load_embeddings(args.embeddings)
    with open(args.matrix) as fh:
        m = import_triplets(fh)
    report = compare(emb, m)
    with open(args.report, "w") as fh:
        emit_report(report, fh)
    if args.pairs_csv:
        predicted = emb.score(m.rows, m.cols)
        with open(args.pairs_csv, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["i", "j", "predicted", "target"])
            for i, j, p, t in zip(m.rows.tolist(), m.cols.tolist(), predicted.tolist(), m.values.tolist()):
                writer.writerow([i, j, repr(p), repr(t)])
    write_manifest(args.report, "verify", [args.embeddings, args.matrix], vars_for_manifest(args), None, started)
    print(f"n_pairs={report.n_pairs} rmse={report.rmse:.6g} pearson={report.pearson:.6g}")
    if args.fail_above is not None and not report.rmse <= args.fail_above:
        raise ThresholdExceeded(f"rmse {report.rmse:.6g} exceeds --fail-above {args.fail_above}")
    return EXIT_OK


def cmd_eval_linkpred(args) -> int:
    started = _now()
    g = _read_graph(args)
    train_graph, heldout = split_edges(g, args.holdout_frac, seed=args.seed)
    if args.embeddings:
        emb = load_embeddings(args.embeddings)
        if emb.n != g.n_vertices:
            raise LineMFError(f"embeddings cover {emb.n} vertices, graph has {g.n_vertices}")
        cfg_echo = None
    else:
        cfg = _train_config(args)
        emb = train(_prepare_for_order(train_graph, cfg.order), cfg)
        cfg_echo = cfg.to_dict()
    negatives = sample_non_edges(g, args.negatives_per_positive * len(heldout), seed=args.seed + 1)
    pos = emb.score(heldout[:, 0], heldout[:, 1])
    neg = emb.score(negatives[:, 0], negatives[:, 1])
    score = auc(pos, neg)
    with open(args.out, "w") as fh:
        fh.write(f"auc: {score!r}\n")
        fh.write(f"n_positive: {len(pos)}\n")
        fh.write(f"n_negative: {len(neg)}\n")
    write_manifest(
        args.out, "eval-linkpred", [args.input] + ([args.embeddings] if args.embeddings else []),
        {**vars_for_manifest(args), "train_config": cfg_echo}, args.seed, started,
    )
    print(f"auc={score:.6f}")
    return EXIT_OK


def vars_for_manifest(args) -> dict:
    return {k: v for k, v in vars(args).items() if k != "func"}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="linemf", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"linemf {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true")
    parser.add_argument("--config", help="flat key=value file with option defaults")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("train", help="train LINE embeddings")
    _graph_args(p)
    _train_args(p)
    p.add_argument("--out", required=True)
    p.add_argument("--binary", action="store_true", help="lossless binary output")
    p.set_defaults(func=cmd_train, needs_dim=True)

    p = sub.add_parser("build-matrix", help="write the shifted-PMI matrix as triplets")
    _graph_args(p)
    p.add_argument("--kind", type=int, choices=(1, 2), required=True)
    p.add_argument("--k", type=int, default=1)
    p.add_argument("--truncate", action="store_true", help="clip entries at zero")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_build_matrix)

    p = sub.add_parser("factorize", help="SVD embeddings of a triplet matrix")
    p.add_argument("--matrix", required=True)
    p.add_argument("--dim", type=int, help="rank (required)")
    p.add_argument("--symmetric", action="store_true", help="V V^T factorization (first order)")
    p.add_argument("--out", required=True)
    p.add_argument("--binary", action="store_true")
    p.set_defaults(func=cmd_factorize, needs_dim=True)

    p = sub.add_parser("verify", help="compare embeddings with a matrix")
    p.add_argument("--embeddings", required=True)
    p.add_argument("--matrix", required=True)
    p.add_argument("--report", required=True)
    p.add_argument("--pairs-csv", help="write predicted-vs-target pairs here")
    p.add_argument("--fail-above", type=float, help="exit 3 when rmse exceeds this")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("eval-linkpred", help="held-out edge AUC")
    _graph_args(p)
    _train_args(p)
    p.add_argument("--holdout-frac", type=float, default=0.1)
    p.add_argument("--negatives-per-positive", type=int, default=1)
    p.add_argument("--embeddings", help="score these instead of training")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_eval_linkpred)
    return parser


def parse_args(argv=None) -> argparse.Namespace:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.config:
        try:
            defaults = read_config_file(args.config)
        except (OSError, LineMFError) as exc:
            parser.error(f"--config: {exc}")
        subparser = parser._subparsers._group_actions[0].choices[args.command]
        known = {a.dest: a for a in subparser._actions}
        unknown = sorted(set(defaults) - set(known))
        if unknown:
            parser.error(f"--config: unknown option(s) {', '.join(unknown)}")
        converted = {}
        for key, raw in defaults.items():
            action = known[key]
            if action.const is True and action.nargs == 0:
                converted[key] = raw.lower() in ("1", "true", "yes", "on")
            else:
                converted[key] = action.type(raw) if action.type else raw
        subparser.set_defaults(**converted)
        for action in subparser._actions:
            if action.dest in converted:
                action.required = False
        args = parser.parse_args(argv)
    if getattr(args, "needs_dim", False) and args.dim is None:
        parser.error(f"{args.command}: --dim is required")
    if args.command == "eval-linkpred" and not args.embeddings and args.dim is None:
        parser.error("eval-linkpred: --dim is required unless --embeddings is given")
    return args


def main(argv=None) -> int:
    try:
        args = parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else EXIT_OK
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.INFO,
        format="linemf: %(message)s",
        stream=sys.stderr,
    )
    try:
        return args.func(args)
    except ThresholdExceeded as exc:
        print(f"linemf: {exc}", file=sys.stderr)
        return EXIT_THRESHOLD
    except (LineMFError, OSError) as exc:
        print(f"linemf: error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
