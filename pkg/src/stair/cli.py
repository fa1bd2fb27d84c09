"""Command-line front end: gen / fit / explain / predict / bench.

Exit codes: 0 success, 1 invalid input, 2 learner finished below its score
threshold (the flagged model is still written). All commands are
non-interactive and deterministic for fixed inputs and seeds.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import os
import sys

import numpy as np

from . import bench as bench_mod
from .baselines import cart_fit, id3_sweep
from .dataset import DatasetError, gen_band2d, load_csv, save_csv
from .lstair import (
    export_assignments,
    lstair_fit,
    lstair_predict_many,
    model_from_doc,
    model_to_doc,
)
from .rules import RuleError, predict_many, render, ruleset_from_doc, ruleset_to_doc
from .stair import StairConfig, stair_fit

log = logging.getLogger("stair")

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_BELOW_THRESHOLD = 2


class CliError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits with status 2 on bad flags; this CLI reserves 2 for
    # below-threshold results, so usage errors remap to 1.
    def error(self, message):
        self.print_usage(sys.stderr)
        raise CliError(message)


def _build_parser() -> _Parser:
    parser = _Parser(prog="stair", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="generate a synthetic labeled CSV")
    p.add_argument("--kind", choices=["band2d"], default="band2d")
    p.add_argument("--inliers", type=int, default=1000)
    p.add_argument("--outliers", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)

    p = sub.add_parser("fit", help="learn a model from a labeled CSV")
    p.add_argument("--method", choices=["stair", "lstair", "id3", "cart"], required=True)
    p.add_argument("--data", required=True)
    p.add_argument("--label-col", default="label")
    p.add_argument("--f1-min", type=float, default=0.8)
    p.add_argument("--len-max", type=int, default=10)
    p.add_argument("--lambda", dest="lam", type=float, default=0.1)
    p.add_argument("--clusters", type=int, default=2)
    p.add_argument("--max-iter", type=int, default=10)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--score", choices=["f1", "accuracy"], default="f1")
    p.add_argument("--out", required=True)
    p.add_argument("--trace", default=None)
    p.add_argument("--assignments", default=None, help="partition ids CSV (lstair only)")

    p = sub.add_parser("explain", help="render a model's rules as text")
    p.add_argument("--model", required=True)

    p = sub.add_parser("predict", help="label a CSV with a trained model")
    p.add_argument("--model", required=True)
    p.add_argument("--data", required=True)
    p.add_argument("--label-col", default="label")
    p.add_argument("--out", required=True)

    p = sub.add_parser("bench", help="run a benchmark protocol")
    p.add_argument("protocol", choices=["length-comparison", "f1-vs-length", "sweeps"])
    p.add_argument("--data", required=True)
    p.add_argument("--label-col", default="label")
    p.add_argument("--f1-min", type=float, default=0.8)
    p.add_argument("--len-max", type=int, default=10)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--score", choices=["f1", "accuracy"], default="f1")
    p.add_argument("--budgets", default=None, help="comma-separated lengths (f1-vs-length)")
    p.add_argument("--lm-values", default="2,4,6,8,10,12")
    p.add_argument("--f1m-values", default="0.70,0.75,0.80,0.85,0.90,0.95")
    p.add_argument("--out", required=True)
    return parser


def _load_model_doc(path) -> dict:
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except FileNotFoundError:
        raise CliError(f"model file not found: {path}") from None
    except json.JSONDecodeError as exc:
        raise CliError(f"{path}: malformed model file ({exc})") from None
    if not isinstance(doc, dict) or "format" not in doc:
        raise CliError(f"{path}: not a model document")
    return doc


def _load_features_for(path, label_col: str, attributes) -> np.ndarray:
    """Feature matrix from a CSV whose columns must match the model's
    attributes (the label column, if present, is ignored)."""
    try:
        fh = open(path, newline="", encoding="utf-8")
    except FileNotFoundError:
        raise CliError(f"data file not found: {path}") from None
    with fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise CliError(f"{path}: file is empty") from None
        cols = [h for h in header if h != label_col]
        if tuple(cols) != tuple(attributes):
            raise CliError(
                f"{path}: feature columns {cols} do not match model attributes {list(attributes)}"
            )
        keep = [i for i, h in enumerate(header) if h != label_col]
        rows = []
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != len(header):
                raise CliError(f"{path}: row {lineno} has {len(row)} cells, expected {len(header)}")
            try:
                rows.append([float(row[i]) for i in keep])
            except ValueError:
                raise CliError(f"{path}: row {lineno} has a non-numeric feature") from None
    if not rows:
        raise CliError(f"{path}: no data rows")
    return np.asarray(rows, dtype=np.float64)


def _cmd_gen(args) -> int:
    ds = gen_band2d(args.inliers, args.outliers, args.seed)
    save_csv(ds, args.out)
    print(f"wrote {ds.n} rows x {ds.d} features to {args.out}")
    return EXIT_OK


def _cmd_fit(args) -> int:
    try:
        ds = load_csv(args.data, args.label_col)
    except FileNotFoundError:
        raise CliError(f"data file not found: {args.data}") from None
    except DatasetError as exc:
        raise CliError(str(exc)) from None

    cfg = StairConfig(
        f1_min=args.f1_min, len_max=args.len_max, score=args.score
    )
    try:
        cfg.validate()
    except ValueError as exc:
        raise CliError(str(exc)) from None

    reached = True
    trace_text = None
    if args.method == "stair":
        rs, trace = stair_fit(ds, cfg)
        doc, reached, trace_text = ruleset_to_doc(rs), trace.reached_target, trace.to_tsv()
        summary = f"{len(rs)} rules, total length {rs.total_length()}"
    elif args.method == "id3":
        rs, reached = id3_sweep(ds, args.f1_min, score=args.score)
        doc = ruleset_to_doc(rs)
        summary = f"{len(rs)} rules, total length {rs.total_length()}"
    elif args.method == "cart":
        rs, reached = cart_fit(ds, args.f1_min, score=args.score)
        doc = ruleset_to_doc(rs)
        summary = f"{len(rs)} rules, total length {rs.total_length()}"
    else:
        try:
            model, ltrace = lstair_fit(
                ds, cfg, n_init=args.clusters, lam=args.lam,
                max_iter=args.max_iter, seed=args.seed,
            )
        except ValueError as exc:
            raise CliError(str(exc)) from None
        doc, reached = model_to_doc(model), ltrace.reached_target
        summary = (
            f"{model.partitioning.count} partitions, {model.rule_count()} rules, "
            f"total length {model.total_length()}"
        )
        if args.assignments:
            export_assignments(model, args.assignments)

    with open(args.out, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=1)
    if args.trace and trace_text is not None:
        with open(args.trace, "w", encoding="utf-8") as fh:
            fh.write(trace_text)

    status = "ok" if reached else "below threshold"
    print(f"{args.method}: {summary} [{status}] -> {args.out}")
    return EXIT_OK if reached else EXIT_BELOW_THRESHOLD


def _cmd_explain(args) -> int:
    doc = _load_model_doc(args.model)
    try:
        if doc["format"] == "lstair":
            model = model_from_doc(doc)
            for p, tree in enumerate(model.trees):
                print(f"# partition {p} ({int(np.sum(model.partitioning.assignments == p))} points)")
                print(render(tree))
        else:
            print(render(ruleset_from_doc(doc)))
    except (RuleError, ValueError, KeyError) as exc:
        raise CliError(f"{args.model}: {exc}") from None
    return EXIT_OK


def _cmd_predict(args) -> int:
    doc = _load_model_doc(args.model)
    try:
        if doc["format"] == "lstair":
            model = model_from_doc(doc)
            attributes = model.trees[0].attributes
            features = _load_features_for(args.data, args.label_col, attributes)
            preds = lstair_predict_many(model, features)
        else:
            rs = ruleset_from_doc(doc)
            attributes = rs.attributes
            features = _load_features_for(args.data, args.label_col, attributes)
            preds = predict_many(rs, features)
    except (RuleError, ValueError, KeyError) as exc:
        raise CliError(f"prediction failed: {exc}") from None

    with open(args.out, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(list(attributes) + ["prediction"])
        for x, p in zip(features, preds):
            writer.writerow([repr(float(v)) for v in x] + [int(p)])
    print(f"wrote {len(preds)} predictions to {args.out}")
    return EXIT_OK


def _parse_int_list(text: str) -> list[int]:
    try:
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise CliError(f"expected comma-separated integers, got {text!r}") from None


def _parse_float_list(text: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise CliError(f"expected comma-separated numbers, got {text!r}") from None


def _cmd_bench(args) -> int:
    try:
        ds = load_csv(args.data, args.label_col)
    except FileNotFoundError:
        raise CliError(f"data file not found: {args.data}") from None
    except DatasetError as exc:
        raise CliError(str(exc)) from None
    name = os.path.splitext(os.path.basename(args.data))[0]

    if args.protocol == "length-comparison":
        report = bench_mod.run_length_comparison(
            ds, name=name, f1_min=args.f1_min, len_max=args.len_max,
            seed=args.seed, score=args.score, out_dir=args.out,
        )
    elif args.protocol == "f1-vs-length":
        if args.budgets:
            budgets = _parse_int_list(args.budgets)
        else:
            full, _ = id3_sweep(ds, args.f1_min, score=args.score)
            top = max(full.total_length(), 10)
            budgets = sorted({max(1, round(top * i / 10)) for i in range(1, 11)})
        report = bench_mod.run_f1_vs_length(
            ds, budgets, name=name, score=args.score, len_max=args.len_max, out_dir=args.out,
        )
    else:
        report = bench_mod.run_sweeps(
            ds,
            lm_values=_parse_int_list(args.lm_values),
            f1m_values=_parse_float_list(args.f1m_values),
            name=name, f1_min=args.f1_min, len_max=args.len_max,
            seed=args.seed, score=args.score, out_dir=args.out,
        )
    print(report.render())
    print(f"report written to {args.out}")
    flagged = [r for r in report.rows if r.flags]
    return EXIT_BELOW_THRESHOLD if flagged and args.protocol != "f1-vs-length" else EXIT_OK


def main(argv=None) -> int:
    level = os.environ.get("STAIR_LOG_LEVEL", "WARNING").upper()
    logging.basicConfig(
        level=level if level in ("DEBUG", "INFO", "WARNING", "ERROR") else "WARNING",
        format="%(levelname)s %(name)s: %(message)s",
    )
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        handler = {
            "gen": _cmd_gen,
            "fit": _cmd_fit,
            "explain": _cmd_explain,
            "predict": _cmd_predict,
            "bench": _cmd_bench,
        }[args.command]
        return handler(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
