"""Command-line front end.

Subcommands: ``compute``, ``elicit``, ``sweep``, ``check`` and ``report``.
Exit codes: 0 success, 2 invalid data (or an invariance check that did not
come out as expected), 3 invalid parameters, 4 I/O failure.
"""

from __future__ import annotations

import argparse
import sys
from datetime import datetime, timezone
from pathlib import Path
from typing import Any

from . import __version__
from .analysis import (
    RNG_ALGORITHM,
    complexity_surface,
    nb_ha_curves,
    priority_sweep,
    run_invariance_suite,
    tau_sweep,
)
from .core import ComplexityAssignment, Dataset, LabelSet, PriorityVector
from .elicitation import (
    aggregate_complexity,
    binarize_complexity,
    derive_priorities_from_raters,
    derive_tau_from_confidence,
    priorities_from_preset,
    quantile_thresholds,
    rater_performances,
    two_level_complexity,
)
from .errors import DataError, HaccuracyError, ParameterError
from .formats import (
    Report,
    emit_report,
    file_digest,
    gold_from_dataset,
    parse_annotations,
    parse_complexity,
    parse_gold,
    parse_predictions,
    parse_priorities,
    render_json,
)
from .metrics import (
    HaParams,
    auroc,
    balanced_accuracy,
    h_accuracy,
    net_benefit,
    prevalence,
    regular_accuracy,
    risk_rates,
    standardized_net_benefit,
    youden_index,
)

EXIT_OK, EXIT_DATA, EXIT_PARAM, EXIT_IO = 0, 2, 3, 4

DEFAULT_TAUS = (0.5, 0.6, 0.75, 0.8, 1.0)
DEFAULT_PRIORITY_GRID = (0.25, 0.5, 0.75)
DEFAULT_RISK_GRID = tuple(round(0.05 * i, 2) for i in range(1, 20))
DEFAULT_PROPORTIONS = tuple(round(0.1 * i, 1) for i in range(11))


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_PARAM, f"{self.prog}: error: {message}\n")


def _floats(text: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--format", choices=("json", "tsv"), default="json")
    p.add_argument("--output", "-o", help="write here instead of stdout")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--timestamp", action="store_true",
                   help="record the wall-clock time (makes output non-reproducible)")


def _param_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--tau", type=float, help="confidence or risk threshold (default: 1/k)")
    p.add_argument("--priorities", help="'neg=0.52,pos=0.48' or @file.json")
    p.add_argument("--complexity", help="'const:<v>', @file.csv or @file.json")
    p.add_argument("--penalty", choices=("standard", "risk"), default="standard")
    p.add_argument("--raw-scores", action="store_true",
                   help="do not require each score vector to sum to one")


def _elicit_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--r", type=float, default=0.5, dest="r",
                   help="share of correct answers the confidence tail must hold")
    p.add_argument("--decision", help="which decision to use when there are several")
    p.add_argument("--positive-label", help="default: second label of the predictions file")
    p.add_argument("--preference", choices=("favor-specificity", "favor-sensitivity", "balanced"),
                   help="use a preset instead of deriving priorities from the raters")
    p.add_argument("--complexity-mode", choices=("two-level", "binary"), default="two-level")
    p.add_argument("--complexity-threshold", type=float,
                   help="default: the level leaving half of the cases above it")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="haccuracy", description="H-accuracy metrics engine")
    parser.add_argument("--version", action="version", version=f"haccuracy {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("compute", help="metrics for a predictions file")
    p.add_argument("predictions")
    _param_flags(p)
    _common(p)

    p = sub.add_parser("elicit", help="derive tau, priorities and complexity from annotations")
    p.add_argument("annotations")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--predictions", help="take gold labels from a predictions file")
    src.add_argument("--gold", help="gold CSV: instance_id,label[ or instance_id,decision,label]")
    _elicit_flags(p)
    _common(p)

    p = sub.add_parser("sweep", help="tabulate a metric over a parameter grid")
    p.add_argument("kind", choices=("tau", "priority", "surface", "nbha"))
    p.add_argument("predictions")
    p.add_argument("--grid", type=_floats, help="tau or p(positive) values")
    p.add_argument("--proportions", type=_floats, help="surface: complex-case fractions")
    p.add_argument("--samples", type=int, default=200, help="surface: draws per grid point")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--raw-scores", action="store_true")
    _common(p)

    p = sub.add_parser("check", help="run the confusion-matrix invariance suite")
    p.add_argument("--trials", type=int, default=1000)
    _common(p)

    p = sub.add_parser("report", help="metrics, elicited parameters and sweeps in one document")
    p.add_argument("predictions")
    p.add_argument("--annotations", help="annotations CSV to elicit parameters from")
    _elicit_flags(p)
    p.add_argument("--surface", action="store_true", help="include the complexity surface")
    p.add_argument("--samples", type=int, default=200)
    p.add_argument("--workers", type=int, default=1)
    _param_flags(p)
    _common(p)
    return parser


def _metadata(args, inputs: dict[str, str]) -> dict[str, Any]:
    meta: dict[str, Any] = {
        "tool": "haccuracy",
        "version": __version__,
        "command": args.command,
        "seed": args.seed,
        "rng": RNG_ALGORITHM,
        "inputs": {name: file_digest(path) for name, path in inputs.items()},
    }
    if args.timestamp:
        meta["timestamp"] = datetime.now(timezone.utc).isoformat()
    return meta


def _resolve_params(args, dataset: Dataset, elicited: dict[str, Any] | None = None
                    ) -> tuple[HaParams, dict[str, Any]]:
    elicited = elicited or {}
    provenance: dict[str, str] = {}
    if args.tau is not None:
        tau, provenance["tau"] = args.tau, "flag"
    elif "tau" in elicited:
        tau, provenance["tau"] = elicited["tau"], "derived"
    else:
        tau, provenance["tau"] = 1.0 / dataset.k, "default"
    if args.priorities:
        priorities = parse_priorities(args.priorities, dataset.label_set)
        provenance["priorities"] = "file" if args.priorities.startswith("@") else "flag"
    elif "priorities" in elicited:
        priorities, provenance["priorities"] = PriorityVector(elicited["priorities"]), "derived"
    else:
        priorities, provenance["priorities"] = PriorityVector.uniform(dataset.label_set), "default"
    if args.complexity:
        complexity = parse_complexity(args.complexity)
        provenance["complexity"] = "file" if args.complexity.startswith("@") else "flag"
    elif "complexity" in elicited:
        complexity = ComplexityAssignment(elicited["complexity"])
        provenance["complexity"] = "derived"
    else:
        complexity, provenance["complexity"] = ComplexityAssignment.const(), "default"
    params = HaParams(tau, priorities, complexity, args.penalty)
    block = {
        "tau": tau,
        "penalty": args.penalty,
        "priorities": dict(priorities.weights),
        "complexity": ({"constant": complexity.constant} if complexity.is_constant
                       else dict(complexity.values)),
        "provenance": provenance,
    }
    return params, block


def _metrics(dataset: Dataset, params: HaParams) -> dict[str, Any]:
    out: dict[str, Any] = {
        "n": len(dataset),
        "regular_accuracy": regular_accuracy(dataset),
        "balanced_accuracy": balanced_accuracy(dataset),
        "h_accuracy": h_accuracy(dataset, params),
    }
    if dataset.k == 2:
        out["auroc"] = auroc(dataset)
        out["prevalence"] = prevalence(dataset)
        if 0.0 < params.tau < 1.0:
            rates = risk_rates(dataset, params.tau)
            out["net_benefit"] = net_benefit(rates, params.tau)
            out["standardized_net_benefit"] = standardized_net_benefit(rates, params.tau)
            out["youden_index"] = youden_index(rates)
            out["tpr"], out["fpr"] = rates.tpr, rates.fpr
    return out


def _infer_labels(annotations, decision: str, positive: str | None) -> LabelSet:
    """Binary label set from the gold labels when no predictions file is given."""
    if positive is None:
        raise ParameterError("--positive-label is required without a predictions file")
    others = {annotations.gold_label(a.instance_id, decision)
              for a in annotations.annotations} - {positive, None}
    if len(others) != 1:
        raise DataError(f"cannot infer the negative label from gold labels {sorted(others)}")
    return LabelSet((others.pop(), positive))


def _elicit(annotations_path: str, gold: dict, label_set, args) -> dict[str, Any]:
    annotations = parse_annotations(annotations_path, gold)
    decision = annotations.resolve_decision(args.decision)
    positive = args.positive_label
    if label_set is None:
        label_set = _infer_labels(annotations, decision, positive)
    positive = positive or label_set.labels[1]
    if positive not in label_set:
        raise ParameterError(f"positive label {positive!r} not in {label_set.labels}")
    if positive == label_set.labels[0]:
        # priority helpers expect <negative, positive> order
        label_set = LabelSet(label_set.labels[::-1])
    preference = args.preference
    performances = []
    if preference:
        priorities = priorities_from_preset(preference, label_set)
    else:
        performances = rater_performances(annotations, positive, decision)
        priorities = derive_priorities_from_raters(performances, label_set)
    tau = derive_tau_from_confidence(annotations, args.r, decision)
    profile = aggregate_complexity(annotations)
    d_t1, d_t2, d_t3 = quantile_thresholds(profile)
    threshold = d_t1 if args.complexity_threshold is None else args.complexity_threshold
    mode = args.complexity_mode
    if mode == "binary":
        complexity = binarize_complexity(profile, threshold)
    else:
        complexity = two_level_complexity(profile, threshold)
    return {
        "tau": tau,
        "priorities": dict(priorities.weights),
        "complexity": dict(complexity.values),
        "provenance": {
            "decision": decision,
            "r": args.r,
            "complexity_mode": mode,
            "complexity_threshold": threshold,
            "quantile_thresholds": {"0.5": d_t1, "0.33": d_t2, "0.2": d_t3},
            "priorities": f"preset:{preference}" if preference else "raters",
            "raters": {r.rater_id: {"tpr": r.tpr, "tnr": r.tnr} for r in performances},
            "mean_complexity": dict(profile.per_case_mean),
        },
    }


def cmd_compute(args) -> tuple[bytes, int]:
    dataset = parse_predictions(args.predictions, "raw" if args.raw_scores else "soft")
    params, block = _resolve_params(args, dataset)
    report = Report(_metadata(args, {"predictions": args.predictions}), _metrics(dataset, params),
                    block)
    return emit_report(report, args.format), EXIT_OK


def cmd_elicit(args) -> tuple[bytes, int]:
    inputs = {"annotations": args.annotations}
    label_set = None
    if args.predictions:
        dataset = parse_predictions(args.predictions, "raw")
        gold, label_set = gold_from_dataset(dataset), dataset.label_set
        inputs["predictions"] = args.predictions
    else:
        gold = parse_gold(args.gold)
        inputs["gold"] = args.gold
    params = _elicit(args.annotations, gold, label_set, args)
    params["metadata"] = _metadata(args, inputs)
    # parameters files are always JSON so that compute/report can read them back
    return render_json(params).encode("utf-8"), EXIT_OK


def cmd_sweep(args) -> tuple[bytes, int]:
    dataset = parse_predictions(args.predictions, "raw" if args.raw_scores else "soft")
    if args.kind == "tau":
        table = tau_sweep(dataset, args.grid or [1.0 / dataset.k, *DEFAULT_TAUS[1:]])
    elif args.kind == "priority":
        table = priority_sweep(dataset, args.grid or DEFAULT_PRIORITY_GRID)
    elif args.kind == "nbha":
        table = nb_ha_curves(dataset, args.grid or DEFAULT_RISK_GRID)
    else:
        table = complexity_surface(dataset, args.proportions or DEFAULT_PROPORTIONS,
                                   args.grid or DEFAULT_PRIORITY_GRID, args.samples, args.seed,
                                   args.workers)
    report = Report(_metadata(args, {"predictions": args.predictions}), sweeps=[table])
    return emit_report(report, args.format), EXIT_OK


def cmd_check(args) -> tuple[bytes, int]:
    results = run_invariance_suite(args.trials, args.seed)
    rows, all_ok = [], True
    for case, verdict in results:
        ok = verdict.invariant == case.expect_invariant
        all_ok &= ok
        row = {
            "property": verdict.property_name,
            "metric": verdict.metric,
            "transform": verdict.transform,
            "expected": "invariant" if case.expect_invariant else "violated",
            "verdict": "invariant" if verdict.invariant else "violated",
            "as_expected": ok,
            "trials": verdict.trials,
        }
        if verdict.counterexample is not None:
            before, after, v0, v1 = verdict.counterexample
            row["counterexample"] = {"before": list(before.cells()), "after": list(after.cells()),
                                     "value_before": v0, "value_after": v1,
                                     "transform_params": list(verdict.transform_params)}
        rows.append(row)
    report = Report(_metadata(args, {}), extra={"invariance": rows})
    return emit_report(report, args.format), EXIT_OK if all_ok else EXIT_DATA


def cmd_report(args) -> tuple[bytes, int]:
    dataset = parse_predictions(args.predictions, "raw" if args.raw_scores else "soft")
    inputs = {"predictions": args.predictions}
    elicited = None
    if args.annotations:
        inputs["annotations"] = args.annotations
        elicited = _elicit(args.annotations, gold_from_dataset(dataset), dataset.label_set, args)
    params, block = _resolve_params(args, dataset, elicited)
    if elicited:
        block["elicitation"] = elicited["provenance"]
    metrics = _metrics(dataset, params)
    chance = 1.0 / dataset.k
    sweeps = [tau_sweep(dataset, [chance, *(t for t in DEFAULT_TAUS if t > chance)])]
    if dataset.k == 2:
        sweeps.append(priority_sweep(dataset, DEFAULT_PRIORITY_GRID))
        sweeps.append(nb_ha_curves(dataset, DEFAULT_RISK_GRID))
        if args.surface:
            sweeps.append(complexity_surface(dataset, DEFAULT_PROPORTIONS, DEFAULT_PRIORITY_GRID,
                                             args.samples, args.seed, args.workers))
    report = Report(_metadata(args, inputs), metrics, block, sweeps)
    return emit_report(report, args.format), EXIT_OK


COMMANDS = {"compute": cmd_compute, "elicit": cmd_elicit, "sweep": cmd_sweep,
            "check": cmd_check, "report": cmd_report}


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        payload, code = COMMANDS[args.command](args)
        if args.output:
            Path(args.output).write_bytes(payload)
        else:
            sys.stdout.buffer.write(payload)
            sys.stdout.flush()
        return code
    except ParameterError as exc:
        print(f"haccuracy: parameter error: {exc}", file=sys.stderr)
        return EXIT_PARAM
    except (DataError, HaccuracyError) as exc:
        print(f"haccuracy: invalid input: {exc}", file=sys.stderr)
        return EXIT_DATA
    except OSError as exc:
        print(f"haccuracy: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except ValueError as exc:
        print(f"haccuracy: parameter error: {exc}", file=sys.stderr)
        return EXIT_PARAM


if __name__ == "__main__":
    sys.exit(main())
