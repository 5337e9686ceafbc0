"""Command-line front end: simulations, the live service, and model tools.

Every command prints a JSON result on success and a single JSON error line
on stderr on failure, so scripts can consume either path. Exit code is 0 on
success and nonzero otherwise.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import replace
from pathlib import Path
from typing import Optional, Sequence

import numpy as np


def _print_json(payload: dict) -> None:
    print(json.dumps(payload, indent=2, sort_keys=True))


def _cmd_sim(args: argparse.Namespace) -> int:
    from .scenario import ScenarioConfig, export_report, load_config, run_scenario, summarize

    config = load_config(args.scenario) if args.scenario else ScenarioConfig()
    if args.seed is not None:
        config = replace(config, seed=args.seed)
    report = run_scenario(config)
    paths = export_report(report, args.out)
    summary = summarize(report)
    summary["files"] = [str(p) for p in paths]
    _print_json(summary)
    return 0


def _cmd_compare(args: argparse.Namespace) -> int:
    from .scenario import (
        ScenarioConfig,
        compare_automation,
        export_comparison,
        load_config,
        summarize,
    )

    config = load_config(args.scenario) if args.scenario else ScenarioConfig()
    if args.seed is not None:
        config = replace(config, seed=args.seed)
    comparison = compare_automation(config)
    paths = export_comparison(comparison, args.out)
    _print_json(
        {
            "automated": summarize(comparison.automated),
            "baseline": summarize(comparison.baseline),
            "files": [str(p) for p in paths],
        }
    )
    return 0


def _cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn

    from .cloud import create_live_app

    app = create_live_app(data_dir=args.data)
    uvicorn.run(app, host=args.host, port=args.port, log_level="info")
    return 0


def _load_image_dir(root: Path) -> tuple[np.ndarray, np.ndarray, tuple[str, ...]]:
    """Directory-per-class image tree -> preprocessed tiles and labels."""
    from .classifier import preprocess
    from .sensors import decode_pgm, decode_ppm

    class_dirs = sorted(p for p in root.iterdir() if p.is_dir())
    if not class_dirs:
        raise ValueError(f"no class directories under {root}")
    xs, ys = [], []
    for class_index, class_dir in enumerate(class_dirs):
        images = sorted(
            p for p in class_dir.iterdir() if p.suffix.lower() in (".ppm", ".pgm")
        )
        if not images:
            raise ValueError(f"no .ppm/.pgm images under {class_dir}")
        for image_path in images:
            data = image_path.read_bytes()
            frame = decode_ppm(data) if data.startswith(b"P6") else decode_pgm(data)
            xs.append(preprocess(frame))
            ys.append(class_index)
    labels = tuple(p.name for p in class_dirs)
    return np.stack(xs), np.array(ys, dtype=int), labels


def _cmd_train(args: argparse.Namespace) -> int:
    from .classifier import (
        LeafClassifier,
        evaluate,
        generate_leaf_dataset,
        save_model,
        split_dataset,
        train,
    )
    from .sensors import CLASS_NAMES

    if args.data:
        xs, ys, labels = _load_image_dir(Path(args.data))
    else:
        xs, ys = generate_leaf_dataset(per_class=args.per_class, seed=args.seed)
        labels = CLASS_NAMES
    x_train, y_train, x_test, y_test = split_dataset(
        xs, ys, holdout_fraction=args.holdout, seed=args.seed
    )
    model = LeafClassifier(num_classes=len(labels), labels=labels, seed=args.seed)
    history = train(
        model,
        x_train,
        y_train,
        epochs=args.epochs,
        lr=args.lr,
        seed=args.seed,
        log=lambda line: print(line, file=sys.stderr),
    )
    confusion = evaluate(model, x_test, y_test)
    save_model(model, args.out)
    _print_json(
        {
            "weights": str(args.out),
            "samples": int(len(xs)),
            "train_samples": int(len(x_train)),
            "holdout_samples": int(len(x_test)),
            "epochs": args.epochs,
            "final_train_accuracy": history.final_accuracy if args.epochs else None,
            "holdout_accuracy": confusion.accuracy,
            "confusion": confusion.to_dict(),
        }
    )
    return 0


def _cmd_predict(args: argparse.Namespace) -> int:
    from .classifier import classify_frame, load_model
    from .sensors import decode_pgm, decode_ppm

    model = load_model(args.weights)
    data = Path(args.image).read_bytes()
    if data.startswith(b"P6"):
        frame = decode_ppm(data)
    elif data.startswith(b"P5"):
        frame = decode_pgm(data)
    else:
        raise ValueError("image must be a binary PPM (P6) or PGM (P5) file")
    result = classify_frame(model, frame)
    _print_json(
        {
            "label": result.label,
            "confidence": result.confidence,
            "probabilities": result.probabilities,
            "lesion_box": list(result.lesion_box) if result.lesion_box else None,
        }
    )
    return 0


def _cmd_gradcheck(args: argparse.Namespace) -> int:
    from .classifier import grad_check

    report = grad_check(seed=args.seed, epsilon=args.epsilon)
    _print_json(
        {
            "passed": report.passed,
            "max_rel_error": report.max_rel_error,
            "samples": report.samples,
            "skipped": report.skipped,
            "per_param": report.per_param,
        }
    )
    return 0 if report.passed else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="scrop",
        description="Solar-powered smart-agriculture node: simulate, serve, train, predict.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("sim", help="run one scenario and export its traces")
    sim.add_argument("--scenario", help="scenario JSON file (defaults to the standard day)")
    sim.add_argument("--seed", type=int, help="override the scenario seed")
    sim.add_argument("--out", required=True, help="output directory for trace/events/summary")
    sim.set_defaults(func=_cmd_sim)

    compare = sub.add_parser(
        "compare", help="run automated vs fixed-schedule arms and export both"
    )
    compare.add_argument("--scenario", help="scenario JSON file (defaults to the standard day)")
    compare.add_argument("--seed", type=int, help="override the scenario seed")
    compare.add_argument("--out", required=True, help="output directory")
    compare.set_defaults(func=_cmd_compare)

    serve = sub.add_parser("serve", help="run the telemetry cloud service")
    serve.add_argument("--host", default="127.0.0.1")
    serve.add_argument("--port", type=int, default=8000)
    serve.add_argument("--data", help="persistence directory (omit for in-memory)")
    serve.set_defaults(func=_cmd_serve)

    train = sub.add_parser("train", help="train the leaf classifier")
    train.add_argument(
        "--data",
        help="directory of class subfolders with .ppm/.pgm images "
        "(omit to train on the synthetic leaf set)",
    )
    train.add_argument("--per-class", type=int, default=100, dest="per_class",
                       help="synthetic samples per class when --data is omitted")
    train.add_argument("--epochs", type=int, default=25)
    train.add_argument("--lr", type=float, default=0.01)
    train.add_argument("--holdout", type=float, default=0.25)
    train.add_argument("--seed", type=int, default=0)
    train.add_argument("--out", required=True, help="weights file to write")
    train.set_defaults(func=_cmd_train)

    predict = sub.add_parser("predict", help="classify one leaf image")
    predict.add_argument("--weights", required=True)
    predict.add_argument("--image", required=True, help="binary PPM or PGM file")
    predict.set_defaults(func=_cmd_predict)

    gradcheck = sub.add_parser(
        "gradcheck", help="compare analytic gradients against finite differences"
    )
    gradcheck.add_argument("--seed", type=int, default=0)
    gradcheck.add_argument("--epsilon", type=float, default=1e-5)
    gradcheck.set_defaults(func=_cmd_gradcheck)

    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except Exception as exc:  # one machine-readable line, nonzero exit
        print(
            json.dumps({"error": type(exc).__name__, "message": str(exc)}),
            file=sys.stderr,
        )
        return 1


if __name__ == "__main__":
    sys.exit(main())
