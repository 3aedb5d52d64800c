"""Command-line front end.

Subcommands: ``weak-label``, ``split``, ``train``, ``predict``,
``evaluate``.  Every option can also be supplied through ``--config FILE``
(a JSON object keyed by option name with dashes replaced by underscores);
explicit flags win over the config file, which wins over built-in defaults.

Exit codes: 0 success, 1 usage error, 2 data/schema error, 3 numeric
failure.  Belief-propagation non-convergence is reported as a warning, not
a failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import __version__
from .classifier import TrainConfig, load_model, predict_many, save_model, train
from .constraints import ConstraintSet, load_constraint_file
from .corpus import load_corpus, save_corpus, split_user_disjoint
from .errors import DataError, NumericError
from .evaluate import evaluate_predictions, report_to_json, report_to_table
from .factorgraph import BPConfig, calibrate
from .features import AssemblyConfig
from .topics import default_topic_space, encode_labels, load_topic_file, register_topics
from .weaklabel import load_rule_file, partition_chatter

__all__ = ["main", "entrypoint", "build_parser", "PREDICTIONS_FORMAT", "PREDICTIONS_VERSION"]

PREDICTIONS_FORMAT = "topical-predictions"
PREDICTIONS_VERSION = 1


class _UsageError(Exception):
    """Missing or inconsistent options discovered after config merging."""


class _Parser(argparse.ArgumentParser):
    """ArgumentParser that exits with status 1 on usage errors."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _load_config(path) -> dict:
    if path is None:
        return {}
    with open(path, encoding="utf-8") as f:
        try:
            obj = json.load(f)
        except json.JSONDecodeError as exc:
            raise DataError(f"{path}: malformed JSON config ({exc.msg})") from exc
    if not isinstance(obj, dict):
        raise DataError(f"{path}: config file must hold a JSON object")
    return obj


def _resolve(args, config: dict, key: str, default=None):
    value = getattr(args, key, None)
    if value is None:
        value = config.get(key, default)
    return value


def _require(value, flag: str):
    if value is None:
        raise _UsageError(f"missing required option {flag}")
    return value


def _as_int(value, flag: str) -> int:
    try:
        return int(value)
    except (TypeError, ValueError):
        raise DataError(f"{flag} must be an integer, got {value!r}") from None


def _as_float(value, flag: str) -> float:
    try:
        return float(value)
    except (TypeError, ValueError):
        raise DataError(f"{flag} must be a number, got {value!r}") from None


def _as_bool(value, flag: str) -> bool:
    if isinstance(value, bool):
        return value
    raise DataError(f"{flag} must be true or false, got {value!r}")


def _topic_space(args, config):
    path = _resolve(args, config, "topics")
    return load_topic_file(path) if path else default_topic_space()


def _assembly(args, config) -> AssemblyConfig:
    return AssemblyConfig(
        use_links=_as_bool(_resolve(args, config, "use_links", True), "--use-links"),
        use_media=_as_bool(_resolve(args, config, "use_media", True), "--use-media"),
        use_entities=_as_bool(
            _resolve(args, config, "use_entities", True), "--use-entities"
        ),
        use_author=_as_bool(_resolve(args, config, "use_author", True), "--use-author"),
    )


def _bp_config(args, config) -> BPConfig:
    return BPConfig(
        max_iters=_as_int(_resolve(args, config, "max_iters", 100), "--max-iters"),
        tolerance=_as_float(_resolve(args, config, "tolerance", 1e-8), "--tolerance"),
        damping=_as_float(_resolve(args, config, "damping", 0.0), "--damping"),
        epsilon=_as_float(_resolve(args, config, "epsilon", 1e-6), "--epsilon"),
        exact_component_limit=_as_int(
            _resolve(args, config, "exact_component_limit", 20),
            "--exact-component-limit",
        ),
    )


def cmd_weak_label(args, config) -> int:
    space = _topic_space(args, config)
    rules = load_rule_file(_require(_resolve(args, config, "rules"), "--rules"), space)
    corpus = load_corpus(_require(_resolve(args, config, "corpus"), "--corpus"))
    out_topical = _require(_resolve(args, config, "out_topical"), "--out-topical")
    out_chatter = _require(_resolve(args, config, "out_chatter"), "--out-chatter")
    topical, chatter = partition_chatter(corpus, rules)
    save_corpus(topical, out_topical)
    save_corpus(chatter, out_chatter)
    print(
        f"{len(corpus)} documents -> {len(topical)} topical ({out_topical}), "
        f"{len(chatter)} chatter ({out_chatter})"
    )
    return 0


def _parse_fractions(raw) -> tuple[float, float, float]:
    if isinstance(raw, str):
        parts = raw.split(",")
    elif isinstance(raw, (list, tuple)):
        parts = list(raw)
    else:
        raise _UsageError(f"--fractions must be three comma-separated numbers, got {raw!r}")
    if len(parts) != 3:
        raise _UsageError(f"--fractions needs exactly three values, got {len(parts)}")
    try:
        return tuple(float(p) for p in parts)
    except (TypeError, ValueError):
        raise _UsageError(f"--fractions must be numeric, got {raw!r}") from None


def cmd_split(args, config) -> int:
    corpus = load_corpus(_require(_resolve(args, config, "corpus"), "--corpus"))
    fractions = _parse_fractions(_resolve(args, config, "fractions", "0.7,0.1,0.2"))
    seed = _as_int(_resolve(args, config, "seed", 13), "--seed")
    outs = [
        _require(_resolve(args, config, "out_train"), "--out-train"),
        _require(_resolve(args, config, "out_dev"), "--out-dev"),
        _require(_resolve(args, config, "out_test"), "--out-test"),
    ]
    splits = split_user_disjoint(corpus, fractions, seed)
    for part, path in zip(splits, outs):
        save_corpus(part, path)
    print(
        f"{len(corpus)} documents -> "
        + ", ".join(f"{len(part)} ({path})" for part, path in zip(splits, outs))
    )
    return 0


def cmd_train(args, config) -> int:
    space = _topic_space(args, config)
    corpus = load_corpus(_require(_resolve(args, config, "corpus"), "--corpus"))
    model_path = _require(_resolve(args, config, "model"), "--model")
    label_source = _resolve(args, config, "label_source", "gold")
    if label_source not in ("gold", "weak"):
        raise _UsageError(f"--label-source must be 'gold' or 'weak', got {label_source!r}")
    train_config = TrainConfig(
        epochs=_as_int(_resolve(args, config, "epochs", 5), "--epochs"),
        learning_rate=_as_float(
            _resolve(args, config, "learning_rate", 0.1), "--learning-rate"
        ),
        dim=_as_int(_resolve(args, config, "dim", 2**18), "--dim"),
        weight_cap=_as_float(_resolve(args, config, "weight_cap", 100.0), "--weight-cap"),
        l2=_as_float(_resolve(args, config, "l2", 0.0), "--l2"),
        seed=_as_int(_resolve(args, config, "seed", 0), "--seed"),
    )
    init_path = _resolve(args, config, "init")
    init = load_model(init_path) if init_path else None
    model = train(corpus, label_source, space, train_config, _assembly(args, config), init)
    save_model(model, model_path)
    print(
        f"trained on {len(corpus)} documents for {train_config.epochs} epochs; "
        f"final loss {model.epoch_losses[-1]:.6f}"
    )
    print(f"model written to {model_path}")
    return 0


def _dump_line(obj) -> str:
    return json.dumps(obj, sort_keys=True, ensure_ascii=False, separators=(",", ":"))


def cmd_predict(args, config) -> int:
    model = load_model(_require(_resolve(args, config, "model"), "--model"))
    corpus = load_corpus(_require(_resolve(args, config, "corpus"), "--corpus"))
    out_path = _require(_resolve(args, config, "out"), "--out")
    use_constraints = _as_bool(
        _resolve(args, config, "use_constraints", True), "--use-constraints"
    )
    constraints_path = _resolve(args, config, "constraints")
    constraints = ConstraintSet()
    if use_constraints and constraints_path:
        constraints = load_constraint_file(constraints_path, model.space)
    bp_config = _bp_config(args, config)
    threads = _as_int(_resolve(args, config, "threads", 1), "--threads")
    if threads < 1:
        raise _UsageError(f"--threads must be >= 1, got {threads}")

    docs = list(corpus)
    raw = predict_many(model, docs, threads=threads)
    if len(constraints) and docs:
        if threads > 1 and len(docs) > 1:
            with ThreadPoolExecutor(max_workers=threads) as pool:
                rows = list(pool.map(lambda r: calibrate(r, constraints, bp_config), raw))
        else:
            rows = [calibrate(r, constraints, bp_config) for r in raw]
        calibrated = np.vstack(rows)
    else:
        calibrated = raw

    with open(out_path, "w", encoding="utf-8") as f:
        f.write(
            _dump_line(
                {
                    "format": PREDICTIONS_FORMAT,
                    "version": PREDICTIONS_VERSION,
                    "topics": list(model.space.names),
                }
            )
            + "\n"
        )
        for doc, raw_row, cal_row in zip(docs, raw, calibrated):
            f.write(
                _dump_line(
                    {"id": doc.id, "raw": raw_row.tolist(), "calibrated": cal_row.tolist()}
                )
                + "\n"
            )
    print(f"wrote predictions for {len(docs)} documents to {out_path}")
    return 0


def _load_predictions(path, which: str):
    """Read a predictions file; returns (topic names, {doc id -> vector})."""
    header = None
    vectors: dict[str, np.ndarray] = {}
    with open(path, encoding="utf-8") as f:
        for lineno, line in enumerate(f, start=1):
            if line.strip() == "":
                continue
            where = f"{path}:{lineno}"
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise DataError(f"{where}: malformed JSON ({exc.msg})") from exc
            if not isinstance(obj, dict):
                raise DataError(f"{where}: record must be an object")
            if header is None:
                if obj.get("format") != PREDICTIONS_FORMAT:
                    raise DataError(f"{where}: not a predictions file (bad format header)")
                if obj.get("version") != PREDICTIONS_VERSION:
                    raise DataError(
                        f"{where}: unsupported predictions version {obj.get('version')!r}"
                    )
                topics = obj.get("topics")
                if not isinstance(topics, list) or not all(
                    isinstance(t, str) for t in topics
                ):
                    raise DataError(f"{where}: header must list topic names")
                header = topics
                continue
            doc_id = obj.get("id")
            if not isinstance(doc_id, str) or doc_id == "":
                raise DataError(f"{where}: record needs a non-empty 'id'")
            if doc_id in vectors:
                raise DataError(f"{where}: duplicate prediction for document {doc_id!r}")
            scores = obj.get(which)
            if not isinstance(scores, list) or len(scores) != len(header):
                raise DataError(
                    f"{where}: field {which!r} must be a list of {len(header)} scores"
                )
            vec = np.asarray(scores, dtype=np.float64)
            if not np.all(np.isfinite(vec)):
                raise DataError(f"{where}: non-finite score for document {doc_id!r}")
            vectors[doc_id] = vec
    if header is None:
        raise DataError(f"{path}: empty predictions file (missing header)")
    return header, vectors


def cmd_evaluate(args, config) -> int:
    predictions_path = _require(_resolve(args, config, "predictions"), "--predictions")
    corpus = load_corpus(_require(_resolve(args, config, "corpus"), "--corpus"))
    which = _resolve(args, config, "scores", "calibrated")
    if which not in ("raw", "calibrated"):
        raise _UsageError(f"--scores must be 'raw' or 'calibrated', got {which!r}")
    threshold = _as_float(_resolve(args, config, "threshold", 0.9), "--threshold")

    topic_names, vectors = _load_predictions(predictions_path, which)
    space = register_topics(topic_names)
    constraints_path = _resolve(args, config, "constraints")
    constraints = (
        load_constraint_file(constraints_path, space) if constraints_path else None
    )

    rows, labels = [], []
    for doc in corpus:
        vec = vectors.get(doc.id)
        if vec is None:
            raise DataError(f"no prediction for document {doc.id!r} in {predictions_path}")
        if doc.gold_labels is None:
            raise DataError(
                f"document {doc.id!r} has no gold labels; evaluation needs labeled data"
            )
        rows.append(vec)
        labels.append(encode_labels(doc.gold_labels, space))
    if not rows:
        raise DataError("gold corpus is empty; nothing to evaluate")

    report = evaluate_predictions(
        np.vstack(rows), np.vstack(labels), space, constraints, threshold
    )
    print(f"median APS (x100): {report.median_aps * 100:.2f}")
    print(f"topics scored: {len(report.per_topic_ap)}")
    print(f"chatter count @{threshold:g}: {report.chatter_count}")
    print(
        f"violations @{threshold:g}: inclusion={report.violations['inclusion']} "
        f"exclusion={report.violations['exclusion']}"
    )
    out_path = _resolve(args, config, "out")
    if out_path:
        with open(out_path, "w", encoding="utf-8") as f:
            f.write(report_to_json(report) + "\n")
        print(f"report written to {out_path}")
    table_path = _resolve(args, config, "table")
    if table_path:
        with open(table_path, "w", encoding="utf-8") as f:
            f.write(report_to_table(report))
        print(f"per-topic table written to {table_path}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="topical",
        description=(
            "Multi-label topic classification toolkit: weak keyword labeling, "
            "dual-encoder linear training, prediction with factor-graph "
            "constraint calibration, and ranking evaluation."
        ),
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", metavar="COMMAND")

    def common(p):
        p.add_argument("--config", metavar="FILE", help="JSON object with option defaults")

    p = sub.add_parser("weak-label", help="apply keyword rules; split topical from chatter")
    common(p)
    p.add_argument("--corpus", metavar="FILE", help="input corpus (JSONL)")
    p.add_argument("--rules", metavar="FILE", help="keyword rule file")
    p.add_argument("--topics", metavar="FILE", help="topic list (default: packaged)")
    p.add_argument("--out-topical", metavar="FILE", help="output for rule-matched documents")
    p.add_argument("--out-chatter", metavar="FILE", help="output for unmatched documents")
    p.set_defaults(handler=cmd_weak_label)

    p = sub.add_parser("split", help="author-disjoint train/dev/test split")
    common(p)
    p.add_argument("--corpus", metavar="FILE", help="input corpus (JSONL)")
    p.add_argument("--fractions", metavar="A,B,C", help="split fractions (default 0.7,0.1,0.2)")
    p.add_argument("--seed", type=int, help="shuffle seed (default 13)")
    p.add_argument("--out-train", metavar="FILE")
    p.add_argument("--out-dev", metavar="FILE")
    p.add_argument("--out-test", metavar="FILE")
    p.set_defaults(handler=cmd_split)

    p = sub.add_parser("train", help="train (or fine-tune) the dual-encoder classifier")
    common(p)
    p.add_argument("--corpus", metavar="FILE", help="training corpus (JSONL)")
    p.add_argument("--topics", metavar="FILE", help="topic list (default: packaged)")
    p.add_argument("--model", metavar="FILE", help="output model path")
    p.add_argument("--init", metavar="FILE", help="start from this pretrained model")
    p.add_argument("--label-source", choices=("gold", "weak"), help="which labels to train on")
    p.add_argument("--epochs", type=int, help="training epochs (default 5)")
    p.add_argument("--learning-rate", type=float, help="SGD step size (default 0.1)")
    p.add_argument("--dim", type=int, help="hashed feature dimension (default 262144)")
    p.add_argument("--weight-cap", type=float, help="positive-class weight cap (default 100)")
    p.add_argument("--l2", type=float, help="L2 penalty strength (default 0)")
    p.add_argument("--seed", type=int, help="shuffle seed (default 0)")
    for toggle in ("links", "media", "entities", "author"):
        p.add_argument(
            f"--use-{toggle}",
            action=argparse.BooleanOptionalAction,
            default=None,
            help=f"consume document {toggle} features (default on)",
        )
    p.set_defaults(handler=cmd_train)

    p = sub.add_parser("predict", help="write raw and calibrated probabilities per document")
    common(p)
    p.add_argument("--corpus", metavar="FILE", help="input corpus (JSONL)")
    p.add_argument("--model", metavar="FILE", help="trained model path")
    p.add_argument("--out", metavar="FILE", help="output predictions (JSONL)")
    p.add_argument("--constraints", metavar="FILE", help="constraint file for calibration")
    p.add_argument(
        "--use-constraints",
        action=argparse.BooleanOptionalAction,
        default=None,
        help="apply constraint calibration when a constraints file is given (default on)",
    )
    p.add_argument("--threads", type=int, help="parallel workers (default 1)")
    p.add_argument("--max-iters", type=int, help="BP iteration cap (default 100)")
    p.add_argument("--tolerance", type=float, help="BP convergence tolerance (default 1e-8)")
    p.add_argument("--damping", type=float, help="BP damping in [0,1) (default 0)")
    p.add_argument("--epsilon", type=float, help="probability clamp (default 1e-6)")
    p.add_argument(
        "--exact-component-limit",
        type=int,
        help="max component size for exact enumeration (default 20)",
    )
    p.set_defaults(handler=cmd_predict)

    p = sub.add_parser("evaluate", help="score predictions against gold labels")
    common(p)
    p.add_argument("--predictions", metavar="FILE", help="predictions file from 'predict'")
    p.add_argument("--corpus", metavar="FILE", help="gold-labeled corpus (JSONL)")
    p.add_argument("--constraints", metavar="FILE", help="constraint file for violation counts")
    p.add_argument("--threshold", type=float, help="firing threshold (default 0.9)")
    p.add_argument("--scores", choices=("raw", "calibrated"), help="which vector to score")
    p.add_argument("--out", metavar="FILE", help="write the JSON report here")
    p.add_argument("--table", metavar="FILE", help="write a per-topic TSV table here")
    p.set_defaults(handler=cmd_evaluate)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if getattr(args, "command", None) is None:
        parser.print_usage(sys.stderr)
        print(f"{parser.prog}: error: a subcommand is required", file=sys.stderr)
        return 1
    try:
        config = _load_config(getattr(args, "config", None))
        return args.handler(args, config)
    except _UsageError as exc:
        print(f"{parser.prog}: error: {exc}", file=sys.stderr)
        return 1
    except DataError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except NumericError as exc:
        print(f"numeric error: {exc}", file=sys.stderr)
        return 3
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def entrypoint() -> None:
    sys.exit(main())
