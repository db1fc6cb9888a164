"""Command-line interface.

One binary, subcommand style: validate, stats, postprocess, evaluate,
train-crf, tag-crf. Behavior comes from an optional JSON config file
(--config, or the BIONERKIT_CONFIG environment variable) with sections

    {"joiner": "", "offset_convention": null,
     "pipeline": {...}, "train": {...}, "evaluate": {"policy": "all_13"}}

and flags override the file. Every command that writes an output file
also writes ``<output>.manifest.json`` recording the command line,
config digest, input digests, tool version, and timestamp, so a run can
be reproduced; outputs themselves are deterministic.

Exit codes: 0 success; 1 validation violations found; 2 usage; 3
unreadable/missing file; 4 malformed corpus or model file; 5 bad
configuration; 6 data contract errors (ground-truth input to the
pipeline, predictions for unknown documents, empty training set).
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Sequence

from . import __version__
from .corpus import validate_document
from .crf.model import (
    ModelFormatError,
    TrainConfig,
    load_model,
    predict_spans,
    save_model,
    train,
)
from .evaluation import (
    EvaluationError,
    MacroPolicy,
    evaluate_corpus,
    format_report,
    report_to_json,
)
from .io import (
    CorpusFile,
    CorpusFormatError,
    CoordinateSpace,
    Provenance,
    format_label_counts,
    label_counts,
    read_corpus,
    write_corpus,
    write_predictions,
)
from .postprocess import (
    PipelineConfigError,
    ProvenanceError,
    RulePipeline,
    run_pipeline,
    write_trace,
)

EXIT_OK = 0
EXIT_VIOLATIONS = 1
EXIT_USAGE = 2
EXIT_IO = 3
EXIT_FORMAT = 4
EXIT_CONFIG = 5
EXIT_DATA = 6

CONFIG_ENV_VAR = "BIONERKIT_CONFIG"

_CONFIG_SECTIONS = {"joiner", "offset_convention", "pipeline", "train", "evaluate"}


class _CliError(Exception):
    def __init__(self, exit_code: int, message: str) -> None:
        super().__init__(message)
        self.exit_code = exit_code


def _load_tool_config(path: str | None) -> tuple[dict[str, Any], Path | None]:
    """Resolve the tool config: flag > environment > none."""
    resolved = path or os.environ.get(CONFIG_ENV_VAR)
    if not resolved:
        return {}, None
    try:
        raw = Path(resolved).read_text(encoding="utf-8")
    except OSError as exc:
        raise _CliError(EXIT_CONFIG, f"cannot read config {resolved}: {exc}") from None
    try:
        config = json.loads(raw)
    except json.JSONDecodeError as exc:
        raise _CliError(EXIT_CONFIG, f"config {resolved} is not valid JSON: {exc}") from None
    if not isinstance(config, dict):
        raise _CliError(EXIT_CONFIG, f"config {resolved}: top level must be an object")
    unknown = set(config) - _CONFIG_SECTIONS
    if unknown:
        raise _CliError(EXIT_CONFIG, f"config {resolved}: unknown sections {sorted(unknown)}")
    return config, Path(resolved)


def _read_corpus(path: str, convention: str | None, joiner: str, validate: bool = True) -> CorpusFile:
    try:
        with open(path, "rb") as fh:
            data = fh.read()
    except OSError as exc:
        raise _CliError(EXIT_IO, f"cannot read {path}: {exc}") from None
    from .io import parse_corpus

    try:
        return parse_corpus(data, convention=convention, default_joiner=joiner, validate=validate)
    except CorpusFormatError as exc:
        raise _CliError(EXIT_FORMAT, f"{path}: {exc}") from None


def _digest_file(path: str) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(65536), b""):
            h.update(chunk)
    return h.hexdigest()


def _write_manifest(
    out_path: str,
    *,
    argv: Sequence[str],
    config_path: Path | None,
    inputs: Sequence[str],
    outputs: Sequence[str],
) -> None:
    manifest = {
        "command": ["bionerkit", *argv],
        "tool_version": __version__,
        "timestamp_utc": datetime.now(timezone.utc).isoformat(),
        "config_path": str(config_path) if config_path else None,
        "config_digest": _digest_file(str(config_path)) if config_path else None,
        "input_digests": {path: _digest_file(path) for path in inputs},
        "output_paths": list(outputs),
    }
    Path(f"{out_path}.manifest.json").write_text(
        json.dumps(manifest, ensure_ascii=False, indent=2) + "\n", encoding="utf-8"
    )


def _effective_joiner(args: argparse.Namespace, config: dict[str, Any]) -> str:
    if getattr(args, "joiner", None) is not None:
        return args.joiner
    joiner = config.get("joiner", "")
    if not isinstance(joiner, str):
        raise _CliError(EXIT_CONFIG, "config: joiner must be a string")
    return joiner


def _effective_convention(args: argparse.Namespace, config: dict[str, Any]) -> str | None:
    if getattr(args, "offset_convention", None) is not None:
        return args.offset_convention
    conv = config.get("offset_convention")
    if conv is not None and conv not in ("half_open", "inclusive"):
        raise _CliError(EXIT_CONFIG, f"config: unknown offset_convention {conv!r}")
    return conv


def _cmd_validate(args: argparse.Namespace, config: dict[str, Any], _: Path | None) -> int:
    corpus = _read_corpus(
        args.corpus,
        _effective_convention(args, config),
        _effective_joiner(args, config),
        validate=False,
    )
    violations = []
    for doc in corpus.documents.values():
        violations.extend(validate_document(doc, corpus.joiner))
    for v in violations:
        print(v)
    if violations:
        print(f"{len(violations)} violation(s) in {args.corpus}")
        return EXIT_VIOLATIONS
    print(f"{args.corpus}: {len(corpus.documents)} document(s), {corpus.mention_count()} mention(s), no violations")
    return EXIT_OK


def _cmd_stats(args: argparse.Namespace, config: dict[str, Any], config_path: Path | None) -> int:
    corpus = _read_corpus(
        args.corpus, _effective_convention(args, config), _effective_joiner(args, config)
    )
    report = label_counts(corpus)
    print(format_label_counts(report))
    if args.report_out:
        payload = {
            "total": report.total,
            "counts": {lab.value: n for lab, n in report.counts.items()},
            "shares": {lab.value: share for lab, share in report.shares.items()},
        }
        Path(args.report_out).write_text(
            json.dumps(payload, ensure_ascii=False, indent=2) + "\n", encoding="utf-8"
        )
        _write_manifest(
            args.report_out,
            argv=args.argv,
            config_path=config_path,
            inputs=[args.corpus],
            outputs=[args.report_out],
        )
    return EXIT_OK


def _cmd_postprocess(args: argparse.Namespace, config: dict[str, Any], config_path: Path | None) -> int:
    corpus = _read_corpus(
        args.predictions, _effective_convention(args, config), _effective_joiner(args, config)
    )
    pipeline_config = config.get("pipeline", {})
    if not isinstance(pipeline_config, dict):
        raise _CliError(EXIT_CONFIG, "config: pipeline section must be an object")
    base_dir = config_path.parent if config_path else Path(".")
    try:
        pipeline = RulePipeline.from_config(
            pipeline_config, base_dir=base_dir, enable_merge=args.enable_merge
        )
    except PipelineConfigError as exc:
        raise _CliError(EXIT_CONFIG, f"pipeline config: {exc}") from None
    try:
        result = run_pipeline(corpus, pipeline)
    except ProvenanceError as exc:
        raise _CliError(EXIT_DATA, str(exc)) from None
    except PipelineConfigError as exc:
        raise _CliError(EXIT_CONFIG, str(exc)) from None
    if result.corpus.coordinate_space is CoordinateSpace.PER_FIELD and "strip_scores" in pipeline.rules:
        out_bytes = write_predictions(result.corpus)
    else:
        # A config that skips localize or strip_scores is not finalized
        # output; write it as-is instead of forcing the full contract.
        out_bytes = write_corpus(result.corpus)
    Path(args.out).write_bytes(out_bytes)
    outputs = [args.out]
    if args.trace_out:
        Path(args.trace_out).write_bytes(write_trace(result.trace))
        outputs.append(args.trace_out)
    _write_manifest(
        args.out,
        argv=args.argv,
        config_path=config_path,
        inputs=[args.predictions],
        outputs=outputs,
    )
    print(
        f"{args.predictions}: {len(result.trace)} change(s) across"
        f" {len(result.corpus.documents)} document(s) -> {args.out}"
    )
    return EXIT_OK


def _cmd_evaluate(args: argparse.Namespace, config: dict[str, Any], config_path: Path | None) -> int:
    convention = _effective_convention(args, config)
    joiner = _effective_joiner(args, config)
    gold = _read_corpus(args.gold, convention, joiner)
    pred = _read_corpus(args.predictions, convention, joiner)
    eval_config = config.get("evaluate", {})
    if not isinstance(eval_config, dict):
        raise _CliError(EXIT_CONFIG, "config: evaluate section must be an object")
    policy_name = args.policy or eval_config.get("policy", MacroPolicy.ALL_13.value)
    try:
        policy = MacroPolicy(policy_name)
    except ValueError:
        raise _CliError(EXIT_CONFIG, f"unknown macro policy {policy_name!r}") from None
    try:
        report = evaluate_corpus(gold, pred, policy)
    except EvaluationError as exc:
        raise _CliError(EXIT_DATA, str(exc)) from None
    print(format_report(report))
    if args.report_out:
        Path(args.report_out).write_text(
            json.dumps(report_to_json(report), ensure_ascii=False, indent=2) + "\n",
            encoding="utf-8",
        )
        _write_manifest(
            args.report_out,
            argv=args.argv,
            config_path=config_path,
            inputs=[args.gold, args.predictions],
            outputs=[args.report_out],
        )
    return EXIT_OK


def _train_config(args: argparse.Namespace, config: dict[str, Any]) -> TrainConfig:
    section = config.get("train", {})
    if not isinstance(section, dict):
        raise _CliError(EXIT_CONFIG, "config: train section must be an object")
    known = {"l2_strength", "max_iterations", "tolerance", "learning_rate", "seed"}
    unknown = set(section) - known
    if unknown:
        raise _CliError(EXIT_CONFIG, f"config: unknown train keys {sorted(unknown)}")
    merged = dict(section)
    if args.seed is not None:
        merged["seed"] = args.seed
    try:
        return TrainConfig(**merged)
    except (TypeError, ValueError) as exc:
        raise _CliError(EXIT_CONFIG, f"train config: {exc}") from None


def _cmd_train_crf(args: argparse.Namespace, config: dict[str, Any], config_path: Path | None) -> int:
    convention = _effective_convention(args, config)
    joiner = _effective_joiner(args, config)
    train_config = _train_config(args, config)  # before any file reads: fail fast
    docs = {}
    for path in args.train:
        corpus = _read_corpus(path, convention, joiner)
        for doc_id, doc in corpus.documents.items():
            if doc_id in docs:
                print(f"warning: duplicate doc_id {doc_id} in {path}; keeping first", file=sys.stderr)
                continue
            docs[doc_id] = doc
    try:
        model = train(docs.values(), train_config, joiner=joiner)
    except ValueError as exc:
        raise _CliError(EXIT_DATA, str(exc)) from None
    save_model(model, args.model_out)
    _write_manifest(
        args.model_out,
        argv=args.argv,
        config_path=config_path,
        inputs=list(args.train),
        outputs=[args.model_out],
    )
    meta = model.meta
    print(
        f"trained on {meta['sentences']} sentence(s) from {len(docs)} document(s);"
        f" {meta['iterations']} iteration(s), converged={meta['converged']} -> {args.model_out}"
    )
    return EXIT_OK


def _cmd_tag_crf(args: argparse.Namespace, config: dict[str, Any], config_path: Path | None) -> int:
    joiner = _effective_joiner(args, config)
    try:
        model = load_model(args.model)
    except OSError as exc:
        raise _CliError(EXIT_IO, f"cannot read {args.model}: {exc}") from None
    except ModelFormatError as exc:
        raise _CliError(EXIT_FORMAT, f"{args.model}: {exc}") from None
    corpus = _read_corpus(args.corpus, _effective_convention(args, config), joiner)
    tagged = {
        doc_id: predict_spans(model, doc.document, joiner=joiner)
        for doc_id, doc in corpus.documents.items()
    }
    out_corpus = CorpusFile(tagged, Provenance.PREDICTION, CoordinateSpace.COMBINED, joiner)
    Path(args.out).write_bytes(write_corpus(out_corpus))
    _write_manifest(
        args.out,
        argv=args.argv,
        config_path=config_path,
        inputs=[args.model, args.corpus],
        outputs=[args.out],
    )
    total = sum(len(d.mentions) for d in tagged.values())
    print(f"tagged {len(tagged)} document(s), {total} mention(s) -> {args.out}")
    return EXIT_OK


def _add_common_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help=f"JSON config file (default: ${CONFIG_ENV_VAR})")
    parser.add_argument("--joiner", help="text between title and abstract (default from config, else '')")
    parser.add_argument(
        "--offset-convention",
        choices=["half_open", "inclusive"],
        help="override the input files' end-offset convention",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="bionerkit",
        description="Corpus validation, prediction post-processing, exact-match scoring, and CRF tagging for biomedical entity mentions.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="check a corpus file against every invariant")
    p.add_argument("corpus")
    _add_common_flags(p)
    p.set_defaults(func=_cmd_validate)

    p = sub.add_parser("stats", help="per-label mention counts")
    p.add_argument("corpus")
    p.add_argument("--report-out", help="also write the counts as JSON")
    _add_common_flags(p)
    p.set_defaults(func=_cmd_stats)

    p = sub.add_parser("postprocess", help="run the correction pipeline over predictions")
    p.add_argument("predictions")
    p.add_argument("--out", required=True, help="where to write the corrected predictions")
    p.add_argument("--trace-out", help="where to write the change trace (JSON lines)")
    p.add_argument("--enable-merge", action="store_true", help="merge adjacent same-label fragments")
    _add_common_flags(p)
    p.set_defaults(func=_cmd_postprocess)

    p = sub.add_parser("evaluate", help="score predictions against gold annotations")
    p.add_argument("gold")
    p.add_argument("predictions")
    p.add_argument("--policy", choices=[m.value for m in MacroPolicy], help="macro averaging policy")
    p.add_argument("--report-out", help="also write the report as JSON")
    _add_common_flags(p)
    p.set_defaults(func=_cmd_evaluate)

    p = sub.add_parser("train-crf", help="train the CRF tagger on annotated corpora")
    p.add_argument("train", nargs="+", help="training corpus file(s), concatenated")
    p.add_argument("--model-out", required=True)
    p.add_argument("--seed", type=int, help="recorded in model metadata")
    _add_common_flags(p)
    p.set_defaults(func=_cmd_train_crf)

    p = sub.add_parser("tag-crf", help="tag a corpus with a trained CRF model")
    p.add_argument("model")
    p.add_argument("corpus")
    p.add_argument("--out", required=True, help="where to write the predictions")
    _add_common_flags(p)
    p.set_defaults(func=_cmd_tag_crf)

    return parser


def main(argv: Sequence[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    args = parser.parse_args(argv)
    args.argv = argv
    try:
        config, config_path = _load_tool_config(args.config)
        return args.func(args, config, config_path)
    except _CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code


if __name__ == "__main__":
    sys.exit(main())
