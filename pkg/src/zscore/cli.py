"""Batch evaluation command line.

Subcommands:

* eval      score a hypothesis file against a reference file and write a
            JSON or CSV report (CSV gets a JSON summary sidecar).
* align     print the alignment table for one utterance, as fixed-width
            text or JSON.
* tokenize  print the token list for a piece of text as JSON.

Exit codes: 0 on success, 1 for validation/contract errors (bad records,
unknown ids, malformed trees), 2 for usage and I/O errors.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

from zscore import __version__
from zscore.align import (
    AlignConfig,
    AlignmentTable,
    align,
    emit_clean,
    filter_hallucinations,
)
from zscore.errors import EngineError, ValidationError
from zscore.ingest import (
    Hypothesis,
    TaggedUtterance,
    is_punct_token,
    read_hyp,
    read_jsonl_ref,
    read_ptb_ref,
)
from zscore.score import (
    METRIC_FIELDS,
    CorpusReport,
    UtteranceScores,
    aggregate,
    e_scores,
    indicators,
    score_utterance,
    z_scores,
)
from zscore.tokenizer import tokenize


@dataclass
class RunConfig:
    """Everything one eval run depends on; echoed into the report."""

    ref: str
    hyp: str
    ref_format: str = "jsonl"  # "jsonl" | "ptb"
    hyp_mode: str = "text"  # "text" | "tokens"
    separator: str = "§"
    case: str = "sensitive"
    aggregate: str = "both"  # "macro" | "micro" | "both"
    report_format: str = "json"  # "json" | "csv"
    out: str | None = None
    emit_clean_path: str | None = None
    allow_missing_hyp: bool = False
    exclude_punct: bool = False
    workers: int = 4


def _config_echo(config: RunConfig) -> dict:
    return {
        "ref": config.ref,
        "ref_format": config.ref_format,
        "hyp": config.hyp,
        "hyp_mode": config.hyp_mode,
        "separator": config.separator,
        "case": config.case,
        "aggregate": config.aggregate,
        "format": config.report_format,
        "out": config.out,
        "emit_clean": config.emit_clean_path,
        "allow_missing_hyp": config.allow_missing_hyp,
        "exclude_punct": config.exclude_punct,
        "workers": config.workers,
    }


def _load_ref(config: RunConfig) -> list[TaggedUtterance]:
    path = Path(config.ref)
    text = path.read_text(encoding="utf-8")
    if config.ref_format == "ptb":
        return read_ptb_ref(text, id_stem=path.stem)
    if config.ref_format == "jsonl":
        return read_jsonl_ref(text.splitlines(), source_name=str(path))
    raise ValidationError(f"unknown reference format {config.ref_format!r}")


def _load_hyp(config: RunConfig) -> list[Hypothesis]:
    path = Path(config.hyp)
    lines = path.read_text(encoding="utf-8").splitlines()
    return read_hyp(lines, mode=config.hyp_mode, source_name=str(path))


def _strip_punct(refs: list[TaggedUtterance], hyps: list[Hypothesis]):
    stripped_refs = []
    for utt in refs:
        kept = [(t, g) for t, g in zip(utt.tokens, utt.tags) if not is_punct_token(t)]
        stripped_refs.append(
            TaggedUtterance(utt.id, [t for t, _ in kept], [g for _, g in kept])
        )
    stripped_hyps = [
        Hypothesis(h.id, [t for t in h.tokens if not is_punct_token(t)]) for h in hyps
    ]
    return stripped_refs, stripped_hyps


def _join(refs: list[TaggedUtterance], hyps: list[Hypothesis], allow_missing: bool):
    ref_ids = {u.id for u in refs}
    hyp_map = {h.id: h for h in hyps}
    unknown = sorted(set(hyp_map) - ref_ids)
    if unknown:
        raise ValidationError(
            f"hypothesis ids with no reference utterance: {', '.join(unknown)}"
        )
    missing = sorted(ref_ids - set(hyp_map))
    if missing and not allow_missing:
        raise ValidationError(
            "reference ids with no hypothesis (pass --allow-missing-hyp to "
            f"score them as empty): {', '.join(missing)}"
        )
    return [(u, hyp_map.get(u.id, Hypothesis(u.id, []))) for u in refs]


def run_eval(config: RunConfig) -> CorpusReport:
    """Load, join, score, and aggregate one reference/hypothesis pair.

    Scoring fans out over a bounded thread pool; results are reduced in
    id order so the report is identical regardless of worker count.
    Writes the cleaned hypotheses as JSONL when configured to.
    """
    if config.workers < 1:
        raise ValidationError("--workers must be at least 1")
    align_config = AlignConfig(separator=config.separator, case=config.case)
    refs = _load_ref(config)
    hyps = _load_hyp(config)
    if config.exclude_punct:
        refs, hyps = _strip_punct(refs, hyps)
    if not refs:
        raise ValidationError(f"{config.ref}: no reference utterances")
    pairs = _join(refs, hyps, config.allow_missing_hyp)

    def worker(pair: tuple[TaggedUtterance, Hypothesis]):
        utt, hyp = pair
        table = align(utt, hyp, align_config)
        filtered, hallucinated = filter_hallucinations(table)
        scores = UtteranceScores(
            utt_id=utt.id,
            e=e_scores(indicators(filtered)),
            z=z_scores(filtered),
            hallucinations=len(hallucinated),
        )
        return scores, emit_clean(table)

    with ThreadPoolExecutor(max_workers=config.workers) as pool:
        results = list(pool.map(worker, pairs))

    report = aggregate([scores for scores, _ in results])
    report.meta = {
        "tool": "zscore",
        "version": __version__,
        "config": _config_echo(config),
        **report.meta,
    }
    if config.emit_clean_path:
        clean = sorted(
            ((scores.utt_id, tokens) for scores, tokens in results),
            key=lambda item: item[0],
        )
        lines = [
            json.dumps({"id": utt_id, "tokens": tokens}, ensure_ascii=False)
            for utt_id, tokens in clean
        ]
        Path(config.emit_clean_path).write_text(
            "".join(line + "\n" for line in lines), encoding="utf-8"
        )
    return report


# ---------------------------------------------------------------------------
# Serialization.  Reports must be byte-identical across runs, so floats are
# always written with four decimals and key order is fixed by construction
# (NaN becomes null; counts stay plain integers).


def _emit_json(value, indent: int = 0) -> str:
    pad = "  " * indent
    inner = "  " * (indent + 1)
    if isinstance(value, dict):
        if not value:
            return "{}"
        parts = [
            f"{inner}{json.dumps(str(k))}: {_emit_json(v, indent + 1)}"
            for k, v in value.items()
        ]
        return "{\n" + ",\n".join(parts) + "\n" + pad + "}"
    if isinstance(value, list):
        if not value:
            return "[]"
        parts = [f"{inner}{_emit_json(v, indent + 1)}" for v in value]
        return "[\n" + ",\n".join(parts) + "\n" + pad + "]"
    if value is None:
        return "null"
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        return "null" if math.isnan(value) else f"{value:.4f}"
    return json.dumps(value, ensure_ascii=False)


def _utterance_record(s: UtteranceScores) -> dict:
    return {
        "id": s.utt_id,
        "e_p": s.e.precision,
        "e_r": s.e.recall,
        "e_f": s.e.f1,
        "z_edited": s.z.z_edited,
        "z_intj": s.z.z_intj,
        "z_prn": s.z.z_prn,
        "tp": s.e.tp,
        "fp": s.e.fp,
        "fn": s.e.fn,
        "tn": s.e.tn,
        "edited_removed": s.z.edited_removed,
        "edited_total": s.z.edited_total,
        "intj_removed": s.z.intj_removed,
        "intj_total": s.z.intj_total,
        "prn_removed": s.z.prn_removed,
        "prn_total": s.z.prn_total,
        "hallucinations": s.hallucinations,
    }


def _corpus_section(report: CorpusReport) -> dict:
    mode = report.meta.get("config", {}).get("aggregate", "both")
    section: dict = {}
    if mode in ("macro", "both"):
        section["macro"] = {
            name: {"mean": stat.mean, "std": stat.std, "defined_n": stat.defined_n}
            for name, stat in report.macro.items()
        }
    if mode in ("micro", "both"):
        section["micro"] = dict(report.micro)
    return section


def _report_json(report: CorpusReport) -> bytes:
    doc = {
        "meta": report.meta,
        "corpus": _corpus_section(report),
        "utterances": [_utterance_record(s) for s in report.utterances],
    }
    return (_emit_json(doc) + "\n").encode("utf-8")


CSV_COLUMNS = [
    "id", "e_p", "e_r", "e_f", "z_edited", "z_intj", "z_prn",
    "tp", "fp", "fn", "tn", "hallucinations",
]


def _csv_cell(value) -> str:
    if isinstance(value, float):
        return "" if math.isnan(value) else f"{value:.4f}"
    return str(value)


def _report_csv(report: CorpusReport) -> bytes:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for s in report.utterances:
        record = _utterance_record(s)
        writer.writerow([_csv_cell(record[c]) for c in CSV_COLUMNS])
    return buffer.getvalue().encode("utf-8")


def write_report(report: CorpusReport, fmt: str = "json") -> bytes:
    """Serialize a report: "json" (full document) or "csv" (per-utterance)."""
    if fmt == "json":
        return _report_json(report)
    if fmt == "csv":
        return _report_csv(report)
    raise ValidationError(f"unknown report format {fmt!r}")


def summary_bytes(report: CorpusReport) -> bytes:
    """Corpus-level summary (meta + aggregates) for the CSV sidecar."""
    doc = {"meta": report.meta, "corpus": _corpus_section(report)}
    return (_emit_json(doc) + "\n").encode("utf-8")


# ---------------------------------------------------------------------------
# Subcommand plumbing.


def _cmd_eval(args: argparse.Namespace) -> int:
    config = RunConfig(
        ref=args.ref,
        hyp=args.hyp,
        ref_format=args.ref_format,
        hyp_mode=args.hyp_mode,
        separator=args.separator,
        case=args.case,
        aggregate=args.aggregate,
        report_format=args.format,
        out=args.out,
        emit_clean_path=args.emit_clean,
        allow_missing_hyp=args.allow_missing_hyp,
        exclude_punct=args.exclude_punct,
        workers=args.workers,
    )
    if config.report_format == "csv" and not config.out:
        raise ValidationError("--format csv requires --out (the summary goes to <out>.summary.json)")
    report = run_eval(config)
    data = write_report(report, config.report_format)
    if config.out:
        Path(config.out).write_bytes(data)
        if config.report_format == "csv":
            Path(config.out + ".summary.json").write_bytes(summary_bytes(report))
    else:
        sys.stdout.write(data.decode("utf-8"))
    return 0


def _format_table(table: AlignmentTable) -> str:
    headers = ["gt", "tag", "hyp", "gt?", "pred?", "tp", "tn", "fp", "fn"]
    filtered, _ = filter_hallucinations(table)
    marks = {id(row): ind for row, ind in zip(filtered.rows, indicators(filtered))}
    grid = [headers]
    for row in table.rows:
        if row.hallucinated:
            grid.append([_chr(None), _chr(None), f"{row.hyp_token} *", "", "", "", "", "", ""])
        else:
            ind = marks[id(row)]
            assert row.tag is not None
            grid.append(
                [
                    _chr(row.gt_token),
                    row.tag.value,
                    _chr(row.hyp_token),
                    str(ind.gt),
                    str(ind.pred),
                    str(ind.tp),
                    str(ind.tn),
                    str(ind.fp),
                    str(ind.fn),
                ]
            )
    widths = [max(len(line[col]) for line in grid) for col in range(len(headers))]
    return "\n".join(
        "  ".join(cell.ljust(width) for cell, width in zip(line, widths)).rstrip()
        for line in grid
    )


def _chr(token: str | None) -> str:
    return token if token is not None else "-"


def _table_json(table: AlignmentTable) -> str:
    rows = [
        {
            "gt_token": row.gt_token,
            "tag": row.tag.value if row.tag is not None else None,
            "hyp_token": row.hyp_token,
            "hallucinated": row.hallucinated,
        }
        for row in table.rows
    ]
    return json.dumps({"id": table.utt_id, "rows": rows}, ensure_ascii=False)


def _cmd_align(args: argparse.Namespace) -> int:
    config = RunConfig(
        ref=args.ref,
        hyp=args.hyp,
        ref_format=args.ref_format,
        hyp_mode=args.hyp_mode,
        separator=args.separator,
        case=args.case,
        exclude_punct=args.exclude_punct,
    )
    refs = _load_ref(config)
    hyps = _load_hyp(config)
    if config.exclude_punct:
        refs, hyps = _strip_punct(refs, hyps)
    ref_map = {u.id: u for u in refs}
    hyp_map = {h.id: h for h in hyps}
    if args.id not in ref_map:
        raise ValidationError(f"utterance id {args.id!r} not found in {config.ref}")
    if args.id not in hyp_map:
        raise ValidationError(f"utterance id {args.id!r} not found in {config.hyp}")
    table = align(
        ref_map[args.id],
        hyp_map[args.id],
        AlignConfig(separator=config.separator, case=config.case),
    )
    if args.json:
        print(_table_json(table))
    else:
        print(_format_table(table))
    return 0


def _cmd_tokenize(args: argparse.Namespace) -> int:
    print(json.dumps(tokenize(args.text), ensure_ascii=False))
    return 0


def _add_io_arguments(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--ref", required=True, help="reference file")
    parser.add_argument(
        "--ref-format", choices=["jsonl", "ptb"], default="jsonl",
        help="reference input format (default: jsonl)",
    )
    parser.add_argument("--hyp", required=True, help="hypothesis JSONL file")
    parser.add_argument(
        "--hyp-mode", choices=["text", "tokens"], default="text",
        help="hypothesis records carry raw text or token arrays (default: text)",
    )
    parser.add_argument(
        "--separator", default="§",
        help="separator used to decorate disfluent tokens (default: §)",
    )
    parser.add_argument(
        "--case", choices=["sensitive", "insensitive"], default="sensitive",
        help="token comparison mode (default: sensitive)",
    )
    parser.add_argument(
        "--exclude-punct", action="store_true",
        help="drop punctuation-only tokens from both sides before aligning",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="zscore",
        description="Alignment-based scoring for speech disfluency removal.",
    )
    parser.add_argument(
        "--version", action="version", version=f"%(prog)s {__version__}"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_eval = sub.add_parser("eval", help="score a hypothesis file against a reference")
    _add_io_arguments(p_eval)
    p_eval.add_argument(
        "--aggregate", choices=["macro", "micro", "both"], default="both",
        help="which corpus aggregates to report (default: both)",
    )
    p_eval.add_argument(
        "--format", choices=["json", "csv"], default="json",
        help="report format (default: json)",
    )
    p_eval.add_argument("--out", help="write the report here instead of stdout")
    p_eval.add_argument(
        "--emit-clean", metavar="PATH",
        help="also write cleaned hypotheses (hallucinations dropped) as JSONL",
    )
    p_eval.add_argument(
        "--allow-missing-hyp", action="store_true",
        help="score reference utterances with no hypothesis as empty output",
    )
    p_eval.add_argument(
        "--workers", type=int, default=4, help="scoring thread count (default: 4)"
    )
    p_eval.set_defaults(func=_cmd_eval)

    p_align = sub.add_parser("align", help="print the alignment table for one utterance")
    _add_io_arguments(p_align)
    p_align.add_argument("--id", required=True, help="utterance id to align")
    p_align.add_argument("--json", action="store_true", help="print JSON instead of text")
    p_align.set_defaults(func=_cmd_align)

    p_tok = sub.add_parser("tokenize", help="print the token list for TEXT as JSON")
    p_tok.add_argument("text", help="text to tokenize")
    p_tok.set_defaults(func=_cmd_tokenize)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except EngineError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
