"""Deterministic evaluation engine for speech disfluency removal.

The package aligns disfluency-tagged reference transcripts with system
output, derives word-level removal decisions from the alignment, and
reports E-Scores (precision/recall/F1 over removal decisions) plus
per-category Z-Scores (removal rates for EDITED / INTJ / PRN spans).
"""

__version__ = "0.1.0"

from zscore.tokenizer import TokenSeq, tokenize
from zscore.errors import EngineError, InputError, ParseError, ValidationError
from zscore.ingest import (
    DisfluencyTag,
    Hypothesis,
    ParseTree,
    TaggedUtterance,
    extract_tagged,
    parse_ptb,
    read_hyp,
    read_jsonl_ref,
    read_ptb_ref,
)
from zscore.align import (
    AlignConfig,
    AlignmentRow,
    AlignmentTable,
    Opcode,
    align,
    align_plain,
    decorate,
    emit_clean,
    filter_hallucinations,
    gestalt_opcodes,
    max_matching_opcodes,
    resolve_replace,
)
from zscore.score import (
    EScores,
    UtteranceScores,
    ZScores,
    aggregate,
    e_scores,
    indicators,
    score_utterance,
    z_scores,
)
from zscore.cli import RunConfig, run_eval, write_report

__all__ = [
    "AlignConfig",
    "AlignmentRow",
    "AlignmentTable",
    "DisfluencyTag",
    "EScores",
    "EngineError",
    "Hypothesis",
    "InputError",
    "Opcode",
    "ParseError",
    "ParseTree",
    "RunConfig",
    "TaggedUtterance",
    "TokenSeq",
    "UtteranceScores",
    "ValidationError",
    "ZScores",
    "aggregate",
    "align",
    "align_plain",
    "decorate",
    "e_scores",
    "emit_clean",
    "extract_tagged",
    "filter_hallucinations",
    "gestalt_opcodes",
    "indicators",
    "max_matching_opcodes",
    "parse_ptb",
    "read_hyp",
    "read_jsonl_ref",
    "read_ptb_ref",
    "resolve_replace",
    "run_eval",
    "score_utterance",
    "tokenize",
    "write_report",
    "z_scores",
    "__version__",
]
