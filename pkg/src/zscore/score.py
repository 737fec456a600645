"""Removal-decision scoring on top of alignment tables.

Every non-hallucination row is a binary decision: the reference marks
the token disfluent or fluent (gt), and the system either removed it or
kept it (pred).  E-Scores are precision/recall/F1 over those decisions,
as percentages.  Z-Scores are per-category removal rates: of the tokens
tagged EDITED (or INTJ, PRN), what share did the system remove?  A
category absent from an utterance has no defined rate (NaN).
"""

from __future__ import annotations

import math
import statistics
from dataclasses import dataclass

from zscore.align import AlignConfig, AlignmentTable, align, filter_hallucinations
from zscore.errors import ValidationError
from zscore.ingest import DisfluencyTag, Hypothesis, TaggedUtterance

NAN = float("nan")


@dataclass
class IndicatorRow:
    """Binary decision view of one scored row (all fields 0 or 1)."""

    gt: int  # 1 when the reference tags this token disfluent
    pred: int  # 1 when the system removed this token
    tp: int
    tn: int
    fp: int
    fn: int


@dataclass
class EScores:
    """Word-level removal precision/recall/F1 (percent) with counts."""

    precision: float
    recall: float
    f1: float
    tp: int
    fp: int
    fn: int
    tn: int


@dataclass
class ZScores:
    """Per-category removal rates (percent; NaN when category absent)."""

    z_edited: float
    z_intj: float
    z_prn: float
    edited_removed: int
    edited_total: int
    intj_removed: int
    intj_total: int
    prn_removed: int
    prn_total: int


@dataclass
class UtteranceScores:
    """Scores for one utterance plus the counts behind them."""

    utt_id: str
    e: EScores
    z: ZScores
    hallucinations: int

    @property
    def scored_rows(self) -> int:
        return self.e.tp + self.e.fp + self.e.fn + self.e.tn


@dataclass
class MacroStat:
    """Mean and sample standard deviation over defined per-utterance values."""

    mean: float
    std: float
    defined_n: int


@dataclass
class CorpusReport:
    """Per-utterance scores plus macro and micro corpus aggregates."""

    utterances: list[UtteranceScores]
    macro: dict[str, MacroStat]
    micro: dict[str, float | int]
    meta: dict


def _require_filtered(table: AlignmentTable) -> None:
    if any(row.hallucinated for row in table.rows):
        raise ValidationError(
            f"utterance {table.utt_id!r}: hallucination rows must be filtered "
            "out before scoring"
        )


def indicators(table: AlignmentTable) -> list[IndicatorRow]:
    """Turn a filtered table into exclusive per-row decision indicators."""
    _require_filtered(table)
    rows = []
    for row in table.rows:
        gt = int(row.tag is not DisfluencyTag.NONE)
        pred = int(row.hyp_token is None)
        rows.append(
            IndicatorRow(
                gt=gt,
                pred=pred,
                tp=gt & pred,
                tn=(1 - gt) & (1 - pred),
                fp=(1 - gt) & pred,
                fn=gt & (1 - pred),
            )
        )
    return rows


def _pct(numerator: int, denominator: int, *, vacuous: float) -> float:
    if denominator == 0:
        return vacuous
    return 100.0 * numerator / denominator


def _e_from_counts(tp: int, fp: int, fn: int, tn: int) -> EScores:
    # No positive predictions / no positive references counts as a
    # perfect 100 (nothing was done wrong), so an all-fluent utterance
    # with an untouched hypothesis scores perfectly rather than crashing.
    precision = _pct(tp, tp + fp, vacuous=100.0)
    recall = _pct(tp, tp + fn, vacuous=100.0)
    if precision + recall == 0.0:
        f1 = 0.0
    else:
        f1 = 2.0 * precision * recall / (precision + recall)
    return EScores(precision, recall, f1, tp, fp, fn, tn)


def e_scores(rows: list[IndicatorRow]) -> EScores:
    """Aggregate indicator rows into removal precision/recall/F1."""
    tp = sum(r.tp for r in rows)
    fp = sum(r.fp for r in rows)
    fn = sum(r.fn for r in rows)
    tn = sum(r.tn for r in rows)
    return _e_from_counts(tp, fp, fn, tn)


def _z_from_counts(removed: dict[DisfluencyTag, int], total: dict[DisfluencyTag, int]) -> ZScores:
    def rate(tag: DisfluencyTag) -> float:
        return _pct(removed[tag], total[tag], vacuous=NAN)

    return ZScores(
        z_edited=rate(DisfluencyTag.EDITED),
        z_intj=rate(DisfluencyTag.INTJ),
        z_prn=rate(DisfluencyTag.PRN),
        edited_removed=removed[DisfluencyTag.EDITED],
        edited_total=total[DisfluencyTag.EDITED],
        intj_removed=removed[DisfluencyTag.INTJ],
        intj_total=total[DisfluencyTag.INTJ],
        prn_removed=removed[DisfluencyTag.PRN],
        prn_total=total[DisfluencyTag.PRN],
    )


def z_scores(table: AlignmentTable) -> ZScores:
    """Per-category removal rates for one filtered table."""
    _require_filtered(table)
    removed = {tag: 0 for tag in DisfluencyTag}
    total = {tag: 0 for tag in DisfluencyTag}
    for row in table.rows:
        assert row.tag is not None
        total[row.tag] += 1
        if row.hyp_token is None:
            removed[row.tag] += 1
    return _z_from_counts(removed, total)


def score_utterance(
    utt: TaggedUtterance, hyp: Hypothesis, config: AlignConfig | None = None
) -> UtteranceScores:
    """Align one utterance pair and score the result."""
    table = align(utt, hyp, config)
    filtered, hallucinated = filter_hallucinations(table)
    return UtteranceScores(
        utt_id=utt.id,
        e=e_scores(indicators(filtered)),
        z=z_scores(filtered),
        hallucinations=len(hallucinated),
    )


# Metric extractors shared by macro aggregation and serialization.
METRIC_FIELDS = {
    "e_p": lambda s: s.e.precision,
    "e_r": lambda s: s.e.recall,
    "e_f": lambda s: s.e.f1,
    "z_edited": lambda s: s.z.z_edited,
    "z_intj": lambda s: s.z.z_intj,
    "z_prn": lambda s: s.z.z_prn,
}


def _macro_stat(values: list[float]) -> MacroStat:
    defined = [v for v in values if not math.isnan(v)]
    if not defined:
        return MacroStat(NAN, NAN, 0)
    mean = statistics.fmean(defined)
    std = statistics.stdev(defined) if len(defined) >= 2 else NAN
    return MacroStat(mean, std, len(defined))


def aggregate(per_utt: list[UtteranceScores]) -> CorpusReport:
    """Combine per-utterance scores into macro and micro corpus views.

    Macro: unweighted mean (and sample standard deviation, n-1) of each
    metric over the utterances where it is defined, with the defined
    count reported alongside.  Micro: the metric formulas applied to
    summed counts, so long utterances weigh more.  Utterances are sorted
    by id so the report order never depends on input order.
    """
    scores = sorted(per_utt, key=lambda s: s.utt_id)
    macro = {
        name: _macro_stat([extract(s) for s in scores])
        for name, extract in METRIC_FIELDS.items()
    }
    e = _e_from_counts(
        tp=sum(s.e.tp for s in scores),
        fp=sum(s.e.fp for s in scores),
        fn=sum(s.e.fn for s in scores),
        tn=sum(s.e.tn for s in scores),
    )
    removed = {
        DisfluencyTag.EDITED: sum(s.z.edited_removed for s in scores),
        DisfluencyTag.INTJ: sum(s.z.intj_removed for s in scores),
        DisfluencyTag.PRN: sum(s.z.prn_removed for s in scores),
        DisfluencyTag.NONE: 0,
    }
    total = {
        DisfluencyTag.EDITED: sum(s.z.edited_total for s in scores),
        DisfluencyTag.INTJ: sum(s.z.intj_total for s in scores),
        DisfluencyTag.PRN: sum(s.z.prn_total for s in scores),
        DisfluencyTag.NONE: 0,
    }
    z = _z_from_counts(removed, total)
    # A zero-utterance report has nothing to claim: every aggregate is NaN
    # (unlike a present-but-trivial utterance, which scores a vacuous 100).
    empty = not scores
    micro: dict[str, float | int] = {
        "e_p": NAN if empty else e.precision,
        "e_r": NAN if empty else e.recall,
        "e_f": NAN if empty else e.f1,
        "z_edited": z.z_edited,
        "z_intj": z.z_intj,
        "z_prn": z.z_prn,
        "tp": e.tp,
        "fp": e.fp,
        "fn": e.fn,
        "tn": e.tn,
        "edited_removed": z.edited_removed,
        "edited_total": z.edited_total,
        "intj_removed": z.intj_removed,
        "intj_total": z.intj_total,
        "prn_removed": z.prn_removed,
        "prn_total": z.prn_total,
    }
    meta = {
        "utterances": len(scores),
        "rows": sum(s.scored_rows for s in scores),
        "hallucinations": sum(s.hallucinations for s in scores),
        "empty_utterances": sum(1 for s in scores if s.scored_rows == 0),
        "std_estimator": "sample (n-1)",
    }
    return CorpusReport(scores, macro, micro, meta)
