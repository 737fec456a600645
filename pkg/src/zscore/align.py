"""Alignment of tagged references against system hypotheses.

The aligner decides, for every reference token, whether the system kept
or removed it, and flags hypothesis tokens that match nothing in the
reference (hallucinations).  Two ideas make this reliable:

* Tag decoration.  Disfluent reference tokens are rewritten as
  token + separator + tag ("the§EDITED") before matching, so a disfluent
  copy of a word can never steal the match from an identical fluent copy
  later in the utterance.  Plain sequence matching gets this wrong: for
  reference [the/EDITED, the/NONE, cat/NONE] and hypothesis [the] it
  pairs the EDITED copy and reports a spurious removal of the fluent one.

* Maximum monotonic matching.  Decorated reference tokens are matched
  against hypothesis tokens with an order-preserving matcher that is
  guaranteed to pair as many fluent tokens as any monotonic alignment
  can.  Greedy longest-block matching (gestalt_opcodes, kept here as the
  unmodified control) can drop matches: for [d, d, c] (all fluent) vs
  [d, c, d, c] it pairs only 2 tokens where 3 are achievable.

Matched-block structure is reported as difflib-style opcodes; replace
blocks are resolved token-by-token with a deterministic two-pass rule
that prefers fluent matches.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from difflib import SequenceMatcher

from zscore.errors import ValidationError
from zscore.ingest import DisfluencyTag, Hypothesis, TaggedUtterance
from zscore.tokenizer import TokenSeq

DEFAULT_SEPARATOR = "§"


@dataclass
class AlignConfig:
    """Alignment options shared by every stage of a run."""

    separator: str = DEFAULT_SEPARATOR
    case: str = "sensitive"  # "sensitive" | "insensitive"

    def __post_init__(self) -> None:
        if not self.separator:
            raise ValidationError("separator must be non-empty")
        if self.case not in ("sensitive", "insensitive"):
            raise ValidationError(f"case must be 'sensitive' or 'insensitive', got {self.case!r}")


def _key_fn(case_mode: str):
    if case_mode == "sensitive":
        return lambda token: token
    if case_mode == "insensitive":
        return lambda token: token.lower()
    raise ValidationError(f"case must be 'sensitive' or 'insensitive', got {case_mode!r}")


@dataclass
class Opcode:
    """Half-open range pair describing one aligned block, difflib-style."""

    kind: str  # "equal" | "replace" | "delete" | "insert"
    a_start: int
    a_end: int
    b_start: int
    b_end: int


@dataclass
class AlignmentRow:
    """One table row: a reference token, a hypothesis token, or a pair.

    Hallucination rows (hallucinated=True) carry only a hypothesis token;
    all other rows carry a reference token and its tag, with hyp_token
    None when the system removed the token.
    """

    gt_token: str | None
    tag: DisfluencyTag | None
    hyp_token: str | None
    hallucinated: bool = False

    def __post_init__(self) -> None:
        if self.hallucinated:
            if self.gt_token is not None or self.tag is not None or self.hyp_token is None:
                raise ValidationError("hallucination rows carry exactly a hypothesis token")
        elif self.gt_token is None or self.tag is None:
            raise ValidationError("non-hallucination rows need a reference token and tag")


@dataclass
class AlignmentTable:
    """All rows for one utterance, reference order preserved."""

    utt_id: str
    rows: list[AlignmentRow] = field(default_factory=list)


def gestalt_opcodes(a: TokenSeq, b: TokenSeq) -> list[Opcode]:
    """Greedy longest-block opcodes (the unmodified matcher, "G").

    Recursively takes the longest common contiguous block (ties: earliest
    in a, then earliest in b) and labels the leftovers replace/delete/
    insert.  No junk heuristic: every token participates.
    """
    matcher = SequenceMatcher(None, list(a), list(b), autojunk=False)
    return [Opcode(kind, i1, i2, j1, j2) for kind, i1, i2, j1, j2 in matcher.get_opcodes()]


def max_matching_opcodes(a: TokenSeq, b: TokenSeq) -> list[Opcode]:
    """Opcodes built from a maximum order-preserving token matching.

    Among all monotonic matchings of equal tokens, this one has maximum
    size — no alignment-based metric can be short-changed by an unlucky
    block choice.  Deterministic tie-break: walk both sequences from the
    left, keep a pair whenever doing so still permits a maximum matching,
    otherwise keep the earlier a-token alive in preference to skipping
    it.  Matched pairs are coalesced into equal blocks; gaps become
    replace/delete/insert exactly as in gestalt_opcodes.
    """
    n, m = len(a), len(b)
    # best[i][j] = size of a maximum matching between a[i:] and b[j:]
    best = [[0] * (m + 1) for _ in range(n + 1)]
    for i in range(n - 1, -1, -1):
        row, below = best[i], best[i + 1]
        ai = a[i]
        for j in range(m - 1, -1, -1):
            score = below[j] if below[j] >= row[j + 1] else row[j + 1]
            if ai == b[j] and below[j + 1] + 1 > score:
                score = below[j + 1] + 1
            row[j] = score
    pairs: list[tuple[int, int]] = []
    i = j = 0
    while i < n and j < m:
        if a[i] == b[j] and best[i][j] == best[i + 1][j + 1] + 1:
            pairs.append((i, j))
            i += 1
            j += 1
        elif best[i][j + 1] == best[i][j]:
            j += 1
        else:
            i += 1
    return _pairs_to_opcodes(pairs, n, m)


def _gap_opcode(a_start: int, a_end: int, b_start: int, b_end: int) -> Opcode | None:
    if a_start < a_end and b_start < b_end:
        return Opcode("replace", a_start, a_end, b_start, b_end)
    if a_start < a_end:
        return Opcode("delete", a_start, a_end, b_start, b_end)
    if b_start < b_end:
        return Opcode("insert", a_start, a_end, b_start, b_end)
    return None


def _pairs_to_opcodes(pairs: list[tuple[int, int]], n: int, m: int) -> list[Opcode]:
    ops: list[Opcode] = []
    ai = bi = 0
    k = 0
    while k < len(pairs):
        run = 1
        while (
            k + run < len(pairs)
            and pairs[k + run] == (pairs[k][0] + run, pairs[k][1] + run)
        ):
            run += 1
        i, j = pairs[k]
        gap = _gap_opcode(ai, i, bi, j)
        if gap:
            ops.append(gap)
        ops.append(Opcode("equal", i, i + run, j, j + run))
        ai, bi = i + run, j + run
        k += run
    gap = _gap_opcode(ai, n, bi, m)
    if gap:
        ops.append(gap)
    return ops


def decorate(utt: TaggedUtterance, separator: str = DEFAULT_SEPARATOR) -> TokenSeq:
    """Append separator+tag to each disfluent token ("the" -> "the§EDITED").

    Fluent (NONE) tokens pass through unchanged.  Raises ValidationError
    if the separator already occurs in any reference token, since that
    would let an undecorated token collide with a decorated one.
    """
    for token in utt.tokens:
        if separator in token:
            raise ValidationError(
                f"utterance {utt.id!r}: token {token!r} contains the separator "
                f"{separator!r}; choose a different --separator"
            )
    return [
        token if tag is DisfluencyTag.NONE else f"{token}{separator}{tag.value}"
        for token, tag in zip(utt.tokens, utt.tags)
    ]


def resolve_replace(
    gt_block: list[tuple[str, DisfluencyTag]],
    hyp_block: TokenSeq,
    case_mode: str = "sensitive",
) -> list[AlignmentRow]:
    """Resolve one replace block into rows (deterministic two passes).

    Pass 1 walks hypothesis tokens left to right and pairs each with the
    earliest unmatched *fluent* (NONE) reference token of equal surface
    form that keeps the matching monotonic; pass 2 repeats for the
    remaining hypothesis tokens against disfluency-tagged reference
    tokens.  Unmatched reference tokens become removal rows (hyp None);
    unmatched hypothesis tokens become hallucination rows, placed after
    the reference tokens they were skipped over.
    """
    key = _key_fn(case_mode)
    n, m = len(gt_block), len(hyp_block)
    gt_matched: list[bool] = [False] * n
    pairs: list[tuple[int, int]] = []  # (gt index, hyp index), kept sorted
    for disfluent_pass in (False, True):
        for j in range(m):
            if any(h == j for _, h in pairs):
                continue
            lo = max((g for g, h in pairs if h < j), default=-1)
            hi = min((g for g, h in pairs if h > j), default=n)
            for g in range(lo + 1, hi):
                token, tag = gt_block[g]
                if gt_matched[g] or (tag is not DisfluencyTag.NONE) != disfluent_pass:
                    continue
                if key(token) == key(hyp_block[j]):
                    gt_matched[g] = True
                    pairs.append((g, j))
                    pairs.sort()
                    break
    rows: list[AlignmentRow] = []
    gi = hj = 0
    for g, j in [*pairs, (n, m)]:
        for gg in range(gi, g):
            token, tag = gt_block[gg]
            rows.append(AlignmentRow(token, tag, None))
        for jj in range(hj, j):
            rows.append(AlignmentRow(None, None, hyp_block[jj], hallucinated=True))
        if g < n:
            token, tag = gt_block[g]
            rows.append(AlignmentRow(token, tag, hyp_block[j]))
        gi, hj = g + 1, j + 1
    return rows


def _emit_rows(
    utt: TaggedUtterance,
    hyp: Hypothesis,
    opcodes: list[Opcode],
    case_mode: str,
) -> list[AlignmentRow]:
    rows: list[AlignmentRow] = []
    for op in opcodes:
        if op.kind == "equal":
            for i, j in zip(range(op.a_start, op.a_end), range(op.b_start, op.b_end)):
                rows.append(AlignmentRow(utt.tokens[i], utt.tags[i], hyp.tokens[j]))
        elif op.kind == "delete":
            for i in range(op.a_start, op.a_end):
                rows.append(AlignmentRow(utt.tokens[i], utt.tags[i], None))
        elif op.kind == "insert":
            for j in range(op.b_start, op.b_end):
                rows.append(AlignmentRow(None, None, hyp.tokens[j], hallucinated=True))
        else:
            gt_block = [(utt.tokens[i], utt.tags[i]) for i in range(op.a_start, op.a_end)]
            rows.extend(resolve_replace(gt_block, hyp.tokens[op.b_start : op.b_end], case_mode))
    return rows


def _check_pair(utt: TaggedUtterance, hyp: Hypothesis) -> None:
    if utt.id != hyp.id:
        raise ValidationError(
            f"utterance id mismatch: reference {utt.id!r} vs hypothesis {hyp.id!r}"
        )


def align(utt: TaggedUtterance, hyp: Hypothesis, config: AlignConfig | None = None) -> AlignmentTable:
    """Align one reference utterance with its hypothesis.

    Pipeline: decorate disfluent tokens, run the maximum-matching opcode
    builder over the decorated reference and the hypothesis, then emit
    rows (replace blocks via resolve_replace).  Decorated tokens can
    never equal a hypothesis token, so every matched pair is fluent.
    """
    config = config or AlignConfig()
    _check_pair(utt, hyp)
    for token in hyp.tokens:
        if config.separator in token:
            raise ValidationError(
                f"utterance {hyp.id!r}: hypothesis token {token!r} contains the "
                f"separator {config.separator!r}; choose a different --separator"
            )
    key = _key_fn(config.case)
    a_keys = [key(t) for t in decorate(utt, config.separator)]
    b_keys = [key(t) for t in hyp.tokens]
    opcodes = max_matching_opcodes(a_keys, b_keys)
    return AlignmentTable(utt.id, _emit_rows(utt, hyp, opcodes, config.case))


def align_plain(utt: TaggedUtterance, hyp: Hypothesis, config: AlignConfig | None = None) -> AlignmentTable:
    """Align with the unmodified greedy matcher and no decoration.

    This is the control path: it reproduces the failure mode the
    decorated pipeline exists to fix (a disfluent copy of a repeated
    word can steal the match), so tests and diagnostics can demonstrate
    the difference on identical inputs.
    """
    config = config or AlignConfig()
    _check_pair(utt, hyp)
    key = _key_fn(config.case)
    a_keys = [key(t) for t in utt.tokens]
    b_keys = [key(t) for t in hyp.tokens]
    opcodes = gestalt_opcodes(a_keys, b_keys)
    return AlignmentTable(utt.id, _emit_rows(utt, hyp, opcodes, config.case))


def filter_hallucinations(table: AlignmentTable) -> tuple[AlignmentTable, TokenSeq]:
    """Split a table into (rows to score, hallucinated tokens in order)."""
    kept = [row for row in table.rows if not row.hallucinated]
    dropped = [row.hyp_token for row in table.rows if row.hallucinated]
    return AlignmentTable(table.utt_id, kept), [t for t in dropped if t is not None]


def emit_clean(table: AlignmentTable) -> TokenSeq:
    """Hypothesis tokens that aligned to the reference, hypothesis order."""
    return [
        row.hyp_token
        for row in table.rows
        if not row.hallucinated and row.hyp_token is not None
    ]
