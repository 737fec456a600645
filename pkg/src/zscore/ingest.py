"""Reference and hypothesis ingestion.

References arrive either as Penn Treebank bracketed trees (.mrg style) or
as JSONL records with parallel token/tag arrays.  Hypotheses arrive as
JSONL with either raw text (tokenized here) or pre-tokenized arrays.

Tags are the three disfluency span categories: EDITED (reparanda), INTJ
(interjections), PRN (parentheticals); NONE marks fluent tokens that a
disfluency-removal system should keep.
"""

from __future__ import annotations

import json
import logging
import re
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable

from zscore.errors import ParseError, ValidationError
from zscore.tokenizer import TokenSeq, tokenize

log = logging.getLogger(__name__)


class DisfluencyTag(Enum):
    """Per-token span category.  NONE means fluent (keep the token)."""

    EDITED = "EDITED"
    INTJ = "INTJ"
    PRN = "PRN"
    NONE = "NONE"

    @classmethod
    def parse(cls, text: str) -> "DisfluencyTag":
        try:
            return cls[text.strip().upper()]
        except KeyError:
            raise ValidationError(
                f"unknown tag {text!r} (expected one of EDITED, INTJ, PRN, NONE)"
            ) from None


DISFLUENT_TAGS = (DisfluencyTag.EDITED, DisfluencyTag.INTJ, DisfluencyTag.PRN)


@dataclass
class TaggedUtterance:
    """A reference utterance: parallel token and tag sequences."""

    id: str
    tokens: TokenSeq
    tags: list[DisfluencyTag]

    def __post_init__(self) -> None:
        if len(self.tokens) != len(self.tags):
            raise ValidationError(
                f"utterance {self.id!r}: {len(self.tokens)} tokens but "
                f"{len(self.tags)} tags"
            )
        if not self.tokens:
            log.warning("utterance %r is empty", self.id)


@dataclass
class Hypothesis:
    """System output for one utterance."""

    id: str
    tokens: TokenSeq


@dataclass
class ParseTree:
    """Bracketed tree node: a label plus subtree-or-leaf children."""

    label: str
    children: list["ParseTree | str"] = field(default_factory=list)

    def render(self) -> str:
        """Serialize back to bracketed form (inverse of parse_ptb)."""
        parts = [c if isinstance(c, str) else c.render() for c in self.children]
        return "(" + " ".join([self.label, *parts] if self.label else parts) + ")"


def _skip_ws(source: str, i: int) -> int:
    while i < len(source) and source[i].isspace():
        i += 1
    return i


def _read_atom(source: str, i: int) -> tuple[str, int]:
    start = i
    while i < len(source) and not source[i].isspace() and source[i] not in "()":
        i += 1
    return source[start:i], i


def _parse_node(source: str, i: int) -> tuple[ParseTree, int]:
    # precondition: source[i] == "("
    open_offset = i
    i = _skip_ws(source, i + 1)
    label, i = _read_atom(source, i)
    children: list[ParseTree | str] = []
    while True:
        i = _skip_ws(source, i)
        if i >= len(source):
            raise ParseError("unbalanced '(': unexpected end of input", len(source))
        ch = source[i]
        if ch == ")":
            if not children:
                raise ParseError("empty node", open_offset)
            return ParseTree(label, children), i + 1
        if ch == "(":
            child, i = _parse_node(source, i)
            children.append(child)
        else:
            leaf, i = _read_atom(source, i)
            children.append(leaf)


def parse_ptb(source: str) -> list[ParseTree]:
    """Parse zero or more bracketed trees from a string.

    Accepts the common file idiom of a label-less wrapper node
    "( (S ...) )".  Raises ParseError (with the offending offset) on
    unbalanced brackets, empty "()" nodes, or stray text between trees.
    """
    trees: list[ParseTree] = []
    i = _skip_ws(source, 0)
    while i < len(source):
        if source[i] != "(":
            raise ParseError(f"expected '(' but found {source[i]!r}", i)
        tree, i = _parse_node(source, i)
        trees.append(tree)
        i = _skip_ws(source, i)
    return trees


_LABEL_TAGS = {"EDITED": DisfluencyTag.EDITED, "INTJ": DisfluencyTag.INTJ, "PRN": DisfluencyTag.PRN}


def _base_label(label: str) -> str:
    # strip function/index suffixes: "PRN-2" -> "PRN", "NP=1" -> "NP"
    return re.split(r"[-=]", label, maxsplit=1)[0]


def extract_tagged(tree: ParseTree, utt_id: str = "u0") -> TaggedUtterance:
    """Flatten a tree to (tokens, tags), leaves verbatim in surface order.

    Each token takes the category of its *outermost* EDITED/INTJ/PRN
    ancestor; nested disfluency nodes never override an active category.
    Tokens with no such ancestor are tagged NONE.
    """
    tokens: TokenSeq = []
    tags: list[DisfluencyTag] = []

    def walk(node: ParseTree, active: DisfluencyTag | None) -> None:
        tag = active or _LABEL_TAGS.get(_base_label(node.label))
        for child in node.children:
            if isinstance(child, str):
                tokens.append(child)
                tags.append(tag or DisfluencyTag.NONE)
            else:
                walk(child, tag)

    walk(tree, None)
    return TaggedUtterance(utt_id, tokens, tags)


def read_ptb_ref(source: str, id_stem: str = "u") -> list[TaggedUtterance]:
    """Parse a bracketed-tree file into utterances with generated ids.

    Trees get sequential ids "<stem>-0001", "<stem>-0002", ... in file
    order, so the same file always yields the same ids.
    """
    return [
        extract_tagged(tree, f"{id_stem}-{k:04d}")
        for k, tree in enumerate(parse_ptb(source), 1)
    ]


def _iter_records(lines: Iterable[str], source_name: str):
    for lineno, line in enumerate(lines, 1):
        if not line.strip():
            continue
        try:
            record = json.loads(line)
        except json.JSONDecodeError as exc:
            raise ValidationError(f"{source_name}:{lineno}: invalid JSON: {exc}") from None
        if not isinstance(record, dict):
            raise ValidationError(f"{source_name}:{lineno}: record is not an object")
        yield lineno, record


def _record_id(record: dict, lineno: int, source_name: str) -> str:
    utt_id = record.get("id")
    if not isinstance(utt_id, str) or not utt_id:
        raise ValidationError(f"{source_name}:{lineno}: missing or non-string 'id'")
    return utt_id


def _string_list(record: dict, key: str, utt_id: str, source_name: str) -> list[str]:
    value = record.get(key)
    if not isinstance(value, list) or not all(isinstance(t, str) for t in value):
        raise ValidationError(
            f"{source_name}: utterance {utt_id!r}: {key!r} must be a list of strings"
        )
    return value


def _check_duplicates(ids: list[str], source_name: str) -> None:
    seen: set[str] = set()
    dups: list[str] = []
    for utt_id in ids:
        if utt_id in seen and utt_id not in dups:
            dups.append(utt_id)
        seen.add(utt_id)
    if dups:
        raise ValidationError(f"{source_name}: duplicate ids: {', '.join(sorted(dups))}")


def read_jsonl_ref(lines: Iterable[str], source_name: str = "<ref>") -> list[TaggedUtterance]:
    """Read reference JSONL: {"id", "tokens", "tags"} per line.

    Tag strings are case-insensitive.  Token/tag length mismatches and
    unknown tags raise ValidationError naming the utterance; duplicate
    ids raise a run-level ValidationError listing them.
    """
    utterances: list[TaggedUtterance] = []
    for lineno, record in _iter_records(lines, source_name):
        utt_id = _record_id(record, lineno, source_name)
        tokens = _string_list(record, "tokens", utt_id, source_name)
        raw_tags = _string_list(record, "tags", utt_id, source_name)
        if len(tokens) != len(raw_tags):
            raise ValidationError(
                f"{source_name}: utterance {utt_id!r}: {len(tokens)} tokens "
                f"but {len(raw_tags)} tags"
            )
        try:
            tags = [DisfluencyTag.parse(t) for t in raw_tags]
        except ValidationError as exc:
            raise ValidationError(
                f"{source_name}: utterance {utt_id!r}: {exc}"
            ) from None
        utterances.append(TaggedUtterance(utt_id, tokens, tags))
    _check_duplicates([u.id for u in utterances], source_name)
    return utterances


def read_hyp(lines: Iterable[str], mode: str = "text", source_name: str = "<hyp>") -> list[Hypothesis]:
    """Read hypothesis JSONL.

    mode="text": records carry {"id", "text"} and the text is tokenized
    with the package tokenizer.  mode="tokens": records carry
    {"id", "tokens"} taken verbatim.
    """
    if mode not in ("text", "tokens"):
        raise ValidationError(f"unknown hypothesis mode {mode!r}")
    hyps: list[Hypothesis] = []
    for lineno, record in _iter_records(lines, source_name):
        utt_id = _record_id(record, lineno, source_name)
        if mode == "text":
            text = record.get("text")
            if not isinstance(text, str):
                raise ValidationError(
                    f"{source_name}: utterance {utt_id!r}: 'text' must be a string"
                )
            tokens = tokenize(text)
        else:
            tokens = _string_list(record, "tokens", utt_id, source_name)
        hyps.append(Hypothesis(utt_id, tokens))
    _check_duplicates([h.id for h in hyps], source_name)
    return hyps


def is_punct_token(token: str) -> bool:
    """True when a token contains no alphanumeric character."""
    return not any(ch.isalnum() for ch in token)
