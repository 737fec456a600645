"""Shared fixtures: golden utterance data, random-instance generators, and
an independent brute-force matching oracle used by the property suites."""

from __future__ import annotations

import random
from functools import lru_cache
from pathlib import Path

from zscore import Hypothesis, TaggedUtterance
from zscore.ingest import DisfluencyTag

DATA = Path(__file__).parent / "data"

E = DisfluencyTag.EDITED
I = DisfluencyTag.INTJ
P = DisfluencyTag.PRN
N = DisfluencyTag.NONE

ALL_TAGS = [E, I, P, N]


def worked_example_pair() -> tuple[TaggedUtterance, Hypothesis]:
    """The published worked example: 10 reference tokens, 7 hypothesis tokens."""
    tokens = ["i", "mean", "but", "she", "was", "truly", "she", "was", "truly", "aware"]
    tags = [P, P, N, E, E, E, N, N, N, N]
    hyp = ["i", "mean", "but", "Luna", "was", "truly", "aware"]
    return TaggedUtterance("wex", tokens, tags), Hypothesis("wex", hyp)


# The 11 rows the worked example prints: (gt_token, tag, hyp_token, hallucinated).
WORKED_EXAMPLE_ROWS = [
    ("i", P, "i", False),
    ("mean", P, "mean", False),
    ("but", N, "but", False),
    ("she", E, None, False),
    ("was", E, None, False),
    ("truly", E, None, False),
    ("she", N, None, False),
    (None, None, "Luna", True),
    ("was", N, "was", False),
    ("truly", N, "truly", False),
    ("aware", N, "aware", False),
]

# Printed indicator columns for the 10 reference rows: (gt, pred, tp, tn, fp, fn).
WORKED_EXAMPLE_INDICATORS = [
    (1, 0, 0, 0, 0, 1),
    (1, 0, 0, 0, 0, 1),
    (0, 0, 0, 1, 0, 0),
    (1, 1, 1, 0, 0, 0),
    (1, 1, 1, 0, 0, 0),
    (1, 1, 1, 0, 0, 0),
    (0, 1, 0, 0, 1, 0),
    (0, 0, 0, 1, 0, 0),
    (0, 0, 0, 1, 0, 0),
    (0, 0, 0, 1, 0, 0),
]


def random_instance(
    rng: random.Random,
    max_len: int = 8,
    vocab: str = "abcd",
    utt_id: str = "r",
) -> tuple[TaggedUtterance, Hypothesis]:
    """A random tagged utterance and hypothesis over a small vocabulary."""
    n = rng.randint(0, max_len)
    m = rng.randint(0, max_len)
    tokens = [rng.choice(vocab) for _ in range(n)]
    tags = [rng.choice(ALL_TAGS) for _ in range(n)]
    hyp = [rng.choice(vocab) for _ in range(m)]
    return TaggedUtterance(utt_id, tokens, tags), Hypothesis(utt_id, hyp)


def oracle_max_none_matches(utt: TaggedUtterance, hyp: Hypothesis) -> int:
    """Brute force over all monotonic alignments: the maximum number of
    fluent (NONE) reference tokens that can be paired with equal hypothesis
    tokens without crossing.  Disfluent tokens are never matchable,
    mirroring what decoration enforces in the engine."""
    tokens, tags, hyp_tokens = utt.tokens, utt.tags, hyp.tokens
    n, m = len(tokens), len(hyp_tokens)

    @lru_cache(maxsize=None)
    def best(i: int, j: int) -> int:
        if i == n or j == m:
            return 0
        candidates = [best(i + 1, j), best(i, j + 1)]
        if tags[i] is N and tokens[i] == hyp_tokens[j]:
            candidates.append(1 + best(i + 1, j + 1))
        return max(candidates)

    result = best(0, 0)
    best.cache_clear()
    return result


def matched_none_count(table) -> int:
    return sum(
        1
        for row in table.rows
        if not row.hallucinated and row.tag is N and row.hyp_token is not None
    )


def assert_partition(table, utt: TaggedUtterance, hyp: Hypothesis) -> None:
    """The two reconstruction invariants every alignment table must obey."""
    gt_side = [(row.gt_token, row.tag) for row in table.rows if not row.hallucinated]
    assert gt_side == list(zip(utt.tokens, utt.tags))
    hyp_side = [row.hyp_token for row in table.rows if row.hyp_token is not None]
    assert hyp_side == hyp.tokens


# Result lines for the acceptance suite, echoed after the run so the
# per-criterion verdicts are visible in plain `pytest -v` output.
ACCEPTANCE_RESULTS: list[tuple[str, str]] = []


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.ensure_newline()
    terminalreporter.section("acceptance criteria")
    for name, verdict in ACCEPTANCE_RESULTS:
        terminalreporter.write_line(f"{verdict}: {name}")
