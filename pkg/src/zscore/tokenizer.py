"""Treebank-style word tokenizer.

Implements the classic rule cascade used for Penn Treebank text: standard
contractions are split ("don't" -> "do", "n't"), punctuation is separated
from words, double quotes become directional `` / '' pairs, and runs of
whitespace collapse.  Rules are ordered regex substitutions; the final
token list is produced by splitting on whitespace.

The tokenizer assumes input is a single utterance (sentence splitting has
already happened), which is why only the *final* period is split off while
internal periods ("Mr.", "3.88") are left attached.
"""

from __future__ import annotations

import re

# A token sequence is a plain list of strings throughout the package.
TokenSeq = list[str]

# Applied before padding: directional quotes, ellipses, most punctuation.
_PRE_RULES: list[tuple[re.Pattern[str], str]] = [
    (re.compile(r'^"'), r"`` "),
    (re.compile(r'([ ([{<])"'), r"\1 `` "),
    (re.compile(r"\.\.\."), r" ... "),
    (re.compile(r"[,;:@#$%&]"), r" \g<0> "),
    # split the sentence-final period (with optional trailing closers)
    (re.compile(r"([^.])(\.)([])}>\"']*)[ \t]*$"), r"\1 \2\3 "),
    (re.compile(r"[?!]"), r" \g<0> "),
    (re.compile(r"[][(){}<>]"), r" \g<0> "),
    (re.compile(r"--"), r" -- "),
]

# Applied after the text is padded with a leading/trailing space so that
# word boundaries can be written as literal spaces.
_POST_RULES: list[tuple[re.Pattern[str], str]] = [
    (re.compile(r'"'), r" '' "),
    (re.compile(r"([^'])' "), r"\1 ' "),
    (re.compile(r"'([sSmMdD]) "), r" '\1 "),
    (re.compile(r"'ll "), r" 'll "),
    (re.compile(r"'re "), r" 're "),
    (re.compile(r"'ve "), r" 've "),
    (re.compile(r"n't "), r" n't "),
    (re.compile(r"'LL "), r" 'LL "),
    (re.compile(r"'RE "), r" 'RE "),
    (re.compile(r"'VE "), r" 'VE "),
    (re.compile(r"N'T "), r" N'T "),
    (re.compile(r" ([Cc])annot "), r" \1an not "),
    (re.compile(r" ([Dd])'ye "), r" \1' ye "),
    (re.compile(r" ([Gg])imme "), r" \1im me "),
    (re.compile(r" ([Gg])onna "), r" \1on na "),
    (re.compile(r" ([Gg])otta "), r" \1ot ta "),
    (re.compile(r" ([Ll])emme "), r" \1em me "),
    (re.compile(r" ([Mm])ore'n "), r" \1ore 'n "),
    (re.compile(r" '([Tt])is "), r" '\1 is "),
    (re.compile(r" '([Tt])was "), r" '\1 was "),
    (re.compile(r" ([Ww])anna "), r" \1an na "),
]


def tokenize(text: str) -> TokenSeq:
    """Tokenize one utterance into a list of word tokens.

    Whitespace is normalized first, so any mix of spaces/tabs/newlines
    between words yields the same token list.  Empty or whitespace-only
    input returns [].
    """
    text = " ".join(text.split())
    if not text:
        return []
    for pattern, repl in _PRE_RULES:
        text = pattern.sub(repl, text)
    text = " " + text + " "
    for pattern, repl in _POST_RULES:
        text = pattern.sub(repl, text)
    return text.split()
