"""Regenerate tokenizer_fixtures.json from the reference sed script.

The frozen fixtures are the output of GNU sed running
treebank_reference.sed (the classic Treebank tokenizer rules) over each
sentence, after the same whitespace normalization the engine applies.
Run from this directory:

    python3 make_tokenizer_fixtures.py > tokenizer_fixtures.json
"""

import json
import subprocess
import sys
from pathlib import Path

HERE = Path(__file__).parent

SENTENCES = [
    "The cat sat.",
    "i mean but Luna was truly aware",
    "don't stop, um, now.",
    "I can't believe it's true.",
    "She said we'd better go but they'll wait.",
    "You're sure we've won, aren't you?",
    "He won't and I shan't.",
    "DON'T SHOUT, IT'S RUDE.",
    "I'M OK, WE'LL SEE, YOU'RE NOT, THEY'VE GONE.",
    "You cannot do that.",
    "Cannot you see?",
    "D'ye ken John Peel?",
    "Gimme a break, lemme think.",
    "We're gonna win, you wanna bet, I gotta go.",
    "'Tis a pity and 'twas ever thus.",
    "He knows more'n you do.",
    "the parents' cars and the dog's bone",
    "James' book is on the teachers' desk.",
    "'tis said the girls' team won",
    "goin' home ain't easy",
    "\"Hello,\" she said.",
    "He shouted \"stop!\" twice.",
    "She replied (\"quietly\") and left.",
    "a \"quoted\" word",
    "Wait... what?",
    "I paid $3.88 for 3,000 items; cheap, right?",
    "Email me @ noon: it's urgent!",
    "He scored 100% & won #1 prize.",
    "Lists (like this one) [and this] {and this} <and this> nest.",
    "A dash--no, two dashes---here.",
    "um, uh, you know, i mean, well",
    "so i i i went to the the store",
    "Is that so? Yes! Really...",
    "The file ends.\"",
    "Mr. Smith went to Washington.",
    "version 2.0 shipped today.",
    "café au lait, s'il vous plaît.",
    "naïve résumé",
    "it's it's repeated repeated",
    "stop.",
    "What?!",
    "Cost: $5; tip: 15%.",
    "he said -- well -- nothing",
    "quote 'inside' single quotes",
    "A.M. and P.M. are abbreviations.",
]


def sed_tokenize(text: str) -> list[str]:
    normalized = " ".join(text.split())
    if not normalized:
        return []
    out = subprocess.run(
        ["sed", "-f", str(HERE / "treebank_reference.sed")],
        input=normalized + "\n",
        capture_output=True,
        text=True,
        env={"LC_ALL": "C.utf8"},
        check=True,
    )
    return out.stdout.strip("\n").split()


def main() -> None:
    fixtures = [{"text": s, "tokens": sed_tokenize(s)} for s in SENTENCES]
    fixtures.append({"text": "", "tokens": []})
    fixtures.append({"text": "   \t  ", "tokens": []})
    fixtures.append(
        {"text": "  spaced   out\ttabs  ", "tokens": sed_tokenize("  spaced   out\ttabs  ")}
    )
    json.dump(fixtures, sys.stdout, ensure_ascii=False, indent=1)


if __name__ == "__main__":
    main()
