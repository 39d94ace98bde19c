"""Persian orthography repair and tokenization.

Two textual defects are repaired before training: compound words written
with a plain space instead of the zero-width non-joiner ("کتاب ها" for
"کتاب‌ها"), and punctuation marks glued to words ("رفت؟"). Sentences are
then split on terminal punctuation and tokenized on whitespace, so tokens
keep their internal ZWNJ.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

ZWNJ = "‌"

# Terminal punctuation closing a sentence.
SENTENCE_TERMINALS = (".", "؟", "!", "?")

DEFAULT_PREFIXES = frozenset({"می", "نمی"})
DEFAULT_SUFFIXES = frozenset(
    {"ها", "های", "هایی", "ام", "ای", "ایم", "اید", "اند", "ی", "تر", "ترین"}
)
DEFAULT_MARKS = frozenset(
    {"()", "<<>>", "•", "/", "؛", "،", "=", "-", ":", "%", "...", "؟", "[]", "!"}
)

# Bracket-pair shorthands in mark inventories stand for their two sides.
_PAIRED_MARKS = {"()": ("(", ")"), "[]": ("[", "]"), "<<>>": ("<<", ">>")}

TokenStream = list[list[str]]


@dataclass(frozen=True)
class AffixRuleSet:
    prefixes: frozenset[str] = DEFAULT_PREFIXES
    suffixes: frozenset[str] = DEFAULT_SUFFIXES

    def __post_init__(self):
        for rule in list(self.prefixes) + list(self.suffixes):
            if " " in rule or ZWNJ in rule:
                raise ValueError(f"affix rule {rule!r} contains a space or ZWNJ")
        if self.prefixes & self.suffixes:
            raise ValueError("prefix and suffix sets must be disjoint")


@dataclass(frozen=True)
class MarkSet:
    marks: frozenset[str] = DEFAULT_MARKS

    def __post_init__(self):
        if not self.marks:
            raise ValueError("mark set must be non-empty")
        for mark in self.marks:
            if any("؀" <= ch <= "ۿ" for ch in mark):
                raise ValueError(f"mark {mark!r} contains a Persian letter")

    def match_inventory(self) -> list[str]:
        """Concrete strings to detach, longest first; bracket pairs expanded."""
        expanded: set[str] = set()
        for mark in self.marks:
            expanded.update(_PAIRED_MARKS.get(mark, (mark,)))
        return sorted(expanded, key=len, reverse=True)


def _joins(left: str, right: str, rules: AffixRuleSet) -> bool:
    if left in rules.prefixes:
        return True
    if right in rules.suffixes:
        # A host that already carries a ZWNJ join takes no further suffix;
        # without this guard a second pass could re-join after "رفته ای ها"
        # -> "رفته‌ای ها", and the repair would not be idempotent.
        if ZWNJ in left:
            return False
        # Lone "ی" is usually the ezafe, not a suffix; require a word-like host.
        if right == "ی" and not (len(left) >= 2 and left[-1].isalpha()):
            return False
        return True
    return False


def fix_pseudo_space(text: str, rules: AffixRuleSet = AffixRuleSet()) -> str:
    """Rewrite the space in affixed token pairs ("کتاب ها", "می رود") to ZWNJ.

    Single left-to-right pass over each line; a joined pair is consumed whole,
    so chains such as "کتاب ها ی" join only once. Solid spellings ("میرود")
    and pre-existing ZWNJ are left untouched. Only an exactly-one-space
    separator is rewritten: the transformation is strictly U+0020 -> U+200C.
    """
    out_lines = []
    for line in text.split("\n"):
        parts = re.split("( +)", line)
        toks = parts[0::2]
        seps = parts[1::2]
        pieces = []
        k = 0
        while k < len(toks):
            tok = toks[k]
            if (
                k + 1 < len(toks)
                and seps[k] == " "
                and tok
                and toks[k + 1]
                and _joins(tok, toks[k + 1], rules)
            ):
                pieces.append(tok + ZWNJ + toks[k + 1])
                if k + 1 < len(seps):
                    pieces.append(seps[k + 1])
                k += 2
            else:
                pieces.append(tok)
                if k < len(seps):
                    pieces.append(seps[k])
                k += 1
        out_lines.append("".join(pieces))
    return "\n".join(out_lines)


def _segment_marks(text: str, inventory: list[str]) -> list[tuple[bool, str]]:
    """Split text into (is_mark, piece) segments, matching marks longest-first."""
    segments: list[tuple[bool, str]] = []
    buf = []
    i = 0
    while i < len(text):
        match = next((m for m in inventory if text.startswith(m, i)), None)
        if match is not None:
            if buf:
                segments.append((False, "".join(buf)))
                buf = []
            segments.append((True, match))
            i += len(match)
        else:
            buf.append(text[i])
            i += 1
    if buf:
        segments.append((False, "".join(buf)))
    return segments


def separate_marks(text: str, marks: MarkSet = MarkSet()) -> str:
    """Insert a space between each configured mark and any adjacent word.

    Marks flanked by whitespace or by other marks are left as they are, so the
    operation is idempotent.
    """
    inventory = marks.match_inventory()
    segments = _segment_marks(text, inventory)
    out: list[str] = []
    prev_is_mark = False
    for is_mark, piece in segments:
        if out:
            boundary_left = out[-1][-1]
            boundary_right = piece[0]
            if is_mark and not prev_is_mark and not boundary_left.isspace():
                out.append(" ")
            elif prev_is_mark and not is_mark and not boundary_right.isspace():
                out.append(" ")
        out.append(piece)
        prev_is_mark = is_mark
    return "".join(out)


def split_sentences(text: str) -> list[str]:
    """Split after terminal punctuation runs and at newlines; drop empties.

    A run of consecutive terminals ("...", "؟!") closes one sentence, keeping
    the marks attached to it.
    """
    sentences: list[str] = []
    buf: list[str] = []
    i = 0
    n = len(text)
    while i < n:
        ch = text[i]
        if ch == "\n":
            sentences.append("".join(buf))
            buf = []
            i += 1
        elif ch in SENTENCE_TERMINALS:
            while i < n and text[i] in SENTENCE_TERMINALS:
                buf.append(text[i])
                i += 1
            sentences.append("".join(buf))
            buf = []
        else:
            buf.append(ch)
            i += 1
    sentences.append("".join(buf))
    return [s.strip() for s in sentences if s.strip()]


def tokenize(sentence: str) -> list[str]:
    """Whitespace tokenization; ZWNJ is not a boundary, so "کتاب‌ها" stays whole."""
    return sentence.split()


def normalize_pipeline(
    text: str,
    rules: AffixRuleSet = AffixRuleSet(),
    marks: MarkSet = MarkSet(),
) -> TokenStream:
    """Full repair chain: detach marks, restore ZWNJ, split sentences, tokenize.

    Sentence terminals are detached alongside the configured marks so that
    "رفتند." tokenizes as ["رفتند", "."].
    """
    pipeline_marks = MarkSet(marks.marks | set(SENTENCE_TERMINALS))
    text = separate_marks(text, pipeline_marks)
    text = fix_pseudo_space(text, rules)
    return [tokenize(s) for s in split_sentences(text)]


def load_rules(path) -> tuple[AffixRuleSet, MarkSet]:
    """Read affix/mark configuration: "[prefixes]", "[suffixes]", "[marks]" sections,
    one entry per line. Sections absent from the file keep their defaults.
    """
    sections: dict[str, set[str]] = {}
    current: set[str] | None = None
    with open(path, encoding="utf-8") as f:
        for lineno, raw in enumerate(f, start=1):
            line = raw.strip()
            if not line:
                continue
            if line.startswith("[") and line.endswith("]"):
                name = line[1:-1]
                if name not in ("prefixes", "suffixes", "marks"):
                    raise ValueError(f"{path}:{lineno}: unknown section {name!r}")
                current = sections.setdefault(name, set())
            elif current is None:
                raise ValueError(f"{path}:{lineno}: entry before any section header")
            else:
                current.add(line)
    rules = AffixRuleSet(
        prefixes=frozenset(sections.get("prefixes", DEFAULT_PREFIXES)),
        suffixes=frozenset(sections.get("suffixes", DEFAULT_SUFFIXES)),
    )
    marks = MarkSet(marks=frozenset(sections.get("marks", DEFAULT_MARKS)))
    return rules, marks
