"""Frequency-ordered word/id mapping with UNK and UNK_PAD sentinels."""

from __future__ import annotations

from collections import Counter
from typing import Iterable, Sequence

UNK = "UNK"
UNK_PAD = "UNK_PAD"
UNK_ID = 0
UNK_PAD_ID = 1


class Vocabulary:
    """Dense id space: 0 = UNK, 1 = UNK_PAD, then words by descending count.

    Tokens spelled exactly like a sentinel never get a regular id; their
    occurrences are folded into UNK's count.
    """

    def __init__(self, words: Sequence[str], counts: Sequence[int]):
        words = list(words)
        counts = list(counts)
        if len(words) != len(counts):
            raise ValueError("words and counts must have the same length")
        if len(words) < 2 or words[0] != UNK or words[1] != UNK_PAD:
            raise ValueError(f"ids 0 and 1 must be {UNK!r} and {UNK_PAD!r}")
        if len(set(words)) != len(words):
            raise ValueError("words must be unique")
        for k in range(3, len(counts)):
            if counts[k] > counts[k - 1]:
                raise ValueError("counts must be non-increasing for ids >= 2")
        self.words = words
        self.counts = counts
        self._ids = {w: i for i, w in enumerate(words)}

    def __len__(self) -> int:
        return len(self.words)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Vocabulary)
            and self.words == other.words
            and self.counts == other.counts
        )

    def lookup_id(self, word: str) -> int:
        """Id of the word, or 0 (UNK) if it is not in the vocabulary."""
        return self._ids.get(word, UNK_ID)

    def lookup_word(self, word_id: int) -> str:
        if not 0 <= word_id < len(self.words):
            raise IndexError(f"id {word_id} out of range 0..{len(self.words) - 1}")
        return self.words[word_id]

    def entries(self) -> Iterable[tuple[int, str, int]]:
        return ((i, w, c) for i, (w, c) in enumerate(zip(self.words, self.counts)))

    def encode(self, stream: Sequence[Sequence[str]]) -> list[list[int]]:
        """Replace every token by its id (0 for unknown), keeping sentence shape."""
        ids = self._ids
        return [[ids.get(tok, UNK_ID) for tok in sentence] for sentence in stream]


def build_vocabulary(
    stream: Sequence[Sequence[str]], min_occurrences: int = 1
) -> Vocabulary:
    """Count tokens and assign ids 2.. by descending count, first-seen breaking ties.

    Tokens whose count falls below min_occurrences are dropped; their total goes
    to UNK. UNK_PAD exists for downstream padding and always has count 0.
    """
    if min_occurrences < 1:
        raise ValueError("min_occurrences must be >= 1")
    counts: Counter[str] = Counter()
    first_seen: dict[str, int] = {}
    position = 0
    for sentence in stream:
        for token in sentence:
            counts[token] += 1
            if token not in first_seen:
                first_seen[token] = position
            position += 1

    unk_count = counts.pop(UNK, 0) + counts.pop(UNK_PAD, 0)
    retained = sorted(
        (w for w, c in counts.items() if c >= min_occurrences),
        key=lambda w: (-counts[w], first_seen[w]),
    )
    unk_count += sum(c for w, c in counts.items() if c < min_occurrences)

    words = [UNK, UNK_PAD] + retained
    word_counts = [unk_count, 0] + [counts[w] for w in retained]
    return Vocabulary(words, word_counts)
