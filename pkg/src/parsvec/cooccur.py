"""Sparse windowed co-occurrence counting with inverse-distance weighting."""

from __future__ import annotations

import struct
from pathlib import Path
from typing import Iterable, Iterator, Sequence

_SPILL_RECORD = struct.Struct("<IId")  # (i: u32, j: u32, x: f64), little-endian


class CooccurrenceMatrix:
    """Symmetric sparse pair counts keyed by (i, j); zero entries are never stored."""

    def __init__(self, vocab_size: int, entries: dict[tuple[int, int], float] | None = None):
        self.vocab_size = vocab_size
        self._entries: dict[tuple[int, int], float] = entries if entries is not None else {}

    def __len__(self) -> int:
        return len(self._entries)

    def get(self, i: int, j: int) -> float:
        return self._entries.get((i, j), 0.0)

    def entries(self) -> Iterator[tuple[int, int, float]]:
        """All nonzero entries exactly once, in (i, j) lexicographic order."""
        for (i, j) in sorted(self._entries):
            yield i, j, self._entries[(i, j)]

    def row_sum(self, i: int) -> float:
        return sum(x for (a, _), x in self._entries.items() if a == i)

    def total_mass(self) -> float:
        return sum(self._entries.values())


def accumulate(
    ids: Sequence[Sequence[int]],
    context_size: int,
    vocab_size: int,
    flat_window: bool = False,
) -> CooccurrenceMatrix:
    """Count pairs within context_size of each other, never crossing sentences.

    A pair at distance d contributes 1/d to both (i, j) and (j, i)
    (or 1 with flat_window). Both directions are updated at the same step so
    mirrored cells accumulate the same float sums and symmetry is exact.
    """
    if context_size < 1:
        raise ValueError("context_size must be >= 1")
    counts: dict[tuple[int, int], float] = {}
    for sentence in ids:
        n = len(sentence)
        for t in range(n):
            i = sentence[t]
            if not 0 <= i < vocab_size:
                raise ValueError(f"corrupt stream: id {i} outside vocabulary of {vocab_size}")
            for d in range(1, min(context_size, n - 1 - t) + 1):
                j = sentence[t + d]
                if not 0 <= j < vocab_size:
                    raise ValueError(
                        f"corrupt stream: id {j} outside vocabulary of {vocab_size}"
                    )
                v = 1.0 if flat_window else 1.0 / d
                counts[(i, j)] = counts.get((i, j), 0.0) + v
                counts[(j, i)] = counts.get((j, i), 0.0) + v
    return CooccurrenceMatrix(vocab_size, counts)


def merge(matrices: Iterable[CooccurrenceMatrix]) -> CooccurrenceMatrix:
    """Entry-wise sum of shard matrices (all over the same vocabulary)."""
    matrices = list(matrices)
    if not matrices:
        raise ValueError("nothing to merge")
    sizes = {m.vocab_size for m in matrices}
    if len(sizes) != 1:
        raise ValueError(f"shards disagree on vocab_size: {sorted(sizes)}")
    merged: dict[tuple[int, int], float] = {}
    for m in matrices:
        for i, j, x in m.entries():
            merged[(i, j)] = merged.get((i, j), 0.0) + x
    return CooccurrenceMatrix(matrices[0].vocab_size, merged)


def probability_ratio(m: CooccurrenceMatrix, i: int, j: int, k: int) -> float:
    """Diagnostic ratio of conditional co-occurrence probabilities:
    (x(i,k)/sum_c x(i,c)) / (x(j,k)/sum_c x(j,c)).
    """
    row_i = m.row_sum(i)
    row_j = m.row_sum(j)
    x_jk = m.get(j, k)
    if row_i == 0.0 or row_j == 0.0 or x_jk == 0.0:
        raise ValueError(
            f"probability ratio undefined for i={i}, j={j}, k={k}: zero denominator"
        )
    return (m.get(i, k) / row_i) / (x_jk / row_j)


def write_spill(m: CooccurrenceMatrix, path: str | Path) -> None:
    """Binary spill: (u32 i, u32 j, f64 x) records, little-endian, (i, j)-sorted."""
    with open(path, "wb") as f:
        for i, j, x in m.entries():
            f.write(_SPILL_RECORD.pack(i, j, x))


def read_spill(path: str | Path, vocab_size: int) -> CooccurrenceMatrix:
    data = Path(path).read_bytes()
    if len(data) % _SPILL_RECORD.size != 0:
        raise ValueError(f"{path}: truncated spill file")
    entries: dict[tuple[int, int], float] = {}
    for i, j, x in _SPILL_RECORD.iter_unpack(data):
        if i >= vocab_size or j >= vocab_size:
            raise ValueError(f"{path}: id ({i},{j}) outside vocabulary of {vocab_size}")
        entries[(i, j)] = x
    return CooccurrenceMatrix(vocab_size, entries)
