"""Readers and writers for the two output files: vocabulary and word vectors.

Both files are UTF-8, TAB-separated, one word id per line. Vector components
are serialized as scientific notation with 18 fractional digits, which is
enough for 64-bit floats to survive a write/read/write cycle byte-identically.
"""

from __future__ import annotations

import io
from contextlib import contextmanager
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .vocab import Vocabulary


@dataclass
class EmbeddingSet:
    vocab: Vocabulary
    vectors: np.ndarray  # vocab_size x D

    def __post_init__(self):
        if self.vectors.ndim != 2 or self.vectors.shape[0] != len(self.vocab):
            raise ValueError(
                f"vector rows ({self.vectors.shape}) must match vocabulary size "
                f"({len(self.vocab)})"
            )
        if self.vectors.shape[1] < 1:
            raise ValueError("vectors must have at least one dimension")
        if not np.all(np.isfinite(self.vectors)):
            raise ValueError("vectors contain non-finite values")


@contextmanager
def _as_text_sink(sink):
    if isinstance(sink, (str, Path)):
        with open(sink, "w", encoding="utf-8", newline="\n") as f:
            yield f
    else:
        yield sink


@contextmanager
def _as_text_source(source):
    if isinstance(source, (str, Path)):
        with open(source, "r", encoding="utf-8", newline="") as f:
            yield f
    else:
        yield source


def format_component(value: float) -> str:
    return "%.18e" % value


def write_vocab(vocab: Vocabulary, sink) -> None:
    """One line per word in id order: "id<TAB>word". Counts are not stored."""
    with _as_text_sink(sink) as f:
        for word_id, word, _ in vocab.entries():
            f.write(f"{word_id}\t{word}\n")


def write_vectors(embeddings: EmbeddingSet, sink) -> None:
    """One line per word in id order: id then the TAB-separated components."""
    with _as_text_sink(sink) as f:
        for word_id, row in enumerate(embeddings.vectors):
            f.write(str(word_id))
            for value in row:
                f.write("\t")
                f.write(format_component(value))
            f.write("\n")


def _read_vocab_lines(f) -> list[str]:
    words = []
    for lineno, raw in enumerate(f, start=1):
        line = raw.rstrip("\n")
        if not line:
            continue
        fields = line.split("\t")
        if len(fields) != 2:
            raise ValueError(f"vocabulary line {lineno}: expected 'id<TAB>word'")
        try:
            word_id = int(fields[0])
        except ValueError:
            raise ValueError(f"vocabulary line {lineno}: bad id {fields[0]!r}") from None
        if word_id != len(words):
            raise ValueError(
                f"vocabulary line {lineno}: id {word_id} out of order (expected {len(words)})"
            )
        words.append(fields[1])
    return words


def read_embeddings(vocab_source, vector_source) -> EmbeddingSet:
    """Load the file pair back; the two files must cover the same ids."""
    with _as_text_source(vocab_source) as f:
        words = _read_vocab_lines(f)
    vocab = Vocabulary(words, [0] * len(words))

    rows: list[list[float]] = []
    dim: int | None = None
    with _as_text_source(vector_source) as f:
        for lineno, raw in enumerate(f, start=1):
            line = raw.rstrip("\n")
            if not line:
                continue
            fields = line.split("\t")
            try:
                word_id = int(fields[0])
            except ValueError:
                raise ValueError(f"vector line {lineno}: bad id {fields[0]!r}") from None
            if word_id != len(rows):
                raise ValueError(
                    f"vector line {lineno}: id {word_id} out of order (expected {len(rows)})"
                )
            if word_id >= len(words):
                raise ValueError(
                    f"vector line {lineno}: id {word_id} not present in the vocabulary file"
                )
            if dim is None:
                dim = len(fields) - 1
                if dim < 1:
                    raise ValueError(f"vector line {lineno}: no components")
            elif len(fields) - 1 != dim:
                raise ValueError(
                    f"vector line {lineno}: expected {dim} components, got {len(fields) - 1}"
                )
            try:
                rows.append([float(v) for v in fields[1:]])
            except ValueError:
                raise ValueError(f"vector line {lineno}: malformed component") from None

    if len(rows) != len(words):
        raise ValueError(
            f"inconsistent files: vocabulary has {len(words)} ids, vectors have {len(rows)}"
        )
    return EmbeddingSet(vocab=vocab, vectors=np.asarray(rows, dtype=np.float64))


def write_vocab_string(vocab: Vocabulary) -> str:
    buf = io.StringIO()
    write_vocab(vocab, buf)
    return buf.getvalue()


def write_vectors_string(embeddings: EmbeddingSet) -> str:
    buf = io.StringIO()
    write_vectors(embeddings, buf)
    return buf.getvalue()
