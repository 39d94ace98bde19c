"""Cosine nearest-neighbor lookup over an embedding set (exhaustive scan)."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .embedding_io import EmbeddingSet
from .vocab import UNK_ID, UNK_PAD_ID


@dataclass(frozen=True)
class Neighbor:
    word: str
    score: float


def cosine(u: np.ndarray, v: np.ndarray) -> float:
    """u.v / (|u||v|), clamped to [-1, 1] against float rounding."""
    u = np.asarray(u, dtype=np.float64)
    v = np.asarray(v, dtype=np.float64)
    norm = float(np.linalg.norm(u)) * float(np.linalg.norm(v))
    if norm == 0.0:
        raise ValueError("cosine similarity undefined for zero vectors")
    return float(np.clip(float(u @ v) / norm, -1.0, 1.0))


def nearest(embeddings: EmbeddingSet, word: str, k: int) -> list[Neighbor]:
    """The k most cosine-similar in-vocabulary words, best first.

    The query word and the two sentinel ids are excluded; zero-norm rows
    cannot score and are skipped. Ties break toward the smaller id.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    vocab = embeddings.vocab
    word_id = vocab.lookup_id(word)
    if word_id == UNK_ID and word != vocab.lookup_word(UNK_ID):
        raise KeyError(f"word {word!r} is not in the vocabulary")

    matrix = embeddings.vectors
    query_vec = matrix[word_id]
    query_norm = float(np.linalg.norm(query_vec))
    if query_norm == 0.0:
        raise ValueError(f"word {word!r} has a zero vector; similarity undefined")

    norms = np.linalg.norm(matrix, axis=1)
    eligible = norms > 0.0
    eligible[[UNK_ID, UNK_PAD_ID, word_id]] = False

    scores = np.full(len(matrix), -np.inf)
    idx = np.nonzero(eligible)[0]
    scores[idx] = np.clip(
        (matrix[idx] @ query_vec) / (norms[idx] * query_norm), -1.0, 1.0
    )

    order = np.lexsort((idx, -scores[idx]))
    top = idx[order][:k]
    return [Neighbor(word=vocab.lookup_word(int(i)), score=float(scores[i])) for i in top]
