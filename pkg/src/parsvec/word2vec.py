"""CBOW and skip-gram trainers with negative-sampling loss.

The hidden state is the input embedding of the center word (skip-gram) or the
mean of the context embeddings (CBOW). Each example contrasts the true output
word against k noise words drawn from the unigram distribution raised to 0.75.
A full softmax over a few-hundred-thousand-word vocabulary is not tractable,
which is why the sampled objective is used.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .glove import TrainingDivergedError

MODES = ("cbow", "skipgram")


@dataclass
class W2VConfig:
    batch_size: int = 128
    embedding_size: int = 128
    skip_window: int = 1
    num_steps: int = 100_000
    negatives_per_example: int = 64
    learning_rate: float = 1.0
    seed: int = 1
    mode: str = "cbow"

    def __post_init__(self):
        positives = (
            self.batch_size,
            self.embedding_size,
            self.skip_window,
            self.negatives_per_example,
            self.learning_rate,
        )
        if any(v <= 0 for v in positives):
            raise ValueError("all hyperparameters must be positive")
        if self.num_steps < 0:
            raise ValueError("num_steps must be >= 0")
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}, got {self.mode!r}")


@dataclass
class W2VModel:
    input_embeddings: np.ndarray  # vocab_size x D
    output_weights: np.ndarray    # vocab_size x D
    output_biases: np.ndarray     # vocab_size
    loss_history: list[tuple[int, float]] = field(default_factory=list)


def generate_cbow_batch(
    ids: Sequence[int], skip_window: int, batch_size: int, cursor: int = 0
) -> tuple[np.ndarray, np.ndarray, int]:
    """Fill a batch of (context window, center word) examples.

    The cursor walks positions one at a time, skipping positions without a
    full window on both sides, and wraps at the end of the sequence. Context
    ids are emitted left to right.
    """
    ids = np.asarray(ids, dtype=np.int64)
    n = len(ids)
    if n <= 2 * skip_window:
        raise ValueError(
            f"sequence of {n} ids is too short for skip_window={skip_window}"
        )
    contexts = np.empty((batch_size, 2 * skip_window), dtype=np.int64)
    targets = np.empty(batch_size, dtype=np.int64)
    t = cursor % n
    filled = 0
    while filled < batch_size:
        if skip_window <= t < n - skip_window:
            contexts[filled, :skip_window] = ids[t - skip_window : t]
            contexts[filled, skip_window:] = ids[t + 1 : t + skip_window + 1]
            targets[filled] = ids[t]
            filled += 1
        t = (t + 1) % n
    return contexts, targets, t


def generate_skipgram_pairs(
    ids: Sequence[int],
    skip_window: int,
    batch_size: int,
    cursor: int | tuple[int, int] = 0,
) -> tuple[np.ndarray, np.ndarray, tuple[int, int]]:
    """Fill a batch of (center, context) pairs, streaming 2*skip_window pairs
    per center in left-to-right context order.

    The cursor is (position, next pair index within that position) so batches
    of any size can cut a center's pair group anywhere.
    """
    ids = np.asarray(ids, dtype=np.int64)
    n = len(ids)
    if n <= 2 * skip_window:
        raise ValueError(
            f"sequence of {n} ids is too short for skip_window={skip_window}"
        )
    t, k = cursor if isinstance(cursor, tuple) else (cursor, 0)
    t %= n
    centers = np.empty(batch_size, dtype=np.int64)
    contexts = np.empty(batch_size, dtype=np.int64)
    filled = 0
    while filled < batch_size:
        if skip_window <= t < n - skip_window:
            offset = k - skip_window if k < skip_window else k - skip_window + 1
            centers[filled] = ids[t]
            contexts[filled] = ids[t + offset]
            filled += 1
            k += 1
            if k == 2 * skip_window:
                k = 0
                t = (t + 1) % n
        else:
            k = 0
            t = (t + 1) % n
    return centers, contexts, (t, k)


def _sigmoid(z: np.ndarray) -> np.ndarray:
    out = np.empty_like(z, dtype=np.float64)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


def _hidden(model: W2VModel, inputs) -> np.ndarray:
    if np.isscalar(inputs) or isinstance(inputs, (int, np.integer)):
        return model.input_embeddings[int(inputs)]
    return model.input_embeddings[np.asarray(inputs, dtype=np.int64)].mean(axis=0)


def nce_forward(
    model: W2VModel, inputs, target_id: int, negative_ids: Sequence[int]
) -> float:
    """Sampled contrastive loss for one example.

    inputs is a single id (skip-gram) or a sequence of context ids (CBOW,
    averaged). Negatives may collide with the target; collisions just add
    their term like any other noise word.
    """
    h = _hidden(model, inputs)
    u = model.output_weights
    c = model.output_biases
    pos_logit = float(h @ u[target_id]) + float(c[target_id])
    loss = float(np.logaddexp(0.0, -pos_logit))
    for neg in negative_ids:
        loss += float(np.logaddexp(0.0, float(h @ u[neg]) + float(c[neg])))
    return loss


def nce_gradients(
    model: W2VModel, inputs, target_id: int, negative_ids: Sequence[int]
) -> tuple[dict[int, np.ndarray], dict[int, np.ndarray], dict[int, float]]:
    """Analytic gradients of nce_forward, accumulated per parameter row.

    Returns (input-embedding row grads, output-weight row grads, output-bias
    grads); duplicate ids accumulate, so the result matches perturbing one
    stored row at a time.
    """
    h = _hidden(model, inputs)
    u = model.output_weights
    c = model.output_biases

    weight_grads: dict[int, np.ndarray] = {}
    bias_grads: dict[int, float] = {}

    g_pos = float(_sigmoid(np.float64(float(h @ u[target_id]) + float(c[target_id])))) - 1.0
    grad_h = g_pos * u[target_id].copy()
    weight_grads[target_id] = g_pos * h.copy()
    bias_grads[target_id] = g_pos
    for neg in negative_ids:
        neg = int(neg)
        g_neg = float(_sigmoid(np.float64(float(h @ u[neg]) + float(c[neg]))))
        grad_h = grad_h + g_neg * u[neg]
        weight_grads[neg] = weight_grads.get(neg, 0.0) + g_neg * h
        bias_grads[neg] = bias_grads.get(neg, 0.0) + g_neg

    input_grads: dict[int, np.ndarray] = {}
    if np.isscalar(inputs) or isinstance(inputs, (int, np.integer)):
        input_grads[int(inputs)] = grad_h
    else:
        share = grad_h / len(inputs)
        for idx in inputs:
            idx = int(idx)
            input_grads[idx] = input_grads.get(idx, 0.0) + share
    return input_grads, weight_grads, bias_grads


def _as_sentences(ids) -> list[list[int]]:
    seq = list(ids)
    if seq and isinstance(seq[0], (list, tuple, np.ndarray)):
        return [list(s) for s in seq]
    return [seq]


def _build_examples(sentences: list[list[int]], w: int, mode: str):
    """All training examples in corpus order; windows never cross sentences."""
    if mode == "cbow":
        ctx_rows, tgt = [], []
        for s in sentences:
            for t in range(w, len(s) - w):
                ctx_rows.append(s[t - w : t] + s[t + 1 : t + w + 1])
                tgt.append(s[t])
        return np.asarray(ctx_rows, np.int64).reshape(-1, 2 * w), np.asarray(tgt, np.int64)
    centers, ctxs = [], []
    for s in sentences:
        for t in range(w, len(s) - w):
            for q in list(range(t - w, t)) + list(range(t + 1, t + w + 1)):
                centers.append(s[t])
                ctxs.append(s[q])
    return np.asarray(centers, np.int64), np.asarray(ctxs, np.int64)


def _noise_distribution(sentences: list[list[int]], vocab_size: int) -> np.ndarray:
    counts = np.zeros(vocab_size)
    for s in sentences:
        np.add.at(counts, np.asarray(s, np.int64), 1.0)
    powered = counts**0.75
    total = powered.sum()
    if total == 0:
        raise ValueError("empty corpus: no tokens to build a noise distribution from")
    return np.cumsum(powered / total)


def _sample_negatives(
    rng: np.random.Generator,
    cum: np.ndarray,
    shape: tuple[int, int],
    targets: np.ndarray,
) -> np.ndarray:
    vocab_size = len(cum)
    negs = np.minimum(
        np.searchsorted(cum, rng.random(shape), side="right"), vocab_size - 1
    )
    # Re-draw negatives that hit the true target; after 100 rounds keep them.
    for _ in range(100):
        mask = negs == targets[:, None]
        hits = int(mask.sum())
        if hits == 0:
            break
        negs[mask] = np.minimum(
            np.searchsorted(cum, rng.random(hits), side="right"), vocab_size - 1
        )
    return negs


def train(
    ids,
    config: W2VConfig,
    vocab_size: int | None = None,
    progress: Callable[[int, float], None] | None = None,
    report_every: int = 1000,
) -> W2VModel:
    """Run num_steps batches of sampled-softmax SGD over the encoded corpus.

    ids is a flat id sequence or a list of sentences. The learning rate decays
    linearly to 10% of its initial value; batch gradients are averaged.
    Single-threaded and bit-reproducible for a given seed.
    """
    sentences = _as_sentences(ids)
    w = config.skip_window
    if vocab_size is None:
        vocab_size = max((max(s) for s in sentences if s), default=-1) + 1
        vocab_size = max(vocab_size, 2)

    if config.mode == "cbow":
        inputs_arr, targets_arr = _build_examples(sentences, w, "cbow")
    else:
        inputs_arr, targets_arr = _build_examples(sentences, w, "skipgram")
    n_examples = len(targets_arr)
    if n_examples == 0:
        raise ValueError(
            f"no sentence is longer than 2*skip_window={2 * w}; nothing to train on"
        )

    rng = np.random.default_rng(config.seed)
    dim = config.embedding_size
    model = W2VModel(
        input_embeddings=rng.uniform(-1.0, 1.0, (vocab_size, dim)),
        output_weights=rng.normal(0.0, 1.0 / np.sqrt(dim), (vocab_size, dim)),
        output_biases=np.zeros(vocab_size),
    )
    if config.num_steps == 0:
        return model

    cum = _noise_distribution(sentences, vocab_size)
    emb = model.input_embeddings
    out_w = model.output_weights
    out_b = model.output_biases
    batch = config.batch_size
    k_neg = config.negatives_per_example
    cursor = 0
    window_loss = 0.0
    window_n = 0

    for step in range(config.num_steps):
        rows = (cursor + np.arange(batch)) % n_examples
        cursor = (cursor + batch) % n_examples
        targets = targets_arr[rows]
        if config.mode == "cbow":
            ctx = inputs_arr[rows]                      # [B, 2w]
            hidden = emb[ctx].mean(axis=1)              # [B, D]
        else:
            centers = inputs_arr[rows]                  # [B]
            hidden = emb[centers]

        negs = _sample_negatives(rng, cum, (batch, k_neg), targets)

        u_t = out_w[targets]                            # [B, D]
        pos_logits = np.einsum("bd,bd->b", hidden, u_t) + out_b[targets]
        u_n = out_w[negs]                               # [B, K, D]
        neg_logits = np.einsum("bd,bkd->bk", hidden, u_n) + out_b[negs]

        losses = np.logaddexp(0.0, -pos_logits) + np.logaddexp(0.0, neg_logits).sum(axis=1)
        mean_loss = float(losses.mean())
        if not np.isfinite(mean_loss):
            raise TrainingDivergedError(
                f"non-finite loss at step {step}", epoch=step
            )

        g_pos = _sigmoid(pos_logits) - 1.0              # [B]
        g_neg = _sigmoid(neg_logits)                    # [B, K]
        grad_h = g_pos[:, None] * u_t + np.einsum("bk,bkd->bd", g_neg, u_n)

        lr = config.learning_rate * (1.0 - 0.9 * step / config.num_steps)
        scale = lr / batch
        np.add.at(out_w, targets, -scale * g_pos[:, None] * hidden)
        np.add.at(out_b, targets, -scale * g_pos)
        flat_negs = negs.reshape(-1)
        np.add.at(out_w, flat_negs, -scale * (g_neg[:, :, None] * hidden[:, None, :]).reshape(-1, dim))
        np.add.at(out_b, flat_negs, -scale * g_neg.reshape(-1))
        if config.mode == "cbow":
            np.add.at(emb, ctx.reshape(-1), -(scale / (2 * w)) * np.repeat(grad_h, 2 * w, axis=0))
        else:
            np.add.at(emb, centers, -scale * grad_h)

        window_loss += mean_loss
        window_n += 1
        if (step + 1) % report_every == 0 or step + 1 == config.num_steps:
            smoothed = window_loss / window_n
            model.loss_history.append((step + 1, smoothed))
            if progress is not None:
                progress(step + 1, smoothed)
            window_loss = 0.0
            window_n = 0
    return model


def final_vectors(model: W2VModel) -> np.ndarray:
    """The learned word vectors are the input embedding matrix."""
    return model.input_embeddings
