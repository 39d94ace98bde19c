"""Weighted least-squares embedding trainer over a co-occurrence matrix.

Each nonzero count x_ij contributes f(x_ij) * (w_i . w~_j + b_i + b~_j - ln x_ij)^2
to the objective, where f caps the influence of very frequent pairs. Main and
context parameters are kept separate; on a symmetric matrix a shared set would
make the two factor roles collapse.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .cooccur import CooccurrenceMatrix


class TrainingDivergedError(RuntimeError):
    def __init__(self, message: str, epoch: int, entry: tuple[int, int] | None = None):
        super().__init__(message)
        self.epoch = epoch
        self.entry = entry


@dataclass
class GloveConfig:
    batch_size: int = 64
    embedding_size: int = 128
    context_size: int = 5
    min_occurrences: int = 1
    x_max: float = 100.0
    learning_rate: float = 0.05
    alpha: float = 0.75
    num_epochs: int = 20
    seed: int = 1

    def __post_init__(self):
        positives = (
            self.batch_size,
            self.embedding_size,
            self.context_size,
            self.min_occurrences,
            self.x_max,
            self.learning_rate,
            self.num_epochs,
        )
        if any(v <= 0 for v in positives):
            raise ValueError("all hyperparameters must be positive")
        if not 0 < self.alpha <= 1:
            raise ValueError("alpha must be in (0, 1]")


@dataclass
class GloveModel:
    main_vectors: np.ndarray      # vocab_size x D
    context_vectors: np.ndarray   # vocab_size x D
    main_biases: np.ndarray       # vocab_size
    context_biases: np.ndarray    # vocab_size
    objective_history: list[float] = field(default_factory=list)


def weight(x: float, x_max: float = 100.0, alpha: float = 0.75) -> float:
    """Co-occurrence weight: (x/x_max)^alpha below the cap, 1 at and above it."""
    if x < x_max:
        return (x / x_max) ** alpha
    return 1.0


def _weights(x: np.ndarray, x_max: float, alpha: float) -> np.ndarray:
    return np.where(x < x_max, (x / x_max) ** alpha, 1.0)


def pair_cost(model: GloveModel, i: int, j: int, x_ij: float, config: GloveConfig) -> float:
    """Weighted squared residual of one matrix entry."""
    r = (
        float(model.main_vectors[i] @ model.context_vectors[j])
        + float(model.main_biases[i])
        + float(model.context_biases[j])
        - np.log(x_ij)
    )
    return weight(x_ij, config.x_max, config.alpha) * r * r


def pair_gradients(
    model: GloveModel, i: int, j: int, x_ij: float, config: GloveConfig
) -> tuple[np.ndarray, np.ndarray, float, float]:
    """Analytic gradients of pair_cost w.r.t. (w_i, w~_j, b_i, b~_j)."""
    w_i = model.main_vectors[i]
    w_j = model.context_vectors[j]
    r = (
        float(w_i @ w_j)
        + float(model.main_biases[i])
        + float(model.context_biases[j])
        - np.log(x_ij)
    )
    g = 2.0 * weight(x_ij, config.x_max, config.alpha) * r
    return g * w_j, g * w_i, g, g


def _init_model(vocab_size: int, config: GloveConfig) -> tuple[GloveModel, np.random.Generator]:
    rng = np.random.default_rng(config.seed)
    scale = 0.5 / config.embedding_size
    shape = (vocab_size, config.embedding_size)
    model = GloveModel(
        main_vectors=rng.uniform(-scale, scale, shape),
        context_vectors=rng.uniform(-scale, scale, shape),
        main_biases=np.zeros(vocab_size),
        context_biases=np.zeros(vocab_size),
    )
    return model, rng


def objective(matrix: CooccurrenceMatrix, model: GloveModel, config: GloveConfig) -> float:
    """Total weighted squared error over all nonzero entries."""
    rows, cols, xs = _entry_arrays(matrix)
    if len(rows) == 0:
        return 0.0
    r = (
        np.einsum("nd,nd->n", model.main_vectors[rows], model.context_vectors[cols])
        + model.main_biases[rows]
        + model.context_biases[cols]
        - np.log(xs)
    )
    return float(np.sum(_weights(xs, config.x_max, config.alpha) * r * r))


def _entry_arrays(matrix: CooccurrenceMatrix) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    triples = list(matrix.entries())
    if not triples:
        return np.empty(0, np.int64), np.empty(0, np.int64), np.empty(0)
    rows, cols, xs = zip(*triples)
    return np.asarray(rows, np.int64), np.asarray(cols, np.int64), np.asarray(xs)


def train(
    matrix: CooccurrenceMatrix,
    config: GloveConfig,
    progress: Callable[[int, float], None] | None = None,
) -> GloveModel:
    """Minimize the objective with per-entry adaptive gradient steps.

    Entries are shuffled per epoch with the seeded generator; each parameter
    carries its own accumulated squared gradient (initialized to 1.0) that
    scales the step. Single-threaded and bit-reproducible for a given seed.
    """
    rows, cols, xs = _entry_arrays(matrix)
    n = len(rows)
    if n == 0:
        raise ValueError("co-occurrence matrix is empty; nothing to train on")

    model, rng = _init_model(matrix.vocab_size, config)
    ln_x = np.log(xs)
    fx = _weights(xs, config.x_max, config.alpha)

    W = model.main_vectors
    C = model.context_vectors
    b = model.main_biases
    bc = model.context_biases
    grad_sq_w = np.ones_like(W)
    grad_sq_c = np.ones_like(C)
    grad_sq_b = np.ones_like(b)
    grad_sq_bc = np.ones_like(bc)

    lr = config.learning_rate
    model.objective_history.append(objective(matrix, model, config))

    step = 0
    batch_cost = 0.0
    batch_fill = 0
    for epoch in range(config.num_epochs):
        for k in rng.permutation(n):
            i = rows[k]
            j = cols[k]
            w_i = W[i]
            c_j = C[j]
            r = float(w_i @ c_j) + b[i] + bc[j] - ln_x[k]
            if not np.isfinite(r):
                raise TrainingDivergedError(
                    f"non-finite residual at epoch {epoch}, entry ({i},{j})",
                    epoch=epoch,
                    entry=(int(i), int(j)),
                )
            g = 2.0 * fx[k] * r
            grad_w = g * c_j
            grad_c = g * w_i

            grad_sq_w[i] += grad_w * grad_w
            w_i -= lr * grad_w / np.sqrt(grad_sq_w[i])
            grad_sq_c[j] += grad_c * grad_c
            c_j -= lr * grad_c / np.sqrt(grad_sq_c[j])
            g_sq = g * g
            grad_sq_b[i] += g_sq
            b[i] -= lr * g / np.sqrt(grad_sq_b[i])
            grad_sq_bc[j] += g_sq
            bc[j] -= lr * g / np.sqrt(grad_sq_bc[j])

            batch_cost += fx[k] * r * r
            batch_fill += 1
            if batch_fill == config.batch_size:
                step += 1
                if progress is not None:
                    progress(step, batch_cost / batch_fill)
                batch_cost = 0.0
                batch_fill = 0

        epoch_objective = objective(matrix, model, config)
        if not np.isfinite(epoch_objective):
            raise TrainingDivergedError(
                f"objective diverged at epoch {epoch}", epoch=epoch
            )
        model.objective_history.append(epoch_objective)
    return model


def final_vectors(model: GloveModel, main_only: bool = False) -> np.ndarray:
    """Emitted word vectors: row-wise sum of main and context vectors."""
    if main_only:
        return model.main_vectors.copy()
    return model.main_vectors + model.context_vectors
