"""Command-line pipeline: ingest -> normalize -> vocabulary -> train -> query.

Exit codes: 0 success, 1 I/O or parse failure, 2 user error (unknown word,
bad flag combination).
"""

from __future__ import annotations

import argparse
import hashlib
import sys
import time
from pathlib import Path

import numpy as np

from . import cooccur, glove, word2vec
from .embedding_io import EmbeddingSet, read_embeddings, write_vectors, write_vocab
from .ingest import (
    DEFAULT_BOILERPLATE_PREFIXES,
    ExtractionError,
    MalformedLineError,
    RawDocument,
    extract_html_text,
    iter_corpus_files,
    merge_corpora,
    parse_lbl_text,
    read_text_strict,
    strip_tags,
)
from .normalize import AffixRuleSet, MarkSet, load_rules, normalize_pipeline
from .vocab import build_vocabulary
from .word2vec import count_examples

FORMATS = ("lbl", "html", "plain")
TRAINERS = ("glove", "cbow", "skipgram")


def _file_to_text(path: Path, fmt: str, boilerplate: tuple[str, ...]) -> str:
    raw = read_text_strict(path)
    if fmt == "lbl":
        try:
            return strip_tags(parse_lbl_text(raw))
        except MalformedLineError as exc:
            raise MalformedLineError(f"{path}:{exc.lineno}: {exc}", exc.lineno) from None
    if fmt == "html":
        return extract_html_text(RawDocument(str(path), raw), boilerplate)
    return raw


def _ingest_texts(args) -> tuple[list[Path], list[str]]:
    files = iter_corpus_files(args.inputs)
    boilerplate = tuple(args.drop_prefix) if args.drop_prefix else DEFAULT_BOILERPLATE_PREFIXES
    texts = [_file_to_text(path, args.format, boilerplate) for path in files]
    return files, texts


def cmd_ingest(args) -> int:
    files, texts = _ingest_texts(args)
    if not files:
        print("warning: no input files found", file=sys.stderr)
    for path, text in zip(files, texts):
        n_lines = read_text_strict(path).count("\n") + 1
        print(f"{path}: {n_lines} lines, {len(text.split())} tokens", file=sys.stderr)
    merged = merge_corpora(texts)
    Path(args.out).write_text(merged, encoding="utf-8")
    print(f"wrote {args.out} ({len(merged.split())} tokens)", file=sys.stderr)
    return 0


def _corpus_cache_key(files, texts_key_parts) -> str:
    digest = hashlib.sha256()
    for part in texts_key_parts:
        digest.update(part.encode("utf-8"))
        digest.update(b"\x00")
    for path in files:
        digest.update(str(path).encode("utf-8"))
        digest.update(b"\x00")
        digest.update(Path(path).read_bytes())
        digest.update(b"\x00")
    return digest.hexdigest()[:16]


def _load_merged_corpus(args, cache_dir: Path) -> tuple[str, str]:
    """Parse and merge the inputs, reusing a content-addressed cache file."""
    files = iter_corpus_files(args.inputs)
    boilerplate = tuple(args.drop_prefix) if args.drop_prefix else DEFAULT_BOILERPLATE_PREFIXES
    key = _corpus_cache_key(files, [args.format, *boilerplate])
    cache_file = cache_dir / f"merged-{key}.txt"
    if cache_file.exists():
        print(f"reusing cached corpus {cache_file}", file=sys.stderr)
        return cache_file.read_text(encoding="utf-8"), key
    texts = [_file_to_text(path, args.format, boilerplate) for path in files]
    merged = merge_corpora(texts)
    cache_dir.mkdir(parents=True, exist_ok=True)
    cache_file.write_text(merged, encoding="utf-8")
    return merged, key


class _ProgressWriter:
    def __init__(self, csv_path: str | None, echo_every: int):
        self._csv = open(csv_path, "w", encoding="utf-8") if csv_path else None
        if self._csv:
            self._csv.write("step,loss\n")
        self._echo_every = echo_every
        self._calls = 0
        self.last_loss = float("nan")

    def __call__(self, step: int, loss: float) -> None:
        self._calls += 1
        self.last_loss = loss
        if self._csv:
            self._csv.write(f"{step},{loss:.10g}\n")
        if self._calls % self._echo_every == 0:
            print(f"step {step}: loss {loss:.6f}", file=sys.stderr)

    def close(self) -> None:
        if self._csv:
            self._csv.close()


def _train_glove(args, encoded, vocab_size, cache_dir, corpus_key, progress):
    cooc_key = f"{corpus_key}-c{args.context_size}-m{args.min_occurrences}" + (
        "-flat" if args.flat_window else ""
    )
    cooc_file = cache_dir / f"cooc-{cooc_key}.bin"
    if cooc_file.exists():
        print(f"reusing cached co-occurrence {cooc_file}", file=sys.stderr)
        matrix = cooccur.read_spill(cooc_file, vocab_size)
    else:
        matrix = cooccur.accumulate(
            encoded, args.context_size, vocab_size, flat_window=args.flat_window
        )
        cache_dir.mkdir(parents=True, exist_ok=True)
        cooccur.write_spill(matrix, cooc_file)
    config = glove.GloveConfig(
        batch_size=args.batch_size,
        embedding_size=args.embedding_size,
        context_size=args.context_size,
        min_occurrences=args.min_occurrences,
        x_max=args.x_max,
        learning_rate=args.learning_rate,
        alpha=args.alpha,
        num_epochs=args.num_epochs,
        seed=args.seed,
    )
    model = glove.train(matrix, config, progress=progress)
    vectors = glove.final_vectors(model, main_only=args.main_only)
    return vectors, model.objective_history[-1]


def _train_w2v(args, encoded, vocab_size, progress):
    num_steps = args.num_steps
    if args.num_epochs is not None:
        examples = count_examples(encoded, args.skip_window, args.trainer)
        num_steps = max(1, (examples * args.num_epochs + args.batch_size - 1) // args.batch_size)
        print(f"{examples} examples -> {num_steps} steps", file=sys.stderr)
    config = word2vec.W2VConfig(
        batch_size=args.batch_size,
        embedding_size=args.embedding_size,
        skip_window=args.skip_window,
        num_steps=num_steps,
        negatives_per_example=args.negatives,
        learning_rate=args.learning_rate,
        seed=args.seed,
        mode=args.trainer,
    )
    model = word2vec.train(encoded, config, vocab_size=vocab_size, progress=progress)
    last_loss = model.loss_history[-1][1] if model.loss_history else float("nan")
    return word2vec.final_vectors(model), last_loss


def cmd_train(args) -> int:
    started = time.perf_counter()
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    cache_dir = out_dir / "cache"

    if args.rules:
        rules, marks = load_rules(args.rules)
    else:
        rules, marks = AffixRuleSet(), MarkSet()

    merged, corpus_key = _load_merged_corpus(args, cache_dir)
    stream = normalize_pipeline(merged, rules, marks)
    vocab = build_vocabulary(stream, args.min_occurrences)
    encoded = vocab.encode(stream)
    print(
        f"{sum(len(s) for s in stream)} tokens, {len(stream)} sentences, "
        f"{len(vocab)} vocabulary entries",
        file=sys.stderr,
    )

    progress = _ProgressWriter(args.progress_csv, echo_every=args.echo_every)
    try:
        if args.trainer == "glove":
            vectors, final_loss = _train_glove(
                args, encoded, len(vocab), cache_dir, corpus_key, progress
            )
        else:
            vectors, final_loss = _train_w2v(args, encoded, len(vocab), progress)
    finally:
        progress.close()

    embeddings = EmbeddingSet(vocab=vocab, vectors=np.asarray(vectors, dtype=np.float64))
    vocab_path = out_dir / "vocab.txt"
    vectors_path = out_dir / "vectors.txt"
    write_vocab(vocab, vocab_path)
    write_vectors(embeddings, vectors_path)
    elapsed = time.perf_counter() - started
    print(f"final loss: {final_loss:.6f}")
    print(f"elapsed: {elapsed:.2f}s")
    print(f"wrote {vocab_path} and {vectors_path}")
    return 0


def cmd_query(args) -> int:
    embeddings = read_embeddings(args.vocab, args.vectors)
    try:
        neighbors = nearest(embeddings, args.word, args.k)
    except KeyError as exc:
        print(f"error: {exc.args[0]}", file=sys.stderr)
        return 2
    for neighbor in neighbors:
        print(f"{neighbor.word}\t{neighbor.score:.6f}")
    return 0


def _add_input_flags(sub):
    sub.add_argument("inputs", nargs="+", help="corpus files or directories")
    sub.add_argument("--format", choices=FORMATS, required=True)
    sub.add_argument(
        "--drop-prefix",
        action="append",
        default=None,
        help="extra boilerplate line prefix to drop from HTML text (repeatable)",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="parsvec",
        description="Persian corpus-to-embeddings pipeline: ingest, train, query.",
    )
    subs = parser.add_subparsers(dest="command", required=True)

    p_ingest = subs.add_parser("ingest", help="convert corpora to one plain-text file")
    _add_input_flags(p_ingest)
    p_ingest.add_argument("--out", required=True, help="merged plain-text output path")
    p_ingest.set_defaults(func=cmd_ingest)

    p_train = subs.add_parser("train", help="run the full pipeline and emit files")
    _add_input_flags(p_train)
    p_train.add_argument("--trainer", choices=TRAINERS, required=True)
    p_train.add_argument("--out-dir", required=True)
    p_train.add_argument("--rules", help="affix/mark configuration file")
    p_train.add_argument("--seed", type=int, default=1)
    p_train.add_argument("--threads", type=int, default=1, help="only 1 is implemented")
    p_train.add_argument("--batch-size", type=int, default=None)
    p_train.add_argument("--embedding-size", type=int, default=128)
    p_train.add_argument("--learning-rate", type=float, default=None)
    p_train.add_argument("--min-occurrences", type=int, default=1)
    p_train.add_argument("--num-epochs", type=int, default=None)
    # GloVe-only knobs
    p_train.add_argument("--context-size", type=int, default=5)
    p_train.add_argument("--x-max", type=float, default=100.0)
    p_train.add_argument("--alpha", type=float, default=0.75)
    p_train.add_argument("--flat-window", action="store_true", help="unit window counts instead of 1/d")
    p_train.add_argument("--main-only", action="store_true", help="emit main vectors without the context sum")
    # word2vec-only knobs
    p_train.add_argument("--skip-window", type=int, default=1)
    p_train.add_argument("--num-steps", type=int, default=100_000)
    p_train.add_argument("--negatives", type=int, default=64)
    p_train.add_argument("--progress-csv", help="write a step,loss CSV to this path")
    p_train.add_argument("--echo-every", type=int, default=10, help="stderr progress frequency")
    p_train.set_defaults(func=cmd_train)

    p_query = subs.add_parser("query", help="print nearest neighbors of a word")
    p_query.add_argument("vocab", help="vocabulary file")
    p_query.add_argument("vectors", help="vector file")
    p_query.add_argument("word")
    p_query.add_argument("-k", type=int, default=10)
    p_query.set_defaults(func=cmd_query)

    return parser


def _apply_trainer_defaults(args) -> None:
    if args.command != "train":
        return
    if args.trainer == "glove":
        if args.batch_size is None:
            args.batch_size = 64
        if args.learning_rate is None:
            args.learning_rate = 0.05
        if args.num_epochs is None:
            args.num_epochs = 20
    else:
        if args.batch_size is None:
            args.batch_size = 128
        if args.learning_rate is None:
            args.learning_rate = 1.0
    if args.threads != 1:
        print("warning: only --threads 1 is implemented; running single-threaded", file=sys.stderr)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    _apply_trainer_defaults(args)
    try:
        return args.func(args)
    except KeyError as exc:
        print(f"error: {exc.args[0]}", file=sys.stderr)
        return 2
    except (MalformedLineError, ExtractionError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except UnicodeDecodeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
