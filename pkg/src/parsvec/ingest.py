"""Readers for the three corpus layouts: word+tag lines, HTML documents, plain text."""

from __future__ import annotations

from dataclasses import dataclass
from html.parser import HTMLParser
from pathlib import Path
from typing import Iterable, Sequence

# Metadata lines dropped from extracted HTML, matched by prefix after stripping.
DEFAULT_BOILERPLATE_PREFIXES = (
    "Hamshahri corpus document",
    "DOC ID",
    "Date of Document",
)


class MalformedLineError(ValueError):
    """A tagged-corpus line that cannot be split into surface and tag."""

    def __init__(self, message: str, lineno: int | None = None):
        super().__init__(message)
        self.lineno = lineno


class ExtractionError(ValueError):
    """HTML text extraction failed for a document."""

    def __init__(self, message: str, source_id: str = ""):
        super().__init__(message)
        self.source_id = source_id


@dataclass(frozen=True)
class TaggedLine:
    surface: str  # may contain internal spaces ("ستاره ها")
    tag: str


@dataclass(frozen=True)
class RawDocument:
    source_id: str
    body: str


def parse_lbl_line(line: str, lineno: int | None = None) -> TaggedLine:
    """Split one word+tag line; the last field is the tag, the rest is the surface."""
    fields = line.split()
    if len(fields) < 2:
        raise MalformedLineError(
            f"expected 'surface tag', got {line.strip()!r}"
            + (f" (line {lineno})" if lineno is not None else ""),
            lineno=lineno,
        )
    return TaggedLine(surface=" ".join(fields[:-1]), tag=fields[-1])


def parse_lbl_text(text: str) -> list[TaggedLine]:
    """Parse a whole word+tag file; blank lines are skipped."""
    lines = []
    for lineno, raw in enumerate(text.split("\n"), start=1):
        if not raw.strip():
            continue
        lines.append(parse_lbl_line(raw, lineno=lineno))
    return lines


def strip_tags(lines: Sequence[TaggedLine]) -> str:
    """Join surfaces with single spaces, discarding tags. DELM punctuation stays."""
    return " ".join(item.surface for item in lines)


class _TextExtractor(HTMLParser):
    """Collects visible text; head/script/style/title content is dropped.

    Breaking tags (<br>, <p>, ...) open a new line so header lines can be
    filtered individually afterwards.
    """

    _SKIPPED = {"head", "script", "style", "title"}
    _BREAKING = {"br", "p", "div", "li", "tr", "td", "h1", "h2", "h3", "h4", "h5", "h6"}

    def __init__(self):
        super().__init__(convert_charrefs=True)
        self.lines: list[list[str]] = [[]]
        self._skip_depth = 0

    def _break(self):
        if self.lines[-1]:
            self.lines.append([])

    def handle_starttag(self, tag, attrs):
        if tag in self._SKIPPED:
            self._skip_depth += 1
        elif tag == "body":
            # An unclosed <head> must not swallow the document body.
            self._skip_depth = 0
        if tag in self._BREAKING:
            self._break()

    def handle_endtag(self, tag):
        if tag in self._SKIPPED and self._skip_depth > 0:
            self._skip_depth -= 1
        if tag in self._BREAKING:
            self._break()

    def handle_data(self, data):
        if self._skip_depth == 0 and data:
            # Literal angle brackets (e.g. from &lt;) never reach the corpus.
            data = data.replace("<", " ").replace(">", " ")
            for i, piece in enumerate(data.split("\n")):
                if i > 0:
                    self._break()
                if piece.strip():
                    self.lines[-1].append(piece)


def extract_html_text(
    doc: RawDocument,
    boilerplate_prefixes: Sequence[str] = DEFAULT_BOILERPLATE_PREFIXES,
) -> str:
    """Extract body text from an HTML document, dropping markup and header lines."""
    parser = _TextExtractor()
    try:
        parser.feed(doc.body)
        parser.close()
    except Exception as exc:
        raise ExtractionError(
            f"cannot extract text from {doc.source_id!r}: {exc}", source_id=doc.source_id
        ) from exc

    kept = []
    for pieces in parser.lines:
        line = " ".join(" ".join(pieces).split())
        if not line:
            continue
        if any(line.startswith(prefix) for prefix in boilerplate_prefixes):
            continue
        kept.append(line)
    return " ".join(kept)


def merge_corpora(texts: Sequence[str]) -> str:
    """Concatenate corpus texts in the given order, one newline between them."""
    return "\n".join(texts)


def read_text_strict(path: str | Path) -> str:
    """Read a file as UTF-8; anything else is rejected, never transcoded."""
    data = Path(path).read_bytes()
    try:
        return data.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise UnicodeDecodeError(
            exc.encoding, exc.object, exc.start, exc.end, f"{path} is not valid UTF-8"
        ) from None


def iter_corpus_files(paths: Iterable[str | Path]) -> list[Path]:
    """Expand files and directories; directory contents in lexicographic order."""
    out: list[Path] = []
    for p in paths:
        p = Path(p)
        if p.is_dir():
            out.extend(sorted(q for q in p.rglob("*") if q.is_file()))
        else:
            out.append(p)
    return out
