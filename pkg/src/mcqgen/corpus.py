"""Corpus ingestion and sentence segmentation.

Passages stream in from plain text (one passage per line) or JSON Lines
records.  Sentence boundaries are tracked as character spans into the
original passage text so that downstream offsets never need re-tokenizing.
"""

from __future__ import annotations

import json
from collections import Counter
from dataclasses import dataclass
from typing import Iterator

from .errors import CorpusFormatError

_TERMINATORS = ".!?"

#: Accepted values for the ``format`` argument of :func:`load_corpus`.
CORPUS_FORMATS = ("plain-lines", "jsonl")


@dataclass(frozen=True)
class Passage:
    """A unit of source text with precomputed sentence spans.

    ``sentence_spans`` are half-open ``(start, end)`` character offsets into
    ``text``, sorted and non-overlapping.
    """

    id: str
    text: str
    sentence_spans: tuple[tuple[int, int], ...]

    @classmethod
    def from_text(cls, id: str, text: str) -> "Passage":
        return cls(id=id, text=text, sentence_spans=tuple(split_sentences(text)))

    def sentence_at(self, span: tuple[int, int]) -> tuple[int, int] | None:
        """Return the sentence span containing ``span``, or None."""
        start, end = span
        for s, e in self.sentence_spans:
            if s <= start and end <= e:
                return (s, e)
        return None


def _is_initial(text: str, dot: int) -> bool:
    # A period ending a single uppercase letter ("J. Smith") is an initial,
    # not a sentence boundary.
    if dot == 0 or not text[dot - 1].isupper():
        return False
    return dot - 2 < 0 or text[dot - 2].isspace()


def split_sentences(text: str) -> list[tuple[int, int]]:
    """Split ``text`` into sentence spans.

    A sentence ends at '.', '!' or '?' followed by whitespace or end of
    text, except periods that terminate single-letter initials.  Leading
    and trailing whitespace is excluded from each span; whitespace-only
    segments are dropped.  The spans partition the non-whitespace content.
    """
    n = len(text)
    cuts = []
    for i, ch in enumerate(text):
        if ch not in _TERMINATORS:
            continue
        if i + 1 < n and not text[i + 1].isspace():
            continue
        if ch == "." and _is_initial(text, i):
            continue
        cuts.append(i + 1)
    cuts.append(n)

    spans = []
    start = 0
    for cut in cuts:
        s, e = start, cut
        while s < e and text[s].isspace():
            s += 1
        while e > s and text[e - 1].isspace():
            e -= 1
        if e > s:
            spans.append((s, e))
        start = cut
    return spans


def _decoded_lines(path: str) -> Iterator[str]:
    # Decode line by line so the error can report a byte offset.  A '\n'
    # byte never occurs inside a multi-byte UTF-8 sequence, so splitting
    # on raw lines before decoding is safe.
    offset = 0
    with open(path, "rb") as fh:
        for raw in fh:
            try:
                yield raw.decode("utf-8")
            except UnicodeDecodeError as exc:
                raise CorpusFormatError(
                    f"{path}: invalid UTF-8 at byte {offset + exc.start}",
                    byte_offset=offset + exc.start,
                ) from exc
            offset += len(raw)


def load_corpus(
    path: str,
    format: str = "plain-lines",
    skip_tally: Counter | None = None,
) -> Iterator[Passage]:
    """Stream passages from ``path``.

    ``format`` selects the file layout:

    * ``plain-lines``: one passage per non-empty line; the passage id is
      the 0-based line index as a string.
    * ``jsonl``: one JSON object per line with fields ``id`` and ``text``.
      Records without a usable ``text`` string (or that fail to parse) are
      skipped and counted in ``skip_tally``; a missing ``id`` falls back
      to the line index.

    The stream never holds more than one passage in memory.  Undecodable
    bytes raise :class:`CorpusFormatError` with the byte offset.

    Args:
        path: file to read.
        format: one of :data:`CORPUS_FORMATS`.
        skip_tally: optional counter collecting skip reasons.

    Yields:
        Passage objects in file order.
    """
    if format not in CORPUS_FORMATS:
        raise ValueError(f"unknown corpus format: {format!r}")
    tally = skip_tally if skip_tally is not None else Counter()

    for lineno, line in enumerate(_decoded_lines(path)):
        line = line.rstrip("\n").rstrip("\r")
        if format == "plain-lines":
            if line == "":
                continue
            yield Passage.from_text(str(lineno), line)
            continue

        if line == "":
            continue
        try:
            record = json.loads(line)
        except json.JSONDecodeError:
            tally["invalid-json"] += 1
            continue
        if not isinstance(record, dict) or not isinstance(record.get("text"), str):
            tally["missing-text"] += 1
            continue
        raw_id = record.get("id")
        pid = str(raw_id) if raw_id is not None else str(lineno)
        yield Passage.from_text(pid, record["text"])
