"""Rule-based named-entity extraction.

Sixteen entity types are recognized through two routes: five "value" types
(DATE, TIME, PERCENT, MONEY, QUANTITY) come from regular-expression
patterns over digits, month names, currency symbols and unit words; the
remaining eleven come from exact gazetteer lookup.  Overlaps are resolved
longest-span-first so each text position belongs to at most one mention.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache
from pathlib import Path
from typing import Iterable, Mapping

from .corpus import Passage
from .errors import AnnotationError, GazetteerError


class EntityType(str, Enum):
    PERSON = "PERSON"
    NORP = "NORP"
    FAC = "FAC"
    ORG = "ORG"
    GPE = "GPE"
    LOC = "LOC"
    PRODUCT = "PRODUCT"
    EVENT = "EVENT"
    WORK_OF_ART = "WORK_OF_ART"
    LAW = "LAW"
    LANGUAGE = "LANGUAGE"
    DATE = "DATE"
    TIME = "TIME"
    PERCENT = "PERCENT"
    MONEY = "MONEY"
    QUANTITY = "QUANTITY"


#: Types recognized by patterns rather than gazetteers.
PATTERN_TYPES = (
    EntityType.DATE,
    EntityType.TIME,
    EntityType.PERCENT,
    EntityType.MONEY,
    EntityType.QUANTITY,
)

#: Types recognized by gazetteer lookup.
GAZETTEER_TYPES = tuple(t for t in EntityType if t not in PATTERN_TYPES)

# Overlap tie-break order: pattern types outrank gazetteer types.
_PRIORITY = {t: i for i, t in enumerate(PATTERN_TYPES + GAZETTEER_TYPES)}


@dataclass(frozen=True)
class EntityMention:
    """One typed occurrence of an entity inside a passage.

    ``span`` is a half-open ``(start, end)`` character range and ``surface``
    always equals ``passage.text[start:end]``.
    """

    passage_id: str
    span: tuple[int, int]
    surface: str
    etype: EntityType


_WORD_RE = re.compile(r"\w+")

_MONTHS = (
    "January", "February", "March", "April", "May", "June", "July",
    "August", "September", "October", "November", "December",
)
_WEEKDAYS = (
    "Monday", "Tuesday", "Wednesday", "Thursday", "Friday", "Saturday",
    "Sunday",
)
_NUM = r"\d+(?:[.,]\d+)*"
_MONTH = "|".join(_MONTHS)
_MERIDIEM = r"a\.m\.|p\.m\.|am|pm|AM|PM"
_MAGNITUDE = r"thousand|million|billion|trillion"

#: Number + unit word defines QUANTITY.  Single-letter units are omitted as
#: too ambiguous, and "pounds" counts as weight here, not currency.
DEFAULT_UNITS = (
    "kilograms", "kilogram", "kg", "grams", "gram", "tonnes", "tonne",
    "tons", "ton", "pounds", "pound", "lbs", "lb", "ounces", "ounce", "oz",
    "kilometers", "kilometres", "kilometer", "kilometre", "km",
    "meters", "metres", "meter", "metre", "miles", "mile",
    "feet", "foot", "ft", "inches", "inch", "yards", "yard",
    "liters", "litres", "liter", "litre", "gallons", "gallon",
    "barrels", "barrel", "acres", "acre", "hectares", "hectare",
    "square kilometers", "square kilometres", "square miles", "square feet",
    "degrees Celsius", "degrees Fahrenheit", "degrees",
    "mph", "kph",
)


def _guarded(pattern: str) -> re.Pattern:
    # \b misbehaves next to punctuation ("p.m."), so guard both ends with
    # explicit alphanumeric look-arounds instead.
    return re.compile(rf"(?<![0-9A-Za-z])(?:{pattern})(?![0-9A-Za-z])")


_DATE_PATTERNS = [
    _guarded(r"\d{4}-\d{2}-\d{2}"),
    _guarded(rf"\d{{1,2}}(?:st|nd|rd|th)?\s(?:{_MONTH})(?:,?\s\d{{4}})?"),
    _guarded(rf"(?:{_MONTH})\s\d{{1,2}}(?:st|nd|rd|th)?(?:,?\s\d{{4}})?"),
    _guarded(rf"(?:{_MONTH})(?:\s\d{{4}})?"),
    _guarded(r"[12]\d{3}s?"),
    _guarded("|".join(_WEEKDAYS)),
    _guarded(r"today|yesterday|tomorrow"),
]

_TIME_PATTERNS = [
    _guarded(rf"\d{{1,2}}:\d{{2}}(?::\d{{2}})?(?:\s?(?:{_MERIDIEM}))?"),
    _guarded(rf"\d{{1,2}}\s?(?:{_MERIDIEM})"),
    _guarded(r"noon|midnight"),
]

_PERCENT_PATTERNS = [
    _guarded(rf"{_NUM}\s?(?:%|percentage points|percent|per cent)"),
]

_MONEY_PATTERNS = [
    _guarded(rf"[$€£¥]\s?{_NUM}(?:\s(?:{_MAGNITUDE}))?"),
    _guarded(
        rf"{_NUM}(?:\s(?:{_MAGNITUDE}))?"
        r"\s?(?:dollars?|cents?|euros?|yen|pounds sterling|USD|EUR|GBP)"
    ),
]


@lru_cache(maxsize=8)
def _quantity_patterns(units: tuple[str, ...]) -> tuple[re.Pattern, ...]:
    if not units:
        return ()
    # Longest alternative first, otherwise "metre" would shadow "metres".
    alts = "|".join(re.escape(u) for u in sorted(units, key=len, reverse=True))
    return (_guarded(rf"{_NUM}\s?(?:{alts})"),)


class GazetteerSet:
    """Immutable per-type surface dictionaries with longest-match lookup.

    Matching is exact (case-sensitive) and anchored at word starts: an
    entry whose first character is not alphanumeric is stored but never
    matched.  Lookup results are insensitive to the order entries were
    listed in.
    """

    def __init__(self, entries: Mapping[EntityType, Iterable[str]]):
        self._entries: dict[EntityType, frozenset[str]] = {}
        for etype, surfaces in entries.items():
            etype = EntityType(etype)
            if etype in PATTERN_TYPES:
                raise GazetteerError(f"{etype.value} is pattern-based, not gazetteer-based")
            self._entries[etype] = frozenset(s for s in surfaces if s)
        index: dict[str, list[tuple[str, EntityType]]] = {}
        for etype, surfaces in self._entries.items():
            for surface in surfaces:
                head = _WORD_RE.match(surface)
                if head is None:
                    continue
                index.setdefault(head.group(0), []).append((surface, etype))
        for bucket in index.values():
            bucket.sort(key=lambda it: (-len(it[0]), it[0], _PRIORITY[it[1]]))
        self._by_first_token = index

    @classmethod
    def empty(cls) -> "GazetteerSet":
        return cls({})

    @classmethod
    def load(cls, directory: str | Path) -> "GazetteerSet":
        """Load one file per type from ``directory`` (file stem = type name).

        Each file lists one surface form per line; blank lines are ignored.
        A file whose stem is not a gazetteer-backed type name raises
        :class:`GazetteerError`.
        """
        directory = Path(directory)
        if not directory.is_dir():
            raise GazetteerError(f"not a gazetteer directory: {directory}")
        entries: dict[EntityType, set[str]] = {}
        for path in sorted(directory.iterdir()):
            if not path.is_file():
                continue
            try:
                etype = EntityType(path.stem)
            except ValueError:
                raise GazetteerError(f"{path.name}: unknown entity type {path.stem!r}") from None
            if etype in PATTERN_TYPES:
                raise GazetteerError(f"{path.name}: {etype.value} is pattern-based")
            surfaces = entries.setdefault(etype, set())
            for line in path.read_text(encoding="utf-8").splitlines():
                line = line.strip()
                if line:
                    surfaces.add(line)
        return cls(entries)

    def surfaces(self, etype: EntityType) -> frozenset[str]:
        return self._entries.get(etype, frozenset())

    def all_surfaces(self) -> frozenset[str]:
        out: set[str] = set()
        for surfaces in self._entries.values():
            out.update(surfaces)
        return frozenset(out)

    def match(self, text: str) -> list[tuple[int, int, EntityType]]:
        """Return every gazetteer hit in ``text`` as ``(start, end, type)``.

        Hits may overlap; the caller resolves them.  A hit must start at a
        word start, and must not end in the middle of a word.
        """
        out = []
        for token in _WORD_RE.finditer(text):
            bucket = self._by_first_token.get(token.group(0))
            if not bucket:
                continue
            s = token.start()
            for surface, etype in bucket:
                if not text.startswith(surface, s):
                    continue
                e = s + len(surface)
                if surface[-1].isalnum() and e < len(text) and text[e].isalnum():
                    continue
                out.append((s, e, etype))
        return out


def _pattern_candidates(
    text: str, units: tuple[str, ...]
) -> list[tuple[int, int, EntityType]]:
    groups = (
        (EntityType.DATE, _DATE_PATTERNS),
        (EntityType.TIME, _TIME_PATTERNS),
        (EntityType.PERCENT, _PERCENT_PATTERNS),
        (EntityType.MONEY, _MONEY_PATTERNS),
        (EntityType.QUANTITY, _quantity_patterns(units)),
    )
    out = []
    for etype, patterns in groups:
        for pattern in patterns:
            for m in pattern.finditer(text):
                out.append((m.start(), m.end(), etype))
    return out


def _resolve_overlaps(
    candidates: list[tuple[int, int, EntityType]],
) -> list[tuple[int, int, EntityType]]:
    # Longest span wins; ties go to the leftmost start, then to the fixed
    # type priority.  Greedy acceptance keeps the result overlap-free.
    ordered = sorted(set(candidates), key=lambda c: (-(c[1] - c[0]), c[0], _PRIORITY[c[2]]))
    taken: list[tuple[int, int, EntityType]] = []
    for s, e, etype in ordered:
        if any(s < te and ts < e for ts, te, _ in taken):
            continue
        taken.append((s, e, etype))
    taken.sort(key=lambda c: c[0])
    return taken


def extract_entities(
    passage: Passage,
    gazetteers: GazetteerSet,
    *,
    units: Iterable[str] | None = None,
) -> list[EntityMention]:
    """Extract typed, non-overlapping entity mentions from a passage.

    Pattern hits and gazetteer hits compete under the longest-span rule.
    The returned mentions are sorted by start offset, and each surface is
    the exact passage slice for its span.

    Args:
        passage: source passage.
        gazetteers: surface dictionaries for the non-pattern types.
        units: unit words for QUANTITY; defaults to :data:`DEFAULT_UNITS`.
    """
    unit_key = DEFAULT_UNITS if units is None else tuple(sorted(set(units)))
    candidates = _pattern_candidates(passage.text, unit_key)
    candidates.extend(gazetteers.match(passage.text))
    return [
        EntityMention(passage.id, (s, e), passage.text[s:e], etype)
        for s, e, etype in _resolve_overlaps(candidates)
    ]


def load_annotations(
    path: str | Path,
) -> tuple[dict[str, list[EntityMention]], list[tuple[int, str]]]:
    """Read stand-off mention annotations from a tab-separated file.

    Each row is ``passage_id<TAB>start<TAB>end<TAB>type<TAB>surface``.
    Malformed rows (wrong field count, non-integer offsets, end <= start,
    unknown type) are collected as ``(line_number, reason)`` pairs rather
    than raising.  Whether a mention actually fits its passage is checked
    later by :func:`validate_mention`, once the passage text is at hand.

    Returns:
        ``(mentions_by_passage, row_errors)``; mentions keep file order.
    """
    mentions: dict[str, list[EntityMention]] = {}
    errors: list[tuple[int, str]] = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.rstrip("\n").rstrip("\r")
            if line == "":
                continue
            fields = line.split("\t")
            if len(fields) != 5:
                errors.append((lineno, f"expected 5 tab-separated fields, got {len(fields)}"))
                continue
            pid, start_s, end_s, type_s, surface = fields
            try:
                start, end = int(start_s), int(end_s)
            except ValueError:
                errors.append((lineno, "offsets must be integers"))
                continue
            if start < 0 or end <= start:
                errors.append((lineno, f"bad span ({start_s}, {end_s})"))
                continue
            try:
                etype = EntityType(type_s)
            except ValueError:
                errors.append((lineno, f"unknown type {type_s!r}"))
                continue
            mentions.setdefault(pid, []).append(
                EntityMention(pid, (start, end), surface, etype)
            )
    return mentions, errors


def validate_mention(passage: Passage, mention: EntityMention) -> None:
    """Raise :class:`AnnotationError` unless ``mention`` fits ``passage``."""
    start, end = mention.span
    if mention.passage_id != passage.id:
        raise AnnotationError(
            f"mention belongs to passage {mention.passage_id!r}, not {passage.id!r}"
        )
    if not (0 <= start < end <= len(passage.text)):
        raise AnnotationError(
            f"span ({start}, {end}) out of bounds for passage {passage.id!r}"
        )
    if passage.text[start:end] != mention.surface:
        raise AnnotationError(
            f"surface {mention.surface!r} does not match passage slice "
            f"{passage.text[start:end]!r}"
        )
