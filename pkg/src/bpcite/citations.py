"""Explicit citation detection and removal.

Binding precedents are cited with phrases like "Súmula Vinculante nº 14".
Detection is case- and accent-insensitive and runs configurable regex
patterns, each capturing the precedent number, over an accent-folded copy
of the text (index-aligned with the original).
"""

from __future__ import annotations

import logging
import re
from pathlib import Path

from .textproc import Span, fold_accents

logger = logging.getLogger(__name__)

# The "verbete vinculante ... da súmula" phrasing is deliberately NOT part
# of the defaults: documents using it count as unlabeled, which keeps them
# available as ground truth when probing the potential-citation model.
DEFAULT_CITATION_PATTERNS = (
    r"s[uú]mula\s+vinculante(?:\s+de)?\s*(?:n(?:um(?:ero)?)?\s*[.ºo°ª]*\s*)?(\d+)",
)


def load_patterns(path: str | Path) -> tuple[str, ...]:
    """Read a pattern list: UTF-8, one regex per line, blanks ignored."""
    lines = Path(path).read_text("utf-8").splitlines()
    return tuple(line.strip() for line in lines if line.strip())


def _compile(patterns) -> list[re.Pattern[str]]:
    if not patterns:
        raise ValueError("pattern list must be non-empty")
    # Patterns are folded like the text so accented pattern text still maps.
    return [re.compile(fold_accents(p), re.IGNORECASE) for p in patterns]


def detect_explicit_citations(
    body: str, patterns=DEFAULT_CITATION_PATTERNS
) -> list[tuple[int, Span]]:
    """Find explicit citations; returns (bp_id, span) sorted by span start.

    Spans index into the original text. A match whose captured number is
    not a positive integer is discarded with a warning.
    """
    folded = fold_accents(body)
    found: set[tuple[int, Span]] = set()
    for pattern in _compile(patterns):
        for match in pattern.finditer(folded):
            raw = match.group(1)
            try:
                bp_id = int(raw)
            except (ValueError, TypeError):
                bp_id = 0
            if bp_id <= 0:
                logger.warning("discarding citation match with number %r", raw)
                continue
            found.add((bp_id, (match.start(), match.end())))
    return sorted(found, key=lambda hit: (hit[1], hit[0]))


def strip_explicit_citations(body: str, patterns=DEFAULT_CITATION_PATTERNS) -> str:
    """Blank out every explicit citation (each span becomes one space).

    Iterates to a fixpoint: removing a citation can butt two fragments
    together and expose a new match, so detection is re-run until clean.
    Idempotent; detect_explicit_citations on the result returns [].
    """
    text = body
    for _ in range(32):
        hits = detect_explicit_citations(text, patterns)
        if not hits:
            return text
        pieces = []
        pos = 0
        for _, (start, end) in hits:
            if start < pos:  # overlapping matches from distinct patterns
                continue
            pieces.append(text[pos:start])
            pieces.append(" ")
            pos = end
        pieces.append(text[pos:])
        text = "".join(pieces)
    raise RuntimeError("citation stripping did not converge")
