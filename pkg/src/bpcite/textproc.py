"""Normalization and segmentation for Portuguese legal text.

Normalization lowercases, tokenizes, drops punctuation and stopwords, and
reduces tokens with a deterministic suffix stemmer. Segmentation produces
character spans for paragraphs (blank-line separated) and sentences
(terminal punctuation with an abbreviation exception list).
"""

from __future__ import annotations

import hashlib
import re
import unicodedata
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

Span = tuple[int, int]

TokenSeq = list[str]


class ConfigError(ValueError):
    """A normalizer configuration names an unknown resource."""


def fold_accents(text: str) -> str:
    """Replace each accented character by its base character.

    Length-preserving: every input character maps to exactly one output
    character, so indices into the folded text are valid in the original.
    Combining marks already present in decomposed input are kept as-is.
    """
    out = []
    for ch in text:
        base = unicodedata.normalize("NFD", ch)[0]
        out.append(ch if unicodedata.combining(base) else base)
    return "".join(out)


# ---------------------------------------------------------------------------
# Stopwords


def load_stopwords(name: str) -> frozenset[str]:
    """Resolve a stopword list id: "pt" (bundled), "none", or a file path."""
    if name == "none":
        return frozenset()
    if name == "pt":
        data = resources.files("bpcite.data").joinpath("stopwords_pt.txt").read_text("utf-8")
    else:
        path = Path(name)
        if not path.is_file():
            raise ConfigError(f"unknown stopword list: {name!r}")
        data = path.read_text("utf-8")
    return frozenset(w.strip().lower() for w in data.splitlines() if w.strip())


# ---------------------------------------------------------------------------
# Stemming

# Each rule is (suffix, min_remaining_stem, replacement); within a phase the
# first matching rule fires (tables keep longer suffixes first) and the
# rest of the phase is skipped.

_PLURAL_RULES = [
    ("ões", 2, "ão"),
    ("ães", 2, "ão"),
    ("ais", 2, "al"),
    ("éis", 2, "el"),
    ("eis", 2, "el"),
    ("óis", 2, "ol"),
    ("ns", 2, "m"),
    ("s", 3, ""),
]

_NOUN_RULES = [
    ("amentos", 3, ""),
    ("imentos", 3, ""),
    ("amento", 3, ""),
    ("imento", 3, ""),
    ("adoras", 3, ""),
    ("adores", 3, ""),
    ("adora", 3, ""),
    ("ador", 3, ""),
    ("idades", 3, ""),
    ("idade", 3, ""),
    ("ância", 3, ""),
    ("ência", 3, ""),
    ("ancia", 3, ""),
    ("encia", 3, ""),
    ("mente", 4, ""),
    ("ização", 4, ""),
    ("izaçao", 4, ""),
    ("ação", 3, ""),
    ("ção", 4, ""),
    ("ável", 3, ""),
    ("avel", 3, ""),
    ("ível", 3, ""),
    ("ivel", 3, ""),
    ("ista", 3, ""),
    ("ismo", 3, ""),
    ("agem", 3, ""),
    ("osos", 3, ""),
    ("osas", 3, ""),
    ("oso", 3, ""),
    ("osa", 3, ""),
    ("ico", 3, ""),
    ("ica", 3, ""),
    ("ivo", 3, ""),
    ("iva", 3, ""),
    ("eza", 3, ""),
    ("ão", 4, ""),
]

_VERB_RULES = [
    ("aríamos", 2, ""),
    ("eríamos", 2, ""),
    ("iríamos", 2, ""),
    ("ássemos", 2, ""),
    ("êssemos", 2, ""),
    ("íssemos", 2, ""),
    ("aremos", 2, ""),
    ("eremos", 2, ""),
    ("iremos", 2, ""),
    ("ávamos", 2, ""),
    ("íamos", 2, ""),
    ("ariam", 2, ""),
    ("eriam", 2, ""),
    ("iriam", 2, ""),
    ("assem", 2, ""),
    ("essem", 2, ""),
    ("issem", 2, ""),
    ("aram", 2, ""),
    ("eram", 2, ""),
    ("iram", 2, ""),
    ("avam", 2, ""),
    ("arem", 2, ""),
    ("erem", 2, ""),
    ("irem", 2, ""),
    ("ando", 2, ""),
    ("endo", 2, ""),
    ("indo", 2, ""),
    ("arão", 2, ""),
    ("erão", 2, ""),
    ("irão", 2, ""),
    ("aria", 2, ""),
    ("eria", 2, ""),
    ("iria", 2, ""),
    ("asse", 2, ""),
    ("esse", 2, ""),
    ("isse", 2, ""),
    ("amos", 2, ""),
    ("emos", 2, ""),
    ("imos", 2, ""),
    ("ado", 2, ""),
    ("ido", 2, ""),
    ("ada", 2, ""),
    ("ida", 2, ""),
    ("ara", 2, ""),
    ("era", 2, ""),
    ("ira", 2, ""),
    ("ava", 2, ""),
    ("ará", 2, ""),
    ("erá", 2, ""),
    ("irá", 2, ""),
    ("am", 2, ""),
    ("em", 2, ""),
    ("ou", 2, ""),
    ("iu", 2, ""),
    ("eu", 2, ""),
    ("ei", 2, ""),
    ("ar", 2, ""),
    ("er", 2, ""),
    ("ir", 2, ""),
    ("ia", 3, ""),
]


def _apply_rules(token: str, rules) -> tuple[str, bool]:
    for suffix, min_stem, repl in rules:
        if token.endswith(suffix) and len(token) - len(suffix) >= min_stem:
            return token[: -len(suffix)] + repl, True
    return token, False


def stem_pt(token: str) -> str:
    """Deterministic suffix stemmer for Portuguese.

    Phases: plural, noun suffix, verb ending (skipped when a noun suffix
    fired), final vowel, accent folding. Not a lemmatizer; its purpose is
    to map inflections of the same word to one index term.
    """
    token, _ = _apply_rules(token, _PLURAL_RULES)
    token, noun = _apply_rules(token, _NOUN_RULES)
    if not noun:
        token, verb = _apply_rules(token, _VERB_RULES)
        if not verb and len(token) >= 4 and token[-1] in "aeo":
            token = token[:-1]
    return fold_accents(token)


_STEMMERS = {
    "pt-light": stem_pt,
    "none": lambda token: token,
}


# ---------------------------------------------------------------------------
# Normalization

_TOKEN_RE = re.compile(r"[^\W_]+", re.UNICODE)


@dataclass(frozen=True)
class NormalizerConfig:
    """Token pipeline configuration.

    stopwords: "pt", "none", or a path to a UTF-8 one-token-per-line file.
    stemmer:   "pt-light", "none", or "table" (requires lemma_table).
    """

    stopwords: str = "pt"
    stemmer: str = "pt-light"
    lemma_table: tuple[tuple[str, str], ...] = ()

    def fingerprint(self) -> str:
        payload = f"{self.stopwords}\x00{self.stemmer}\x00" + "\x00".join(
            f"{k}={v}" for k, v in sorted(self.lemma_table)
        )
        return hashlib.sha256(payload.encode("utf-8")).hexdigest()[:16]


def _resolve_stemmer(config: NormalizerConfig):
    if config.stemmer == "table":
        table = dict(config.lemma_table)
        if not table:
            raise ConfigError("stemmer 'table' requires a non-empty lemma_table")
        return lambda token: table.get(token, token)
    try:
        return _STEMMERS[config.stemmer]
    except KeyError:
        raise ConfigError(f"unknown stemmer: {config.stemmer!r}") from None


def normalize(body: str, config: NormalizerConfig = NormalizerConfig()) -> TokenSeq:
    """Lowercase, tokenize, drop stopwords/punctuation, stem.

    Deterministic for a fixed config. Stopwords are matched on the
    lowercase token before stemming, so inflected stopword forms in the
    list are honored.
    """
    stopwords = load_stopwords(config.stopwords)
    stem = _resolve_stemmer(config)
    tokens = []
    for match in _TOKEN_RE.finditer(body.lower()):
        token = match.group()
        if token in stopwords:
            continue
        stemmed = stem(token)
        if stemmed:
            tokens.append(stemmed)
    return tokens


# ---------------------------------------------------------------------------
# Segmentation

DEFAULT_ABBREVIATIONS = frozenset(
    {
        "art.", "arts.", "inc.", "n.", "ns.", "num.", "fl.", "fls.", "dr.",
        "dra.", "sr.", "sra.", "min.", "rel.", "p.", "pp.", "pag.", "pags.",
        "cf.", "ex.", "obs.", "par.", "ed.", "vol.", "cap.", "al.", "ss.",
        "proc.", "julg.", "dje.", "dj.", "ac.", "c.", "j.", "el.",
    }
)

_TERMINAL_RUN = re.compile(r"[.!?…]+")


@dataclass(frozen=True)
class SegmentedText:
    """Character spans (half-open) for sentences and paragraphs of one text."""

    sentence_spans: tuple[Span, ...]
    paragraph_spans: tuple[Span, ...]


def _trim(text: str, start: int, end: int) -> Span | None:
    while start < end and text[start].isspace():
        start += 1
    while end > start and text[end - 1].isspace():
        end -= 1
    return (start, end) if start < end else None


def _paragraph_runs(body: str):
    runs = []
    pos = 0
    start = None
    for line in body.splitlines(keepends=True):
        end = pos + len(line)
        if line.strip():
            if start is None:
                start = pos
        else:
            if start is not None:
                runs.append((start, pos))
                start = None
        pos = end
    if start is not None:
        runs.append((start, len(body)))
    return runs


def _sentence_bounds(ptext: str, abbreviations: frozenset[str]) -> list[int]:
    bounds = []
    for match in _TERMINAL_RUN.finditer(ptext):
        end = match.end()
        j = end
        while j < len(ptext) and ptext[j].isspace():
            j += 1
        if j == end or j >= len(ptext):
            continue
        if not (ptext[j].isupper() or ptext[j].isdigit()):
            continue
        k = match.start()
        while k > 0 and not ptext[k - 1].isspace():
            k -= 1
        chunk = ptext[k:end].lstrip("([{\"'“”‘’«")
        if fold_accents(chunk.lower()) in abbreviations:
            continue
        bounds.append(end)
    return bounds


def segment(body: str, abbreviations: frozenset[str] = DEFAULT_ABBREVIATIONS) -> SegmentedText:
    """Split a text into paragraph and sentence spans.

    A paragraph is a maximal run of non-blank lines, trimmed to its
    non-whitespace extent. A sentence boundary is a run of terminal
    punctuation followed by whitespace and an uppercase letter or digit,
    unless the token ending at the punctuation is a known abbreviation
    (compared case- and accent-insensitively).
    """
    abbreviations = frozenset(fold_accents(a.lower()) for a in abbreviations)
    paragraph_spans = []
    sentence_spans = []
    for run_start, run_end in _paragraph_runs(body):
        span = _trim(body, run_start, run_end)
        if span is None:
            continue
        ps, pe = span
        paragraph_spans.append((ps, pe))
        ptext = body[ps:pe]
        prev = 0
        for bound in _sentence_bounds(ptext, abbreviations) + [len(ptext)]:
            sent = _trim(ptext, prev, bound)
            if sent is not None:
                sentence_spans.append((ps + sent[0], ps + sent[1]))
            prev = bound
    return SegmentedText(tuple(sentence_spans), tuple(paragraph_spans))
