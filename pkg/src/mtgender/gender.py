"""Grammatical gender of the translated entity.

Resolution order: prefix marker ("pani weterynarz"), whitelist of inflected
forms, then a morphology analyzer; same-form professions that stay
ambiguous are credited with the gold gender.
"""
from __future__ import annotations

import enum
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Sequence

from .aligner import AlignmentLinks, alignment_tokenize, is_punct, token_spans
from .corpus import Gender, LanguageRules, TestInstance, normalize_key
from .errors import InputError

logger = logging.getLogger(__name__)

MALE_FEMALE = frozenset({Gender.MALE, Gender.FEMALE})


class Provenance(enum.Enum):
    WHITELIST = "whitelist"
    PREFIX_MARKER = "prefix_marker"
    MORPHOLOGY = "morphology"
    GOLD_AMBIGUOUS = "gold_ambiguous"
    NO_ALIGNMENT = "no_alignment"
    UNKNOWN = "unknown"

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True)
class ResolvedInstance:
    instance_id: int
    predicted: Gender
    provenance: Provenance
    matched_form: tuple = ()

    def to_dict(self) -> dict:
        return {
            "id": self.instance_id,
            "predicted": str(self.predicted),
            "provenance": str(self.provenance),
            "matched_form": list(self.matched_form),
        }


class GenderLexicon:
    """(profession, gender) -> inflected surface forms, with the reverse index."""

    def __init__(self, entries=None):
        self.entries = {}
        self.reverse = {}
        for (profession, gender), forms in (entries or {}).items():
            self.add(profession, gender, forms)

    def add(self, profession: str, gender: Gender, forms) -> None:
        if gender not in MALE_FEMALE:
            raise InputError(f"lexicon genders are male or female, got {gender}")
        key = (normalize_key(profession), gender)
        bucket = self.entries.setdefault(key, set())
        for form in forms:
            form = normalize_key(form)
            if not form:
                continue
            bucket.add(form)
            self.reverse.setdefault(form, set()).add(key)

    def lookup(self, profession: str, form: str) -> frozenset:
        profession = normalize_key(profession)
        return frozenset(
            g for p, g in self.reverse.get(normalize_key(form), ()) if p == profession
        )

    def __len__(self):
        return len(self.entries)


def load_lexicon(path) -> GenderLexicon:
    """Read ``profession<TAB>gender<TAB>form1,form2,...`` lines; ``#`` starts a comment line."""
    lexicon = GenderLexicon()
    text = Path(path).read_text(encoding="utf-8")
    for lineno, line in enumerate(text.split("\n"), start=1):
        line = line.rstrip("\r")
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        fields = line.split("\t")
        if len(fields) != 3:
            raise InputError(f"{path}: line {lineno}: expected 3 tab-separated fields")
        profession, gender, forms = fields
        try:
            parsed = Gender.parse(gender)
        except InputError as exc:
            raise InputError(f"{path}: line {lineno}: {exc}") from None
        if parsed not in MALE_FEMALE:
            raise InputError(f"{path}: line {lineno}: lexicon gender must be male or female")
        lexicon.add(profession, parsed, forms.split(","))
    return lexicon


def whitelist_lookup(lexicon: GenderLexicon, profession: str, form: str) -> frozenset:
    return lexicon.lookup(profession, form)


# -- morphology analyzers ---------------------------------------------------

class NullAnalyzer:
    name = "null"

    def analyze(self, token, tokens, position, sentence_index=None) -> frozenset:
        return frozenset()


class SuffixAnalyzer:
    """Longest-suffix-first rules: ``suffix<TAB>gender``, first match wins."""

    name = "suffix"

    def __init__(self, rules: Sequence[tuple]):
        self.rules = tuple((normalize_key(s), g) for s, g in rules)

    @classmethod
    def from_file(cls, path) -> "SuffixAnalyzer":
        rules = []
        text = Path(path).read_text(encoding="utf-8")
        for lineno, line in enumerate(text.split("\n"), start=1):
            if not line.strip() or line.startswith("#"):
                continue
            fields = line.rstrip("\r").split("\t")
            if len(fields) != 2:
                raise InputError(f"{path}: line {lineno}: expected suffix<TAB>gender")
            try:
                rules.append((fields[0], Gender.parse(fields[1])))
            except InputError as exc:
                raise InputError(f"{path}: line {lineno}: {exc}") from None
        return cls(rules)

    @classmethod
    def bundled(cls, language: str) -> "SuffixAnalyzer":
        path = Path(__file__).parent / "data" / f"suffixes_{language}.tsv"
        if not path.exists():
            raise InputError(f"no bundled suffix rules for {language!r}")
        return cls.from_file(path)

    def analyze(self, token, tokens, position, sentence_index=None) -> frozenset:
        token = normalize_key(token)
        for suffix, gender in self.rules:
            if token.endswith(suffix):
                return frozenset({gender})
        return frozenset()


class TaggedFileAnalyzer:
    """Genders from an offline tagger: ``token<TAB>gender`` lines, blank line between sentences.

    The gender column may hold several values separated by ``|``; ``-`` or
    an empty column means no gender. Lookups are by (sentence index, token
    index) and return nothing when the stored token differs from the
    queried one.
    """

    name = "tagged"

    def __init__(self, sentences: Sequence[Sequence[tuple]]):
        self.sentences = [list(s) for s in sentences]

    @classmethod
    def from_file(cls, path) -> "TaggedFileAnalyzer":
        sentences = [[]]
        text = Path(path).read_text(encoding="utf-8")
        lines = text.split("\n")
        if lines and lines[-1] == "":
            lines.pop()
        for lineno, line in enumerate(lines, start=1):
            line = line.rstrip("\r")
            if not line.strip():
                sentences.append([])
                continue
            fields = line.split("\t")
            if len(fields) != 2:
                raise InputError(f"{path}: line {lineno}: expected token<TAB>gender")
            token, tags = fields
            genders = set()
            for tag in tags.split("|"):
                tag = tag.strip()
                if tag and tag != "-":
                    try:
                        genders.add(Gender.parse(tag))
                    except InputError as exc:
                        raise InputError(f"{path}: line {lineno}: {exc}") from None
            sentences[-1].append((normalize_key(token), frozenset(genders)))
        if sentences and not sentences[-1]:
            sentences.pop()
        return cls(sentences)

    def analyze(self, token, tokens, position, sentence_index=None) -> frozenset:
        if sentence_index is None or not 0 <= sentence_index < len(self.sentences):
            return frozenset()
        sentence = self.sentences[sentence_index]
        if not 0 <= position < len(sentence):
            return frozenset()
        stored, genders = sentence[position]
        if stored != normalize_key(token):
            logger.debug("tagged token mismatch at %d:%d: %r vs %r", sentence_index, position, stored, token)
            return frozenset()
        return genders


# -- resolution ---------------------------------------------------------------

def entity_source_positions(instance: TestInstance) -> list:
    """Alignment-token positions of the entity's whitespace token (punctuation dropped)."""
    spans = token_spans(instance.sentence)
    span = spans[instance.entity_index]
    tokens = alignment_tokenize(instance.sentence)
    words = [p for p in span if not is_punct(tokens[p])]
    return words or span


def entity_target_tokens(instance: TestInstance, links: AlignmentLinks, target_tokens: Sequence[str]) -> list:
    sources = set(entity_source_positions(instance))
    return [(j, target_tokens[j]) for j, i in links if i is not None and i in sources]


def _preceding_word(tokens, position) -> Optional[str]:
    k = position - 1
    while k >= 0 and is_punct(tokens[k]):
        k -= 1
    return tokens[k] if k >= 0 else None


def _analyze(analyzer, candidates, tokens, sentence_index) -> frozenset:
    found = set()
    for pos, tok in candidates:
        found |= analyzer.analyze(tok, tokens, pos, sentence_index=sentence_index)
    return frozenset(found)


def resolve(
    instance: TestInstance,
    target_tokens: Sequence[str],
    links: AlignmentLinks,
    lexicon: GenderLexicon,
    analyzer,
    rules: LanguageRules,
    sentence_index: Optional[int] = None,
) -> ResolvedInstance:
    """Decide the gender of the translated entity; every failure path yields Unknown.

    ``sentence_index`` is forwarded to the analyzer (pre-tagged files are
    keyed by it); it defaults to the instance id.
    """
    if sentence_index is None:
        sentence_index = instance.id
    candidates = entity_target_tokens(instance, links, target_tokens)
    if not candidates:
        return ResolvedInstance(instance.id, Gender.UNKNOWN, Provenance.NO_ALIGNMENT)
    forms = tuple(tok for _, tok in candidates)

    for pos, tok in candidates:
        prev = _preceding_word(target_tokens, pos)
        if prev is not None:
            marker = rules.prefix_gender_markers.get(normalize_key(prev))
            if marker is not None:
                return ResolvedInstance(instance.id, marker, Provenance.PREFIX_MARKER, (prev, tok))

    listed = frozenset().union(*(lexicon.lookup(instance.profession, tok) for tok in forms))
    if len(listed) == 1:
        (gender,) = listed
        matched = tuple(tok for tok in forms if lexicon.lookup(instance.profession, tok))
        return ResolvedInstance(instance.id, gender, Provenance.WHITELIST, matched)

    analyzed = _analyze(analyzer, candidates, target_tokens, sentence_index)
    if len(analyzed) == 1:
        (gender,) = analyzed
        return ResolvedInstance(instance.id, gender, Provenance.MORPHOLOGY, forms)
    if listed and instance.profession in rules.same_form_professions:
        return ResolvedInstance(instance.id, instance.gold_gender, Provenance.GOLD_AMBIGUOUS, forms)
    return ResolvedInstance(instance.id, Gender.UNKNOWN, Provenance.UNKNOWN, forms)
