"""Challenge-set and translation loading, plus per-language filtering.

The testset format is the WinoMT one: tab-separated
``gender<TAB>entity_index<TAB>sentence<TAB>profession[<TAB>stereotype]``.
"""
from __future__ import annotations

import enum
import json
import logging
import string
import unicodedata
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping, Optional, Sequence

from .errors import InputError

logger = logging.getLogger(__name__)


class Gender(enum.Enum):
    MALE = "male"
    FEMALE = "female"
    NEUTRAL = "neutral"
    UNKNOWN = "unknown"

    @classmethod
    def parse(cls, token: str, allow_unknown: bool = False) -> "Gender":
        try:
            value = cls(token.strip().lower())
        except ValueError:
            raise InputError(f"unknown gender token {token!r}") from None
        if value is cls.UNKNOWN and not allow_unknown:
            raise InputError(f"unknown gender token {token!r}")
        return value

    def __str__(self) -> str:
        return self.value


class Stereotype(enum.Enum):
    PRO = "pro"
    ANTI = "anti"

    def __str__(self) -> str:
        return self.value


def normalize_key(text: str) -> str:
    """Lowercase + NFC; the join key between testset, lexicon and rules."""
    return unicodedata.normalize("NFC", text.strip()).lower()


@dataclass(frozen=True)
class TestInstance:
    __test__ = False  # not a pytest class

    id: int
    gold_gender: Gender
    entity_index: int
    sentence: str
    profession: str
    stereotype: Optional[Stereotype] = None

    def to_line(self) -> str:
        fields = [str(self.gold_gender), str(self.entity_index), self.sentence, self.profession]
        if self.stereotype is not None:
            fields.append(str(self.stereotype))
        return "\t".join(fields)


@dataclass(frozen=True)
class LanguageRules:
    language: str
    drop_neutral: bool = False
    excluded_professions: frozenset = frozenset()
    same_form_professions: frozenset = frozenset()
    prefix_gender_markers: Mapping[str, Gender] = field(default_factory=dict)
    no_feminine_derivation: frozenset = frozenset()

    def __post_init__(self):
        overlap = self.excluded_professions & self.same_form_professions
        if overlap:
            raise InputError(
                f"rules for {self.language!r}: professions both excluded and same-form: "
                + ", ".join(sorted(overlap))
            )
        for marker, gender in self.prefix_gender_markers.items():
            if gender not in (Gender.MALE, Gender.FEMALE, Gender.NEUTRAL):
                raise InputError(f"rules for {self.language!r}: marker {marker!r} maps to {gender}")

    def excludes(self, instance: TestInstance) -> bool:
        if self.drop_neutral and instance.gold_gender is Gender.NEUTRAL:
            return True
        return instance.profession in self.excluded_professions

    def to_dict(self) -> dict:
        return {
            "language": self.language,
            "drop_neutral": self.drop_neutral,
            "excluded_professions": sorted(self.excluded_professions),
            "same_form_professions": sorted(self.same_form_professions),
            "prefix_gender_markers": {k: str(v) for k, v in sorted(self.prefix_gender_markers.items())},
            "no_feminine_derivation": sorted(self.no_feminine_derivation),
        }


_RULE_KEYS = {
    "language",
    "drop_neutral",
    "excluded_professions",
    "same_form_professions",
    "prefix_gender_markers",
    "no_feminine_derivation",
}


def rules_from_dict(doc: Mapping) -> LanguageRules:
    unknown = set(doc) - _RULE_KEYS
    if unknown:
        raise InputError("unknown keys in language rules: " + ", ".join(sorted(unknown)))
    if "language" not in doc:
        raise InputError("language rules need a 'language' key")

    def keyset(name):
        values = doc.get(name, [])
        if isinstance(values, str) or not isinstance(values, Iterable):
            raise InputError(f"language rules: {name!r} must be a list")
        return frozenset(normalize_key(v) for v in values)

    markers = {}
    for form, gender in dict(doc.get("prefix_gender_markers", {})).items():
        key = normalize_key(form)
        parsed = Gender.parse(gender)
        if key in markers and markers[key] is not parsed:
            raise InputError(f"marker {form!r} maps to more than one gender")
        markers[key] = parsed

    drop_neutral = doc.get("drop_neutral", False)
    if not isinstance(drop_neutral, bool):
        raise InputError("language rules: 'drop_neutral' must be true or false")
    return LanguageRules(
        language=str(doc["language"]),
        drop_neutral=drop_neutral,
        excluded_professions=keyset("excluded_professions"),
        same_form_professions=keyset("same_form_professions"),
        prefix_gender_markers=markers,
        no_feminine_derivation=keyset("no_feminine_derivation"),
    )


def load_rules(path_or_language) -> LanguageRules:
    """Load a rules pack from a JSON file, or a bundled pack by language code (``cs``, ``pl``)."""
    path = Path(path_or_language)
    if not path.exists():
        bundled = Path(__file__).parent / "data" / f"rules_{path_or_language}.json"
        if not bundled.exists():
            raise InputError(f"no rules file or bundled pack named {path_or_language!r}")
        path = bundled
    try:
        doc = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: invalid JSON: {exc}") from None
    return rules_from_dict(doc)


def _read_lines(path) -> list:
    path = Path(path)
    if not path.exists():
        raise InputError(f"{path}: no such file")
    text = path.read_text(encoding="utf-8")
    if not text:
        return []
    lines = text.split("\n")
    if lines[-1] == "":
        lines.pop()
    return [line[:-1] if line.endswith("\r") else line for line in lines]


def _check_profession_token(instance: TestInstance, lineno: int) -> None:
    tokens = instance.sentence.split()
    token = normalize_key(tokens[instance.entity_index]).strip(string.punctuation)
    if token != instance.profession and instance.profession.split()[-1] != token:
        logger.warning(
            "line %d: profession %r does not match source token %r",
            lineno, instance.profession, tokens[instance.entity_index],
        )


def parse_testset_line(line: str, lineno: int, instance_id: int) -> TestInstance:
    fields = line.split("\t")
    if len(fields) not in (4, 5):
        raise InputError(f"line {lineno}: expected 4 or 5 tab-separated fields, got {len(fields)}")
    try:
        gender = Gender.parse(fields[0])
    except InputError as exc:
        raise InputError(f"line {lineno}: field 'gender': {exc}") from None
    try:
        entity_index = int(fields[1])
    except ValueError:
        raise InputError(f"line {lineno}: field 'entity_index': not an integer: {fields[1]!r}") from None
    sentence = fields[2]
    n_tokens = len(sentence.split())
    if not 0 <= entity_index < n_tokens:
        raise InputError(
            f"line {lineno}: field 'entity_index': {entity_index} out of range for {n_tokens} tokens"
        )
    profession = normalize_key(fields[3])
    if not profession:
        raise InputError(f"line {lineno}: field 'profession' is empty")
    stereotype = None
    if len(fields) == 5:
        try:
            stereotype = Stereotype(fields[4].strip().lower())
        except ValueError:
            raise InputError(f"line {lineno}: field 'stereotype': unknown token {fields[4]!r}") from None
    instance = TestInstance(instance_id, gender, entity_index, sentence, profession, stereotype)
    _check_profession_token(instance, lineno)
    return instance


def _membership(path) -> set:
    return {line for line in _read_lines(path) if line.strip()}


def load_testset(path, pro_path=None, anti_path=None) -> list:
    """Read a challenge set.

    ``pro_path``/``anti_path`` follow the upstream convention of separate
    4-field files listing the pro- and anti-stereotypical lines; membership
    is merged into the stereotype field of 4-field lines.
    """
    pro = _membership(pro_path) if pro_path else set()
    anti = _membership(anti_path) if anti_path else set()
    instances = []
    for lineno, line in enumerate(_read_lines(path), start=1):
        instance = parse_testset_line(line, lineno, lineno - 1)
        if instance.stereotype is None and (line in pro or line in anti):
            if line in pro and line in anti:
                raise InputError(f"line {lineno}: listed as both pro- and anti-stereotypical")
            label = Stereotype.PRO if line in pro else Stereotype.ANTI
            instance = TestInstance(
                instance.id, instance.gold_gender, instance.entity_index,
                instance.sentence, instance.profession, label,
            )
        instances.append(instance)
    return instances


def dump_testset(instances: Sequence[TestInstance], path) -> None:
    text = "".join(inst.to_line() + "\n" for inst in instances)
    Path(path).write_text(text, encoding="utf-8", newline="\n")


def load_translations(path, expected_count: int) -> list:
    lines = _read_lines(path)
    if len(lines) != expected_count:
        raise InputError(
            f"{path}: {len(lines)} translations but the testset has {expected_count} instances"
        )
    return lines


def filter_instances(instances: Sequence[TestInstance], rules: LanguageRules) -> list:
    return [inst for inst in instances if not rules.excludes(inst)]
