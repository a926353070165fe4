"""Accuracy, per-gender F1, the masculine/feminine and pro/anti gaps, and unknown rates.

Unknown predictions are always counted as errors.
"""
from __future__ import annotations

from collections import Counter
from dataclasses import asdict, dataclass, field
from typing import Mapping, Optional, Sequence

from .corpus import Gender, Stereotype, TestInstance
from .errors import InputError

GOLD = (Gender.MALE, Gender.FEMALE, Gender.NEUTRAL)
PREDICTED = (Gender.MALE, Gender.FEMALE, Gender.NEUTRAL, Gender.UNKNOWN)


@dataclass
class ConfusionCounts:
    matrix: dict = field(default_factory=lambda: {g: {p: 0 for p in PREDICTED} for g in GOLD})

    def add(self, gold: Gender, predicted: Gender, n: int = 1) -> None:
        self.matrix[gold][predicted] += n

    @property
    def total(self) -> int:
        return sum(sum(row.values()) for row in self.matrix.values())

    def row(self, gold: Gender) -> int:
        return sum(self.matrix[gold].values())

    def column(self, predicted: Gender) -> int:
        return sum(self.matrix[g][predicted] for g in GOLD)

    def correct(self) -> int:
        return sum(self.matrix[g][g] for g in GOLD)

    def as_rows(self) -> dict:
        return {str(g): {str(p): self.matrix[g][p] for p in PREDICTED} for g in GOLD}


@dataclass(frozen=True)
class PartitionCounts:
    """Correct/total tallies for one slice of the testset."""

    correct: int = 0
    total: int = 0

    def accuracy(self) -> Optional[float]:
        return 100.0 * self.correct / self.total if self.total else None


@dataclass
class MetricsReport:
    n_total: int
    accuracy: float
    precision_m: float
    recall_m: float
    f1_m: float
    precision_f: float
    recall_f: float
    f1_f: float
    delta_g: float
    acc_pro: Optional[float]
    acc_anti: Optional[float]
    delta_s: Optional[float]
    unknown_rate_male: Optional[float]
    unknown_rate_female: Optional[float]
    per_profession: dict = field(default_factory=dict)
    confusion: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, doc: Mapping) -> "MetricsReport":
        return cls(**doc)


def _check_pairing(resolved, instances):
    if len(resolved) != len(instances):
        raise InputError(f"{len(resolved)} resolutions for {len(instances)} instances")
    for r, inst in zip(resolved, instances):
        if r.instance_id != inst.id:
            raise InputError(f"resolution for instance {r.instance_id} paired with instance {inst.id}")


def accumulate_confusion(resolved: Sequence, instances: Sequence[TestInstance]) -> ConfusionCounts:
    _check_pairing(resolved, instances)
    confusion = ConfusionCounts()
    for r, inst in zip(resolved, instances):
        confusion.add(inst.gold_gender, r.predicted)
    return confusion


def stereotype_partitions(resolved: Sequence, instances: Sequence[TestInstance]) -> dict:
    _check_pairing(resolved, instances)
    correct = Counter()
    total = Counter()
    for r, inst in zip(resolved, instances):
        if inst.stereotype is None:
            continue
        total[inst.stereotype] += 1
        correct[inst.stereotype] += r.predicted is inst.gold_gender
    return {s: PartitionCounts(correct[s], total[s]) for s in Stereotype}


def profession_partitions(resolved: Sequence, instances: Sequence[TestInstance]) -> dict:
    _check_pairing(resolved, instances)
    correct = Counter()
    total = Counter()
    for r, inst in zip(resolved, instances):
        total[inst.profession] += 1
        correct[inst.profession] += r.predicted is inst.gold_gender
    return {p: PartitionCounts(correct[p], total[p]) for p in sorted(total)}


def _f1(p: float, r: float) -> float:
    return 2 * p * r / (p + r) if p + r > 0 else 0.0


def _prf(confusion: ConfusionCounts, gender: Gender):
    hit = confusion.matrix[gender][gender]
    col = confusion.column(gender)
    row = confusion.row(gender)
    precision = 100.0 * hit / col if col else 0.0
    recall = 100.0 * hit / row if row else 0.0
    return precision, recall, _f1(precision, recall)


def unknown_rates(confusion: ConfusionCounts) -> tuple:
    """Percent of gold-male and gold-female instances resolved Unknown (None for an empty row)."""
    out = []
    for g in (Gender.MALE, Gender.FEMALE):
        row = confusion.row(g)
        out.append(100.0 * confusion.matrix[g][Gender.UNKNOWN] / row if row else None)
    return tuple(out)


def compute_report(
    confusion: ConfusionCounts,
    stereotypes: Optional[Mapping] = None,
    per_profession: Optional[Mapping] = None,
) -> MetricsReport:
    n_total = confusion.total
    if n_total == 0:
        raise InputError("no evaluated instances")
    accuracy = 100.0 * confusion.correct() / n_total
    pm, rm, f1m = _prf(confusion, Gender.MALE)
    pf, rf, f1f = _prf(confusion, Gender.FEMALE)

    stereotypes = stereotypes or {}
    acc_pro = stereotypes.get(Stereotype.PRO, PartitionCounts()).accuracy()
    acc_anti = stereotypes.get(Stereotype.ANTI, PartitionCounts()).accuracy()
    delta_s = acc_pro - acc_anti if acc_pro is not None and acc_anti is not None else None
    unk_m, unk_f = unknown_rates(confusion)

    return MetricsReport(
        n_total=n_total,
        accuracy=accuracy,
        precision_m=pm,
        recall_m=rm,
        f1_m=f1m,
        precision_f=pf,
        recall_f=rf,
        f1_f=f1f,
        delta_g=f1m - f1f,
        acc_pro=acc_pro,
        acc_anti=acc_anti,
        delta_s=delta_s,
        unknown_rate_male=unk_m,
        unknown_rate_female=unk_f,
        per_profession={p: c.accuracy() for p, c in (per_profession or {}).items()},
        confusion=confusion.as_rows(),
    )


def evaluate_resolutions(resolved: Sequence, instances: Sequence[TestInstance]) -> MetricsReport:
    return compute_report(
        accumulate_confusion(resolved, instances),
        stereotype_partitions(resolved, instances),
        profession_partitions(resolved, instances),
    )


def fmt_percent(value: Optional[float]) -> str:
    """One decimal, ``-`` for an absent value."""
    return "-" if value is None else f"{value:.1f}"


METRICS_COLUMNS = ("system", "language", "acc", "delta_g", "delta_s", "unknown_m", "unknown_f")


def metrics_row(system: str, language: str, report: MetricsReport) -> list:
    return [
        system,
        language,
        fmt_percent(report.accuracy),
        fmt_percent(report.delta_g),
        fmt_percent(report.delta_s),
        fmt_percent(report.unknown_rate_male),
        fmt_percent(report.unknown_rate_female),
    ]


def format_metrics_table(rows: Sequence[tuple]) -> str:
    """TSV over ``(system, language, MetricsReport)`` rows."""
    lines = ["\t".join(METRICS_COLUMNS)]
    lines += ["\t".join(metrics_row(s, lang, rep)) for s, lang, rep in rows]
    return "\n".join(lines) + "\n"
