"""End-to-end evaluation of one system, cross-system correlations, and report files."""
from __future__ import annotations

import csv
import io
import itertools
import json
import logging
import statistics
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping, Optional, Sequence

from . import __version__
from .aligner import AlignmentConfig, AlignmentLinks, alignment_tokenize, train_alignment
from .bleu import SIGNATURE as BLEU_SIGNATURE
from .bleu import BleuScore
from .corpus import LanguageRules, TestInstance, filter_instances
from .errors import InputError
from .gender import GenderLexicon, resolve
from .metrics import MetricsReport, evaluate_resolutions, fmt_percent, format_metrics_table

logger = logging.getLogger(__name__)

TOKENIZER_ID = "lowercase+nfc+punct-split"
VARIABLES = ("acc", "delta_g", "delta_s", "bleu")


@dataclass
class SystemEvaluation:
    system_name: str
    language: str
    metrics: MetricsReport
    bleu: Optional[BleuScore] = None
    run_metadata: dict = field(default_factory=dict)
    provenance_counts: dict = field(default_factory=dict)
    breakdowns: dict = field(default_factory=dict)
    resolutions: list = field(default_factory=list, repr=False, compare=False)

    def value(self, variable: str) -> Optional[float]:
        if variable == "acc":
            return self.metrics.accuracy
        if variable == "delta_g":
            return self.metrics.delta_g
        if variable == "delta_s":
            return self.metrics.delta_s
        if variable == "bleu":
            return None if self.bleu is None else self.bleu.score
        raise KeyError(variable)

    def to_dict(self) -> dict:
        return {
            "system": self.system_name,
            "language": self.language,
            "metrics": self.metrics.to_dict(),
            "bleu": None if self.bleu is None else self.bleu.to_dict(),
            "run_metadata": self.run_metadata,
            "provenance_counts": self.provenance_counts,
            "breakdowns": self.breakdowns,
        }

    @classmethod
    def from_dict(cls, doc: Mapping) -> "SystemEvaluation":
        return cls(
            system_name=doc["system"],
            language=doc["language"],
            metrics=MetricsReport.from_dict(doc["metrics"]),
            bleu=None if doc.get("bleu") is None else BleuScore.from_dict(doc["bleu"]),
            run_metadata=doc.get("run_metadata", {}),
            provenance_counts=doc.get("provenance_counts", {}),
            breakdowns=doc.get("breakdowns", {}),
        )


def evaluate_system(
    testset: Sequence[TestInstance],
    translations: Sequence[str],
    lexicon: GenderLexicon,
    analyzer,
    rules: LanguageRules,
    config: Optional[AlignmentConfig] = None,
    alignments: Optional[Sequence[AlignmentLinks]] = None,
    system_name: str = "system",
    bleu: Optional[BleuScore] = None,
    metadata: Optional[Mapping] = None,
) -> SystemEvaluation:
    """Filter, align, resolve and score one system's translations.

    ``translations`` and ``alignments`` (when given, e.g. imported from a
    Pharaoh file) pair positionally with the unfiltered ``testset``.
    """
    try:
        return _evaluate(
            testset, translations, lexicon, analyzer, rules, config, alignments,
            system_name, bleu, metadata,
        )
    except InputError as exc:
        raise InputError(f"system {system_name!r}: {exc}") from None


def _evaluate(testset, translations, lexicon, analyzer, rules, config, alignments,
              system_name, bleu, metadata):
    if len(translations) != len(testset):
        raise InputError(f"{len(translations)} translations for {len(testset)} testset instances")
    if alignments is not None and len(alignments) != len(testset):
        raise InputError(f"{len(alignments)} alignments for {len(testset)} testset instances")
    config = config or AlignmentConfig()
    position = {inst.id: k for k, inst in enumerate(testset)}
    kept = filter_instances(testset, rules)
    if not kept:
        raise InputError(f"no instances left after applying the {rules.language!r} rules")

    sources = [alignment_tokenize(inst.sentence) for inst in kept]
    targets = [alignment_tokenize(translations[position[inst.id]]) for inst in kept]

    trained_tension = None
    if alignments is not None:
        links = [alignments[position[inst.id]] for inst in kept]
        for inst, tgt, lk in zip(kept, targets, links):
            if len(lk) != len(tgt):
                raise InputError(
                    f"instance {inst.id}: alignment covers {len(lk)} target tokens, translation has {len(tgt)}"
                )
    else:
        bitext = [(s, t) for s, t in zip(sources, targets) if s and t]
        if bitext:
            model = train_alignment(bitext, config)
            trained_tension = model.tension
            links = model.align_corpus(list(zip(sources, targets)))
        else:
            links = [AlignmentLinks(()) for _ in kept]

    resolved = [
        resolve(inst, tgt, lk, lexicon, analyzer, rules, sentence_index=position[inst.id])
        for inst, tgt, lk in zip(kept, targets, links)
    ]
    metrics = evaluate_resolutions(resolved, kept)

    breakdowns = {}
    if rules.no_feminine_derivation:
        subset = [(r, i) for r, i in zip(resolved, kept) if i.profession in rules.no_feminine_derivation]
        correct = sum(r.predicted is i.gold_gender for r, i in subset)
        female = [(r, i) for r, i in subset if str(i.gold_gender) == "female"]
        breakdowns["no_feminine_derivation"] = {
            "professions": sorted(rules.no_feminine_derivation),
            "n": len(subset),
            "accuracy": 100.0 * correct / len(subset) if subset else None,
            "female_accuracy": 100.0 * sum(r.predicted is i.gold_gender for r, i in female) / len(female)
            if female else None,
        }

    run_metadata = {
        "version": __version__,
        "language": rules.language,
        "rules": rules.to_dict(),
        "tokenizer": TOKENIZER_ID,
        "aligner": "imported" if alignments is not None else config.describe(),
        "trained_tension": trained_tension,
        "analyzer": getattr(analyzer, "name", type(analyzer).__name__),
        "lexicon_entries": len(lexicon),
        "n_testset": len(testset),
        "n_evaluated": len(kept),
        "bleu_signature": BLEU_SIGNATURE if bleu is not None else None,
    }
    run_metadata.update(metadata or {})
    return SystemEvaluation(
        system_name=system_name,
        language=rules.language,
        metrics=metrics,
        bleu=bleu,
        run_metadata=run_metadata,
        provenance_counts=dict(sorted(Counter(str(r.provenance) for r in resolved).items())),
        breakdowns=breakdowns,
        resolutions=resolved,
    )


# -- correlations ----------------------------------------------------------------

@dataclass(frozen=True)
class CorrelationResult:
    variable_x: str
    variable_y: str
    rho: Optional[float]
    n: int
    language: str = "all"
    error: Optional[str] = None


def pearson(xs: Sequence[float], ys: Sequence[float]) -> float:
    """Pearson's rho; the population and sample forms coincide."""
    if len(xs) != len(ys):
        raise InputError(f"pearson: {len(xs)} vs {len(ys)} values")
    if len(xs) < 2:
        raise InputError("pearson: need at least 2 samples")
    try:
        rho = statistics.correlation(list(map(float, xs)), list(map(float, ys)))
    except statistics.StatisticsError:
        raise InputError("undefined correlation: an input has zero variance") from None
    return max(-1.0, min(1.0, rho))


def correlation_grid(evaluations: Sequence[SystemEvaluation], per_language: bool = False) -> list:
    """Pearson's rho for every unordered pair of acc, delta_g, delta_s and bleu.

    Pooled over all languages unless ``per_language``. A pair whose values
    have zero variance comes back with ``rho=None`` and the reason in
    ``error``.
    """
    if per_language:
        groups = {}
        for ev in evaluations:
            groups.setdefault(ev.language, []).append(ev)
        items = sorted(groups.items())
    else:
        items = [("all", list(evaluations))]

    results = []
    for language, evs in items:
        if len(evs) < 2:
            raise InputError(f"correlation over {language!r} needs at least 2 systems, got {len(evs)}")
        for x, y in itertools.combinations(VARIABLES, 2):
            points = [(ev.value(x), ev.value(y)) for ev in evs]
            points = [(a, b) for a, b in points if a is not None and b is not None]
            if len(points) < 2:
                raise InputError(
                    f"correlation {x}/{y} over {language!r}: only {len(points)} systems have both values"
                )
            xs, ys = zip(*points)
            try:
                results.append(CorrelationResult(x, y, pearson(xs, ys), len(points), language))
            except InputError as exc:
                results.append(CorrelationResult(x, y, None, len(points), language, str(exc)))
    return results


# -- output files ---------------------------------------------------------------

def _write(path: Path, text: str) -> None:
    try:
        path.write_text(text, encoding="utf-8", newline="\n")
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc.strerror}") from exc


def _sorted(evaluations):
    return sorted(evaluations, key=lambda ev: (ev.language, ev.system_name))


def summary_table(evaluations) -> str:
    lines = ["\t".join(("system", "language", "acc", "delta_g", "delta_s", "bleu"))]
    for ev in _sorted(evaluations):
        m = ev.metrics
        bleu = "-" if ev.bleu is None else f"{ev.bleu.score:.1f}"
        lines.append("\t".join((
            ev.system_name, ev.language, fmt_percent(m.accuracy), fmt_percent(m.delta_g),
            fmt_percent(m.delta_s), bleu,
        )))
    return "\n".join(lines) + "\n"


def unknowns_table(evaluations) -> str:
    """Unknown rates for gold male/female, averaged over the systems of each language."""
    by_lang = {}
    for ev in evaluations:
        by_lang.setdefault(ev.language, []).append(ev)
    lines = ["\t".join(("language", "unknown_male", "unknown_female", "systems"))]
    for language, evs in sorted(by_lang.items()):
        cells = []
        for attr in ("unknown_rate_male", "unknown_rate_female"):
            values = [getattr(ev.metrics, attr) for ev in evs]
            values = [v for v in values if v is not None]
            cells.append(fmt_percent(sum(values) / len(values) if values else None))
        lines.append("\t".join((language, *cells, str(len(evs)))))
    return "\n".join(lines) + "\n"


def scatter_table(evaluations) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(("system", "language", "metric_x", "metric_y", "x", "y"))
    for ev in _sorted(evaluations):
        for x, y in itertools.combinations(VARIABLES, 2):
            vx, vy = ev.value(x), ev.value(y)
            if vx is None or vy is None:
                continue
            writer.writerow((ev.system_name, ev.language, x, y, repr(vx), repr(vy)))
    return buf.getvalue()


def correlations_table(results: Sequence[CorrelationResult]) -> str:
    lines = ["\t".join(("language", "metric_x", "metric_y", "rho", "n"))]
    for r in results:
        rho = "-" if r.rho is None else f"{r.rho:.4f}"
        lines.append("\t".join((r.language, r.variable_x, r.variable_y, rho, str(r.n))))
    return "\n".join(lines) + "\n"


def report_document(evaluations) -> str:
    doc = {"evaluations": [ev.to_dict() for ev in _sorted(evaluations)]}
    return json.dumps(doc, indent=2, sort_keys=True, ensure_ascii=False) + "\n"


def emit_reports(evaluations: Sequence[SystemEvaluation], out_dir, correlations=None) -> list:
    out = Path(out_dir)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise OSError(f"cannot create {out}: {exc.strerror}") from exc
    files = {
        "summary.tsv": summary_table(evaluations),
        "unknowns.tsv": unknowns_table(evaluations),
        "metrics.tsv": format_metrics_table(
            [(ev.system_name, ev.language, ev.metrics) for ev in _sorted(evaluations)]
        ),
        "scatter.csv": scatter_table(evaluations),
        "report.json": report_document(evaluations),
    }
    if correlations is not None:
        files["correlations.tsv"] = correlations_table(correlations)
    written = []
    for name, text in files.items():
        _write(out / name, text)
        written.append(out / name)
    return written


def load_reports(root) -> list:
    """Collect evaluations from every ``report.json`` under ``root``, one entry per (system, language)."""
    root = Path(root)
    if not root.is_dir():
        raise InputError(f"{root}: not a directory")
    found = {}
    for path in sorted(root.rglob("report.json")):
        try:
            doc = json.loads(path.read_text(encoding="utf-8"))
            evs = [SystemEvaluation.from_dict(d) for d in doc["evaluations"]]
        except (json.JSONDecodeError, KeyError, TypeError) as exc:
            raise InputError(f"{path}: not a report document ({exc})") from None
        for ev in evs:
            found.setdefault((ev.language, ev.system_name), ev)
    return [found[k] for k in sorted(found)]
