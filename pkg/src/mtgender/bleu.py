"""Corpus BLEU with a single reference, exponential smoothing and 13a tokenization, case preserved."""
from __future__ import annotations

import math
import re
from collections import Counter
from dataclasses import asdict, dataclass
from typing import Sequence

from .errors import InputError

MAX_ORDER = 4
REFERENCE_VERSION = "1.4.14"
SIGNATURE = f"BLEU+case.mixed+numrefs.1+smooth.exp+tok.13a+version.{REFERENCE_VERSION}"

_13A_RULES = [
    (re.compile(r"([\{-\~\[-\` -\&\(-\+\:-\@\/])"), r" \1 "),
    (re.compile(r"([^0-9])([\.,])"), r"\1 \2 "),  # period/comma not preceded by a digit
    (re.compile(r"([\.,])([^0-9])"), r" \1 \2"),  # period/comma not followed by a digit
    (re.compile(r"([0-9])(-)"), r"\1 \2 "),  # dash after a digit
]


def tokenize_13a(text: str) -> list:
    """Tokenize like mteval-v13a (the WMT scorer)."""
    norm = text.replace("<skipped>", "")
    norm = norm.replace("-\n", "")
    norm = norm.replace("\n", " ")
    norm = norm.replace("&quot;", '"')
    norm = norm.replace("&amp;", "&")
    norm = norm.replace("&lt;", "<")
    norm = norm.replace("&gt;", ">")
    norm = f" {norm} "
    for pattern, repl in _13A_RULES:
        norm = pattern.sub(repl, norm)
    return norm.split()


@dataclass(frozen=True)
class BleuScore:
    score: float
    precisions: tuple
    brevity_penalty: float
    sys_len: int
    ref_len: int
    correct: tuple = ()
    total: tuple = ()

    def to_dict(self) -> dict:
        doc = asdict(self)
        doc["precisions"] = list(self.precisions)
        doc["correct"] = list(self.correct)
        doc["total"] = list(self.total)
        return doc

    @classmethod
    def from_dict(cls, doc) -> "BleuScore":
        return cls(
            score=doc["score"],
            precisions=tuple(doc["precisions"]),
            brevity_penalty=doc["brevity_penalty"],
            sys_len=doc["sys_len"],
            ref_len=doc["ref_len"],
            correct=tuple(doc.get("correct", ())),
            total=tuple(doc.get("total", ())),
        )

    def format(self) -> str:
        p = "/".join(f"{x:.1f}" for x in self.precisions)
        return (
            f"BLEU = {self.score:.2f} {p} (BP = {self.brevity_penalty:.3f} "
            f"ratio = {self.sys_len / self.ref_len if self.ref_len else 0.0:.3f} "
            f"hyp_len = {self.sys_len} ref_len = {self.ref_len})"
        )


def _ngrams(tokens: Sequence[str]) -> Counter:
    counts = Counter()
    for n in range(1, MAX_ORDER + 1):
        for i in range(len(tokens) - n + 1):
            counts[tuple(tokens[i:i + n])] += 1
    return counts


def score_from_counts(correct: Sequence[int], total: Sequence[int], sys_len: int, ref_len: int) -> BleuScore:
    precisions = [0.0] * MAX_ORDER
    smooth = 1.0
    for n in range(MAX_ORDER):
        if total[n] == 0:
            break
        if correct[n] == 0:
            smooth *= 2
            precisions[n] = 100.0 / (smooth * total[n])
        else:
            precisions[n] = 100.0 * correct[n] / total[n]

    if sys_len < ref_len:
        bp = math.exp(1 - ref_len / sys_len) if sys_len > 0 else 0.0
    else:
        bp = 1.0
    if all(p > 0 for p in precisions):
        # log-mean over fractions so a perfect match is exactly 100
        score = 100.0 * bp * math.exp(sum(math.log(p / 100.0) for p in precisions) / MAX_ORDER)
    else:
        score = 0.0
    return BleuScore(score, tuple(precisions), bp, sys_len, ref_len, tuple(correct), tuple(total))


def corpus_bleu(hypotheses: Sequence[str], references: Sequence[str]) -> BleuScore:
    if len(hypotheses) != len(references):
        raise InputError(f"{len(hypotheses)} hypotheses but {len(references)} references")
    if not hypotheses:
        raise InputError("BLEU needs at least one segment")
    correct = [0] * MAX_ORDER
    total = [0] * MAX_ORDER
    sys_len = ref_len = 0
    for hyp, ref in zip(hypotheses, references):
        hyp_tokens = tokenize_13a(hyp.rstrip())
        ref_tokens = tokenize_13a(ref.rstrip())
        sys_len += len(hyp_tokens)
        ref_len += len(ref_tokens)
        ref_counts = _ngrams(ref_tokens)
        for gram, count in _ngrams(hyp_tokens).items():
            n = len(gram) - 1
            correct[n] += min(count, ref_counts.get(gram, 0))
            total[n] += count
    return score_from_counts(correct, total, sys_len, ref_len)
