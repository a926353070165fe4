"""IBM Model 2 word alignment with a log-linear diagonal prior.

The reparameterization is the one popularized by fast_align: the prior
over source positions for target position ``j`` is

    p(a_j = 0) = p0
    p(a_j = i) = (1 - p0) * exp(tension * h(i, j, m, n)) / Z_j,   1 <= i <= n
    h(i, j, m, n) = -| i/n - j/m |

and the lexical table t(e | f) is estimated with EM. Alignment direction
is target-to-source: every target token links to at most one source token.
"""
from __future__ import annotations

import logging
import math
import os
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from ..errors import InputError

if os.environ.get("MTGENDER_PURE_PYTHON"):
    from . import _kernels_py as kernels
else:
    try:
        from . import _kernels as kernels
    except ImportError:
        from . import _kernels_py as kernels

logger = logging.getLogger(__name__)

NULL = None  # the NULL source word in ttable keys
TENSION_STEPS = 8
TENSION_BOUNDS = (0.5, 10.0)


@dataclass(frozen=True)
class AlignmentConfig:
    iterations: int = 5
    p0: float = 0.08
    tension: float = 4.0
    optimize_tension: bool = True
    seed_uniform: bool = True

    def __post_init__(self):
        if self.iterations < 1:
            raise InputError("iterations must be >= 1")
        if not 0.0 < self.p0 < 1.0:
            raise InputError("p0 must lie in (0, 1)")
        if self.tension < 0:
            raise InputError("tension must be >= 0")

    def describe(self) -> dict:
        return {
            "iterations": self.iterations,
            "p0": self.p0,
            "tension": self.tension,
            "optimize_tension": self.optimize_tension,
            "seed_uniform": self.seed_uniform,
        }


def diagonal_feature(i: int, j: int, n: int, m: int) -> float:
    return -abs(i / n - j / m)


def diagonal_prior(i: int, j: int, n: int, m: int, tension: float, p0: float) -> float:
    """Prior probability that target position ``j`` (1-based) links to source ``i`` (0 = NULL)."""
    if n < 1 or m < 1:
        raise InputError(f"sentence lengths must be positive (n={n}, m={m})")
    if not 1 <= j <= m:
        raise InputError(f"target index {j} outside 1..{m}")
    if not 0 <= i <= n:
        raise InputError(f"source index {i} outside 0..{n}")
    if not 0.0 <= p0 < 1.0:
        raise InputError("p0 must lie in [0, 1)")
    if i == 0:
        return p0
    z = math.fsum(math.exp(tension * diagonal_feature(k, j, n, m)) for k in range(1, n + 1))
    return (1.0 - p0) * math.exp(tension * diagonal_feature(i, j, n, m)) / z


def expected_feature(j: int, n: int, m: int, tension: float) -> float:
    """Mean of the diagonal feature under the non-NULL prior; d log Z_j / d tension."""
    w = [math.exp(tension * diagonal_feature(i, j, n, m)) for i in range(1, n + 1)]
    h = [diagonal_feature(i, j, n, m) for i in range(1, n + 1)]
    return math.fsum(a * b for a, b in zip(w, h)) / math.fsum(w)


@dataclass(frozen=True)
class AlignmentLinks:
    """One ``(target position, source position or None)`` per target token, 0-based."""

    links: tuple

    def __iter__(self):
        return iter(self.links)

    def __len__(self):
        return len(self.links)

    def to_pharaoh(self) -> str:
        return " ".join(f"{i}-{j}" for j, i in self.links if i is not None)


class _Vocab:
    def __init__(self):
        self.ids = {}
        self.words = []

    def intern(self, word) -> int:
        ident = self.ids.get(word)
        if ident is None:
            ident = len(self.words)
            self.ids[word] = ident
            self.words.append(word)
        return ident

    def __len__(self):
        return len(self.words)


class AlignmentModel:
    """Trained lexical table plus prior parameters. Treat as immutable."""

    def __init__(self, source_vocab, target_vocab, param_keys, probs, tension, p0, history=()):
        self.source_vocab = source_vocab  # id 0 is NULL
        self.target_vocab = target_vocab
        self._param_keys = param_keys  # param index -> (source id, target id)
        self._param_index = {key: k for k, key in enumerate(param_keys)}
        self.probs = probs
        self.probs.setflags(write=False)
        self.tension = tension
        self.p0 = p0
        self.history = tuple(history)

    @property
    def ttable(self) -> dict:
        src, tgt = self.source_vocab.words, self.target_vocab.words
        return {(src[f], tgt[e]): float(self.probs[k]) for k, (f, e) in enumerate(self._param_keys)}

    def prob(self, source_word, target_word) -> float:
        f = self.source_vocab.ids.get(source_word)
        e = self.target_vocab.ids.get(target_word)
        k = self._param_index.get((f, e))
        return 0.0 if k is None else float(self.probs[k])

    def row_sums(self) -> dict:
        sums = np.zeros(len(self.source_vocab))
        src = np.fromiter((f for f, _ in self._param_keys), dtype=np.int64, count=len(self._param_keys))
        np.add.at(sums, src, self.probs)
        return {self.source_vocab.words[f]: float(s) for f, s in enumerate(sums)}

    def _batch(self, pairs):
        src_vocab, tgt_vocab = self.source_vocab.ids, self.target_vocab.ids
        index = self._param_index
        return _pack(
            pairs,
            lambda f: src_vocab.get(f, -1),
            lambda e: tgt_vocab.get(e, -1),
            lambda f, e: index.get((f, e), -1) if f >= 0 and e >= 0 else -1,
        )

    def align_corpus(self, pairs: Sequence) -> list:
        live = [(s, t) for s, t in pairs if s and t]
        if live:
            src_len, tgt_len, offsets, idx = self._batch(live)
            best = kernels.viterbi(src_len, tgt_len, offsets, idx, self.probs, self.tension, self.p0)
        pos = 0
        out = []
        for source, target in pairs:
            if not target:
                out.append(AlignmentLinks(()))
                continue
            if not source:
                out.append(AlignmentLinks(tuple((j, None) for j in range(len(target)))))
                continue
            links = []
            for j in range(len(target)):
                i = int(best[pos])
                links.append((j, None if i == 0 else i - 1))
                pos += 1
            out.append(AlignmentLinks(tuple(links)))
        return out


def _pack(pairs, src_id, tgt_id, param_of):
    src_len = np.fromiter((len(s) for s, _ in pairs), dtype=np.int64, count=len(pairs))
    tgt_len = np.fromiter((len(t) for _, t in pairs), dtype=np.int64, count=len(pairs))
    sizes = (src_len + 1) * tgt_len
    offsets = np.zeros(len(pairs), dtype=np.int64)
    if len(pairs) > 1:
        offsets[1:] = np.cumsum(sizes)[:-1]
    idx = np.empty(int(sizes.sum()), dtype=np.int64)
    pos = 0
    for source, target in pairs:
        fs = [0] + [src_id(f) for f in source]
        for e in target:
            eid = tgt_id(e)
            for f in fs:
                idx[pos] = param_of(f, eid)
                pos += 1
    return src_len, tgt_len, offsets, idx


def _feature_groups(pairs):
    """Unique (n, m) shapes with, per shape, the flat target-token positions it owns."""
    groups = {}
    pos = 0
    for source, target in pairs:
        n, m = len(source), len(target)
        groups.setdefault((n, m), []).append(np.arange(pos, pos + m))
        pos += m
    out = []
    for (n, m), chunks in sorted(groups.items()):
        i = np.arange(1, n + 1, dtype=np.float64)
        j = np.arange(1, m + 1, dtype=np.float64)
        h = -np.abs(i[None, :] / n - j[:, None] / m)  # m x n
        out.append((h, np.stack(chunks)))  # chunks: pairs x m
    return out


def _model_moments(groups, nonnull, tension):
    """Mass-weighted sums of the prior mean and variance of the diagonal feature."""
    mean_total = 0.0
    var_total = 0.0
    for h, positions in groups:
        w = np.exp(tension * h)
        z = w.sum(axis=1)
        mean = (w * h).sum(axis=1) / z
        var = (w * h * h).sum(axis=1) / z - mean * mean
        mass = nonnull[positions].sum(axis=0)
        mean_total += float((mass * mean).sum())
        var_total += float((mass * np.maximum(var, 0.0)).sum())
    return mean_total, var_total


def _update_tension(groups, nonnull, emp_feat, tension):
    """Maximize the expected log-prior over the tension with clamped Newton steps.

    The objective is concave in the tension (log Z is convex), so the
    gradient divided by the curvature is a safe, scale-free step.
    """
    lo, hi = TENSION_BOUNDS
    for _ in range(TENSION_STEPS):
        mean, var = _model_moments(groups, nonnull, tension)
        grad = emp_feat - mean
        if var <= 0.0 or grad == 0.0:
            break
        tension = min(hi, max(lo, tension + grad / var))
    return tension


def train_alignment(bitext: Sequence, config: Optional[AlignmentConfig] = None) -> AlignmentModel:
    """EM training on ``(source tokens, target tokens)`` pairs."""
    config = config or AlignmentConfig()
    if not bitext:
        raise InputError("cannot train an aligner on an empty bitext")
    pairs = []
    skipped = 0
    for source, target in bitext:
        if not source or not target:
            skipped += 1
            continue
        pairs.append((list(source), list(target)))
    if skipped:
        logger.warning("skipped %d sentence pairs with an empty side", skipped)
    if not pairs:
        raise InputError("every sentence pair has an empty side")

    source_vocab, target_vocab = _Vocab(), _Vocab()
    source_vocab.intern(NULL)
    param_index = {}
    param_keys = []
    cooc = []

    def param_of(f, e):
        key = (f, e)
        k = param_index.get(key)
        if k is None:
            k = len(param_keys)
            param_index[key] = k
            param_keys.append(key)
            cooc.append(0)
        cooc[k] += 1
        return k

    src_len, tgt_len, offsets, idx = _pack(pairs, source_vocab.intern, target_vocab.intern, param_of)
    n_params = len(param_keys)
    param_src = np.fromiter((f for f, _ in param_keys), dtype=np.int64, count=n_params)

    if config.seed_uniform:
        weights = np.ones(n_params)
    else:
        weights = np.asarray(cooc, dtype=np.float64)
    probs = _normalize(weights, param_src, len(source_vocab))

    groups = _feature_groups(pairs) if config.optimize_tension else None
    tension = float(config.tension)
    history = []
    for it in range(config.iterations):
        counts, loglik, emp_feat, nonnull = kernels.e_step(
            src_len, tgt_len, offsets, idx, probs, tension, config.p0, n_params
        )
        history.append(loglik)
        logger.debug("iteration %d: log-likelihood %.6f tension %.4f", it + 1, loglik, tension)
        probs = _normalize(counts, param_src, len(source_vocab))
        if config.optimize_tension and it > 0:
            tension = _update_tension(groups, nonnull, emp_feat, tension)

    return AlignmentModel(source_vocab, target_vocab, param_keys, probs, tension, config.p0, history)


def _normalize(weights, param_src, n_sources):
    totals = np.zeros(n_sources)
    np.add.at(totals, param_src, weights)
    denom = totals[param_src]
    out = np.divide(weights, denom, out=np.zeros_like(weights), where=denom > 0)
    # a row whose mass underflowed to zero falls back to uniform
    dead = denom <= 0
    if dead.any():
        sizes = np.bincount(param_src, minlength=n_sources)
        out[dead] = 1.0 / sizes[param_src[dead]]
    return out


def corpus_loglik(model: AlignmentModel, bitext: Sequence) -> float:
    pairs = [(list(s), list(t)) for s, t in bitext if s and t]
    src_len, tgt_len, offsets, idx = model._batch(pairs)
    _, loglik, _, _ = kernels.e_step(
        src_len, tgt_len, offsets, idx, np.asarray(model.probs), model.tension, model.p0, len(model.probs)
    )
    return loglik


def viterbi_align(model: AlignmentModel, source: Sequence, target: Sequence) -> AlignmentLinks:
    return model.align_corpus([(list(source), list(target))])[0]


def parse_pharaoh(line: str, target_len: int) -> AlignmentLinks:
    """Read ``i-j`` source-target links; unmentioned target positions link to NULL.

    When a target position carries several links the smallest source
    position is kept.
    """
    chosen = {}
    for item in line.split():
        try:
            i_str, j_str = item.split("-")
            i, j = int(i_str), int(j_str)
        except ValueError:
            raise InputError(f"bad alignment link {item!r}") from None
        if not 0 <= j < target_len or i < 0:
            raise InputError(f"alignment link {item!r} outside a {target_len}-token target")
        if j not in chosen or i < chosen[j]:
            chosen[j] = i
    return AlignmentLinks(tuple((j, chosen.get(j)) for j in range(target_len)))


def load_alignments(path, target_lengths: Sequence[int]) -> list:
    with open(path, encoding="utf-8") as fh:
        lines = fh.read().split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    if len(lines) != len(target_lengths):
        raise InputError(f"{path}: {len(lines)} alignment lines for {len(target_lengths)} sentence pairs")
    out = []
    for lineno, (line, m) in enumerate(zip(lines, target_lengths), start=1):
        try:
            out.append(parse_pharaoh(line, m))
        except InputError as exc:
            raise InputError(f"{path}: line {lineno}: {exc}") from None
    return out


def dump_alignments(alignments: Sequence[AlignmentLinks], path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for links in alignments:
            fh.write(links.to_pharaoh() + "\n")
