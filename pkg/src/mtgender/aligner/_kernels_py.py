"""Pure-Python E-step and Viterbi kernels.

Mirrors ``_kernels.pyx`` operation for operation so both backends produce
the same floating-point results. Array arguments are indexable sequences
(NumPy arrays work); results come back as NumPy arrays.

Layout shared with the compiled core: pair ``k`` has ``src_len[k]`` source
and ``tgt_len[k]`` target tokens; ``idx[offsets[k] + j * (n + 1) + i]`` is
the parameter index of t(e_j | f_i), with ``i = 0`` the NULL word and
``-1`` for a pair never seen in training.
"""
import math

import numpy as np

BACKEND = "python"


def e_step(src_len, tgt_len, offsets, idx, probs, tension, p0, n_params):
    """Return ``(counts, loglik, emp_feat, nonnull)``.

    ``emp_feat`` is the posterior-weighted sum of the diagonal feature and
    ``nonnull[t]`` the non-NULL posterior mass of target token ``t``.
    """
    src_len = src_len.tolist() if hasattr(src_len, "tolist") else list(src_len)
    tgt_len = tgt_len.tolist() if hasattr(tgt_len, "tolist") else list(tgt_len)
    offsets = offsets.tolist() if hasattr(offsets, "tolist") else list(offsets)
    idx = idx.tolist() if hasattr(idx, "tolist") else list(idx)
    probs = probs.tolist() if hasattr(probs, "tolist") else list(probs)

    counts = [0.0] * n_params
    nonnull = [0.0] * sum(tgt_len)
    loglik = 0.0
    emp_feat = 0.0
    tok = 0
    for k in range(len(src_len)):
        n = src_len[k]
        m = tgt_len[k]
        base = offsets[k]
        row = n + 1
        feats = [0.0] * row
        scores = [0.0] * row
        for j in range(m):
            jm = (j + 1) / m
            z = 0.0
            for i in range(1, row):
                h = -abs(i / n - jm)
                feats[i] = h
                w = math.exp(tension * h)
                scores[i] = w
                z += w
            cell = base + j * row
            p = idx[cell]
            s0 = p0 * probs[p] if p >= 0 else 0.0
            scores[0] = s0
            total = s0
            for i in range(1, row):
                p = idx[cell + i]
                if p >= 0:
                    sc = (1.0 - p0) * scores[i] / z * probs[p]
                else:
                    sc = 0.0
                scores[i] = sc
                total += sc
            if total > 0.0:
                loglik += math.log(total)
                mass = 0.0
                for i in range(row):
                    post = scores[i] / total
                    p = idx[cell + i]
                    if p >= 0:
                        counts[p] += post
                    if i > 0:
                        emp_feat += post * feats[i]
                        mass += post
                nonnull[tok] = mass
            tok += 1
    return np.asarray(counts, dtype=np.float64), loglik, emp_feat, np.asarray(nonnull, dtype=np.float64)


def viterbi(src_len, tgt_len, offsets, idx, probs, tension, p0):
    """Best source position (0 = NULL, else 1-based) for every target token.

    Ties go to the smaller position. A token whose every candidate has zero
    translation probability falls back to the prior alone.
    """
    src_len = src_len.tolist() if hasattr(src_len, "tolist") else list(src_len)
    tgt_len = tgt_len.tolist() if hasattr(tgt_len, "tolist") else list(tgt_len)
    offsets = offsets.tolist() if hasattr(offsets, "tolist") else list(offsets)
    idx = idx.tolist() if hasattr(idx, "tolist") else list(idx)
    probs = probs.tolist() if hasattr(probs, "tolist") else list(probs)

    out = [0] * sum(tgt_len)
    tok = 0
    for k in range(len(src_len)):
        n = src_len[k]
        m = tgt_len[k]
        base = offsets[k]
        row = n + 1
        prior = [0.0] * row
        for j in range(m):
            jm = (j + 1) / m
            z = 0.0
            for i in range(1, row):
                w = math.exp(tension * -abs(i / n - jm))
                prior[i] = w
                z += w
            prior[0] = p0
            for i in range(1, row):
                prior[i] = (1.0 - p0) * prior[i] / z
            cell = base + j * row
            best = 0
            p = idx[cell]
            best_score = prior[0] * probs[p] if p >= 0 else 0.0
            for i in range(1, row):
                p = idx[cell + i]
                sc = prior[i] * probs[p] if p >= 0 else 0.0
                if sc > best_score:
                    best_score = sc
                    best = i
            if best_score <= 0.0:
                best = 0
                best_score = prior[0]
                for i in range(1, row):
                    if prior[i] > best_score:
                        best_score = prior[i]
                        best = i
            out[tok] = best
            tok += 1
    return np.asarray(out, dtype=np.int64)
