# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled E-step and Viterbi kernels; see ``_kernels_py`` for the layout."""
import numpy as np
cimport numpy as cnp
from libc.math cimport exp, log, fabs

BACKEND = "cython"


def e_step(const cnp.int64_t[::1] src_len, const cnp.int64_t[::1] tgt_len,
           const cnp.int64_t[::1] offsets, const cnp.int64_t[::1] idx,
           const double[::1] probs, double tension, double p0, Py_ssize_t n_params):
    cdef Py_ssize_t n_pairs = src_len.shape[0]
    cdef Py_ssize_t n_tok = 0, k, i, j, n, m, row, base, cell, tok = 0, max_row = 1
    cdef cnp.int64_t p
    cdef double jm, z, h, w, s0, total, sc, post, mass
    cdef double loglik = 0.0, emp_feat = 0.0
    for k in range(n_pairs):
        n_tok += tgt_len[k]
        if src_len[k] + 1 > max_row:
            max_row = src_len[k] + 1
    counts_arr = np.zeros(n_params, dtype=np.float64)
    nonnull_arr = np.zeros(n_tok, dtype=np.float64)
    feats_arr = np.zeros(max_row, dtype=np.float64)
    scores_arr = np.zeros(max_row, dtype=np.float64)
    cdef double[::1] counts = counts_arr
    cdef double[::1] nonnull = nonnull_arr
    cdef double[::1] feats = feats_arr
    cdef double[::1] scores = scores_arr

    for k in range(n_pairs):
        n = src_len[k]
        m = tgt_len[k]
        base = offsets[k]
        row = n + 1
        for j in range(m):
            jm = <double>(j + 1) / <double>m
            z = 0.0
            for i in range(1, row):
                h = -fabs(<double>i / <double>n - jm)
                feats[i] = h
                w = exp(tension * h)
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
                loglik += log(total)
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
    return counts_arr, loglik, emp_feat, nonnull_arr


def viterbi(const cnp.int64_t[::1] src_len, const cnp.int64_t[::1] tgt_len,
            const cnp.int64_t[::1] offsets, const cnp.int64_t[::1] idx,
            const double[::1] probs, double tension, double p0):
    cdef Py_ssize_t n_pairs = src_len.shape[0]
    cdef Py_ssize_t n_tok = 0, k, i, j, n, m, row, base, cell, tok = 0, max_row = 1, best
    cdef cnp.int64_t p
    cdef double jm, z, w, sc, best_score
    for k in range(n_pairs):
        n_tok += tgt_len[k]
        if src_len[k] + 1 > max_row:
            max_row = src_len[k] + 1
    out_arr = np.zeros(n_tok, dtype=np.int64)
    prior_arr = np.zeros(max_row, dtype=np.float64)
    cdef cnp.int64_t[::1] out = out_arr
    cdef double[::1] prior = prior_arr

    for k in range(n_pairs):
        n = src_len[k]
        m = tgt_len[k]
        base = offsets[k]
        row = n + 1
        for j in range(m):
            jm = <double>(j + 1) / <double>m
            z = 0.0
            for i in range(1, row):
                w = exp(tension * -fabs(<double>i / <double>n - jm))
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
    return out_arr
