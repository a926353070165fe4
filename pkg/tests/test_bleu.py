import math
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mtgender.bleu import SIGNATURE, BleuScore, corpus_bleu, score_from_counts, tokenize_13a
from mtgender.errors import InputError
from oracles import bleu_fixture

sacrebleu = pytest.importorskip("sacrebleu")

FROZEN_FIXTURE_SCORE = 67.81758805798495


@pytest.mark.parametrize("text, tokens", [
    ("Hello, world!", ["Hello", ",", "world", "!"]),
    ("3.5", ["3.5"]),
    ("", []),
    ("1,200 dollars.", ["1,200", "dollars", "."]),
    ("12-15", ["12", "-", "15"]),
    ("&quot;a&quot; &amp; b", ['"', "a", '"', "&", "b"]),
    ("hyphen-\nated line", ["hyphenated", "line"]),
    ("Šéf Kuchař.", ["Šéf", "Kuchař", "."]),
])
def test_tokenize_13a_examples(text, tokens):
    assert tokenize_13a(text) == tokens


def test_tokenize_matches_reference():
    from sacrebleu.tokenizers.tokenizer_13a import Tokenizer13a

    ref = Tokenizer13a()
    hyps, refs = bleu_fixture()
    for line in hyps + refs:
        assert tokenize_13a(line) == ref(line).split()


def test_identity_is_100():
    _, refs = bleu_fixture()
    s = corpus_bleu(refs, refs)
    assert s.score == 100.0
    assert s.brevity_penalty == 1.0
    assert s.precisions == (100.0, 100.0, 100.0, 100.0)


def test_exp_smoothing_hand_count():
    # 1-3 grams all match, neither 4-gram does: one doubling, p4 = 1 / (2 * 2)
    s = corpus_bleu(["a b c d e"], ["a b c . b c d . c d e"])
    assert s.correct == (5, 4, 3, 0)
    assert s.total == (5, 4, 3, 2)
    assert s.precisions == (100.0, 100.0, 100.0, 25.0)


def test_exp_smoothing_doubles_per_zero_order():
    s = score_from_counts([3, 0, 0, 0], [4, 3, 2, 1], 4, 4)
    assert s.precisions == (75.0, 100 / 6, 100 / 8, 100 / 8)


def test_fixture_matches_reference_scorer():
    hyps, refs = bleu_fixture()
    ours = corpus_bleu(hyps, refs)
    ref = sacrebleu.corpus_bleu(hyps, [refs])
    assert abs(ours.score - ref.score) <= 0.1
    assert ours.score == pytest.approx(FROZEN_FIXTURE_SCORE, abs=1e-9)
    assert (ours.sys_len, ours.ref_len) == (ref.sys_len, ref.ref_len)


def test_signature_string():
    assert SIGNATURE == "BLEU+case.mixed+numrefs.1+smooth.exp+tok.13a+version.1.4.14"


def test_score_formula_invariant():
    hyps, refs = bleu_fixture(seed=5)
    s = corpus_bleu(hyps, refs)
    want = s.brevity_penalty * math.exp(sum(math.log(p / 100) for p in s.precisions) / 4) * 100
    assert s.score == pytest.approx(want, abs=1e-9)


def test_empty_hypothesis_no_crash():
    s = corpus_bleu(["", "a b c d"], ["x y", "a b c d"])
    assert s.sys_len == 4 and s.ref_len == 6
    assert 0 < s.brevity_penalty < 1
    assert corpus_bleu([""], ["a b"]).score == 0.0


def test_trailing_whitespace_stripped():
    assert corpus_bleu(["a b c d  \n"], ["a b c d"]).score == 100.0


def test_errors():
    with pytest.raises(InputError):
        corpus_bleu(["a"], ["a", "b"])
    with pytest.raises(InputError):
        corpus_bleu([], [])


def test_round_trip():
    hyps, refs = bleu_fixture()
    s = corpus_bleu(hyps, refs)
    assert BleuScore.from_dict(s.to_dict()) == s


def test_permutation_invariance():
    hyps, refs = bleu_fixture()
    base = corpus_bleu(hyps, refs).score
    rng = random.Random(1)
    for _ in range(10):
        order = list(range(len(hyps)))
        rng.shuffle(order)
        assert corpus_bleu([hyps[i] for i in order], [refs[i] for i in order]).score == base


def test_brevity_monotone():
    _, refs = bleu_fixture()
    prev = corpus_bleu(refs, refs).brevity_penalty
    for cut in (0.9, 0.7, 0.5, 0.2):
        hyps = [" ".join(r.split()[: max(0, int(len(r.split()) * cut))]) for r in refs]
        bp = corpus_bleu(hyps, refs).brevity_penalty
        assert bp <= prev
        prev = bp


words = st.sampled_from(["a", "b", "c", "Dd", ",", ".", "3.5", "x-y", "!"])
sentences = st.lists(words, max_size=12).map(" ".join)


@settings(max_examples=150, deadline=None)
@given(st.lists(st.tuples(sentences, sentences), min_size=1, max_size=8))
def test_bounds_and_reference_agreement(pairs):
    hyps = [h for h, _ in pairs]
    refs = [r for _, r in pairs]
    s = corpus_bleu(hyps, refs)
    assert 0.0 <= s.score <= 100.0
    assert abs(s.score - sacrebleu.corpus_bleu(hyps, [refs]).score) <= 1e-9
