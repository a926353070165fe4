import json
import random

import pytest

from mtgender.aligner import AlignmentConfig
from mtgender.bleu import corpus_bleu
from mtgender.corpus import Gender, Stereotype, load_rules, load_testset
from mtgender.errors import InputError
from mtgender.gender import NullAnalyzer
from mtgender.metrics import ConfusionCounts, compute_report
from mtgender.report import (
    SystemEvaluation,
    correlation_grid,
    emit_reports,
    evaluate_system,
    load_reports,
    pearson,
)
from oracles import pearson_2pass, synthetic_lexicon, synthetic_system


@pytest.fixture(scope="module")
def challenge(request):
    path = request.config.rootpath / "tests" / "data" / "challenge_fixture.tsv"
    testset = load_testset(path)
    return testset, synthetic_lexicon({i.profession for i in testset})


def gold(inst):
    return inst.gold_gender


def run(challenge, choose, lang="cs", **kw):
    testset, lexicon = challenge
    return evaluate_system(testset, synthetic_system(testset, choose), lexicon, NullAnalyzer(),
                           load_rules(lang), **kw)


# -- pearson ---------------------------------------------------------------------

def test_pearson_examples():
    assert pearson([1, 2, 3], [2, 4, 6]) == 1.0
    assert pearson([1, 2, 3], [3, 2, 1]) == -1.0
    assert pearson([1, 2, 3, 4], [1, 3, 2, 4]) == pytest.approx(0.8, abs=1e-9)


def test_pearson_errors():
    with pytest.raises(InputError, match="undefined correlation"):
        pearson([1, 1, 1], [1, 2, 3])
    with pytest.raises(InputError):
        pearson([1], [1])
    with pytest.raises(InputError):
        pearson([1, 2], [1, 2, 3])


def test_pearson_matches_two_pass():
    rng = random.Random(4)
    for _ in range(200):
        n = rng.randint(2, 30)
        xs = [rng.uniform(-50, 50) for _ in range(n)]
        ys = [rng.uniform(-50, 50) for _ in range(n)]
        assert pearson(xs, ys) == pytest.approx(pearson_2pass(xs, ys), abs=1e-9)


def test_pearson_affine_invariance():
    rng = random.Random(9)
    for _ in range(300):
        n = rng.randint(3, 40)
        xs = [rng.gauss(0, 10) for _ in range(n)]
        ys = [rng.gauss(0, 10) for _ in range(n)]
        a = rng.uniform(0.1, 10) * rng.choice((1, -1))
        b = rng.uniform(-100, 100)
        moved = pearson([a * x + b for x in xs], ys)
        assert moved == pytest.approx((1 if a > 0 else -1) * pearson(xs, ys), abs=1e-9)


# -- correlation grid ---------------------------------------------------------------

def fake_evaluation(name, acc, delta_g, delta_s, bleu, language="cs"):
    rep = compute_report(_confusion_stub())
    rep.accuracy, rep.delta_g, rep.delta_s = acc, delta_g, delta_s
    score = None
    if bleu is not None:
        score = corpus_bleu(["a b c d"], ["a b c d"])
        object.__setattr__(score, "score", bleu)
    return SystemEvaluation(name, language, rep, score)


def _confusion_stub():
    c = ConfusionCounts()
    c.add(Gender.MALE, Gender.MALE)
    return c


def test_grid_has_six_pairs_and_is_symmetric():
    evs = [fake_evaluation(f"s{k}", 50 + k, 10 - k * k, k * 3 % 7, 20 + k) for k in range(6)]
    grid = correlation_grid(evs)
    assert [(r.variable_x, r.variable_y) for r in grid] == [
        ("acc", "delta_g"), ("acc", "delta_s"), ("acc", "bleu"),
        ("delta_g", "delta_s"), ("delta_g", "bleu"), ("delta_s", "bleu"),
    ]
    for r in grid:
        xs = [e.value(r.variable_x) for e in evs]
        ys = [e.value(r.variable_y) for e in evs]
        assert abs(pearson(ys, xs) - r.rho) <= 1e-12
        assert -1 <= r.rho <= 1 and r.n == 6


def test_grid_identical_evaluations_report_zero_variance():
    evs = [fake_evaluation("a", 70, 5, 10, 30), fake_evaluation("b", 70, 5, 10, 30)]
    grid = correlation_grid(evs)
    assert len(grid) == 6
    assert all(r.rho is None and "undefined correlation" in r.error for r in grid)


def test_grid_constructed_anticorrelation():
    evs = [fake_evaluation(f"s{k}", acc, 100 - acc, k, 10 + k) for k, acc in enumerate((55, 61, 70, 72, 90))]
    rho = {(r.variable_x, r.variable_y): r.rho for r in correlation_grid(evs)}
    assert rho[("acc", "delta_g")] == -1.0


def test_grid_needs_two_systems():
    with pytest.raises(InputError):
        correlation_grid([fake_evaluation("a", 70, 5, 10, 30)])
    with pytest.raises(InputError):
        correlation_grid([fake_evaluation("a", 70, 5, 10, None), fake_evaluation("b", 71, 5, 11, None)])


def test_grid_per_language():
    evs = [fake_evaluation(f"s{k}", 50 + k, k, k % 3, 20 + k, language=lang)
           for k in range(4) for lang in ("cs", "pl")]
    grid = correlation_grid(evs, per_language=True)
    assert sorted({r.language for r in grid}) == ["cs", "pl"]
    assert len(grid) == 12


def test_grid_bleu_tracks_stereotyping(challenge):
    # higher-BLEU systems copy the stereotype more often
    testset, _ = challenge
    refs = synthetic_system(testset, gold)
    evs = []
    for k, rate in enumerate((0.0, 0.2, 0.4, 0.6, 0.8)):
        rng = random.Random(k)

        def choose(inst, rate=rate, rng=rng):
            if inst.stereotype is Stereotype.ANTI and rng.random() < rate:
                return Gender.FEMALE if inst.gold_gender is Gender.MALE else Gender.MALE
            return inst.gold_gender

        hyps = synthetic_system(testset, choose)
        # fewer dropped lines for the more stereotyped systems
        noisy = [h if j % (k + 2) else "" for j, h in enumerate(hyps)]
        evs.append(evaluate_system(testset, hyps, challenge[1], NullAnalyzer(), load_rules("cs"),
                                   system_name=f"sys{k}", bleu=corpus_bleu(noisy, refs)))
    rho = {(r.variable_x, r.variable_y): r.rho for r in correlation_grid(evs)}
    assert rho[("delta_s", "bleu")] > 0


# -- evaluate_system ---------------------------------------------------------------

def test_oracle_system(challenge):
    ev = run(challenge, gold)
    m = ev.metrics
    assert (m.accuracy, m.delta_g, m.delta_s) == (100.0, 0.0, 0.0)
    assert m.n_total == 3418
    assert ev.provenance_counts == {"whitelist": 3418}


def test_all_masculine_system(challenge):
    m = run(challenge, lambda inst: Gender.MALE).metrics
    assert m.accuracy == 50.0
    assert m.delta_g == pytest.approx(66.67, abs=0.01)
    assert m.delta_s == 0.0


def test_empty_translations_lower_accuracy(challenge):
    testset, lexicon = challenge
    translations = synthetic_system(testset, gold)
    for k in range(0, len(translations), 37):
        translations[k] = ""
    ev = evaluate_system(testset, translations, lexicon, NullAnalyzer(), load_rules("cs"))
    assert ev.metrics.accuracy < 100.0
    assert ev.provenance_counts["no_alignment"] > 0


def test_polish_breakdown(challenge):
    ev = run(challenge, gold, lang="pl")
    nfd = ev.breakdowns["no_feminine_derivation"]
    assert nfd["accuracy"] == 100.0 and nfd["n"] > 0


def test_imported_alignments_checked(challenge):
    testset, lexicon = challenge
    with pytest.raises(InputError, match="system 'x'"):
        evaluate_system(testset, ["a"] * len(testset), lexicon, NullAnalyzer(), load_rules("cs"),
                        alignments=[], system_name="x")


def test_translation_count_mismatch(challenge):
    testset, lexicon = challenge
    with pytest.raises(InputError, match="translations"):
        evaluate_system(testset, ["a"], lexicon, NullAnalyzer(), load_rules("cs"))


def test_evaluation_deterministic(challenge):
    cfg = AlignmentConfig(iterations=3)
    a = run(challenge, lambda inst: Gender.MALE if inst.id % 3 else inst.gold_gender, config=cfg)
    b = run(challenge, lambda inst: Gender.MALE if inst.id % 3 else inst.gold_gender, config=cfg)
    assert a == b
    assert a.to_dict() == b.to_dict()


# -- reports -----------------------------------------------------------------------

def test_emit_reports_files(tmp_path, challenge):
    ev = run(challenge, gold)
    emit_reports([ev], tmp_path)
    summary = (tmp_path / "summary.tsv").read_text(encoding="utf-8").splitlines()
    assert summary[0] == "system\tlanguage\tacc\tdelta_g\tdelta_s\tbleu"
    assert summary[1] == "system\tcs\t100.0\t0.0\t0.0\t-"
    assert len(summary) == 2
    unknowns = (tmp_path / "unknowns.tsv").read_text().splitlines()
    assert unknowns == ["language\tunknown_male\tunknown_female\tsystems", "cs\t0.0\t0.0\t1"]
    doc = json.loads((tmp_path / "report.json").read_text())
    assert doc["evaluations"][0]["bleu"] is None
    assert doc["evaluations"][0]["metrics"]["delta_s"] == 0.0
    assert (tmp_path / "scatter.csv").read_text().splitlines()[0] == "system,language,metric_x,metric_y,x,y"


def test_emit_reports_byte_identical(tmp_path, challenge):
    evs = [run(challenge, gold, system_name="a"), run(challenge, lambda i: Gender.MALE, system_name="b")]
    emit_reports(evs, tmp_path / "one")
    emit_reports(evs[::-1], tmp_path / "two")
    for name in ("summary.tsv", "unknowns.tsv", "metrics.tsv", "scatter.csv", "report.json"):
        assert (tmp_path / "one" / name).read_bytes() == (tmp_path / "two" / name).read_bytes()


def test_report_round_trip(tmp_path, challenge):
    ev = run(challenge, lambda i: Gender.FEMALE, bleu=corpus_bleu(["a b"], ["a b"]))
    emit_reports([ev], tmp_path / "r")
    (back,) = load_reports(tmp_path)
    assert back == ev


def test_load_reports_errors(tmp_path):
    with pytest.raises(InputError):
        load_reports(tmp_path / "missing")
    (tmp_path / "report.json").write_text("{}")
    with pytest.raises(InputError):
        load_reports(tmp_path)


def test_emit_reports_unwritable(tmp_path):
    target = tmp_path / "file"
    target.write_text("x")
    with pytest.raises(OSError, match="file"):
        emit_reports([fake_evaluation("a", 1, 2, 3, None)], target)
