import json
import subprocess
import sys
from pathlib import Path

import pytest

from mtgender.cli import main

ROOT = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(ROOT / "scripts"))

from make_demo import write_demo  # noqa: E402


@pytest.fixture(scope="module")
def demo(tmp_path_factory):
    out = tmp_path_factory.mktemp("demo")
    write_demo(out)
    return out


def evaluate_args(demo, system, out, *extra):
    return [
        "evaluate", "--testset", str(demo / "testset.tsv"), "--translations", str(demo / f"{system}.txt"),
        "--lang-rules", "cs", "--lexicon", str(demo / "lexicon.tsv"), "--ref", str(demo / "ref.txt"),
        "--system", system, "--out", str(out), *extra,
    ]


def test_evaluate_writes_reports(demo, tmp_path, capsys):
    assert main(evaluate_args(demo, "faithful", tmp_path / "f")) == 0
    assert "acc=100.0" in capsys.readouterr().out
    summary = (tmp_path / "f" / "summary.tsv").read_text().splitlines()
    assert summary == ["system\tlanguage\tacc\tdelta_g\tdelta_s\tbleu", "faithful\tcs\t100.0\t0.0\t0.0\t100.0"]
    doc = json.loads((tmp_path / "f" / "report.json").read_text())
    meta = doc["evaluations"][0]["run_metadata"]
    assert set(meta["inputs"]) == {"testset", "translations", "lexicon", "ref"}
    assert len(meta["inputs"]["testset"]["sha256"]) == 64


def test_evaluate_is_byte_identical(demo, tmp_path):
    for name in ("a", "b"):
        assert main(evaluate_args(demo, "stereo", tmp_path / name)) == 0
    for f in ("summary.tsv", "unknowns.tsv", "metrics.tsv", "scatter.csv", "report.json"):
        assert (tmp_path / "a" / f).read_bytes() == (tmp_path / "b" / f).read_bytes()


def test_correlate(demo, tmp_path, capsys):
    for system in ("faithful", "stereo", "masc"):
        assert main(evaluate_args(demo, system, tmp_path / "runs" / system)) == 0
    capsys.readouterr()
    assert main(["correlate", "--reports", str(tmp_path / "runs"), "--out", str(tmp_path / "agg")]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert len(lines) == 6
    table = (tmp_path / "agg" / "correlations.tsv").read_text().splitlines()
    assert table[0] == "language\tmetric_x\tmetric_y\trho\tn"
    assert len((tmp_path / "agg" / "summary.tsv").read_text().splitlines()) == 4


def test_correlate_without_reports(tmp_path, capsys):
    assert main(["correlate", "--reports", str(tmp_path)]) == 1
    assert "no report.json" in capsys.readouterr().err


def test_bleu_command(demo, capsys):
    assert main(["bleu", "--hyp", str(demo / "ref.txt"), "--ref", str(demo / "ref.txt")]) == 0
    out = capsys.readouterr().out
    assert out.startswith("BLEU+case.mixed+numrefs.1+smooth.exp+tok.13a+version.1.4.14 = 100.00")


def test_alignment_import(demo, tmp_path):
    from mtgender.aligner import AlignmentLinks, alignment_tokenize, dump_alignments

    # monotone links: target token j <- source token j (when it exists)
    src = [line.split("\t")[2] for line in (demo / "testset.tsv").read_text().splitlines()]
    tgt = (demo / "faithful.txt").read_text().splitlines()
    links = []
    for s, t in zip(src, tgt):
        n, m = len(alignment_tokenize(s)), len(alignment_tokenize(t))
        links.append(AlignmentLinks(tuple((j, j if j < n else None) for j in range(m))))
    path = tmp_path / "links.txt"
    dump_alignments(links, path)
    assert main(evaluate_args(demo, "faithful", tmp_path / "o", "--alignments", str(path))) == 0
    doc = json.loads((tmp_path / "o" / "report.json").read_text())
    assert doc["evaluations"][0]["metrics"]["accuracy"] == 100.0
    assert doc["evaluations"][0]["run_metadata"]["aligner"] == "imported"


def test_input_errors_exit_1(demo, tmp_path, capsys):
    bad = tmp_path / "short.txt"
    bad.write_text("one line\n")
    args = evaluate_args(demo, "faithful", tmp_path / "x")
    args[args.index("--translations") + 1] = str(bad)
    assert main(args) == 1
    assert "error:" in capsys.readouterr().err
    assert main(["bleu", "--hyp", str(bad), "--ref", str(tmp_path / "missing.txt")]) == 1


def test_usage_errors_exit_1():
    with pytest.raises(SystemExit) as exc:
        main(["evaluate", "--testset", "x"])
    assert exc.value.code == 1
    with pytest.raises(SystemExit) as exc:
        main([])
    assert exc.value.code == 1


def test_internal_error_exit_2(demo, tmp_path, monkeypatch, capsys):
    import mtgender.cli as cli

    def boom(*a, **k):
        raise RuntimeError("kaput")

    monkeypatch.setattr(cli, "evaluate_system", boom)
    assert main(evaluate_args(demo, "faithful", tmp_path / "x")) == 2
    assert "internal error: kaput" in capsys.readouterr().err


def test_console_script(demo):
    proc = subprocess.run(
        [sys.executable, "-m", "mtgender.cli", "bleu", "--hyp", str(demo / "masc.txt"), "--ref", str(demo / "ref.txt")],
        capture_output=True, text=True,
    )
    assert proc.returncode == 0
    assert "BLEU = " in proc.stdout
