"""Write a small synthetic demo: challenge set, lexicon, three systems and a reference.

    python scripts/make_demo.py demo/
"""
import random
import shutil
import sys
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(ROOT / "tests"))

from oracles import synthetic_lexicon, synthetic_system  # noqa: E402

from mtgender.corpus import Gender, Stereotype, load_testset  # noqa: E402

# name -> (probability of copying the stereotype on anti lines, probability of masculine default)
SYSTEMS = {"faithful": (0.0, 0.0), "stereo": (0.5, 0.0), "masc": (0.3, 0.4)}


def _flip(g):
    return Gender.FEMALE if g is Gender.MALE else Gender.MALE


def write_demo(out: Path) -> None:
    out.mkdir(parents=True, exist_ok=True)
    testset_path = out / "testset.tsv"
    shutil.copyfile(ROOT / "tests" / "data" / "challenge_fixture.tsv", testset_path)
    testset = load_testset(testset_path)

    lexicon = synthetic_lexicon({i.profession for i in testset})
    rows = [f"{p}\t{g}\t{','.join(sorted(forms))}" for (p, g), forms in sorted(lexicon.entries.items(), key=str)]
    (out / "lexicon.tsv").write_text("\n".join(rows) + "\n", encoding="utf-8")

    ref = synthetic_system(testset, lambda i: i.gold_gender)
    (out / "ref.txt").write_text("\n".join(ref) + "\n", encoding="utf-8")
    for k, (name, (stereo, masc)) in enumerate(SYSTEMS.items()):
        rng = random.Random(k)

        def choose(inst):
            if inst.gold_gender is Gender.NEUTRAL:
                return Gender.NEUTRAL
            if inst.stereotype is Stereotype.ANTI and rng.random() < stereo:
                return _flip(inst.gold_gender)
            if rng.random() < masc:
                return Gender.MALE
            return inst.gold_gender

        (out / f"{name}.txt").write_text("\n".join(synthetic_system(testset, choose)) + "\n", encoding="utf-8")


if __name__ == "__main__":
    write_demo(Path(sys.argv[1] if len(sys.argv) > 1 else "demo"))
