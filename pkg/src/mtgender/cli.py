"""Command line: ``mtgender evaluate | correlate | bleu``.

Exit codes: 0 success, 1 input validation failure, 2 internal error.
"""
from __future__ import annotations

import argparse
import hashlib
import logging
import sys
from pathlib import Path

from .aligner import AlignmentConfig, alignment_tokenize, load_alignments
from .bleu import SIGNATURE, corpus_bleu
from .corpus import load_rules, load_testset, load_translations
from .errors import InputError
from .gender import GenderLexicon, NullAnalyzer, SuffixAnalyzer, TaggedFileAnalyzer, load_lexicon
from .report import correlation_grid, emit_reports, evaluate_system, load_reports

logger = logging.getLogger("mtgender")


def _digest(path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def _read_plain(path):
    path = Path(path)
    if not path.exists():
        raise InputError(f"{path}: no such file")
    lines = path.read_text(encoding="utf-8").split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    return lines


def _analyzer(args, language):
    if args.morph_tags:
        return TaggedFileAnalyzer.from_file(args.morph_tags)
    if args.suffix_rules:
        return SuffixAnalyzer.from_file(args.suffix_rules)
    if args.analyzer == "suffix":
        return SuffixAnalyzer.bundled(language)
    return NullAnalyzer()


def cmd_evaluate(args) -> int:
    testset = load_testset(args.testset, args.pro, args.anti)
    translations = load_translations(args.translations, len(testset))
    rules = load_rules(args.lang_rules)
    lexicon = load_lexicon(args.lexicon) if args.lexicon else GenderLexicon()
    analyzer = _analyzer(args, rules.language)
    config = AlignmentConfig(
        iterations=args.iterations,
        p0=args.p0,
        tension=args.tension,
        optimize_tension=not args.fixed_tension,
    )
    alignments = None
    if args.alignments:
        alignments = load_alignments(args.alignments, [len(alignment_tokenize(t)) for t in translations])

    bleu = None
    if args.ref:
        hyps = _read_plain(args.bleu_hyp) if args.bleu_hyp else list(translations)
        bleu = corpus_bleu(hyps, _read_plain(args.ref))

    inputs = {"testset": args.testset, "translations": args.translations, "lexicon": args.lexicon,
              "morph_tags": args.morph_tags, "suffix_rules": args.suffix_rules,
              "alignments": args.alignments, "ref": args.ref, "bleu_hyp": args.bleu_hyp}
    metadata = {
        "inputs": {k: {"name": Path(v).name, "sha256": _digest(v)} for k, v in inputs.items() if v}
    }
    evaluation = evaluate_system(
        testset, translations, lexicon, analyzer, rules,
        config=config, alignments=alignments, system_name=args.system, bleu=bleu, metadata=metadata,
    )
    emit_reports([evaluation], args.out)
    m = evaluation.metrics
    print(
        f"{args.system}\t{rules.language}\tacc={m.accuracy:.1f}\tdelta_g={m.delta_g:.1f}\t"
        f"delta_s={'-' if m.delta_s is None else format(m.delta_s, '.1f')}\tn={m.n_total}"
    )
    return 0


def cmd_correlate(args) -> int:
    evaluations = load_reports(args.reports)
    if not evaluations:
        raise InputError(f"{args.reports}: no report.json files found")
    results = correlation_grid(evaluations, per_language=args.per_language)
    emit_reports(evaluations, args.out or args.reports, correlations=results)
    for r in results:
        rho = "-" if r.rho is None else f"{r.rho:.4f}"
        print(f"{r.language}\t{r.variable_x}\t{r.variable_y}\t{rho}\tn={r.n}")
    return 0


def cmd_bleu(args) -> int:
    score = corpus_bleu(_read_plain(args.hyp), _read_plain(args.ref))
    print(f"{SIGNATURE} = {score.score:.2f}")
    print(score.format())
    return 0


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="mtgender", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    ev = sub.add_parser("evaluate", help="evaluate one system's translations of the challenge set")
    ev.add_argument("--testset", required=True)
    ev.add_argument("--pro", help="upstream-style file listing pro-stereotypical lines")
    ev.add_argument("--anti", help="upstream-style file listing anti-stereotypical lines")
    ev.add_argument("--translations", required=True)
    ev.add_argument("--lang-rules", required=True, help="rules JSON file or bundled pack name (cs, pl)")
    ev.add_argument("--lexicon")
    ev.add_argument("--morph-tags", help="pre-tagged morphology file")
    ev.add_argument("--suffix-rules", help="suffix<TAB>gender rule file")
    ev.add_argument("--analyzer", choices=("null", "suffix"), default="null",
                    help="fallback analyzer when no tag or rule file is given")
    ev.add_argument("--alignments", help="Pharaoh i-j links, one line per testset line")
    ev.add_argument("--ref", help="reference translations for BLEU")
    ev.add_argument("--bleu-hyp", help="system output matching --ref (defaults to --translations)")
    ev.add_argument("--system", required=True)
    ev.add_argument("--out", required=True)
    ev.add_argument("--iterations", type=int, default=5)
    ev.add_argument("--p0", type=float, default=0.08)
    ev.add_argument("--tension", type=float, default=4.0)
    ev.add_argument("--fixed-tension", action="store_true")
    ev.set_defaults(func=cmd_evaluate)

    co = sub.add_parser("correlate", help="aggregate report.json files and correlate metrics")
    co.add_argument("--reports", required=True)
    co.add_argument("--out", help="output directory (defaults to --reports)")
    co.add_argument("--per-language", action="store_true")
    co.set_defaults(func=cmd_correlate)

    bl = sub.add_parser("bleu", help="corpus BLEU")
    bl.add_argument("--hyp", required=True)
    bl.add_argument("--ref", required=True)
    bl.set_defaults(func=cmd_bleu)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (InputError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except Exception as exc:  # noqa: BLE001
        logger.debug("internal error", exc_info=True)
        print(f"internal error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
