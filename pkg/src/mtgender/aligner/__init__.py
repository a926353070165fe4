"""Target-to-source word alignment used to project the entity into the translation."""
from .model import (
    NULL,
    AlignmentConfig,
    AlignmentLinks,
    AlignmentModel,
    corpus_loglik,
    diagonal_feature,
    diagonal_prior,
    dump_alignments,
    expected_feature,
    kernels,
    load_alignments,
    parse_pharaoh,
    train_alignment,
    viterbi_align,
)
from .tokenize import alignment_tokenize, is_punct, token_spans

BACKEND = kernels.BACKEND

__all__ = [
    "BACKEND", "NULL", "AlignmentConfig", "AlignmentLinks", "AlignmentModel", "alignment_tokenize",
    "corpus_loglik", "diagonal_feature", "diagonal_prior", "dump_alignments", "expected_feature",
    "is_punct", "kernels", "load_alignments", "parse_pharaoh", "token_spans", "train_alignment",
    "viterbi_align",
]
