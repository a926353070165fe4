import re
import unicodedata

_TOKEN_RE = re.compile(r"\w+|[^\w\s]")


def alignment_tokenize(sentence: str) -> list:
    """Lowercase and split into word tokens and single punctuation marks."""
    return _TOKEN_RE.findall(unicodedata.normalize("NFC", sentence).lower())


def is_punct(token: str) -> bool:
    return not any(ch.isalnum() for ch in token)


def token_spans(sentence: str) -> list:
    """For each whitespace token, the positions it occupies in ``alignment_tokenize(sentence)``."""
    spans = []
    pos = 0
    for word in sentence.split():
        n = len(alignment_tokenize(word))
        spans.append(list(range(pos, pos + n)))
        pos += n
    return spans
