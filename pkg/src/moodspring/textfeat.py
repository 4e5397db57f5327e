"""Tokenization and term-frequency / TF-IDF text features."""

import json
import re
from dataclasses import dataclass

import numpy as np

from .dsp import FeatureVector
from .errors import FormatError, InvalidInput

VOCAB_SCHEMA_VERSION = 1

# a token is a maximal run of Unicode letters/digits; \w minus underscore
_TOKEN = re.compile(r"[^\W_]+", re.UNICODE)


def tokenize(text: str) -> list[str]:
    """Lowercase and split on any non-alphanumeric character."""
    return _TOKEN.findall(text.lower())


@dataclass(frozen=True)
class Vocabulary:
    """Sorted term list with document frequencies; term index = vector coordinate."""

    terms: tuple[str, ...]
    df: tuple[int, ...]
    n_docs: int

    def __post_init__(self):
        if len(self.terms) != len(self.df):
            raise InvalidInput("terms and df lengths differ")
        if list(self.terms) != sorted(set(self.terms)):
            raise InvalidInput("vocabulary terms must be unique and sorted")
        if any(not (1 <= d <= self.n_docs) for d in self.df):
            raise InvalidInput("document frequencies must lie in [1, n_docs]")

    @property
    def size(self) -> int:
        return len(self.terms)

    def index(self) -> dict[str, int]:
        return {t: i for i, t in enumerate(self.terms)}


def build_vocab(corpus: list[list[str]], min_df: int = 1) -> Vocabulary:
    """Vocabulary over a tokenized corpus, keeping terms with df >= min_df."""
    if not corpus:
        raise InvalidInput("cannot build a vocabulary from an empty corpus")
    counts: dict[str, int] = {}
    for doc in corpus:
        for term in set(doc):
            counts[term] = counts.get(term, 0) + 1
    kept = sorted(t for t, d in counts.items() if d >= min_df)
    return Vocabulary(tuple(kept), tuple(counts[t] for t in kept), n_docs=len(corpus))


def idf_weights(vocab: Vocabulary) -> np.ndarray:
    """Smoothed inverse document frequency: ln((1+N)/(1+df)) + 1."""
    df = np.asarray(vocab.df, dtype=np.float64)
    return np.log((1.0 + vocab.n_docs) / (1.0 + df)) + 1.0


def vectorize(tokens: list[str], vocab: Vocabulary, mode: str = "tfidf") -> FeatureVector:
    """Map a token list onto vocabulary coordinates.

    mode "tf": raw counts. mode "tfidf": counts weighted by smoothed idf,
    then L2-normalized (the all-zero vector is left as-is). Out-of-vocab
    tokens are ignored either way.
    """
    if mode not in ("tf", "tfidf"):
        raise InvalidInput(f"unknown vectorize mode {mode!r}")
    index = vocab.index()
    values = np.zeros(vocab.size, dtype=np.float64)
    for token in tokens:
        i = index.get(token)
        if i is not None:
            values[i] += 1.0
    if mode == "tfidf":
        values *= idf_weights(vocab)
        norm = np.linalg.norm(values)
        if norm > 0.0:
            values /= norm
    return FeatureVector(values, kind="tfidf")


def save_vocab(vocab: Vocabulary) -> bytes:
    doc = {
        "schema_version": VOCAB_SCHEMA_VERSION,
        "kind": "vocabulary",
        "terms": list(vocab.terms),
        "df": list(vocab.df),
        "n_docs": vocab.n_docs,
    }
    return json.dumps(doc, sort_keys=True).encode("utf-8")


def load_vocab(payload: bytes) -> Vocabulary:
    try:
        doc = json.loads(payload.decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise FormatError(f"corrupt vocabulary payload: {exc}") from exc
    if not isinstance(doc, dict) or doc.get("kind") != "vocabulary":
        raise FormatError("payload is not a vocabulary artifact")
    version = doc.get("schema_version")
    if version != VOCAB_SCHEMA_VERSION:
        raise FormatError(
            f"unsupported vocabulary schema version {version!r}; this build reads version {VOCAB_SCHEMA_VERSION}"
        )
    try:
        return Vocabulary(tuple(doc["terms"]), tuple(int(d) for d in doc["df"]), int(doc["n_docs"]))
    except (KeyError, TypeError, ValueError, InvalidInput) as exc:
        raise FormatError(f"malformed vocabulary payload: {exc}") from exc
