"""Sentence embeddings: pretrained word vectors weighted by corpus IDF.

The default encoder is an IDF-weighted mean of word vectors behind a small
Encoder protocol, so a stronger sentence encoder can be swapped in without
touching the feature pipeline.
"""

from __future__ import annotations

import json
import math
import re
from collections import Counter
from dataclasses import dataclass, field, replace
from typing import Protocol

import numpy as np

from .errors import ConfigError, DataError, FormatError
from .ingest import Corpus

_TOKEN_SPLIT = re.compile(r"[^0-9a-z]+")


def tokenize(text: str) -> list[str]:
    """Lowercase, split on non-alphanumeric runs, drop empty tokens."""
    return [t for t in _TOKEN_SPLIT.split(text.lower()) if t]


@dataclass(frozen=True)
class EmbeddingTable:
    """Immutable word -> vector map with per-word IDF weights.

    A table loaded straight from a vector file has an empty idf map and
    default_idf 1.0, which makes encoding a plain mean; attach corpus IDF
    with `with_idf` to get the weighted encoder.
    """
    dimension: int
    vectors: dict[str, np.ndarray]
    idf: dict[str, float] = field(default_factory=dict)
    default_idf: float = 1.0

    def with_idf(self, idf: dict[str, float], default_idf: float) -> "EmbeddingTable":
        if default_idf < 0 or any(v < 0 for v in idf.values()):
            raise DataError("idf weights must be non-negative")
        return replace(self, idf=dict(idf), default_idf=float(default_idf))

    def __len__(self) -> int:
        return len(self.vectors)


@dataclass(frozen=True)
class SentenceVector:
    values: np.ndarray
    oov_fraction: float


def load_word_vectors(path: str, limit: int | None = None) -> EmbeddingTable:
    """Read a text vector file: one token plus D decimal floats per line.

    The dimension is inferred from the first line; any line that disagrees is
    a format error naming the line number. Duplicate tokens keep the first
    occurrence. `limit` caps the number of entries.
    """
    vectors: dict[str, np.ndarray] = {}
    dimension = None
    with open(path, "r", encoding="utf-8") as fp:
        for lineno, line in enumerate(fp, start=1):
            if not line.strip():
                continue
            parts = line.split()
            token, fields = parts[0], parts[1:]
            if dimension is None:
                if not fields:
                    raise FormatError(f"line {lineno}: no vector components", line=lineno)
                dimension = len(fields)
            elif len(fields) != dimension:
                raise FormatError(
                    f"line {lineno}: expected {dimension} components, got {len(fields)}",
                    line=lineno)
            try:
                vec = np.array(fields, dtype=np.float64)
            except ValueError as exc:
                raise FormatError(f"line {lineno}: {exc}", line=lineno) from exc
            if not np.isfinite(vec).all():
                raise FormatError(f"line {lineno}: non-finite component", line=lineno)
            if token not in vectors:
                vec.setflags(write=False)
                vectors[token] = vec
                if limit is not None and len(vectors) >= limit:
                    break
    if not vectors:
        raise FormatError(f"no vector entries in {path}")
    return EmbeddingTable(dimension=dimension, vectors=vectors)


def build_vocab_idf(corpus: Corpus) -> tuple[dict[str, float], float]:
    """Smoothed inverse paragraph frequency over the corpus vocabulary.

    idf(w) = ln((1 + P) / (1 + df(w))) + 1 with P paragraphs and df the
    number of paragraphs containing w; unseen words get ln(1 + P) + 1.
    """
    if not corpus.articles:
        raise DataError("empty corpus")
    df: Counter[str] = Counter()
    n_paragraphs = 0
    for paragraph in corpus.iter_paragraphs():
        n_paragraphs += 1
        df.update(set(tokenize(paragraph.context)))
    idf = {w: math.log((1 + n_paragraphs) / (1 + c)) + 1.0 for w, c in df.items()}
    default_idf = math.log(1 + n_paragraphs) + 1.0
    return idf, default_idf


def encode_sentence(tokens: list[str], table: EmbeddingTable) -> SentenceVector:
    """IDF-weighted mean of the in-vocabulary token vectors.

    Aggregates counts per unique token and sums in sorted-token order, so the
    result is exactly permutation-invariant. An empty or fully out-of-vocabulary
    token list yields the zero vector with oov_fraction 1.
    """
    total = len(tokens)
    counts = Counter(tokens)
    numerator = np.zeros(table.dimension, dtype=np.float64)
    denominator = 0.0
    n_oov = 0
    for token in sorted(counts):
        count = counts[token]
        vec = table.vectors.get(token)
        if vec is None:
            n_oov += count
            continue
        w = count * table.idf.get(token, table.default_idf)
        numerator += w * vec
        denominator += w
    if total == 0 or denominator == 0.0:
        return SentenceVector(np.zeros(table.dimension), 1.0)
    return SentenceVector(numerator / denominator, n_oov / total)


class Encoder(Protocol):
    encoder_id: str

    def encode(self, tokens: list[str]) -> SentenceVector: ...


class IdfMeanEncoder:
    """Default encoder: tokenize, then IDF-weighted mean of word vectors."""

    def __init__(self, table: EmbeddingTable):
        self.table = table
        self.encoder_id = f"idf-mean-d{table.dimension}-v{len(table)}"

    def encode(self, tokens: list[str]) -> SentenceVector:
        return encode_sentence(tokens, self.table)

    def encode_text(self, text: str) -> SentenceVector:
        return self.encode(tokenize(text))


def truncate_table(table: EmbeddingTable, dim: int) -> EmbeddingTable:
    """Keep only the leading dim coordinates of every word vector."""
    if not (1 <= dim <= table.dimension):
        raise ConfigError(
            f"encoder dim must be in [1, {table.dimension}], got {dim}"
        )
    if dim == table.dimension:
        return table
    vectors = {}
    for word, vec in table.vectors.items():
        short = vec[:dim].copy()
        short.flags.writeable = False
        vectors[word] = short
    return EmbeddingTable(dim, vectors, table.idf, table.default_idf)


def save_idf(idf: dict[str, float], default_idf: float, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fp:
        json.dump({"default_idf": default_idf, "idf": idf}, fp,
                  ensure_ascii=False, sort_keys=True)


def load_idf(path: str) -> tuple[dict[str, float], float]:
    with open(path, "r", encoding="utf-8") as fp:
        payload = json.load(fp)
    return dict(payload["idf"]), float(payload["default_idf"])
