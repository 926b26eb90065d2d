"""Frequency-weighted average document embeddings.

Each document vector is the mean over token occurrences of
``alpha / (alpha + p(w)) * v_w``, where ``p(w)`` is the corpus unigram
probability. The weight down-ranks frequent words; rare words pass through
almost unscaled. Tokens with no entry in the word-vector table are skipped
and the divisor counts only occurrences that contributed a vector, so
out-of-vocabulary noise does not dilute the average.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field

import numpy as np

from .corpus import Document, UnigramModel
from .wordvec import WordVectorTable

DEFAULT_ALPHA_SIF = 1e-3


@dataclass(frozen=True)
class SifConfig:
    alpha_sif: float = DEFAULT_ALPHA_SIF

    def __post_init__(self):
        if not self.alpha_sif > 0:
            raise ValueError(f"alpha_sif must be positive, got {self.alpha_sif}")


@dataclass
class SkipReport:
    """Aggregated out-of-vocabulary occurrence counts per token."""

    counts: Counter = field(default_factory=Counter)

    def add(self, token: str, n: int = 1) -> None:
        self.counts[token] += n

    @property
    def total(self) -> int:
        return sum(self.counts.values())


@dataclass(frozen=True)
class DocumentEmbedding:
    doc_id: str
    vector: np.ndarray
    embedded_token_count: int

    @property
    def is_empty(self) -> bool:
        return self.embedded_token_count == 0


def sif_weight(p: float, cfg: SifConfig) -> float:
    """alpha / (alpha + p): strictly decreasing in p, equals 1.0 at p = 0."""
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"p must be a probability, got {p}")
    return cfg.alpha_sif / (cfg.alpha_sif + p)


def embed_document(doc: Document, table: WordVectorTable, unigram: UnigramModel,
                   cfg: SifConfig = SifConfig(),
                   skip_report: SkipReport | None = None) -> DocumentEmbedding:
    """Embed one document; the sum runs over token occurrences.

    A token appearing twice contributes twice. Occurrences without a table
    entry are skipped (recorded in ``skip_report`` when given). A document
    with no embeddable occurrences yields the zero vector, flagged empty.
    """
    total = np.zeros(table.dim, dtype=np.float64)
    embedded = 0
    for token in doc.tokens:
        vec = table.lookup(token)
        if vec is None:
            if skip_report is not None:
                skip_report.add(token)
            continue
        total += sif_weight(unigram.p(token), cfg) * vec
        embedded += 1
    if embedded == 0:
        return DocumentEmbedding(doc_id=doc.id, vector=total, embedded_token_count=0)
    return DocumentEmbedding(doc_id=doc.id, vector=total / embedded,
                             embedded_token_count=embedded)


def embed_batch(docs, table: WordVectorTable, unigram: UnigramModel,
                cfg: SifConfig = SifConfig()) -> tuple[list[DocumentEmbedding], SkipReport]:
    """Order-preserving batch embedding with an aggregated skip report."""
    report = SkipReport()
    return [embed_document(d, table, unigram, cfg, skip_report=report) for d in docs], report
