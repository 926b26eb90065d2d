"""Nearest-prototype classification by cosine similarity.

A category's prototype is the arithmetic mean of its labeled documents'
embedding vectors (the single vector itself in the one-shot case); vectors
are averaged raw, without re-normalization, since cosine removes scale at
comparison time. Every non-excluded document is assigned the category whose
prototype it is closest to, with the winning similarity as its score.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .embed import DocumentEmbedding


class ClassifyError(Exception):
    """Raised for invalid prototype selections."""


def cosine_similarity(u: np.ndarray, v: np.ndarray) -> float:
    """dot(u, v) / (|u| * |v|). Raises on zero-norm input."""
    u = np.asarray(u, dtype=np.float64)
    v = np.asarray(v, dtype=np.float64)
    if u.shape != v.shape:
        raise ValueError(f"length mismatch: {u.shape} vs {v.shape}")
    nu = np.sqrt(np.dot(u, u))
    nv = np.sqrt(np.dot(v, v))
    if nu == 0.0 or nv == 0.0:
        raise ValueError("cosine similarity is undefined for zero vectors")
    return float(np.dot(u, v) / (nu * nv))


@dataclass(frozen=True)
class PrototypeSet:
    """Per-category representative ids and mean prototype vectors.

    ``categories`` fixes the tie-break order used at prediction time.
    """

    categories: tuple[str, ...]
    representatives: dict[str, tuple[str, ...]]
    prototypes: dict[str, np.ndarray]

    @property
    def representative_ids(self) -> frozenset[str]:
        return frozenset(i for ids in self.representatives.values() for i in ids)


def build_prototypes(selection: dict[str, list[str]],
                     embeddings: dict[str, DocumentEmbedding],
                     category_order: list[str] | None = None) -> PrototypeSet:
    """Average the selected documents' vectors into one prototype per category.

    ``category_order`` pins the prediction tie-break order; it defaults to
    the selection's own key order.
    """
    categories = list(category_order) if category_order is not None else list(selection)
    if len(categories) < 2:
        raise ClassifyError(f"need at least 2 categories, got {len(categories)}")
    if set(categories) != set(selection):
        raise ClassifyError("category_order does not match selection keys")

    seen: dict[str, str] = {}
    representatives: dict[str, tuple[str, ...]] = {}
    prototypes: dict[str, np.ndarray] = {}
    for cat in categories:
        ids = list(selection[cat])
        if not ids:
            raise ClassifyError(f"category {cat!r} has no representatives")
        vectors = []
        for doc_id in ids:
            if doc_id in seen:
                raise ClassifyError(
                    f"document {doc_id!r} selected for both {seen[doc_id]!r} and {cat!r}")
            seen[doc_id] = cat
            if doc_id not in embeddings:
                raise ClassifyError(f"unknown document id {doc_id!r}")
            emb = embeddings[doc_id]
            if emb.is_empty:
                raise ClassifyError(
                    f"document {doc_id!r} has an empty embedding and cannot represent {cat!r}")
            vectors.append(emb.vector)
        representatives[cat] = tuple(ids)
        prototypes[cat] = np.mean(np.stack(vectors), axis=0) if len(vectors) > 1 \
            else vectors[0].copy()
    return PrototypeSet(categories=tuple(categories),
                        representatives=representatives, prototypes=prototypes)


@dataclass(frozen=True)
class Prediction:
    doc_id: str
    category: str
    score: float
    margin: float


def classify_batch(embeddings, prototypes: PrototypeSet,
                   exclude: set[str] | frozenset[str] | None = None,
                   ) -> tuple[list[Prediction], list[str]]:
    """Predict a category for every non-excluded, non-empty embedding.

    Representative documents are never re-predicted; any caller-provided
    ``exclude`` set is applied on top of them. Empty embeddings produce no
    prediction and come back in the unclassifiable list. Ties go to the
    earlier category in ``prototypes.categories``. Output order follows
    input order.
    """
    excluded = prototypes.representative_ids if exclude is None \
        else prototypes.representative_ids | frozenset(exclude)
    predictions: list[Prediction] = []
    unclassifiable: list[str] = []
    for emb in embeddings:
        if emb.doc_id in excluded:
            continue
        if emb.is_empty:
            unclassifiable.append(emb.doc_id)
            continue
        sims = np.array([cosine_similarity(emb.vector, prototypes.prototypes[c])
                         for c in prototypes.categories])
        best = int(np.argmax(sims))
        score = float(sims[best])
        others = np.delete(sims, best)
        margin = float(score - np.max(others)) if others.size else 0.0
        predictions.append(Prediction(doc_id=emb.doc_id,
                                      category=prototypes.categories[best],
                                      score=score, margin=margin))
    return predictions, unclassifiable
