"""Maximum-achievable-accuracy studies over representative choices.

Answers "how good could one-shot classification get if the user picked the
best possible representatives?" by enumerating (or budget-sampling)
combinations of one labeled document per category, classifying the rest of
the batch against each combination, and tracking the maximum accuracy, and
by restricting the same search to the documents a topic model would surface
on its first page.

The fast path precomputes the doc-by-doc cosine matrix once: a one-shot
combination's prototype IS a document vector, so classifying the batch
against a combination reduces to argmax lookups into precomputed rows.
Accuracies are tracked as exact integer correct-counts over a fixed
denominator, so maxima and ties are compared without float noise; ties on
the maximum break toward the lexicographically smallest tuple of document
ids, which makes the reduction independent of evaluation order and thread
count.
"""

from __future__ import annotations

import math
import os
import random
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Iterable, Iterator

import numpy as np

from .classify import Prediction
from .corpus import LabeledDocument
from .embed import DocumentEmbedding
from .topics import DEFAULT_PAGE_SIZE, TopicModel, rank_candidates

DEFAULT_BUDGET = 500_000

MODE_EXHAUSTIVE = "exhaustive"
MODE_SAMPLED = "sampled"
MODE_LDA_RESTRICTED = "lda_restricted"

FAILURE_LDA_MISSING_CATEGORY = "lda_missing_category"


class HarnessError(Exception):
    """Raised for instances the harness cannot evaluate (empty pools etc.)."""


class DegenerateVarianceError(HarnessError):
    """Raised when a correlation is undefined because one variable is constant."""


def pearson_correlation(xs, ys) -> float:
    """Pearson correlation coefficient; rejects zero-variance inputs."""
    x_arr = np.asarray(xs, dtype=np.float64)
    y_arr = np.asarray(ys, dtype=np.float64)
    if x_arr.shape != y_arr.shape or x_arr.ndim != 1:
        raise ValueError("inputs must be 1-d arrays of equal length")
    if x_arr.std() == 0.0 or y_arr.std() == 0.0:
        raise DegenerateVarianceError(
            "correlation undefined: an input has zero variance")
    return float(np.corrcoef(x_arr, y_arr)[0, 1])


def accuracy(predictions: list[Prediction], gold: dict[str, str],
             representatives: dict[str, Iterable[str]],
             convention: str = "exclude_reps") -> float:
    """Fraction of correct predictions.

    ``include_reps`` counts the manually labeled representatives as correct
    in both numerator and denominator; ``exclude_reps`` scores predictions
    only.
    """
    if convention not in ("include_reps", "exclude_reps"):
        raise ValueError(f"unknown convention {convention!r}")
    correct = 0
    for p in predictions:
        if p.doc_id not in gold:
            raise ValueError(f"prediction for {p.doc_id!r} has no gold label")
        if gold[p.doc_id] == p.category:
            correct += 1
    rep_count = sum(len(list(ids)) for ids in representatives.values())
    if convention == "include_reps":
        denom = len(predictions) + rep_count
        num = correct + rep_count
    else:
        denom = len(predictions)
        num = correct
    if denom == 0:
        raise ValueError("accuracy denominator is zero")
    return num / denom


@dataclass(frozen=True)
class EvalReport:
    dataset_id: str
    categories: tuple[str, ...]
    mode: str
    combinations_evaluated: int
    total_combinations: int
    best_combination: dict[str, str] | None
    max_accuracy: float | None
    seed: int | None = None
    failure: str | None = None

    def to_dict(self) -> dict:
        return {
            "dataset_id": self.dataset_id,
            "categories": list(self.categories),
            "mode": self.mode,
            "combinations_evaluated": self.combinations_evaluated,
            "total_combinations": self.total_combinations,
            "best_combination": self.best_combination,
            "max_accuracy": self.max_accuracy,
            "seed": self.seed,
            "failure": self.failure,
        }


def render_report_rows(reports: list[EvalReport]) -> str:
    """Aligned-column text table, one row per report."""
    headers = ("Categories", "# combos", "Evaluated", "Mode", "Max acc.")
    rows = []
    for r in reports:
        acc = "--" if r.max_accuracy is None else f"{r.max_accuracy:.4f}"
        rows.append((", ".join(r.categories), str(r.total_combinations),
                     str(r.combinations_evaluated), r.mode, acc))
    widths = [max(len(h), *(len(row[i]) for row in rows)) if rows else len(h)
              for i, h in enumerate(headers)]
    lines = ["  ".join(h.ljust(widths[i]) for i, h in enumerate(headers))]
    for row in rows:
        lines.append("  ".join(cell.ljust(widths[i]) for i, cell in enumerate(row)))
    return "\n".join(lines)


class _SearchInstance:
    """Cosine matrix and gold indices over the non-empty documents of a batch."""

    def __init__(self, labeled: list[LabeledDocument], embeddings):
        emb_by_id = _embeddings_by_id(embeddings)
        self.categories: list[str] = []
        for ld in labeled:
            if ld.gold_label not in self.categories:
                self.categories.append(ld.gold_label)

        self.docs: list[LabeledDocument] = []
        for ld in labeled:
            emb = emb_by_id.get(ld.doc.id)
            if emb is None:
                raise HarnessError(f"no embedding for document {ld.doc.id!r}")
            if not emb.is_empty:
                self.docs.append(ld)
        self.n = len(self.docs)
        self.ids = [ld.doc.id for ld in self.docs]
        self.pos = {doc_id: i for i, doc_id in enumerate(self.ids)}
        self.token_counts = np.array([ld.doc.token_count for ld in self.docs])
        cat_index = {c: i for i, c in enumerate(self.categories)}
        self.gold_idx = np.array([cat_index[ld.gold_label] for ld in self.docs])

        vectors = np.stack([emb_by_id[i].vector for i in self.ids])
        norms = np.array([math.sqrt(np.dot(row, row)) for row in vectors])
        self.cosine = (vectors @ vectors.T) / np.outer(norms, norms)

        self.pools: list[np.ndarray] = []
        for c in range(len(self.categories)):
            pool = np.flatnonzero(self.gold_idx == c)
            if pool.size == 0:
                raise HarnessError(
                    f"category {self.categories[c]!r} has no non-empty documents")
            self.pools.append(pool)

    @property
    def k(self) -> int:
        return len(self.categories)

    def rep_matrix(self, combo_indices: np.ndarray) -> np.ndarray:
        """Mixed-radix decode of combination indices into doc positions (B x k)."""
        sizes = [p.size for p in self.pools]
        digits = np.empty((combo_indices.size, self.k), dtype=np.int64)
        rem = combo_indices.copy()
        for c in range(self.k - 1, -1, -1):
            digits[:, c] = rem % sizes[c]
            rem //= sizes[c]
        reps = np.empty_like(digits)
        for c in range(self.k):
            reps[:, c] = self.pools[c][digits[:, c]]
        return reps

    def evaluate_block(self, combo_indices: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Correct-counts and per-category prediction counts for a block.

        Returns (reps, correct_counts, pred_counts) where pred_counts has
        shape (B, k) and counts exclude the representatives themselves.
        """
        reps = self.rep_matrix(combo_indices)
        b = reps.shape[0]
        sims = self.cosine[:, reps.ravel()].reshape(self.n, b, self.k)
        pred = np.argmax(sims, axis=2)
        col = np.arange(b)

        correct = pred == self.gold_idx[:, None]
        correct_counts = correct.sum(axis=0)
        pred_counts = np.empty((b, self.k), dtype=np.int64)
        for c in range(self.k):
            pred_counts[:, c] = (pred == c).sum(axis=0)
        for c in range(self.k):
            rep_rows = reps[:, c]
            correct_counts -= correct[rep_rows, col]
            for c2 in range(self.k):
                pred_counts[:, c2] -= pred[rep_rows, col] == c2
        return reps, correct_counts, pred_counts


def _embeddings_by_id(embeddings) -> dict[str, DocumentEmbedding]:
    if isinstance(embeddings, dict):
        return embeddings
    return {e.doc_id: e for e in embeddings}


def _combination_indices(total: int, budget: int, seed: int) -> tuple[str, np.ndarray]:
    """All indices when they fit the budget, else a seeded uniform sample
    without replacement (evaluated in ascending order for determinism)."""
    if total <= budget:
        return MODE_EXHAUSTIVE, np.arange(total, dtype=np.int64)
    sampled = random.Random(seed).sample(range(total), budget)
    return MODE_SAMPLED, np.array(sorted(sampled), dtype=np.int64)


# Cap per-block scratch memory: evaluate_block materializes an n x B x k
# float64 array, so B shrinks as instances grow.
_BLOCK_BYTES = 64 << 20


def _block_size(n_docs: int, k: int) -> int:
    return max(16, min(4096, _BLOCK_BYTES // (8 * max(1, n_docs) * max(1, k))))


def _blocks(indices: np.ndarray, block: int) -> Iterator[np.ndarray]:
    for start in range(0, indices.size, block):
        yield indices[start:start + block]


def _map_blocks(fn, indices: np.ndarray, threads: int | None, block: int):
    """Apply fn to blocks, optionally across threads, preserving block order."""
    blocks = list(_blocks(indices, block))
    if threads is None:
        threads = os.cpu_count() or 1
    if threads <= 1 or len(blocks) <= 1:
        return [fn(b) for b in blocks]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, blocks))


def _run_search(inst: _SearchInstance, indices: np.ndarray,
                threads: int | None) -> tuple[int, tuple[str, ...]]:
    """Best (correct_count, id tuple) over the given combination indices."""
    best_count = -1
    best_ids: tuple[str, ...] | None = None
    results = _map_blocks(lambda b: inst.evaluate_block(b)[:2], indices, threads,
                          _block_size(inst.n, inst.k))
    for reps, counts in results:
        block_best = int(counts.max())
        if block_best < best_count:
            continue
        for row in np.flatnonzero(counts == block_best):
            ids = tuple(inst.ids[p] for p in reps[row])
            if block_best > best_count or ids < best_ids:
                best_count, best_ids = block_best, ids
    return best_count, best_ids


def search_max_one_shot(labeled: list[LabeledDocument], embeddings,
                        budget: int = DEFAULT_BUDGET, seed: int = 0,
                        threads: int | None = None,
                        dataset_id: str = "") -> EvalReport:
    """Search all (or a seeded sample of) one-representative-per-category
    combinations for the maximum accuracy, excluding representatives from
    the accuracy denominator."""
    if budget < 1:
        raise ValueError(f"budget must be positive, got {budget}")
    inst = _SearchInstance(labeled, embeddings)
    if inst.k < 2:
        raise HarnessError(f"need at least 2 categories, got {inst.k}")
    total = math.prod(p.size for p in inst.pools)
    mode, indices = _combination_indices(total, budget, seed)
    best_count, best_ids = _run_search(inst, indices, threads)
    denom = inst.n - inst.k
    if denom <= 0:
        raise HarnessError("batch has no documents to predict beyond the representatives")
    return EvalReport(
        dataset_id=dataset_id,
        categories=tuple(inst.categories),
        mode=mode,
        combinations_evaluated=int(indices.size),
        total_combinations=total,
        best_combination=dict(zip(inst.categories, best_ids)),
        max_accuracy=best_count / denom,
        seed=seed if mode == MODE_SAMPLED else None,
    )


def search_lda_restricted(labeled: list[LabeledDocument], embeddings,
                          model: TopicModel, page_size: int = DEFAULT_PAGE_SIZE,
                          threads: int | None = None,
                          dataset_id: str = "") -> EvalReport:
    """Exhaustive search restricted to the topic model's first-page documents.

    The candidate pool is the union of every topic's first page; a category
    can only be represented by a pooled document whose gold label matches.
    When some category has no such document the report carries the
    ``lda_missing_category`` failure instead of an accuracy, mirroring how a
    first page can simply fail to surface a category.
    """
    inst = _SearchInstance(labeled, embeddings)
    if inst.k < 2:
        raise HarnessError(f"need at least 2 categories, got {inst.k}")
    ranking = rank_candidates(model, page_size=page_size)
    page_ids: list[str] = []
    for page in ranking.first_pages:
        for doc_id, _ in page:
            if doc_id not in page_ids:
                page_ids.append(doc_id)

    pools: list[np.ndarray] = []
    missing = False
    for c, category in enumerate(inst.categories):
        pool = [inst.pos[i] for i in page_ids
                if i in inst.pos and inst.gold_idx[inst.pos[i]] == c]
        if not pool:
            missing = True
            break
        pools.append(np.array(pool, dtype=np.int64))

    if missing:
        return EvalReport(dataset_id=dataset_id, categories=tuple(inst.categories),
                          mode=MODE_LDA_RESTRICTED, combinations_evaluated=0,
                          total_combinations=0, best_combination=None,
                          max_accuracy=None, failure=FAILURE_LDA_MISSING_CATEGORY)

    inst.pools = pools
    total = math.prod(p.size for p in pools)
    indices = np.arange(total, dtype=np.int64)
    best_count, best_ids = _run_search(inst, indices, threads)
    denom = inst.n - inst.k
    if denom <= 0:
        raise HarnessError("batch has no documents to predict beyond the representatives")
    return EvalReport(
        dataset_id=dataset_id,
        categories=tuple(inst.categories),
        mode=MODE_LDA_RESTRICTED,
        combinations_evaluated=total,
        total_combinations=total,
        best_combination=dict(zip(inst.categories, best_ids)),
        max_accuracy=best_count / denom,
    )


@dataclass(frozen=True)
class LengthBiasReport:
    """Per-combination relative lengths and prediction shares, plus their
    Pearson correlation."""

    correlation: float
    mode: str
    rows: list[tuple[str, str, float, float]]  # (rep_a, rep_b, x, y)


def length_bias_analysis(labeled: list[LabeledDocument], embeddings,
                         budget: int = DEFAULT_BUDGET, seed: int = 0,
                         threads: int | None = None) -> LengthBiasReport:
    """Correlate relative representative length with relative prediction count.

    For every combination (a, b) of one representative per category of a
    2-category batch: x = len(a) / (len(a) + len(b)) in tokens and
    y = share of remaining documents predicted into a's category. Returns
    the Pearson correlation of x against y with the raw table.
    """
    inst = _SearchInstance(labeled, embeddings)
    if inst.k != 2:
        raise HarnessError(f"length bias analysis requires exactly 2 categories, got {inst.k}")
    if inst.n - inst.k <= 0:
        raise HarnessError("batch has no documents to predict beyond the representatives")
    total = math.prod(p.size for p in inst.pools)
    mode, indices = _combination_indices(total, budget, seed)

    rows: list[tuple[str, str, float, float]] = []
    xs: list[float] = []
    ys: list[float] = []
    results = _map_blocks(lambda b: inst.evaluate_block(b), indices, threads,
                          _block_size(inst.n, inst.k))
    for reps, _, pred_counts in results:
        len_a = inst.token_counts[reps[:, 0]]
        len_b = inst.token_counts[reps[:, 1]]
        x = len_a / (len_a + len_b)
        denom = pred_counts[:, 0] + pred_counts[:, 1]
        y = pred_counts[:, 0] / denom
        for row in range(reps.shape[0]):
            rows.append((inst.ids[reps[row, 0]], inst.ids[reps[row, 1]],
                         float(x[row]), float(y[row])))
        xs.extend(x.tolist())
        ys.extend(y.tolist())

    try:
        corr = pearson_correlation(xs, ys)
    except DegenerateVarianceError:
        raise DegenerateVarianceError(
            "correlation undefined: representative lengths or prediction "
            "counts have zero variance across combinations") from None
    return LengthBiasReport(correlation=corr, mode=mode, rows=rows)
