"""Topic inference over a batch and per-topic candidate ranking.

The model is fit with collapsed Gibbs sampling: per-token topic assignments
are resampled from the count statistics with the document-topic and
topic-word distributions integrated out. The sampler runs a fixed number of
full sweeps from a seeded uniform-random initialization and reads the point
estimates off the final sample:

    theta[d][t] = (n_dt + alpha) / (len_d + k * alpha)
    phi[t][w]   = (n_tw + beta)  / (n_t + V * beta)

Randomness comes from an explicit xorshift64* stream seeded by the config,
so a fixed seed and input order reproduce the model bit for bit. The hot
loop is JIT-compiled; the sweep is sequential by construction (each token
update reads counts written by the previous one), so one fit never runs
across threads. Fitting different batches concurrently is fine.

Documents with no tokens cannot be placed in a topic; they are excluded
from the fit and surfaced separately as ``unrankable``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numba import njit

DEFAULT_BETA_LDA = 0.01
DEFAULT_ITERATIONS = 1000
DEFAULT_PAGE_SIZE = 12


class LdaError(Exception):
    """Raised when a batch cannot support the requested topic count."""


def default_alpha_lda(k: int) -> float:
    """Standard heuristic doc-topic prior: 50 / k."""
    return 50.0 / k


@dataclass(frozen=True)
class LdaConfig:
    k: int
    alpha_lda: float | None = None
    beta_lda: float = DEFAULT_BETA_LDA
    iterations: int = DEFAULT_ITERATIONS
    seed: int = 0

    def __post_init__(self):
        if self.k < 1:
            raise ValueError(f"k must be at least 1, got {self.k}")
        if self.alpha_lda is None:
            object.__setattr__(self, "alpha_lda", default_alpha_lda(self.k))
        if not self.alpha_lda > 0:
            raise ValueError(f"alpha_lda must be positive, got {self.alpha_lda}")
        if not self.beta_lda > 0:
            raise ValueError(f"beta_lda must be positive, got {self.beta_lda}")
        if self.iterations < 1:
            raise ValueError(f"iterations must be at least 1, got {self.iterations}")
        if self.seed < 0:
            raise ValueError(f"seed must be non-negative, got {self.seed}")


_MASK64 = np.uint64(0xFFFFFFFFFFFFFFFF)


def _seed_state(seed: int) -> np.uint64:
    """splitmix64 step; guarantees a nonzero xorshift state for any seed."""
    z = (seed + 0x9E3779B97F4A7C15) & 0xFFFFFFFFFFFFFFFF
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & 0xFFFFFFFFFFFFFFFF
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & 0xFFFFFFFFFFFFFFFF
    z = z ^ (z >> 31)
    return np.uint64(z if z != 0 else 0x9E3779B97F4A7C15)


@njit(cache=True)
def _gibbs_run(token_ids, doc_offsets, k, vocab_size, alpha, beta, iterations, state):
    """Initialize assignments uniformly and run `iterations` full sweeps.

    Returns (z, n_dt, n_tw, n_t). All randomness comes from the xorshift64*
    stream started at `state`; one draw per token for init plus one per
    token per sweep.
    """
    n_tokens = token_ids.shape[0]
    n_docs = doc_offsets.shape[0] - 1
    z = np.zeros(n_tokens, dtype=np.int32)
    n_dt = np.zeros((n_docs, k), dtype=np.int64)
    n_tw = np.zeros((k, vocab_size), dtype=np.int64)
    n_t = np.zeros(k, dtype=np.int64)
    cum = np.zeros(k, dtype=np.float64)
    v_beta = vocab_size * beta
    inv53 = 1.0 / 9007199254740992.0  # 2**-53
    mult = np.uint64(0x2545F4914F6CDD1D)

    for d in range(n_docs):
        for i in range(doc_offsets[d], doc_offsets[d + 1]):
            state ^= state >> np.uint64(12)
            state ^= state << np.uint64(25)
            state ^= state >> np.uint64(27)
            u = ((state * mult) >> np.uint64(11)) * inv53
            t = int(u * k)
            if t >= k:
                t = k - 1
            z[i] = t
            n_dt[d, t] += 1
            n_tw[t, token_ids[i]] += 1
            n_t[t] += 1

    for _ in range(iterations):
        for d in range(n_docs):
            for i in range(doc_offsets[d], doc_offsets[d + 1]):
                w = token_ids[i]
                t_old = z[i]
                n_dt[d, t_old] -= 1
                n_tw[t_old, w] -= 1
                n_t[t_old] -= 1

                total = 0.0
                for t in range(k):
                    total += (n_dt[d, t] + alpha) * (n_tw[t, w] + beta) / (n_t[t] + v_beta)
                    cum[t] = total

                state ^= state >> np.uint64(12)
                state ^= state << np.uint64(25)
                state ^= state >> np.uint64(27)
                u = ((state * mult) >> np.uint64(11)) * inv53 * total

                t_new = k - 1
                for t in range(k - 1):
                    if u < cum[t]:
                        t_new = t
                        break
                z[i] = t_new
                n_dt[d, t_new] += 1
                n_tw[t_new, w] += 1
                n_t[t_new] += 1

    return z, n_dt, n_tw, n_t


@dataclass(frozen=True)
class TopicModel:
    """Fitted state: point estimates, assignments, and the fit inputs."""

    doc_ids: tuple[str, ...]
    theta: np.ndarray
    phi: np.ndarray
    assignments: tuple[np.ndarray, ...]
    vocabulary: tuple[str, ...]
    config: LdaConfig
    unrankable: tuple[str, ...] = ()

    @property
    def k(self) -> int:
        return self.config.k


def fit_lda(docs, cfg: LdaConfig) -> TopicModel:
    """Fit a topic model on the non-empty documents of a batch."""
    included = [d for d in docs if d.token_count > 0]
    unrankable = tuple(d.id for d in docs if d.token_count == 0)
    if len(included) < cfg.k:
        raise LdaError(
            f"need at least {cfg.k} non-empty documents, got {len(included)}")

    vocab: dict[str, int] = {}
    for doc in included:
        for token in doc.tokens:
            if token not in vocab:
                vocab[token] = len(vocab)
    if not vocab:
        raise LdaError("empty vocabulary")

    doc_offsets = np.zeros(len(included) + 1, dtype=np.int64)
    for i, doc in enumerate(included):
        doc_offsets[i + 1] = doc_offsets[i] + doc.token_count
    token_ids = np.empty(doc_offsets[-1], dtype=np.int32)
    pos = 0
    for doc in included:
        for token in doc.tokens:
            token_ids[pos] = vocab[token]
            pos += 1

    z, n_dt, n_tw, n_t = _gibbs_run(
        token_ids, doc_offsets, cfg.k, len(vocab),
        float(cfg.alpha_lda), float(cfg.beta_lda), cfg.iterations,
        _seed_state(cfg.seed))

    doc_lengths = (doc_offsets[1:] - doc_offsets[:-1]).astype(np.float64)
    theta = (n_dt + cfg.alpha_lda) / (doc_lengths[:, None] + cfg.k * cfg.alpha_lda)
    phi = (n_tw + cfg.beta_lda) / (n_t[:, None] + len(vocab) * cfg.beta_lda)

    assignments = tuple(z[doc_offsets[i]:doc_offsets[i + 1]].copy()
                        for i in range(len(included)))
    return TopicModel(doc_ids=tuple(d.id for d in included),
                      theta=theta, phi=phi, assignments=assignments,
                      vocabulary=tuple(vocab.keys()), config=cfg,
                      unrankable=unrankable)


def assign_topics(model: TopicModel) -> dict[str, int]:
    """Map each fitted document to its highest-probability topic.

    Ties break toward the lowest topic index (argmax convention).
    """
    winners = np.argmax(model.theta, axis=1)
    return {doc_id: int(winners[i]) for i, doc_id in enumerate(model.doc_ids)}


@dataclass(frozen=True)
class CandidateRanking:
    """Per-topic document rankings; each document under its argmax topic only.

    Within a topic, entries are (doc_id, probability) in non-increasing
    probability order, ties broken by ascending doc id.
    """

    per_topic: tuple[tuple[tuple[str, float], ...], ...]
    page_size: int = DEFAULT_PAGE_SIZE
    unrankable: tuple[str, ...] = ()

    def page(self, topic: int, page_index: int) -> list[tuple[str, float]]:
        entries = self.per_topic[topic]
        start = page_index * self.page_size
        return list(entries[start:start + self.page_size])

    @property
    def first_pages(self) -> list[list[tuple[str, float]]]:
        return [self.page(t, 0) for t in range(len(self.per_topic))]

    @property
    def page_count(self) -> int:
        longest = max((len(t) for t in self.per_topic), default=0)
        return -(-longest // self.page_size) if longest else 0


def rank_candidates(model: TopicModel, page_size: int = DEFAULT_PAGE_SIZE) -> CandidateRanking:
    """Rank each topic's documents by their probability of belonging to it."""
    if page_size < 1:
        raise ValueError(f"page_size must be positive, got {page_size}")
    winners = assign_topics(model)
    buckets: list[list[tuple[str, float]]] = [[] for _ in range(model.k)]
    for i, doc_id in enumerate(model.doc_ids):
        t = winners[doc_id]
        buckets[t].append((doc_id, float(model.theta[i, t])))
    for bucket in buckets:
        bucket.sort(key=lambda e: (-e[1], e[0]))
    return CandidateRanking(per_topic=tuple(tuple(b) for b in buckets),
                            page_size=page_size, unrankable=model.unrankable)
