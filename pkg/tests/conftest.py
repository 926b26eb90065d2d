import numpy as np
import pytest

from fewshot.corpus import Document, LabeledDocument
from fewshot.embed import DocumentEmbedding
from fewshot.wordvec import WordVectorTable


def make_table(entries: dict) -> WordVectorTable:
    dim = len(next(iter(entries.values())))
    return WordVectorTable(
        {t: np.array(v, dtype=np.float64) for t, v in entries.items()},
        dim=dim, source_id="test")


def make_embedding(doc_id: str, vector, count: int | None = None) -> DocumentEmbedding:
    vec = np.array(vector, dtype=np.float64)
    if count is None:
        count = 0 if not vec.any() else 1
    return DocumentEmbedding(doc_id=doc_id, vector=vec, embedded_token_count=count)


def make_labeled(doc_id: str, label: str, n_tokens: int = 5) -> LabeledDocument:
    tokens = tuple(f"tok{i}" for i in range(n_tokens))
    return LabeledDocument(doc=Document(id=doc_id, raw_text=" ".join(tokens),
                                        tokens=tokens),
                           gold_label=label)


def random_labeled_instance(rng: np.random.Generator, pool_sizes: list[int],
                            dim: int = 8, extra_per_cat: int = 5):
    """Random instance: pool_sizes[c] candidate docs per category plus
    extra unlabeled-role docs that only get predicted.

    Returns (labeled, embeddings_by_id). Every document is non-empty.
    """
    labeled = []
    embeddings = {}
    for c, size in enumerate(pool_sizes):
        label = f"cat{c}"
        center = rng.normal(size=dim)
        for i in range(size + extra_per_cat):
            doc_id = f"c{c}d{i:03d}"
            n_tokens = int(rng.integers(3, 40))
            labeled.append(make_labeled(doc_id, label, n_tokens))
            vec = center + 0.8 * rng.normal(size=dim)
            embeddings[doc_id] = make_embedding(doc_id, vec, count=n_tokens)
    return labeled, embeddings


@pytest.hookimpl
def pytest_runtest_logreport(report):
    # One visible line per acceptance criterion.
    if "test_acceptance" not in report.nodeid:
        return
    is_call = report.when == "call"
    is_setup_skip = report.when == "setup" and report.skipped
    if not (is_call or is_setup_skip):
        return
    name = report.nodeid.split("::")[-1]
    status = {"passed": "PASS", "failed": "FAIL", "skipped": "BLOCKED (skipped)"}[report.outcome]
    extra = ""
    if report.skipped and report.longrepr:
        extra = " -- " + str(report.longrepr[-1]) if isinstance(report.longrepr, tuple) \
            else " -- " + str(report.longrepr)
    print(f"\n[ACCEPTANCE] {name}: {status}{extra}")
