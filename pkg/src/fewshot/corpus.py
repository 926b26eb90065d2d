"""Document ingestion: cleaning, tokenization, stop-word removal, unigram stats.

Cleaning rules (fixed, part of the reproducibility surface):

* lowercase the raw text;
* split on any character that is not an ASCII letter (digits, punctuation
  and hyphens all act as separators);
* drop tokens shorter than ``min_token_len`` (default 2);
* drop stop words from the shipped list (see ``data/stopwords_en.txt``).

Datasets are line-delimited JSON records ``{"id": ..., "text": ..., "label"?: ...}``.
Documents that are empty after cleaning are kept and flagged via
``token_count == 0`` so batch counts stay stable for the UI.
"""

from __future__ import annotations

import json
import re
from collections import Counter
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

_LETTER_RUN = re.compile(r"[a-z]+")


class DatasetError(Exception):
    """Raised for malformed dataset files (message names the line)."""


class EmptyCorpusError(Exception):
    """Raised when a corpus contains no tokens at all."""


def _load_default_stopwords() -> frozenset[str]:
    text = resources.files("fewshot.data").joinpath("stopwords_en.txt").read_text("utf-8")
    words = [w.strip() for w in text.splitlines()
             if w.strip() and not w.startswith("#")]
    return frozenset(words)


STOPWORDS: frozenset[str] = _load_default_stopwords()


def clean_tokenize(raw_text: str, stopwords: frozenset[str] | set[str] = STOPWORDS,
                   min_token_len: int = 2) -> list[str]:
    """Clean and tokenize raw text, preserving the order of surviving tokens.

    ``min_token_len`` exists for unit tests that need length-1 tokens; the
    pipeline always uses the default.
    """
    tokens = _LETTER_RUN.findall(raw_text.lower())
    return [t for t in tokens if len(t) >= min_token_len and t not in stopwords]


@dataclass(frozen=True)
class Document:
    """One cleaned document. ``tokens`` is the post-cleaning occurrence list."""

    id: str
    raw_text: str
    tokens: tuple[str, ...]

    @property
    def token_count(self) -> int:
        return len(self.tokens)

    @classmethod
    def from_text(cls, id: str, raw_text: str,
                  stopwords: frozenset[str] | set[str] = STOPWORDS) -> "Document":
        return cls(id=id, raw_text=raw_text,
                   tokens=tuple(clean_tokenize(raw_text, stopwords)))


@dataclass(frozen=True)
class LabeledDocument:
    doc: Document
    gold_label: str


@dataclass(frozen=True)
class UnigramModel:
    """Maximum-likelihood unigram probabilities over a corpus vocabulary."""

    probs: dict[str, float]
    total_tokens: int

    def p(self, token: str) -> float:
        """p(w); 0.0 for tokens outside the model's vocabulary."""
        return self.probs.get(token, 0.0)


def build_unigram_model(docs) -> UnigramModel:
    """Estimate p(w) = count(w) / total tokens over all documents."""
    counts: Counter[str] = Counter()
    for doc in docs:
        counts.update(doc.tokens)
    total = sum(counts.values())
    if total == 0:
        raise EmptyCorpusError("corpus contains no tokens")
    probs = {w: c / total for w, c in counts.items()}
    return UnigramModel(probs=probs, total_tokens=total)


def load_frequency_file(path: str | Path) -> UnigramModel:
    """Optional override for the batch-estimated word probabilities.

    The file is a JSON object mapping token to count (or any positive
    weight); values are normalized to probabilities. Useful when a batch is
    too small to estimate frequencies, or to share one reference corpus
    across batches.
    """
    path = Path(path)
    with path.open("r", encoding="utf-8") as fh:
        raw = json.load(fh)
    if not isinstance(raw, dict) or not raw:
        raise DatasetError(f"{path}: frequency file must be a non-empty JSON object")
    counts: dict[str, float] = {}
    for token, value in raw.items():
        if not isinstance(value, (int, float)) or value <= 0:
            raise DatasetError(f"{path}: count for {token!r} must be positive, got {value!r}")
        counts[str(token)] = float(value)
    total = sum(counts.values())
    probs = {w: c / total for w, c in counts.items()}
    return UnigramModel(probs=probs, total_tokens=max(1, int(total)))


@dataclass
class DatasetRecord:
    id: str
    text: str
    label: str | None = None


def _parse_records(path: Path, require_label: bool) -> list[DatasetRecord]:
    records: list[DatasetRecord] = []
    seen: set[str] = set()
    with path.open("r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise DatasetError(f"{path}: line {lineno}: invalid JSON ({exc.msg})") from exc
            if not isinstance(obj, dict):
                raise DatasetError(f"{path}: line {lineno}: record is not an object")
            for fieldname in ("id", "text"):
                if fieldname not in obj:
                    raise DatasetError(f"{path}: line {lineno}: missing field {fieldname!r}")
            doc_id = str(obj["id"])
            if doc_id in seen:
                raise DatasetError(f"{path}: line {lineno}: duplicate id {doc_id!r}")
            seen.add(doc_id)
            label = obj.get("label")
            if require_label and label is None:
                raise DatasetError(f"{path}: line {lineno}: missing field 'label'")
            records.append(DatasetRecord(id=doc_id, text=str(obj["text"]),
                                         label=None if label is None else str(label)))
    return records


def load_labeled_dataset(path: str | Path,
                         stopwords: frozenset[str] | set[str] = STOPWORDS,
                         ) -> tuple[list[LabeledDocument], list[str]]:
    """Load a labeled dataset; returns documents plus the category list.

    Categories are ordered by first appearance in the file. Documents that
    clean down to nothing are retained with ``token_count == 0``.
    """
    path = Path(path)
    records = _parse_records(path, require_label=True)
    labeled: list[LabeledDocument] = []
    categories: list[str] = []
    for rec in records:
        if rec.label not in categories:
            categories.append(rec.label)
        labeled.append(LabeledDocument(doc=Document.from_text(rec.id, rec.text, stopwords),
                                       gold_label=rec.label))
    return labeled, categories


def load_documents(path: str | Path,
                   stopwords: frozenset[str] | set[str] = STOPWORDS) -> list[Document]:
    """Load an unlabeled batch (labels, if present, are ignored)."""
    path = Path(path)
    return [Document.from_text(rec.id, rec.text, stopwords)
            for rec in _parse_records(path, require_label=False)]
