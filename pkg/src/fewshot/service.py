"""Long-running engine service: batch workflow with durable state.

Workflow per batch: upload documents and categories, the engine embeds the
batch and fits a topic model sized to the category count, the client pages
through per-topic candidates, submits human label selections, triggers
classification, and reads scored predictions. New label submissions reset a
classified batch to labeled so the human can iterate.

State is one directory per batch under ``<data_dir>/batches/<batch_id>``
holding a versioned ``state.json`` written atomically (temp file + rename).
Mutations to a batch are serialized by a per-batch lock; the word-vector
table is loaded once at startup and shared read-only.
"""

from __future__ import annotations

import json
import logging
import os
import threading
import uuid
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np
from fastapi import FastAPI, Request
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse

from . import classify as classify_mod
from . import corpus as corpus_mod
from . import embed as embed_mod
from . import topics as topics_mod
from .wordvec import WordVectorTable, load_vectors

logger = logging.getLogger(__name__)

STATE_VERSION = 1
EXCERPT_CHARS = 400
LENGTH_IMBALANCE_RATIO = 3.0
INLINE_DOC_LIMIT = 5000

STATUS_INGESTED = "ingested"
STATUS_EMBEDDED = "embedded"
STATUS_CANDIDATES_READY = "candidates_ready"
STATUS_LABELED = "labeled"
STATUS_CLASSIFIED = "classified"

_STATUS_ORDER = [STATUS_INGESTED, STATUS_EMBEDDED, STATUS_CANDIDATES_READY,
                 STATUS_LABELED, STATUS_CLASSIFIED]


class ApiError(Exception):
    """Service-level error carrying an HTTP status and a stable code."""

    def __init__(self, status: int, code: str, message: str, detail=None):
        super().__init__(message)
        self.status = status
        self.code = code
        self.message = message
        self.detail = detail

    def body(self) -> dict:
        return {"code": self.code, "message": self.message, "detail": self.detail}


@dataclass
class ServiceConfig:
    vectors_path: str
    data_dir: str = "fewshot_data"
    vector_format: str = "plain"
    frequencies_path: str | None = None
    alpha_sif: float = embed_mod.DEFAULT_ALPHA_SIF
    alpha_lda: float | None = None
    beta_lda: float = topics_mod.DEFAULT_BETA_LDA
    lda_iterations: int = topics_mod.DEFAULT_ITERATIONS
    lda_seed: int = 0
    page_size: int = topics_mod.DEFAULT_PAGE_SIZE
    inline_doc_limit: int = INLINE_DOC_LIMIT
    listen: str = "127.0.0.1:8765"

    _ENV_PREFIX = "FEWSHOT_"

    @classmethod
    def load(cls, path: str | Path | None = None, env: dict | None = None,
             overrides: dict | None = None) -> "ServiceConfig":
        """Build config from an optional JSON file, environment overrides,
        then explicit overrides (file < env < overrides).

        Environment keys are the field names upper-cased with a FEWSHOT_
        prefix, e.g. FEWSHOT_VECTORS_PATH, FEWSHOT_PAGE_SIZE.
        """
        values: dict = {}
        if path is not None:
            with open(path, "r", encoding="utf-8") as fh:
                values.update(json.load(fh))
        env = os.environ if env is None else env
        for f in cls.__dataclass_fields__.values():
            key = cls._ENV_PREFIX + f.name.upper()
            if key in env:
                raw = env[key]
                if f.type in ("int", "float", "float | None", "int | None"):
                    values[f.name] = json.loads(raw)
                else:
                    values[f.name] = raw
        for name, value in (overrides or {}).items():
            if value is not None:
                values[name] = value
        if "vectors_path" not in values:
            raise ValueError(
                "vectors_path is required (config file key 'vectors_path', "
                "FEWSHOT_VECTORS_PATH, or --vectors)")
        return cls(**values)


def _atomic_write_json(path: Path, payload: dict) -> None:
    tmp = path.with_name(path.name + ".tmp")
    with tmp.open("w", encoding="utf-8") as fh:
        json.dump(payload, fh, sort_keys=True, separators=(",", ":"))
        fh.flush()
        os.fsync(fh.fileno())
    tmp.replace(path)


@dataclass
class BatchState:
    """Durable per-batch state; everything JSON-serializable."""

    batch_id: str
    categories: list[str]
    status: str
    config: dict
    documents: list[dict] = field(default_factory=list)
    embeddings: list[dict] = field(default_factory=list)
    skipped_tokens: dict = field(default_factory=dict)
    ranking: list[list[list]] = field(default_factory=list)  # per topic: [doc_id, theta]
    unrankable: list[str] = field(default_factory=list)
    selections: dict = field(default_factory=dict)
    selection_warnings: list[str] = field(default_factory=list)
    predictions: list[dict] = field(default_factory=list)
    unclassifiable: list[str] = field(default_factory=list)

    def to_json(self) -> dict:
        data = asdict(self)
        data["version"] = STATE_VERSION
        return data

    @classmethod
    def from_json(cls, data: dict) -> "BatchState":
        data = dict(data)
        version = data.pop("version", None)
        if version != STATE_VERSION:
            raise ApiError(500, "state_version", f"unsupported state version {version}")
        return cls(**data)

    def summary(self) -> dict:
        per_cat = {}
        for p in self.predictions:
            per_cat[p["category"]] = per_cat.get(p["category"], 0) + 1
        return {
            "batch_id": self.batch_id,
            "categories": self.categories,
            "status": self.status,
            "document_count": len(self.documents),
            "unrankable": self.unrankable,
            "selections": self.selections,
            "selection_warnings": self.selection_warnings,
            "prediction_counts": per_cat,
            "unclassifiable": self.unclassifiable,
        }


class BatchEngine:
    """Engine core shared by the HTTP layer and by tests.

    One instance per process; batches are durable across instances pointed
    at the same data directory.
    """

    def __init__(self, config: ServiceConfig, table: WordVectorTable | None = None):
        self.config = config
        self.table = table if table is not None else load_vectors(
            config.vectors_path, format=config.vector_format)
        self.data_dir = Path(config.data_dir)
        (self.data_dir / "batches").mkdir(parents=True, exist_ok=True)
        self._locks: dict[str, threading.RLock] = {}
        self._locks_guard = threading.Lock()
        self._jobs: dict[str, threading.Thread] = {}

    # -- persistence ------------------------------------------------------

    def _state_path(self, batch_id: str) -> Path:
        return self.data_dir / "batches" / batch_id / "state.json"

    def _lock(self, batch_id: str) -> threading.RLock:
        with self._locks_guard:
            if batch_id not in self._locks:
                self._locks[batch_id] = threading.RLock()
            return self._locks[batch_id]

    def _save(self, state: BatchState) -> None:
        path = self._state_path(state.batch_id)
        path.parent.mkdir(parents=True, exist_ok=True)
        _atomic_write_json(path, state.to_json())

    def _load(self, batch_id: str) -> BatchState:
        path = self._state_path(batch_id)
        if not path.is_file():
            raise ApiError(404, "batch_not_found", f"unknown batch {batch_id!r}")
        with path.open("r", encoding="utf-8") as fh:
            return BatchState.from_json(json.load(fh))

    # -- workflow ---------------------------------------------------------

    def create_batch(self, documents: list[dict], categories: list[str],
                     overrides: dict | None = None,
                     wait: bool | None = None,
                     batch_id: str | None = None) -> BatchState:
        """Ingest a batch and fit it.

        ``wait=None`` fits inline for batches up to the configured document
        limit and in a background thread above it; True/False force either.
        ``batch_id`` defaults to a fresh uuid.
        """
        if len(categories) < 2:
            raise ApiError(422, "too_few_categories",
                           f"need at least 2 categories, got {len(categories)}")
        if len(set(categories)) != len(categories):
            raise ApiError(422, "duplicate_category", "category names must be unique")
        overrides = dict(overrides or {})
        unknown = set(overrides) - {"alpha_sif", "alpha_lda", "beta_lda",
                                    "lda_iterations", "lda_seed", "page_size"}
        if unknown:
            raise ApiError(422, "unknown_config", f"unknown config keys: {sorted(unknown)}")

        docs: list[corpus_mod.Document] = []
        seen: set[str] = set()
        for i, rec in enumerate(documents):
            if not isinstance(rec, dict) or "id" not in rec or "text" not in rec:
                raise ApiError(422, "malformed_document",
                               f"document {i} must have 'id' and 'text' fields")
            doc_id = str(rec["id"])
            if doc_id in seen:
                raise ApiError(422, "duplicate_id", f"duplicate document id {doc_id!r}",
                               detail={"id": doc_id})
            seen.add(doc_id)
            docs.append(corpus_mod.Document.from_text(doc_id, str(rec["text"])))

        k = len(categories)
        non_empty = sum(1 for d in docs if d.token_count > 0)
        if non_empty < k:
            raise ApiError(422, "too_few_documents",
                           f"need at least {k} non-empty documents, got {non_empty}")

        cfg = {
            "alpha_sif": overrides.get("alpha_sif", self.config.alpha_sif),
            "alpha_lda": overrides.get("alpha_lda", self.config.alpha_lda),
            "beta_lda": overrides.get("beta_lda", self.config.beta_lda),
            "lda_iterations": overrides.get("lda_iterations", self.config.lda_iterations),
            "lda_seed": overrides.get("lda_seed", self.config.lda_seed),
            "page_size": overrides.get("page_size", self.config.page_size),
        }
        if batch_id is not None and self._state_path(batch_id).exists():
            raise ApiError(409, "batch_exists", f"batch {batch_id!r} already exists")
        state = BatchState(
            batch_id=batch_id if batch_id is not None else uuid.uuid4().hex,
            categories=list(categories),
            status=STATUS_INGESTED,
            config=cfg,
            documents=[{"id": d.id, "raw_text": d.raw_text, "tokens": list(d.tokens)}
                       for d in docs],
        )
        with self._lock(state.batch_id):
            self._save(state)
        inline = wait if wait is not None else len(docs) <= self.config.inline_doc_limit
        if inline:
            self._fit(state.batch_id)
        else:
            thread = threading.Thread(target=self._fit, args=(state.batch_id,),
                                      name=f"fit-{state.batch_id}", daemon=True)
            self._jobs[state.batch_id] = thread
            thread.start()
        return self._load(state.batch_id)

    def _documents(self, state: BatchState) -> list[corpus_mod.Document]:
        return [corpus_mod.Document(id=d["id"], raw_text=d["raw_text"],
                                    tokens=tuple(d["tokens"]))
                for d in state.documents]

    def _embeddings(self, state: BatchState) -> dict[str, embed_mod.DocumentEmbedding]:
        out = {}
        for e in state.embeddings:
            out[e["doc_id"]] = embed_mod.DocumentEmbedding(
                doc_id=e["doc_id"],
                vector=np.array(e["vector"], dtype=np.float64),
                embedded_token_count=e["embedded_token_count"])
        return out

    def _fit(self, batch_id: str) -> None:
        with self._lock(batch_id):
            state = self._load(batch_id)
            docs = self._documents(state)
            if self.config.frequencies_path:
                unigram = corpus_mod.load_frequency_file(self.config.frequencies_path)
            else:
                unigram = corpus_mod.build_unigram_model(docs)
            sif = embed_mod.SifConfig(alpha_sif=state.config["alpha_sif"])
            embeddings, skip_report = embed_mod.embed_batch(docs, self.table, unigram, sif)
            state.embeddings = [
                {"doc_id": e.doc_id, "vector": e.vector.tolist(),
                 "embedded_token_count": e.embedded_token_count}
                for e in embeddings]
            state.skipped_tokens = dict(skip_report.counts)
            state.status = STATUS_EMBEDDED
            self._save(state)

            lda_cfg = topics_mod.LdaConfig(
                k=len(state.categories),
                alpha_lda=state.config["alpha_lda"],
                beta_lda=state.config["beta_lda"],
                iterations=state.config["lda_iterations"],
                seed=state.config["lda_seed"])
            model = topics_mod.fit_lda(docs, lda_cfg)
            ranking = topics_mod.rank_candidates(model, page_size=state.config["page_size"])
            state.ranking = [[[doc_id, theta] for doc_id, theta in topic]
                             for topic in ranking.per_topic]
            state.unrankable = list(ranking.unrankable)
            state.status = STATUS_CANDIDATES_READY
            self._save(state)

    def get_batch(self, batch_id: str) -> dict:
        return self._load(batch_id).summary()

    def get_candidates(self, batch_id: str, page: int = 0) -> dict:
        if page < 0:
            raise ApiError(422, "bad_page", f"page must be non-negative, got {page}")
        state = self._load(batch_id)
        if _STATUS_ORDER.index(state.status) < _STATUS_ORDER.index(STATUS_CANDIDATES_READY):
            raise ApiError(409, "wrong_status",
                           f"batch is {state.status}, candidates are not ready")
        page_size = state.config["page_size"]
        page_count = max((-(-len(topic) // page_size) for topic in state.ranking),
                        default=0)
        if page >= page_count:
            raise ApiError(404, "page_out_of_range",
                           f"page {page} is beyond all rankings ({page_count} pages)")
        docs_by_id = {d["id"]: d for d in state.documents}
        topics = []
        for topic in state.ranking:
            entries = []
            for doc_id, theta in topic[page * page_size:(page + 1) * page_size]:
                doc = docs_by_id[doc_id]
                entries.append({
                    "doc_id": doc_id,
                    "excerpt": doc["raw_text"][:EXCERPT_CHARS],
                    "full_text": doc["raw_text"],
                    "theta": theta,
                    "token_count": len(doc["tokens"]),
                })
            topics.append(entries)
        return {"batch_id": batch_id, "page": page, "page_count": page_count,
                "page_size": page_size, "topics": topics,
                "unrankable": state.unrankable}

    def submit_labels(self, batch_id: str, selections: dict) -> dict:
        if not isinstance(selections, dict):
            raise ApiError(422, "bad_selections", "selections must map category to doc ids")
        with self._lock(batch_id):
            state = self._load(batch_id)
            if _STATUS_ORDER.index(state.status) < _STATUS_ORDER.index(STATUS_CANDIDATES_READY):
                raise ApiError(409, "wrong_status",
                               f"batch is {state.status}, cannot accept labels yet")
            missing = [c for c in state.categories if not selections.get(c)]
            if missing:
                raise ApiError(422, "missing_category",
                               f"no selection for categories: {missing}", detail=missing)
            extra = set(selections) - set(state.categories)
            if extra:
                raise ApiError(422, "unknown_category",
                               f"unknown categories: {sorted(extra)}")
            embeddings = self._embeddings(state)
            seen: dict[str, str] = {}
            token_counts = []
            docs_by_id = {d["id"]: d for d in state.documents}
            for cat in state.categories:
                for doc_id in selections[cat]:
                    if doc_id not in docs_by_id:
                        raise ApiError(422, "unknown_document",
                                       f"unknown document id {doc_id!r}")
                    if doc_id in seen:
                        raise ApiError(422, "duplicate_selection",
                                       f"document {doc_id!r} selected for both "
                                       f"{seen[doc_id]!r} and {cat!r}")
                    seen[doc_id] = cat
                    if embeddings[doc_id].is_empty:
                        raise ApiError(422, "empty_embedding",
                                       f"document {doc_id!r} has an empty embedding "
                                       "and cannot represent a category")
                    token_counts.append(len(docs_by_id[doc_id]["tokens"]))

            warnings = []
            if min(token_counts) > 0 and max(token_counts) / min(token_counts) > LENGTH_IMBALANCE_RATIO:
                warnings.append(
                    f"selected representatives differ in length by more than "
                    f"{LENGTH_IMBALANCE_RATIO:g}x ({min(token_counts)} vs "
                    f"{max(token_counts)} tokens); predictions skew toward "
                    "longer representatives, prefer roughly equal lengths")
            state.selections = {c: list(selections[c]) for c in state.categories}
            state.selection_warnings = warnings
            state.predictions = []
            state.unclassifiable = []
            state.status = STATUS_LABELED
            self._save(state)
            return state.summary()

    def run_classification(self, batch_id: str) -> dict:
        with self._lock(batch_id):
            state = self._load(batch_id)
            if state.status != STATUS_LABELED:
                raise ApiError(409, "wrong_status",
                               f"batch is {state.status}, expected {STATUS_LABELED}")
            embeddings = self._embeddings(state)
            try:
                prototypes = classify_mod.build_prototypes(
                    {c: list(ids) for c, ids in state.selections.items()},
                    embeddings, category_order=state.categories)
            except classify_mod.ClassifyError as exc:
                raise ApiError(422, "bad_selection", str(exc)) from exc
            ordered = [embeddings[d["id"]] for d in state.documents]
            predictions, unclassifiable = classify_mod.classify_batch(ordered, prototypes)
            state.predictions = [
                {"doc_id": p.doc_id, "category": p.category,
                 "score": p.score, "margin": p.margin}
                for p in predictions]
            state.unclassifiable = unclassifiable
            state.status = STATUS_CLASSIFIED
            self._save(state)
            return state.summary()

    def get_predictions(self, batch_id: str, category: str | None = None,
                        page: int | None = None, page_size: int = 50) -> dict:
        state = self._load(batch_id)
        if state.status != STATUS_CLASSIFIED:
            raise ApiError(409, "wrong_status",
                           f"batch is {state.status}, expected {STATUS_CLASSIFIED}")
        if category is not None and category not in state.categories:
            raise ApiError(422, "unknown_category", f"unknown category {category!r}")
        docs_by_id = {d["id"]: d for d in state.documents}
        preds = [p for p in state.predictions
                 if category is None or p["category"] == category]
        preds.sort(key=lambda p: (-p["score"], p["doc_id"]))
        total = len(preds)
        if page is not None:
            if page < 0:
                raise ApiError(422, "bad_page", f"page must be non-negative, got {page}")
            preds = preds[page * page_size:(page + 1) * page_size]
        counts: dict[str, int] = {}
        for p in state.predictions:
            counts[p["category"]] = counts.get(p["category"], 0) + 1
        return {
            "batch_id": batch_id,
            "category": category,
            "total": total,
            "page": page,
            "predictions": [
                {**p, "excerpt": docs_by_id[p["doc_id"]]["raw_text"][:EXCERPT_CHARS]}
                for p in preds],
            "prediction_counts": counts,
            "unclassifiable": state.unclassifiable,
            "representatives": state.selections,
        }


def create_app(config: ServiceConfig, table: WordVectorTable | None = None) -> FastAPI:
    """Build the FastAPI application around a BatchEngine."""
    engine = BatchEngine(config, table=table)
    app = FastAPI(title="fewshot classification engine")
    app.state.engine = engine
    # the labeling UI is plain static files and may be served from anywhere
    app.add_middleware(CORSMiddleware, allow_origins=["*"],
                       allow_methods=["*"], allow_headers=["*"])

    @app.exception_handler(ApiError)
    async def handle_api_error(request: Request, exc: ApiError):
        return JSONResponse(status_code=exc.status, content=exc.body())

    @app.post("/batches", status_code=201)
    async def post_batch(request: Request):
        content_type = request.headers.get("content-type", "")
        if content_type.startswith("multipart/form-data"):
            form = await request.form()
            if "documents" not in form:
                raise ApiError(422, "malformed_upload", "missing 'documents' file field")
            raw = await form["documents"].read()
            documents = _parse_jsonl_upload(raw)
            categories = json.loads(form.get("categories", "[]"))
            overrides = json.loads(form.get("config", "{}"))
        else:
            try:
                body = await request.json()
            except json.JSONDecodeError as exc:
                raise ApiError(422, "malformed_upload", f"invalid JSON body: {exc.msg}")
            documents = body.get("documents")
            categories = body.get("categories")
            overrides = body.get("config", {})
        if not isinstance(documents, list) or not isinstance(categories, list):
            raise ApiError(422, "malformed_upload",
                           "body must provide 'documents' (list) and 'categories' (list)")
        state = engine.create_batch(documents, categories, overrides)
        return {"batch_id": state.batch_id, "status": state.status}

    @app.get("/batches/{batch_id}")
    def get_batch(batch_id: str):
        return engine.get_batch(batch_id)

    @app.get("/batches/{batch_id}/candidates")
    def get_candidates(batch_id: str, page: int = 0):
        return engine.get_candidates(batch_id, page=page)

    @app.post("/batches/{batch_id}/labels")
    async def post_labels(batch_id: str, request: Request):
        try:
            body = await request.json()
        except json.JSONDecodeError as exc:
            raise ApiError(422, "malformed_upload", f"invalid JSON body: {exc.msg}")
        selections = body.get("selections", body if isinstance(body, dict) else None)
        return engine.submit_labels(batch_id, selections)

    @app.post("/batches/{batch_id}/classify")
    def post_classify(batch_id: str):
        return engine.run_classification(batch_id)

    @app.get("/batches/{batch_id}/predictions")
    def get_predictions(batch_id: str, category: str | None = None,
                        page: int | None = None, page_size: int = 50):
        return engine.get_predictions(batch_id, category=category,
                                      page=page, page_size=page_size)

    return app


def _parse_jsonl_upload(raw: bytes) -> list[dict]:
    documents = []
    for lineno, line in enumerate(raw.decode("utf-8").splitlines(), start=1):
        if not line.strip():
            continue
        try:
            documents.append(json.loads(line))
        except json.JSONDecodeError as exc:
            raise ApiError(422, "malformed_upload",
                           f"line {lineno}: invalid JSON ({exc.msg})")
    return documents
