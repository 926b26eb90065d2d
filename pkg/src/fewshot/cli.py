"""Command-line access to the pipeline and the evaluation harness.

Every stage is runnable without the service: embed a batch, fit topics and
page candidates, classify against a labels file, and run the three
maximum-accuracy studies. Seeds default to fixed constants so bare
invocations are reproducible; identical flags and inputs produce
byte-identical artifacts.

Exit codes: 0 success, 1 usage error, 2 data error.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from . import classify as classify_mod
from . import corpus as corpus_mod
from . import embed as embed_mod
from . import evalharness as eval_mod
from . import topics as topics_mod
from . import wordvec as wordvec_mod

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2

_ERROR_MODULES = {
    wordvec_mod.VectorFileError: "wordvec",
    corpus_mod.DatasetError: "corpus",
    corpus_mod.EmptyCorpusError: "corpus",
    topics_mod.LdaError: "topics",
    classify_mod.ClassifyError: "classify",
    eval_mod.HarnessError: "evalharness",
}


class _Parser(argparse.ArgumentParser):
    """argparse exits 2 on usage errors; the CLI contract wants 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _add_vector_flags(p):
    p.add_argument("--vectors", required=True, help="path to a text-format embedding file")
    p.add_argument("--vector-format", choices=wordvec_mod.VECTOR_FORMATS, default="plain",
                   help="embedding file layout (default: plain)")
    p.add_argument("--frequencies", default=None,
                   help="optional JSON token->count file overriding the "
                        "batch-estimated word probabilities")


def _unigram_for(args, docs):
    if getattr(args, "frequencies", None):
        return corpus_mod.load_frequency_file(args.frequencies)
    return corpus_mod.build_unigram_model(docs)


def _add_lda_flags(p, require_k: bool):
    p.add_argument("--k", type=int, required=require_k, default=None,
                   help="topic count" + ("" if require_k else " (default: category count)"))
    p.add_argument("--alpha-lda", type=float, default=None,
                   help="doc-topic prior (default: 50/k)")
    p.add_argument("--beta-lda", type=float, default=topics_mod.DEFAULT_BETA_LDA,
                   help="topic-word prior (default: %(default)s)")
    p.add_argument("--iterations", type=int, default=topics_mod.DEFAULT_ITERATIONS,
                   help="sampler sweeps (default: %(default)s)")
    p.add_argument("--page-size", type=int, default=topics_mod.DEFAULT_PAGE_SIZE,
                   help="candidates per page (default: %(default)s)")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="fewshot",
                     description="few-shot text classification engine and evaluation harness")
    sub = parser.add_subparsers(dest="subcommand", required=True, metavar="SUBCOMMAND")

    p = sub.add_parser("embed", parents=[], help="embed a batch of documents",
                       description="Embed every document of a batch as a "
                                   "frequency-weighted average of word vectors.")
    p.add_argument("--data", required=True, help="line-delimited JSON batch")
    _add_vector_flags(p)
    p.add_argument("--alpha-sif", type=float, default=embed_mod.DEFAULT_ALPHA_SIF,
                   help="weighting parameter (default: %(default)s)")
    p.add_argument("--out", required=True, help="output embeddings (jsonl)")

    p = sub.add_parser("lda", help="fit topics and rank candidate representatives",
                       description="Fit a topic model on the batch and write the "
                                   "per-topic candidate ranking.")
    p.add_argument("--data", required=True)
    _add_lda_flags(p, require_k=True)
    p.add_argument("--seed", type=int, default=0, help="sampler seed (default: %(default)s)")
    p.add_argument("--out", required=True, help="output ranking (json)")

    p = sub.add_parser("classify", help="classify a batch against labeled representatives",
                       description="Build per-category prototypes from a labels file "
                                   "and classify the remaining documents.")
    p.add_argument("--data", required=True)
    p.add_argument("--labels", required=True,
                   help="JSON file mapping category to representative doc ids")
    _add_vector_flags(p)
    p.add_argument("--alpha-sif", type=float, default=embed_mod.DEFAULT_ALPHA_SIF,
                   help="weighting parameter (default: %(default)s)")
    p.add_argument("--out", required=True, help="output predictions (jsonl)")

    p = sub.add_parser("eval-bruteforce",
                       help="maximum one-shot accuracy over representative combinations",
                       description="Exhaustively search (or budget-sample) all "
                                   "one-representative-per-category combinations for "
                                   "the maximum achievable accuracy.")
    p.add_argument("--data", required=True, help="labeled dataset (jsonl)")
    _add_vector_flags(p)
    p.add_argument("--alpha-sif", type=float, default=embed_mod.DEFAULT_ALPHA_SIF,
                   help="weighting parameter (default: %(default)s)")
    p.add_argument("--budget", type=int, default=eval_mod.DEFAULT_BUDGET,
                   help="max combinations before sampling kicks in (default: %(default)s)")
    p.add_argument("--seed", type=int, default=0, help="sampling seed (default: %(default)s)")
    p.add_argument("--threads", type=int, default=None,
                   help="worker threads (default: machine parallelism)")
    p.add_argument("--out", required=True, help="output report (json)")

    p = sub.add_parser("eval-lda",
                       help="maximum one-shot accuracy restricted to surfaced candidates",
                       description="Search only combinations of the topic model's "
                                   "first-page documents.")
    p.add_argument("--data", required=True, help="labeled dataset (jsonl)")
    _add_vector_flags(p)
    p.add_argument("--alpha-sif", type=float, default=embed_mod.DEFAULT_ALPHA_SIF,
                   help="weighting parameter (default: %(default)s)")
    _add_lda_flags(p, require_k=False)
    p.add_argument("--seed", type=int, default=0, help="sampler seed (default: %(default)s)")
    p.add_argument("--threads", type=int, default=None,
                   help="worker threads (default: machine parallelism)")
    p.add_argument("--out", required=True, help="output report (json)")

    p = sub.add_parser("eval-lengthbias",
                       help="representative length vs prediction share correlation",
                       description="Correlate relative representative length with "
                                   "relative prediction count on a 2-category batch.")
    p.add_argument("--data", required=True, help="labeled 2-category dataset (jsonl)")
    _add_vector_flags(p)
    p.add_argument("--alpha-sif", type=float, default=embed_mod.DEFAULT_ALPHA_SIF,
                   help="weighting parameter (default: %(default)s)")
    p.add_argument("--budget", type=int, default=eval_mod.DEFAULT_BUDGET,
                   help="max combinations before sampling kicks in (default: %(default)s)")
    p.add_argument("--seed", type=int, default=0, help="sampling seed (default: %(default)s)")
    p.add_argument("--threads", type=int, default=None,
                   help="worker threads (default: machine parallelism)")
    p.add_argument("--out", required=True, help="output report (json)")

    p = sub.add_parser("serve", help="run the HTTP service",
                       description="Serve the batch workflow over HTTP/JSON. "
                                   "Settings resolve config file < FEWSHOT_* "
                                   "environment < flags.")
    p.add_argument("--config", default=None, help="JSON config file")
    p.add_argument("--vectors", default=None,
                   help="path to a text-format embedding file")
    p.add_argument("--vector-format", choices=wordvec_mod.VECTOR_FORMATS, default=None,
                   help="embedding file layout (default: plain)")
    p.add_argument("--frequencies", default=None,
                   help="optional JSON token->count file overriding batch frequencies")
    p.add_argument("--listen", default=None, help="host:port (default: 127.0.0.1:8765)")
    p.add_argument("--data-dir", default=None,
                   help="batch state directory (default: fewshot_data)")
    p.add_argument("--alpha-sif", type=float, default=None)
    p.add_argument("--page-size", type=int, default=None)
    p.add_argument("--iterations", type=int, default=None)
    p.add_argument("--seed", type=int, default=None)

    return parser


def _write_json(path: str, payload) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, sort_keys=True, indent=2)
        fh.write("\n")


def _write_jsonl(path: str, records) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for rec in records:
            fh.write(json.dumps(rec, sort_keys=True) + "\n")


def _embed_labeled(args):
    """Shared front half of the eval subcommands: load, embed, return parts."""
    labeled, categories = corpus_mod.load_labeled_dataset(args.data)
    table = wordvec_mod.load_vectors(args.vectors, format=args.vector_format)
    docs = [ld.doc for ld in labeled]
    unigram = _unigram_for(args, docs)
    sif = embed_mod.SifConfig(alpha_sif=args.alpha_sif)
    embeddings, skip = embed_mod.embed_batch(docs, table, unigram, sif)
    return labeled, categories, docs, embeddings, skip


def _cmd_embed(args) -> int:
    docs = corpus_mod.load_documents(args.data)
    table = wordvec_mod.load_vectors(args.vectors, format=args.vector_format)
    unigram = _unigram_for(args, docs)
    embeddings, skip = embed_mod.embed_batch(
        docs, table, unigram, embed_mod.SifConfig(alpha_sif=args.alpha_sif))
    _write_jsonl(args.out, (
        {"doc_id": e.doc_id, "vector": e.vector.tolist(),
         "embedded_token_count": e.embedded_token_count, "is_empty": e.is_empty}
        for e in embeddings))
    empty = sum(1 for e in embeddings if e.is_empty)
    print(f"embedded {len(embeddings)} documents (dim={table.dim}, empty={empty}, "
          f"oov_occurrences={skip.total}) -> {args.out}")
    return EXIT_OK


def _cmd_lda(args) -> int:
    docs = corpus_mod.load_documents(args.data)
    cfg = topics_mod.LdaConfig(k=args.k, alpha_lda=args.alpha_lda, beta_lda=args.beta_lda,
                               iterations=args.iterations, seed=args.seed)
    model = topics_mod.fit_lda(docs, cfg)
    ranking = topics_mod.rank_candidates(model, page_size=args.page_size)
    token_counts = {d.id: d.token_count for d in docs}
    payload = {
        "k": cfg.k,
        "seed": cfg.seed,
        "iterations": cfg.iterations,
        "page_size": args.page_size,
        "topics": [[{"doc_id": doc_id, "theta": theta, "token_count": token_counts[doc_id]}
                    for doc_id, theta in topic] for topic in ranking.per_topic],
        "unrankable": list(ranking.unrankable),
    }
    _write_json(args.out, payload)
    for t, page in enumerate(ranking.first_pages):
        ids = ", ".join(doc_id for doc_id, _ in page)
        print(f"topic {t}: {ids}")
    return EXIT_OK


def _cmd_classify(args) -> int:
    docs = corpus_mod.load_documents(args.data)
    table = wordvec_mod.load_vectors(args.vectors, format=args.vector_format)
    unigram = _unigram_for(args, docs)
    embeddings, _ = embed_mod.embed_batch(
        docs, table, unigram, embed_mod.SifConfig(alpha_sif=args.alpha_sif))
    with open(args.labels, "r", encoding="utf-8") as fh:
        labels = json.load(fh)
    selections = labels.get("selections", labels)
    prototypes = classify_mod.build_prototypes(
        {c: list(ids) for c, ids in selections.items()},
        {e.doc_id: e for e in embeddings})
    predictions, unclassifiable = classify_mod.classify_batch(embeddings, prototypes)
    records = [{"doc_id": p.doc_id, "category": p.category,
                "score": p.score, "margin": p.margin} for p in predictions]
    records.extend({"doc_id": doc_id, "category": None, "unclassifiable": True}
                   for doc_id in unclassifiable)
    _write_jsonl(args.out, records)
    print(f"classified {len(predictions)} documents "
          f"({len(unclassifiable)} unclassifiable) -> {args.out}")
    return EXIT_OK


def _cmd_eval_bruteforce(args) -> int:
    labeled, _, _, embeddings, _ = _embed_labeled(args)
    report = eval_mod.search_max_one_shot(labeled, embeddings, budget=args.budget,
                                          seed=args.seed, threads=args.threads,
                                          dataset_id=Path(args.data).stem)
    _write_json(args.out, report.to_dict())
    print(eval_mod.render_report_rows([report]))
    return EXIT_OK


def _cmd_eval_lda(args) -> int:
    labeled, categories, docs, embeddings, _ = _embed_labeled(args)
    k = args.k if args.k is not None else len(categories)
    cfg = topics_mod.LdaConfig(k=k, alpha_lda=args.alpha_lda, beta_lda=args.beta_lda,
                               iterations=args.iterations, seed=args.seed)
    model = topics_mod.fit_lda(docs, cfg)
    report = eval_mod.search_lda_restricted(labeled, embeddings, model,
                                            page_size=args.page_size,
                                            threads=args.threads,
                                            dataset_id=Path(args.data).stem)
    _write_json(args.out, report.to_dict())
    print(eval_mod.render_report_rows([report]))
    if report.failure:
        print(f"note: {report.failure} (first pages lack some category)")
    return EXIT_OK


def _cmd_eval_lengthbias(args) -> int:
    labeled, _, _, embeddings, _ = _embed_labeled(args)
    report = eval_mod.length_bias_analysis(labeled, embeddings, budget=args.budget,
                                           seed=args.seed, threads=args.threads)
    _write_json(args.out, {
        "correlation": report.correlation,
        "mode": report.mode,
        "rows": [{"rep_a": a, "rep_b": b, "relative_length": x, "relative_predictions": y}
                 for a, b, x, y in report.rows],
    })
    print(f"length-bias correlation: {report.correlation:.4f} "
          f"({report.mode}, {len(report.rows)} combinations)")
    return EXIT_OK


def _cmd_serve(args) -> int:
    import uvicorn

    from .service import ServiceConfig, create_app

    config = ServiceConfig.load(args.config, overrides={
        "vectors_path": args.vectors,
        "vector_format": args.vector_format,
        "frequencies_path": args.frequencies,
        "data_dir": args.data_dir,
        "alpha_sif": args.alpha_sif,
        "page_size": args.page_size,
        "lda_iterations": args.iterations,
        "lda_seed": args.seed,
        "listen": args.listen,
    })
    host, _, port = config.listen.rpartition(":")
    app = create_app(config)
    uvicorn.run(app, host=host or "127.0.0.1", port=int(port))
    return EXIT_OK


_COMMANDS = {
    "embed": _cmd_embed,
    "lda": _cmd_lda,
    "classify": _cmd_classify,
    "eval-bruteforce": _cmd_eval_bruteforce,
    "eval-lda": _cmd_eval_lda,
    "eval-lengthbias": _cmd_eval_lengthbias,
    "serve": _cmd_serve,
}


def main(argv: list[str] | None = None) -> int:
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(name)s: %(message)s")
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    try:
        return _COMMANDS[args.subcommand](args)
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except tuple(_ERROR_MODULES) as exc:
        module = next(name for cls, name in _ERROR_MODULES.items() if isinstance(exc, cls))
        print(f"error ({module}): {exc}", file=sys.stderr)
        return EXIT_DATA
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
