"""Human-in-the-loop few-shot text classification engine.

Pipeline: documents are embedded as frequency-weighted averages of
pre-trained word vectors, a topic model surfaces candidate category
representatives for a human to label, and the rest of the batch is
classified by cosine similarity to the labeled prototypes. An evaluation
harness searches representative combinations for the maximum achievable
accuracy.
"""

from .classify import (PrototypeSet, Prediction, build_prototypes, classify_batch,
                       cosine_similarity)
from .corpus import (Document, LabeledDocument, UnigramModel, build_unigram_model,
                     clean_tokenize, load_documents, load_labeled_dataset, STOPWORDS)
from .embed import (DocumentEmbedding, SifConfig, SkipReport, embed_batch,
                    embed_document, sif_weight)
from .evalharness import (EvalReport, LengthBiasReport, accuracy,
                          length_bias_analysis, search_lda_restricted,
                          search_max_one_shot)
from .topics import (CandidateRanking, LdaConfig, TopicModel, assign_topics,
                     fit_lda, rank_candidates)
from .wordvec import WordVectorTable, load_vectors, lookup

__version__ = "0.1.0"

__all__ = [
    "CandidateRanking", "Document", "DocumentEmbedding", "EvalReport",
    "LabeledDocument", "LdaConfig", "LengthBiasReport", "Prediction",
    "PrototypeSet", "STOPWORDS", "SifConfig", "SkipReport", "TopicModel",
    "UnigramModel", "WordVectorTable", "accuracy", "assign_topics",
    "build_prototypes", "build_unigram_model", "classify_batch", "clean_tokenize",
    "cosine_similarity", "embed_batch", "embed_document", "fit_lda",
    "length_bias_analysis", "load_documents", "load_labeled_dataset",
    "load_vectors", "lookup", "rank_candidates", "search_lda_restricted",
    "search_max_one_shot", "sif_weight",
]
