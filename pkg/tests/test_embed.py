import numpy as np
import pytest

from fewshot.corpus import Document, UnigramModel, build_unigram_model
from fewshot.embed import (DocumentEmbedding, SifConfig, SkipReport, embed_batch,
                           embed_document, sif_weight)

from .conftest import make_table
from .oracles import naive_sif_embedding


def doc(doc_id, tokens):
    return Document(id=doc_id, raw_text=" ".join(tokens), tokens=tuple(tokens))


class TestSifWeight:
    def test_zero_probability_gives_one(self):
        for alpha in (1e-5, 1e-3, 0.5, 3.0):
            assert sif_weight(0.0, SifConfig(alpha)) == 1.0

    def test_p_equal_alpha_gives_half(self):
        for alpha in (1e-4, 1e-3, 0.25):
            assert sif_weight(alpha, SifConfig(alpha)) == pytest.approx(0.5)

    def test_p_three_alpha_gives_quarter(self):
        assert sif_weight(3e-3, SifConfig(1e-3)) == pytest.approx(0.25)

    def test_strictly_decreasing_in_p(self):
        rng = np.random.default_rng(42)
        cfg = SifConfig(1e-3)
        ps = np.sort(rng.uniform(0, 1, size=200))
        weights = [sif_weight(float(p), cfg) for p in ps]
        assert all(w1 > w2 for w1, w2 in zip(weights, weights[1:]))
        assert all(0 < w <= 1 for w in weights)

    def test_invalid_probability_rejected(self):
        with pytest.raises(ValueError):
            sif_weight(-0.1, SifConfig())
        with pytest.raises(ValueError):
            sif_weight(1.1, SifConfig())

    def test_alpha_must_be_positive(self):
        with pytest.raises(ValueError):
            SifConfig(alpha_sif=0.0)


class TestEmbedDocument:
    def test_single_token(self):
        table = make_table({"cat": [2.0, 0.0]})
        alpha = 1e-3
        unigram = UnigramModel(probs={"cat": alpha}, total_tokens=1)
        emb = embed_document(doc("d", ["cat"]), table, unigram, SifConfig(alpha))
        assert emb.vector.tolist() == [1.0, 0.0]
        assert not emb.is_empty

    def test_duplicate_occurrences_average_to_single_value(self):
        table = make_table({"cat": [2.0, 0.0]})
        alpha = 1e-3
        unigram = UnigramModel(probs={"cat": alpha}, total_tokens=2)
        emb = embed_document(doc("d", ["cat", "cat"]), table, unigram, SifConfig(alpha))
        assert emb.vector.tolist() == [1.0, 0.0]
        assert emb.embedded_token_count == 2

    def test_oov_token_skipped_and_counted(self):
        table = make_table({"cat": [2.0, 0.0]})
        alpha = 1e-3
        unigram = UnigramModel(probs={"cat": alpha, "unk": 0.5}, total_tokens=2)
        report = SkipReport()
        with_unk = embed_document(doc("d", ["cat", "unk"]), table, unigram,
                                  SifConfig(alpha), skip_report=report)
        without = embed_document(doc("d", ["cat"]), table, unigram, SifConfig(alpha))
        assert np.array_equal(with_unk.vector, without.vector)
        assert with_unk.embedded_token_count == 1
        assert report.counts == {"unk": 1}

    def test_all_oov_yields_flagged_zero_vector(self):
        table = make_table({"cat": [1.0, 1.0]})
        unigram = UnigramModel(probs={"dog": 1.0}, total_tokens=1)
        emb = embed_document(doc("d", ["dog"]), table, unigram)
        assert emb.is_empty
        assert not emb.vector.any()
        assert emb.vector.shape == (2,)

    def test_token_order_invariant(self):
        rng = np.random.default_rng(3)
        table = make_table({f"w{i}": rng.normal(size=4).tolist() for i in range(8)})
        tokens = [f"w{i % 8}" for i in range(20)]
        unigram = build_unigram_model([doc("d", tokens)])
        fwd = embed_document(doc("d", tokens), table, unigram)
        rev = embed_document(doc("d", list(reversed(tokens))), table, unigram)
        assert np.allclose(fwd.vector, rev.vector, atol=1e-12)


class TestAgainstNaiveOracle:
    def random_corpus(self, rng, n_docs=5, dim=6, vocab_size=20, oov_share=0.25):
        vectors = {f"w{i}": rng.normal(size=dim).tolist()
                   for i in range(int(vocab_size * (1 - oov_share)))}
        vocab = [f"w{i}" for i in range(vocab_size)]  # some have no vector
        docs = [doc(f"d{i}", rng.choice(vocab, size=rng.integers(1, 30)).tolist())
                for i in range(n_docs)]
        return vectors, docs

    def test_matches_direct_summation_within_1e12(self):
        rng = np.random.default_rng(42)
        for trial in range(10):
            vectors, docs = self.random_corpus(rng)
            table = make_table(vectors)
            unigram = build_unigram_model(docs)
            cfg = SifConfig(1e-3)
            embedded, _ = embed_batch(docs, table, unigram, cfg)
            for d, emb in zip(docs, embedded):
                expected, count = naive_sif_embedding(d.tokens, vectors, unigram.probs,
                                                      cfg.alpha_sif)
                assert emb.embedded_token_count == count
                assert np.all(np.abs(emb.vector - np.array(expected)) < 1e-12)

    def test_scaling_word_vectors_scales_embeddings_exactly(self):
        rng = np.random.default_rng(7)
        vectors, docs = self.random_corpus(rng, oov_share=0.0)
        unigram = build_unigram_model(docs)
        for scale in (2.0, 0.5, 8.0):
            base, _ = embed_batch(docs, make_table(vectors), unigram)
            scaled, _ = embed_batch(
                docs, make_table({t: (np.array(v) * scale).tolist()
                                  for t, v in vectors.items()}), unigram)
            for b, s in zip(base, scaled):
                # scales by powers of two are exact in floating point
                assert np.array_equal(b.vector * scale, s.vector)


class TestEmbedBatch:
    def test_empty_batch(self):
        table = make_table({"x": [1.0]})
        unigram = UnigramModel(probs={"x": 1.0}, total_tokens=1)
        embedded, report = embed_batch([], table, unigram)
        assert embedded == []
        assert report.total == 0

    def test_batch_is_elementwise_composition(self):
        rng = np.random.default_rng(11)
        table = make_table({f"w{i}": rng.normal(size=3).tolist() for i in range(5)})
        docs = [doc("a", ["w0", "w1"]), doc("b", ["w2", "w2", "w4"])]
        unigram = build_unigram_model(docs)
        batch, _ = embed_batch(docs, table, unigram)
        singles = [embed_document(d, table, unigram) for d in docs]
        assert [e.doc_id for e in batch] == ["a", "b"]
        for b, s in zip(batch, singles):
            assert np.array_equal(b.vector, s.vector)

    def test_all_oov_batch_flagged_empty_and_aggregated(self):
        table = make_table({"present": [1.0, 0.0]})
        docs = [doc("a", ["gone", "gone"]), doc("b", ["missing"])]
        unigram = build_unigram_model(docs)
        batch, report = embed_batch(docs, table, unigram)
        assert all(e.is_empty for e in batch)
        assert report.counts == {"gone": 2, "missing": 1}
        assert report.total == 3

    def test_is_empty_iff_zero_count_iff_zero_vector(self):
        rng = np.random.default_rng(5)
        table = make_table({f"w{i}": rng.normal(size=3).tolist() for i in range(4)})
        docs = [doc("a", ["w0"]), doc("b", ["nope"]), doc("c", [])]
        unigram = build_unigram_model(docs[:2])
        batch, _ = embed_batch(docs, table, unigram)
        for emb in batch:
            assert emb.is_empty == (emb.embedded_token_count == 0)
            assert emb.is_empty == (not emb.vector.any())
