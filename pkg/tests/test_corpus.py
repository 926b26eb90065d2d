import json

import numpy as np
import pytest

from fewshot.corpus import (STOPWORDS, DatasetError, Document, EmptyCorpusError,
                            build_unigram_model, clean_tokenize, load_documents,
                            load_frequency_file, load_labeled_dataset)


class TestCleanTokenize:
    def test_lowercases_and_drops_stopwords(self):
        assert clean_tokenize("The cat, the CAT!", {"the"}) == ["cat", "cat"]

    def test_short_tokens_dropped(self):
        assert clean_tokenize("a I x", set()) == []

    def test_hyphen_splits_and_digits_drop(self):
        assert clean_tokenize("Auto-pilot 2000", set()) == ["auto", "pilot"]

    def test_empty_input(self):
        assert clean_tokenize("", set()) == []

    def test_order_preserved(self):
        assert clean_tokenize("zebra apple zebra mango", set()) == \
            ["zebra", "apple", "zebra", "mango"]

    def test_min_token_len_override_for_unit_tests(self):
        assert clean_tokenize("a b a", set(), min_token_len=1) == ["a", "b", "a"]

    def test_default_stoplist_applies(self):
        assert clean_tokenize("this is the engine", STOPWORDS) == ["engine"]

    def test_idempotent_on_own_output(self):
        rng = np.random.default_rng(42)
        words = ["Flying", "cars!", "are-near", "the", "Best", "42", "ok",
                 "auto-pilot", "A", "I've", "it's"]
        for _ in range(25):
            text = " ".join(rng.choice(words, size=rng.integers(1, 25)))
            once = clean_tokenize(text, STOPWORDS)
            twice = clean_tokenize(" ".join(once), STOPWORDS)
            assert once == twice


class TestUnigramModel:
    def d(self, doc_id, tokens):
        return Document(id=doc_id, raw_text=" ".join(tokens), tokens=tuple(tokens))

    def test_counts_over_all_docs(self):
        model = build_unigram_model([self.d("1", ["a", "b"]), self.d("2", ["b", "b"])])
        assert model.p("a") == pytest.approx(0.25)
        assert model.p("b") == pytest.approx(0.75)
        assert model.total_tokens == 4

    def test_single_token_doc(self):
        model = build_unigram_model([self.d("1", ["x", "x"])])
        assert model.p("x") == 1.0

    def test_singleton_probability(self):
        docs = [self.d("1", ["w"] + ["filler"] * 9)]
        assert build_unigram_model(docs).p("w") == pytest.approx(1 / 10)

    def test_unknown_token_probability_zero(self):
        model = build_unigram_model([self.d("1", ["x"])])
        assert model.p("zzz") == 0.0

    def test_empty_corpus_rejected(self):
        with pytest.raises(EmptyCorpusError):
            build_unigram_model([self.d("1", [])])

    def test_probabilities_sum_to_one(self):
        rng = np.random.default_rng(0)
        vocab = [f"w{i}" for i in range(40)]
        for trial in range(20):
            docs = [self.d(str(i), rng.choice(vocab, size=rng.integers(1, 30)).tolist())
                    for i in range(rng.integers(1, 8))]
            model = build_unigram_model(docs)
            assert abs(sum(model.probs.values()) - 1.0) < 1e-9
            assert all(p > 0 for p in model.probs.values())

    def test_permutation_invariant(self):
        rng = np.random.default_rng(1)
        vocab = [f"w{i}" for i in range(10)]
        docs = [self.d(str(i), rng.choice(vocab, size=12).tolist()) for i in range(6)]
        m1 = build_unigram_model(docs)
        m2 = build_unigram_model(list(reversed(docs)))
        assert m1.probs == m2.probs


def write_jsonl(path, records):
    path.write_text("\n".join(json.dumps(r) for r in records) + "\n", encoding="utf-8")
    return path


class TestLoadLabeledDataset:
    def test_two_categories_in_first_appearance_order(self, tmp_path):
        path = write_jsonl(tmp_path / "d.jsonl", [
            {"id": "1", "text": "shiny engine parts", "label": "autos"},
            {"id": "2", "text": "pitcher threw fastball", "label": "baseball"},
        ])
        labeled, categories = load_labeled_dataset(path)
        assert len(labeled) == 2
        assert categories == ["autos", "baseball"]
        assert labeled[0].doc.tokens == ("shiny", "engine", "parts")

    def test_missing_text_field_names_line(self, tmp_path):
        path = write_jsonl(tmp_path / "d.jsonl", [
            {"id": "1", "text": "ok", "label": "a"},
            {"id": "2", "label": "b"},
        ])
        with pytest.raises(DatasetError, match="line 2"):
            load_labeled_dataset(path)

    def test_all_stopword_doc_kept_with_zero_tokens(self, tmp_path):
        path = write_jsonl(tmp_path / "d.jsonl", [
            {"id": "1", "text": "the and of", "label": "a"},
            {"id": "2", "text": "rocket launch", "label": "b"},
        ])
        labeled, _ = load_labeled_dataset(path)
        assert labeled[0].doc.token_count == 0
        assert len(labeled) == 2

    def test_duplicate_id_rejected(self, tmp_path):
        path = write_jsonl(tmp_path / "d.jsonl", [
            {"id": "1", "text": "x y", "label": "a"},
            {"id": "1", "text": "z w", "label": "b"},
        ])
        with pytest.raises(DatasetError, match="duplicate id"):
            load_labeled_dataset(path)

    def test_invalid_json_names_line(self, tmp_path):
        path = tmp_path / "d.jsonl"
        path.write_text('{"id": "1", "text": "ok", "label": "a"}\n{oops\n')
        with pytest.raises(DatasetError, match="line 2"):
            load_labeled_dataset(path)

    def test_missing_label_rejected_for_labeled_load(self, tmp_path):
        path = write_jsonl(tmp_path / "d.jsonl", [{"id": "1", "text": "ok"}])
        with pytest.raises(DatasetError, match="label"):
            load_labeled_dataset(path)


class TestLoadFrequencyFile:
    def test_counts_normalized_to_probabilities(self, tmp_path):
        path = tmp_path / "freq.json"
        path.write_text(json.dumps({"cat": 3, "dog": 1}))
        model = load_frequency_file(path)
        assert model.p("cat") == pytest.approx(0.75)
        assert model.p("dog") == pytest.approx(0.25)
        assert model.p("bird") == 0.0

    def test_empty_or_non_object_rejected(self, tmp_path):
        path = tmp_path / "freq.json"
        path.write_text("{}")
        with pytest.raises(DatasetError, match="non-empty"):
            load_frequency_file(path)
        path.write_text("[1, 2]")
        with pytest.raises(DatasetError, match="non-empty"):
            load_frequency_file(path)

    def test_non_positive_count_rejected(self, tmp_path):
        path = tmp_path / "freq.json"
        path.write_text(json.dumps({"cat": 0}))
        with pytest.raises(DatasetError, match="positive"):
            load_frequency_file(path)


class TestLoadDocuments:
    def test_labels_optional(self, tmp_path):
        path = write_jsonl(tmp_path / "d.jsonl", [
            {"id": "1", "text": "engine rebuild"},
            {"id": "2", "text": "league standings", "label": "ignored"},
        ])
        docs = load_documents(path)
        assert [d.id for d in docs] == ["1", "2"]

    def test_duplicate_id_rejected(self, tmp_path):
        path = write_jsonl(tmp_path / "d.jsonl", [
            {"id": "1", "text": "x y"}, {"id": "1", "text": "z"}])
        with pytest.raises(DatasetError, match="duplicate id"):
            load_documents(path)
