import numpy as np
import pytest

from fewshot.wordvec import VectorFileError, load_vectors, lookup


def write(tmp_path, text, name="vecs.txt"):
    path = tmp_path / name
    path.write_text(text, encoding="utf-8")
    return path


class TestLoadVectors:
    def test_plain_single_record(self, tmp_path):
        table = load_vectors(write(tmp_path, "cat 1.0 0.0 0.5\n"))
        assert table.dim == 3
        assert len(table) == 1
        assert table.lookup("cat").tolist() == [1.0, 0.0, 0.5]

    def test_headered(self, tmp_path):
        table = load_vectors(write(tmp_path, "2 3\na 1 0 0\nb 0 1 0\n"), format="headered")
        assert table.dim == 3
        assert len(table) == 2
        assert table.lookup("b").tolist() == [0.0, 1.0, 0.0]

    def test_inconsistent_length_names_line(self, tmp_path):
        path = write(tmp_path, "a 1 2 3\nb 1 2 3 4\n")
        with pytest.raises(VectorFileError, match="line 2"):
            load_vectors(path)

    def test_headered_inconsistent_length_names_line(self, tmp_path):
        path = write(tmp_path, "2 3\na 1 2 3\nb 1 2\n")
        with pytest.raises(VectorFileError, match="line 3"):
            load_vectors(path, format="headered")

    def test_missing_file(self, tmp_path):
        with pytest.raises(FileNotFoundError):
            load_vectors(tmp_path / "nope.txt")

    def test_zero_records(self, tmp_path):
        with pytest.raises(VectorFileError, match="no vector records"):
            load_vectors(write(tmp_path, "\n\n"))

    def test_header_mismatch_tolerated_with_warning(self, tmp_path, caplog):
        path = write(tmp_path, "5 7\na 1 2\nb 3 4\n")
        with caplog.at_level("WARNING"):
            table = load_vectors(path, format="headered")
        assert table.dim == 2
        assert len(table) == 2
        assert any("header" in rec.message for rec in caplog.records)

    def test_duplicates_keep_first_and_counted(self, tmp_path):
        table = load_vectors(write(tmp_path, "a 1 2\nb 3 4\na 9 9\n"))
        assert table.lookup("a").tolist() == [1.0, 2.0]
        assert table.load_report.duplicates_skipped == 1
        assert table.load_report.token_count == 2

    def test_non_numeric_value(self, tmp_path):
        with pytest.raises(VectorFileError, match="line 1"):
            load_vectors(write(tmp_path, "a 1 x\n"))

    def test_unknown_format(self, tmp_path):
        with pytest.raises(ValueError, match="format"):
            load_vectors(write(tmp_path, "a 1\n"), format="binary")


class TestLookup:
    def test_present(self, tmp_path):
        table = load_vectors(write(tmp_path, "cat 1 0 0.5\n"))
        assert lookup(table, "cat").tolist() == [1.0, 0.0, 0.5]

    def test_absent_returns_none(self, tmp_path):
        table = load_vectors(write(tmp_path, "cat 1 0 0.5\n"))
        assert lookup(table, "dog") is None

    def test_case_sensitive(self, tmp_path):
        table = load_vectors(write(tmp_path, "cat 1 0 0.5\n"))
        assert lookup(table, "CAT") is None

    def test_lookup_returns_identical_vector_every_call(self, tmp_path):
        table = load_vectors(write(tmp_path, "cat 1 0 0.5\n"))
        first = table.lookup("cat")
        again = table.lookup("cat")
        assert first is again

    def test_vectors_are_read_only(self, tmp_path):
        table = load_vectors(write(tmp_path, "cat 1 0 0.5\n"))
        with pytest.raises(ValueError):
            table.lookup("cat")[0] = 7.0


class TestRoundTripProperties:
    def test_every_token_retrievable_bitwise(self, tmp_path):
        rng = np.random.default_rng(42)
        lines = []
        expected = {}
        for i in range(50):
            token = f"tok{i}"
            values = rng.normal(size=6)
            expected[token] = [float(repr(v)) for v in map(float, values)]
            lines.append(token + " " + " ".join(repr(float(v)) for v in values))
        table = load_vectors(write(tmp_path, "\n".join(lines) + "\n"))
        for token, values in expected.items():
            got = table.lookup(token)
            assert got.tolist() == values  # bitwise: parsed from identical reprs

    def test_loading_twice_agrees_everywhere(self, tmp_path):
        rng = np.random.default_rng(7)
        lines = [f"t{i} " + " ".join(f"{v:.10g}" for v in rng.normal(size=4))
                 for i in range(30)]
        path = write(tmp_path, "\n".join(lines) + "\n")
        t1 = load_vectors(path)
        t2 = load_vectors(path)
        assert set(t1.tokens()) == set(t2.tokens())
        for token in t1.tokens():
            assert np.array_equal(t1.lookup(token), t2.lookup(token))
