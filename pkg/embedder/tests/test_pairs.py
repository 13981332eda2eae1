import pytest

from rhetembed.errors import InputParseError
from rhetembed.pairs import LABELS, Pair, normalize_label, read_pairs, read_pairs_file

CSV = "EDU1,EDU2,Label\nfirst unit,second unit,Elaboration\nanother,thing,Joint\n"


class TestReadPairs:
    def test_rows_become_pairs_with_row_index_ids(self):
        pairs = read_pairs(CSV)
        assert pairs == [
            Pair(id=0, edu1="first unit", edu2="second unit", label="Elaboration"),
            Pair(id=1, edu1="another", edu2="thing", label="Joint"),
        ]

    def test_code_follows_label_position(self):
        pairs = read_pairs(CSV)
        assert pairs[0].code == 0
        assert pairs[1].code == 7

    def test_header_only_gives_no_pairs(self):
        assert read_pairs("EDU1,EDU2,Label\n") == []

    def test_labels_normalize_case_and_alias(self):
        content = (
            "EDU1,EDU2,Label\na,b,contrast\nc,d,Re-statement\ne,f,CAUSE-EFFECT\n"
        )
        labels = [p.label for p in read_pairs(content)]
        assert labels == ["Contrast", "Restatement", "Cause-Effect"]

    def test_quoted_fields_parse(self):
        content = 'EDU1,EDU2,Label\n"a, with comma","line\nbreak",Joint\n'
        (pair,) = read_pairs(content)
        assert pair.edu1 == "a, with comma"
        assert pair.edu2 == "line\nbreak"

    def test_crlf_and_bom_tolerated(self):
        content = "﻿EDU1,EDU2,Label\r\na,b,Narration\r\n"
        (pair,) = read_pairs(content)
        assert pair.label == "Narration"

    def test_missing_header_rejected(self):
        with pytest.raises(InputParseError, match="header must be"):
            read_pairs("a,b,Joint\n")

    def test_empty_file_rejected(self):
        with pytest.raises(InputParseError, match="empty"):
            read_pairs("")

    def test_wrong_field_count_names_row(self):
        with pytest.raises(InputParseError, match="row 2"):
            read_pairs("EDU1,EDU2,Label\na,b,Joint\na,b\n")

    def test_empty_edu_rejected(self):
        with pytest.raises(InputParseError, match="row 1: empty EDU"):
            read_pairs("EDU1,EDU2,Label\n,b,Joint\n")

    def test_unknown_label_names_row(self):
        with pytest.raises(InputParseError, match="row 1: unknown label 'Sequence'"):
            read_pairs("EDU1,EDU2,Label\na,b,Sequence\n")


class TestNormalizeLabel:
    def test_all_canonical_names_accepted(self):
        for name in LABELS:
            assert normalize_label(name, 1) == name

    def test_surrounding_whitespace_stripped(self):
        assert normalize_label("  Joint ", 1) == "Joint"


class TestReadPairsFile:
    def test_reads_and_parses(self, tmp_path):
        path = tmp_path / "pairs.csv"
        path.write_text(CSV, encoding="utf-8")
        assert len(read_pairs_file(str(path))) == 2

    def test_missing_file_names_path(self, tmp_path):
        missing = str(tmp_path / "absent.csv")
        with pytest.raises(InputParseError, match="absent.csv"):
            read_pairs_file(missing)

    def test_parse_error_names_path(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("EDU1,EDU2,Label\na,b,Nope\n", encoding="utf-8")
        with pytest.raises(InputParseError, match="bad.csv: row 1"):
            read_pairs_file(str(path))
