"""Tests for records, history and latency-map files."""

import io

import pytest

from src.errors import RecordsFileError
from src.search.records import (
    IterationRecord,
    TrainedRecord,
    format_records,
    load_latencies,
    load_records,
    parse_accuracy,
    parse_records,
    write_history,
)
from src.space.arch_space import parse_code
from src.space.decoder_space import parse_decoder_code


class TestParseAccuracy:
    @pytest.mark.parametrize("text,expected", [("0.698", 0.698), ("69.8%", 0.698), (" 1 ", 1.0), ("0%", 0.0)])
    def test_values(self, text, expected):
        assert parse_accuracy(text) == pytest.approx(expected)

    @pytest.mark.parametrize("text", ["1.2", "-0.1", "120%", "nan", "abc", ""])
    def test_invalid(self, text):
        with pytest.raises(ValueError):
            parse_accuracy(text)


class TestParseRecords:
    def test_header_comments_and_quotes(self):
        text = (
            "# trained on ImageNet\n"
            "code,latency_ms,accuracy\n"
            '"[(64),(64),(64)]",1.5,0.61\n'
            "\n"
            '"19:[19,32,128]",2.0,70%\n'
        )
        records = parse_records(text)
        assert [str(r.code) for r in records] == ["[(64),(64),(64)]", "19:[19,32,128]"]
        assert records[1].accuracy == pytest.approx(0.7)
        assert records[0].latency == 1.5

    def test_empty(self):
        assert parse_records("code,latency_ms,accuracy\n") == []
        assert parse_records("") == []

    @pytest.mark.parametrize("row", [
        '"[(64),(64),(64)]",1.5',
        '"[(64),(64),(64)]",abc,0.5',
        '"[(64),(64),(64)]",-1,0.5',
        '"[(64),(64),(64)]",1.5,1.5',
        '"[(128),(64),(64)]",1.5,0.5',
        '"[(64),(64),(64)]",1.5,0.5,extra',
    ])
    def test_bad_rows_name_the_line(self, row):
        with pytest.raises(RecordsFileError, match="line 2"):
            parse_records("code,latency_ms,accuracy\n" + row + "\n")

    def test_latency_map(self, tmp_path):
        path = tmp_path / "lat.csv"
        path.write_text('code,latency_ms,accuracy\n"19:[19,19,32]",1.0,\n"19:[19,32,128]",2.0\n')
        latencies = load_latencies(path, parse_decoder_code)
        assert latencies == {parse_decoder_code("19:[19,19,32]"): 1.0, parse_decoder_code("19:[19,32,128]"): 2.0}

    def test_latency_map_duplicates(self, tmp_path):
        path = tmp_path / "lat.csv"
        path.write_text('"19:[19,19,32]",1.0\n"19:[19,19,32]",1.5\n')
        with pytest.raises(RecordsFileError, match="duplicate"):
            load_latencies(path, parse_decoder_code)

    def test_missing_file(self, tmp_path):
        with pytest.raises(RecordsFileError):
            load_records(tmp_path / "absent.csv")


class TestWriters:
    def test_records_read_back_exactly(self):
        records = [
            TrainedRecord(code=parse_code("[(64),(64),(128)]"), latency=0.1 + 0.2, accuracy=1 / 3),
            TrainedRecord(code=parse_decoder_code("19:[19,32,128]"), latency=1.0, accuracy=0.5),
        ]
        text = format_records(records)
        assert text.splitlines()[0] == "code,latency_ms,accuracy"
        back = parse_records(text)
        assert [(r.code, r.latency, r.accuracy) for r in back] == [(r.code, r.latency, r.accuracy) for r in records]

    def test_history(self):
        history = [
            IterationRecord(iteration=1, code="a", latency=1.0, accuracy=0.5, trained=1, pruned=0,
                            frontier_changed=True),
            IterationRecord(iteration=2, code="b", latency=2.0, accuracy=0.25, trained=2, pruned=None,
                            frontier_changed=False),
        ]
        out = io.StringIO()
        write_history(history, out)
        assert out.getvalue().splitlines() == [
            "iteration,code,latency_ms,accuracy,trained,pruned,frontier_changed",
            "1,a,1.0,0.5,1,0,true",
            "2,b,2.0,0.25,2,n/a,false",
        ]
