import io
from datetime import date

import pytest

from data_loader import load_taxonomy, parse_date, parse_pitch_csv
from schemas import ParseError

HEADER = "game_id,date,opponent,inning,pitch_seq,pitch_type,bangs\n"


def _csv(*rows: str) -> io.StringIO:
    return io.StringIO(HEADER + "".join(row + "\n" for row in rows))


class TestParsePitchCsv:
    def test_one_row(self):
        parsed = parse_pitch_csv(_csv("g1,2017-05-26,NYY,1,1,SL,2"))
        assert len(parsed.records) == 1
        record = parsed.records[0]
        assert record.date == date(2017, 5, 26)
        assert (record.inning, record.pitch_seq, record.pitch_type, record.bangs) == (1, 1, "SL", 2)
        assert parsed.warnings == []

    def test_negative_bangs_reports_line(self):
        with pytest.raises(ParseError) as exc:
            parse_pitch_csv(_csv("g1,2017-05-26,NYY,1,1,SL,0", "g1,2017-05-26,NYY,1,2,FF,-1"))
        assert exc.value.line == 3
        assert "bangs" in str(exc.value)

    def test_fixture_under_skip_policy(self, pitches_csv):
        parsed = parse_pitch_csv(pitches_csv, skip_invalid=True)
        assert len(parsed.records) == 8
        assert len(parsed.warnings) == 2
        assert parsed.warnings[0].startswith("line 5:")
        assert parsed.warnings[1].startswith("line 9:")

    def test_fixture_strict(self, pitches_csv):
        with pytest.raises(ParseError) as exc:
            parse_pitch_csv(pitches_csv)
        assert exc.value.line == 5

    @pytest.mark.parametrize(
        "row,token",
        [
            ("g1,2017-13-01,NYY,1,1,SL,0", "date"),
            ("g1,2017-05-26,NYY,one,1,SL,0", "inning"),
            ("g1,2017-05-26,NYY,1,0,SL,0", "pitch_seq"),
            ("g1,2017-05-26,NYY,1,1,SL,1.5", "bangs"),
        ],
    )
    def test_malformed_fields(self, row, token):
        with pytest.raises(ParseError) as exc:
            parse_pitch_csv(_csv(row))
        assert token in str(exc.value)
        assert exc.value.line == 2

    def test_extra_field(self):
        with pytest.raises(ParseError) as exc:
            parse_pitch_csv(_csv("g1,2017-05-26,NYY,1,1,SL,0", "g1,2017-05-26,NYY,1,2,SL,0,9"))
        assert exc.value.line == 3

    @pytest.mark.parametrize(
        "first,second",
        [
            ("x,g1,2017-05-26,NYY,1,1,SL,0", "y,g1,2017-05-26,NYY,1,2,FF,0"),
            ("g1,2017-05-26,NYY,1,1,SL,0,", "g1,2017-05-26,NYY,1,2,FF,0,"),
        ],
    )
    def test_extra_field_on_first_data_row(self, first, second):
        with pytest.raises(ParseError) as exc:
            parse_pitch_csv(_csv(first, second))
        assert exc.value.line == 2
        assert "expected 7 fields, found 8" in str(exc.value)

    def test_extra_field_rows_skipped_under_policy(self):
        parsed = parse_pitch_csv(
            _csv("x,g1,2017-05-26,NYY,1,1,SL,0", "g1,2017-05-26,NYY,1,2,FF,0", "g1,2017-05-26,NYY,1,3,CH,1,"),
            skip_invalid=True,
        )
        assert [record.pitch_seq for record in parsed.records] == [2]
        assert [warning.split(":")[0] for warning in parsed.warnings] == ["line 2", "line 4"]

    def test_header_with_extra_field(self):
        with pytest.raises(ParseError) as exc:
            parse_pitch_csv(io.StringIO(HEADER.rstrip("\n") + ",notes\ng1,2017-05-26,NYY,1,1,SL,0,x\n"))
        assert exc.value.line == 1

    def test_missing_field(self):
        with pytest.raises(ParseError) as exc:
            parse_pitch_csv(_csv("g1,2017-05-26,NYY,1,1,SL"))
        assert exc.value.line == 2

    def test_duplicate_pitch(self):
        with pytest.raises(ParseError) as exc:
            parse_pitch_csv(_csv("g1,2017-05-26,NYY,1,1,SL,0", "g1,2017-05-26,NYY,1,1,FF,0"))
        assert "duplicate" in str(exc.value)

    def test_missing_column(self):
        with pytest.raises(ParseError) as exc:
            parse_pitch_csv(io.StringIO("game_id,date,opponent,inning,pitch_seq,pitch_type\n"))
        assert "bangs" in str(exc.value)

    def test_blank_lines_ignored(self):
        parsed = parse_pitch_csv(_csv("g1,2017-05-26,NYY,1,1,SL,0", "", "g1,2017-05-26,NYY,1,2,FF,0"))
        assert len(parsed.records) == 2

    def test_empty_file(self):
        with pytest.raises(ParseError):
            parse_pitch_csv(io.StringIO(""))


class TestTaxonomy:
    def test_default(self):
        taxonomy = load_taxonomy(None)
        assert "FF" in taxonomy and "SL" in taxonomy

    def test_override_file(self, taxonomy_csv):
        taxonomy = load_taxonomy(taxonomy_csv)
        assert taxonomy.fastball_types == frozenset({"FF", "SI"})
        assert taxonomy.offspeed_types == frozenset({"SL", "CH"})
        assert "CU" not in taxonomy

    def test_bad_class(self):
        with pytest.raises(ParseError) as exc:
            load_taxonomy(io.StringIO("pitch_type,class\nFF,heater\n"))
        assert exc.value.line == 2

    def test_overlap(self):
        with pytest.raises(ParseError):
            load_taxonomy(io.StringIO("pitch_type,class\nFF,fastball\nFF,offspeed\n"))


def test_parse_date():
    assert parse_date("2017-06-30") == date(2017, 6, 30)
    with pytest.raises(ParseError):
        parse_date("2017-06-31")
