"""Data ingestion for bridge lead logs, pitch logs and pitch taxonomy overrides."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from datetime import date
from pathlib import Path
from typing import IO, Callable, Generic, List, Optional, Sequence, Tuple, TypeVar, Union

import pandas as pd

from baseball_codes import PitchRecord, PitchTaxonomy
from bridge_codes import BridgeLeadRecord, parse_card, parse_hand
from schemas import DomainError, InputError, ParseError

logger = logging.getLogger(__name__)

Source = Union[str, Path, IO[str]]
T = TypeVar("T")

LEAD_COLUMNS = ("board", "hand", "lead", "orientation")
PITCH_COLUMNS = ("game_id", "date", "opponent", "inning", "pitch_seq", "pitch_type", "bangs")
TAXONOMY_COLUMNS = ("pitch_type", "class")
TAXONOMY_CLASSES = ("fastball", "offspeed")

# Stand-in row for a line with the wrong number of fields; keeps row positions aligned with file lines.
_BAD_ROW_MARK = "\x00bad-row"


@dataclass
class ParsedRows(Generic[T]):
    records: List[T]
    warnings: List[str] = field(default_factory=list)


def _read_table(source: Source, columns: Sequence[str]) -> List[Tuple[int, Tuple[str, ...]]]:
    """Read a headed CSV as strings; return (line number, cells) per non-blank row.

    The header row is read as data against the fixed column names, so pandas
    never infers an index from a long first row and every row with too many
    fields reaches the bad-line handler.
    """

    def _on_bad_line(fields: List[str]) -> List[str]:
        return [_BAD_ROW_MARK, str(len(fields))] + [""] * (len(columns) - 2)

    try:
        frame = pd.read_csv(
            source,
            header=None,
            names=list(columns),
            dtype=str,
            keep_default_na=False,
            skip_blank_lines=False,
            skipinitialspace=True,
            engine="python",
            on_bad_lines=_on_bad_line,
            encoding="utf-8",
        )
    except pd.errors.EmptyDataError as exc:
        raise ParseError("file is empty; expected header " + ",".join(columns), line=1) from exc
    except (pd.errors.ParserError, UnicodeDecodeError) as exc:
        raise ParseError(f"unreadable CSV: {exc}") from exc
    except OSError as exc:
        raise InputError(f"cannot read {source}: {exc}") from exc

    if frame.empty:
        raise ParseError("file is empty; expected header " + ",".join(columns), line=1)
    if not isinstance(frame.index, pd.RangeIndex):
        # a header longer than the column list makes pandas split off an index
        raise ParseError(f"header must be {','.join(columns)} (extra fields)", line=1)

    frame = frame.fillna("")
    header = [str(name).strip() for name in frame.iloc[0]]
    if header != list(columns):
        missing = [c for c in columns if c not in header]
        unknown = [c for c in header if c and c not in columns]
        detail = []
        if missing:
            detail.append("missing " + ", ".join(missing))
        if unknown:
            detail.append("unknown " + ", ".join(unknown))
        raise ParseError(
            f"header must be {','.join(columns)}" + (f" ({'; '.join(detail)})" if detail else " in that order"),
            line=1,
        )

    rows: List[Tuple[int, Tuple[str, ...]]] = []
    for position, values in enumerate(frame.iloc[1:].itertuples(index=False, name=None)):
        cells = tuple(str(value).strip() for value in values)
        if not any(cells):
            continue
        rows.append((position + 2, cells))
    return rows


def _row_parser(
    rows: List[Tuple[int, Tuple[str, ...]]],
    columns: Sequence[str],
    build: Callable[[Tuple[str, ...]], T],
    *,
    skip_invalid: bool,
) -> ParsedRows[T]:
    parsed: ParsedRows[T] = ParsedRows(records=[])
    for line, cells in rows:
        try:
            if cells[0] == _BAD_ROW_MARK:
                raise ParseError(f"expected {len(columns)} fields, found {cells[1]}", line=line)
            try:
                parsed.records.append(build(cells))
            except ParseError as exc:
                raise ParseError(str(exc), line=line, token=exc.token) from exc
            except InputError as exc:
                raise ParseError(str(exc), line=line) from exc
        except ParseError as exc:
            if not skip_invalid:
                raise
            logger.warning("skipping %s", exc)
            parsed.warnings.append(str(exc))
    return parsed


def _parse_int(name: str, text: str, minimum: int) -> int:
    try:
        value = int(text)
    except ValueError:
        raise ParseError(f"{name} must be an integer, got {text!r}", token=text) from None
    if value < minimum:
        raise ParseError(f"{name} must be >= {minimum}, got {value}", token=text)
    return value


def parse_date(text: str, name: str = "date") -> date:
    try:
        return date.fromisoformat(text.strip())
    except (ValueError, AttributeError):
        raise ParseError(f"{name} must be an ISO-8601 date (YYYY-MM-DD), got {text!r}", token=text) from None


def _build_lead(cells: Tuple[str, ...]) -> BridgeLeadRecord:
    board, hand, lead, orientation = cells
    return BridgeLeadRecord(
        board_no=_parse_int("board", board, 1),
        hand=parse_hand(hand),
        lead=parse_card(lead),
        orientation=orientation,
    )


def parse_lead_csv(source: Source) -> List[BridgeLeadRecord]:
    """Bridge lead log with header ``board,hand,lead,orientation``. Any bad row is an error."""
    rows = _read_table(source, LEAD_COLUMNS)
    records = _row_parser(rows, LEAD_COLUMNS, _build_lead, skip_invalid=False).records
    logger.info("parsed %d bridge lead records", len(records))
    return records


def _build_pitch(cells: Tuple[str, ...]) -> PitchRecord:
    game_id, game_date, opponent, inning, pitch_seq, pitch_type, bangs = cells
    return PitchRecord(
        game_id=game_id,
        date=parse_date(game_date),
        opponent=opponent,
        inning=_parse_int("inning", inning, 1),
        pitch_seq=_parse_int("pitch_seq", pitch_seq, 1),
        pitch_type=pitch_type.upper(),
        bangs=_parse_int("bangs", bangs, 0),
    )


def parse_pitch_csv(source: Source, *, skip_invalid: bool = False) -> ParsedRows[PitchRecord]:
    """Pitch log with header ``game_id,date,opponent,inning,pitch_seq,pitch_type,bangs``.

    Malformed rows raise ParseError with their line number, or are skipped with
    a warning when ``skip_invalid`` is set. A repeated (game_id, pitch_seq) pair
    is treated as a malformed row.
    """
    rows = _read_table(source, PITCH_COLUMNS)
    seen = set()

    def _build_unique(cells: Tuple[str, ...]) -> PitchRecord:
        record = _build_pitch(cells)
        key = (record.game_id, record.pitch_seq)
        if key in seen:
            raise ParseError(f"duplicate pitch_seq {record.pitch_seq} in game {record.game_id}", token=cells[4])
        seen.add(key)
        return record

    parsed = _row_parser(rows, PITCH_COLUMNS, _build_unique, skip_invalid=skip_invalid)
    logger.info("parsed %d pitch records (%d skipped)", len(parsed.records), len(parsed.warnings))
    return parsed


def load_taxonomy(source: Optional[Source]) -> PitchTaxonomy:
    """Taxonomy override CSV ``pitch_type,class`` with class fastball or offspeed; None gives the default."""
    if source is None:
        return PitchTaxonomy()
    fastball: List[str] = []
    offspeed: List[str] = []

    def _build(cells: Tuple[str, ...]) -> Tuple[str, str]:
        token, klass = cells[0].upper(), cells[1].lower()
        if not token:
            raise ParseError("pitch_type must be non-empty")
        if klass not in TAXONOMY_CLASSES:
            raise ParseError(f"class must be fastball or offspeed, got {cells[1]!r}", token=cells[1])
        return token, klass

    rows = _read_table(source, TAXONOMY_COLUMNS)
    for token, klass in _row_parser(rows, TAXONOMY_COLUMNS, _build, skip_invalid=False).records:
        (fastball if klass == "fastball" else offspeed).append(token)
    try:
        taxonomy = PitchTaxonomy(fastball_types=frozenset(fastball), offspeed_types=frozenset(offspeed))
    except DomainError as exc:
        raise ParseError(str(exc)) from exc
    logger.info("taxonomy override: %d fastball, %d offspeed types", len(fastball), len(offspeed))
    return taxonomy
