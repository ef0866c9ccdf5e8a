"""Pitch records, code B, quiet-period bang rates and per-game / per-series evidence."""

from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from datetime import date
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple

import pandas as pd

from evidence_model import combine_log10_lr, log10_lr, summarize
from schemas import CodedModel, DomainError, MatchSummary, RandomModel, SignalObservation

logger = logging.getLogger(__name__)

FASTBALL_TYPES: FrozenSet[str] = frozenset({"FF", "FT", "FC", "SI", "FS"})
OFFSPEED_TYPES: FrozenSet[str] = frozenset({"CH", "CU", "SL", "KC", "KN", "EP", "FO", "SC"})

INDEPENDENCE_NOTE = "combined log10_lr is the sum over groups and assumes an independent q per group"


@dataclass(frozen=True)
class PitchRecord:
    game_id: str
    date: date
    opponent: str
    inning: int
    pitch_seq: int
    pitch_type: str
    bangs: int

    def __post_init__(self) -> None:
        if not self.game_id:
            raise DomainError("game_id must be non-empty")
        for name in ("inning", "pitch_seq"):
            value = getattr(self, name)
            if isinstance(value, bool) or not isinstance(value, int) or value < 1:
                raise DomainError(f"{name} must be a positive integer, got {value!r}")
        if isinstance(self.bangs, bool) or not isinstance(self.bangs, int) or self.bangs < 0:
            raise DomainError(f"bangs must be a nonnegative integer, got {self.bangs!r}")


@dataclass(frozen=True)
class PitchTaxonomy:
    fastball_types: FrozenSet[str] = FASTBALL_TYPES
    offspeed_types: FrozenSet[str] = OFFSPEED_TYPES

    def __post_init__(self) -> None:
        overlap = self.fastball_types & self.offspeed_types
        if overlap:
            raise DomainError(f"pitch types listed as both fastball and offspeed: {', '.join(sorted(overlap))}")

    def __contains__(self, pitch_type: str) -> bool:
        return pitch_type in self.fastball_types or pitch_type in self.offspeed_types


DEFAULT_TAXONOMY = PitchTaxonomy()


@dataclass(frozen=True)
class GameGroup:
    """Records of one game (or one series of games), ordered by pitch_seq within each game."""

    game_id: str
    date: date
    opponent: str
    records: Tuple[PitchRecord, ...]
    games: Tuple[str, ...] = ()


@dataclass(frozen=True)
class BangRateEstimate:
    per_pitch_rate: float
    per_game_max_rate: float
    games: int
    pitches: int

    def to_dict(self) -> Dict[str, object]:
        return asdict(self)


@dataclass
class GroupEvidence:
    group: GameGroup
    summary: MatchSummary
    log10_lr: float

    def to_row(self) -> Dict[str, object]:
        return {
            "group": self.group.game_id,
            "date": self.group.date.isoformat(),
            "opponent": self.group.opponent,
            "games": len(self.group.games) or 1,
            **self.summary.to_dict(),
            "log10_lr": self.log10_lr,
        }


@dataclass
class GroupedEvidence:
    groups: List[GroupEvidence]
    combined_log10_lr: float
    grouping: str = "game"
    note: str = INDEPENDENCE_NOTE
    warnings: List[str] = field(default_factory=list)


class UnknownPitchType(DomainError):
    def __init__(self, pitch_type: str) -> None:
        self.pitch_type = pitch_type
        super().__init__(f"unknown pitch type {pitch_type!r}")


def code_b_expected(pitch_type: str, taxonomy: PitchTaxonomy = DEFAULT_TAXONOMY) -> int:
    """No bang for the fastball family, a bang for anything off-speed."""
    if pitch_type in taxonomy.fastball_types:
        return 0
    if pitch_type in taxonomy.offspeed_types:
        return 1
    raise UnknownPitchType(pitch_type)


def binarize_bangs(bangs: int) -> int:
    if isinstance(bangs, bool) or not isinstance(bangs, int) or bangs < 0:
        raise DomainError(f"bangs must be a nonnegative integer, got {bangs!r}")
    return 1 if bangs >= 1 else 0


def code_b_observations(
    records: Iterable[PitchRecord],
    taxonomy: PitchTaxonomy = DEFAULT_TAXONOMY,
    *,
    skip_unknown: bool = False,
    warnings: Optional[List[str]] = None,
) -> List[SignalObservation]:
    observations: List[SignalObservation] = []
    for record in records:
        try:
            expected = code_b_expected(record.pitch_type, taxonomy)
        except UnknownPitchType as exc:
            if not skip_unknown:
                raise DomainError(f"game {record.game_id} pitch {record.pitch_seq}: {exc}") from exc
            message = f"skipped game {record.game_id} pitch {record.pitch_seq}: {exc}"
            logger.warning(message)
            if warnings is not None:
                warnings.append(message)
            continue
        observations.append(SignalObservation(expected=expected, observed=binarize_bangs(record.bangs)))
    return observations


def _records_frame(records: Sequence[PitchRecord]) -> pd.DataFrame:
    frame = pd.DataFrame([asdict(record) for record in records])
    if frame.empty:
        return pd.DataFrame(columns=["game_id", "date", "bangs"])
    return frame


def estimate_bang_rate(records: Sequence[PitchRecord], date_from: date, date_to: date) -> BangRateEstimate:
    """Quiet-period bang rates over the inclusive date range [date_from, date_to]."""
    if date_from > date_to:
        raise DomainError(f"empty date range: {date_from.isoformat()} is after {date_to.isoformat()}")
    frame = _records_frame(records)
    in_range = frame[(frame["date"] >= date_from) & (frame["date"] <= date_to)] if not frame.empty else frame
    if in_range.empty:
        raise DomainError(f"no pitches between {date_from.isoformat()} and {date_to.isoformat()}")

    banged = (in_range["bangs"] >= 1).astype(int)
    per_game = banged.groupby(in_range["game_id"]).agg(["sum", "count"])
    game_rates = per_game["sum"] / per_game["count"]

    pitches = int(len(in_range))
    estimate = BangRateEstimate(
        per_pitch_rate=int(banged.sum()) / pitches,
        per_game_max_rate=float(game_rates.max()),
        games=int(len(per_game)),
        pitches=pitches,
    )
    logger.info(
        "bang rate %s..%s: %.4f per pitch, %.4f peak game, %d games",
        date_from.isoformat(), date_to.isoformat(),
        estimate.per_pitch_rate, estimate.per_game_max_rate, estimate.games,
    )
    return estimate


def group_by_game(records: Iterable[PitchRecord]) -> List[GameGroup]:
    """One group per game_id, ordered by game_id; records ordered by pitch_seq."""
    buckets: Dict[str, List[PitchRecord]] = {}
    for record in records:
        buckets.setdefault(record.game_id, []).append(record)
    groups: List[GameGroup] = []
    for game_id in sorted(buckets):
        rows = sorted(buckets[game_id], key=lambda r: r.pitch_seq)
        groups.append(GameGroup(game_id=game_id, date=rows[0].date, opponent=rows[0].opponent, records=tuple(rows)))
    return groups


def group_by_series(records: Iterable[PitchRecord]) -> List[GameGroup]:
    """Consecutive games (by date, then game_id) against the same opponent form one series."""
    games = sorted(group_by_game(records), key=lambda g: (g.date, g.game_id))
    series: List[List[GameGroup]] = []
    for game in games:
        if series and series[-1][-1].opponent == game.opponent:
            series[-1].append(game)
        else:
            series.append([game])

    groups: List[GameGroup] = []
    for run in series:
        first, last = run[0], run[-1]
        groups.append(
            GameGroup(
                game_id=f"{first.opponent} {first.date.isoformat()}..{last.date.isoformat()}",
                date=first.date,
                opponent=first.opponent,
                records=tuple(record for game in run for record in game.records),
                games=tuple(game.game_id for game in run),
            )
        )
    return groups


def _group_evidence(
    group: GameGroup,
    taxonomy: PitchTaxonomy,
    coded: CodedModel,
    random: RandomModel,
    skip_unknown: bool,
) -> Tuple[GroupEvidence, List[str]]:
    warnings: List[str] = []
    summary = summarize(code_b_observations(group.records, taxonomy, skip_unknown=skip_unknown, warnings=warnings))
    value = 0.0 if summary.n == 0 else log10_lr(summary, coded, random)
    logger.debug("group %s: n=%d m=%d b=%d log10_lr=%.6f", group.game_id, summary.n, summary.m, summary.positives, value)
    return GroupEvidence(group=group, summary=summary, log10_lr=value), warnings


def per_game_evidence(
    records: Sequence[PitchRecord],
    taxonomy: PitchTaxonomy,
    coded: CodedModel,
    random: RandomModel,
    *,
    grouping: str = "game",
    skip_unknown: bool = False,
    workers: int = 1,
) -> GroupedEvidence:
    """Evaluate each game (or series) with its own Beta integral and sum the log10 LRs."""
    if grouping == "game":
        groups = group_by_game(records)
    elif grouping == "series":
        groups = group_by_series(records)
    else:
        raise DomainError(f"grouping must be 'game' or 'series', got {grouping!r}")

    def _run(group: GameGroup) -> Tuple[GroupEvidence, List[str]]:
        return _group_evidence(group, taxonomy, coded, random, skip_unknown)

    if workers > 1 and len(groups) > 1:
        with ThreadPoolExecutor(max_workers=min(workers, len(groups))) as executor:
            outcomes = list(executor.map(_run, groups))
    else:
        outcomes = [_run(group) for group in groups]

    results = [evidence for evidence, _ in outcomes]
    warnings = [message for _, batch in outcomes for message in batch]
    combined = combine_log10_lr(item.log10_lr for item in results)
    logger.info("%d %s groups evaluated, combined log10_lr=%.6f", len(results), grouping, combined)
    return GroupedEvidence(groups=results, combined_log10_lr=combined, grouping=grouping, warnings=warnings)


def pooled_summary(
    records: Iterable[PitchRecord],
    taxonomy: PitchTaxonomy = DEFAULT_TAXONOMY,
    *,
    skip_unknown: bool = False,
    warnings: Optional[List[str]] = None,
) -> MatchSummary:
    return summarize(code_b_observations(records, taxonomy, skip_unknown=skip_unknown, warnings=warnings))
