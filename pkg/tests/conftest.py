from __future__ import annotations

from datetime import date, timedelta
from pathlib import Path
from typing import List

import pytest

from baseball_codes import PitchRecord

FIXTURES = Path(__file__).parent / "fixtures"


@pytest.fixture
def fixtures_dir() -> Path:
    return FIXTURES


@pytest.fixture
def bridge_csv(fixtures_dir: Path) -> Path:
    return fixtures_dir / "bridge_leads.csv"


@pytest.fixture
def pitches_csv(fixtures_dir: Path) -> Path:
    return fixtures_dir / "pitches_small.csv"


@pytest.fixture
def taxonomy_csv(fixtures_dir: Path) -> Path:
    return fixtures_dir / "taxonomy.csv"


def _game(game_id: str, day: date, opponent: str, pitches: int, banged: int) -> List[PitchRecord]:
    return [
        PitchRecord(
            game_id=game_id,
            date=day,
            opponent=opponent,
            inning=1 + seq // 15,
            pitch_seq=seq + 1,
            pitch_type="FF",
            bangs=1 if seq < banged else 0,
        )
        for seq in range(pitches)
    ]


@pytest.fixture
def quiet_period_records() -> List[PitchRecord]:
    """22 games from 2017-04-03: 1000 pitches, 15 banged, one game at 3 in 100.

    Two later games with heavy banging sit outside the quiet period.
    """
    start = date(2017, 4, 3)
    records = _game("Q00", start, "SEA", 100, 3)
    for idx in range(1, 22):
        pitches = 40 if idx == 21 else 43
        records += _game(f"Q{idx:02d}", start + timedelta(days=2 * idx), "SEA", pitches, 1 if idx <= 12 else 0)
    records += _game("L01", date(2017, 7, 1), "NYY", 50, 20)
    records += _game("L02", date(2017, 7, 2), "NYY", 50, 25)
    return records
