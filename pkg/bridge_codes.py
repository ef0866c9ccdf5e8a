"""Bridge hands, leads and horizontal/vertical lead codes."""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Callable, Dict, FrozenSet, Iterable, List, Optional

from schemas import NOT_APPLICABLE, DomainError, ParseError, SignalObservation

logger = logging.getLogger(__name__)

SUITS = ("S", "H", "D", "C")
SUIT_NAMES = {"S": "spades", "H": "hearts", "D": "diamonds", "C": "clubs"}
RANKS = "AKQJT98765432"
TOP_HONORS = frozenset("AKQ")
HAND_SIZE = 13

ORIENTATIONS = {"H": 1, "V": 0}

_RANK_ORDER = {rank: idx for idx, rank in enumerate(RANKS)}


@dataclass(frozen=True)
class Card:
    suit: str
    rank: str

    def __post_init__(self) -> None:
        if self.suit not in SUITS:
            raise DomainError(f"unknown suit {self.suit!r}")
        if self.rank not in _RANK_ORDER:
            raise DomainError(f"unknown rank {self.rank!r}")

    def __str__(self) -> str:
        return f"{self.suit}{self.rank}"


def parse_card(text: str) -> Card:
    """Suit letter followed by rank, e.g. ``S2`` or ``DT``."""
    token = (text or "").strip().upper()
    if len(token) != 2 or token[0] not in SUITS or token[1] not in _RANK_ORDER:
        raise ParseError(f"invalid card {text!r}", token=text)
    return Card(suit=token[0], rank=token[1])


@dataclass(frozen=True)
class Hand:
    cards: FrozenSet[Card]

    def __post_init__(self) -> None:
        if len(self.cards) != HAND_SIZE:
            raise DomainError(f"a hand holds {HAND_SIZE} distinct cards, got {len(self.cards)}")

    def holding(self, suit: str) -> List[str]:
        """Ranks held in a suit, highest first."""
        return sorted((card.rank for card in self.cards if card.suit == suit), key=_RANK_ORDER.__getitem__)

    def suit_length(self, suit: str) -> int:
        return sum(1 for card in self.cards if card.suit == suit)

    def has(self, suit: str, rank: str) -> bool:
        return Card(suit, rank) in self.cards

    def to_dot(self) -> str:
        return ".".join("".join(self.holding(suit)) for suit in SUITS)

    def __str__(self) -> str:
        return self.to_dot()


def parse_hand(text: str) -> Hand:
    """Parse dot notation ``spades.hearts.diamonds.clubs``; an empty group is a void."""
    groups = (text or "").strip().split(".")
    if len(groups) != len(SUITS):
        raise ParseError(f"hand {text!r} has {len(groups)} suit groups, expected {len(SUITS)}", token=text)
    cards: List[Card] = []
    seen = set()
    for suit, group in zip(SUITS, groups):
        for rank in group:
            if rank not in _RANK_ORDER:
                raise ParseError(f"invalid rank {rank!r} in {SUIT_NAMES[suit]} of hand {text!r}", token=rank)
            card = Card(suit, rank)
            if card in seen:
                raise ParseError(f"duplicate card {card} in hand {text!r}", token=str(card))
            seen.add(card)
            cards.append(card)
    if len(cards) != HAND_SIZE:
        raise ParseError(f"hand {text!r} has {len(cards)} cards, expected {HAND_SIZE}", token=text)
    return Hand(frozenset(cards))


@dataclass(frozen=True)
class BridgeLeadRecord:
    board_no: int
    hand: Hand
    lead: Card
    orientation: str

    def __post_init__(self) -> None:
        if isinstance(self.board_no, bool) or not isinstance(self.board_no, int) or self.board_no < 1:
            raise DomainError(f"board number must be a positive integer, got {self.board_no!r}")
        if self.lead not in self.hand.cards:
            raise DomainError(f"lead {self.lead} is not in hand {self.hand}")
        if self.orientation not in ORIENTATIONS:
            raise DomainError(f"orientation must be H or V, got {self.orientation!r}")

    @property
    def observed(self) -> int:
        return ORIENTATIONS[self.orientation]


def _require_lead_in_hand(hand: Hand, lead: Card) -> None:
    if lead not in hand.cards:
        raise DomainError(f"lead {lead} is not in hand {hand}")


def code_c_expected(hand: Hand, lead: Card) -> Optional[int]:
    """Horizontal denies a top honor (A, K, Q) in the lead suit; vertical shows one.

    Singleton leads are outside the code.
    """
    _require_lead_in_hand(hand, lead)
    holding = hand.holding(lead.suit)
    if len(holding) == 1:
        return NOT_APPLICABLE
    return 0 if TOP_HONORS.intersection(holding) else 1


def code_deuce_clubs_expected(hand: Hand, lead: Card) -> int:
    """Horizontal shows the deuce of clubs, vertical denies it."""
    _require_lead_in_hand(hand, lead)
    return 1 if hand.has("C", "2") else 0


def code_board_parity_expected(board_no: int, hand: Hand, lead: Card) -> int:
    """Board-number dependent code, clause by clause.

    Even board: horizontal shows the ace of the lead suit together with a queen
    in some other suit; everything else (including ace without any queen) is
    vertical.
    Odd board: horizontal shows exactly one of king and jack in the lead suit;
    both or neither is vertical.
    """
    _require_lead_in_hand(hand, lead)
    if isinstance(board_no, bool) or not isinstance(board_no, int) or board_no < 1:
        raise DomainError(f"board number must be a positive integer, got {board_no!r}")
    if board_no % 2 == 0:
        has_ace = hand.has(lead.suit, "A")
        queen_elsewhere = any(hand.has(suit, "Q") for suit in SUITS if suit != lead.suit)
        return 1 if has_ace and queen_elsewhere else 0
    return 1 if hand.has(lead.suit, "K") != hand.has(lead.suit, "J") else 0


@dataclass(frozen=True)
class HvCode:
    id: str
    description: str
    evaluator: Callable[[int, Hand, Card], Optional[int]]

    def expected(self, record: BridgeLeadRecord) -> Optional[int]:
        return self.evaluator(record.board_no, record.hand, record.lead)


CODES: Dict[str, HvCode] = {
    "C": HvCode(
        id="C",
        description="horizontal denies A/K/Q in the lead suit; singletons exempt",
        evaluator=lambda board_no, hand, lead: code_c_expected(hand, lead),
    ),
    "DEUCE_OF_CLUBS": HvCode(
        id="DEUCE_OF_CLUBS",
        description="horizontal shows the deuce of clubs",
        evaluator=lambda board_no, hand, lead: code_deuce_clubs_expected(hand, lead),
    ),
    "BOARD_PARITY": HvCode(
        id="BOARD_PARITY",
        description="even boards: ace plus outside queen; odd boards: king xor jack",
        evaluator=code_board_parity_expected,
    ),
}


def get_code(name: str) -> HvCode:
    key = (name or "").strip().upper()
    if key not in CODES:
        raise DomainError(f"unknown code {name!r}; expected one of {', '.join(c.lower() for c in CODES)}")
    return CODES[key]


def evaluate_code(code: HvCode, records: Iterable[BridgeLeadRecord]) -> List[SignalObservation]:
    observations: List[SignalObservation] = []
    for index, record in enumerate(records):
        try:
            expected = code.expected(record)
        except DomainError as exc:
            raise DomainError(f"record {index} (board {record.board_no}): {exc}") from exc
        observations.append(SignalObservation(expected=expected, observed=record.observed))
    logger.debug("code %s evaluated on %d records", code.id, len(observations))
    return observations
