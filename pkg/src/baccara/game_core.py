"""Rules layer: card values, hand totals, strategy index spaces, outcomes.

Card values are integers 0..9; the four ten-valued denominations (10, J, Q, K)
all count as 0, so a single deck holds sixteen 0s and four of every other value.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Iterator, Union

VALUES = range(10)
NUM_MASKS = 32


def mod10_total(i1: int, i2: int) -> int:
    return (i1 + i2) % 10


def denom_count(r: int, d: int) -> int:
    """Number of cards of value ``r`` in a full ``d``-deck shoe."""
    if d < 1:
        raise ValueError(f"deck count must be positive, got {d}")
    return 16 * d if r == 0 else 4 * d


def compare_totals(player_total: int, banker_total: int) -> int:
    return (player_total > banker_total) - (player_total < banker_total)


@dataclass(frozen=True, order=True)
class HandPair:
    lo: int
    hi: int

    def __post_init__(self) -> None:
        if not (0 <= self.lo <= self.hi <= 9):
            raise ValueError(f"invalid hand ({self.lo},{self.hi})")

    @classmethod
    def of(cls, a: int, b: int) -> "HandPair":
        return cls(min(a, b), max(a, b))

    @property
    def total(self) -> int:
        return mod10_total(self.lo, self.hi)

    @property
    def cards(self) -> tuple[int, int]:
        return (self.lo, self.hi)

    def __str__(self) -> str:
        return f"({self.lo},{self.hi})"


class Stand:
    """Observation that Player stood (no third card); a singleton."""

    _instance: "Stand | None" = None

    def __new__(cls) -> "Stand":
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "STAND"

    def __reduce__(self):
        return (Stand, ())


STAND = Stand()

# A third-card observation is either a card value 0..9 or STAND.
ThirdCardObs = Union[int, Stand]


def obs_index(obs: ThirdCardObs) -> int:
    """Column index of an observation: 0..9 for cards, 10 for STAND."""
    return 10 if obs is STAND else int(obs)


def obs_label(obs: ThirdCardObs) -> str:
    return "-" if obs is STAND else str(obs)


def parse_obs(text: str) -> ThirdCardObs:
    if text in ("-", "S", "stand", "STAND", "∅"):
        return STAND
    k = int(text)
    if not 0 <= k <= 9:
        raise ValueError(f"third card out of range: {text}")
    return k


OBSERVATIONS: tuple[ThirdCardObs, ...] = tuple(range(10)) + (STAND,)


@dataclass(frozen=True)
class DecisionPoint:
    """Banker information set: own two-card hand plus Player's third card."""

    banker_hand: HandPair
    obs: ThirdCardObs

    def __post_init__(self) -> None:
        if self.banker_hand.total > 7:
            raise ValueError("Banker naturals have no decision")

    @property
    def total(self) -> int:
        return self.banker_hand.total

    @property
    def sort_key(self) -> tuple[int, int, int, int]:
        return (self.total, obs_index(self.obs), self.banker_hand.lo, self.banker_hand.hi)

    def __str__(self) -> str:
        h = self.banker_hand
        return f"({h.lo},{h.hi},{obs_label(self.obs)})"


@dataclass(frozen=True)
class TotalPoint:
    """Banker information set when only totals are seen."""

    total: int
    obs: ThirdCardObs

    @property
    def sort_key(self) -> tuple[int, int]:
        return (self.total, obs_index(self.obs))

    def __str__(self) -> str:
        return f"({self.total},{obs_label(self.obs)})"


def enumerate_banker_hands() -> list[HandPair]:
    hands = [HandPair(a, b) for a in VALUES for b in VALUES if a <= b and (a + b) % 10 <= 7]
    hands.sort(key=lambda h: (h.total, h.lo))
    return hands


def enumerate_player_hands() -> list[HandPair]:
    """All non-natural Player hands, canonical order."""
    return enumerate_banker_hands()


BANKER_HANDS: tuple[HandPair, ...] = tuple(enumerate_banker_hands())

# Most-significant mask bit first.
FREE_HANDS: tuple[HandPair, ...] = (
    HandPair(0, 5),
    HandPair(1, 4),
    HandPair(2, 3),
    HandPair(6, 9),
    HandPair(7, 8),
)


def decision_points() -> list[DecisionPoint]:
    """The 484 Banker decision points in canonical (total, hand, obs) order."""
    return [DecisionPoint(h, obs) for h in BANKER_HANDS for obs in OBSERVATIONS]


def total_points() -> list[TotalPoint]:
    return [TotalPoint(j, obs) for j in range(8) for obs in OBSERVATIONS]


def mask_bit(mask: int, hand: HandPair) -> bool:
    pos = FREE_HANDS.index(hand)
    return bool((mask >> (4 - pos)) & 1)


def mask_from_bits(bits: str) -> int:
    if len(bits) != 5 or set(bits) - {"0", "1"}:
        raise ValueError(f"mask must be 5 binary digits: {bits!r}")
    return int(bits, 2)


def player_draws(mask: int, hand: HandPair) -> bool:
    if not 0 <= mask < NUM_MASKS:
        raise ValueError(f"mask out of range: {mask}")
    t = hand.total
    if t >= 8:
        raise ValueError(f"natural {hand} never reaches a draw decision")
    if t <= 4:
        return True
    if t >= 6:
        return False
    return mask_bit(mask, hand)


def draw_weight(mask: int) -> int:
    """Eighths of total-5 hands (with-replacement frequencies 4,1,1,1,1) drawn on."""
    bits = [(mask >> (4 - i)) & 1 for i in range(5)]
    return 4 * bits[0] + sum(bits[1:])


class InfoModel(enum.IntEnum):
    TOTALS_ONLY = 1
    BANKER_COMPOSITION = 2
    FULL_COMPOSITION = 3


@dataclass(frozen=True)
class WithReplacement:
    @property
    def label(self) -> str:
        return "A"

    def __str__(self) -> str:
        return "with replacement"


@dataclass(frozen=True)
class Shoe:
    d: int

    def __post_init__(self) -> None:
        if not isinstance(self.d, int) or self.d < 1:
            raise ValueError(f"deck count must be a positive integer, got {self.d!r}")

    @property
    def label(self) -> str:
        return "B"

    def __str__(self) -> str:
        return f"{self.d}-deck shoe"


DealModel = Union[WithReplacement, Shoe]


@dataclass(frozen=True)
class Model:
    deal: DealModel
    info: InfoModel

    @property
    def name(self) -> str:
        return f"{self.deal.label}{int(self.info)}"

    @property
    def decks(self) -> int | None:
        return self.deal.d if isinstance(self.deal, Shoe) else None

    @classmethod
    def parse(cls, name: str, decks: int | None = None) -> "Model":
        name = name.upper()
        if len(name) != 2 or name[0] not in "AB" or name[1] not in "123":
            raise ValueError(f"unknown model {name!r}")
        info = InfoModel(int(name[1]))
        if name[0] == "A":
            if decks is not None:
                raise ValueError("with-replacement models take no deck count")
            return cls(WithReplacement(), info)
        if decks is None:
            raise ValueError(f"model {name} needs a deck count")
        return cls(Shoe(decks), info)

    def __str__(self) -> str:
        return self.name if self.decks is None else f"{self.name} (d={self.decks})"


def iter_masks() -> Iterator[int]:
    return iter(range(NUM_MASKS))
