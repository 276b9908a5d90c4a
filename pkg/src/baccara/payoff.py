"""Exact conditional probabilities and expectations for every coup.

Everything here is exact rational arithmetic.  The bulk builder
:func:`build_blocks` works in integer card counts with a common denominator
per decision point and only forms :class:`~fractions.Fraction` values at the
end; the single-point functions (:func:`conditional_ev`,
:func:`decision_point_prob`, ...) compute the same quantities directly and
serve as the reference path.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Hashable, Iterable, Mapping, Sequence

from .errors import DomainError
from .game_core import (
    BANKER_HANDS,
    FREE_HANDS,
    NUM_MASKS,
    OBSERVATIONS,
    STAND,
    DealModel,
    DecisionPoint,
    HandPair,
    InfoModel,
    Model,
    Shoe,
    TotalPoint,
    WithReplacement,
    compare_totals,
    decision_points,
    mask_bit,
    player_draws,
    total_points,
)

PLAYER_HANDS = BANKER_HANDS
_FORCED_DRAW = tuple(h for h in PLAYER_HANDS if h.total <= 4)
_FORCED_STAND = tuple(h for h in PLAYER_HANDS if h.total >= 6)

DRAW = 1
STAND_MOVE = 0


# -- card sources -----------------------------------------------------------


def _base_counts(deal: DealModel) -> list[int]:
    if isinstance(deal, Shoe):
        return [16 * deal.d if r == 0 else 4 * deal.d for r in range(10)]
    # with replacement: relative frequencies out of 13
    return [4] + [1] * 9


def remaining_counts(deal: DealModel, removed: Iterable[int]) -> list[int]:
    """Counts per card value after ``removed`` is dealt (unchanged with replacement)."""
    counts = _base_counts(deal)
    if isinstance(deal, WithReplacement):
        return counts
    for r in removed:
        counts[r] -= 1
        if counts[r] < 0:
            raise DomainError(f"more {r}s removed than a {deal.d}-deck shoe holds")
    return counts


def _pair_weight(deal: DealModel, counts: Sequence[int], hand: HandPair) -> int:
    """Ordered-deal multiplicity of ``hand`` from ``counts``."""
    a, b = hand.lo, hand.hi
    if a == b:
        return counts[a] * (counts[a] - (1 if isinstance(deal, Shoe) else 0))
    return 2 * counts[a] * counts[b]


def _pair_total(deal: DealModel, counts: Sequence[int]) -> int:
    n = sum(counts)
    return n * (n - 1) if isinstance(deal, Shoe) else n * n


def sgn(x: int) -> int:
    return (x > 0) - (x < 0)


# -- single-point reference path -------------------------------------------


def banker_draw_ev(
    player_final: int, removed: Iterable[int], banker_total: int, deal: DealModel
) -> Fraction:
    """Player's expected gain when Banker draws one card from the depleted source."""
    counts = remaining_counts(deal, removed)
    n = sum(counts)
    num = sum(
        counts[l] * compare_totals(player_final, (banker_total + l) % 10) for l in range(10)
    )
    return Fraction(num, n)


def stand_ev(player_final: int, banker_total: int) -> Fraction:
    return Fraction(compare_totals(player_final, banker_total))


def _player_set(mask: int, drawing: bool) -> list[HandPair]:
    return [h for h in PLAYER_HANDS if player_draws(mask, h) == drawing]


def player_hand_distribution(
    mask: int, drawing: bool, removed: Iterable[int], deal: DealModel
) -> dict[HandPair, Fraction]:
    """Conditional law of Player's two cards given his decision and the removed cards."""
    counts = remaining_counts(deal, list(removed))
    hands = _player_set(mask, drawing)
    weights = {h: _pair_weight(deal, counts, h) for h in hands}
    m = sum(weights.values())
    if m == 0:
        raise DomainError("empty conditioning set")
    return {h: Fraction(w, m) for h, w in weights.items() if w}


def _removed_for(point: DecisionPoint) -> list[int]:
    removed = list(point.banker_hand.cards)
    if point.obs is not STAND:
        removed.append(point.obs)
    return removed


def decision_point_prob(mask: int, point: DecisionPoint, deal: DealModel) -> Fraction:
    """P(Player in S (or S^c), Banker holds the hand, Player's third card is obs)."""
    full = _base_counts(deal)
    p = Fraction(_pair_weight(deal, full, point.banker_hand), _pair_total(deal, full))
    after_banker = remaining_counts(deal, point.banker_hand.cards)
    drawing = point.obs is not STAND
    if drawing:
        p *= Fraction(after_banker[point.obs], sum(after_banker))
    counts = remaining_counts(deal, _removed_for(point))
    m = sum(_pair_weight(deal, counts, h) for h in _player_set(mask, drawing))
    return p * Fraction(m, _pair_total(deal, counts))


def conditional_ev(mask: int, point: DecisionPoint, banker_move: int, deal: DealModel) -> Fraction:
    """Expected gain to Player given the decision point, his strategy and Banker's move."""
    drawing = point.obs is not STAND
    removed = _removed_for(point)
    bt = point.total
    dist = player_hand_distribution(mask, drawing, removed, deal)
    total = Fraction(0)
    for hand, w in dist.items():
        final = (hand.total + (point.obs if drawing else 0)) % 10
        if banker_move == DRAW:
            ev = banker_draw_ev(final, removed + list(hand.cards), bt, deal)
        else:
            ev = stand_ev(final, bt)
        total += w * ev
    return total


def b_diff(mask: int, point: DecisionPoint, deal: DealModel) -> Fraction:
    return conditional_ev(mask, point, DRAW, deal) - conditional_ev(mask, point, STAND_MOVE, deal)


# -- bulk blocks ------------------------------------------------------------


@dataclass
class PayoffBlocks:
    """Per-row, per-point probabilities and conditional expectations.

    ``prob[row][i]``, ``ev_draw[row][i]`` and ``ev_stand[row][i]`` refer to
    ``points[i]``.  Rows are Player masks (0..31) for the composition models
    and 0/1 (stand/draw on total 5) for the totals-only model.
    """

    model: Model
    rows: tuple[int, ...]
    points: tuple[Hashable, ...]
    prob: dict[int, list[Fraction]]
    ev_draw: dict[int, list[Fraction]]
    ev_stand: dict[int, list[Fraction]]
    _index: dict[Hashable, int] = field(default_factory=dict, repr=False)

    def __post_init__(self) -> None:
        self._index = {pt: i for i, pt in enumerate(self.points)}

    def index(self, point: Hashable) -> int:
        return self._index[point]

    def ev(self, row: int, i: int, move: int) -> Fraction:
        return self.ev_draw[row][i] if move == DRAW else self.ev_stand[row][i]

    def e(self, row: int, i: int, move: int) -> Fraction:
        """Unconditional contribution p * a of one point and one Banker move."""
        return self.prob[row][i] * self.ev(row, i, move)

    def b(self, row: int, i: int) -> Fraction:
        return self.ev_draw[row][i] - self.ev_stand[row][i]

    def entry(self, row: int, draws: Iterable[Hashable]) -> Fraction:
        """Payoff a_{S,T}; ``draws`` is the set T of points where Banker draws."""
        drawn = {self._index[pt] for pt in draws}
        p, a1, a0 = self.prob[row], self.ev_draw[row], self.ev_stand[row]
        return sum(
            (p[i] * (a1[i] if i in drawn else a0[i]) for i in range(len(self.points))),
            Fraction(0),
        )

    def entry_mixed(self, row: int, draw_prob: Mapping[Hashable, Fraction]) -> Fraction:
        """Payoff against a behavioural Banker strategy (draw probability per point)."""
        total = Fraction(0)
        for i, pt in enumerate(self.points):
            q = draw_prob[pt]
            a = self.ev_stand[row][i] if q == 0 else (
                self.ev_draw[row][i] if q == 1 else
                (1 - q) * self.ev_stand[row][i] + q * self.ev_draw[row][i])
            total += self.prob[row][i] * a
        return total

    def total_prob(self, row: int) -> Fraction:
        return sum(self.prob[row], Fraction(0))


@dataclass
class _PointTable:
    """Integer sufficient statistics of one decision point.

    For a set of Player hands H: m = sum w, stand numerator = sum w*s,
    draw numerator = sum w*g, and the conditional expectations are
    stand_num/m and draw_num/(m*draw_den).
    """

    prefix: Fraction  # P(Banker hand) * P(third card | Banker hand)
    pair_total: int
    draw_den: int
    forced: tuple[int, int, int]  # (w, w*s, w*g) summed over forced hands
    free: tuple[tuple[int, int, int], ...]  # per FREE_HANDS entry


def _point_table(deal: DealModel, point: DecisionPoint) -> _PointTable:
    drawing = point.obs is not STAND
    bt = point.total
    removed = _removed_for(point)
    full = _base_counts(deal)
    prefix = Fraction(_pair_weight(deal, full, point.banker_hand), _pair_total(deal, full))
    if drawing:
        after_banker = remaining_counts(deal, point.banker_hand.cards)
        prefix *= Fraction(after_banker[point.obs], sum(after_banker))
    counts = remaining_counts(deal, removed)
    pair_total = _pair_total(deal, counts)
    draw_den = sum(counts) - (2 if isinstance(deal, Shoe) else 0)

    def stats(hand: HandPair) -> tuple[int, int, int]:
        w = _pair_weight(deal, counts, hand)
        if w == 0:
            return (0, 0, 0)
        final = (hand.total + (point.obs if drawing else 0)) % 10
        rem = remaining_counts(deal, removed + list(hand.cards))
        g = sum(rem[l] * sgn(final - (bt + l) % 10) for l in range(10))
        return (w, w * sgn(final - bt), w * g)

    forced_hands = _FORCED_DRAW if drawing else _FORCED_STAND
    acc = [0, 0, 0]
    for h in forced_hands:
        for i, v in enumerate(stats(h)):
            acc[i] += v
    return _PointTable(prefix, pair_total, draw_den, tuple(acc), tuple(stats(h) for h in FREE_HANDS))


def _row_values(table: _PointTable, mask: int, drawing: bool) -> tuple[Fraction, Fraction, Fraction]:
    w, s, g = table.forced
    for pos, (fw, fs, fg) in enumerate(table.free):
        bit = (mask >> (4 - pos)) & 1
        if bool(bit) == drawing:
            w, s, g = w + fw, s + fs, g + fg
    if w == 0:
        raise DomainError("empty conditioning set")
    prob = table.prefix * Fraction(w, table.pair_total)
    return prob, Fraction(g, w * table.draw_den), Fraction(s, w)


def composition_blocks(deal: DealModel, rows: Sequence[int] = tuple(range(NUM_MASKS)),
                       info: InfoModel = InfoModel.FULL_COMPOSITION) -> PayoffBlocks:
    points = tuple(decision_points())
    prob: dict[int, list[Fraction]] = {r: [] for r in rows}
    ev1: dict[int, list[Fraction]] = {r: [] for r in rows}
    ev0: dict[int, list[Fraction]] = {r: [] for r in rows}
    for pt in points:
        table = _point_table(deal, pt)
        drawing = pt.obs is not STAND
        for r in rows:
            p, a1, a0 = _row_values(table, r, drawing)
            prob[r].append(p)
            ev1[r].append(a1)
            ev0[r].append(a0)
    return PayoffBlocks(Model(deal, info), tuple(rows), points, prob, ev1, ev0)


def aggregate_total_view(blocks: PayoffBlocks) -> PayoffBlocks:
    """Collapse composition blocks (rows 0 and 31) to the totals-only game.

    Row 0 of the result stands on every total 5, row 1 draws on every total 5.
    """
    if 0 not in blocks.rows or 31 not in blocks.rows:
        raise DomainError("aggregation needs mask-0 and mask-31 rows")
    tpoints = tuple(total_points())
    groups: dict[TotalPoint, list[int]] = {tp: [] for tp in tpoints}
    for i, pt in enumerate(blocks.points):
        groups[TotalPoint(pt.total, pt.obs)].append(i)
    prob: dict[int, list[Fraction]] = {0: [], 1: []}
    ev1: dict[int, list[Fraction]] = {0: [], 1: []}
    ev0: dict[int, list[Fraction]] = {0: [], 1: []}
    for row, src in ((0, 0), (1, 31)):
        for tp in tpoints:
            idx = groups[tp]
            p = sum((blocks.prob[src][i] for i in idx), Fraction(0))
            if p == 0:
                raise DomainError(f"zero probability at {tp}")
            prob[row].append(p)
            ev1[row].append(sum((blocks.e(src, i, DRAW) for i in idx), Fraction(0)) / p)
            ev0[row].append(sum((blocks.e(src, i, STAND_MOVE) for i in idx), Fraction(0)) / p)
    model = Model(blocks.model.deal, InfoModel.TOTALS_ONLY)
    return PayoffBlocks(model, (0, 1), tpoints, prob, ev1, ev0)


_CACHE: dict[Model, PayoffBlocks] = {}


def build_blocks(model: Model) -> PayoffBlocks:
    """Payoff blocks for any of the six models (memoised per process)."""
    if model in _CACHE:
        return _CACHE[model]
    if model.info is InfoModel.FULL_COMPOSITION:
        blocks = composition_blocks(model.deal)
    elif model.info is InfoModel.BANKER_COMPOSITION:
        blocks = composition_blocks(model.deal, (0, 31), InfoModel.BANKER_COMPOSITION)
    else:
        blocks = aggregate_total_view(composition_blocks(model.deal, (0, 31)))
    _CACHE[model] = blocks
    return blocks


def payoff_entry(mask: int, banker_strategy: Iterable[DecisionPoint], deal: DealModel) -> Fraction:
    """a_{S,T} for a Player mask and the set T of decision points where Banker draws."""
    blocks = composition_blocks(deal, (mask,))
    return blocks.entry(mask, banker_strategy)


# -- independent four-card enumeration ---------------------------------------


def _four_card_deals(deal: DealModel):
    """Yield (x1, x2, y1, y2, probability) over ordered initial deals."""
    full = _base_counts(deal)
    n = sum(full)
    shoe = isinstance(deal, Shoe)
    denom = n * (n - 1) * (n - 2) * (n - 3) if shoe else n ** 4
    for x1 in range(10):
        for x2 in range(10):
            for y1 in range(10):
                for y2 in range(10):
                    if shoe:
                        used: Counter[int] = Counter()
                        weight = 1
                        for c in (x1, x2, y1, y2):
                            weight *= full[c] - used[c]
                            used[c] += 1
                    else:
                        weight = full[x1] * full[x2] * full[y1] * full[y2]
                    if weight:
                        yield x1, x2, y1, y2, Fraction(weight, denom)


def non_natural_probability(deal: DealModel) -> Fraction:
    """P(X <= 7 and Y <= 7) by enumerating all four-card deals."""
    return sum(
        (p for x1, x2, y1, y2, p in _four_card_deals(deal)
         if (x1 + x2) % 10 <= 7 and (y1 + y2) % 10 <= 7),
        Fraction(0),
    )


def natural_win_probabilities(deal: DealModel) -> tuple[Fraction, Fraction]:
    """(P(Player natural beats Banker), P(Banker natural beats Player))."""
    px = py = Fraction(0)
    for x1, x2, y1, y2, p in _four_card_deals(deal):
        x, y = (x1 + x2) % 10, (y1 + y2) % 10
        if x >= 8 and x > y:
            px += p
        elif y >= 8 and y > x:
            py += p
    return px, py


__all__ = [
    "DRAW",
    "STAND_MOVE",
    "PayoffBlocks",
    "aggregate_total_view",
    "b_diff",
    "banker_draw_ev",
    "build_blocks",
    "composition_blocks",
    "conditional_ev",
    "decision_point_prob",
    "natural_win_probabilities",
    "non_natural_probability",
    "payoff_entry",
    "player_hand_distribution",
    "remaining_counts",
    "stand_ev",
    "OBSERVATIONS",
    "mask_bit",
]
