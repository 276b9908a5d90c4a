"""Independent checks: a Monte Carlo dealer, a brute-force 2 x n solver and a saddle check.

Nothing here goes through the dominance reduction, the envelope solver or
the certificate code, so agreement with them is real evidence.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Hashable, Iterable, Mapping, Sequence

import numpy as np

from .game_core import (
    BANKER_HANDS,
    FREE_HANDS,
    DealModel,
    DecisionPoint,
    Shoe,
    TotalPoint,
    obs_index,
)

RNG_NAME = "PCG64"
CHUNK = 250_000
BRUTE_FORCE_LIMIT = 16


# -- Monte Carlo --------------------------------------------------------------


@dataclass
class SimulationReport:
    trials: int
    mean: float
    std_error: float
    exact: Fraction | None
    z: float | None
    naturals: int = 0
    rng: str = RNG_NAME
    seed: int = 0

    @property
    def natural_fraction(self) -> float:
        return self.naturals / self.trials


def draw_table(banker) -> np.ndarray:
    """Draw probability array indexed [lo, hi, observation index].

    ``banker`` is either a set of points where Banker draws or a mapping
    point -> draw probability; keys may be hand points or totals-only points.
    """
    arr = np.zeros((10, 10, 11))
    if isinstance(banker, Mapping):
        items = [(pt, float(pr)) for pt, pr in banker.items()]
    else:
        items = [(pt, 1.0) for pt in banker]
    for pt, pr in items:
        k = obs_index(pt.obs)
        if isinstance(pt, TotalPoint):
            hands = [h for h in BANKER_HANDS if h.total == pt.total]
        else:
            hands = [pt.banker_hand]
        for h in hands:
            arr[h.lo, h.hi, k] = arr[h.hi, h.lo, k] = pr
    return arr


def _player_five_table(mask: int) -> np.ndarray:
    arr = np.zeros((10, 10), dtype=bool)
    for pos, h in enumerate(FREE_HANDS):
        if (mask >> (4 - pos)) & 1:
            arr[h.lo, h.hi] = arr[h.hi, h.lo] = True
    return arr


def _deal(rng: np.random.Generator, n: int, decks: int | None) -> np.ndarray:
    """n x 6 card values: sequential draws from a fresh shoe (or with replacement)."""
    if decks is None:
        ranks = rng.integers(1, 14, size=(n, 6))
        return np.where(ranks >= 10, 0, ranks)
    counts = np.tile(np.array([16 * decks] + [4 * decks] * 9, dtype=np.int64), (n, 1))
    left = np.full(n, 52 * decks, dtype=np.int64)
    out = np.empty((n, 6), dtype=np.int64)
    rows = np.arange(n)
    for c in range(6):
        u = rng.integers(0, left)
        cum = counts.cumsum(axis=1)
        card = (cum <= u[:, None]).sum(axis=1)
        out[:, c] = card
        counts[rows, card] -= 1
        left -= 1
    return out


def _play(cards: np.ndarray, five: np.ndarray, table: np.ndarray, u: np.ndarray):
    x1, x2, y1, y2 = cards[:, 0], cards[:, 1], cards[:, 2], cards[:, 3]
    x = (x1 + x2) % 10
    y = (y1 + y2) % 10
    natural = (x >= 8) | (y >= 8)
    p_draws = (x <= 4) | ((x == 5) & five[x1, x2])
    third = cards[:, 4]
    obs = np.where(p_draws, third, 10)
    x_final = np.where(p_draws, (x + third) % 10, x)
    b_card = np.where(p_draws, cards[:, 5], cards[:, 4])
    b_draws = u < table[y1, y2, obs]
    y_final = np.where(b_draws, (y + b_card) % 10, y)
    gain = np.sign(np.where(natural, x - y, x_final - y_final))
    return gain, natural


def _run_chunk(args) -> tuple[float, float, int]:
    seed_seq, n, decks, mask, table = args
    rng = np.random.Generator(np.random.PCG64(seed_seq))
    cards = _deal(rng, n, decks)
    u = rng.random(n)
    gain, natural = _play(cards, _player_five_table(mask), table, u)
    return float(gain.sum()), float((gain * gain).sum()), int(natural.sum())


def simulate_payoff(
    mask: int,
    banker,
    deal: DealModel,
    trials: int,
    seed: int,
    exact: Fraction | None = None,
    workers: int = 1,
) -> SimulationReport:
    """Average Player gain over ``trials`` fresh-shoe coups.

    Trials are cut into fixed chunks, each with its own stream spawned from
    ``seed``, so the result does not depend on ``workers``.
    """
    if trials < 1:
        raise ValueError("trials must be at least 1")
    decks = deal.d if isinstance(deal, Shoe) else None
    table = draw_table(banker)
    sizes = [CHUNK] * (trials // CHUNK) + ([trials % CHUNK] if trials % CHUNK else [])
    seqs = np.random.SeedSequence(seed).spawn(len(sizes))
    jobs = [(s, n, decks, mask, table) for s, n in zip(seqs, sizes)]
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(_run_chunk, jobs))
    else:
        parts = [_run_chunk(j) for j in jobs]
    total = sum(p[0] for p in parts)
    total_sq = sum(p[1] for p in parts)
    naturals = sum(p[2] for p in parts)
    mean = total / trials
    var = max(total_sq / trials - mean * mean, 0.0)
    se = math.sqrt(var / trials)
    if exact is None and not isinstance(banker, Mapping):
        from .payoff import payoff_entry

        if all(isinstance(pt, DecisionPoint) for pt in banker):
            exact = payoff_entry(mask, banker, deal)
    z = None
    if exact is not None and se > 0:
        z = (mean - float(exact)) / se
    return SimulationReport(trials, mean, se, exact, z, naturals, RNG_NAME, seed)


# -- brute-force 2 x n solver -------------------------------------------------


@dataclass
class BruteForceSolution:
    p_star: Fraction
    value: Fraction
    q_star: Fraction | None
    kernel_columns: tuple[frozenset, frozenset] | None
    mixed_points: tuple
    folded_draws: frozenset


def _lower_hull(lines: list[tuple[Fraction, Fraction]]) -> list[tuple[Fraction, Fraction]]:
    """Lines (intercept, slope) forming the pointwise minimum, left to right."""
    by_slope: dict[Fraction, Fraction] = {}
    for a, s in lines:
        if s not in by_slope or a < by_slope[s]:
            by_slope[s] = a
    ordered = sorted(((a, s) for s, a in by_slope.items()), key=lambda t: -t[1])
    hull: list[tuple[Fraction, Fraction]] = []

    def meet(l1, l2) -> Fraction:
        return (l2[0] - l1[0]) / (l1[1] - l2[1])

    for line in ordered:
        while len(hull) >= 2 and meet(hull[-2], line) <= meet(hull[-2], hull[-1]):
            hull.pop()
        hull.append(line)
    return hull


def brute_force_solve_2xn(game) -> BruteForceSolution:
    """Exact maximin of a two-row game by materialising every column.

    Points where both rows agree on Banker's better move are fixed first;
    the remaining n points give 2^n lines in p whose lower envelope is
    maximised over its vertices.
    """
    base = [game.e_const[0], game.e_const[1]]
    mixed: list[int] = []
    folded = set()
    for j, pt in enumerate(game.points):
        s0 = game.e01[j] - game.e00[j]  # Player's gain from Banker drawing, row 0
        s1 = game.e11[j] - game.e10[j]
        if s0 == 0 or s1 == 0:
            raise ValueError(f"tie at {pt}")
        if s0 < 0 and s1 < 0:
            base[0] += game.e01[j]
            base[1] += game.e11[j]
            folded.add(pt)
        elif s0 > 0 and s1 > 0:
            base[0] += game.e00[j]
            base[1] += game.e10[j]
        else:
            mixed.append(j)
    n = len(mixed)
    if n > BRUTE_FORCE_LIMIT:
        raise ValueError(f"{n} unresolved points exceed the brute-force limit")
    lines: list[tuple[Fraction, Fraction]] = []
    owner: dict[tuple[Fraction, Fraction], int] = {}
    for col in range(1 << n):
        a, b = base
        for pos, j in enumerate(mixed):
            if (col >> pos) & 1:
                a += game.e01[j]
                b += game.e11[j]
            else:
                a += game.e00[j]
                b += game.e10[j]
        line = (a, b - a)
        lines.append(line)
        owner.setdefault(line, col)
    hull = _lower_hull(lines)
    vertices = [Fraction(0), Fraction(1)]
    for l1, l2 in zip(hull, hull[1:]):
        x = (l2[0] - l1[0]) / (l1[1] - l2[1])
        if 0 < x < 1:
            vertices.append(x)

    def lower(p: Fraction) -> Fraction:
        return min(a + s * p for a, s in hull)

    p_star = max(vertices, key=lambda p: (lower(p), -p))
    value = lower(p_star)
    active = [ln for ln in hull if ln[0] + ln[1] * p_star == value]
    q_star = None
    cols = None
    up = [ln for ln in active if ln[1] > 0]
    down = [ln for ln in active if ln[1] < 0]
    if up and down and 0 < p_star < 1:
        lo, hi = min(up, key=lambda t: t[1]), max(down, key=lambda t: t[1])
        # Banker weight w on ``lo`` flattens the mixture: w*s_lo + (1-w)*s_hi = 0
        w = -hi[1] / (lo[1] - hi[1])

        def draw_set(line) -> frozenset:
            col = owner[line]
            return frozenset(folded | {game.points[j] for pos, j in enumerate(mixed) if (col >> pos) & 1})

        first, second = draw_set(hi), draw_set(lo)
        if len(first) > len(second):
            first, second, w = second, first, 1 - w
        cols, q_star = (first, second), w
    return BruteForceSolution(p_star, value, q_star, cols, tuple(game.points[j] for j in mixed),
                              frozenset(folded))


# -- saddle check -------------------------------------------------------------


def saddle_check(
    blocks,
    player_mixture: Sequence[tuple[int, Fraction]],
    banker_mixture: Sequence[tuple[Iterable[Hashable], Fraction]],
    value: Fraction,
    rows: Iterable[int] | None = None,
) -> bool:
    """Direct exact check of both saddle inequalities over the unreduced game.

    ``banker_mixture`` lists full draw sets with weights.  The Player side
    minimises the mixture's payoff point by point over all decision points.
    """
    rows = list(blocks.rows if rows is None else rows)
    if any(w < 0 for _, w in player_mixture) or sum(w for _, w in player_mixture) != 1:
        return False
    if any(w < 0 for _, w in banker_mixture) or sum(w for _, w in banker_mixture) != 1:
        return False
    worst = Fraction(0)
    for i in range(len(blocks.points)):
        stand = sum((w * blocks.prob[r][i] * blocks.ev_stand[r][i] for r, w in player_mixture), Fraction(0))
        draw = sum((w * blocks.prob[r][i] * blocks.ev_draw[r][i] for r, w in player_mixture), Fraction(0))
        worst += min(stand, draw)
    if worst < value:
        return False
    draws = [(set(t), w) for t, w in banker_mixture]
    for r in rows:
        if sum((w * blocks.entry(r, t) for t, w in draws), Fraction(0)) > value:
            return False
    return True


__all__ = [
    "SimulationReport",
    "simulate_payoff",
    "draw_table",
    "BruteForceSolution",
    "brute_force_solve_2xn",
    "saddle_check",
]
