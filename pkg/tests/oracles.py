"""Slow, independent reference computations used only by the tests.

The coup enumerator walks every ordered card sequence with integer
multiplicities; it shares nothing with the payoff module beyond the rules.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Callable

FREE = ((0, 5), (1, 4), (2, 3), (6, 9), (7, 8))


def shoe_counts(decks: int | None) -> list[int]:
    if decks is None:
        return [4] + [1] * 9
    return [16 * decks] + [4 * decks] * 9


def player_draws(mask: int, a: int, b: int) -> bool:
    t = (a + b) % 10
    if t <= 4:
        return True
    if t >= 6:
        return False
    lo, hi = sorted((a, b))
    return bool((mask >> (4 - FREE.index((lo, hi)))) & 1)


def sign(x: int) -> int:
    return (x > 0) - (x < 0)


def coup_value(mask: int, banker_draws: Callable[[int, int, object], bool], decks: int | None) -> Fraction:
    """E[G] over a fresh shoe; ``banker_draws(lo, hi, obs)`` with obs = card or None."""
    counts = shoe_counts(decks)
    repl = decks is None
    n = sum(counts)

    def take(c: list[int], v: int) -> list[int]:
        if repl:
            return c
        c = list(c)
        c[v] -= 1
        return c

    def left(depth: int) -> int:
        return n if repl else n - depth

    # weights at depth 6 are numerators over left(0)*...*left(5)
    scale5 = left(5)
    scale45 = left(4) * left(5)
    total = 0
    for x1 in range(10):
        c1 = take(counts, x1)
        w1 = counts[x1]
        for x2 in range(10):
            w2 = w1 * c1[x2]
            if not w2:
                continue
            c2 = take(c1, x2)
            for y1 in range(10):
                w3 = w2 * c2[y1]
                if not w3:
                    continue
                c3 = take(c2, y1)
                for y2 in range(10):
                    w4 = w3 * c3[y2]
                    if not w4:
                        continue
                    c4 = take(c3, y2)
                    x, y = (x1 + x2) % 10, (y1 + y2) % 10
                    lo, hi = min(y1, y2), max(y1, y2)
                    if x >= 8 or y >= 8:
                        total += w4 * scale45 * sign(x - y)
                        continue
                    if player_draws(mask, x1, x2):
                        for k in range(10):
                            w5 = w4 * c4[k]
                            if not w5:
                                continue
                            c5 = take(c4, k)
                            xf = (x + k) % 10
                            if banker_draws(lo, hi, k):
                                for b in range(10):
                                    if c5[b]:
                                        total += w5 * c5[b] * sign(xf - (y + b) % 10)
                            else:
                                total += w5 * scale5 * sign(xf - y)
                    else:
                        if banker_draws(lo, hi, None):
                            for b in range(10):
                                if c4[b]:
                                    total += w4 * c4[b] * scale5 * sign(x - (y + b) % 10)
                        else:
                            total += w4 * scale45 * sign(x - y)
    denom = 1
    for depth in range(6):
        denom *= left(depth)
    return Fraction(total, denom)


def non_natural_by_hand_count(decks: int | None) -> Fraction:
    """P(neither two-card hand is a natural), by counting ordered four-card deals."""
    counts = shoe_counts(decks)
    repl = decks is None
    n = sum(counts)
    good = 0
    for x1 in range(10):
        for x2 in range(10):
            for y1 in range(10):
                for y2 in range(10):
                    used = [0] * 10
                    w = 1
                    for v in (x1, x2, y1, y2):
                        w *= counts[v] - (0 if repl else used[v])
                        used[v] += 1
                    if (x1 + x2) % 10 <= 7 and (y1 + y2) % 10 <= 7:
                        good += w
    denom = n ** 4 if repl else n * (n - 1) * (n - 2) * (n - 3)
    return Fraction(good, denom)
