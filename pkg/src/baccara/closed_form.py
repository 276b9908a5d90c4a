"""Published closed-form solutions, piecewise in the deck count d.

These are evaluated, never solved; the solver's output is checked against
them.  Banker's final move tables are encoded as base grids by total plus
per-hand overrides that depend on d and on the information model.
"""

from __future__ import annotations

from fractions import Fraction as F

from .game_core import (
    BANKER_HANDS,
    OBSERVATIONS,
    STAND,
    DecisionPoint,
    HandPair,
    TotalPoint,
    obs_index,
)


def falling(x: int, k: int) -> int:
    out = 1
    for i in range(k):
        out *= x - i
    return out


def _poly(coeffs, d: int) -> int:
    """Evaluate a polynomial given highest-degree coefficient first."""
    v = 0
    for c in coeffs:
        v = v * d + c
    return v


# -- B1 ---------------------------------------------------------------------

def b1_p(d: int) -> F:
    return F(_poly([36864, -9312, 732, -23], d), 8 * _poly([5632, -1138, 69, -1], d))


def b1_q(d: int) -> F:
    k = _poly([5632, -1138, 69, -1], d)
    if d <= 3:
        return F(_poly([224000, -55712, 2936, 163, -14], d), 2 * (52 * d - 5) * k)
    return F(_poly([439808, -107456, 5248, 374, -31], d), 4 * (52 * d - 5) * k)


def b1_v(d: int) -> F:
    k = _poly([5632, -1138, 69, -1], d)
    ff = falling(52 * d, 6)
    if d <= 3:
        num = _poly([44396707840, -18908426240, 3279293696, -294129728, 14418160, -407352, 9543, -220], d)
        return F(-32 * d * d * num, k * ff)
    num = _poly([89072336896, -38873874432, 6969345536, -655761920, 34638784, -1090952, 26286, -537], d)
    return F(-16 * d * d * num, k * ff)


def b1_kernel(d: int) -> tuple[tuple[F, F], tuple[F, F]]:
    """Kernel (columns 10 and 11 of 16) displayed for d >= 4."""
    s = F(-64 * d * d, falling(52 * d, 6))
    return (
        (4 * _poly([1168384, -284720, 22320, -446, -11], d) * s,
         _poly([2756608, -470336, 4656, 3072, -159], d) * s),
        (2 * _poly([1896960, -461984, 39392, -1266, 9], d) * s,
         _poly([4219904, -954112, 68384, -852, -57], d) * s),
    )


def b1_margin_8_9(d: int) -> F:
    """Player-side margin of columns 8 and 9 under the d >= 4 kernel mixture."""
    num = _poly([278921216, -1057021952, 410758144, -67502464, 5802464, -276248, 7200, -97], d)
    return F(16 * d * d * num, _poly([5632, -1138, 69, -1], d) * falling(52 * d, 6))


# -- B2 ---------------------------------------------------------------------

def b2_p(d: int) -> F:
    return F((8 * d - 1) * (12 * d - 1) * (24 * d - 1), 2 * d * _poly([1408, -220, 9], d))


def b2_q(d: int) -> F:
    fixed = {1: F(290383, 450072), 2: F(2591845, 4119192), 3: F(9294089, 14521368)}
    if d in fixed:
        return fixed[d]
    if d <= 7:
        c = [368640, -68624, -2168, 981, -48]
    elif d <= 9:
        c = [367616, -67728, -2416, 1015, -51]
    else:
        c = [366592, -67344, -2456, 1017, -51]
    return F(_poly(c, d), 8 * d * (52 * d - 5) * _poly([1408, -220, 9], d))


def b2_v(d: int) -> F:
    fixed = {
        1: F(-22932137, 1666583100),
        2: F(-8220886553, 620866384425),
        3: F(-210084639838, 16053072820785),
    }
    if d in fixed:
        return fixed[d]
    if d <= 7:
        c = [11125325824, -4182669312, 615333888, -43467904, 1329008, 5040, -1551, 39]
    elif d <= 9:
        c = [11129683968, -4218739712, 635681024, -47725760, 1738944, -14344, -1093, 33]
    else:
        c = [11134042112, -4259389440, 648152320, -49007232, 1788256, -14816, -1089, 33]
    return F(-32 * d * _poly(c, d), _poly([1408, -220, 9], d) * falling(52 * d, 6))


def b2_v_at_88_stand(d: int) -> F:
    """Envelope value at the (8,8) stand crossover, displayed for d >= 20."""
    c = [2783510528, -1188571136, 203128704, -16568896, 596408, -16158, 1855, -93]
    return F(-32 * d * _poly(c, d), _poly([352, -71, 4], d) * falling(52 * d, 6))


B2_KERNEL_6 = (
    (F(-22721165499, 1525814595305), F(-18033241115, 1525814595305)),
    (F(-19018265931, 1525814595305), F(-20151297323, 1525814595305)),
)

# -- B3 ---------------------------------------------------------------------

def b3_p(d: int) -> F:
    if d == 1:
        return F(1, 19)
    return F((12 * d - 1) * _poly([16, -14, 1], d), 32 * d * d * (11 * d - 1))


def b3_q(d: int) -> F:
    fixed = {1: F(4519, 10716), 2: F(17431, 64512), 3: F(4425647, 11132928), 8: F(316815305, 585842688)}
    if d in fixed:
        return fixed[d]
    if 4 <= d <= 7:
        c = [92160, -120128, 26336, -2000, 47]
    else:
        c = [91648, -119488, 26032, -1932, 41]
    return F(_poly(c, d), 256 * d * d * (11 * d - 1) * (52 * d - 5))


# The printed d=1 value; see ``b3_v``.
B3_V1_PRINTED = F(-3439451, 25482800)


def b3_v(d: int) -> F:
    fixed = {
        1: B3_V1_PRINTED,
        2: F(-49424010137, 3823801581600),
        3: F(-31717439249, 2461444457472),
        8: F(-2789416947665657, 217430324984396160),
    }
    if d in fixed:
        return fixed[d]
    if 4 <= d <= 7:
        c = [1390665728, -491115520, 50698240, 2428032, -990512, 89192, -3462, 47]
    else:
        c = [1391755264, -500535296, 54174464, 1931136, -948816, 85792, -3238, 41]
    return F(-2 * _poly(c, d), (11 * d - 1) * falling(52 * d, 6))


def b3_v_at_88_stand(d: int) -> F:
    """Envelope value at the (8,8) stand crossover, displayed for d >= 10."""
    c = [695877632, -281198592, 34472064, 1177024, -901592, 119896, -6755, 123]
    return F(-8 * _poly(c, d), (22 * d - 3) * falling(52 * d, 6))


B3_KERNEL_6 = (
    (F(-19769569403, 1525814595305), F(-19425699931, 1525814595305)),
    (F(-19391857983, 1525814595305), F(-19783609631, 1525814595305)),
)

# -- with replacement -------------------------------------------------------

A1_P, A1_Q, A1_V = F(9, 11), F(859, 2288), F(-679568, 53094899)
A1_KERNEL = (
    (F(-4564 * 16, 13 ** 6), F(-2692 * 16, 13 ** 6)),
    (F(-3705 * 16, 13 ** 6), F(-4121 * 16, 13 ** 6)),
)
A3_P, A3_Q = F(6, 11), F(179, 286)

# -- displayed Draw-minus-Stand differences ---------------------------------

def b31_336(d: int) -> F:
    return F(-2 * _poly([80, -832, 135, -2], d), (52 * d - 5) * _poly([840, -114, 1], d))


def b0_336(d: int) -> F:
    return F(-2 * _poly([848, -952, 135, -2], d), (52 * d - 5) * _poly([712, -102, 1], d))


def b1_54(d: int) -> F:
    return F(-_poly([15360, -45184, 9040, -588, 13], d),
             (52 * d - 5) * _poly([26880, -4680, 242, -3], d))


def b0_54(d: int) -> F:
    return F(_poly([1024, 37248, -7792, 492, -7], d),
             (52 * d - 5) * _poly([22784, -3976, 194, -1], d))


# -- Banker's final move tables ---------------------------------------------

MIX = "M"


def _base_row(total: int) -> list[str]:
    """Final-table cells by total, columns 0..9 then STAND; '?' marks per-hand cells."""
    if total <= 2:
        return ["D"] * 11
    if total == 3:
        return ["D"] * 8 + ["?", "D", "D"]
    if total == 4:
        return ["S", "?"] + ["D"] * 6 + ["S", "S", "D"]
    if total == 5:
        return ["S"] * 4 + ["?"] + ["D"] * 3 + ["S", "S", "D"]
    if total == 6:
        return ["S"] * 6 + ["?", "D", "S", "S", "?"]
    return ["S"] * 11


def _hand_cell(hand: HandPair, obs, d: int | None, info: int) -> str:
    big = d is None  # with replacement behaves as the large-d branch
    t = hand.total
    key = (hand.lo, hand.hi)
    if t == 3 and obs == 8:
        if key == (4, 9):
            return "S" if big or d >= 2 else "D"
        if key == (6, 7):
            return "S" if info == 2 or big or d >= 2 else "D"
        return "S"
    if t == 4 and obs == 1:
        if key in ((6, 8), (7, 7)):
            return "S" if big or d >= 3 else "D"
        return "S"
    if t == 5 and obs == 4:
        if key in ((0, 5), (7, 8)):
            return "D" if big or d >= 2 else "S"
        if key == (1, 4):
            return "D" if big or d >= 8 else "S"
        if key == (2, 3):
            threshold = 10 if info == 2 else 9
            return "D" if big or d >= threshold else "S"
        if key == (6, 9):
            threshold = 3 if info == 2 else 2
            return "D" if big or d >= threshold else "S"
    if t == 6 and obs == 6:
        if key == (3, 3):
            return "D" if big or d >= 4 else "S"
        return "D"
    if t == 6 and obs is STAND:
        d1_b3 = info == 3 and not big and d == 1
        if key == (0, 6):
            return "S" if d1_b3 else MIX
        if key == (8, 8):
            return MIX if d1_b3 else "D"
        return "S"
    raise KeyError((hand, obs))


def banker_table_composition(d: int | None, info: int) -> dict[DecisionPoint, str]:
    """Final Banker moves for Models 2/3 (d=None for with replacement).

    Cells are 'D', 'S' or 'M' (the mixing point).
    """
    table: dict[DecisionPoint, str] = {}
    for h in BANKER_HANDS:
        base = _base_row(h.total)
        for obs in OBSERVATIONS:
            cell = base[obs_index(obs)]
            if cell == "?":
                cell = _hand_cell(h, obs, d, info)
            table[DecisionPoint(h, obs)] = cell
    return table


def banker_table_totals(d: int | None) -> dict[TotalPoint, str]:
    table: dict[TotalPoint, str] = {}
    for t in range(8):
        base = _base_row(t)
        for obs in OBSERVATIONS:
            cell = base[obs_index(obs)]
            if cell == "?":
                if t == 3:
                    cell = "S"
                elif t == 4:
                    cell = "S"
                elif t == 5:
                    cell = "D" if d is None or d >= 4 else "S"
                elif obs == 6:
                    cell = "D"
                else:
                    cell = MIX
            table[TotalPoint(t, obs)] = cell
    return table


def player_table(model_name: str, d: int | None = None) -> dict[str, str]:
    """Player's final moves on the five total-5 hands ('M' = mixed)."""
    if model_name.endswith("3"):
        return {"(0,5)": "D", "(1,4)": MIX, "(2,3)": "S", "(6,9)": "D", "(7,8)": "D"}
    return {h: MIX for h in ("(0,5)", "(1,4)", "(2,3)", "(6,9)", "(7,8)")}


def closed_form(model_name: str, d: int | None = None) -> dict:
    """The published (p, q, value, mixing point, Banker table) for a model."""
    name = model_name.upper()
    if name == "A1":
        return dict(p=A1_P, q=A1_Q, value=A1_V, mixing_point=TotalPoint(6, STAND),
                    banker=banker_table_totals(None))
    if name in ("A2", "A3"):
        p = A1_P if name == "A2" else A3_P
        return dict(p=p, q=A3_Q, value=A1_V, mixing_point=DecisionPoint(HandPair(0, 6), STAND),
                    banker=banker_table_composition(None, int(name[1])))
    if d is None or d < 1:
        raise ValueError(f"model {name} needs a positive deck count")
    if name == "B1":
        return dict(p=b1_p(d), q=b1_q(d), value=b1_v(d), mixing_point=TotalPoint(6, STAND),
                    banker=banker_table_totals(d))
    if name == "B2":
        return dict(p=b2_p(d), q=b2_q(d), value=b2_v(d),
                    mixing_point=DecisionPoint(HandPair(0, 6), STAND),
                    banker=banker_table_composition(d, 2))
    if name == "B3":
        hand = HandPair(8, 8) if d == 1 else HandPair(0, 6)
        return dict(p=b3_p(d), q=b3_q(d), value=b3_v(d), mixing_point=DecisionPoint(hand, STAND),
                    banker=banker_table_composition(d, 3))
    raise ValueError(f"unknown model {model_name!r}")
