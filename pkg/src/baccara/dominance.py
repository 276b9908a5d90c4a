"""Strict-dominance reduction of Banker's strategy space.

A decision point is forced-Draw when drawing is strictly better for Banker
against every Player row, forced-Stand when standing is, and Contested
otherwise.  Only contested points survive as free coordinates.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction
from typing import Hashable

from .errors import TieError
from .game_core import (
    BANKER_HANDS,
    OBSERVATIONS,
    DecisionPoint,
    Model,
    TotalPoint,
    obs_label,
)
from .payoff import DRAW, STAND_MOVE, PayoffBlocks, build_blocks


class Mark(enum.Enum):
    DRAW = "D"
    STAND = "S"
    CONTESTED = "*"


@dataclass
class ClassificationTable:
    model: object
    rows: tuple[int, ...]
    marks: dict[Hashable, Mark]

    @property
    def n_contested(self) -> int:
        return sum(m is Mark.CONTESTED for m in self.marks.values())

    def points_with(self, mark: Mark) -> list[Hashable]:
        return [pt for pt, m in self.marks.items() if m is mark]

    def __getitem__(self, point: Hashable) -> Mark:
        return self.marks[point]


def _point_order(point) -> tuple:
    # total asc, then third card with STAND last, then hand
    return point.sort_key


def classify(blocks: PayoffBlocks, rows: tuple[int, ...] | None = None) -> ClassificationTable:
    """Sign rule over ``rows`` (default: every row of the blocks).

    Player's gain is Banker's loss, so Banker draws where Draw minus Stand
    is negative for Player.
    """
    rows = tuple(blocks.rows if rows is None else rows)
    marks: dict[Hashable, Mark] = {}
    for i, pt in enumerate(blocks.points):
        signs = set()
        for r in rows:
            b = blocks.b(r, i)
            if b == 0:
                raise TieError(pt, f"zero Draw-Stand difference for row {r}")
            signs.add(b > 0)
        if signs == {False}:
            marks[pt] = Mark.DRAW
        elif signs == {True}:
            marks[pt] = Mark.STAND
        else:
            marks[pt] = Mark.CONTESTED
    return ClassificationTable(blocks.model, rows, marks)


def classify_model(model: Model) -> ClassificationTable:
    """Classification of a named model (rows: 32 masks, masks 0/31, or the two totals rows)."""
    return classify(build_blocks(model))


def contested_points(table: ClassificationTable) -> list[Hashable]:
    return sorted(table.points_with(Mark.CONTESTED), key=_point_order)


def forced_draws(table: ClassificationTable) -> set[Hashable]:
    return set(table.points_with(Mark.DRAW))


@dataclass
class ReducedGame:
    """Rows x 2^n game over the contested points.

    ``const[r]`` folds naturals (which contribute zero) and every forced
    point; ``e0[r][j]`` / ``e1[r][j]`` are the contributions p*a of free
    point ``free[j]`` under Stand / Draw.
    """

    model: object
    rows: tuple[int, ...]
    free: tuple[Hashable, ...]
    forced_draw: frozenset
    const: dict[int, Fraction]
    e0: dict[int, list[Fraction]]
    e1: dict[int, list[Fraction]]

    @property
    def n(self) -> int:
        return len(self.free)

    def column_points(self, column: int) -> set[Hashable]:
        """Draw set of the full Banker strategy for a column index (MSB = free[0])."""
        n = self.n
        return set(self.forced_draw) | {
            pt for j, pt in enumerate(self.free) if (column >> (n - 1 - j)) & 1
        }

    def entry(self, row: int, column: int) -> Fraction:
        n = self.n
        total = self.const[row]
        for j in range(n):
            total += self.e1[row][j] if (column >> (n - 1 - j)) & 1 else self.e0[row][j]
        return total

    def column_of(self, draws: set) -> int:
        col = 0
        for pt in self.free:
            col = (col << 1) | (pt in draws)
        return col

    def bitstring(self, column: int) -> str:
        return format(column, f"0{self.n}b") if self.n else ""


def reduce_game(blocks: PayoffBlocks, table: ClassificationTable) -> ReducedGame:
    free = tuple(contested_points(table))
    free_set = set(free)
    const: dict[int, Fraction] = {}
    e0: dict[int, list[Fraction]] = {}
    e1: dict[int, list[Fraction]] = {}
    for r in blocks.rows:
        c = Fraction(0)
        for i, pt in enumerate(blocks.points):
            if pt in free_set:
                continue
            c += blocks.e(r, i, DRAW if table[pt] is Mark.DRAW else STAND_MOVE)
        const[r] = c
        idx = [blocks.index(pt) for pt in free]
        e0[r] = [blocks.e(r, i, STAND_MOVE) for i in idx]
        e1[r] = [blocks.e(r, i, DRAW) for i in idx]
    return ReducedGame(blocks.model, blocks.rows, free, frozenset(table.points_with(Mark.DRAW)),
                       const, e0, e1)


def grid(table: ClassificationTable, cell=None) -> list[tuple[str, str, list[str]]]:
    """Rows of a Table-1/Table-2 shaped grid: (total label, hand label, 11 cells).

    Totals 0-2 and 7 collapse to one row when every hand shares its marks.
    ``cell`` maps a point to its text (default: the classification mark).
    """
    cell = cell or (lambda pt: table[pt].value)
    sample = next(iter(table.marks))
    rows: list[tuple[str, str, list[str]]] = []
    if hasattr(sample, "banker_hand"):
        by_total: dict[int, list[tuple[str, list[str]]]] = {}
        for h in BANKER_HANDS:
            cells = [cell(DecisionPoint(h, o)) for o in OBSERVATIONS]
            by_total.setdefault(h.total, []).append((str(h), cells))
        low = [c for t in (0, 1, 2) for _, c in by_total[t]]
        if all(c == low[0] for c in low):
            rows.append(("0,1,2", "", low[0]))
        else:
            rows.extend((str(t), lbl, c) for t in (0, 1, 2) for lbl, c in by_total[t])
        for t in range(3, 8):
            entries = by_total[t]
            if t == 7 and all(c == entries[0][1] for _, c in entries):
                rows.append(("7", "", entries[0][1]))
            else:
                rows.extend((str(t), lbl, c) for lbl, c in entries)
    else:
        cells = {t: [cell(TotalPoint(t, o)) for o in OBSERVATIONS] for t in range(8)}
        if cells[0] == cells[1] == cells[2]:
            rows.append(("0,1,2", "", cells[0]))
        else:
            rows.extend((str(t), "", cells[t]) for t in (0, 1, 2))
        rows.extend((str(t), "", cells[t]) for t in range(3, 8))
    return rows


GRID_COLUMNS = [obs_label(o) for o in OBSERVATIONS]

__all__ = [
    "ClassificationTable",
    "Mark",
    "ReducedGame",
    "classify",
    "contested_points",
    "forced_draws",
    "grid",
    "reduce_game",
    "GRID_COLUMNS",
    "classify_model",
]
