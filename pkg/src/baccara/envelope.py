"""Lower-envelope solution of 2 x 2^n games with point-separable payoffs.

Player I mixes his two rows as (1 - p, p).  Each free point contributes a
linear function of p under either Banker move, so Banker's best reply can be
chosen point by point and the resulting value V(p) is a concave piecewise
linear function whose breakpoints are the per-point crossover probabilities.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Hashable, Sequence

from .errors import SaddleError, TieError


@dataclass
class TwoRowGame:
    """e_const[i] plus, per free point, the 2x2 block ((e00, e01), (e10, e11)).

    ``eij[l]`` is row i's contribution at point l when Banker plays move j
    (0 = stand, 1 = draw).
    """

    e_const: tuple[Fraction, Fraction]
    points: tuple[Hashable, ...]
    e00: list[Fraction]
    e01: list[Fraction]
    e10: list[Fraction]
    e11: list[Fraction]
    row_labels: tuple = (0, 1)

    @property
    def n(self) -> int:
        return len(self.points)

    def entry(self, row: int, draws: set) -> Fraction:
        a, b = (self.e00, self.e01) if row == 0 else (self.e10, self.e11)
        total = self.e_const[row]
        for j, pt in enumerate(self.points):
            total += b[j] if pt in draws else a[j]
        return total

    @classmethod
    def from_reduced(cls, game, row0: int, row1: int) -> "TwoRowGame":
        return cls(
            (game.const[row0], game.const[row1]),
            tuple(game.free),
            list(game.e0[row0]),
            list(game.e1[row0]),
            list(game.e0[row1]),
            list(game.e1[row1]),
            (row0, row1),
        )


@dataclass
class Partition:
    T00: list[int] = field(default_factory=list)
    T01: list[int] = field(default_factory=list)
    T10: list[int] = field(default_factory=list)
    T11: list[int] = field(default_factory=list)


def partition(game: TwoRowGame) -> Partition:
    """Sort points by which move each row prefers (indices into ``game.points``)."""
    part = Partition()
    for j, pt in enumerate(game.points):
        d0 = game.e00[j] - game.e01[j]
        d1 = game.e10[j] - game.e11[j]
        if d0 == 0 or d1 == 0:
            raise TieError(pt, "a row is indifferent between Draw and Stand")
        key = ("1" if d0 > 0 else "0") + ("1" if d1 > 0 else "0")
        getattr(part, "T" + key).append(j)
    return part


def crossover(e00: Fraction, e01: Fraction, e10: Fraction, e11: Fraction) -> Fraction:
    """Row-1 weight at which Banker is indifferent between his two moves."""
    num = e00 - e01
    den = num + e11 - e10
    if den == 0:
        raise ZeroDivisionError("no crossover: both rows rank the moves alike with equal gaps")
    return num / den


def _crossovers(game: TwoRowGame, part: Partition) -> dict[int, Fraction]:
    return {
        j: crossover(game.e00[j], game.e01[j], game.e10[j], game.e11[j])
        for j in part.T01 + part.T10
    }


def _best_indices(part: Partition, cross: dict[int, Fraction], p: Fraction) -> set[int]:
    return (
        set(part.T11)
        | {j for j in part.T01 if cross[j] < p}
        | {j for j in part.T10 if cross[j] > p}
    )


def best_response(game: TwoRowGame, p: Fraction) -> set:
    """Banker's best reply T(p): the set of free points where he draws."""
    part = partition(game)
    cross = _crossovers(game, part)
    return {game.points[j] for j in _best_indices(part, cross, Fraction(p))}


def _value_at(game: TwoRowGame, part: Partition, cross: dict[int, Fraction], p: Fraction) -> Fraction:
    q = 1 - p
    v = q * game.e_const[0] + p * game.e_const[1]
    for j in part.T11:
        v += q * game.e01[j] + p * game.e11[j]
    for j in part.T00:
        v += q * game.e00[j] + p * game.e10[j]
    draw = _best_indices(part, cross, p)
    for j in part.T01 + part.T10:
        if j in draw:
            v += q * game.e01[j] + p * game.e11[j]
        else:
            v += q * game.e00[j] + p * game.e10[j]
    return v


def envelope_value(game: TwoRowGame, p: Fraction) -> Fraction:
    """V(p): Player's payoff when Banker best-responds to the mixture (1-p, p)."""
    p = Fraction(p)
    if not 0 <= p <= 1:
        raise ValueError(f"p must lie in [0, 1], got {p}")
    part = partition(game)
    return _value_at(game, part, _crossovers(game, part), p)


def solve_kernel_2x2(matrix: Sequence[Sequence[Fraction]]) -> tuple[Fraction, Fraction, Fraction]:
    """Equalizing strategies of a 2x2 game without a pure saddle point.

    Returns (p, q, v): p is the weight on row 1, q the weight on column 1.
    """
    (a, b), (c, d) = [[Fraction(x) for x in row] for row in matrix]
    den = a - b - c + d
    if den == 0:
        raise SaddleError("degenerate kernel")
    p = (a - b) / den
    q = (a - c) / den
    if not (0 < p < 1 and 0 < q < 1):
        raise SaddleError(f"kernel has a pure saddle point (p={p}, q={q})")
    v = (1 - p) * a + p * c
    return p, q, v


@dataclass
class EnvelopeSolution:
    p_star: Fraction | None
    value: Fraction
    l_star: tuple = ()
    kernel: tuple[tuple[Fraction, Fraction], tuple[Fraction, Fraction]] | None = None
    kernel_columns: tuple[frozenset, frozenset] | None = None
    q_star: Fraction | None = None
    candidates: list[tuple[Fraction, Fraction]] = field(default_factory=list)
    maximizers: list[Fraction] = field(default_factory=list)
    unique: bool = False
    partition: Partition | None = None
    crossovers: dict = field(default_factory=dict)


def solve(game: TwoRowGame) -> EnvelopeSolution:
    part = partition(game)
    cross = _crossovers(game, part)
    ps = sorted({Fraction(0), Fraction(1), *cross.values()})
    candidates = [(p, _value_at(game, part, cross, p)) for p in ps]
    value = max(v for _, v in candidates)
    maximizers = [p for p, v in candidates if v == value]
    named = {game.points[j]: p for j, p in cross.items()}
    if len(maximizers) != 1 or maximizers[0] in (0, 1):
        return EnvelopeSolution(
            p_star=maximizers[0] if len(maximizers) == 1 else None,
            value=value,
            candidates=candidates,
            maximizers=maximizers,
            unique=False,
            partition=part,
            crossovers=named,
        )
    p_star = maximizers[0]
    tied = [j for j, p in cross.items() if p == p_star]
    without = frozenset(game.points[j] for j in _best_indices(part, cross, p_star))
    with_l = without | {game.points[j] for j in tied}
    kernel = tuple(
        (game.entry(i, set(without)), game.entry(i, set(with_l))) for i in (0, 1)
    )
    p_k, q_k, v_k = solve_kernel_2x2(kernel)
    if p_k != p_star or v_k != value:
        raise AssertionError("kernel disagrees with the envelope maximum")
    return EnvelopeSolution(
        p_star=p_star,
        value=value,
        l_star=tuple(game.points[j] for j in tied),
        kernel=kernel,
        kernel_columns=(without, with_l),
        q_star=q_k,
        candidates=candidates,
        maximizers=maximizers,
        unique=len(tied) == 1,
        partition=part,
        crossovers=named,
    )
