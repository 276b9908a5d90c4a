import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from baccara import closed_form as cf
from baccara.dominance import classify, reduce_game
from baccara.envelope import (
    TwoRowGame,
    best_response,
    crossover,
    envelope_value,
    partition,
    solve,
    solve_kernel_2x2,
)
from baccara.errors import SaddleError, TieError
from baccara.game_core import Model
from baccara.payoff import build_blocks

F = Fraction


def two_row(name, d, r0, r1):
    blocks = build_blocks(Model.parse(name, d))
    reduced = reduce_game(blocks, classify(blocks))
    return reduced, TwoRowGame.from_reduced(reduced, r0, r1)


def named(game, indices):
    return {str(game.points[j]) for j in indices}


@pytest.mark.parametrize("d", range(1, 13))
def test_b2_partition(d):
    _, game = two_row("B2", d, 0, 31)
    part = partition(game)
    assert named(game, part.T10) == ({"(3,3,6)"} if d <= 10 else set())
    assert not part.T00 and not part.T11
    assert len(part.T01) + len(part.T10) == game.n


@pytest.mark.parametrize("d,n", list(zip(range(1, 13), [7, 9, 8, 9, 6, 6, 6, 7, 7, 6, 6, 6])))
def test_b3_rows_19_27_partition(d, n):
    _, game = two_row("B3", d, 19, 27)
    part = partition(game)
    assert len(part.T01) + len(part.T10) == n
    # exact signs put (3,3,6) on opposite sides for the two rows at d = 4
    assert named(game, part.T10) == ({"(3,3,6)"} if d == 4 else set())
    if d >= 10:
        assert named(game, part.T01) == {
            "(0,6,-)", "(1,5,-)", "(2,4,-)", "(3,3,-)", "(7,9,-)", "(8,8,-)"}


def test_crossover_examples():
    assert crossover(F(0), F(1), F(1), F(0)) == F(1, 2)
    assert crossover(F(-1), F(0), F(3), F(0)) == F(1, 4)
    with pytest.raises(ZeroDivisionError):
        crossover(F(1), F(1), F(2), F(2))


def test_best_response_at_pure_rows():
    _, game = two_row("B3", 6, 19, 27)
    part = partition(game)
    at0, at1 = best_response(game, F(0)), best_response(game, F(1))
    # row 0 alone: Banker draws exactly where row 0 is hurt by drawing
    assert at0 == {game.points[j] for j in part.T11 + part.T10}
    assert at1 == {game.points[j] for j in part.T11 + part.T01}
    assert envelope_value(game, F(0)) == game.entry(0, at0)
    assert envelope_value(game, F(1)) == game.entry(1, at1)


def test_kernel_labels_b3_d6():
    reduced, game = two_row("B3", 6, 19, 27)
    sol = solve(game)
    cols = sorted(reduced.column_of(set(c)) for c in sol.kernel_columns)
    assert cols == [254913, 254945]
    assert [str(p) for p in sol.l_star] == ["(0,6,-)"]
    assert sol.unique
    assert sol.kernel == cf.B3_KERNEL_6
    assert (sol.p_star, sol.q_star, sol.value) == (cf.b3_p(6), cf.b3_q(6), cf.b3_v(6))


def test_kernel_b2_d6():
    _, game = two_row("B2", 6, 0, 31)
    sol = solve(game)
    assert sol.kernel == cf.B2_KERNEL_6
    assert (sol.p_star, sol.q_star, sol.value) == (cf.b2_p(6), cf.b2_q(6), cf.b2_v(6))


def test_b1_kernel_columns():
    reduced, game = two_row("B1", 6, 0, 1)
    sol = solve(game)
    assert sorted(reduced.column_of(set(c)) for c in sol.kernel_columns) == [10, 11]
    assert sol.kernel == cf.b1_kernel(6)


def test_a1_kernel():
    _, game = two_row("A1", None, 0, 1)
    sol = solve(game)
    assert sol.kernel == cf.A1_KERNEL
    assert (sol.p_star, sol.q_star, sol.value) == (cf.A1_P, cf.A1_Q, cf.A1_V)


@pytest.mark.parametrize(
    "name,d,rows,closed",
    [("B2", 20, (0, 31), cf.b2_v_at_88_stand), ("B3", 10, (19, 27), cf.b3_v_at_88_stand)],
)
def test_value_at_88_stand_crossover(name, d, rows, closed):
    _, game = two_row(name, d, *rows)
    sol = solve(game)
    p88 = sol.crossovers[next(p for p in game.points if str(p) == "(8,8,-)")]
    assert envelope_value(game, p88) == closed(d)
    assert envelope_value(game, p88) < sol.value


def test_envelope_is_minimum_over_columns():
    reduced, game = two_row("B3", 6, 19, 27)
    rng = random.Random(2)
    for p in (F(0), F(1, 7), F(1, 2), F(9, 10), F(1)):
        v = envelope_value(game, p)
        assert v == (1 - p) * reduced.entry(19, reduced.column_of(best_response(game, p))) + \
            p * reduced.entry(27, reduced.column_of(best_response(game, p)))
        for _ in range(30):
            col = rng.randrange(2 ** reduced.n)
            assert v <= (1 - p) * reduced.entry(19, col) + p * reduced.entry(27, col)


@settings(max_examples=40, deadline=None)
@given(st.fractions(0, 1), st.fractions(0, 1), st.fractions(0, 1))
def test_envelope_concave(a, b, t):
    _, game = two_row("B3", 3, 19, 27)
    mid = t * a + (1 - t) * b
    assert envelope_value(game, mid) >= t * envelope_value(game, a) + (1 - t) * envelope_value(game, b)


def test_envelope_rejects_out_of_range():
    _, game = two_row("A1", None, 0, 1)
    with pytest.raises(ValueError):
        envelope_value(game, F(3, 2))


def test_kernel_identity():
    assert solve_kernel_2x2([[1, 0], [0, 1]]) == (F(1, 2), F(1, 2), F(1, 2))


def test_kernel_with_saddle_point():
    with pytest.raises(SaddleError):
        solve_kernel_2x2([[1, 2], [3, 4]])
    with pytest.raises(SaddleError):
        solve_kernel_2x2([[1, 1], [1, 1]])


def _toy(points, blocks):
    e00, e01, e10, e11 = zip(*blocks)
    return TwoRowGame((F(0), F(0)), tuple(points), list(e00), list(e01), list(e10), list(e11))


def test_tied_crossovers_flag_non_unique():
    game = _toy("ab", [(F(0), F(1), F(1), F(0))] * 2)
    sol = solve(game)
    assert sol.p_star == F(1, 2) and sol.value == 1
    assert not sol.unique
    assert set(sol.l_star) == {"a", "b"}


def test_maximum_at_endpoint_is_not_unique_mixture():
    game = _toy("a", [(F(1), F(2), F(3), F(4))])
    sol = solve(game)
    assert sol.p_star == 1 and not sol.unique and sol.kernel is None


def test_partition_tie_raises():
    with pytest.raises(TieError):
        partition(_toy("a", [(F(1), F(1), F(0), F(1))]))
