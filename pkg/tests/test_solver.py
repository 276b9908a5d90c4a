from fractions import Fraction

import pytest

from baccara import closed_form as cf
from baccara.errors import CertificationError
from baccara.game_core import STAND, DecisionPoint, HandPair, InfoModel, Model, Shoe, draw_weight
from baccara.solver import (
    b2_columns_under_b3,
    certify,
    dedup_structure_A3,
    enumerate_extreme_equilibria,
    player_margins,
    repair,
    solve_b3_from_b2_columns,
    solve_from_columns,
    solve_model,
    transplant_kernel,
)

from conftest import solved
from paper_tables import final_composition_cells

F = Fraction
B3_V1_SOLVED = F(-37833961, 2901089100)


def moves_to_labels(moves):
    out = {}
    for pt, m in moves.items():
        if hasattr(pt, "banker_hand"):
            out[(pt.banker_hand.lo, pt.banker_hand.hi, "-" if pt.obs is STAND else str(pt.obs))] = m
    return out


# -- agreement with the published closed forms ---------------------------------


@pytest.mark.parametrize("name", ["B1", "B2", "B3"])
@pytest.mark.parametrize("d", range(1, 13))
def test_solution_matches_closed_form(name, d):
    sol = solved(name, d)
    ref = cf.closed_form(name, d)
    assert sol.p == ref["p"]
    assert sol.q == ref["q"]
    if (name, d) == ("B3", 1):
        # the printed d=1 value disagrees with the certified saddle value
        assert sol.value == B3_V1_SOLVED
    else:
        assert sol.value == ref["value"]
    assert sol.mixing_points == (ref["mixing_point"],)
    assert sol.banker_moves() == ref["banker"]


@pytest.mark.parametrize("name", ["A1", "A2", "A3"])
def test_with_replacement_matches_closed_form(name):
    sol = solved(name)
    ref = cf.closed_form(name)
    assert (sol.p, sol.q, sol.value) == (ref["p"], ref["q"], ref["value"])
    assert sol.mixing_points == (ref["mixing_point"],)
    assert sol.banker_moves() == ref["banker"]
    assert sol.certificate.ok


@pytest.mark.parametrize("info", [2, 3])
@pytest.mark.parametrize("d", range(1, 13))
def test_threshold_cells_match_transcribed_table(d, info):
    labels = moves_to_labels(solved(f"B{info}", d).banker_moves())
    for key, mark in final_composition_cells(d, info).items():
        assert labels[key] == mark, key


def test_23_on_four_threshold_b2():
    for d in range(1, 13):
        mark = moves_to_labels(solved("B2", d).banker_moves())[(2, 3, "4")]
        assert mark == ("S" if d <= 9 else "D")


@pytest.mark.parametrize("name,d", [("B3", 6), ("B3", 1), ("A3", None)])
def test_player_table(name, d):
    sol = solved(name, d)
    moves = sol.player_moves()
    labels = {h: "D" if w == 1 else "S" if w == 0 else "M" for h, w in moves.items()}
    assert labels == cf.player_table(name, d)


def test_player_table_totals_only():
    assert solved("B1", 6).player_moves() == {"5": cf.b1_p(6)}


# -- specific displays ---------------------------------------------------------


def test_b2_d6_value():
    assert solved("B2", 6).value == F(-974653793197999, 75340147272374985)


def test_b3_d8_displays():
    sol = solved("B3", 8)
    assert sol.q == F(316815305, 585842688)
    assert sol.value == F(-2789416947665657, 217430324984396160)


def test_b3_d6_kernel_labels():
    sol = solved("B3", 6)
    cols = [c for c, _ in sol.banker_mixture]
    assert sorted(cols) == [254913, 254945]
    assert sorted(sol.column_label(c) for c in cols) == ["111110001111000001", "111110001111100001"]
    assert [r for r, _ in sol.player_mixture] == [19, 27]


def test_b3_d1_mixes_on_88():
    sol = solved("B3", 1)
    assert sol.mixing_points == (DecisionPoint(HandPair(8, 8), STAND),)
    assert (sol.p, sol.q) == (F(1, 19), F(4519, 10716))


# -- certificates --------------------------------------------------------------


@pytest.mark.parametrize("name", ["B1", "B2", "B3"])
@pytest.mark.parametrize("d", range(1, 13))
def test_certificates_pass(name, d):
    cert = solved(name, d).certificate
    assert cert.ok
    assert cert.player_worst_margin == 0 and cert.banker_worst_margin == 0
    assert not cert.failing_columns and not cert.failing_rows


def test_kernel_rows_have_zero_margin():
    sol = solved("B3", 6)
    for col, _ in sol.banker_mixture:
        assert sum(w * sol.reduced.entry(r, col) for r, w in sol.player_mixture) == sol.value
    for r, _ in sol.player_mixture:
        assert sum(w * sol.reduced.entry(r, c) for c, w in sol.banker_mixture) == sol.value


def test_certify_rejects_wrong_value():
    sol = solved("B3", 6)
    cert = certify(sol.reduced, sol.player_mixture, sol.banker_mixture, sol.value + F(1, 10**9))
    assert not cert.ok


def test_b1_d4_margins():
    sol = solved("B1", 4)
    margins = player_margins(sol.reduced, sol.player_mixture, sol.value)
    assert min(margins) == 0
    assert margins[8] == margins[9] == cf.b1_margin_8_9(4) > 0
    assert margins[10] == margins[11] == 0


def test_b1_kernel_transplanted_to_three_decks_fails():
    donor = solved("B1", 4)
    moved = transplant_kernel(donor, Model.parse("B1", 3))
    assert moved.margins[8] == moved.margins[9] == cf.b1_margin_8_9(3) < 0
    assert solved("B1", 3).certificate.ok


# -- B2 support under B3 -------------------------------------------------------


def test_b2_columns_fail_under_b3_at_two_decks():
    first, repaired = solve_b3_from_b2_columns(2)
    assert not first.certificate.ok
    labels = sorted(first.column_label(c) for c in first.certificate.failing_columns)
    assert labels == ["000011111111110000001", "000011111111110100001"]
    ref = solved("B3", 2)
    assert (repaired.p, repaired.q, repaired.value) == (ref.p, ref.q, ref.value)


@pytest.mark.parametrize("d,failing", [(1, 8), (9, 2)])
def test_b2_columns_fail_under_b3(d, failing):
    first, repaired = solve_b3_from_b2_columns(d)
    assert len(first.certificate.failing_columns) == failing
    assert repaired.certificate.ok
    ref = solved("B3", d)
    assert (repaired.p, repaired.q, repaired.value) == (ref.p, ref.q, ref.value)
    assert sorted(repaired.banker_mixture) == sorted(ref.banker_mixture)


@pytest.mark.parametrize("d", [3, 6, 10])
def test_b2_columns_already_optimal_under_b3(d):
    first, _ = solve_b3_from_b2_columns(d)
    assert first.certificate.ok


def test_repair_gives_up_without_rounds():
    first = solve_from_columns(Model.parse("B3", 2), b2_columns_under_b3(2))
    with pytest.raises(CertificationError):
        repair(Model.parse("B3", 2), first, rounds=0)


def test_solution_not_claimed_unique_for_with_replacement():
    assert not solved("A3").unique_claimed
    assert not solved("A2").unique_claimed


# -- value ordering and limits -------------------------------------------------


def test_value_ordering_six_decks():
    v1, v2, v3 = (solved(n, 6).value for n in ("B1", "B2", "B3"))
    assert v2 < v1
    assert v2 < v3


def test_b3_approaches_with_replacement_solution():
    gaps = []
    for d in (10, 20, 50, 100):
        sol = solve_model(Model.parse("B3", d))
        assert sol.certificate.ok
        gaps.append((abs(sol.p - cf.A3_P), abs(sol.q - cf.A3_Q), abs(sol.value - cf.A1_V)))
    for k in range(3):
        series = [g[k] for g in gaps]
        assert all(a > b for a, b in zip(series, series[1:])), series


# -- with-replacement structure ------------------------------------------------


def test_dedup_structure():
    s = dedup_structure_A3()
    assert s.n_row_classes == 9
    assert s.n_column_classes == 23409
    assert s.row_classes[0] == [0] and s.row_classes[8] == [31]
    # the class holding 19 has draw weight 6/8 (4/8 + 1/8 + 1/8)
    assert s.row_classes[6] == [19, 21, 22, 25, 26, 28]
    assert draw_weight(19) == 6
    weights = {k: [w for _, w in v] for k, v in s.column_groups.items()}
    assert weights[(3, 9)] == [4, 1, 1, 1, 1]
    assert weights[(5, 4)] == [4, 1, 1, 1, 1]
    assert sorted(weights[(4, 1)]) == [1, 1, 2, 2, 2, 8]
    assert sorted(weights[(6, STAND)]) == [1, 1, 2, 2, 2, 8]
    assert [len(v) for v in s.group_levels.values()] == [9, 17, 9, 17]


def test_extreme_equilibria_a3():
    eqs = enumerate_extreme_equilibria(InfoModel.FULL_COMPOSITION)
    assert len(eqs) == 980
    assert len({e.player for e in eqs}) == 14
    assert len({e.banker for e in eqs}) == 70
    assert all(e.value == cf.A1_V for e in eqs)
    pick = [e for e in eqs if [i for i, _ in e.player] == [6, 7] and [j for j, _ in e.banker] == [1, 9]]
    assert len(pick) == 1
    assert pick[0].player[1][1] == F(6, 11)
    assert pick[0].banker[1][1] == F(179, 286)


def test_extreme_equilibria_a2():
    eqs = enumerate_extreme_equilibria(InfoModel.BANKER_COMPOSITION)
    assert len(eqs) == 70
    assert {e.player for e in eqs} == {((0, F(2, 11)), (8, F(9, 11)))}


def test_extreme_equilibria_totals_rejected():
    with pytest.raises(ValueError):
        enumerate_extreme_equilibria(InfoModel.TOTALS_ONLY)


def test_foster_heuristic():
    # standing only on (2,3) draws on 7/8 of total-5 hands, too often
    assert draw_weight(27) == 7
    # standing on (1,4) with probability 5/11 as well hits 9/11
    mix = F(5, 11) * draw_weight(19) / 8 + F(6, 11) * draw_weight(27) / 8
    assert mix == F(3, 4) + F(1, 8) * F(6, 11) == cf.A1_P
    moves = solved("A3").player_moves()
    assert moves["(1,4)"] == F(6, 11) and moves["(2,3)"] == 0
    assert sum(w * draw_weight(r) for r, w in solved("A3").player_mixture) / 8 == cf.A1_P


def test_shoe_and_info_parse_into_solver():
    sol = solve_model(Model(Shoe(6), InfoModel.TOTALS_ONLY))
    assert sol.value == cf.b1_v(6)
