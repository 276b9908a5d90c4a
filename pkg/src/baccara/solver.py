"""Per-model solution engine with exact optimality certificates."""

from __future__ import annotations

import itertools
import math
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Hashable, Sequence

from . import closed_form as cf
from .dominance import ClassificationTable, ReducedGame, classify, reduce_game
from .envelope import TwoRowGame, solve as envelope_solve, solve_kernel_2x2
from .errors import CertificationError, SaddleError
from .game_core import STAND, DecisionPoint, HandPair, InfoModel, Model, Shoe, WithReplacement
from .payoff import PayoffBlocks, build_blocks

log = logging.getLogger(__name__)

B3_ROWS = (19, 27)
MAX_REPAIR_ROUNDS = 8
_FAILURE_LIMIT = 4096


@dataclass
class CertificateReport:
    player_side_ok: bool
    player_worst_margin: Fraction
    banker_side_ok: bool
    banker_worst_margin: Fraction
    kernel_exact: bool
    failing_columns: list[int] = field(default_factory=list)
    failing_rows: list[int] = field(default_factory=list)
    truncated: bool = False

    @property
    def ok(self) -> bool:
        return self.player_side_ok and self.banker_side_ok and self.kernel_exact


@dataclass
class GameSolution:
    model: Model
    player_mixture: list[tuple[int, Fraction]]
    banker_mixture: list[tuple[int, Fraction]]
    value: Fraction
    p: Fraction
    q: Fraction
    mixing_points: tuple
    kernel: tuple | None
    reduced: ReducedGame
    table: ClassificationTable
    certificate: CertificateReport | None = None
    unique_claimed: bool = False
    # behavioural override for points split beyond the two kernel columns
    extra_mix: dict = field(default_factory=dict)

    @property
    def free(self) -> tuple:
        return self.reduced.free

    def column_label(self, column: int) -> str:
        return self.reduced.bitstring(column)

    def banker_draw_probability(self) -> dict[Hashable, Fraction]:
        """Overall draw probability at every decision point."""
        probs: dict[Hashable, Fraction] = {}
        for pt in self.table.marks:
            probs[pt] = Fraction(0)
        for col, w in self.banker_mixture:
            for pt in self.reduced.column_points(col):
                probs[pt] += w
        probs.update(self.extra_mix)
        return probs

    def banker_moves(self) -> dict[Hashable, str]:
        """'D', 'S' or 'M' (mixed) per decision point."""
        out = {}
        for pt, pr in self.banker_draw_probability().items():
            out[pt] = "D" if pr == 1 else "S" if pr == 0 else "M"
        return out

    def player_moves(self) -> dict[str, str | Fraction]:
        """Draw probability on each total-5 hand (or on total 5 for totals-only)."""
        from .game_core import FREE_HANDS

        if self.model.info is InfoModel.TOTALS_ONLY:
            return {"5": sum((w for r, w in self.player_mixture if r == 1), Fraction(0))}
        out = {}
        for pos, hand in enumerate(FREE_HANDS):
            out[str(hand)] = sum(
                (w for r, w in self.player_mixture if (r >> (4 - pos)) & 1), Fraction(0)
            )
        return out


# -- certification ------------------------------------------------------------


def _mixture_costs(reduced: ReducedGame, mixture: Sequence[tuple[int, Fraction]]):
    const = sum((w * reduced.const[r] for r, w in mixture), Fraction(0))
    c0 = [sum((w * reduced.e0[r][j] for r, w in mixture), Fraction(0)) for j in range(reduced.n)]
    c1 = [sum((w * reduced.e1[r][j] for r, w in mixture), Fraction(0)) for j in range(reduced.n)]
    return const, c0, c1


def player_margins(reduced: ReducedGame, mixture, value: Fraction) -> list[Fraction]:
    """Margin of the Player mixture against every reduced column (small n only)."""
    if reduced.n > 16:
        raise ValueError("too many columns to list")
    return [
        sum((w * reduced.entry(r, col) for r, w in mixture), Fraction(0)) - value
        for col in range(1 << reduced.n)
    ]


def _columns_below(base: Fraction, deltas: list[Fraction], limit: int) -> tuple[list[int], bool]:
    """Column indices whose payoff base + sum(deltas over drawn points) is < 0."""
    n = len(deltas)
    order = sorted(range(n), key=lambda j: -abs(deltas[j]))
    suffix_min = [Fraction(0)] * (n + 1)
    for pos in range(n - 1, -1, -1):
        suffix_min[pos] = suffix_min[pos + 1] + min(Fraction(0), deltas[order[pos]])
    found: list[int] = []
    truncated = False

    def walk(pos: int, acc: Fraction, col: int) -> None:
        nonlocal truncated
        if truncated or acc + suffix_min[pos] >= 0:
            return
        if pos == n:
            if len(found) >= limit:
                truncated = True
                return
            found.append(col)
            return
        j = order[pos]
        walk(pos + 1, acc, col)
        walk(pos + 1, acc + deltas[j], col | (1 << (n - 1 - j)))

    walk(0, base, 0)
    return sorted(found), truncated


def certify(
    reduced: ReducedGame,
    player_mixture: Sequence[tuple[int, Fraction]],
    banker_mixture: Sequence[tuple[int, Fraction]],
    value: Fraction,
    extra_mix: dict | None = None,
) -> CertificateReport:
    """Exact saddle-point check of a strategy pair in the reduced game.

    Player side: the Player mixture earns at least ``value`` against every
    Banker column (minimised point by point, never enumerating columns).
    Banker side: the Banker mixture concedes at most ``value`` to every row.
    Forced points need no check: their moves are best against every row.
    """
    const, c0, c1 = _mixture_costs(reduced, player_mixture)
    worst = const + sum((min(a, b) for a, b in zip(c0, c1)), Fraction(0)) - value
    failing_cols: list[int] = []
    truncated = False
    if worst < 0:
        base = const + sum(c0, Fraction(0)) - value
        deltas = [b - a for a, b in zip(c0, c1)]
        failing_cols, truncated = _columns_below(base, deltas, _FAILURE_LIMIT)

    def row_payoff(r: int) -> Fraction:
        if extra_mix:
            return _row_payoff_behavioural(reduced, r, banker_mixture, extra_mix)
        return sum((w * reduced.entry(r, col) for col, w in banker_mixture), Fraction(0))

    margins = {r: row_payoff(r) - value for r in reduced.rows}
    banker_worst = max(margins.values())
    failing_rows = [r for r, m in margins.items() if m > 0]

    kernel_exact = all(margins[r] == 0 for r, w in player_mixture if w > 0)
    if not extra_mix:
        for col, w in banker_mixture:
            if w > 0:
                pay = sum((pw * reduced.entry(r, col) for r, pw in player_mixture), Fraction(0))
                kernel_exact &= pay == value
    return CertificateReport(
        player_side_ok=worst >= 0,
        player_worst_margin=worst,
        banker_side_ok=banker_worst <= 0,
        banker_worst_margin=banker_worst,
        kernel_exact=kernel_exact,
        failing_columns=failing_cols,
        failing_rows=failing_rows,
        truncated=truncated,
    )


def _row_payoff_behavioural(reduced: ReducedGame, r: int, banker_mixture, extra_mix) -> Fraction:
    # Draw probability per free point; extra_mix overrides whole points.
    probs = [Fraction(0)] * reduced.n
    for col, w in banker_mixture:
        for j in range(reduced.n):
            if (col >> (reduced.n - 1 - j)) & 1:
                probs[j] += w
    for j, pt in enumerate(reduced.free):
        if pt in extra_mix:
            probs[j] = extra_mix[pt]
    total = reduced.const[r]
    for j in range(reduced.n):
        total += (1 - probs[j]) * reduced.e0[r][j] + probs[j] * reduced.e1[r][j]
    return total


def certify_solution(sol: GameSolution) -> CertificateReport:
    return certify(sol.reduced, sol.player_mixture, sol.banker_mixture, sol.value, sol.extra_mix)


# -- solution routes ----------------------------------------------------------


def _prepare(model: Model) -> tuple[PayoffBlocks, ClassificationTable, ReducedGame]:
    blocks = build_blocks(model)
    table = classify(blocks)
    return blocks, table, reduce_game(blocks, table)


def _from_envelope(model, table, reduced, rows: tuple[int, int]) -> GameSolution:
    game = TwoRowGame.from_reduced(reduced, *rows)
    env = envelope_solve(game)
    if env.kernel is None:
        raise CertificationError(f"envelope maximum is not an interior kernel for rows {rows}")
    without, with_l = env.kernel_columns
    col_a, col_b = reduced.column_of(set(without)), reduced.column_of(set(with_l))
    p, q = env.p_star, env.q_star
    return GameSolution(
        model=model,
        player_mixture=[(rows[0], 1 - p), (rows[1], p)],
        banker_mixture=[(col_a, 1 - q), (col_b, q)],
        value=env.value,
        p=p,
        q=q,
        mixing_points=env.l_star,
        kernel=env.kernel,
        reduced=reduced,
        table=table,
        unique_claimed=env.unique and model.info is not InfoModel.FULL_COMPOSITION,
    )


def solve_mx2(payoffs: dict[int, tuple[Fraction, Fraction]]):
    """Exact solution of a rows x 2 game: Banker mixes (1 - q, q) over the two columns.

    Returns (q, value, player mixture).
    """
    rows = list(payoffs)

    def upper(q: Fraction) -> Fraction:
        return max((1 - q) * a + q * b for a, b in payoffs.values())

    qs = {Fraction(0), Fraction(1)}
    for r, s in itertools.combinations(rows, 2):
        (a, b), (c, d) = payoffs[r], payoffs[s]
        den = (b - a) - (d - c)
        if den != 0:
            q = (c - a) / den
            if 0 < q < 1:
                qs.add(q)
    q_star = min(sorted(qs), key=upper)
    v = upper(q_star)
    active = [r for r in rows if (1 - q_star) * payoffs[r][0] + q_star * payoffs[r][1] == v]
    if q_star in (0, 1):
        return q_star, v, [(active[0], Fraction(1))]
    up = [r for r in active if payoffs[r][1] > payoffs[r][0]]
    down = [r for r in active if payoffs[r][1] < payoffs[r][0]]
    for r, s in itertools.product(down, up):
        try:
            p, _, _ = solve_kernel_2x2((payoffs[r], payoffs[s]))
        except SaddleError:
            continue
        return q_star, v, [(r, 1 - p), (s, p)]
    raise CertificationError("no mixed kernel at the minimiser")


def solve_from_columns(model: Model, columns: tuple[int, int],
                       reduced: ReducedGame | None = None,
                       table: ClassificationTable | None = None) -> GameSolution:
    """Restrict Banker to two reduced columns, solve, and certify in the full game."""
    if reduced is None:
        _, table, reduced = _prepare(model)
    pay = {r: (reduced.entry(r, columns[0]), reduced.entry(r, columns[1])) for r in reduced.rows}
    q, v, mixture = solve_mx2(pay)
    mixture.sort()
    rows = [r for r, _ in mixture]
    p = mixture[1][1] if len(mixture) == 2 else Fraction(1)
    kernel = tuple((pay[r][0], pay[r][1]) for r in rows) if len(rows) == 2 else None
    diff = columns[0] ^ columns[1]
    mixing = tuple(pt for j, pt in enumerate(reduced.free) if (diff >> (reduced.n - 1 - j)) & 1)
    sol = GameSolution(model, mixture, [(columns[0], 1 - q), (columns[1], q)], v, p, q,
                       mixing, kernel, reduced, table)
    sol.certificate = certify_solution(sol)
    return sol


def repair(model: Model, first: GameSolution, rounds: int = MAX_REPAIR_ROUNDS) -> GameSolution:
    """Re-solve from the columns (or rows) at which a certificate failed."""
    sol = first
    tried: set[tuple[int, int]] = set()
    for round_no in range(rounds):
        cert = sol.certificate
        if cert.ok:
            return sol
        log.info("repair round %d: %d failing columns, %d failing rows", round_no,
                 len(cert.failing_columns), len(cert.failing_rows))
        candidates: list[GameSolution] = []
        if cert.failing_columns and not cert.truncated:
            pool = cert.failing_columns
            for pair in itertools.combinations(pool, 2):
                if pair in tried:
                    continue
                tried.add(pair)
                try:
                    candidates.append(solve_from_columns(model, pair, sol.reduced, sol.table))
                except CertificationError:
                    continue
        elif cert.failing_rows:
            worst = max(cert.failing_rows, key=lambda r: _row_payoff_behavioural(
                sol.reduced, r, sol.banker_mixture, sol.extra_mix))
            for keep, _ in sol.player_mixture:
                rows = tuple(sorted((keep, worst)))
                try:
                    cand = _from_envelope(model, sol.table, sol.reduced, rows)
                except CertificationError:
                    continue
                cand.certificate = certify_solution(cand)
                candidates.append(cand)
        if not candidates:
            break
        passing = [c for c in candidates if c.certificate.ok]
        if passing:
            return passing[0]
        sol = max(candidates, key=lambda c: c.certificate.player_worst_margin)
    raise CertificationError(f"no certified solution for {model}",
                             sol.certificate.failing_columns or sol.certificate.failing_rows)


def _canonical_a(model: Model, table, reduced) -> GameSolution:
    """The singled-out with-replacement solution for the composition models."""
    env_rows = (0, 31)
    base = _from_envelope(Model(model.deal, InfoModel.BANKER_COMPOSITION), table,
                          _reduce_rows(reduced, env_rows), env_rows) \
        if model.info is InfoModel.FULL_COMPOSITION else _from_envelope(model, table, reduced, env_rows)
    drawn = set(reduced.column_points(base.banker_mixture[0][0])) - set(reduced.forced_draw)
    six_stand = [pt for pt in reduced.free if pt.total == 6 and pt.obs is STAND]
    drawn -= set(six_stand)
    drawn.add(DecisionPoint(HandPair(8, 8), STAND))
    mix_pt = DecisionPoint(HandPair(0, 6), STAND)
    col_s = reduced.column_of(drawn)
    col_d = reduced.column_of(drawn | {mix_pt})
    q = cf.A3_Q
    if model.info is InfoModel.FULL_COMPOSITION:
        player = [(19, 1 - cf.A3_P), (27, cf.A3_P)]
        p = cf.A3_P
    else:
        player = [(0, 1 - base.p), (31, base.p)]
        p = base.p
    kernel = tuple(
        (reduced.entry(r, col_s), reduced.entry(r, col_d)) for r, _ in player
    )
    return GameSolution(model, player, [(col_s, 1 - q), (col_d, q)], base.value, p, q,
                        (mix_pt,), kernel, reduced, table, unique_claimed=False)


def _reduce_rows(reduced: ReducedGame, rows) -> ReducedGame:
    return ReducedGame(reduced.model, tuple(rows), reduced.free, reduced.forced_draw,
                       {r: reduced.const[r] for r in rows}, {r: reduced.e0[r] for r in rows},
                       {r: reduced.e1[r] for r in rows})


def solve_model(model: Model, max_rounds: int = MAX_REPAIR_ROUNDS) -> GameSolution:
    """Solve one of the six models and attach a passing certificate."""
    _, table, reduced = _prepare(model)
    if isinstance(model.deal, WithReplacement) and model.info is not InfoModel.TOTALS_ONLY:
        sol = _canonical_a(model, table, reduced)
    elif model.info is InfoModel.TOTALS_ONLY:
        sol = _from_envelope(model, table, reduced, (0, 1))
    elif model.info is InfoModel.BANKER_COMPOSITION:
        sol = _from_envelope(model, table, reduced, (0, 31))
    else:
        sol = _from_envelope(model, table, reduced, B3_ROWS)
    sol.certificate = certify_solution(sol)
    if not sol.certificate.ok:
        sol = repair(model, sol, max_rounds)
    return sol


def b2_columns_under_b3(d: int) -> tuple[int, int]:
    """Column indices, in the B3 reduced game, of the B2 kernel's two Banker strategies."""
    b2 = solve_model(Model(Shoe(d), InfoModel.BANKER_COMPOSITION))
    _, _, reduced3 = _prepare(Model(Shoe(d), InfoModel.FULL_COMPOSITION))
    if reduced3.free != b2.reduced.free:
        raise CertificationError("B2 and B3 contested sets differ")
    return tuple(col for col, _ in b2.banker_mixture)


def solve_b3_from_b2_columns(d: int, max_rounds: int = MAX_REPAIR_ROUNDS) -> tuple[GameSolution, GameSolution]:
    """Start B3 from the B2 kernel columns; returns (first attempt, repaired solution)."""
    model = Model(Shoe(d), InfoModel.FULL_COMPOSITION)
    first = solve_from_columns(model, b2_columns_under_b3(d))
    if first.certificate.ok:
        return first, first
    return first, repair(model, first, max_rounds)


def closed_form_solution(model: Model) -> dict:
    return cf.closed_form(model.name, model.decks)


# -- with-replacement structure (duplicate rows/columns, extreme equilibria) --

# Hand frequencies within a Banker total when cards are drawn with replacement.
_GROUPS = (
    (3, 9),       # total 3, Player's third card 9
    (4, 1),       # total 4, third card 1
    (5, 4),       # total 5, third card 4
    (6, STAND),   # total 6, Player stood
)
# Banker moves at the A1 optimum on the first three groups (fractions of the group)
_A1_GROUP_DRAW = {(3, 9): 1, (4, 1): 0, (5, 4): 1}


def _hand_weight(hand: HandPair) -> int:
    # ordered-pair multiplicity with 10-valued cards weighted 4
    c = [4] + [1] * 9
    return c[hand.lo] * c[hand.hi] * (1 if hand.lo == hand.hi else 2)


@dataclass
class DedupStructure:
    row_classes: dict[int, list[int]]          # draw weight (eighths) -> masks
    column_groups: dict[tuple, list[tuple]]     # group -> [(point, weight)]
    group_levels: dict[tuple, list[int]]        # group -> attainable weight sums
    reduced: ReducedGame

    @property
    def n_row_classes(self) -> int:
        return len(self.row_classes)

    @property
    def n_column_classes(self) -> int:
        n = 1
        for levels in self.group_levels.values():
            n *= len(levels)
        return n


def dedup_structure_A3() -> DedupStructure:
    """Duplicate-row and duplicate-column structure of the with-replacement Model 3 game."""
    from .game_core import draw_weight

    model = Model(WithReplacement(), InfoModel.FULL_COMPOSITION)
    _, _, reduced = _prepare(model)
    classes: dict[int, list[int]] = {}
    for r in reduced.rows:
        classes.setdefault(draw_weight(r), []).append(r)
    for members in classes.values():
        head = members[0]
        for r in members[1:]:
            if (reduced.const[r], reduced.e0[r], reduced.e1[r]) != (
                reduced.const[head], reduced.e0[head], reduced.e1[head]
            ):
                raise CertificationError(f"rows {head} and {r} share a draw weight but differ")

    groups: dict[tuple, list[tuple]] = {g: [] for g in _GROUPS}
    for j, pt in enumerate(reduced.free):
        key = (pt.total, pt.obs)
        if key not in groups:
            raise CertificationError(f"unexpected contested point {pt}")
        groups[key].append((j, pt, _hand_weight(pt.banker_hand)))
    for key, members in groups.items():
        # Within a group every point's Draw-Stand effect is proportional to its weight.
        for r in reduced.rows:
            unit = None
            for j, pt, w in members:
                ratio = (reduced.e1[r][j] - reduced.e0[r][j]) / w
                if unit is None:
                    unit = ratio
                elif ratio != unit:
                    raise CertificationError(f"group {key} is not weight-proportional at row {r}")
    for key, members in groups.items():
        g = math.gcd(*(w for _, _, w in members))
        groups[key] = [(j, pt, w // g) for j, pt, w in members]
    levels = {}
    for key, members in groups.items():
        sums = {0}
        for _, _, w in members:
            sums |= {s + w for s in sums}
        levels[key] = sorted(sums)
    return DedupStructure(
        classes,
        {k: [(pt, w) for _, pt, w in m] for k, m in groups.items()},
        levels,
        reduced,
    )


@dataclass
class ExtremeEquilibrium:
    player: tuple[tuple[int, Fraction], ...]   # (draw weight in eighths, prob)
    banker: tuple[tuple[int, Fraction], ...]   # (total-6 draw weight in sixteenths, prob)
    value: Fraction


def _compressed_game(structure: DedupStructure):
    """The 9 x 17 game: row i draws on i/8 of total-5 hands, column j on j/16 of (6, stand)."""
    reduced = structure.reduced
    reps = {i: members[0] for i, members in structure.row_classes.items()}
    six = structure.column_groups[(6, STAND)]
    subsets: dict[int, set] = {}
    for size in range(len(six) + 1):
        for combo in itertools.combinations(six, size):
            subsets.setdefault(sum(w for _, w in combo), {pt for pt, _ in combo})
    base = set()
    for key, frac in _A1_GROUP_DRAW.items():
        if frac:
            base |= {pt for pt, _ in structure.column_groups[key]}
    cols = {j: reduced.column_of(base | subsets[j]) for j in sorted(subsets)}
    return {i: {j: reduced.entry(r, c) for j, c in cols.items()} for i, r in reps.items()}


def _two_point_mixtures(levels, scale: int, target: Fraction):
    out = []
    for lo in levels:
        for hi in levels:
            if Fraction(lo, scale) < target < Fraction(hi, scale):
                w = (target - Fraction(lo, scale)) / (Fraction(hi - lo, scale))
                out.append(((lo, 1 - w), (hi, w)))
    return out


def enumerate_extreme_equilibria(info: InfoModel) -> list[ExtremeEquilibrium]:
    """Extreme optimal strategy pairs of the with-replacement Model 2 or 3 game.

    Every pair is checked exactly against all rows and columns of the
    compressed game before it is returned.
    """
    info = InfoModel(info)
    if info is InfoModel.TOTALS_ONLY:
        raise ValueError("extreme-point enumeration covers composition models only")
    structure = dedup_structure_A3()
    game = _compressed_game(structure)
    if info is InfoModel.BANKER_COMPOSITION:
        game = {i: row for i, row in game.items() if i in (0, 8)}
    players = _two_point_mixtures(sorted(game), 8, cf.A1_P)
    bankers = _two_point_mixtures(sorted(next(iter(game.values()))), 16, cf.A1_Q)
    v = cf.A1_V
    for pm in players:
        if any(sum(w * game[i][j] for i, w in pm) < v for j in next(iter(game.values()))):
            raise CertificationError(f"Player mixture {pm} is not optimal")
    for bm in bankers:
        if any(sum(w * game[i][j] for j, w in bm) > v for i in game):
            raise CertificationError(f"Banker mixture {bm} is not optimal")
    return [ExtremeEquilibrium(pm, bm, v) for pm in players for bm in bankers]


@dataclass
class TransplantedKernel:
    """A kernel's two Banker move tables re-solved on a different deck count."""

    p: Fraction
    q: Fraction
    value: Fraction
    margins: list[Fraction]       # Player margin against each donor column
    donor: ReducedGame


def transplant_kernel(donor: GameSolution, target: Model) -> TransplantedKernel:
    """Apply ``donor``'s Banker kernel tables to ``target`` and recheck optimality.

    The two move tables are kept verbatim, including forced points, and the
    2x2 kernel is re-solved from the target payoffs.  Margins are listed over
    the donor's own column indexing.
    """
    blocks = build_blocks(target)
    rows = [r for r, _ in donor.player_mixture]
    tables = [donor.reduced.column_points(c) for c, _ in donor.banker_mixture]
    kernel = tuple((blocks.entry(r, tables[0]), blocks.entry(r, tables[1])) for r in rows)
    p, q, v = solve_kernel_2x2(kernel)
    mix = [(rows[0], 1 - p), (rows[1], p)]
    margins = [
        sum((w * blocks.entry(r, donor.reduced.column_points(col)) for r, w in mix), Fraction(0)) - v
        for col in range(1 << donor.reduced.n)
    ]
    return TransplantedKernel(p, q, v, margins, donor.reduced)
