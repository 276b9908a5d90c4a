"""Command-line front end.

Exit codes: 0 success, 2 usage error, 3 certificate failure.
"""

from __future__ import annotations

import csv
import io
import json
import os
import re
import sys
from fractions import Fraction

import click

from . import oracle
from .dominance import GRID_COLUMNS, grid
from .errors import CertificationError
from .game_core import (
    STAND,
    DecisionPoint,
    HandPair,
    InfoModel,
    Model,
    TotalPoint,
    parse_obs,
)
from .payoff import build_blocks
from .solver import (
    GameSolution,
    certify,
    enumerate_extreme_equilibria,
    solve_from_columns,
    solve_model,
)

MODELS = ("A1", "A2", "A3", "B1", "B2", "B3")
DEFAULT_MAX_DECKS = 200
EXIT_CERT = 3


def rat(x: Fraction | int) -> str:
    x = Fraction(x)
    return f"{x.numerator}/{x.denominator}"


def parse_rat(text: str) -> Fraction:
    if not re.fullmatch(r"-?\d+(/\d+)?", str(text)):
        raise ValueError(f"not a rational: {text!r}")
    return Fraction(text)


def point_label(pt) -> str:
    return str(pt)


def parse_point(text: str):
    parts = text.strip().strip("()").split(",")
    if len(parts) == 3:
        lo, hi = int(parts[0]), int(parts[1])
        return DecisionPoint(HandPair.of(lo, hi), parse_obs(parts[2]))
    if len(parts) == 2:
        return TotalPoint(int(parts[0]), parse_obs(parts[1]))
    raise ValueError(f"bad decision point {text!r}")


def describe_point(pt) -> str:
    where = "on Player stand" if pt.obs is STAND else f"on Player third card {pt.obs}"
    if isinstance(pt, TotalPoint):
        return f"total {pt.total} {where}"
    return f"{pt.banker_hand} {where}"


def _max_decks() -> int:
    raw = os.environ.get("BACCARA_MAX_DECKS")
    return int(raw) if raw else DEFAULT_MAX_DECKS


def resolve_model(model: str, decks: int | None, max_decks: int | None) -> Model:
    cap = max_decks if max_decks is not None else _max_decks()
    if model.startswith("A") and decks is not None:
        raise click.UsageError(f"model {model} is dealt with replacement and takes no --decks")
    if model.startswith("B"):
        if decks is None:
            raise click.UsageError(f"model {model} needs --decks")
        if decks > cap:
            raise click.UsageError(f"--decks {decks} exceeds the cap of {cap}")
    return Model.parse(model, decks)


def model_options(f):
    f = click.option("--max-decks", type=click.IntRange(min=1), default=None,
                     help="Upper bound on --decks (default: $BACCARA_MAX_DECKS or 200).")(f)
    f = click.option("--decks", type=click.IntRange(min=1), default=None,
                     help="Number of decks in the shoe (B models only).")(f)
    f = click.option("--model", type=click.Choice(MODELS, case_sensitive=False), required=True)(f)
    return f


format_option = click.option(
    "--format", "fmt", type=click.Choice(["json", "csv", "markdown"]), default="json", show_default=True
)


# -- rendering ----------------------------------------------------------------


def markdown_grid(rows, title: str | None = None) -> str:
    out = []
    if title:
        out += [f"### {title}", ""]
    out.append("| total | hand | " + " | ".join(GRID_COLUMNS) + " |")
    out.append("|" + "---|" * (len(GRID_COLUMNS) + 2))
    for total, hand, cells in rows:
        out.append(f"| {total} | {hand} | " + " | ".join(cells) + " |")
    return "\n".join(out) + "\n"


def csv_grid(rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["total", "hand", *GRID_COLUMNS])
    for total, hand, cells in rows:
        w.writerow([total, hand, *cells])
    return buf.getvalue()


def certificate_doc(cert) -> dict:
    return {
        "ok": cert.ok,
        "player_side_ok": cert.player_side_ok,
        "player_worst_margin": rat(cert.player_worst_margin),
        "banker_side_ok": cert.banker_side_ok,
        "banker_worst_margin": rat(cert.banker_worst_margin),
        "kernel_exact": cert.kernel_exact,
        "failing_columns": cert.failing_columns,
        "failing_rows": cert.failing_rows,
    }


def _move_text(pr: Fraction) -> str:
    return "D" if pr == 1 else "S" if pr == 0 else "(S,D)"


def solution_doc(sol: GameSolution) -> dict:
    composition = sol.model.info is not InfoModel.TOTALS_ONLY
    player = [
        ({"mask": r, "bits": format(r, "05b")} if composition else {"row": r, "draws_on_5": bool(r)})
        | {"weight": rat(w)}
        for r, w in sol.player_mixture
    ]
    moves = [
        {"hand": hand, "move": _move_text(pr), "draw_probability": rat(pr)}
        for hand, pr in sol.player_moves().items()
    ]
    probs = sol.banker_draw_probability()
    mixing = [describe_point(pt) for pt in sol.mixing_points]
    doc = {
        "model": sol.model.name,
        "decks": sol.model.decks,
        "p": rat(sol.p),
        "q": rat(sol.q),
        "value": rat(sol.value),
        "player": player,
        "player_moves": moves,
        "banker": {
            "forced_table": {point_label(pt): _move_text(pr) for pt, pr in probs.items()},
            "mixing_point": "; ".join(mixing),
            "mixing_points": [point_label(pt) for pt in sol.mixing_points],
            "q": rat(sol.q),
            "columns": [
                {
                    "bits": sol.column_label(c),
                    "decimal": c,
                    "weight": rat(w),
                    "draws": sorted(point_label(pt) for pt in sol.reduced.column_points(c)),
                }
                for c, w in sol.banker_mixture
            ],
        },
        "free_points": [point_label(pt) for pt in sol.free],
        "unique_claimed": sol.unique_claimed,
    }
    if sol.kernel is not None:
        doc["kernel"] = {
            "rows": [r for r, _ in sol.player_mixture],
            "columns": [sol.column_label(c) for c, _ in sol.banker_mixture],
            "matrix": [[rat(x) for x in row] for row in sol.kernel],
        }
    if sol.certificate is not None:
        doc["certificate"] = certificate_doc(sol.certificate)
    return doc


def solution_markdown(sol: GameSolution) -> str:
    probs = sol.banker_draw_probability()
    rows = grid(sol.table, cell=lambda pt: _move_text(probs[pt]))
    lines = [
        f"## Model {sol.model.name}" + (f", d = {sol.model.decks}" if sol.model.decks else ""),
        "",
        f"- value: {rat(sol.value)}",
        f"- p: {rat(sol.p)}",
        f"- q: {rat(sol.q)}",
        "- Banker mixing point: " + "; ".join(describe_point(pt) for pt in sol.mixing_points)
        + ", (S,D) with (1-q, q)",
        "",
        markdown_grid(rows, "Banker"),
        "### Player",
        "",
        "| hand | move |",
        "|---|---|",
    ]
    for hand, pr in sol.player_moves().items():
        text = _move_text(pr)
        if text == "(S,D)":
            text += f" with ({rat(1 - pr)}, {rat(pr)})"
        lines.append(f"| {hand} | {text} |")
    return "\n".join(lines) + "\n"


def solution_csv(sol: GameSolution) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["field", "value"])
    for key in ("p", "q", "value"):
        w.writerow([key, rat(getattr(sol, key))])
    for r, wt in sol.player_mixture:
        w.writerow([f"player_row_{r}", rat(wt)])
    for c, wt in sol.banker_mixture:
        w.writerow([f"banker_column_{sol.column_label(c)}", rat(wt)])
    probs = sol.banker_draw_probability()
    rows = grid(sol.table, cell=lambda pt: _move_text(probs[pt]))
    return buf.getvalue() + "\n" + csv_grid(rows)


def emit(doc, fmt: str, markdown: str | None = None, csv_text: str | None = None) -> None:
    if fmt == "json":
        click.echo(json.dumps(doc, indent=2))
    elif fmt == "markdown":
        click.echo(markdown, nl=False)
    else:
        click.echo(csv_text, nl=False)


# -- commands -----------------------------------------------------------------


@click.group()
def main() -> None:
    """Exact solutions of baccara chemin de fer under six deal/information models."""


@main.command()
@model_options
@format_option
def solve(model, decks, max_decks, fmt):
    """Solve a model and print the certified optimal strategies."""
    m = resolve_model(model.upper(), decks, max_decks)
    try:
        sol = solve_model(m)
    except CertificationError as exc:
        click.echo(f"certification failed: {exc}", err=True)
        sys.exit(EXIT_CERT)
    emit(solution_doc(sol), fmt, solution_markdown(sol), solution_csv(sol))


@main.command()
@model_options
@format_option
def classify(model, decks, max_decks, fmt):
    """Print the dominance grid (D, S, or * where Banker's move is contested)."""
    from .dominance import classify_model, contested_points

    m = resolve_model(model.upper(), decks, max_decks)
    table = classify_model(m)
    rows = grid(table)
    doc = {
        "model": m.name,
        "decks": m.decks,
        "n_contested": table.n_contested,
        "contested": [point_label(pt) for pt in contested_points(table)],
        "grid": [{"total": t, "hand": h, "cells": c} for t, h, c in rows],
    }
    title = f"Model {m.name}" + (f", d = {m.decks}" if m.decks else "")
    md = markdown_grid(rows, title) + f"\nn = {table.n_contested}\n"
    emit(doc, fmt, md, csv_grid(rows))


def _load_solution(path: str, m: Model, reduced):
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
        if doc["model"] != m.name or doc.get("decks") != m.decks:
            raise ValueError("solution file is for a different model")
        key = "row" if m.info is InfoModel.TOTALS_ONLY else "mask"
        player = [(int(e[key]), parse_rat(e["weight"])) for e in doc["player"]]
        banker = []
        for col in doc["banker"]["columns"]:
            draws = {parse_point(t) for t in col["draws"]}
            banker.append((draws, parse_rat(col["weight"])))
        value = parse_rat(doc["value"])
    except (OSError, KeyError, TypeError, ValueError, json.JSONDecodeError) as exc:
        raise click.UsageError(f"malformed solution file: {exc}") from exc
    return player, banker, value


@main.command()
@model_options
@format_option
@click.option("--solution", "solution_file", type=click.Path(dir_okay=False), default=None,
              help="JSON document written by 'solve'; default is the built-in solution.")
@click.option("--support-from", type=click.Choice(["B2"]), default=None,
              help="Restrict Banker to the kernel columns of this model before certifying.")
def verify(model, decks, max_decks, fmt, solution_file, support_from):
    """Certify a solution exactly; exit 3 if it is not a saddle point."""
    m = resolve_model(model.upper(), decks, max_decks)
    blocks = build_blocks(m)
    if support_from:
        if m.info is not InfoModel.FULL_COMPOSITION or m.decks is None:
            raise click.UsageError("--support-from applies to model B3")
        from .solver import b2_columns_under_b3

        sol = solve_from_columns(m, b2_columns_under_b3(m.decks))
    else:
        try:
            sol = solve_model(m)
        except CertificationError as exc:
            click.echo(f"certification failed: {exc}", err=True)
            sys.exit(EXIT_CERT)
    reduced = sol.reduced
    if solution_file:
        player, banker_sets, value = _load_solution(solution_file, m, reduced)
        forced = set(reduced.forced_draw)
        free = set(reduced.free)
        consistent = all(
            forced <= draws and draws <= forced | free for draws, _ in banker_sets
        )
        banker = [(reduced.column_of(draws), w) for draws, w in banker_sets]
    else:
        player, value = sol.player_mixture, sol.value
        banker = sol.banker_mixture
        banker_sets = [(reduced.column_points(c), w) for c, w in banker]
        consistent = True
    cert = certify(reduced, player, banker, value)
    saddle = consistent and oracle.saddle_check(blocks, player, banker_sets, value)
    ok = cert.ok and saddle and consistent
    doc = {
        "model": m.name,
        "decks": m.decks,
        "value": rat(value),
        "pass": ok,
        "forced_moves_consistent": consistent,
        "saddle_check": saddle,
        "certificate": certificate_doc(cert),
        "failing_column_bits": [reduced.bitstring(c) for c in cert.failing_columns],
    }
    md = "\n".join(
        [f"## Verification of {m.name}" + (f", d = {m.decks}" if m.decks else ""), ""]
        + [f"- {k}: {v}" for k, v in doc["certificate"].items()]
        + [f"- saddle_check: {saddle}", f"- pass: {ok}"]
    ) + "\n"
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["field", "value"])
    for k, v in doc["certificate"].items():
        w.writerow([k, v])
    w.writerow(["saddle_check", saddle])
    w.writerow(["pass", ok])
    emit(doc, fmt, md, buf.getvalue())
    if not ok:
        sys.exit(EXIT_CERT)


@main.command("enumerate")
@click.option("--model", type=click.Choice(["A2", "A3"], case_sensitive=False), required=True)
@format_option
def enumerate_cmd(model, fmt):
    """List the extreme optimal strategy pairs of a with-replacement composition model."""
    info = InfoModel(int(model[1]))
    eqs = enumerate_extreme_equilibria(info)
    players = sorted({e.player for e in eqs})
    bankers = sorted({e.banker for e in eqs})

    def mix(m) -> list:
        return [{"class": c, "weight": rat(w)} for c, w in m]

    doc = {
        "model": model.upper(),
        "count": len(eqs),
        "player_pairs": len(players),
        "banker_pairs": len(bankers),
        "value": rat(eqs[0].value),
        "equilibria": [{"player": mix(e.player), "banker": mix(e.banker)} for e in eqs],
    }
    md_lines = [
        f"## Extreme equilibria of {model.upper()}",
        "",
        f"- count: {len(eqs)}",
        f"- Player pairs (i, i') in eighths: {len(players)}",
        f"- Banker pairs (j, j') in sixteenths: {len(bankers)}",
        f"- value: {rat(eqs[0].value)}",
        "",
        "| i | i' | p | j | j' | q |",
        "|---|---|---|---|---|---|",
    ]
    for e in eqs:
        (i, _), (i2, p) = e.player
        (j, _), (j2, q) = e.banker
        md_lines.append(f"| {i} | {i2} | {rat(p)} | {j} | {j2} | {rat(q)} |")
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["i", "i2", "p", "j", "j2", "q"])
    for e in eqs:
        (i, _), (i2, p) = e.player
        (j, _), (j2, q) = e.banker
        w.writerow([i, i2, rat(p), j, j2, rat(q)])
    emit(doc, fmt, "\n".join(md_lines) + "\n", buf.getvalue())


@main.command()
@model_options
@format_option
@click.option("--mask", type=click.IntRange(0, 31), default=None,
              help="Player row (default: first row of the solution's support).")
@click.option("--table", "table_file", type=click.Path(exists=True, dir_okay=False), default=None,
              help="JSON list of points where Banker draws (default: first kernel column).")
@click.option("--trials", type=click.IntRange(min=1), default=1_000_000, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--workers", type=click.IntRange(min=1), default=1, show_default=True)
def simulate(model, decks, max_decks, fmt, mask, table_file, trials, seed, workers):
    """Monte Carlo estimate of one payoff entry, compared with its exact value."""
    m = resolve_model(model.upper(), decks, max_decks)
    if m.info is InfoModel.TOTALS_ONLY:
        raise click.UsageError("simulation takes a hand-level Player mask; use a Model 2 or 3")
    sol = None
    if mask is None or table_file is None:
        sol = solve_model(m)
    row = mask if mask is not None else sol.player_mixture[0][0]
    if table_file:
        try:
            with open(table_file, encoding="utf-8") as fh:
                raw = json.load(fh)
            if isinstance(raw, dict):
                raw = [k for k, v in raw["banker"]["forced_table"].items() if v == "D"]
            draws = {parse_point(t) for t in raw}
        except (KeyError, TypeError, ValueError, json.JSONDecodeError) as exc:
            raise click.UsageError(f"malformed table file: {exc}") from exc
    else:
        draws = sol.reduced.column_points(sol.banker_mixture[0][0])
    rep = oracle.simulate_payoff(row, draws, m.deal, trials, seed, workers=workers)
    doc = {
        "model": m.name,
        "decks": m.decks,
        "mask": row,
        "trials": rep.trials,
        "mean": rep.mean,
        "std_error": rep.std_error,
        "exact": rat(rep.exact) if rep.exact is not None else None,
        "z": rep.z,
        "natural_fraction": rep.natural_fraction,
        "rng": rep.rng,
        "seed": rep.seed,
    }
    md = "\n".join([f"## Simulation of {m.name}", ""] + [f"- {k}: {v}" for k, v in doc.items()]) + "\n"
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(list(doc))
    w.writerow(list(doc.values()))
    emit(doc, fmt, md, buf.getvalue())


if __name__ == "__main__":
    main()
