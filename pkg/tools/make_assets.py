#!/usr/bin/env python3
"""Regenerate the bundled grid-diagram assets.

overhand (5x5) and figure8 (6x6) come from the exhaustive smallest-N
search.  The carrick mat (8 crossings) has grid number 10, far beyond
exhaustive reach, so it is constructed from its braid word (the closure
of (s1 s2^-1)^4 on three strands, the (3,4) Turk's head) and then shrunk
with topology-preserving grid moves (commutations of non-interleaved
adjacent rows/columns and destabilizations of 2x2 corner blocks).  The
final diagram is accepted only if its opened trace reproduces the target
Gauss code canonically.

Run from the repository root:  python3 tools/make_assets.py
"""

from __future__ import annotations

import json
import random
import sys
import time
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from knotfold.gauss import GaussCode, canonicalize, parse_gauss_code
from knotfold.grid import (
    GridDiagram,
    closed_gauss_code,
    grid_search,
    open_diagram,
    planar_gauss_code,
    trace_polyline,
    validate_grid,
)

OVERHAND = "1- 2+ 3- 1+ 2- 3+"
FIGURE8 = "1- 2+ 3- 4+ 2- 1+ 4- 3+"
CARRICK = "1+ 2- 3+ 4- 5+ 6- 2+ 7- 4+ 8- 6+ 1- 7+ 3- 8+ 5-"

ASSET_DIR = Path(__file__).resolve().parents[1] / "src" / "knotfold" / "assets"


# --- Braid word to rectangular diagram --------------------------------------

def braid_closure_grid(letters: list[tuple[int, int]], strands: int) -> GridDiagram:
    """Grid diagram of a braid closure.

    Strands run vertically; at each letter the under strand jogs
    horizontally below the over strand's column into a fresh column, so
    every crossing honours the vertical-over convention.  Closure arcs
    nest around the right side and cross nothing, giving exactly one
    crossing per letter.
    """
    m = len(letters)
    cols = [float(s) for s in range(strands)]      # current column per slot
    used = sorted(cols)
    run_start = {}                                  # strand id -> row of current run start
    col_of = {}                                     # strand id -> current column
    slots = list(range(strands))                    # strand id per slot (0-based)
    verticals: list[tuple[float, float, float]] = []    # (col, row_lo, row_hi)
    horizontals: list[tuple[float, float, float]] = []  # (row, col_a, col_b)
    for s in range(strands):
        sid = slots[s]
        col_of[sid] = cols[s]
        run_start[sid] = -(strands - s)             # bottom arc row of start slot

    def fresh_left_of(x: float) -> float:
        left = [c for c in used if c < x]
        new = (max(left) + x) / 2.0 if left else x - 1.0
        used.append(new)
        return new

    def fresh_right_of(x: float) -> float:
        right = [c for c in used if c > x]
        new = (x + min(right)) / 2.0 if right else x + 1.0
        used.append(new)
        return new

    for t, (i, sign) in enumerate(letters):
        row = float(t + 1)
        a_id, b_id = slots[i - 1], slots[i]
        x_a, x_b = col_of[a_id], col_of[b_id]
        if sign > 0:
            # slot i passes over slot i+1: the right strand jogs left underneath
            verticals.append((x_b, run_start[b_id], row))
            new_col = fresh_left_of(x_a)
            horizontals.append((row, x_b, new_col))
            col_of[b_id], run_start[b_id] = new_col, row
        else:
            # slot i passes under: the left strand jogs right underneath
            verticals.append((x_a, run_start[a_id], row))
            new_col = fresh_right_of(x_b)
            horizontals.append((row, x_a, new_col))
            col_of[a_id], run_start[a_id] = new_col, row
        slots[i - 1], slots[i] = b_id, a_id

    right_base = max(used) + 1.0
    for s in range(strands):                        # slot index, 0-based
        sid = slots[s]
        depth = strands - s                         # 1 = innermost (top slot)
        top = float(m + depth)
        bottom = float(-depth)
        ret = right_base + depth
        verticals.append((col_of[sid], run_start[sid], top))
        horizontals.append((top, col_of[sid], ret))
        verticals.append((ret, bottom, top))
        # closure joins positions: top of slot s wraps to the bottom of the
        # strand that STARTED at slot s (initial column s, same bottom row)
        horizontals.append((bottom, ret, float(s)))

    return _rectilinear_to_grid(verticals, horizontals)


def _rectilinear_to_grid(verticals, horizontals) -> GridDiagram:
    """Compress float coordinates to indices and assign marker signs.

    Signs follow orientation: traversing the cycle, a corner where a
    vertical ends and a horizontal starts gets +1, the reverse -1; that
    yields one of each per row and per column automatically.
    """
    col_index = {c: i for i, c in enumerate(sorted({v[0] for v in verticals}))}
    row_index = {r: i for i, r in enumerate(sorted({h[0] for h in horizontals}))}
    n = len(col_index)
    assert len(row_index) == n, "rectilinear curve is not square"

    v_ends: dict[tuple[int, int], list[tuple[str, int]]] = {}
    for vi, (c, r1, r2) in enumerate(verticals):
        for r in (r1, r2):
            v_ends.setdefault((row_index[r], col_index[c]), []).append(("v", vi))
    for hi, (r, c1, c2) in enumerate(horizontals):
        for c in (c1, c2):
            v_ends.setdefault((row_index[r], col_index[c]), []).append(("h", hi))
    for corner, incident in v_ends.items():
        kinds = sorted(kind for kind, _ in incident)
        assert kinds == ["h", "v"], f"corner {corner} incident to {incident}"

    # Walk the cycle corner to corner.
    corners = list(v_ends)
    seg_corners: dict[tuple[str, int], list[tuple[int, int]]] = {}
    for corner, incident in v_ends.items():
        for key in incident:
            seg_corners.setdefault(key, []).append(corner)
    cells = [[0] * n for _ in range(n)]
    start = corners[0]
    corner, via = start, v_ends[start][0]
    for _ in range(len(corners)):
        nxt = [c for c in seg_corners[via] if c != corner][0]
        # arriving at nxt along `via`; assign sign by the segment we leave on
        leave = [key for key in v_ends[nxt] if key != via][0]
        cells[nxt[0]][nxt[1]] = 1 if (via[0], leave[0]) == ("v", "h") else -1
        corner, via = nxt, leave
    assert corner == start
    g = GridDiagram.from_rows(cells)
    report = validate_grid(g)
    assert report.ok, report.problems
    return g


# --- Grid moves --------------------------------------------------------------

def destabilizations(g: GridDiagram) -> list[GridDiagram]:
    """All diagrams reachable by removing one 2x2 corner block."""
    out = []
    n = g.n
    cells = g.cells
    for r in range(n - 1):
        for c in range(n - 1):
            block = [(r, c), (r, c + 1), (r + 1, c), (r + 1, c + 1)]
            marked = [p for p in block if cells[p[0]][p[1]] != 0]
            if len(marked) != 3:
                continue
            empty = next(p for p in block if cells[p[0]][p[1]] == 0)
            corner = (r + 1 - (empty[0] - r), c + 1 - (empty[1] - c))
            sign = -cells[corner[0]][corner[1]]
            new = [list(row) for row in cells]
            for (pr, pc) in marked:
                new[pr][pc] = 0
            new[empty[0]][empty[1]] = sign
            del new[corner[0]]
            for row in new:
                del row[corner[1]]
            out.append(GridDiagram.from_rows(new))
    return out


def _interval(cells, axis: int, index: int) -> tuple[int, int]:
    if axis == 0:
        marks = [j for j, v in enumerate(cells[index]) if v != 0]
    else:
        marks = [k for k in range(len(cells)) if cells[k][index] != 0]
    return min(marks), max(marks)


def legal_commutations(g: GridDiagram) -> list[tuple[int, int]]:
    """Adjacent row/column swaps whose marker intervals do not interleave.

    Encoded as (axis, index): axis 0 swaps rows index/index+1, axis 1
    swaps columns.  Shared endpoints are conservatively rejected.
    """
    out = []
    n = g.n
    for axis in (0, 1):
        for i in range(n - 1):
            lo1, hi1 = _interval(g.cells, axis, i)
            lo2, hi2 = _interval(g.cells, axis, i + 1)
            disjoint = hi1 < lo2 or hi2 < lo1
            nested = (lo1 < lo2 and hi2 < hi1) or (lo2 < lo1 and hi1 < hi2)
            if disjoint or nested:
                out.append((axis, i))
    return out


def commute(g: GridDiagram, move: tuple[int, int]) -> GridDiagram:
    axis, i = move
    rows = [list(r) for r in g.cells]
    if axis == 0:
        rows[i], rows[i + 1] = rows[i + 1], rows[i]
    else:
        for row in rows:
            row[i], row[i + 1] = row[i + 1], row[i]
    return GridDiagram.from_rows(rows)


def crossing_count(g: GridDiagram) -> int:
    from knotfold.grid import _closed_crossings, _perms_of

    sigma, tau = _perms_of(g)
    return _closed_crossings(sigma, tau)[0]


def matches_target(g: GridDiagram, target: GaussCode) -> bool:
    try:
        code = closed_gauss_code(g)
    except ValueError:
        return False
    return canonicalize(code) == canonicalize(target)


def simplify(
    g: GridDiagram,
    target: GaussCode,
    target_n: int,
    target_crossings: int,
    seed: int = 0,
    rounds: int = 400,
) -> GridDiagram | None:
    """Random-restart greedy shrink to (target_n, target_crossings).

    Only provably topology-preserving moves are applied; the winner must
    additionally open and trace to the target code.
    """
    rng = random.Random(seed)
    best = None
    for _ in range(rounds):
        cur = g
        for _ in range(600):
            if cur.n == target_n and crossing_count(cur) == target_crossings:
                if matches_target(cur, target):
                    return cur
            if cur.n > target_n:
                destabs = destabilizations(cur)
                if destabs:
                    cur = rng.choice(destabs)
                    continue
            moves = legal_commutations(cur)
            if not moves:
                break
            cur = commute(cur, rng.choice(moves))
        if best is None or cur.n < best.n:
            best = cur
    return None


# --- Asset writing -----------------------------------------------------------

def write_asset(name: str, g: GridDiagram, provenance: str) -> None:
    ASSET_DIR.mkdir(parents=True, exist_ok=True)
    payload = {"n": g.n, "cells": [list(row) for row in g.cells], "provenance": provenance}
    path = ASSET_DIR / f"{name}.json"
    path.write_text(json.dumps(payload, indent=1) + "\n")
    print(f"wrote {path} ({g.n}x{g.n})")


def main() -> int:
    t0 = time.time()
    for name, code_text, n_max in (("overhand", OVERHAND, 5), ("figure8", FIGURE8, 6)):
        code = parse_gauss_code(code_text)
        g = grid_search(code, n_max)
        assert g is not None, f"{name} not found up to {n_max}"
        write_asset(
            name,
            g,
            f"Derived by exhaustive smallest-N grid search from Gauss code "
            f"'{code_text}' (column-over-row crossing convention); grid number {g.n}.",
        )

    target = parse_gauss_code(CARRICK)
    base = None
    for word_name, word in (
        ("(s1 s2^-1)^4", [(1, 1), (2, -1)] * 4),
        ("(s1^-1 s2)^4", [(1, -1), (2, 1)] * 4),
    ):
        g = braid_closure_grid(word, 3)
        print(f"braid {word_name}: {g.n}x{g.n}, {crossing_count(g)} crossings, "
              f"match={matches_target(g, target)}")
        if matches_target(g, target):
            base = (word_name, g)
            break
    assert base is not None, "neither braid orientation reproduces the carrick code"
    word_name, g = base
    small = simplify(g, target, target_n=10, target_crossings=8, seed=7)
    assert small is not None, "carrick simplification did not reach 10x10"
    og = open_diagram(small)
    poly = trace_polyline(og, 1.0, 1.0)
    assert canonicalize(planar_gauss_code(poly)) == canonicalize(target)
    write_asset(
        "carrick",
        small,
        f"Constructed from the closed 3-strand braid {word_name} (the (3,4) "
        f"Turk's head, carrick mat) and reduced to grid number 10 by verified "
        f"commutation/destabilization moves; opened trace matches Gauss code "
        f"'{CARRICK}'.",
    )
    print(f"done in {time.time() - t0:.1f}s")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
