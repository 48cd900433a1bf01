"""N x N grid diagrams: validation, opening, polyline tracing, exhaustive search.

A grid diagram places exactly one +1 and one -1 marker in every row and
every column.  Joining the two markers of each row and of each column with
straight segments draws the knot; column segments always pass *over* row
segments (the standard grid convention, applied consistently everywhere).

Matrix cell (k, j) maps to the point (d*k, d*j, z_p), so row segments run
along the y axis and column segments along the x axis.  Indices are
0-based throughout.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import permutations
from typing import NamedTuple

from .gauss import GaussCode, OVER, UNDER, canonicalize


@dataclass(frozen=True)
class GridDiagram:
    """Square matrix with entries in {-1, 0, +1}."""

    cells: tuple[tuple[int, ...], ...]

    @property
    def n(self) -> int:
        return len(self.cells)

    @classmethod
    def from_rows(cls, rows) -> "GridDiagram":
        return cls(tuple(tuple(int(v) for v in row) for row in rows))

    def markers(self) -> list[tuple[int, int, int]]:
        """All nonzero cells as (row, col, value), row-major order."""
        return [
            (k, j, v)
            for k, row in enumerate(self.cells)
            for j, v in enumerate(row)
            if v != 0
        ]

    def to_json_dict(self) -> dict:
        return {"n": self.n, "cells": [list(row) for row in self.cells]}

    @classmethod
    def from_json_dict(cls, data: dict) -> "GridDiagram":
        g = cls.from_rows(data["cells"])
        if g.n != int(data.get("n", g.n)):
            raise ValueError("grid JSON: 'n' does not match the cell matrix size")
        return g


@dataclass(frozen=True)
class GridReport:
    """Validation outcome; problems are reported, never raised."""

    ok: bool
    problems: tuple[str, ...] = ()

    def __bool__(self) -> bool:
        return self.ok


def validate_grid(g: GridDiagram) -> GridReport:
    """Check the one +1 / one -1 per row and per column structure."""
    problems: list[str] = []
    n = g.n
    for k, row in enumerate(g.cells):
        if len(row) != n:
            problems.append(f"row {k}: length {len(row)} in a {n}x{n} grid")
    for k, row in enumerate(g.cells):
        for j, v in enumerate(row):
            if v not in (-1, 0, 1):
                problems.append(f"cell ({k}, {j}): entry {v} not in {{-1, 0, 1}}")
    if problems:
        return GridReport(False, tuple(problems))
    for k, row in enumerate(g.cells):
        plus, minus = row.count(1), row.count(-1)
        if (plus, minus) != (1, 1):
            problems.append(f"row {k}: found {plus} +1 and {minus} -1, expected one of each")
    for j in range(n):
        col = [g.cells[k][j] for k in range(n)]
        plus, minus = col.count(1), col.count(-1)
        if (plus, minus) != (1, 1):
            problems.append(f"column {j}: found {plus} +1 and {minus} -1, expected one of each")
    return GridReport(not problems, tuple(problems))


@dataclass(frozen=True)
class OpenGridDiagram:
    """A grid diagram with one corner zeroed so the knot becomes an open path."""

    base: GridDiagram
    removed: tuple[int, int]

    def cells(self) -> tuple[tuple[int, ...], ...]:
        k0, j0 = self.removed
        return tuple(
            tuple(0 if (k, j) == (k0, j0) else v for j, v in enumerate(row))
            for k, row in enumerate(self.base.cells)
        )


class Crossing(NamedTuple):
    """A transversal crossing between two legs of a traced polyline."""

    over: int                    # index of the column (x-parallel) leg
    under: int                   # index of the row (y-parallel) leg
    point: tuple[float, float]   # planar intersection


@dataclass(frozen=True)
class KnotPolyline:
    """Open rectilinear path through the grid corners, lifted to height z_p.

    ``closure_point`` is the removed corner's position; closing the path
    through it (rather than with a straight chord) follows the two
    crossing-free grid segments that the opening deleted.
    """

    points: tuple[tuple[float, float, float], ...]
    crossings: tuple[Crossing, ...]
    d: float
    z_p: float
    closure_point: tuple[float, float, float]

    @property
    def n(self) -> int:
        return len(self.points)

    def leg(self, i: int) -> tuple[tuple[float, float, float], tuple[float, float, float]]:
        return self.points[i], self.points[i + 1]

    @property
    def leg_count(self) -> int:
        return len(self.points) - 1

    def with_z(self, z_p: float) -> "KnotPolyline":
        """Same path re-projected onto another horizontal plane."""
        return KnotPolyline(
            points=tuple((x, y, z_p) for x, y, _ in self.points),
            crossings=self.crossings,
            d=self.d,
            z_p=z_p,
            closure_point=(self.closure_point[0], self.closure_point[1], z_p),
        )


# --- Internal combinatorics -------------------------------------------------
#
# A diagram is encoded by two permutations: sigma maps row -> column of its
# +1, tau maps row -> column of its -1.  The knot path alternates row edges
# (between the two markers of a row) and column edges (between the two
# markers of a column).


def _perms_of(g: GridDiagram) -> tuple[tuple[int, ...], tuple[int, ...]]:
    sigma = [0] * g.n
    tau = [0] * g.n
    for k, row in enumerate(g.cells):
        sigma[k] = row.index(1)
        tau[k] = row.index(-1)
    return tuple(sigma), tuple(tau)


def _row_cycle(sigma: tuple[int, ...], tau: tuple[int, ...]) -> list[int] | None:
    """Rows in traversal order if the diagram is a single loop, else None."""
    n = len(sigma)
    inv_sigma = [0] * n
    for k, j in enumerate(sigma):
        inv_sigma[j] = k
    order = [0]
    k = 0
    for _ in range(n - 1):
        k = inv_sigma[tau[k]]
        if k == 0:
            return None
        order.append(k)
    if inv_sigma[tau[k]] != 0:
        return None
    return order


def _closed_crossings(
    sigma: tuple[int, ...], tau: tuple[int, ...]
) -> tuple[int, list[bool], list[bool]]:
    """Count crossings of the closed diagram and flag crossed rows/columns.

    A column segment (column j, between rows inv_sigma[j] and inv_tau[j])
    crosses a row segment (row k, between columns sigma[k] and tau[k]) iff
    the crossing cell lies strictly inside both spans.
    """
    n = len(sigma)
    inv_sigma = [0] * n
    inv_tau = [0] * n
    for k in range(n):
        inv_sigma[sigma[k]] = k
        inv_tau[tau[k]] = k
    row_lo = [min(sigma[k], tau[k]) for k in range(n)]
    row_hi = [max(sigma[k], tau[k]) for k in range(n)]
    col_lo = [min(inv_sigma[j], inv_tau[j]) for j in range(n)]
    col_hi = [max(inv_sigma[j], inv_tau[j]) for j in range(n)]
    crossed_row = [False] * n
    crossed_col = [False] * n
    count = 0
    for j in range(n):
        lo, hi = col_lo[j], col_hi[j]
        for k in range(lo + 1, hi):
            if row_lo[k] < j < row_hi[k]:
                count += 1
                crossed_row[k] = True
                crossed_col[j] = True
    return count, crossed_row, crossed_col


def _corner_cycle(g: GridDiagram) -> list[tuple[int, int]] | None:
    """Corners (k, j) in closed traversal order, or None for a multi-loop."""
    sigma, tau = _perms_of(g)
    rows = _row_cycle(sigma, tau)
    if rows is None:
        return None
    cycle: list[tuple[int, int]] = []
    for k in rows:
        cycle.append((k, sigma[k]))
        cycle.append((k, tau[k]))
    # Consecutive pairs alternate row edges (same k) and column edges (same j);
    # the row list from _row_cycle already guarantees tau[k] shares its column
    # with the next row's +1 marker.
    return cycle


def open_diagram(g: GridDiagram) -> OpenGridDiagram:
    """Zero one corner whose two incident segments cross nothing.

    Among eligible corners the one with the smallest (row, column) index
    pair is chosen, so opening is deterministic.  Raises ValueError when
    the diagram is invalid, traces more than one loop, or has no eligible
    corner (the caller may commute rows/columns and retry).
    """
    report = validate_grid(g)
    if not report.ok:
        raise ValueError("invalid grid diagram: " + "; ".join(report.problems))
    sigma, tau = _perms_of(g)
    if _row_cycle(sigma, tau) is None:
        raise ValueError("grid diagram traces more than one loop")
    _, crossed_row, crossed_col = _closed_crossings(sigma, tau)
    eligible = [
        (k, j)
        for (k, j, _v) in g.markers()
        if not crossed_row[k] and not crossed_col[j]
    ]
    if not eligible:
        raise ValueError(
            "no corner with crossing-free incident segments; "
            "commute rows or columns and retry"
        )
    return OpenGridDiagram(g, min(eligible))


def trace_polyline(og: OpenGridDiagram, d: float, z_p: float) -> KnotPolyline:
    """Corners of the open path mapped to (d*k, d*j, z_p), start to end.

    The path starts at the removed corner's column partner, so the first
    leg runs along a row (the y axis).  Crossings list every transversal
    intersection of the open legs, column legs over row legs.
    """
    if d <= 0:
        raise ValueError(f"cell width d must be positive, got {d}")
    if z_p <= 0:
        raise ValueError(f"plane height z_p must be positive, got {z_p}")
    cycle = _corner_cycle(og.base)
    if cycle is None:
        raise ValueError("grid diagram traces more than one loop")
    if og.removed not in cycle:
        raise ValueError(f"removed corner {og.removed} is not a marker of the diagram")
    i0 = cycle.index(og.removed)
    path = cycle[i0 + 1 :] + cycle[:i0]
    k0, j0 = og.removed
    if path[0][1] != j0:
        path.reverse()
    if path[0][1] != j0 or path[-1][0] != k0:
        raise ValueError("open path endpoints do not flank the removed corner")

    n = len(path)
    if n != 2 * og.base.n - 1:
        raise ValueError("open path does not visit 2N-1 corners")
    points = tuple((d * k, d * j, z_p) for k, j in path)

    # Leg i joins corners i and i+1; classify by the varying index.
    col_legs: list[tuple[int, int, int, int]] = []  # (leg, j, k_lo, k_hi)
    row_legs: list[tuple[int, int, int, int]] = []  # (leg, k, j_lo, j_hi)
    for i in range(n - 1):
        (ka, ja), (kb, jb) = path[i], path[i + 1]
        if ka == kb and ja != jb:
            row_legs.append((i, ka, min(ja, jb), max(ja, jb)))
        elif ja == jb and ka != kb:
            col_legs.append((i, ja, min(ka, kb), max(ka, kb)))
        else:
            raise ValueError(f"legs {i} and {i+1} do not share a row or column")

    crossings = []
    for ci, j, k_lo, k_hi in col_legs:
        for ri, k, j_lo, j_hi in row_legs:
            if k_lo < k < k_hi and j_lo < j < j_hi:
                crossings.append(Crossing(over=ci, under=ri, point=(d * k, d * j)))
    crossings.sort(key=lambda c: (c.over, c.under))

    return KnotPolyline(
        points=points,
        crossings=tuple(crossings),
        d=d,
        z_p=z_p,
        closure_point=(d * k0, d * j0, z_p),
    )


def planar_gauss_code(poly: KnotPolyline) -> GaussCode:
    """Gauss code read from the traced polyline's own crossing list.

    The path is virtually closed through the removed corner; the closing
    segments are crossing-free by construction, so traversing the open
    legs in order yields the full code.  Labels follow first encounter.
    """
    events: list[tuple[int, float, int, int]] = []  # (leg, param, crossing id, sign)
    for cid, crossing in enumerate(poly.crossings):
        for leg, sign in ((crossing.over, OVER), (crossing.under, UNDER)):
            (ax, ay, _), (bx, by, _) = poly.leg(leg)
            px, py = crossing.point
            length_sq = (bx - ax) ** 2 + (by - ay) ** 2
            param = ((px - ax) * (bx - ax) + (py - ay) * (by - ay)) / length_sq
            if not 0.0 < param < 1.0:
                raise ValueError(
                    f"crossing {cid} is tangential to leg {leg} (parameter {param})"
                )
            events.append((leg, param, cid, sign))
    events.sort(key=lambda e: (e[0], e[1]))
    labels: dict[int, int] = {}
    entries = []
    for _leg, _param, cid, sign in events:
        if cid not in labels:
            labels[cid] = len(labels) + 1
        entries.append((labels[cid], sign))
    return GaussCode(tuple(entries))


def closed_gauss_code(g: GridDiagram) -> GaussCode:
    """Gauss code of the closed diagram (diagnostics and asset generation)."""
    og = open_diagram(g)
    return planar_gauss_code(trace_polyline(og, 1.0, 1.0))


def grid_search(code: GaussCode, n_max: int) -> GridDiagram | None:
    """Smallest grid diagram whose opened trace matches ``code`` canonically.

    Exhaustive enumeration over marker permutations, smallest N first and
    lexicographic (sigma, tau) order within each N, so the result is
    deterministic.  Diagrams that trace multiple loops, have the wrong
    crossing count, or cannot be opened are skipped.  Returns None when no
    diagram of size <= n_max matches.
    """
    if n_max > 7:
        raise ValueError("grid_search supports n_max <= 7 (search space is (N!)^2)")
    target = canonicalize(code)
    target_crossings = code.crossing_count
    for n in range(2, n_max + 1):
        found = _search_size(n, target, target_crossings)
        if found is not None:
            return found
    return None


def _search_size(
    n: int, target: GaussCode, target_crossings: int
) -> GridDiagram | None:
    indices = range(n)
    for sigma in permutations(indices):
        inv_sigma = [0] * n
        for k, j in enumerate(sigma):
            inv_sigma[j] = k
        for tau in permutations(indices):
            ok = True
            for k in range(n):
                if sigma[k] == tau[k]:
                    ok = False
                    break
            if not ok:
                continue
            # Single-loop test: following the cable maps row k to the row
            # holding the +1 of the column that holds row k's -1.
            k = 0
            for step in range(n - 1):
                k = inv_sigma[tau[k]]
                if k == 0:
                    ok = False
                    break
            if not ok or inv_sigma[tau[k]] != 0:
                continue
            count, crossed_row, crossed_col = _closed_crossings(sigma, tau)
            if count != target_crossings:
                continue
            eligible = False
            for k in range(n):
                if not crossed_row[k] and (
                    not crossed_col[sigma[k]] or not crossed_col[tau[k]]
                ):
                    eligible = True
                    break
            if not eligible:
                continue
            g = _diagram_from_perms(sigma, tau)
            poly = trace_polyline(open_diagram(g), 1.0, 1.0)
            if canonicalize(planar_gauss_code(poly)) == target:
                return g
    return None


def _diagram_from_perms(sigma, tau) -> GridDiagram:
    n = len(sigma)
    rows = []
    for k in range(n):
        row = [0] * n
        row[sigma[k]] = 1
        row[tau[k]] = -1
        rows.append(tuple(row))
    return GridDiagram(tuple(rows))
