"""Shared fixtures and independent oracles.

The oracles here deliberately avoid the library's solution paths: plain
interval bisection directly on the shape constant, quadrature for arc
length, and brute-force orbit enumeration for canonical forms.
"""

from __future__ import annotations

import math
import random

import numpy as np
import pytest

from knotfold.gauss import GaussCode, _relabel
from knotfold.grid import (
    GridDiagram,
    _closed_crossings,
    _diagram_from_perms,
    _row_cycle,
    open_diagram,
    trace_polyline,
)


def bisect_intrinsic(h: float, s: float, iters: int = 200) -> float:
    """Oracle for the sag equation: bisection directly on a.

    g(a) = cosh(s/a) - 1 - h/a decreases from +inf to 0- as a grows.
    """
    lo, hi = 1e-12, 1.0
    def g(a):
        arg = s / a
        if arg > 700.0:
            return math.inf
        return math.cosh(arg) - 1.0 - h / a
    while g(hi) > 0.0:
        hi *= 2.0
    while g(lo) <= 0.0:
        lo /= 2.0
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        if g(mid) > 0.0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def bisect_from_length(length: float, s: float, iters: int = 200) -> float:
    """Oracle for the known-length equation: bisection directly on a."""
    lo, hi = 1e-12, 1.0
    def g(a):
        arg = s / a
        if arg > 700.0:
            return math.inf
        return 2.0 * a * math.sinh(arg) - length
    while g(hi) > 0.0:
        hi *= 2.0
    while g(lo) <= 0.0:
        lo /= 2.0
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        if g(mid) > 0.0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def code_orbit(code: GaussCode) -> set:
    """Brute-force orbit: every rotation and direction, relabeled."""
    seq = code.entries
    out = set()
    for direction in (seq, seq[::-1]):
        for shift in range(max(len(seq), 1)):
            out.add(_relabel(direction[shift:] + direction[:shift]))
    return out


def random_diagram(
    rng: random.Random, n: int, require_eligible: bool = True, max_tries: int = 10_000
) -> GridDiagram:
    """Uniform-ish single-cycle grid diagram by rejection sampling."""
    for _ in range(max_tries):
        sigma = tuple(rng.sample(range(n), n))
        tau = tuple(rng.sample(range(n), n))
        if any(a == b for a, b in zip(sigma, tau)):
            continue
        if _row_cycle(sigma, tau) is None:
            continue
        if require_eligible:
            _, crossed_row, crossed_col = _closed_crossings(sigma, tau)
            ok = any(
                not crossed_row[k]
                and (not crossed_col[sigma[k]] or not crossed_col[tau[k]])
                for k in range(n)
            )
            if not ok:
                continue
        return _diagram_from_perms(sigma, tau)
    raise RuntimeError(f"no diagram found for n={n}")


@pytest.fixture(scope="session")
def overhand_code_text() -> str:
    return "1- 2+ 3- 1+ 2- 3+"


@pytest.fixture(scope="session")
def figure8_code_text() -> str:
    return "1- 2+ 3- 4+ 2- 1+ 4- 3+"


@pytest.fixture(scope="session")
def carrick_code_text() -> str:
    return "1+ 2- 3+ 4- 5+ 6- 2+ 7- 4+ 8- 6+ 1- 7+ 3- 8+ 5-"


@pytest.fixture(scope="session")
def overhand_plan():
    import knotfold as kf

    g, _ = kf.load_bundled("overhand")
    poly = trace_polyline(open_diagram(g), 1.0, 1.0)
    return kf.build_plan(poly, 1.34, z_p=None)


# A 6x6 diagram where every corner has a crossed incident segment, found by
# randomized search; open_diagram must refuse it.  For N <= 4 exhaustive
# enumeration shows every single-cycle diagram has an eligible corner.
NO_ELIGIBLE_CORNER_6 = GridDiagram.from_rows(
    [
        [0, -1, 0, 0, 1, 0],
        [0, 0, -1, 0, 0, 1],
        [0, 0, 0, 1, 0, -1],
        [1, 0, 0, 0, -1, 0],
        [-1, 0, 1, 0, 0, 0],
        [0, 1, 0, -1, 0, 0],
    ]
)
