"""Assemble the full multi-catenary knot representation.

Sag heights come from crossing roles (an under-segment hangs deeper so the
over-segment clears it), the curve is composed from per-leg catenaries,
and the result carries everything the planner and simulator need: cable
cut lengths, clearances, and the target Gauss code.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .catenary import (
    MultiCatenaryCurve,
    arc_length,
    compose,
    crossing_clearances,
    h_max_bound,
    make_segment,
    sample_curve,
)
from .curve_code import DegenerateCrossingError, extract_crossings, code_from_crossings
from .gauss import GaussCode, canonicalize
from .grid import KnotPolyline, planar_gauss_code

DEFAULT_ZP_FACTOR = 1.25   # z_p when unspecified, as a multiple of h_max
SAMPLES_PER_SEGMENT = 128  # verification sampling density default


@dataclass(frozen=True)
class KnotPlan:
    """A buildable knot: geometry, per-segment sags, cable lengths, target code."""

    polyline: KnotPolyline
    heights: tuple[float, ...]
    curve: MultiCatenaryCurve
    lengths: tuple[float, ...]
    total_length: float
    d: float
    z_p: float
    h_min: float
    h_max: float
    delta_margin: float
    clearances: tuple[float, ...]
    target_code: GaussCode
    source: dict | None = None

    @property
    def n(self) -> int:
        return self.polyline.n

    @property
    def grid_size(self) -> int:
        return (self.polyline.n + 1) // 2

    @property
    def targets(self) -> np.ndarray:
        """Final robot positions, one per polyline corner."""
        return np.asarray(self.polyline.points, dtype=float)


def assign_heights(poly: KnotPolyline, h_min: float, h_max: float) -> tuple[float, ...]:
    """Per-leg sag: h_max for legs passing under at least one crossing, else h_min.

    With columns always over rows, the under set is exactly the crossed row
    legs, so no leg ever needs to be both shallow and deep.
    """
    if not h_max > h_min > 0.0:
        raise ValueError(f"need h_max > h_min > 0, got h_min={h_min}, h_max={h_max}")
    under = {c.under for c in poly.crossings}
    return tuple(
        h_max if leg in under else h_min for leg in range(poly.leg_count)
    )


def build_plan(
    poly: KnotPolyline,
    h_min: float,
    z_p: float | None = None,
    tol: float = 1e-10,
    source: dict | None = None,
) -> KnotPlan:
    """Plan construction: sag bound, heights, segments, lengths, clearances.

    ``z_p`` overrides the polyline's plane height (default: the polyline's
    own, or 1.25 * h_max when that is None-like small for the computed
    bound).  Raises if z_p does not exceed h_max (the cable would touch
    the floor) or if any clearance fails, which the bound makes impossible.
    """
    if h_min <= 0.0:
        raise ValueError(f"h_min must be positive, got {h_min}")
    n_grid = (poly.n + 1) // 2
    h_max = h_max_bound(h_min, n_grid, poly.d)
    if z_p is None:
        z_p = poly.z_p if poly.z_p > h_max else DEFAULT_ZP_FACTOR * h_max
    if z_p <= h_max:
        raise ValueError(
            f"plane height z_p={z_p} must exceed h_max={h_max}; "
            "the cables would touch the floor"
        )
    if abs(z_p - poly.z_p) > 0.0:
        poly = poly.with_z(z_p)

    heights = assign_heights(poly, h_min, h_max)
    segments = [
        make_segment(poly.points[i], poly.points[i + 1], heights[i], tol)
        for i in range(poly.leg_count)
    ]
    curve = compose(segments)
    lengths = tuple(arc_length(seg.a, seg.params.s) for seg in segments)
    total = float(sum(lengths))
    clearances = tuple(crossing_clearances(curve, poly.crossings))
    if any(gap <= 0.0 for gap in clearances):
        raise AssertionError(
            f"crossing clearance not positive under the sag bound: {clearances}"
        )
    return KnotPlan(
        polyline=poly,
        heights=heights,
        curve=curve,
        lengths=lengths,
        total_length=total,
        d=poly.d,
        z_p=z_p,
        h_min=h_min,
        h_max=h_max,
        delta_margin=1e-3 * h_min,
        clearances=clearances,
        target_code=planar_gauss_code(poly),
        source=source,
    )


def cable_cut_list(plan: KnotPlan) -> tuple[float, tuple[float, ...]]:
    """Total cable length and the per-segment cut lengths (summing to it)."""
    return plan.total_length, plan.lengths


def rescale_for_cable(
    poly: KnotPolyline,
    h_min: float,
    cable_length: float,
    rel_tol: float = 1e-6,
    max_iter: int = 200,
) -> float:
    """Cell width d making the plan's total length fit a given cable.

    h_min scales proportionally with d (catenaries are scale covariant),
    so total length is monotone increasing in d and bisection converges to
    a total in [cable_length * (1 - rel_tol), cable_length].
    """
    if cable_length <= 0.0:
        raise ValueError(f"cable length must be positive, got {cable_length}")

    d0 = poly.d

    def total_for(d: float) -> float:
        scale = d / d0
        scaled = KnotPolyline(
            points=tuple((x * scale, y * scale, z) for x, y, z in poly.points),
            crossings=tuple(
                type(c)(c.over, c.under, (c.point[0] * scale, c.point[1] * scale))
                for c in poly.crossings
            ),
            d=d,
            z_p=poly.z_p,
            closure_point=(
                poly.closure_point[0] * scale,
                poly.closure_point[1] * scale,
                poly.closure_point[2],
            ),
        )
        return build_plan(scaled, h_min * scale, z_p=None).total_length

    base_total = total_for(d0)
    guess = d0 * cable_length / base_total
    lo, hi = guess * 0.5, guess * 2.0
    while total_for(lo) > cable_length:
        lo *= 0.5
        if lo < 1e-12 * guess:
            raise ArithmeticError("rescale bracketing failed from below")
    while total_for(hi) < cable_length:
        hi *= 2.0
        if hi > 1e12 * guess:
            raise ArithmeticError("rescale bracketing failed from above")
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        total = total_for(mid)
        if cable_length * (1.0 - rel_tol) <= total <= cable_length:
            return mid
        if total > cable_length:
            hi = mid
        else:
            lo = mid
    raise ArithmeticError(
        "rescale bisection did not converge; scale covariance violated?"
    )


def _prime_intervals(requested: int) -> int:
    """Smallest prime >= requested.

    Prime interval counts keep interior samples off the lattice lines
    where grid crossings live, so intersections never land on a sample
    endpoint for leg spans up to the prime.
    """
    candidate = max(requested, 2)
    while True:
        if all(candidate % p for p in range(2, int(candidate**0.5) + 1)):
            return candidate
        candidate += 1


@dataclass(frozen=True)
class VerifyReport:
    """Outcome of a discrete topology check.

    ``matches`` is None when verification was inconclusive (degenerate
    crossings even after densified sampling).
    """

    matches: bool | None
    extracted: GaussCode | None
    target_canonical: GaussCode
    min_abs_dz: float
    z_gaps: tuple[float, ...]
    samples_per_segment: int
    message: str = ""


def verify_topology(
    curve: MultiCatenaryCurve,
    target: GaussCode,
    samples_per_segment: int = SAMPLES_PER_SEGMENT,
    closure_point=None,
) -> VerifyReport:
    """Sample the curve, extract its Gauss code, compare canonical forms.

    ``closure_point`` (when given) is visited between the last and first
    samples so the virtual closure follows the crossing-free corner path
    instead of a straight chord.  On a degenerate crossing the sampling is
    densified once before giving up as inconclusive.
    """
    if samples_per_segment < 32:
        raise ValueError(
            f"need at least 32 samples per segment, got {samples_per_segment}"
        )
    target_canon = canonicalize(target)
    spp = samples_per_segment
    last_error = None
    for attempt in range(2):
        intervals = _prime_intervals(spp - 1)
        samples = sample_curve(curve, intervals)
        if closure_point is not None:
            samples = np.vstack([samples, np.asarray(closure_point, dtype=float)])
        try:
            crossings = extract_crossings(samples, closure=True)
        except DegenerateCrossingError as err:
            last_error = err
            spp = 2 * spp
            continue
        extracted = code_from_crossings(crossings)
        gaps = tuple(c.dz for c in crossings)
        return VerifyReport(
            matches=canonicalize(extracted) == target_canon,
            extracted=extracted,
            target_canonical=target_canon,
            min_abs_dz=min(gaps) if gaps else float("inf"),
            z_gaps=gaps,
            samples_per_segment=spp,
            message="",
        )
    return VerifyReport(
        matches=None,
        extracted=None,
        target_canonical=target_canon,
        min_abs_dz=0.0,
        z_gaps=(),
        samples_per_segment=spp,
        message=f"inconclusive after densified sampling: {last_error}",
    )


def verify_plan(plan: KnotPlan, samples_per_segment: int = SAMPLES_PER_SEGMENT) -> VerifyReport:
    """Check the plan's own curve against its traced Gauss code."""
    return verify_topology(
        plan.curve,
        plan.target_code,
        samples_per_segment=samples_per_segment,
        closure_point=plan.polyline.closure_point,
    )


# --- JSON round trip ---------------------------------------------------------

def plan_to_json_dict(plan: KnotPlan) -> dict:
    poly = plan.polyline
    return {
        "schema": "knotfold/plan@1",
        "grid_size": plan.grid_size,
        "n": plan.n,
        "d": plan.d,
        "z_p": plan.z_p,
        "h_min": plan.h_min,
        "h_max": plan.h_max,
        "delta_margin": plan.delta_margin,
        "points": [list(p) for p in poly.points],
        "closure_point": list(poly.closure_point),
        "crossings": [
            {"over": c.over, "under": c.under, "point": list(c.point)}
            for c in poly.crossings
        ],
        "heights": list(plan.heights),
        "segments": [
            {
                "s": seg.params.s,
                "h": seg.params.h,
                "a": seg.params.a,
                "theta": seg.theta,
                "c": list(seg.c),
                "r_lo": seg.r_lo,
                "r_hi": seg.r_hi,
            }
            for seg in plan.curve.segments
        ],
        "lengths": list(plan.lengths),
        "total_length": plan.total_length,
        "clearances": list(plan.clearances),
        "target_gauss": plan.target_code.to_text(),
        "source": plan.source,
    }


def plan_from_json_dict(data: dict) -> KnotPlan:
    from .gauss import parse_gauss_code
    from .grid import Crossing

    if data.get("schema") != "knotfold/plan@1":
        raise ValueError(f"unsupported plan schema {data.get('schema')!r}")
    poly = KnotPolyline(
        points=tuple(tuple(p) for p in data["points"]),
        crossings=tuple(
            Crossing(c["over"], c["under"], tuple(c["point"])) for c in data["crossings"]
        ),
        d=data["d"],
        z_p=data["z_p"],
        closure_point=tuple(data["closure_point"]),
    )
    from .catenary import CatenaryParams, CatenarySegment

    segments = tuple(
        CatenarySegment(
            CatenaryParams(s=s["s"], h=s["h"], a=s["a"]),
            c=tuple(s["c"]),
            theta=s["theta"],
            r_lo=s["r_lo"],
            r_hi=s["r_hi"],
        )
        for s in data["segments"]
    )
    return KnotPlan(
        polyline=poly,
        heights=tuple(data["heights"]),
        curve=compose(segments),
        lengths=tuple(data["lengths"]),
        total_length=data["total_length"],
        d=data["d"],
        z_p=data["z_p"],
        h_min=data["h_min"],
        h_max=data["h_max"],
        delta_margin=data["delta_margin"],
        clearances=tuple(data["clearances"]),
        target_code=parse_gauss_code(data["target_gauss"]),
        source=data.get("source"),
    )
