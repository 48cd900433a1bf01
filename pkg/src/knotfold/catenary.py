"""Catenary mathematics: intrinsic-equation solving, segments, composition,
arc length, and the sag bound that keeps crossings separated.

A catenary of shape constant a, lowest point at the origin and local
curve parameter r has height a*(cosh(r/a) - 1).  For sag h over half-span
s the constant solves h/a = cosh(s/a) - 1, which has exactly one positive
root; both solvers here bracket in x = s/a and polish with Newton steps.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

_COSH_ARG_MAX = 700.0  # beyond this cosh overflows; configuration is degenerate


class TautCableError(ValueError):
    """Cable length does not exceed the straight-line distance."""


def _coshm1(x: float) -> float:
    """cosh(x) - 1 without cancellation for small x."""
    s = math.sinh(0.5 * x)
    return 2.0 * s * s


def _sinhc(x: float) -> float:
    """sinh(x)/x, stable near zero."""
    if abs(x) < 1e-4:
        x2 = x * x
        return 1.0 + x2 / 6.0 + x2 * x2 / 120.0
    return math.sinh(x) / x


def _solve_increasing(f, df, x_probe: float) -> float:
    """Root of f, negative then positive on (0, inf), f increasing past the root.

    Geometric bracket growth from ``x_probe``, bisection to ~1e-3 relative,
    then safeguarded Newton polish to machine precision.
    """
    hi = x_probe
    for _ in range(2000):
        if f(hi) > 0.0:
            break
        hi *= 2.0
        if hi > _COSH_ARG_MAX:
            raise ValueError(
                "no root below the overflow guard; configuration is degenerate "
                "(taut cable or extreme aspect)"
            )
    else:  # pragma: no cover - loop bound is generous
        raise ValueError("bracketing failed")
    lo = hi / 2.0 if hi > x_probe else 0.0
    while f(lo) > 0.0:
        lo /= 2.0
        if lo < 1e-300:
            raise ValueError("degenerate root at zero")
    while hi - lo > 1e-3 * hi:
        mid = 0.5 * (lo + hi)
        if f(mid) > 0.0:
            hi = mid
        else:
            lo = mid
    x = 0.5 * (lo + hi)
    for _ in range(60):
        fx = f(x)
        if fx > 0.0:
            hi = min(hi, x)
        else:
            lo = max(lo, x)
        step = fx / df(x)
        x_new = x - step
        if not lo < x_new < hi:
            x_new = 0.5 * (lo + hi)
        if abs(x_new - x) <= 1e-16 * x:
            return x_new
        x = x_new
    return x


def solve_intrinsic(h: float, s: float, tol: float = 1e-10) -> float:
    """Shape constant a > 0 with h/a = cosh(s/a) - 1, for sag h and half-span s.

    The residual of the defining equation is asserted to stay within
    ``tol`` (a machine-noise allowance applies for extreme sag ratios).
    """
    if not (math.isfinite(h) and math.isfinite(s)):
        raise ValueError("h and s must be finite")
    if h <= 0.0 or s <= 0.0:
        raise ValueError(f"need h > 0 and s > 0, got h={h}, s={s}")
    if not 0.0 < tol <= 1e-6:
        raise ValueError(f"tol must be in (0, 1e-6], got {tol}")
    q = h / s

    def f(x: float) -> float:
        return _coshm1(x) - q * x

    def df(x: float) -> float:
        return math.sinh(x) - q

    # The root satisfies coshm1(x)/x = q; probe near both asymptotic regimes.
    probe = max(2.0 * q, 1e-6)
    x = _solve_increasing(f, df, min(probe, 1.0))
    a = s / x
    residual = abs(h / a - _coshm1(s / a))
    if residual > max(tol, 32.0 * np.finfo(float).eps * (1.0 + h / a)):
        raise ArithmeticError(
            f"intrinsic residual {residual:.3e} exceeds tolerance {tol:.1e}"
        )
    return a


def solve_from_length(length: float, s: float, tol: float = 1e-10) -> float:
    """Shape constant a > 0 with 2*a*sinh(s/a) = length (known cable length).

    Requires slack: length > 2*s; a taut or overtight cable raises
    TautCableError.
    """
    if not (math.isfinite(length) and math.isfinite(s)):
        raise ValueError("length and s must be finite")
    if s <= 0.0:
        raise ValueError(f"need s > 0, got {s}")
    if length <= 2.0 * s:
        raise TautCableError(
            f"cable length {length} does not exceed span {2.0 * s}; "
            "the segment is taut or overtight"
        )
    lam = length / (2.0 * s)

    def f(x: float) -> float:
        return _sinhc(x) - lam

    def df(x: float) -> float:
        if abs(x) < 1e-4:
            return x / 3.0 + x**3 / 30.0
        return (math.cosh(x) - _sinhc(x)) / x

    x = _solve_increasing(f, df, max(math.sqrt(6.0 * (lam - 1.0)), 1e-8))
    a = s / x
    residual = abs(2.0 * a * math.sinh(s / a) - length)
    if residual > tol * length:
        raise ArithmeticError(
            f"length residual {residual:.3e} exceeds {tol:.1e} relative"
        )
    return a


def eval_local(a: float, r) -> np.ndarray:
    """Point(s) on the canonical catenary: [0, r, a*(cosh(r/a) - 1)]."""
    if a <= 0.0:
        raise ValueError(f"shape constant must be positive, got {a}")
    r_arr = np.asarray(r, dtype=float)
    z = 2.0 * a * np.sinh(r_arr / (2.0 * a)) ** 2
    out = np.stack([np.zeros_like(r_arr), r_arr, z], axis=-1)
    return out


def arc_length(a: float, s: float) -> float:
    """Cable length 2*a*sinh(s/a) of a catenary over half-span s."""
    if a <= 0.0 or s <= 0.0:
        raise ValueError(f"need a > 0 and s > 0, got a={a}, s={s}")
    if s / a > _COSH_ARG_MAX:
        raise ValueError("s/a exceeds the overflow guard")
    return 2.0 * a * math.sinh(s / a)


@dataclass(frozen=True)
class CatenaryParams:
    """Half-span, sag, and shape constant of one hanging segment."""

    s: float
    h: float
    a: float

    def residual(self) -> float:
        return abs(self.h / self.a - _coshm1(self.s / self.a))


@dataclass(frozen=True)
class CatenarySegment:
    """Catenary arc in a vertical plane.

    ``c`` is the curve's lowest point (possibly outside the arc for
    endpoints at different heights), ``theta`` the rotation about z taking
    the local +y axis onto the planar direction of travel, and
    [r_lo, r_hi] the parameter range actually occupied (symmetric
    [-s, s] for equal-height endpoints).
    """

    params: CatenaryParams
    c: tuple[float, float, float]
    theta: float
    r_lo: float
    r_hi: float

    @property
    def a(self) -> float:
        return self.params.a

    @property
    def span(self) -> float:
        return self.r_hi - self.r_lo

    def direction(self) -> np.ndarray:
        """Unit planar direction of travel (local +y rotated by theta)."""
        return np.array([-math.sin(self.theta), math.cos(self.theta), 0.0])

    def point(self, r) -> np.ndarray:
        """World point(s) at local parameter r in [r_lo, r_hi]."""
        r_arr = np.asarray(r, dtype=float)
        u = self.direction()
        z = 2.0 * self.a * np.sinh(r_arr / (2.0 * self.a)) ** 2
        base = np.asarray(self.c, dtype=float)
        return base + np.multiply.outer(r_arr, u) + np.multiply.outer(z, np.array([0.0, 0.0, 1.0]))

    @property
    def start(self) -> np.ndarray:
        return self.point(self.r_lo)

    @property
    def end(self) -> np.ndarray:
        return self.point(self.r_hi)

    def lowest_z(self) -> float:
        """Smallest height reached on the occupied arc."""
        if self.r_lo <= 0.0 <= self.r_hi:
            return self.c[2]
        return float(min(self.start[2], self.end[2]))

    def cable_length(self) -> float:
        return self.a * (math.sinh(self.r_hi / self.a) - math.sinh(self.r_lo / self.a))


@dataclass(frozen=True)
class StraightSegment:
    """Degenerate (taut) segment rendered as a straight line."""

    p_start: tuple[float, float, float]
    p_end: tuple[float, float, float]

    @property
    def span(self) -> float:
        return float(np.linalg.norm(np.subtract(self.p_end, self.p_start)))

    @property
    def r_lo(self) -> float:
        return 0.0

    @property
    def r_hi(self) -> float:
        return self.span

    def point(self, r) -> np.ndarray:
        r_arr = np.asarray(r, dtype=float)
        a = np.asarray(self.p_start, dtype=float)
        d = np.subtract(self.p_end, self.p_start) / self.span
        return a + np.multiply.outer(r_arr, d)

    @property
    def start(self) -> np.ndarray:
        return np.asarray(self.p_start, dtype=float)

    @property
    def end(self) -> np.ndarray:
        return np.asarray(self.p_end, dtype=float)

    def lowest_z(self) -> float:
        return float(min(self.p_start[2], self.p_end[2]))

    def cable_length(self) -> float:
        return self.span


def heading_of(delta_x: float, delta_y: float) -> float:
    """Rotation about z mapping the local +y axis onto (delta_x, delta_y)."""
    return math.atan2(-delta_x, delta_y)


def make_segment(p_i, p_next, h: float, tol: float = 1e-10) -> CatenarySegment:
    """Catenary of sag h hung between two points at equal height.

    Half-span is half the endpoint distance; the lowest point sits h below
    the midpoint.  Endpoint reconstruction is checked to 1e-9 of the
    half-span.
    """
    p_a = np.asarray(p_i, dtype=float)
    p_b = np.asarray(p_next, dtype=float)
    if abs(p_a[2] - p_b[2]) > 1e-9 * max(1.0, abs(p_a[2])):
        raise ValueError(
            f"endpoints must share a height, got z={p_a[2]} and z={p_b[2]}"
        )
    delta = p_b - p_a
    span = float(np.hypot(delta[0], delta[1]))
    if span == 0.0:
        raise ValueError("coincident endpoints")
    s = span / 2.0
    a = solve_intrinsic(h, s, tol)
    theta = heading_of(delta[0], delta[1])
    mid = (p_a + p_b) / 2.0
    c = (float(mid[0]), float(mid[1]), float(mid[2] - h))
    seg = CatenarySegment(CatenaryParams(s=s, h=h, a=a), c=c, theta=theta, r_lo=-s, r_hi=s)
    err = max(
        float(np.linalg.norm(seg.start - p_a)),
        float(np.linalg.norm(seg.end - p_b)),
    )
    if err > 1e-9 * s:
        raise ArithmeticError(f"endpoint reconstruction error {err:.3e} exceeds 1e-9*s")
    return seg


def fit_segment_to_length(p_a, p_b, length: float, tol: float = 1e-10) -> CatenarySegment:
    """Catenary of known cable length hung between points at any heights.

    Reduces to one transcendental equation on the horizontal span:
    sqrt(length^2 - dz^2) = 2*a*sinh(w/(2a)).  Requires slack (length
    greater than the straight-line distance).
    """
    a_pt = np.asarray(p_a, dtype=float)
    b_pt = np.asarray(p_b, dtype=float)
    delta = b_pt - a_pt
    w = float(np.hypot(delta[0], delta[1]))
    v = float(delta[2])
    chord = float(np.linalg.norm(delta))
    if length <= chord:
        raise TautCableError(
            f"cable length {length} does not exceed endpoint distance {chord}"
        )
    # A (near-)vertical pair has no well-defined hanging plane; nudge the
    # span so the shape stays finite.  Only transient flight states hit this.
    w = max(w, 1e-9 * length)
    reduced = math.sqrt(length * length - v * v)
    a = solve_from_length(reduced, w / 2.0, tol)
    x0 = w / 2.0 - a * math.atanh(v / length)
    if w >= 1e-12:
        u_xy = delta[:2] / np.hypot(delta[0], delta[1])
    else:
        u_xy = np.array([1.0, 0.0])
    vertex_xy = a_pt[:2] + u_xy * x0
    vertex_z = a_pt[2] - a * _coshm1(x0 / a)
    theta = heading_of(u_xy[0], u_xy[1])
    r_lo, r_hi = -x0, w - x0
    h = max(a_pt[2], b_pt[2]) - vertex_z
    seg = CatenarySegment(
        CatenaryParams(s=w / 2.0, h=h, a=a),
        c=(float(vertex_xy[0]), float(vertex_xy[1]), float(vertex_z)),
        theta=theta,
        r_lo=r_lo,
        r_hi=r_hi,
    )
    err = max(
        float(np.linalg.norm(seg.start - a_pt)),
        float(np.linalg.norm(seg.end - b_pt)),
    )
    if err > 1e-8 * max(1.0, length):
        raise ArithmeticError(f"endpoint reconstruction error {err:.3e}")
    return seg


@dataclass(frozen=True)
class MultiCatenaryCurve:
    """C0 chain of hanging segments with cumulative breakpoints.

    Breakpoint q_k is the sum of the full spans of the first k segments,
    so the global parameter covers each segment exactly once.
    """

    segments: tuple
    breakpoints: tuple[float, ...] = field(default=())

    @property
    def total_param(self) -> float:
        return self.breakpoints[-1]

    def point(self, t: float) -> np.ndarray:
        if not 0.0 <= t <= self.breakpoints[-1] * (1.0 + 1e-12):
            raise ValueError(
                f"parameter {t} outside [0, {self.breakpoints[-1]}]"
            )
        idx = int(np.searchsorted(self.breakpoints, t, side="right")) - 1
        idx = min(max(idx, 0), len(self.segments) - 1)
        seg = self.segments[idx]
        return seg.point(seg.r_lo + (t - self.breakpoints[idx]))


def compose(segments, tol: float = 1e-9) -> MultiCatenaryCurve:
    """Chain segments into a curve, checking endpoint continuity."""
    segs = tuple(segments)
    if not segs:
        raise ValueError("need at least one segment")
    breakpoints = [0.0]
    for k, seg in enumerate(segs):
        if k > 0:
            gap = float(np.linalg.norm(seg.start - segs[k - 1].end))
            if gap > tol * max(1.0, seg.span):
                raise ValueError(
                    f"segments {k - 1} and {k} do not share an endpoint (gap {gap:.3e})"
                )
        breakpoints.append(breakpoints[-1] + seg.span)
    return MultiCatenaryCurve(segments=segs, breakpoints=tuple(breakpoints))


def eval_curve(curve: MultiCatenaryCurve, t: float) -> np.ndarray:
    """Point on the composed curve at global parameter t."""
    return curve.point(t)


def sample_curve(curve: MultiCatenaryCurve, intervals_per_segment: int) -> np.ndarray:
    """Points along the curve, ``intervals_per_segment + 1`` per segment with
    shared endpoints emitted once."""
    if intervals_per_segment < 1:
        raise ValueError("need at least one interval per segment")
    chunks = []
    for k, seg in enumerate(curve.segments):
        rs = np.linspace(seg.r_lo, seg.r_hi, intervals_per_segment + 1)
        pts = seg.point(rs)
        chunks.append(pts if k == 0 else pts[1:])
    return np.vstack(chunks)


def h_max_bound(
    h_min: float,
    n_grid: int,
    d: float,
    tol: float = 1e-12,
    max_iter: int = 10_000,
) -> float:
    """Smallest sag for under-crossing segments that clears every crossing.

    The worst case pits the longest possible segment (half-span
    (L - d)/2 with L = n_grid * d) elevated at the closest crossing line
    a whole cell from its endpoint (offset (L - 3d)/2 from its lowest
    point) against an over-segment sitting at its own lowest point.  The
    returned h_max satisfies

        h_max >= h_min + eps(h_max) + delta_margin,

    with eps(h) the worst-case elevation above the lowest point and
    delta_margin = 1e-3 * h_min.  Solved by fixed-point iteration from
    h_min + d; the iteration map is a contraction, so convergence is
    monotone.  Grids too small to admit a crossing (n_grid <= 2) get
    eps = 0.
    """
    if h_min <= 0.0:
        raise ValueError(f"h_min must be positive, got {h_min}")
    if n_grid < 2:
        raise ValueError(f"grid size must be at least 2, got {n_grid}")
    if d <= 0.0:
        raise ValueError(f"cell width must be positive, got {d}")
    span_max = (n_grid * d - d) / 2.0
    offset = max(n_grid * d - 3.0 * d, 0.0) / 2.0
    delta_margin = 1e-3 * h_min

    def eps(h: float) -> float:
        if offset == 0.0:
            return 0.0
        a_bar = solve_intrinsic(h, span_max, 1e-6 if h / span_max > 1e5 else 1e-10)
        return a_bar * _coshm1(offset / a_bar)

    h = h_min + d
    prev_step = math.inf
    for _ in range(max_iter):
        h_next = h_min + eps(h) + delta_margin
        step = abs(h_next - h)
        if step <= tol * max(1.0, h_next):
            h = h_next
            break
        if step > prev_step * (1.0 + 1e-12) and step > 1e-9:
            # The map is a contraction in exact arithmetic; damp if noise bites.
            h_next = 0.5 * (h + h_next)
        prev_step = step
        h = h_next
    else:
        raise ArithmeticError(
            f"sag bound fixed point did not converge in {max_iter} iterations; "
            f"last iterate {h}"
        )
    if not h - h_min > eps(h) - 1e-9:
        raise ArithmeticError("sag bound failed its defining inequality post check")
    return h


def crossing_clearances(curve: MultiCatenaryCurve, crossings) -> list[float]:
    """Signed height gap (over minus under) of each crossing, in order.

    Each crossing names an over and an under segment plus the planar point
    where their vertical planes meet; both curve heights there come from
    the closed form z(r) = c_z + a*(cosh(r/a) - 1).
    """
    gaps = []
    for crossing in crossings:
        seg_over = curve.segments[crossing.over]
        seg_under = curve.segments[crossing.under]
        u_o = seg_over.direction()
        u_u = seg_under.direction()
        if abs(u_o[0] * u_u[1] - u_o[1] * u_u[0]) < 1e-12:
            raise ValueError(
                f"crossing ({crossing.over}, {crossing.under}): vertical planes are "
                "parallel, no intersection line"
            )
        point = np.asarray(crossing.point, dtype=float)
        z_o = _z_at_planar(seg_over, point)
        z_u = _z_at_planar(seg_under, point)
        gaps.append(float(z_o - z_u))
    return gaps


def _z_at_planar(seg: CatenarySegment, point_xy: np.ndarray) -> float:
    u = seg.direction()[:2]
    r = float((point_xy - np.asarray(seg.c[:2])) @ u)
    if not seg.r_lo - 1e-9 <= r <= seg.r_hi + 1e-9:
        raise ValueError(
            f"crossing point lies outside the segment (r={r:.6g} not in "
            f"[{seg.r_lo:.6g}, {seg.r_hi:.6g}])"
        )
    return seg.c[2] + seg.a * _coshm1(r / seg.a)
