"""Gauss-code extraction from sampled 3D curves.

Samples are projected to the xy plane; transversal intersections between
non-adjacent chords become crossings, the arc with larger z passing over.
This is the workhorse behind topology verification: it knows nothing about
how the curve was produced.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .gauss import GaussCode, OVER, UNDER


class DegenerateCrossingError(ValueError):
    """Intersection too close to a sample endpoint, tangential, or with an
    ambiguous height gap; denser or shifted sampling usually resolves it."""


@dataclass(frozen=True)
class CurveCrossing:
    """One transversal self-intersection of the projected curve."""

    seg_a: int
    seg_b: int
    t_a: float
    t_b: float
    point: tuple[float, float]
    z_a: float
    z_b: float

    @property
    def dz(self) -> float:
        """Height gap, over minus under (always positive)."""
        return abs(self.z_a - self.z_b)

    @property
    def over_is_a(self) -> bool:
        return self.z_a > self.z_b


def extract_crossings(
    samples,
    closure: bool = False,
    eps_end: float = 1e-9,
    z_tie: float = 1e-6,
) -> list[CurveCrossing]:
    """All projected self-intersections of the sampled curve.

    ``closure`` appends the chord from the last sample back to the first.
    Intersections with chord parameter within ``eps_end`` of an endpoint,
    tangential (collinear) overlaps, and height gaps below ``z_tie`` raise
    DegenerateCrossingError naming the chord pair.
    """
    pts = np.asarray(samples, dtype=float)
    if pts.ndim != 2 or pts.shape[1] != 3:
        raise ValueError("samples must be an (m, 3) array of 3D points")
    if len(pts) < 3:
        raise ValueError("need at least 3 samples")
    a = pts[:-1]
    b = pts[1:]
    if closure:
        a = np.vstack([a, pts[-1]])
        b = np.vstack([b, pts[0]])
    n_seg = len(a)

    axy, bxy = a[:, :2], b[:, :2]
    lo = np.minimum(axy, bxy)
    hi = np.maximum(axy, bxy)
    pad = 1e-12 + eps_end * np.linalg.norm(bxy - axy, axis=1, keepdims=True)
    lo = lo - pad
    hi = hi + pad

    crossings: list[CurveCrossing] = []
    for i in range(n_seg - 2):
        j_start = i + 2
        # On a closed curve the last chord is adjacent to the first.
        j_stop = n_seg - 1 if (closure and i == 0) else n_seg
        if j_start >= j_stop:
            continue
        overlap = (
            (lo[j_start:j_stop, 0] <= hi[i, 0])
            & (hi[j_start:j_stop, 0] >= lo[i, 0])
            & (lo[j_start:j_stop, 1] <= hi[i, 1])
            & (hi[j_start:j_stop, 1] >= lo[i, 1])
        )
        for j in np.nonzero(overlap)[0] + j_start:
            hit = _intersect_pair(axy[i], bxy[i], axy[j], bxy[j], i, j, eps_end)
            if hit is None:
                continue
            t, u, px, py = hit
            z_i = a[i, 2] + t * (b[i, 2] - a[i, 2])
            z_j = a[j, 2] + u * (b[j, 2] - a[j, 2])
            if abs(z_i - z_j) < z_tie:
                raise DegenerateCrossingError(
                    f"chords {i} and {j}: height gap {abs(z_i - z_j):.3e} below tie "
                    f"tolerance {z_tie:.1e}"
                )
            crossings.append(
                CurveCrossing(
                    seg_a=i, seg_b=int(j), t_a=t, t_b=u,
                    point=(px, py), z_a=z_i, z_b=z_j,
                )
            )
    return crossings


def _intersect_pair(a1, b1, a2, b2, i, j, eps_end):
    """Intersection parameters (t, u, x, y) for chords a1->b1 and a2->b2.

    Returns None for a clean miss; raises for tangential or near-endpoint
    contact.  Parameters are clamped to the strict interior (eps_end,
    1 - eps_end) of both chords.
    """
    d1 = b1 - a1
    d2 = b2 - a2
    denom = d1[0] * d2[1] - d1[1] * d2[0]
    len1 = np.hypot(d1[0], d1[1])
    len2 = np.hypot(d2[0], d2[1])
    if len1 == 0.0 or len2 == 0.0:
        return None
    r = a2 - a1
    if abs(denom) <= 1e-14 * len1 * len2:
        # Parallel: only collinear chords can touch.
        off = abs(r[0] * d1[1] - r[1] * d1[0]) / len1
        if off > 1e-12 * max(len1, len2, 1.0):
            return None
        t_lo = (r @ d1) / (len1 * len1)
        t_hi = t_lo + (d2 @ d1) / (len1 * len1)
        t_lo, t_hi = min(t_lo, t_hi), max(t_lo, t_hi)
        if t_hi <= eps_end or t_lo >= 1.0 - eps_end:
            return None
        raise DegenerateCrossingError(
            f"chords {i} and {j}: tangential (collinear) overlap"
        )
    t = (r[0] * d2[1] - r[1] * d2[0]) / denom
    u = (r[0] * d1[1] - r[1] * d1[0]) / denom
    inside_t = eps_end < t < 1.0 - eps_end
    inside_u = eps_end < u < 1.0 - eps_end
    if inside_t and inside_u:
        return t, u, a1[0] + t * d1[0], a1[1] + t * d1[1]
    near_t = -eps_end <= t <= 1.0 + eps_end
    near_u = -eps_end <= u <= 1.0 + eps_end
    if near_t and near_u:
        raise DegenerateCrossingError(
            f"chords {i} and {j}: intersection within {eps_end:.1e} of a sample "
            f"endpoint (t={t:.12g}, u={u:.12g})"
        )
    return None


def gauss_code_of_curve(
    samples,
    closure: bool = False,
    eps_end: float = 1e-9,
    z_tie: float = 1e-6,
) -> GaussCode:
    """Gauss code of a sampled curve, labels in traversal-encounter order."""
    crossings = extract_crossings(samples, closure=closure, eps_end=eps_end, z_tie=z_tie)
    return code_from_crossings(crossings)


def code_from_crossings(crossings: list[CurveCrossing]) -> GaussCode:
    events: list[tuple[int, float, int, int]] = []
    for cid, c in enumerate(crossings):
        sign_a = OVER if c.over_is_a else UNDER
        events.append((c.seg_a, c.t_a, cid, sign_a))
        events.append((c.seg_b, c.t_b, cid, -sign_a))
    events.sort(key=lambda e: (e[0], e[1]))
    labels: dict[int, int] = {}
    entries = []
    for _seg, _t, cid, sign in events:
        if cid not in labels:
            labels[cid] = len(labels) + 1
        entries.append((labels[cid], sign))
    return GaussCode(tuple(entries))
