"""Folding trajectories: grasp points, dipped waypoints, rest-to-rest
quintics, and the delayed leader-follower schedule.

Every robot follows one shared time-parametrized curve.  The leader
(highest index) starts first; robot i starts t_d * (n - i) later and
stops for good when it reaches its own target corner.  Intermediate
waypoints dip below the corner plane so robots can pass under hanging
cable, alternating a deep dip (1.5 * h_max) and a shallow one (0.5 *
h_max).
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np


def grasp_points(lengths) -> np.ndarray:
    """Grasp locations along a straight cable stretched on the floor.

    Robot i grabs at the cumulative cable length before segment i, on the
    x axis at z = 0.
    """
    lengths = np.asarray(lengths, dtype=float)
    if lengths.ndim != 1 or len(lengths) == 0:
        raise ValueError("need a non-empty 1D sequence of segment lengths")
    if np.any(lengths <= 0.0):
        raise ValueError("segment lengths must be positive")
    x = np.concatenate([[0.0], np.cumsum(lengths)])
    out = np.zeros((len(x), 3))
    out[:, 0] = x
    return out


def augment_waypoints(targets, h_max: float) -> np.ndarray:
    """Interleave dipped midpoints between consecutive targets.

    Between targets i and i+1 (1-based i) the midpoint is lowered by
    1.5 * h_max for odd i and 0.5 * h_max for even i.  A dip at or below
    the floor is an error; raise z_p.
    """
    pts = np.asarray(targets, dtype=float)
    if pts.ndim != 2 or pts.shape[1] != 3 or len(pts) < 2:
        raise ValueError("need at least two 3D target points")
    if h_max <= 0.0:
        raise ValueError(f"h_max must be positive, got {h_max}")
    n = len(pts)
    out = np.zeros((2 * n - 1, 3))
    out[::2] = pts
    for i in range(1, n):  # 1-based pair index
        dip = (2.0 - (-1.0) ** i) / 2.0 * h_max
        q = (pts[i - 1] + pts[i]) / 2.0
        q[2] -= dip
        if q[2] <= 0.0:
            raise ValueError(
                f"intermediate waypoint {i} would sit at z={q[2]:.3f} <= 0 "
                f"(dip {dip:.3f}); increase z_p"
            )
        out[2 * i - 1] = q
    return out


def _minjerk(tau: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Rest-to-rest quintic blend and its first two tau derivatives."""
    t2 = tau * tau
    t3 = t2 * tau
    s = 10.0 * t3 - 15.0 * t3 * tau + 6.0 * t3 * t2
    ds = 30.0 * t2 - 60.0 * t3 + 30.0 * t2 * t2
    dds = 60.0 * tau - 180.0 * t2 + 120.0 * t3
    return s, ds, dds


@dataclass(frozen=True)
class Trajectory:
    """Piecewise quintic through waypoints, at rest at every waypoint.

    ``times`` are the waypoint timestamps; interval k runs [times[k],
    times[k+1]] with a normalized-time quintic per axis.  Evaluation
    clamps and holds outside [0, duration].
    """

    waypoints: np.ndarray           # (m, 3)
    times: np.ndarray               # (m,)
    source_index: tuple[int, ...]   # original waypoint index per knot

    @property
    def duration(self) -> float:
        return float(self.times[-1])

    def eval(self, t) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Position, velocity, acceleration at time(s) t (clamped hold)."""
        t_arr = np.atleast_1d(np.asarray(t, dtype=float))
        t_clamped = np.clip(t_arr, 0.0, self.duration)
        idx = np.searchsorted(self.times, t_clamped, side="right") - 1
        idx = np.clip(idx, 0, len(self.times) - 2)
        t0 = self.times[idx]
        dur = self.times[idx + 1] - t0
        tau = (t_clamped - t0) / dur
        s, ds, dds = _minjerk(tau)
        p0 = self.waypoints[idx]
        delta = self.waypoints[idx + 1] - p0
        pos = p0 + delta * s[:, None]
        vel = delta * (ds / dur)[:, None]
        acc = delta * (dds / (dur * dur))[:, None]
        if np.isscalar(t) or np.asarray(t).ndim == 0:
            return pos[0], vel[0], acc[0]
        return pos, vel, acc

    def interval_coeffs(self) -> list[dict]:
        """Normalized-time quintic coefficients per interval and axis."""
        out = []
        for k in range(len(self.times) - 1):
            p0 = self.waypoints[k]
            delta = self.waypoints[k + 1] - p0
            coeffs = {
                axis: [
                    float(p0[ai]),
                    0.0,
                    0.0,
                    float(10.0 * delta[ai]),
                    float(-15.0 * delta[ai]),
                    float(6.0 * delta[ai]),
                ]
                for ai, axis in enumerate("xyz")
            }
            out.append(
                {
                    "t0": float(self.times[k]),
                    "duration": float(self.times[k + 1] - self.times[k]),
                    "coeffs": coeffs,
                }
            )
        return out


def quintic_spline(waypoints, v_ref: float = 1.0, t_floor: float = 0.5) -> Trajectory:
    """Rest-to-rest quintic through the waypoints at reference speed v_ref.

    Interval duration is the straight distance over v_ref, floored at
    t_floor.  Zero-length intervals are skipped with a warning.
    """
    pts = np.asarray(waypoints, dtype=float)
    if pts.ndim != 2 or pts.shape[1] != 3 or len(pts) < 2:
        raise ValueError("need at least two 3D waypoints")
    if v_ref <= 0.0:
        raise ValueError(f"v_ref must be positive, got {v_ref}")
    kept = [0]
    for k in range(1, len(pts)):
        if np.linalg.norm(pts[k] - pts[kept[-1]]) == 0.0:
            warnings.warn(f"skipping zero-length interval into waypoint {k}")
            continue
        kept.append(k)
    if len(kept) < 2:
        raise ValueError("all waypoints coincide")
    used = pts[kept]
    seg_len = np.linalg.norm(np.diff(used, axis=0), axis=1)
    durations = np.maximum(seg_len / v_ref, t_floor)
    times = np.concatenate([[0.0], np.cumsum(durations)])
    return Trajectory(waypoints=used, times=times, source_index=tuple(kept))


def eval_trajectory(traj: Trajectory, t):
    """Position, velocity, acceleration at time t (hold outside [0, T])."""
    return traj.eval(t)


@dataclass(frozen=True)
class FoldSchedule:
    """Per-robot timing on the shared trajectory.

    Robot i (1-based) lifts off at entry_starts[i-1] = t_d * (n - i),
    flies a rest-to-rest connector of entry_duration from its grasp point
    to the trajectory start, then tracks the shared curve with clock
    t - track_starts[i-1], stopping at stop_clocks[i-1] (the timestamp of
    its own corner).  The leader is robot n and moves first.
    """

    n: int
    t_d: float
    entry_duration: float
    entry_starts: np.ndarray    # (n,)
    track_starts: np.ndarray    # (n,)
    stop_clocks: np.ndarray     # (n,)
    grasp: np.ndarray           # (n, 3)
    targets: np.ndarray         # (n, 3)
    traj_start: np.ndarray      # (3,)

    def clock(self, robot: int, t: float) -> float:
        """Trajectory clock of 1-based robot index at global time t."""
        return t - float(self.track_starts[robot - 1])

    def entry_reference(self, t) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Connector references for all robots at global time t (vectorized)."""
        tau = np.clip((t - self.entry_starts) / self.entry_duration, 0.0, 1.0)
        s, ds, dds = _minjerk(tau)
        delta = self.traj_start[None, :] - self.grasp
        pos = self.grasp + delta * s[:, None]
        vel = delta * (ds / self.entry_duration)[:, None]
        acc = delta * (dds / self.entry_duration**2)[:, None]
        return pos, vel, acc

    @property
    def horizon(self) -> float:
        """Global time by which every robot has reached its stop clock."""
        return float(np.max(self.track_starts + self.stop_clocks))


def default_t_d(lengths, v_ref: float = 1.0) -> float:
    """Start delay: time to cover one mean cable segment at v_ref."""
    lengths = np.asarray(lengths, dtype=float)
    return float(np.mean(lengths) / v_ref)


def make_schedule(
    plan,
    traj: Trajectory,
    t_d: float | None = None,
    entry_duration: float = 3.0,
    v_ref: float = 1.0,
    time_cap: float = 3600.0,
) -> FoldSchedule:
    """Delayed leader-follower schedule for a plan and its trajectory.

    The global timeline is shifted by entry_duration so the leader's
    connector occupies [0, entry_duration] and every robot's connector
    ends exactly when its tracking clock starts.
    """
    n = plan.n
    if t_d is None:
        t_d = default_t_d(plan.lengths, v_ref)
    if t_d < 0.0:
        raise ValueError(f"t_d must be nonnegative, got {t_d}")
    robots = np.arange(1, n + 1)
    entry_starts = t_d * (n - robots)
    track_starts = entry_starts + entry_duration
    # Robot i stops at its own corner, waypoint 2(i-1) in the augmented
    # sequence (position knots sit at even indices).
    knot_of_waypoint = {src: k for k, src in enumerate(traj.source_index)}
    stop_clocks = np.array(
        [traj.times[knot_of_waypoint[2 * (i - 1)]] for i in robots]
    )
    grasp = grasp_points(plan.lengths)
    schedule = FoldSchedule(
        n=n,
        t_d=float(t_d),
        entry_duration=float(entry_duration),
        entry_starts=entry_starts,
        track_starts=track_starts,
        stop_clocks=stop_clocks,
        grasp=grasp,
        targets=plan.targets,
        traj_start=traj.waypoints[0].copy(),
    )
    if schedule.horizon > time_cap:
        warnings.warn(
            f"schedule horizon {schedule.horizon:.1f}s exceeds the "
            f"{time_cap:.0f}s cap"
        )
    return schedule


def transit_chord_margins(plan, traj: Trajectory) -> np.ndarray:
    """Design margin ℓ_i minus the worst holding-pair chord, per pair.

    Once robot i holds its corner, robot i+1 still traverses the dip
    between their corners; the binding chord is corner-to-dip-bottom.  A
    negative entry predicts a taut-cable violation regardless of timing.
    """
    targets = plan.targets
    margins = np.empty(plan.n - 1)
    for i in range(plan.n - 1):
        p_i = targets[i]
        dip = traj.waypoints[2 * i + 1] if 2 * i + 1 < len(traj.waypoints) else targets[i + 1]
        worst = max(
            float(np.linalg.norm(dip - p_i)),
            float(np.linalg.norm(targets[i + 1] - p_i)),
        )
        margins[i] = plan.lengths[i] - worst
    return margins
