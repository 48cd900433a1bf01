"""Deterministic fixed-step simulation of the folding maneuver.

Robots are double integrators under a PD + feedforward tracking law,
integrated with semi-implicit Euler so runs are bit-reproducible.  The
cable is monitored (pairwise distance against segment length, hanging
shape for floor contact), never forced: constraint breaches are reported,
not corrected.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from enum import IntEnum

import numpy as np

from .catenary import (
    StraightSegment,
    TautCableError,
    compose,
    fit_segment_to_length,
    sample_curve,
)
from .gauss import canonicalize
from .plan import KnotPlan, VerifyReport, verify_topology
from .trajectory import FoldSchedule, Trajectory, _minjerk


class RobotPhase(IntEnum):
    WAITING = 0
    ENTERING = 1
    TRACKING = 2
    HOLDING = 3


@dataclass(frozen=True)
class SimConfig:
    """Integrator, controller, and monitoring knobs.

    eps_pos defaults to 1e-2 * d at run time; max_time to the schedule
    horizon plus settle_time plus a small buffer.
    """

    dt: float = 1e-3
    k_p: float = 25.0
    k_d: float = 10.0
    eps_pos: float | None = None
    max_time: float | None = None
    settle_time: float = 2.0
    record_every: int = 10
    floor_check_every: int = 100
    verify_samples: int = 128

    def __post_init__(self):
        if self.dt <= 0.0:
            raise ValueError(f"dt must be positive, got {self.dt}")
        if self.k_p < 0.0 or self.k_d < 0.0:
            raise ValueError("gains must be nonnegative")
        if self.record_every < 1 or self.floor_check_every < 1:
            raise ValueError("recording cadences must be >= 1")


def control(p, v, ref_p, ref_v, ref_a, k_p: float, k_d: float) -> np.ndarray:
    """PD + feedforward acceleration command."""
    p = np.asarray(p, dtype=float)
    v = np.asarray(v, dtype=float)
    return (
        k_p * (np.asarray(ref_p, dtype=float) - p)
        + k_d * (np.asarray(ref_v, dtype=float) - v)
        + np.asarray(ref_a, dtype=float)
    )


def step(p, v, u, dt: float) -> tuple[np.ndarray, np.ndarray]:
    """Semi-implicit Euler: velocity first, then position with the new velocity."""
    if dt <= 0.0:
        raise ValueError(f"dt must be positive, got {dt}")
    v_new = np.asarray(v, dtype=float) + np.asarray(u, dtype=float) * dt
    p_new = np.asarray(p, dtype=float) + v_new * dt
    return p_new, v_new


@dataclass(frozen=True)
class CableViolation:
    pair: int
    distance: float
    limit: float

    @property
    def deficit(self) -> float:
        return self.distance - self.limit


@dataclass(frozen=True)
class CableState:
    """Hanging shape of the whole cable for a frozen set of robot positions."""

    curve: object | None
    violations: tuple[CableViolation, ...]

    @property
    def ok(self) -> bool:
        return not self.violations


def cable_state(positions, lengths, taut_rtol: float = 1e-9) -> CableState:
    """Catenary (or straight, when taut) shape per adjacent robot pair.

    Pairs stretched beyond their segment length are reported as violations
    and the curve is omitted.
    """
    pts = np.asarray(positions, dtype=float)
    lengths = np.asarray(lengths, dtype=float)
    if len(pts) != len(lengths) + 1:
        raise ValueError("need one more robot position than cable segment")
    violations = []
    segments = []
    for i in range(len(lengths)):
        p_a, p_b = pts[i], pts[i + 1]
        dist = float(np.linalg.norm(p_b - p_a))
        limit = float(lengths[i])
        if dist > limit * (1.0 + taut_rtol):
            violations.append(CableViolation(pair=i, distance=dist, limit=limit))
            continue
        if dist >= limit * (1.0 - taut_rtol):
            segments.append(StraightSegment(tuple(p_a), tuple(p_b)))
        else:
            segments.append(fit_segment_to_length(p_a, p_b, limit))
    if violations:
        return CableState(curve=None, violations=tuple(violations))
    return CableState(curve=compose(segments, tol=1e-6), violations=())


@dataclass
class SimTrace:
    """Recorded run: robot states at the recording cadence, margins at full
    rate, events, and the final verdict."""

    dt: float
    record_every: int
    times: np.ndarray            # (R,)
    positions: np.ndarray        # (R, n, 3)
    velocities: np.ndarray       # (R, n, 3)
    controls: np.ndarray         # (R, n, 3)
    phases: np.ndarray           # (R, n) int8
    margins: np.ndarray          # (R, n-1)
    min_margin_steps: np.ndarray  # (S,) min over pairs, every step
    events: list[tuple[float, str, int, str]] = field(default_factory=list)
    tracking_error_max: np.ndarray | None = None
    completed: bool = False
    verdict: dict = field(default_factory=dict)

    def trace_csv(self) -> str:
        lines = ["t,robot,px,py,pz,vx,vy,vz,ux,uy,uz,phase"]
        names = {p.value: p.name.lower() for p in RobotPhase}
        for r, t in enumerate(self.times):
            for i in range(self.positions.shape[1]):
                p = self.positions[r, i]
                v = self.velocities[r, i]
                u = self.controls[r, i]
                lines.append(
                    f"{t!r},{i + 1},{p[0]!r},{p[1]!r},{p[2]!r},"
                    f"{v[0]!r},{v[1]!r},{v[2]!r},"
                    f"{u[0]!r},{u[1]!r},{u[2]!r},{names[int(self.phases[r, i])]}"
                )
        return "\n".join(lines) + "\n"

    def margins_csv(self) -> str:
        lines = ["t,pair,margin"]
        for r, t in enumerate(self.times):
            for i in range(self.margins.shape[1]):
                lines.append(f"{t!r},{i + 1},{self.margins[r, i]!r}")
        return "\n".join(lines) + "\n"


def run(
    plan: KnotPlan,
    traj: Trajectory,
    schedule: FoldSchedule,
    config: SimConfig = SimConfig(),
) -> SimTrace:
    """Simulate the folding run and verify the final cable topology.

    Deterministic for identical inputs.  Ends after all robots hold and a
    settle period passes (or at max_time, flagging the run incomplete).
    """
    t_wall = time.perf_counter()
    n = plan.n
    if len(schedule.targets) != n or len(traj.waypoints) < 2:
        raise ValueError("plan, trajectory, and schedule disagree on size")
    dt = config.dt
    eps_pos = config.eps_pos if config.eps_pos is not None else 1e-2 * plan.d
    horizon = schedule.horizon + config.settle_time + 10.0
    max_time = config.max_time if config.max_time is not None else horizon
    max_steps = int(np.ceil(max_time / dt))
    lengths = np.asarray(plan.lengths, dtype=float)

    p = schedule.grasp.copy()
    v = np.zeros_like(p)
    holding = np.zeros(n, dtype=bool)
    prev_phase = np.full(n, -1, dtype=np.int8)

    rec_times, rec_p, rec_v, rec_u, rec_phase, rec_margin = [], [], [], [], [], []
    min_margin_steps = np.empty(max_steps + 1)
    events: list[tuple[float, str, int, str]] = []
    violating = np.zeros(n - 1, dtype=bool)
    floor_low = np.zeros(n - 1, dtype=bool)
    track_err_max = np.zeros(n)
    settle_deadline = None
    completed = False
    step_idx = 0

    for step_idx in range(max_steps + 1):
        t = step_idx * dt
        clocks = t - schedule.track_starts
        entering = (t >= schedule.entry_starts) & (clocks < 0.0)
        tracking = clocks >= 0.0

        ref_p, ref_v, ref_a = schedule.entry_reference(t)
        grasp_mask = ~(entering | tracking)
        if grasp_mask.any():
            ref_p[grasp_mask] = schedule.grasp[grasp_mask]
            ref_v[grasp_mask] = 0.0
            ref_a[grasp_mask] = 0.0
        if tracking.any():
            clamped = np.minimum(clocks[tracking], schedule.stop_clocks[tracking])
            tp, tv, ta = traj.eval(clamped)
            ref_p[tracking] = tp
            ref_v[tracking] = tv
            ref_a[tracking] = ta

        u = config.k_p * (ref_p - p) + config.k_d * (ref_v - v) + ref_a
        v = v + u * dt
        p = p + v * dt

        err = np.linalg.norm(ref_p - p, axis=1)
        np.maximum(track_err_max, np.where(tracking, err, 0.0), out=track_err_max)

        # Phase transitions happen after integration; holding latches once
        # the robot's clock has passed its stop and it sits near its corner.
        at_stop = clocks >= schedule.stop_clocks
        near = np.linalg.norm(p - schedule.targets, axis=1) <= eps_pos
        holding |= tracking & at_stop & near
        phase = np.where(
            holding,
            RobotPhase.HOLDING,
            np.where(
                tracking,
                RobotPhase.TRACKING,
                np.where(entering, RobotPhase.ENTERING, RobotPhase.WAITING),
            ),
        ).astype(np.int8)
        changed = np.nonzero(phase != prev_phase)[0]
        for i in changed:
            events.append(
                (t, "phase", int(i) + 1, RobotPhase(int(phase[i])).name.lower())
            )
        prev_phase = phase

        margins = lengths - np.linalg.norm(np.diff(p, axis=0), axis=1)
        min_margin_steps[step_idx] = margins.min() if len(margins) else np.inf
        now_violating = margins < 0.0
        for i in np.nonzero(now_violating & ~violating)[0]:
            events.append(
                (t, "cable_violation", int(i) + 1, f"deficit {-margins[i]:.6f}")
            )
        violating = now_violating

        if step_idx % config.floor_check_every == 0:
            low = _floor_contacts(p, lengths)
            for i in np.nonzero(low & ~floor_low)[0]:
                events.append((t, "floor_contact", int(i) + 1, "cable sag below z=0"))
            floor_low = low

        record = (
            step_idx % config.record_every == 0
            or step_idx == max_steps
            or (holding.all() and settle_deadline is None)
        )
        if record:
            rec_times.append(t)
            rec_p.append(p.copy())
            rec_v.append(v.copy())
            rec_u.append(u.copy())
            rec_phase.append(phase.copy())
            rec_margin.append(margins.copy())

        if holding.all():
            if settle_deadline is None:
                settle_deadline = t + config.settle_time
            elif t >= settle_deadline:
                completed = True
                break

    trace = SimTrace(
        dt=dt,
        record_every=config.record_every,
        times=np.asarray(rec_times),
        positions=np.asarray(rec_p),
        velocities=np.asarray(rec_v),
        controls=np.asarray(rec_u),
        phases=np.asarray(rec_phase),
        margins=np.asarray(rec_margin),
        min_margin_steps=min_margin_steps[: step_idx + 1],
        events=events,
        tracking_error_max=track_err_max,
        completed=completed,
    )
    trace.verdict = _final_verdict(plan, p, lengths, config, completed)
    trace.verdict["runtime_seconds"] = time.perf_counter() - t_wall
    return trace


def _floor_contacts(p: np.ndarray, lengths: np.ndarray) -> np.ndarray:
    low = np.zeros(len(lengths), dtype=bool)
    for i in range(len(lengths)):
        dist = float(np.linalg.norm(p[i + 1] - p[i]))
        if dist >= lengths[i]:
            low[i] = min(p[i, 2], p[i + 1, 2]) < 0.0
            continue
        try:
            seg = fit_segment_to_length(p[i], p[i + 1], float(lengths[i]))
        except (TautCableError, ArithmeticError):
            continue
        low[i] = seg.lowest_z() < 0.0
    return low


def _final_verdict(
    plan: KnotPlan,
    p_final: np.ndarray,
    lengths: np.ndarray,
    config: SimConfig,
    completed: bool,
) -> dict:
    target_canon = canonicalize(plan.target_code)
    verdict: dict = {
        "completed": completed,
        "target_gauss": target_canon.to_text(),
        "topology_ok": None,
        "final_gauss": None,
        "max_final_error": float(
            np.max(np.linalg.norm(p_final - plan.targets, axis=1))
        ),
    }
    state = cable_state(p_final, lengths)
    if state.violations:
        verdict["cable_violations"] = [
            {"pair": viol.pair + 1, "deficit": viol.deficit}
            for viol in state.violations
        ]
        verdict["topology_ok"] = False
        verdict["message"] = "final cable state violates a segment length"
        return verdict
    report: VerifyReport = verify_topology(
        state.curve,
        plan.target_code,
        samples_per_segment=config.verify_samples,
        closure_point=plan.polyline.closure_point,
    )
    verdict["topology_ok"] = report.matches
    verdict["final_gauss"] = (
        canonicalize(report.extracted).to_text() if report.extracted is not None else None
    )
    verdict["min_crossing_gap"] = report.min_abs_dz if report.z_gaps else None
    if report.message:
        verdict["message"] = report.message
    return verdict


@dataclass(frozen=True)
class MarginAudit:
    """Margins and tracking quality over a completed trace."""

    min_margin: tuple[float, ...]
    mean_margin: tuple[float, ...]
    max_tracking_error: tuple[float, ...]
    violation_intervals: tuple[tuple[float, float, int], ...]  # (start, end, pair)


def audit_margins(trace: SimTrace) -> MarginAudit:
    """Per-pair margin statistics and violation intervals from a trace."""
    if trace.margins.size == 0:
        return MarginAudit((), (), (), ())
    mins = tuple(float(x) for x in trace.margins.min(axis=0))
    means = tuple(float(x) for x in trace.margins.mean(axis=0))
    errs = (
        tuple(float(x) for x in trace.tracking_error_max)
        if trace.tracking_error_max is not None
        else ()
    )
    intervals = []
    for pair in range(trace.margins.shape[1]):
        bad = trace.margins[:, pair] < 0.0
        start = None
        for r, flag in enumerate(bad):
            if flag and start is None:
                start = trace.times[r]
            elif not flag and start is not None:
                intervals.append((float(start), float(trace.times[r]), pair + 1))
                start = None
        if start is not None:
            intervals.append((float(start), float(trace.times[-1]), pair + 1))
    return MarginAudit(mins, means, errs, tuple(intervals))
