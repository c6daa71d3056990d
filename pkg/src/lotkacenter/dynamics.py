"""Adaptive integration, return maps and limit-cycle detection.

The stepper is an embedded Dormand-Prince 5(4) pair on plain scalars.
Two behaviors are deliberate rather than generic:

* a positivity guard rejects and halves any step whose stages leave the
  open quadrant (or overflow), so power-law evaluation never sees a
  non-positive base;
* the step size is capped at a multiple of sqrt(relTol) times the local
  rotation period, which ties conserved-quantity drift to roughly
  relTol**2.5 and keeps tolerance halving an honest accuracy knob.

Section crossings are located on the cubic Hermite interpolant of the
bracketing step and then polished by Newton iterations that re-integrate
a substep, so the reported crossing lies on the numerical orbit itself.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np
from scipy.optimize import brentq

from .errors import BadBase, IntegrationFailure, NoReturn, PreconditionViolated
from .focal import FocalValues, closed_form_focal
from .model import CanonicalParams, Point, jacobian

__all__ = [
    "BautinResult",
    "CycleRecord",
    "CycleStability",
    "LimitCycleReport",
    "ReturnRecord",
    "TerminationReason",
    "Trajectory",
    "bautin_scenario",
    "detect_limit_cycles",
    "displacement_profile",
    "format_cycle_report",
    "format_return_record",
    "format_trajectory",
    "integrate",
    "poincare_return",
    "section_displacement",
]

STEP_BUDGET_DEFAULT = 10_000_000

# Dormand-Prince 5(4) tableau
_A2 = (1 / 5,)
_A3 = (3 / 40, 9 / 40)
_A4 = (44 / 45, -56 / 15, 32 / 9)
_A5 = (19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729)
_A6 = (9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656)
_B = (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84)
_E = (71 / 57600, 0.0, -71 / 16695, 71 / 1920, -17253 / 339200, 22 / 525, -1 / 40)

#: cap h <= _CAP_GAMMA * sqrt(relTol) * T_char (and never above _CAP_STATIC * T_char)
_CAP_GAMMA = 100.0
_CAP_STATIC = 0.08

# orbits leaving this box count as escaped; the bound is generous for
# every bounded orbit in scope but stops stiff boundary creep early
_ESCAPE_LOW = 1e-4
_ESCAPE_HIGH = 1e4


class TerminationReason(Enum):
    TIME_LIMIT = "TimeLimit"
    SECTION_RETURN = "SectionReturn"
    QUADRANT_ESCAPE = "QuadrantEscape"
    STEP_BUDGET = "StepBudget"


class CycleStability(Enum):
    STABLE = "Stable"
    UNSTABLE = "Unstable"


@dataclass(frozen=True)
class Trajectory:
    times: np.ndarray
    points: np.ndarray  # shape (n, 2)
    n_accepted: int
    n_rejected: int
    termination: TerminationReason

    def __post_init__(self) -> None:
        self.times.setflags(write=False)
        self.points.setflags(write=False)


@dataclass(frozen=True)
class ReturnRecord:
    """One full turn of the return map on the section through (1, 1)."""

    start_x: float
    return_x: float
    displacement: float
    return_time: float
    crossings: int


@dataclass(frozen=True)
class CycleRecord:
    radius: float
    displacement: float
    stability: CycleStability


@dataclass(frozen=True)
class LimitCycleReport:
    cycles: tuple[CycleRecord, ...]
    scan_radii: tuple[float, ...]
    scan_displacements: tuple[float, ...]


@dataclass(frozen=True)
class BautinResult:
    """Staged evidence for the coexisting-cycles construction."""

    base_params: CanonicalParams
    base_focal: FocalValues
    stage1_params: CanonicalParams
    stage1_focal: FocalValues
    stage1_report: LimitCycleReport
    stage2_params: CanonicalParams
    stage2_eps: float
    stage2_report: LimitCycleReport


def _rhs_factory(c: CanonicalParams):
    a1, b1, a3, b3, K = c.a1, c.b1, c.a3, c.b3, c.K

    def rhs(x: float, y: float) -> tuple[float, float] | None:
        if not (0.0 < x < math.inf and 0.0 < y < math.inf):
            return None
        try:
            fx = x**a1 * y**b1 - 1.0
            fy = K * (1.0 - x**a3 * y**b3)
        except OverflowError:
            return None
        if math.isfinite(fx) and math.isfinite(fy):
            return fx, fy
        return None

    return rhs


def _char_period(c: CanonicalParams) -> float:
    det = jacobian(c).determinant
    rate = max(0.05, math.sqrt(abs(det)), 1e-3)
    return 2.0 * math.pi / rate


def _step_cap(c: CanonicalParams, rel_tol: float) -> float:
    t_char = _char_period(c)
    return t_char * min(_CAP_STATIC, _CAP_GAMMA * math.sqrt(rel_tol))


@dataclass
class _StepResult:
    x: float
    y: float
    fx: float
    fy: float
    err: tuple[float, float]


def _try_step(rhs, x, y, fx, fy, h) -> _StepResult | None:
    """One DP54 step; None when a stage left the admissible region."""
    k1x, k1y = fx, fy

    xs = x + h * (_A2[0] * k1x)
    ys = y + h * (_A2[0] * k1y)
    f = rhs(xs, ys)
    if f is None:
        return None
    k2x, k2y = f

    xs = x + h * (_A3[0] * k1x + _A3[1] * k2x)
    ys = y + h * (_A3[0] * k1y + _A3[1] * k2y)
    f = rhs(xs, ys)
    if f is None:
        return None
    k3x, k3y = f

    xs = x + h * (_A4[0] * k1x + _A4[1] * k2x + _A4[2] * k3x)
    ys = y + h * (_A4[0] * k1y + _A4[1] * k2y + _A4[2] * k3y)
    f = rhs(xs, ys)
    if f is None:
        return None
    k4x, k4y = f

    xs = x + h * (_A5[0] * k1x + _A5[1] * k2x + _A5[2] * k3x + _A5[3] * k4x)
    ys = y + h * (_A5[0] * k1y + _A5[1] * k2y + _A5[2] * k3y + _A5[3] * k4y)
    f = rhs(xs, ys)
    if f is None:
        return None
    k5x, k5y = f

    xs = x + h * (_A6[0] * k1x + _A6[1] * k2x + _A6[2] * k3x + _A6[3] * k4x + _A6[4] * k5x)
    ys = y + h * (_A6[0] * k1y + _A6[1] * k2y + _A6[2] * k3y + _A6[3] * k4y + _A6[4] * k5y)
    f = rhs(xs, ys)
    if f is None:
        return None
    k6x, k6y = f

    x1 = x + h * (_B[0] * k1x + _B[2] * k3x + _B[3] * k4x + _B[4] * k5x + _B[5] * k6x)
    y1 = y + h * (_B[0] * k1y + _B[2] * k3y + _B[3] * k4y + _B[4] * k5y + _B[5] * k6y)
    f = rhs(x1, y1)
    if f is None:
        return None
    k7x, k7y = f

    ex = h * (
        _E[0] * k1x + _E[2] * k3x + _E[3] * k4x + _E[4] * k5x + _E[5] * k6x + _E[6] * k7x
    )
    ey = h * (
        _E[0] * k1y + _E[2] * k3y + _E[3] * k4y + _E[4] * k5y + _E[5] * k6y + _E[6] * k7y
    )
    return _StepResult(x=x1, y=y1, fx=k7x, fy=k7y, err=(ex, ey))


@dataclass(frozen=True)
class _Section:
    axis: int  # 0 for x = 1, 1 for y = 1
    direction: float
    t_min: float


@dataclass
class _SectionHit:
    t: float
    x: float
    y: float
    crossings: int


def _hermite_component(s0, f0, s1, f1, h, theta, idx):
    t2 = theta * theta
    t3 = t2 * theta
    return (
        (2.0 * t3 - 3.0 * t2 + 1.0) * s0[idx]
        + (t3 - 2.0 * t2 + theta) * h * f0[idx]
        + (-2.0 * t3 + 3.0 * t2) * s1[idx]
        + (t3 - t2) * h * f1[idx]
    )


def _drive(
    c: CanonicalParams,
    x0: float,
    y0: float,
    t_max: float,
    rel_tol: float,
    *,
    step_budget: int = STEP_BUDGET_DEFAULT,
    section: _Section | None = None,
    record: bool = False,
    low: float = _ESCAPE_LOW,
    high: float = _ESCAPE_HIGH,
):
    """Shared stepping loop.  Returns (reason, hit, stats, samples)."""
    if not 1e-13 <= rel_tol <= 1e-3:
        raise ValueError(f"rel_tol must lie in [1e-13, 1e-3], got {rel_tol}")
    rhs = _rhs_factory(c)
    atol = 1e-3 * rel_tol
    h_cap = _step_cap(c, rel_tol)
    h_min = 1e-14 * _char_period(c)

    f = rhs(x0, y0)
    if f is None:
        raise IntegrationFailure(f"field not evaluable at start ({x0}, {y0})")
    fx, fy = f
    t, x, y = 0.0, x0, y0
    h = min(h_cap, 0.01 * _char_period(c), t_max if t_max > 0 else h_cap)
    n_acc = 0
    n_rej = 0
    crossings = 0
    times = [t] if record else []
    pts = [(x, y)] if record else []
    hit: _SectionHit | None = None
    reason = TerminationReason.TIME_LIMIT

    while t < t_max:
        if n_acc + n_rej >= step_budget:
            reason = TerminationReason.STEP_BUDGET
            break
        h = min(h, t_max - t)
        if h < h_min:
            if t_max - t < 100.0 * h_min:
                reason = TerminationReason.TIME_LIMIT
            elif x < 10.0 * low or y < 10.0 * low or x > 0.1 * high or y > 0.1 * high:
                reason = TerminationReason.QUADRANT_ESCAPE
            else:
                reason = TerminationReason.STEP_BUDGET
            break
        step = _try_step(rhs, x, y, fx, fy, h)
        if step is None:
            n_rej += 1
            h *= 0.5
            continue
        sc_x = atol + rel_tol * max(abs(x), abs(step.x))
        sc_y = atol + rel_tol * max(abs(y), abs(step.y))
        err = math.sqrt(0.5 * ((step.err[0] / sc_x) ** 2 + (step.err[1] / sc_y) ** 2))
        if err > 1.0:
            n_rej += 1
            h *= max(0.2, 0.9 * err**-0.2)
            continue

        t1 = t + h
        if section is not None:
            g0 = (x, y)[section.axis] - 1.0
            g1 = (step.x, step.y)[section.axis] - 1.0
            crossed = (g0 > 0.0 > g1) or (g0 < 0.0 < g1) or (g1 == 0.0 and g0 != 0.0)
            if crossed and t1 > section.t_min:
                hit_t, hit_x, hit_y, hit_f = _locate_crossing(
                    rhs, t, (x, y), (fx, fy), step, h, section.axis
                )
                if hit_t > section.t_min:
                    crossings += 1
                    if math.copysign(1.0, hit_f) == section.direction:
                        hit = _SectionHit(t=hit_t, x=hit_x, y=hit_y, crossings=crossings)
                        if record:
                            times.append(hit_t)
                            pts.append((hit_x, hit_y))
                        reason = TerminationReason.SECTION_RETURN
                        break

        t, x, y, fx, fy = t1, step.x, step.y, step.fx, step.fy
        n_acc += 1
        if record:
            times.append(t)
            pts.append((x, y))
        if not (low < x < high and low < y < high):
            reason = TerminationReason.QUADRANT_ESCAPE
            break
        h = min(h_cap, h * min(5.0, max(0.2, 0.9 * err**-0.2 if err > 0 else 5.0)))

    else:
        reason = TerminationReason.TIME_LIMIT

    return reason, hit, (n_acc, n_rej), (times, pts), (t, x, y)


def _locate_crossing(rhs, t0, s0, f0, step, h, axis):
    """Root of component ``axis`` minus 1 inside the step, polished so the
    returned state lies on the numerical orbit."""
    s1 = (step.x, step.y)
    f1 = (step.fx, step.fy)
    lo, hi = 0.0, 1.0
    glo = s0[axis] - 1.0
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        gm = _hermite_component(s0, f0, s1, f1, h, mid, axis) - 1.0
        if gm == 0.0:
            lo = hi = mid
            break
        if (glo > 0.0) == (gm > 0.0):
            lo, glo = mid, gm
        else:
            hi = mid
    dt = 0.5 * (lo + hi) * h

    # Newton on the re-integrated substep
    xr, yr, fr = s1[0], s1[1], f1
    for _ in range(6):
        dt = min(max(dt, 0.0), h)
        sub = _try_step(rhs, s0[0], s0[1], f0[0], f0[1], dt)
        if sub is None:
            break
        xr, yr = sub.x, sub.y
        fr = (sub.fx, sub.fy)
        g = (xr, yr)[axis] - 1.0
        if abs(g) <= 1e-14:
            break
        deriv = fr[axis]
        if deriv == 0.0:
            break
        dt -= g / deriv
    return t0 + dt, xr, yr, fr[axis]


def integrate(
    c: CanonicalParams,
    start: Point | tuple[float, float],
    t_max: float,
    rel_tol: float = 1e-9,
    *,
    step_budget: int = STEP_BUDGET_DEFAULT,
) -> Trajectory:
    """Integrate forward for ``t_max`` time units, recording accepted steps."""
    x0, y0 = (start.x, start.y) if isinstance(start, Point) else start
    if not (x0 > 0.0 and y0 > 0.0):
        raise PreconditionViolated(f"start ({x0}, {y0}) is not strictly positive")
    if t_max <= 0.0:
        raise ValueError(f"t_max must be positive, got {t_max}")
    reason, _, (n_acc, n_rej), (times, pts), _ = _drive(
        c, x0, y0, t_max, rel_tol, step_budget=step_budget, record=True
    )
    return Trajectory(
        times=np.asarray(times),
        points=np.asarray(pts),
        n_accepted=n_acc,
        n_rejected=n_rej,
        termination=reason,
    )


def format_trajectory(tr: Trajectory) -> str:
    lines = ["t\tx\ty"]
    for t, (x, y) in zip(tr.times, tr.points):
        lines.append(f"{float(t)!r}\t{float(x)!r}\t{float(y)!r}")
    return "\n".join(lines)


def format_return_record(rec: ReturnRecord) -> str:
    return "\n".join(
        [
            f"start_x = {rec.start_x!r}",
            f"return_x = {rec.return_x!r}",
            f"displacement = {rec.displacement!r}",
            f"return_time = {rec.return_time!r}",
            f"crossings = {rec.crossings}",
        ]
    )


def format_cycle_report(report: LimitCycleReport) -> str:
    lines = [f"cycles = {len(report.cycles)}"]
    for i, cyc in enumerate(report.cycles):
        lines.append(
            f"cycle[{i}]: radius = {cyc.radius!r}  section_x = {1.0 + cyc.radius!r}  "
            f"residual = {cyc.displacement!r}  stability = {cyc.stability.value}"
        )
    signs = "".join(
        "?" if not math.isfinite(d) else ("+" if d > 0 else "-" if d < 0 else "0")
        for d in report.scan_displacements
    )
    lines.append(f"scan sign pattern over {len(report.scan_radii)} radii: {signs}")
    return "\n".join(lines)


def _section_for(c: CanonicalParams, radius: float) -> tuple[_Section, float, float]:
    """Choose the transversal section and start point for a radius > 0."""
    use_x_section = abs(c.a3) <= 1e-9 * (1.0 + abs(c.a3))
    if use_x_section:
        x0, y0 = 1.0, 1.0 + radius
        axis = 0
    else:
        x0, y0 = 1.0 + radius, 1.0
        axis = 1
    rhs = _rhs_factory(c)
    f = rhs(x0, y0)
    if f is None:
        raise PreconditionViolated(f"field not evaluable at ({x0}, {y0})")
    g_rate = f[axis]
    if g_rate == 0.0:
        raise PreconditionViolated(
            "section is not transversal at the start point; "
            f"derivative of the section coordinate vanishes at ({x0}, {y0})"
        )
    direction = math.copysign(1.0, g_rate)
    t_min = 1e-8 * _char_period(c)
    return _Section(axis=axis, direction=direction, t_min=t_min), x0, y0


def poincare_return(
    c: CanonicalParams,
    x0: float,
    rel_tol: float = 1e-9,
    *,
    periods_budget: float = 50.0,
    step_budget: int = STEP_BUDGET_DEFAULT,
) -> ReturnRecord:
    """First return to the section through (1, 1) on the start side.

    ``x0`` is the in-section coordinate (x on the section y = 1; y on
    the fallback section x = 1 used when a3 = 0) and must exceed 1.
    """
    if not x0 > 1.0:
        raise PreconditionViolated(f"in-section coordinate must exceed 1, got {x0}")
    radius = x0 - 1.0
    section, sx, sy = _section_for(c, radius)
    t_max = periods_budget * _char_period(c)
    reason, hit, _, _, last = _drive(
        c, sx, sy, t_max, rel_tol, step_budget=step_budget, section=section
    )
    if hit is None:
        raise NoReturn(
            f"orbit from in-section coordinate {x0} did not return "
            f"({reason.value}; last state t={last[0]:.6g}, x={last[1]:.6g}, y={last[2]:.6g})"
        )
    ret_coord = (hit.x, hit.y)[1 - section.axis]
    return ReturnRecord(
        start_x=x0,
        return_x=ret_coord,
        displacement=ret_coord - x0,
        return_time=hit.t,
        crossings=hit.crossings,
    )


def section_displacement(c: CanonicalParams, radius: float, rel_tol: float = 1e-9) -> float:
    """Displacement of one return, parameterized by radius = coord - 1."""
    return poincare_return(c, 1.0 + radius, rel_tol).displacement


def displacement_profile(
    c: CanonicalParams, radii: list[float], rel_tol: float = 1e-9
) -> list[tuple[float, float]]:
    """(radius, displacement) pairs; NoReturn from any radius propagates."""
    return [(r, section_displacement(c, r, rel_tol)) for r in radii]


def detect_limit_cycles(
    c: CanonicalParams,
    r_min: float,
    r_max: float,
    n_scan: int,
    *,
    rel_tol: float = 1e-8,
    refine_rel_tol: float = 1e-10,
    noise_floor: float = 1e-7,
    target_residual: float = 1e-10,
) -> LimitCycleReport:
    """Scan the displacement over log-spaced radii and refine each sign
    change to a periodic orbit.

    Sign changes whose endpoints both sit under ``noise_floor`` are
    treated as integration noise (an exact center wobbles at the drift
    level).  Radii that fail to return contribute NaN and break the scan
    into independently searched segments.
    """
    if not (0.0 < r_min < r_max):
        raise ValueError(f"need 0 < r_min < r_max, got {r_min}, {r_max}")
    if n_scan < 2:
        raise ValueError(f"n_scan must be at least 2, got {n_scan}")
    radii = np.geomspace(r_min, r_max, n_scan)
    disp = np.empty(n_scan)
    for i, r in enumerate(radii):
        try:
            disp[i] = section_displacement(c, float(r), rel_tol)
        except (NoReturn, PreconditionViolated):
            disp[i] = math.nan

    cycles: list[CycleRecord] = []
    for i in range(n_scan - 1):
        d0, d1 = disp[i], disp[i + 1]
        if not (math.isfinite(d0) and math.isfinite(d1)):
            continue
        if d0 == 0.0 or (d0 > 0.0) == (d1 > 0.0):
            continue
        if max(abs(d0), abs(d1)) <= noise_floor:
            continue
        lo, hi = float(radii[i]), float(radii[i + 1])
        f_lo = section_displacement(c, lo, refine_rel_tol)
        f_hi = section_displacement(c, hi, refine_rel_tol)
        if f_lo == 0.0 or (f_lo > 0.0) == (f_hi > 0.0):
            continue
        root = brentq(
            lambda r: section_displacement(c, r, refine_rel_tol),
            lo,
            hi,
            xtol=1e-12,
            rtol=8.9e-16,
        )
        d_root = section_displacement(c, float(root), refine_rel_tol)
        stability = CycleStability.STABLE if f_lo > 0.0 else CycleStability.UNSTABLE
        cycles.append(
            CycleRecord(radius=float(root), displacement=d_root, stability=stability)
        )

    return LimitCycleReport(
        cycles=tuple(cycles),
        scan_radii=tuple(float(r) for r in radii),
        scan_displacements=tuple(float(d) for d in disp),
    )


def _two_cycle_shape(report: LimitCycleReport) -> bool:
    return (
        len(report.cycles) == 2
        and report.cycles[0].stability is CycleStability.UNSTABLE
        and report.cycles[1].stability is CycleStability.STABLE
    )


def bautin_scenario(
    b1: float,
    a3: float,
    delta_k: float,
    delta_a1: float | None = None,
    *,
    r_min: float = 0.02,
    r_max: float = 1.5,
    n_scan: int = 30,
    rel_tol: float = 1e-8,
    refine_rel_tol: float = 1e-10,
    noise_floor: float = 1e-7,
    eps_seed: float = 5e-4,
) -> BautinResult:
    """Two-stage construction of coexisting small cycles.

    Stage one perturbs K away from 1 (keeping a1 = K, b3 = 1, so the
    trace stays zero) to make the first focal value positive over a
    negative second one, which births a stable cycle.  Stage two lowers
    a1 below K by ``delta_a1`` (bisected automatically when None) so the
    now-stable equilibrium sheds an additional unstable inner cycle.
    """
    base = CanonicalParams(a1=1.0, b1=b1, a3=a3, b3=1.0, K=1.0)
    try:
        base_focal = closed_form_focal(base)
    except PreconditionViolated as exc:
        raise BadBase(f"base (b1={b1}, a3={a3}) is not elliptic: {exc}") from exc
    if base_focal.L2 is None or base_focal.L2 >= 0.0:
        raise BadBase(
            f"base (b1={b1}, a3={a3}) needs a negative second focal value, "
            f"got {base_focal.L2}"
        )

    k1 = 1.0 + delta_k
    stage1 = CanonicalParams(a1=k1, b1=b1, a3=a3, b3=1.0, K=k1)
    stage1_focal = closed_form_focal(stage1)
    detect = lambda params, tol: detect_limit_cycles(  # noqa: E731
        params,
        r_min,
        r_max,
        n_scan,
        rel_tol=rel_tol,
        refine_rel_tol=tol,
        noise_floor=noise_floor,
    )
    stage1_report = detect(stage1, refine_rel_tol)

    def with_eps(eps: float) -> CanonicalParams:
        return CanonicalParams(a1=k1 - eps, b1=b1, a3=a3, b3=1.0, K=k1)

    def coarse_two(eps: float) -> bool:
        report = detect_limit_cycles(
            with_eps(eps),
            r_min,
            r_max,
            n_scan,
            rel_tol=rel_tol,
            refine_rel_tol=max(refine_rel_tol, 1e-9),
            noise_floor=noise_floor,
        )
        return _two_cycle_shape(report)

    if delta_a1 is None:
        eps = eps_seed
        for _ in range(7):
            if coarse_two(eps):
                break
            eps /= 3.0
        else:
            raise BadBase(
                f"no trace perturbation near {eps_seed} produced two cycles "
                f"for base (b1={b1}, a3={a3})"
            )
        # grow toward the fold where the two cycles merge, then back off
        ok = eps
        probe = eps * 2.0
        for _ in range(10):
            if not coarse_two(probe):
                break
            ok = probe
            probe *= 2.0
        else:
            probe = ok * 2.0
        lo, hi = ok, probe
        for _ in range(6):
            mid = 0.5 * (lo + hi)
            if coarse_two(mid):
                lo = mid
            else:
                hi = mid
        eps = 0.5 * lo
    else:
        eps = delta_a1

    stage2 = with_eps(eps)
    stage2_report = detect(stage2, refine_rel_tol)
    if delta_a1 is None and not _two_cycle_shape(stage2_report):
        for _ in range(5):
            eps *= 0.6
            stage2 = with_eps(eps)
            stage2_report = detect(stage2, refine_rel_tol)
            if _two_cycle_shape(stage2_report):
                break

    return BautinResult(
        base_params=base,
        base_focal=base_focal,
        stage1_params=stage1,
        stage1_focal=stage1_focal,
        stage1_report=stage1_report,
        stage2_params=stage2,
        stage2_eps=eps,
        stage2_report=stage2_report,
    )
