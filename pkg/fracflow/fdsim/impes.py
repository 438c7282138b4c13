"""Implicit-pressure, explicit-saturation stepping of the two-phase system."""

import logging
from dataclasses import dataclass, field, replace

import numpy as np
from scipy import sparse
from scipy.ndimage import maximum_filter1d
from scipy.sparse.linalg import spsolve

from fracflow.closure import (
    capillary_pressure,
    clamp_open,
    detach_closure,
    normalized_saturation,
    rel_perm,
)
from fracflow.closure.curves import _as_float_fluids
from fracflow.fdsim.exceptions import SimulationError, SingularSystemError, TimeStepUnderflowError
from fracflow.fdsim.grid import Grid, Medium
from fracflow.problem import FlowProblem

logger = logging.getLogger(__name__)

MIN_SUBSTEP = 1e-12
SOLVE_TOLERANCE = 1e-10
_SLOPE_GRID = 1001
# Slope envelope width in grid intervals
SLOPE_WINDOW = 51


@dataclass(frozen=True)
class SimSchedule:
    """Run length, CFL target and report times (seconds).

    Boundary pressures default to the problem's. ``inlet_rate`` (m³/s)
    replaces the inlet pressure with a fixed water injection rate spread
    over the inlet face by area.
    """

    t_end: float
    cfl: float = 0.5
    report_times: tuple[float, ...] = ()
    pressure_interval: float | None = None
    p_in: float | None = None
    p_out: float | None = None
    p_i: float | None = None
    inlet_rate: float | None = None
    max_upwind_iterations: int = 4

    def __post_init__(self):
        if self.t_end < 0.0:
            raise SimulationError(f"end time must be >= 0, got {self.t_end}")
        if not 0.0 < self.cfl <= 1.0:
            raise SimulationError(f"CFL target must be in (0, 1], got {self.cfl}")
        if self.inlet_rate is not None and self.inlet_rate < 0.0:
            raise SimulationError(f"inlet rate must be >= 0, got {self.inlet_rate}")


@dataclass(frozen=True, eq=False)
class FaceFlux:
    """Total fluxes and frozen upwind choices from one pressure solve."""

    total: np.ndarray
    up_w: np.ndarray
    up_nw: np.ndarray
    boundary_total: np.ndarray
    boundary_up_w: np.ndarray
    boundary_up_nw: np.ndarray
    iterations: int = 1


@dataclass(frozen=True, eq=False)
class FDState:
    """Per active cell water saturation and non-wetting pressure (Pa) at time t."""

    sw: np.ndarray
    p: np.ndarray
    t: float = 0.0
    flux: FaceFlux | None = None

    @property
    def snw(self) -> np.ndarray:
        return 1.0 - self.sw


@dataclass(frozen=True)
class StepReport:
    """Diagnostics of one pressure/saturation step."""

    t: float
    dt: float
    substeps: int
    water_balance_error: float
    transfer_imbalance: float
    clamp_violation: float
    upwind_iterations: int


@dataclass(eq=False)
class SimulationResult:
    """RF and inflow series plus saturation and pressure snapshots."""

    grid: Grid
    times: np.ndarray
    rf: np.ndarray
    q_inj: np.ndarray
    snapshot_times: np.ndarray
    sw_snapshots: list[np.ndarray]
    p_snapshots: list[np.ndarray]
    final: FDState
    reports: list[StepReport] = field(default_factory=list)

    def rf_at(self, t) -> np.ndarray:
        """RF interpolated linearly at arbitrary times."""
        return np.interp(t, self.times, self.rf)


@dataclass(frozen=True, eq=False)
class _Media:
    """Per active cell closures evaluated on demand."""

    grid: Grid
    matrix: object
    fracture: object
    fluids: object

    def closures(self):
        yield Medium.MATRIX, self.matrix
        yield Medium.FRACTURE, self.fracture

    def properties(self, sw: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Relative mobilities kr/mu of both phases and pc per cell."""
        media = self.grid.cell_medium
        lam_w, lam_nw, pc = np.zeros_like(sw), np.zeros_like(sw), np.zeros_like(sw)
        for code, f in self.closures():
            m = media == code
            if not m.any():
                continue
            S = normalized_saturation(sw[m], f.corey.s_wc, f.corey.s_nwr)
            krw, krnw = rel_perm(S, f.corey)
            lam_w[m] = krw / self.fluids.mu_w
            lam_nw[m] = krnw / self.fluids.mu_nw
            pc[m] = capillary_pressure(clamp_open(S), f)
        return lam_w, lam_nw, pc

    def bounds(self) -> tuple[np.ndarray, np.ndarray]:
        media = self.grid.cell_medium
        lo, hi = np.zeros(len(media)), np.ones(len(media))
        for code, f in self.closures():
            m = media == code
            lo[m], hi[m] = f.corey.s_wc, f.corey.s_max
        return lo, hi

    def inlet_state(self, cells: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Mobilities and pc of the injected state (s_w = 1 - s_nwr) per inlet cell."""
        media = self.grid.cell_medium[cells]
        lam_w, lam_nw, pc = np.zeros(len(cells)), np.zeros(len(cells)), np.zeros(len(cells))
        for code, f in self.closures():
            m = media == code
            krw, krnw = rel_perm(1.0, f.corey)
            lam_w[m] = krw / self.fluids.mu_w
            lam_nw[m] = krnw / self.fluids.mu_nw
            pc[m] = capillary_pressure(clamp_open(1.0), f)
        return lam_w, lam_nw, pc

    def slope_tables(self) -> dict:
        """Per medium envelopes of the advective and capillary secant slopes of the water flux.

        Each table holds one value per interval of a uniform normalized
        saturation grid: the largest secant slope within SLOPE_WINDOW.
        """
        S = np.linspace(0.0, 1.0, _SLOPE_GRID)
        tables = {}
        for code, f in self.closures():
            krw, krnw = rel_perm(S, f.corey)
            lw, ln = krw / self.fluids.mu_w, krnw / self.fluids.mu_nw
            lt = lw + ln
            safe = np.where(lt > 0.0, lt, 1.0)
            fw = np.where(lt > 0.0, lw / safe, S)
            mob = np.where(lt > 0.0, lw * ln / safe, 0.0)
            pc = capillary_pressure(clamp_open(S), f)
            ds = np.diff(S) * (1.0 - f.corey.s_wc - f.corey.s_nwr)
            adv = np.abs(np.diff(fw)) / ds
            cap = np.maximum(mob[:-1], mob[1:]) * np.abs(np.diff(pc)) / ds
            tables[code] = (
                maximum_filter1d(adv, SLOPE_WINDOW, mode="nearest"),
                maximum_filter1d(cap, SLOPE_WINDOW, mode="nearest"),
            )
        return tables

    def local_slopes(self, sw: np.ndarray, tables: dict) -> tuple[np.ndarray, np.ndarray]:
        """Look up the slope envelopes at each cell's current saturation."""
        media = self.grid.cell_medium
        adv, cap = np.zeros(len(sw)), np.zeros(len(sw))
        for code, f in self.closures():
            m = media == code
            if not m.any():
                continue
            S = normalized_saturation(sw[m], f.corey.s_wc, f.corey.s_nwr)
            i = np.clip((S * (_SLOPE_GRID - 1)).astype(int), 0, _SLOPE_GRID - 2)
            adv[m], cap[m] = tables[code][0][i], tables[code][1][i]
        return adv, cap


def _media(grid: Grid, problem: FlowProblem) -> _Media:
    return _Media(
        grid=grid,
        matrix=detach_closure(problem.matrix),
        fracture=detach_closure(problem.fracture),
        fluids=_as_float_fluids(problem.fluids),
    )


def initial_state(grid: Grid, problem: FlowProblem, schedule: SimSchedule | None = None) -> FDState:
    """Matrix at the initial saturation, fractures at their s_wc, uniform p_i."""
    p_i = problem.p_i if schedule is None or schedule.p_i is None else schedule.p_i
    media = grid.cell_medium
    sw = np.where(
        media == Medium.FRACTURE,
        float(detach_closure(problem.fracture).corey.s_wc),
        float(problem.initial_saturation),
    )
    return FDState(sw=sw.astype(float), p=np.full(grid.n_active, float(p_i)))


def _boundary_pressures(problem: FlowProblem, schedule: SimSchedule | None) -> tuple[float, float]:
    s = schedule or SimSchedule(t_end=0.0)
    p_in = problem.p_in if s.p_in is None else s.p_in
    p_out = problem.p_out if s.p_out is None else s.p_out
    return float(p_in), float(p_out)


@dataclass(frozen=True, eq=False)
class _Boundary:
    """Per boundary face: Dirichlet state or prescribed inflow."""

    cell: np.ndarray
    trans: np.ndarray
    p: np.ndarray
    pc: np.ndarray
    lam_w: np.ndarray
    lam_nw: np.ndarray
    dirichlet: np.ndarray
    inflow: np.ndarray
    inlet: np.ndarray


def _boundary(grid: Grid, media: _Media, problem: FlowProblem, schedule: SimSchedule | None) -> _Boundary:
    bf = grid.boundary_faces()
    p_in, p_out = _boundary_pressures(problem, schedule)
    n = len(bf.cell)
    inlet = ~bf.outlet
    lam_w, lam_nw, pc = np.zeros(n), np.zeros(n), np.zeros(n)
    lw_in, ln_in, pc_in = media.inlet_state(bf.cell[inlet])
    lam_w[inlet], lam_nw[inlet], pc[inlet] = lw_in, ln_in, pc_in
    # Inlet injects water at p_w = p_in; outlet has p_nw = p_w = p_out and no backflow
    p = np.where(inlet, p_in + pc, p_out)

    rate = schedule.inlet_rate if schedule is not None else None
    dirichlet = np.ones(n, dtype=bool)
    inflow = np.zeros(n)
    if rate is not None:
        dirichlet[inlet] = False
        inflow[inlet] = rate * bf.area[inlet] / bf.area[inlet].sum()
    return _Boundary(bf.cell, bf.trans, p, pc, lam_w, lam_nw, dirichlet, inflow, inlet)


def _upwind(values, a, b, up):
    return np.where(up, values[a], values[b])


def _solve_pressure(grid, faces, bnd, lam_w, lam_nw, pc, up_w, up_nw, bup_w, bup_nw):
    n = grid.n_active
    a, b, T = faces.a, faces.b, faces.trans
    lw = _upwind(lam_w, a, b, up_w)
    lt = lw + _upwind(lam_nw, a, b, up_nw)
    Tt = T * lt

    d = bnd.dirichlet
    c = bnd.cell
    blw = np.where(bup_w, lam_w[c], bnd.lam_w)
    blt = blw + np.where(bup_nw, lam_nw[c], bnd.lam_nw)
    bTt = np.where(d, bnd.trans * blt, 0.0)

    rows = np.concatenate([a, b, a, b, c])
    cols = np.concatenate([a, b, b, a, c])
    vals = np.concatenate([Tt, Tt, -Tt, -Tt, bTt])
    A = sparse.coo_matrix((vals, (rows, cols)), shape=(n, n)).tocsr()

    cap = T * lw * (pc[a] - pc[b])
    rhs = np.zeros(n)
    np.add.at(rhs, a, cap)
    np.add.at(rhs, b, -cap)
    np.add.at(rhs, c, np.where(d, bTt * bnd.p + bnd.trans * blw * (pc[c] - bnd.pc), bnd.inflow))

    diag = A.diagonal()
    if np.any(diag <= 0.0):
        bad = int(np.argmax(diag <= 0.0))
        raise SingularSystemError(
            f"pressure row {bad} has no mobile connection; cell at {grid.location(bad)} m"
        )
    p = spsolve(A, rhs)
    if not np.all(np.isfinite(p)):
        bad = int(np.argmax(~np.isfinite(p)))
        raise SingularSystemError(f"singular pressure system near cell at {grid.location(bad)} m")
    residual = np.linalg.norm(A @ p - rhs)
    scale = max(np.linalg.norm(rhs), np.linalg.norm(diag * p), 1e-300)
    if residual > SOLVE_TOLERANCE * scale:
        raise SingularSystemError(f"pressure solve residual {residual / scale:.3e} exceeds tolerance")
    return p


def _directions(faces, bnd, p, pc):
    a, b, c = faces.a, faces.b, bnd.cell
    up_w = (p[a] - pc[a]) >= (p[b] - pc[b])
    up_nw = p[a] >= p[b]
    bup_w = (p[c] - pc[c]) >= (bnd.p - bnd.pc)
    bup_nw = p[c] >= bnd.p
    return up_w, up_nw, bup_w, bup_nw


def pressure_step(
    grid: Grid,
    state: FDState,
    problem: FlowProblem,
    schedule: SimSchedule | None = None,
) -> FDState:
    """Solve the incompressible pressure equation for p_nw.

    Two-point fluxes with harmonic transmissibilities and phase-potential
    upwinding. Directions come from the previous solution and are refreshed
    until they stop changing.

    Raises:
        SingularSystemError: If the system cannot be solved to tolerance
    """
    media = _media(grid, problem)
    faces = grid.faces()
    bnd = _boundary(grid, media, problem, schedule)
    lam_w, lam_nw, pc = media.properties(state.sw)

    iterations = schedule.max_upwind_iterations if schedule is not None else 4
    dirs = _directions(faces, bnd, state.p, pc)
    p = state.p
    for it in range(1, iterations + 1):
        p = _solve_pressure(grid, faces, bnd, lam_w, lam_nw, pc, *dirs)
        new = _directions(faces, bnd, p, pc)
        if all(np.array_equal(x, y) for x, y in zip(dirs, new)):
            break
        dirs = new
    logger.debug(f"Pressure solve at t={state.t:.4g} s settled after {it} upwind passes")

    up_w, up_nw, bup_w, bup_nw = dirs
    a, b, c = faces.a, faces.b, bnd.cell
    lw = _upwind(lam_w, a, b, up_w)
    lt = lw + _upwind(lam_nw, a, b, up_nw)
    total = faces.trans * (lt * (p[a] - p[b]) - lw * (pc[a] - pc[b]))
    blw = np.where(bup_w, lam_w[c], bnd.lam_w)
    blt = blw + np.where(bup_nw, lam_nw[c], bnd.lam_nw)
    btotal = np.where(
        bnd.dirichlet,
        bnd.trans * (blt * (p[c] - bnd.p) - blw * (pc[c] - bnd.pc)),
        -bnd.inflow,
    )
    flux = FaceFlux(total, up_w, up_nw, btotal, bup_w, bup_nw, iterations=it)
    return replace(state, p=p, flux=flux)


def _water_fluxes(faces, bnd, flux, lam_w, lam_nw, pc):
    a, b, c = faces.a, faces.b, bnd.cell
    lw = _upwind(lam_w, a, b, flux.up_w)
    ln = _upwind(lam_nw, a, b, flux.up_nw)
    lt = lw + ln
    safe = np.where(lt > 0.0, lt, 1.0)
    fw = np.where(lt > 0.0, (lw / safe) * flux.total + faces.trans * (lw * ln / safe) * (pc[b] - pc[a]), 0.0)

    blw = np.where(flux.boundary_up_w, lam_w[c], bnd.lam_w)
    bln = np.where(flux.boundary_up_nw, lam_nw[c], bnd.lam_nw)
    blt = blw + bln
    bsafe = np.where(blt > 0.0, blt, 1.0)
    bfw = np.where(
        blt > 0.0,
        (blw / bsafe) * flux.boundary_total + bnd.trans * (blw * bln / bsafe) * (bnd.pc - pc[c]),
        0.0,
    )
    bfw = np.where(bnd.dirichlet, bfw, -bnd.inflow)
    return fw, bfw


def _cfl_step(grid, faces, bnd, flux, adv, cap, pv, cfl) -> float:
    rate = np.zeros(grid.n_active)
    throughput = adv[faces.a] * np.abs(flux.total) + cap[faces.a] * faces.trans
    np.add.at(rate, faces.a, throughput)
    np.add.at(rate, faces.b, adv[faces.b] * np.abs(flux.total) + cap[faces.b] * faces.trans)
    c = bnd.cell
    np.add.at(rate, c, adv[c] * np.abs(flux.boundary_total) + cap[c] * bnd.trans)
    positive = rate > 0.0
    if not positive.any():
        return np.inf
    return cfl * float(np.min(pv[positive] / rate[positive]))


def saturation_step(
    grid: Grid,
    state: FDState,
    problem: FlowProblem,
    dt: float,
    schedule: SimSchedule | None = None,
) -> tuple[FDState, StepReport]:
    """Advance s_w explicitly over ``dt`` with the fluxes of the last pressure solve.

    Substeps obey the CFL target. Total face fluxes and upwind directions
    stay fixed; mobilities and pc follow the current saturations.

    Raises:
        SimulationError: If no pressure solution is attached to the state
        TimeStepUnderflowError: If a CFL substep falls below MIN_SUBSTEP
    """
    if state.flux is None:
        raise SimulationError("saturation_step needs a state returned by pressure_step")
    cfl = schedule.cfl if schedule is not None else 0.5
    media = _media(grid, problem)
    faces = grid.faces()
    bnd = _boundary(grid, media, problem, schedule)
    pv = grid.pore_volume
    lo, hi = media.bounds()
    tables = media.slope_tables()

    sw = state.sw.copy()
    water0 = float(np.sum(pv * sw))
    influx = 0.0
    transfer = 0.0
    transfer_scale = 0.0
    violation = 0.0
    elapsed, substeps = 0.0, 0
    mf = faces.transfer
    media_codes = grid.cell_medium

    while elapsed < dt:
        adv, cap = media.local_slopes(sw, tables)
        dt_cfl = _cfl_step(grid, faces, bnd, state.flux, adv, cap, pv, cfl)
        if dt_cfl < MIN_SUBSTEP:
            raise TimeStepUnderflowError(
                f"CFL substep {dt_cfl:.3e} s below {MIN_SUBSTEP:.0e} s at t={state.t + elapsed:.4g} s"
            )
        last = dt_cfl >= dt - elapsed
        h = dt - elapsed if last else dt_cfl
        lam_w, lam_nw, pc = media.properties(sw)
        fw, bfw = _water_fluxes(faces, bnd, state.flux, lam_w, lam_nw, pc)
        div = np.zeros(grid.n_active)
        np.add.at(div, faces.a, fw)
        np.add.at(div, faces.b, -fw)
        np.add.at(div, bnd.cell, bfw)
        sw = sw - h * div / pv

        if mf.any():
            into_a = -fw[mf]
            frac_a = media_codes[faces.a[mf]] == Medium.FRACTURE
            matrix_side = np.where(frac_a, -into_a, into_a).sum()
            fracture_side = np.where(frac_a, into_a, -into_a).sum()
            transfer += abs(matrix_side + fracture_side) * h
            transfer_scale += np.abs(fw[mf]).sum() * h

        influx -= float(np.sum(bfw)) * h
        clipped = np.clip(sw, lo, hi)
        violation = max(violation, float(np.max(np.abs(clipped - sw), initial=0.0)))
        sw = clipped
        elapsed = dt if last else elapsed + h
        substeps += 1

    if violation > 1e-8:
        logger.warning(f"Saturation projected into mobile bounds by up to {violation:.3e} at t={state.t + dt:.4g} s")
    water1 = float(np.sum(pv * sw))
    total_pv = float(pv.sum())
    report = StepReport(
        t=state.t + dt,
        dt=dt,
        substeps=substeps,
        water_balance_error=abs(water1 - water0 - influx) / total_pv,
        transfer_imbalance=transfer / transfer_scale if transfer_scale > 0.0 else 0.0,
        clamp_violation=violation,
        upwind_iterations=state.flux.iterations,
    )
    return replace(state, sw=sw, t=state.t + dt), report


def recovery_factor(grid: Grid, sw: np.ndarray) -> float:
    """Pore-volume-weighted mean water saturation over matrix cells."""
    m = grid.cell_medium == Medium.MATRIX
    pv = grid.pore_volume[m]
    return float(np.sum(pv * sw[m]) / np.sum(pv))


def injection_rate(state: FDState, grid: Grid, problem: FlowProblem, schedule: SimSchedule | None) -> float:
    """Water inflow through the inlet face (m³/s) from the attached pressure solution."""
    media = _media(grid, problem)
    bnd = _boundary(grid, media, problem, schedule)
    lam_w, lam_nw, pc = media.properties(state.sw)
    _, bfw = _water_fluxes(grid.faces(), bnd, state.flux, lam_w, lam_nw, pc)
    return float(-np.sum(bfw[bnd.inlet]))


def _report_times(schedule: SimSchedule) -> np.ndarray:
    times = np.asarray(sorted(set(schedule.report_times)), dtype=float)
    return times[(times >= 0.0) & (times <= schedule.t_end)]


def simulate(problem: FlowProblem, grid: Grid, schedule: SimSchedule) -> SimulationResult:
    """Alternate pressure solves and saturation sweeps from t=0 to ``t_end``.

    RF and inflow are recorded after every pressure interval; snapshots at
    the report times, with inactive cells set to NaN.
    """
    state = initial_state(grid, problem, schedule)
    reports_at = _report_times(schedule)
    interval = schedule.pressure_interval or (schedule.t_end / 100.0 if schedule.t_end > 0 else 1.0)
    stops = np.unique(np.concatenate([reports_at, np.arange(interval, schedule.t_end, interval), [schedule.t_end]]))
    stops = stops[stops > 0.0]

    times, rf, q = [], [], []
    snap_t, sw_snaps, p_snaps = [], [], []
    reports: list[StepReport] = []

    def snapshot(s: FDState) -> None:
        snap_t.append(s.t)
        sw_snaps.append(grid.scatter(s.sw))
        p_snaps.append(grid.scatter(s.p))

    if reports_at.size and reports_at[0] == 0.0:
        snapshot(state)

    solved = pressure_step(grid, state, problem, schedule)
    times.append(0.0)
    rf.append(recovery_factor(grid, state.sw))
    q.append(injection_rate(solved, grid, problem, schedule))

    for stop in stops:
        state, report = saturation_step(grid, solved, problem, stop - solved.t, schedule)
        reports.append(report)
        logger.debug(
            f"t={state.t:.4g} s: {report.substeps} substeps, "
            f"balance {report.water_balance_error:.2e}, transfer {report.transfer_imbalance:.2e}"
        )
        solved = pressure_step(grid, state, problem, schedule)
        if np.any(np.isclose(reports_at, stop, rtol=0.0, atol=1e-12 * max(schedule.t_end, 1.0))):
            snapshot(solved)
        times.append(state.t)
        rf.append(recovery_factor(grid, state.sw))
        q.append(injection_rate(solved, grid, problem, schedule))

    logger.info(f"Simulated {schedule.t_end:.4g} s in {len(reports)} pressure steps; RF={rf[-1]:.4f}")
    return SimulationResult(
        grid=grid,
        times=np.asarray(times),
        rf=np.asarray(rf),
        q_inj=np.asarray(q),
        snapshot_times=np.asarray(snap_t),
        sw_snapshots=sw_snaps,
        p_snapshots=p_snaps,
        final=solved,
        reports=reports,
    )


def front_position(y: np.ndarray, sw: np.ndarray, level: float) -> float:
    """First position along ``y`` where the profile drops below ``level``.

    Linear interpolation between the bracketing cells; returns the last
    coordinate when the whole profile stays above the level.
    """
    below = np.nonzero(sw < level)[0]
    if below.size == 0:
        return float(y[-1])
    i = int(below[0])
    if i == 0:
        return float(y[0])
    y0, y1, s0, s1 = y[i - 1], y[i], sw[i - 1], sw[i]
    return float(y0 + (s0 - level) / (s0 - s1) * (y1 - y0))
