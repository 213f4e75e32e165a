"""Fixed load resistance: multiple steady states and their enumeration.

Fixing the external resistance R_load (instead of the ratio gamma) changes the
nonlocal constraint to H(theta) = |V| with

    H(theta) = I(theta) + S_load * y_c(theta),     S_load = R_load * A_c / L,

where I is the closed-form shooting function and y_c the hitting time.  H is
continuous with H(-inf) = 0 and H(+inf) = inf but need not be monotone, so the
equation can have several roots: each one is a distinct steady state with its
own effective load ratio.  This module scans H over a bracket, refines every
sign change, flags near-tangent stationary points, and materializes each root
into a full temperature solution.

For a constant kappa and a resistivity clamped linear above the hot end the
trajectory is an explicit trig/parabola splice; those closed forms are kept
here as cross-checks and as the generator of the worked nonuniqueness setup.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
from scipy.optimize import brentq, minimize_scalar

from .analytic import GeneratorSpec, shooting_function
from .errors import (
    DegenerateError,
    DomainError,
    InvalidMaterial,
    ScanIncomplete,
    ZeroVoltage,
)
from .ivp import (
    N_OUT,
    HittingTimeQuadrature,
    TemperatureSolution,
    _materialize,
    integrate_ivp,
    numeric_efficiency,
)
from .materials import ClampedLinear, Constant, MaterialPair

TOL_ROOT = 1e-9        # |H(theta) - |V|| at accepted simple roots
TOL_TANGENCY = 1e-6    # |H - |V|| below which a stationary point is a root
SCAN_SAMPLES = 2048    # default theta-scan resolution
# materialization integrates tighter than the general default so the
# reconstructed solutions satisfy the nonlocal constraint at tol_root
TOL_ODE_MATERIALIZE = 1e-12
_FLOOR_FACTOR = 1e3    # scan floor at -1e3 * sqrt(2r)


@dataclass(frozen=True)
class LoadResistanceProblem:
    """A generator spec driven against a fixed external resistance.

    R_load = 0 degenerates to the gamma = 0 ratio mode and is permitted for
    cross-checks (H reduces to I there).
    """

    spec: GeneratorSpec
    R_load: float

    def __post_init__(self):
        if self.R_load < 0:
            raise DomainError(f"R_load must be >= 0, got {self.R_load}")

    @property
    def S_load(self) -> float:
        return self.R_load * self.spec.A_c / self.spec.L

    @cached_property
    def _quadrature(self) -> HittingTimeQuadrature:
        return HittingTimeQuadrature(self.spec)


def H_of_theta(prob: LoadResistanceProblem, theta: float,
               method: str = "quadrature") -> float:
    """H(theta) = I(theta) + S_load * y_c(theta).

    method="quadrature" evaluates y_c by the phase-space energy quadrature
    (fast, near machine precision); method="ivp" re-detects the hitting time
    with the adaptive integrator as an independent check.
    """
    if prob.spec.V == 0:
        raise ZeroVoltage("H(theta) needs V != 0")
    I = shooting_function(prob.spec, theta)
    if prob.S_load == 0.0:
        return I
    if method == "quadrature":
        y_c = prob._quadrature.y_c(theta)
    elif method == "ivp":
        y_c = integrate_ivp(prob.spec, theta).y_c
    else:
        raise ValueError(f"unknown method {method!r}")
    return I + prob.S_load * y_c


@dataclass(frozen=True, eq=False)
class RootRecord:
    """One enumerated steady state of the fixed-load problem."""

    theta: float
    y_c: float
    R_total: float
    gamma_equiv: float
    eta: float
    tangency: bool
    H_residual: float
    solution: TemperatureSolution = field(repr=False)


@dataclass(frozen=True, eq=False)
class ScanDiagnostics:
    """Bracketing record of the H scan (also feeds the H-curve export)."""

    theta_lo: float
    theta_hi: float
    n_samples: int
    theta_grid: np.ndarray = field(repr=False)
    H_values: np.ndarray = field(repr=False)
    n_sign_changes: int = 0
    n_tangency_candidates: int = 0
    merged_roots: int = 0
    floor_hit: bool = False
    notes: tuple[str, ...] = ()


@dataclass(frozen=True, eq=False)
class SolutionSet:
    """All roots found at the scan resolution, sorted by theta.

    Root count is a claim at this resolution, not a global completeness
    proof; scan_diagnostics records the bracket that supports it.
    """

    roots: tuple[RootRecord, ...]
    scan_diagnostics: ScanDiagnostics

    def __len__(self):
        return len(self.roots)


def enumerate_solutions(prob: LoadResistanceProblem, *,
                        scan_samples: int = SCAN_SAMPLES,
                        tol_root: float = TOL_ROOT,
                        tol_tangency: float = TOL_TANGENCY,
                        tol_ode: float = TOL_ODE_MATERIALIZE,
                        n_out: int = N_OUT) -> SolutionSet:
    """Find all solutions of H(theta) = |V| at the given scan resolution.

    Sign changes on a uniform theta grid are refined by Brent's method to
    |H - |V|| <= tol_root; stationary points that touch the level within
    tol_tangency are reported as single flagged (tangency) roots.  Raises
    ScanIncomplete when no bracket exists anywhere in the scan window.
    """
    spec = prob.spec
    if spec.V == 0:
        raise ZeroVoltage("enumeration needs V != 0")
    target = abs(spec.V)
    r = spec.rk
    quadrature = prob._quadrature

    def g(th: float) -> float:
        return shooting_function(spec, th) + prob.S_load * quadrature.y_c(th) - target

    # bracket: H(|V|) > |V| always; extend downward until H < |V| or the floor
    theta_hi = target
    floor = -_FLOOR_FACTOR * math.sqrt(2.0 * r)
    theta_lo = -max(1.0, math.sqrt(2.0 * r))
    floor_hit = False
    while g(theta_lo) >= 0.0:
        if theta_lo <= floor:
            floor_hit = True
            break
        theta_lo = max(2.0 * theta_lo, floor)

    grid = np.linspace(theta_lo, theta_hi, scan_samples)
    gv = np.array([g(t) for t in grid])
    dtheta = grid[1] - grid[0]

    notes: list[str] = []
    found: list[tuple[float, bool, float]] = []  # (theta, tangency, |residual|)

    # simple roots from sign changes
    sign_change_cells = set()
    n_sign = 0
    for i in range(scan_samples - 1):
        a, b = float(gv[i]), float(gv[i + 1])
        if a == 0.0:
            found.append((float(grid[i]), False, 0.0))
            sign_change_cells.add(i)
            n_sign += 1
            continue
        if a * b < 0.0:
            th = brentq(g, float(grid[i]), float(grid[i + 1]),
                        xtol=1e-13 * max(1.0, abs(grid[i]) + abs(grid[i + 1])),
                        rtol=4 * np.finfo(float).eps, maxiter=200)
            res = g(th)
            for _ in range(5):  # secant polish if H is extremely steep here
                if abs(res) <= tol_root:
                    break
                step = 1e-9 * max(1.0, abs(th))
                slope = (g(th + step) - res) / step
                if slope == 0.0:
                    break
                th -= res / slope
                res = g(th)
            if abs(res) > tol_root:
                notes.append(f"root at theta={th:.6g} stuck at residual {res:.3e}")
            found.append((float(th), False, abs(res)))
            sign_change_cells.add(i)
            n_sign += 1
    if float(gv[-1]) == 0.0:
        found.append((float(grid[-1]), False, 0.0))
        n_sign += 1

    # tangency candidates: interior local minima of |g| away from brackets
    screen = max(1e-4 * max(1.0, target), tol_tangency)
    n_cand = 0
    for i in range(1, scan_samples - 1):
        if i in sign_change_cells or (i - 1) in sign_change_cells:
            continue
        ai, am, ap = abs(float(gv[i - 1])), abs(float(gv[i])), abs(float(gv[i + 1]))
        if am < ai and am <= ap and am <= screen:
            n_cand += 1
            res = minimize_scalar(lambda t: g(t) ** 2,
                                  bounds=(float(grid[i - 1]), float(grid[i + 1])),
                                  method="bounded",
                                  options={"xatol": 1e-12})
            th = float(res.x)
            val = abs(g(th))
            if val <= tol_tangency:
                found.append((th, True, val))

    # sort and merge near-duplicates (tangencies seen as a close crossing pair)
    found.sort(key=lambda t: t[0])
    merged = 0
    roots: list[tuple[float, bool, float]] = []
    for th, tang, res in found:
        if roots:
            prev_th, prev_tang, prev_res = roots[-1]
            gap = th - prev_th
            if gap <= 10.0 * tol_root:
                roots[-1] = (0.5 * (prev_th + th), prev_tang or tang,
                             max(prev_res, res))
                merged += 1
                notes.append(f"merged roots {prev_th:.9g} and {th:.9g}")
                continue
            if not (prev_tang or tang) and gap <= 2.0 * dtheta:
                mid = 0.5 * (prev_th + th)
                if abs(g(mid)) <= tol_tangency:
                    roots[-1] = (mid, True, abs(g(mid)))
                    merged += 1
                    notes.append(
                        f"crossing pair at theta~{mid:.6g} collapsed to a tangency"
                    )
                    continue
        roots.append((th, tang, res))

    diagnostics = ScanDiagnostics(
        theta_lo=float(theta_lo), theta_hi=float(theta_hi),
        n_samples=scan_samples, theta_grid=grid, H_values=gv + target,
        n_sign_changes=n_sign, n_tangency_candidates=n_cand,
        merged_roots=merged, floor_hit=floor_hit, notes=tuple(notes),
    )
    if not roots:
        raise ScanIncomplete(
            f"no bracket of H = |V| = {target:.6g} in "
            f"[{theta_lo:.6g}, {theta_hi:.6g}] "
            f"(H range [{float(gv.min()) + target:.6g}, "
            f"{float(gv.max()) + target:.6g}], floor_hit={floor_hit})",
            diagnostics=diagnostics,
        )

    records = []
    for th, tang, res in roots:
        traj = integrate_ivp(spec, th, tol_ode=tol_ode)
        sol = _materialize(spec, traj, R_load=prob.R_load, n_out=n_out)
        R_int = sol.R_total - prob.R_load
        records.append(RootRecord(
            theta=th, y_c=sol.y_c, R_total=sol.R_total,
            gamma_equiv=prob.R_load / R_int, eta=numeric_efficiency(sol),
            tangency=tang, H_residual=res, solution=sol,
        ))
    return SolutionSet(roots=tuple(records), scan_diagnostics=diagnostics)


# ---------------------------------------------------------------------------
# Closed forms for the clamped-resistivity construction (constant kappa,
# rho-hat(u) = rho_hat_h + M_hat * (u - u_h) for u >= u_h, constant below).
# The trajectory is a trigonometric arc above u_h glued to a parabola below;
# these are used as cross-checks and to build the worked nonuniqueness case.
# ---------------------------------------------------------------------------

def clamped_hitting_time(rho_hat_h: float, M_hat: float, delta_u: float,
                         theta: float) -> float:
    """Exact y_c(theta) for the clamped profile."""
    disc = math.sqrt(theta * theta + 2.0 * rho_hat_h * delta_u)
    if theta <= 0:
        return (theta + disc) / rho_hat_h
    sq = math.sqrt(M_hat)
    return 2.0 / sq * math.atan(sq * theta / rho_hat_h) + (disc - theta) / rho_hat_h


def clamped_H(rho_hat_h: float, M_hat: float, delta_u: float, S_load: float,
              theta: float) -> float:
    """Exact H(theta) for the clamped profile (r = rho_hat_h * delta_u)."""
    I = theta + math.sqrt(theta * theta + 2.0 * rho_hat_h * delta_u)
    return I + S_load * clamped_hitting_time(rho_hat_h, M_hat, delta_u, theta)


def clamped_profile_u(u_h: float, rho_hat_h: float, M_hat: float,
                      theta: float, y) -> np.ndarray:
    """Exact u(y) for the clamped profile: trig arc then parabola."""
    y = np.asarray(y, dtype=float)
    if theta <= 0:
        return u_h + theta * y - 0.5 * rho_hat_h * y * y
    sq = math.sqrt(M_hat)
    y0 = math.atan(sq * theta / rho_hat_h) / sq
    trig = (u_h + rho_hat_h / M_hat * (np.cos(sq * y) - 1.0)
            + theta / sq * np.sin(sq * y))
    s = y - 2.0 * y0
    para = u_h - theta * s - 0.5 * rho_hat_h * s * s
    return np.where(y <= 2.0 * y0, trig, para)


@dataclass(frozen=True)
class NonuniqueConstruction:
    """A fixed-load problem built to admit several steady states.

    theta1 is a guaranteed root with H'(theta1) < 0, so at least one more
    root exists above it (and one below, since H -> 0 at -inf).
    """

    problem: LoadResistanceProblem
    theta1: float
    M: float
    S_load: float
    alpha0: float
    H_prime_theta1: float


def construct_nonunique_example(kappa, T_h: float, T_c: float, rho_h: float, *,
                                L: float = 1.0, A_c: float = 1.0,
                                load_over_rho: float = 4.0) -> NonuniqueConstruction:
    """Build the clamped-resistivity nonuniqueness setup for constant kappa.

    Choices: theta1 with theta1/sqrt(theta1^2 + 2 rho_h du) = 1/2 (i.e.
    theta1^2 = 2 rho_h du / 3), ramp slope with M_hat theta1^2 / rho_h^2 = 16,
    and S_load / rho_h = load_over_rho > 51/13, which makes
    H'(theta1) = 3/2 - (13/34) * S_load/rho_h negative.  The voltage is set to
    |V| = H(theta1) exactly, so theta1 is a root by construction.
    """
    if not isinstance(kappa, Constant):
        raise InvalidMaterial(
            "the clamped construction needs a constant kappa (the ramp in T "
            "composes to a ramp in u only for an affine transform)"
        )
    if rho_h <= 0:
        raise InvalidMaterial(f"need rho_h > 0, got {rho_h}")
    if load_over_rho <= 51.0 / 13.0:
        raise InvalidMaterial(
            f"need S_load/rho_h > 51/13 ~ {51 / 13:.4f} for a guaranteed "
            f"descending branch, got {load_over_rho}"
        )
    du = kappa.c * (T_h - T_c)
    if du <= 0:
        raise DegenerateError("construction needs T_h > T_c")
    theta1 = math.sqrt(2.0 * rho_h * du / 3.0)
    M_hat = 16.0 * rho_h * rho_h / (theta1 * theta1)
    S_load = load_over_rho * rho_h
    alpha0 = clamped_H(rho_h, M_hat, du, S_load, theta1) / (T_h - T_c)
    rho = ClampedLinear(M=M_hat * kappa.c, T_pivot=T_h, v_pivot=rho_h)
    spec = GeneratorSpec(pair=MaterialPair(kappa=kappa, rho=rho, alpha0=alpha0),
                         T_h=T_h, T_c=T_c, L=L, A_c=A_c)
    problem = LoadResistanceProblem(spec=spec, R_load=S_load * L / A_c)
    return NonuniqueConstruction(
        problem=problem, theta1=theta1, M=M_hat * kappa.c, S_load=S_load,
        alpha0=alpha0, H_prime_theta1=1.5 - (13.0 / 34.0) * load_over_rho,
    )
