"""Continuous moving-trap model of the geometric and topological gates.

An electron follows the minimum of a 2D harmonic trap whose centre is
dragged around a closed path.  A second, stationary electron repels it with
the bare Coulomb potential ``k_e e^2 / r``.  Positions are in metres.

Inside the minimizers lengths are measured in units of
``ell = (k_e e^2 / (m omega^2))**(1/3)``, where the potential becomes
``|x - c|^2 / 2 + 1 / |x - q|``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import constants
from scipy.optimize import brentq, minimize_scalar

from .analysis import GateReport, TargetGate, gate_report
from .errors import AdiabaticityError, ArgumentError, DegenerateGeometryError

ELECTRON_MASS = constants.m_e
COULOMB_CONSTANT = constants.e ** 2 / (4 * math.pi * constants.epsilon_0)  # k_e e^2, N m^2
E_OVER_HBAR = constants.e / constants.hbar
E_OVER_H = constants.e / constants.h

MIN_PATH_POINTS = 16
JUMP_FACTOR = 10.0


def displacement_closed_form(omega: float, mass: float = ELECTRON_MASS,
                             coulomb_constant: float = COULOMB_CONSTANT) -> float:
    return (coulomb_constant / (mass * omega ** 2)) ** (1.0 / 3.0)


def equilibrium_displacement(omega: float, mass: float = ELECTRON_MASS,
                             coulomb_constant: float = COULOMB_CONSTANT) -> float:
    """Distance of the trapped electron from a second electron at the trap centre.

    Minimizes ``m omega^2 x^2 / 2 + k_e e^2 / x`` over ``x > 0``: a bounded
    Brent search brackets the minimum, then the root of the derivative is
    polished with ``brentq`` (a value-only search cannot resolve the
    minimizer beyond about 1e-8 relative).
    """
    if not omega > 0 or not math.isfinite(omega):
        raise ArgumentError(f"omega must be positive and finite, got {omega!r}")
    if not mass > 0 or not coulomb_constant > 0:
        raise ArgumentError("mass and coulomb_constant must be positive")
    stiffness = mass * omega ** 2

    # bracket in log space; the scale is unknown a priori
    def energy(logx):
        x = math.exp(logx)
        return 0.5 * stiffness * x * x + coulomb_constant / x

    lo, hi = -60.0, 10.0
    res = minimize_scalar(energy, bounds=(lo, hi), method="bounded", options={"xatol": 1e-10})
    x0 = math.exp(res.x)

    def slope(x):
        return stiffness * x - coulomb_constant / (x * x)

    a, b = x0 * 0.5, x0 * 2.0
    while slope(a) > 0:
        a *= 0.5
    while slope(b) < 0:
        b *= 2.0
    return brentq(slope, a, b, xtol=1e-300, rtol=4 * np.finfo(float).eps, maxiter=500)


@dataclass(frozen=True)
class TrapModel:
    omega: float
    mass: float = ELECTRON_MASS
    coulomb_constant: float = COULOMB_CONSTANT
    other_electron: tuple[float, float] | None = None

    def __post_init__(self):
        for name in ("omega", "mass", "coulomb_constant"):
            v = getattr(self, name)
            if not (v > 0 and math.isfinite(v)):
                raise ArgumentError(f"{name} must be positive and finite, got {v!r}")
        if self.other_electron is not None:
            q = tuple(float(v) for v in self.other_electron)
            if len(q) != 2 or not all(map(math.isfinite, q)):
                raise ArgumentError("other_electron must be a finite 2D point")
            object.__setattr__(self, "other_electron", q)

    @property
    def length_scale(self) -> float:
        return displacement_closed_form(self.omega, self.mass, self.coulomb_constant)

    def without_other(self) -> "TrapModel":
        return TrapModel(self.omega, self.mass, self.coulomb_constant, None)


@dataclass(frozen=True)
class Trajectory:
    """Polyline of electron positions; a closed trajectory joins last to first."""

    points: np.ndarray
    closed: bool = True

    def __post_init__(self):
        pts = np.array(self.points, dtype=float)
        if pts.ndim != 2 or pts.shape[1] != 2:
            raise ArgumentError(f"points must have shape (M, 2), got {pts.shape}")
        if not np.all(np.isfinite(pts)):
            raise ArgumentError("trajectory has non-finite coordinates")
        if self.closed and len(pts) >= 2 and np.array_equal(pts[0], pts[-1]):
            pts = pts[:-1]
        if self.closed and len(pts) < 3:
            raise ArgumentError("a closed trajectory needs at least 3 distinct points")
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)

    def __len__(self):
        return len(self.points)

    def to_csv(self) -> str:
        lines = ["x,y"]
        lines += [f"{x!r},{y!r}" for x, y in self.points.tolist()]
        return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class FieldSpec:
    """Uniform field ``B`` (tesla) or an ideal solenoid at ``position`` carrying ``flux``."""

    kind: str
    B: float = 0.0
    position: tuple[float, float] | None = None
    flux: float = 0.0

    def __post_init__(self):
        if self.kind not in ("uniform", "solenoid"):
            raise ArgumentError(f"field kind must be 'uniform' or 'solenoid', got {self.kind!r}")
        if self.kind == "solenoid":
            if self.position is None or len(self.position) != 2 or \
                    not all(math.isfinite(float(v)) for v in self.position):
                raise ArgumentError("solenoid needs a finite 2D position")
            object.__setattr__(self, "position", tuple(float(v) for v in self.position))

    @classmethod
    def uniform(cls, B: float) -> "FieldSpec":
        return cls("uniform", B=float(B))

    @classmethod
    def solenoid(cls, position, flux: float) -> "FieldSpec":
        return cls("solenoid", position=tuple(position), flux=float(flux))


def circle_path(radius: float, n: int, center=(0.0, 0.0), turns: int = 1) -> np.ndarray:
    """``n`` counter-clockwise samples of a circle (without the closing repeat)."""
    t = 2 * np.pi * turns * np.arange(n) / n
    return np.column_stack([center[0] + radius * np.cos(t), center[1] + radius * np.sin(t)])


def _newton_minimize(c, q, x0, tol: float = 1e-13, max_iter: int = 200) -> tuple[float, float]:
    # scaled potential 0.5|x - c|^2 + 1/|x - q|, damped Newton with backtracking
    cx, cy = float(c[0]), float(c[1])
    qx, qy = float(q[0]), float(q[1])

    def energy(x, y):
        return 0.5 * ((x - cx) ** 2 + (y - cy) ** 2) + 1.0 / math.hypot(x - qx, y - qy)

    x, y = float(x0[0]), float(x0[1])
    for _ in range(max_iter):
        dx, dy = x - qx, y - qy
        r = math.hypot(dx, dy)
        r3, r5 = r ** 3, r ** 5
        gx = (x - cx) - dx / r3
        gy = (y - cy) - dy / r3
        if math.hypot(gx, gy) < tol:
            break
        hxx = 1.0 - 1.0 / r3 + 3.0 * dx * dx / r5
        hyy = 1.0 - 1.0 / r3 + 3.0 * dy * dy / r5
        hxy = 3.0 * dx * dy / r5
        det = hxx * hyy - hxy * hxy
        if det > 1e-12 and hxx > 0:
            sx = -(hyy * gx - hxy * gy) / det
            sy = -(hxx * gy - hxy * gx) / det
        else:
            # indefinite Hessian: fall back to steepest descent
            sx, sy = -gx, -gy
        e0 = energy(x, y)
        slope = gx * sx + gy * sy
        alpha = 1.0
        while alpha > 1e-12:
            tx, ty = x + alpha * sx, y + alpha * sy
            if (tx, ty) != (qx, qy) and energy(tx, ty) <= e0 + 1e-4 * alpha * slope:
                break
            alpha *= 0.5
        x, y = x + alpha * sx, y + alpha * sy
    return x, y


def adiabatic_trajectory(model: TrapModel, trap_path, exclusion_radius: float | None = None) -> Trajectory:
    """Follow the potential minimum as the trap centre moves along ``trap_path``.

    Parameters
    ----------
    model : TrapModel
    trap_path : array_like, shape (M, 2)
        Closed path of trap centres (metres), ``M >= 16``; the closing
        segment back to the first point is implied.
    exclusion_radius : float, optional
        Minimum allowed distance between the trap path and the other
        electron; defaults to a tenth of the equilibrium displacement.

    Raises
    ------
    AdiabaticityError
        If the tracked minimum jumps by more than ten trap-path steps.
    """
    path = np.array(trap_path, dtype=float)
    if path.ndim != 2 or path.shape[1] != 2 or not np.all(np.isfinite(path)):
        raise ArgumentError("trap_path must be a finite (M, 2) array")
    if len(path) >= 2 and np.array_equal(path[0], path[-1]):
        path = path[:-1]
    if len(path) < MIN_PATH_POINTS:
        raise ArgumentError(f"trap_path needs at least {MIN_PATH_POINTS} points, got {len(path)}")
    if model.other_electron is None:
        return Trajectory(path.copy(), closed=True)

    ell = model.length_scale
    q = np.asarray(model.other_electron) / ell
    c_all = path / ell
    radius = 0.1 if exclusion_radius is None else exclusion_radius / ell
    dist = _segment_distances(np.vstack([c_all, c_all[:1]]), q)
    if np.min(dist) < radius:
        raise ArgumentError(
            f"trap path passes within {np.min(dist) * ell:.3e} m of the other electron "
            f"(exclusion radius {radius * ell:.3e} m)")

    steps = np.linalg.norm(np.diff(np.vstack([c_all, c_all[:1]]), axis=0), axis=1)
    max_step = float(np.max(steps))
    # first point: start pushed away from q by the far-field Coulomb shift
    d0 = c_all[0] - q
    x = c_all[0] + d0 / np.linalg.norm(d0) ** 3
    out = np.empty_like(c_all)
    prev = None
    for k, c in enumerate(c_all):
        x = np.array(_newton_minimize(c, q, x))
        if prev is not None and np.linalg.norm(x - prev) > JUMP_FACTOR * max_step:
            raise AdiabaticityError(
                f"minimum jumped by {np.linalg.norm(x - prev) * ell:.3e} m at trap point {k}")
        out[k] = x
        prev = x
    if np.linalg.norm(out[0] - out[-1]) > JUMP_FACTOR * max_step:
        raise AdiabaticityError("trajectory does not close continuously")
    return Trajectory(out * ell, closed=True)


def _segment_distances(poly: np.ndarray, p: np.ndarray) -> np.ndarray:
    a, b = poly[:-1], poly[1:]
    ab = b - a
    denom = np.einsum("ij,ij->i", ab, ab)
    t = np.clip(np.einsum("ij,ij->i", p - a, ab) / np.where(denom > 0, denom, 1.0), 0.0, 1.0)
    return np.linalg.norm(a + t[:, None] * ab - p, axis=1)


def enclosed_area(traj: Trajectory) -> float:
    """Signed shoelace area, positive for counter-clockwise traversal."""
    if not traj.closed:
        raise ArgumentError("enclosed_area needs a closed trajectory")
    x, y = traj.points[:, 0], traj.points[:, 1]
    # centre first to limit cancellation
    x = x - x.mean()
    y = y - y.mean()
    return 0.5 * float(np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y))


def winding_number(traj: Trajectory, p, delta: float | None = None) -> int:
    """Number of counter-clockwise turns of ``traj`` around point ``p``.

    Raises ``DegenerateGeometryError`` if ``p`` lies within ``delta`` of the
    polyline (default: 1e-12 of the bounding-box diagonal).
    """
    if not traj.closed:
        raise ArgumentError("winding_number needs a closed trajectory")
    p = np.asarray(p, dtype=float)
    pts = traj.points
    if delta is None:
        delta = 1e-12 * float(np.linalg.norm(pts.max(axis=0) - pts.min(axis=0)))
    closed = np.vstack([pts, pts[:1]])
    if np.min(_segment_distances(closed, p)) <= delta:
        raise DegenerateGeometryError(f"point {p.tolist()} lies on the trajectory")
    v = closed - p
    a, b = v[:-1], v[1:]
    cross = a[:, 0] * b[:, 1] - a[:, 1] * b[:, 0]
    dot = np.einsum("ij,ij->i", a, b)
    total = float(np.sum(np.arctan2(cross, dot)))
    return int(round(total / (2 * np.pi)))


def ab_phase(traj: Trajectory, field: FieldSpec, units: str = "natural",
             convention: str = "hbar") -> float:
    """Aharonov-Bohm phase of a closed trajectory, in radians.

    ``units="natural"`` sets ``e/hbar = 1`` so the phase is ``B * area`` or
    ``winding * flux``.  ``units="si"`` multiplies by ``e/hbar``
    (``convention="hbar"``) or by ``e/h`` (``convention="h"``).
    """
    if units == "natural":
        scale = 1.0
    elif units == "si":
        if convention == "hbar":
            scale = E_OVER_HBAR
        elif convention == "h":
            scale = E_OVER_H
        else:
            raise ArgumentError(f"convention must be 'hbar' or 'h', got {convention!r}")
    else:
        raise ArgumentError(f"units must be 'natural' or 'si', got {units!r}")
    if field.kind == "uniform":
        return scale * field.B * enclosed_area(traj)
    return scale * winding_number(traj, field.position) * field.flux


@dataclass(frozen=True)
class GeometricGateResult:
    report: GateReport
    free: Trajectory
    repelled: Trajectory
    phi1: float
    phi2: float
    phases_si: dict = field(default_factory=dict)


def geometric_gate_report(model: TrapModel, trap_path, field: FieldSpec,
                          units: str = "natural",
                          exclusion_radius: float | None = None) -> GeometricGateResult:
    """Conditional-loop gate from the trajectories with and without the repeller.

    ``phi1`` is the phase of the free loop (qubit 2 in ``|1>``, dot l2
    empty) and ``phi2`` that of the repelled loop (qubit 2 in ``|0>``).
    The gate is ``diag(1, 1, e^{i phi2}, e^{i phi1})``, whose entangling
    phase is ``phi1 - phi2``.
    """
    if model.other_electron is None:
        raise ArgumentError("geometric gate needs the other electron's position")
    free = adiabatic_trajectory(model.without_other(), trap_path)
    repelled = adiabatic_trajectory(model, trap_path, exclusion_radius)
    phi1 = ab_phase(free, field, units)
    phi2 = ab_phase(repelled, field, units)
    notes = []
    if field.kind == "solenoid":
        w1 = winding_number(free, field.position)
        w2 = winding_number(repelled, field.position)
        if w1 == w2:
            where = "neither loop" if w1 == 0 else "both loops"
            notes.append(f"solenoid is enclosed by {where}; the gate is not topological")
    phases_si = {}
    if units == "si":
        phases_si = {conv: (ab_phase(free, field, "si", conv), ab_phase(repelled, field, "si", conv))
                     for conv in ("hbar", "h")}
    projected = np.diag(np.exp(1j * np.array([0.0, 0.0, phi2, phi1])))
    report = gate_report(projected, np.zeros(4), TargetGate.geometric(phi1, phi2), notes)
    return GeometricGateResult(report, free, repelled, phi1, phi2, phases_si)
