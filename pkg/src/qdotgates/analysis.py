"""Two-qubit gate extraction from full-space evolutions.

Computational states are ordered ``|00>, |01>, |10>, |11>`` as ``|q1 q2>``,
with ``|0>`` meaning the electron sits in the qubit's left dot.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.optimize import minimize_scalar

from .errors import ArgumentError, DegenerateGateError
from .fock import FockBasis
from .hamiltonian import wrap_phase

DIAGONAL_THRESHOLD = 0.5


@dataclass(frozen=True)
class QubitEncoding:
    """Dot assignment of two charge qubits plus ancilla dots."""

    qubit1: tuple[int, int]
    qubit2: tuple[int, int]
    ancilla_dots: tuple[int, ...] = ()

    def __post_init__(self):
        dots = [*self.qubit1, *self.qubit2, *self.ancilla_dots]
        if len(self.qubit1) != 2 or len(self.qubit2) != 2:
            raise ArgumentError("each qubit needs exactly (left_dot, right_dot)")
        if len(set(dots)) != len(dots):
            raise ArgumentError(f"encoding dots must be distinct, got {dots}")

    def occupied_dots(self, q1: int, q2: int) -> tuple[int, int]:
        return self.qubit1[q1], self.qubit2[q2]

    def computational_indices(self, basis: FockBasis) -> list[int]:
        dots = [*self.qubit1, *self.qubit2, *self.ancilla_dots]
        if basis.n_electrons != 2:
            raise ArgumentError("two-qubit projection needs a two-electron basis")
        if max(dots) >= basis.n_dots or min(dots) < 0:
            raise ArgumentError(f"encoding references dots outside 0..{basis.n_dots - 1}")
        return [basis.index(basis.state_with(self.occupied_dots(a, b)))
                for a in (0, 1) for b in (0, 1)]


@dataclass(frozen=True)
class TargetGate:
    """One of the three ideal diagonal phase gates.

    ``dynamical(theta)`` is ``diag(1, e^{i theta}, 1, 1)`` with
    ``theta = dE * t``; ``geometric(phi1, phi2)`` is
    ``diag(e^{i phi1}, e^{i phi2}, 1, 1)``; ``topological(flux)`` is
    ``diag(1, e^{i flux}, 1, 1)``.
    """

    kind: str
    params: tuple[float, ...]

    def __post_init__(self):
        expected = {"dynamical": 1, "geometric": 2, "topological": 1}
        if self.kind not in expected:
            raise ArgumentError(f"unknown target kind {self.kind!r}")
        if len(self.params) != expected[self.kind]:
            raise ArgumentError(f"{self.kind} target takes {expected[self.kind]} parameter(s)")

    @classmethod
    def dynamical(cls, theta: float) -> "TargetGate":
        return cls("dynamical", (float(theta),))

    @classmethod
    def geometric(cls, phi1: float, phi2: float) -> "TargetGate":
        return cls("geometric", (float(phi1), float(phi2)))

    @classmethod
    def topological(cls, flux: float) -> "TargetGate":
        return cls("topological", (float(flux),))

    def phases(self) -> np.ndarray:
        if self.kind == "geometric":
            return np.array([self.params[0], self.params[1], 0.0, 0.0])
        return np.array([0.0, self.params[0], 0.0, 0.0])

    def matrix(self) -> np.ndarray:
        return np.diag(np.exp(1j * self.phases()))

    @property
    def entangling_phase(self) -> float:
        return entangling_phase(self.matrix())


def project_computational(U: np.ndarray, basis: FockBasis,
                          enc: QubitEncoding) -> tuple[np.ndarray, np.ndarray]:
    """Restrict ``U`` to the computational subspace.

    Returns
    -------
    projected : ndarray, shape (4, 4)
        ``U`` between computational states.
    leakage : ndarray, shape (4,)
        ``1 - sum_r |U_rs|^2`` for each computational column ``s``.
    """
    U = np.asarray(U)
    if U.shape != (basis.dim, basis.dim):
        raise ArgumentError(f"U has shape {U.shape}, basis dimension is {basis.dim}")
    idx = enc.computational_indices(basis)
    projected = U[np.ix_(idx, idx)]
    leakage = np.clip(1.0 - np.sum(np.abs(projected) ** 2, axis=0), 0.0, 1.0)
    return projected, leakage


def entangling_phase(projected: np.ndarray, threshold: float = DIAGONAL_THRESHOLD) -> float:
    """``arg u00 - arg u01 - arg u10 + arg u11`` reduced to (-pi, pi].

    This is the only combination of diagonal phases left invariant by
    single-qubit Z rotations and a global phase.
    """
    d = np.diag(np.asarray(projected))
    if d.shape != (4,):
        raise ArgumentError("entangling_phase needs a 4x4 gate")
    if np.min(np.abs(d)) <= threshold:
        raise DegenerateGateError(
            f"diagonal magnitudes {np.round(np.abs(d), 6).tolist()} fall below {threshold}; "
            "the gate is not phase-like")
    a = np.angle(d)
    return float(wrap_phase(a[0] - a[1] - a[2] + a[3]))


def _overlaps(projected: np.ndarray, target: np.ndarray) -> np.ndarray:
    # c_k = sum_j conj(T_kj) P_kj, so tr((L T)^dagger P) = sum_k conj(L_k) c_k
    return np.sum(np.conj(target) * projected, axis=1)


def local_phase_fidelity(projected: np.ndarray, target: np.ndarray) -> float:
    """Max of ``|tr((L1 x L2 T)^dagger P)| / 4`` over local Z phases and global phase.

    With local phases ``diag(1, e^{ib}, e^{ia}, e^{i(a+b)})`` the optimum over
    ``a`` at fixed ``b`` is ``|c00 + c01 e^{-ib}| + |c10 + c11 e^{-ib}|``,
    which leaves a one-dimensional search over ``b``.
    """
    c = _overlaps(np.asarray(projected, dtype=complex), np.asarray(target, dtype=complex))

    def value(b):
        w = np.exp(-1j * b)
        return abs(c[0] + c[1] * w) + abs(c[2] + c[3] * w)

    grid = np.linspace(-np.pi, np.pi, 73)
    vals = np.array([value(b) for b in grid])
    k = int(np.argmax(vals))
    step = grid[1] - grid[0]
    res = minimize_scalar(lambda b: -value(b), bounds=(grid[k] - step, grid[k] + step),
                          method="bounded", options={"xatol": 1e-13})
    best = max(vals[k], -res.fun)
    return float(min(max(best / 4.0, 0.0), 1.0))


def compare_to_target(projected: np.ndarray, target: "TargetGate | np.ndarray") -> float:
    """Fidelity of ``projected`` against ``target`` up to local Z phases."""
    T = target.matrix() if isinstance(target, TargetGate) else np.asarray(target)
    return local_phase_fidelity(projected, T)


@dataclass(frozen=True)
class GateReport:
    projected: np.ndarray
    leakage: np.ndarray
    diagonal_phases: np.ndarray
    entangling_phase: float
    offdiag_residual: float
    fidelity_vs_target: float
    target: TargetGate | None = None
    notes: tuple[str, ...] = field(default_factory=tuple)

    @property
    def leakage_max(self) -> float:
        return float(np.max(self.leakage))

    def to_dict(self) -> dict:
        return {
            "projected_real": np.real(self.projected).tolist(),
            "projected_imag": np.imag(self.projected).tolist(),
            "leakage": [float(x) for x in self.leakage],
            "diagonal_phases": [float(x) for x in self.diagonal_phases],
            "entangling_phase": self.entangling_phase,
            "offdiag_residual": self.offdiag_residual,
            "fidelity_vs_target": self.fidelity_vs_target,
            "target": None if self.target is None else
            {"kind": self.target.kind, "params": list(self.target.params)},
            "notes": list(self.notes),
        }


def gate_report(projected: np.ndarray, leakage: Sequence[float] | None = None,
                target: TargetGate | None = None, notes: Sequence[str] = (),
                threshold: float = DIAGONAL_THRESHOLD) -> GateReport:
    """Summarize a projected gate.

    Raises ``DegenerateGateError`` when any diagonal magnitude is at or
    below ``threshold``.
    """
    P = np.asarray(projected, dtype=complex)
    if leakage is None:
        leakage = np.clip(1.0 - np.sum(np.abs(P) ** 2, axis=0), 0.0, 1.0)
    gamma = entangling_phase(P, threshold)
    off = P - np.diag(np.diag(P))
    fid = compare_to_target(P, target) if target is not None else math.nan
    return GateReport(
        projected=P,
        leakage=np.asarray(leakage, dtype=float),
        diagonal_phases=np.angle(np.diag(P)),
        entangling_phase=gamma,
        offdiag_residual=float(np.max(np.abs(off))),
        fidelity_vs_target=fid,
        target=target,
        notes=tuple(notes),
    )
