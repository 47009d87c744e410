"""Exact propagators for piecewise-constant Hamiltonians."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable

import numpy as np

from .errors import ArgumentError, NumericalContractError
from .fock import FockBasis
from .hamiltonian import DotArraySpec, LinkActivation, build_hamiltonian

HERMITIAN_INPUT_TOL = 1e-9
UNITARY_TOL = 1e-10


@dataclass(frozen=True)
class Segment:
    activation: LinkActivation
    duration: float

    def __post_init__(self):
        d = float(self.duration)
        if not math.isfinite(d) or d < 0:
            raise ArgumentError(f"segment duration must be finite and >= 0, got {self.duration!r}")
        object.__setattr__(self, "duration", d)


@dataclass(frozen=True)
class PulseSchedule:
    """Ordered pulse segments; the first segment acts first."""

    segments: tuple[Segment, ...] = field(default_factory=tuple)

    def __post_init__(self):
        object.__setattr__(self, "segments", tuple(
            s if isinstance(s, Segment) else Segment(*s) for s in self.segments))

    def __len__(self):
        return len(self.segments)

    def __iter__(self):
        return iter(self.segments)

    @property
    def total_time(self) -> float:
        return sum(s.duration for s in self.segments)

    def reversed(self) -> "PulseSchedule":
        return PulseSchedule(self.segments[::-1])


def propagator(H: np.ndarray, duration: float) -> np.ndarray:
    """``exp(-1j * H * duration)`` via Hermitian eigendecomposition.

    Raises ``NumericalContractError`` if ``H`` deviates from Hermitian by
    more than 1e-9 in any entry.
    """
    H = np.asarray(H, dtype=complex)
    if H.ndim != 2 or H.shape[0] != H.shape[1]:
        raise ArgumentError(f"H must be square, got shape {H.shape}")
    dev = np.max(np.abs(H - H.conj().T), initial=0.0)
    if dev > HERMITIAN_INPUT_TOL:
        raise NumericalContractError(f"H is not Hermitian (max deviation {dev:.3e})")
    if not math.isfinite(duration):
        raise ArgumentError("duration must be finite")
    evals, evecs = np.linalg.eigh(0.5 * (H + H.conj().T))
    return (evecs * np.exp(-1j * evals * duration)) @ evecs.conj().T


def unitarity_error(U: np.ndarray) -> float:
    return float(np.max(np.abs(U.conj().T @ U - np.eye(U.shape[0]))))


def run_schedule(spec: DotArraySpec, basis: FockBasis, schedule: PulseSchedule | Iterable[Segment]) -> np.ndarray:
    """Total propagator ``U_n ... U_2 U_1`` of a pulse schedule."""
    if not isinstance(schedule, PulseSchedule):
        schedule = PulseSchedule(tuple(schedule))
    U = np.eye(basis.dim, dtype=complex)
    cache: dict = {}
    for seg in schedule:
        key = seg.activation
        if key not in cache:
            H = build_hamiltonian(spec, basis, seg.activation)
            cache[key] = np.linalg.eigh(H)
        evals, evecs = cache[key]
        U = (evecs * np.exp(-1j * evals * seg.duration)) @ evecs.conj().T @ U
    err = unitarity_error(U)
    if err > UNITARY_TOL:
        raise NumericalContractError(f"schedule propagator lost unitarity ({err:.3e})")
    return U
