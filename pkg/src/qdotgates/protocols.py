"""End-to-end gate protocols on small dot arrays.

The triangle protocol uses a six-dot, two-electron array::

    qubit 1 = dots (0, 1)      loop ancillas = dots 2, 3
    qubit 2 = dots (4, 5)      Coulomb U between dots 3 and 4

Dots 1, 2, 3 form the tunnelling loop.  When qubit 1 is in ``|1>`` its
electron starts in dot 1; when qubit 2 is in ``|0>`` its electron sits in
dot 4 and blocks any hop into dot 3.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Iterable, NamedTuple, Sequence

import numpy as np

from .analysis import (GateReport, QubitEncoding, TargetGate, compare_to_target, entangling_phase,
                       gate_report, project_computational)
from .errors import ArgumentError, DegenerateGateError
from .evolution import PulseSchedule, Segment, run_schedule
from .fock import FockBasis, enumerate_basis
from .hamiltonian import (CoulombPair, DotArraySpec, Link, LinkActivation, build_hamiltonian,
                          gauge_transform, wrap_phase)

TRIANGLE_LINKS = ((1, 2), (2, 3), (3, 1))
LOOP_SEQUENCE = ((1, 2), (2, 3), (1, 2), (3, 1))
TRIANGLE_ENCODING = QubitEncoding(qubit1=(0, 1), qubit2=(4, 5), ancilla_dots=(2, 3))
BLOCKADE_WARN_RATIO = 10.0


def _canon(pair) -> tuple[int, int]:
    a, b = (int(x) for x in pair)
    return (min(a, b), max(a, b))


@dataclass(frozen=True)
class Deformation:
    """Back-and-forth excursion: two full pulses on ``link`` inserted before
    base segment ``position`` of the undeformed schedule."""

    position: int
    link: tuple[int, int]

    def __post_init__(self):
        object.__setattr__(self, "link", _canon(self.link))
        if self.link not in {_canon(p) for p in TRIANGLE_LINKS}:
            raise ArgumentError(f"deformation link {self.link} is not a triangle link")
        if self.position < 0:
            raise ArgumentError("deformation position must be >= 0")


# Winding-preserving excursions used by the robustness checks.
STANDARD_DEFORMATIONS = (
    (Deformation(1, (2, 3)),),
    (Deformation(0, (1, 2)),),
    (Deformation(2, (3, 1)),),
    (Deformation(3, (1, 2)), Deformation(4, (2, 3))),
    (Deformation(1, (1, 2)), Deformation(2, (2, 3)), Deformation(4, (3, 1))),
)


@dataclass(frozen=True)
class TriangleScenario:
    J: float
    U: float
    phi: float
    windings: int = 1
    deformations: tuple[Deformation, ...] = field(default_factory=tuple)
    epsilon: float = 0.0

    def __post_init__(self):
        if not self.J > 0:
            raise ArgumentError("J must be positive")
        if not self.U > 0:
            raise ArgumentError("U must be positive")
        if not isinstance(self.windings, (int, np.integer)) or self.windings < 1:
            raise ArgumentError("windings must be an integer >= 1")
        if not math.isfinite(self.epsilon) or not math.isfinite(self.phi):
            raise ArgumentError("phi and epsilon must be finite")
        object.__setattr__(self, "deformations", tuple(
            d if isinstance(d, Deformation) else Deformation(d[0], tuple(d[1]))
            for d in self.deformations))
        n_base = 4 * self.windings
        for d in self.deformations:
            if d.position > n_base:
                raise ArgumentError(f"deformation position {d.position} beyond {n_base} pulses")

    @property
    def pulse_time(self) -> float:
        return math.pi / (2 * self.J) * (1 + self.epsilon)


def triangle_spec(J: float, U: float, phi: float) -> DotArraySpec:
    """Canonical six-dot array with the loop flux on the 3 -> 1 hop."""
    return DotArraySpec(
        n_dots=6,
        links=(Link(1, 2, J, 0.0), Link(2, 3, J, 0.0), Link(3, 1, J, phi)),
        coulomb_pairs=(CoulombPair(3, 4, U),),
    )


def build_triangle_schedule(s: TriangleScenario) -> PulseSchedule:
    """Pulse list: per winding ``t12, t23, t12, t31`` each for ``pi/(2J)(1+eps)``."""
    T = s.pulse_time
    base = [_canon(p) for _ in range(s.windings) for p in LOOP_SEQUENCE]
    inserts: dict[int, list] = {}
    for d in s.deformations:
        inserts.setdefault(d.position, []).extend([d.link, d.link])
    links = []
    for k in range(len(base) + 1):
        links.extend(inserts.get(k, []))
        if k < len(base):
            links.append(base[k])
    return PulseSchedule(tuple(Segment(LinkActivation.of(p), T) for p in links))


def _warn_blockade(J: float, U: float) -> None:
    if U / J < BLOCKADE_WARN_RATIO:
        warnings.warn(f"U/J = {U / J:.3g} < {BLOCKADE_WARN_RATIO:g}: "
                      "outside the Coulomb-blockade regime", RuntimeWarning, stacklevel=3)


def ideal_triangle_phases(s: TriangleScenario) -> np.ndarray:
    """Diagonal of the triangle gate in the ideal-blockade limit at ``epsilon = 0``.

    Unblocked pulses move the qubit-1 electron with amplitude
    ``-1j * exp(1j * hop_phase)``; blocked pulses and pulses on links away
    from the electron act trivially.
    """
    spec = triangle_spec(s.J, s.U, s.phi)
    sched = build_triangle_schedule(TriangleScenario(s.J, s.U, s.phi, s.windings, s.deformations))
    out = np.ones(4, dtype=complex)
    for col, (q1, q2) in enumerate([(0, 0), (0, 1), (1, 0), (1, 1)]):
        pos = TRIANGLE_ENCODING.qubit1[q1]
        other = TRIANGLE_ENCODING.qubit2[q2]
        amp = 1.0 + 0j
        for seg in sched:
            (a, b), = seg.activation.pairs()
            if pos not in (a, b):
                continue
            dst = b if pos == a else a
            if dst == 3 and other == 4:
                continue
            between = sum(1 for k in (other,) if min(pos, dst) < k < max(pos, dst))
            amp *= -1j * np.exp(1j * spec.hop_phase(pos, dst)) * (-1) ** between
            pos = dst
        out[col] = amp
    return out


def ideal_triangle_target(s: TriangleScenario) -> TargetGate:
    """Ideal-blockade gate of ``s`` as a local-phase-equivalent target.

    Any diagonal gate with entangling phase ``g`` is locally equivalent to
    ``TargetGate.geometric(g, 0)``.
    """
    a = np.angle(ideal_triangle_phases(s))
    return TargetGate.geometric(float(wrap_phase(a[0] - a[1] - a[2] + a[3])), 0.0)


def _triangle_report(s: TriangleScenario, spec: DotArraySpec, basis: FockBasis,
                     target: TargetGate) -> GateReport:
    U = run_schedule(spec, basis, build_triangle_schedule(s))
    projected, leakage = project_computational(U, basis, TRIANGLE_ENCODING)
    return gate_report(projected, leakage, target)


def triangle_ab_scenario(s: TriangleScenario,
                         site_phases: Sequence[float] | None = None) -> tuple[GateReport, GateReport]:
    """Run the loop protocol at flux ``s.phi`` and at zero flux.

    Parameters
    ----------
    s : TriangleScenario
    site_phases : sequence of 6 floats, optional
        Gauge transformation applied to both arrays before evolving.

    Returns
    -------
    (GateReport, GateReport)
        Reports at flux ``phi`` and at flux 0.  Each is compared against the
        ideal-blockade gate of the same schedule.  The protected quantity is
        ``report_phi.entangling_phase - report_0.entangling_phase``.
    """
    _warn_blockade(s.J, s.U)
    basis = enumerate_basis(6, 2)
    reports = []
    for phi in (s.phi, 0.0):
        spec = triangle_spec(s.J, s.U, phi)
        if site_phases is not None:
            spec = gauge_transform(spec, site_phases)
        target = ideal_triangle_target(TriangleScenario(s.J, s.U, phi, s.windings, s.deformations))
        reports.append(_triangle_report(
            TriangleScenario(s.J, s.U, phi, s.windings, s.deformations, s.epsilon),
            spec, basis, target))
    return reports[0], reports[1]


def flux_phase_difference(with_flux: GateReport, without_flux: GateReport) -> float:
    return float(wrap_phase(with_flux.entangling_phase - without_flux.entangling_phase))


class BlockadeResult(NamedTuple):
    leakage: float
    i_eff: float


def _mean_probability(evals, evecs, psi0, observable_rows, T) -> float:
    # time average over [0, T] of sum_{r in rows} |<r|exp(-iHt)|psi0>|^2, in closed form
    a = evecs.conj().T @ psi0
    w = evecs[observable_rows, :] * a
    dE = evals[:, None] - evals[None, :]
    x = -dE * T
    with np.errstate(invalid="ignore", divide="ignore"):
        kernel = np.where(np.abs(x) < 1e-12, 1.0 + 0j, (np.exp(1j * x) - 1) / (1j * x))
    total = np.einsum("rk,rl,kl->", w, w.conj(), kernel)
    return float(np.real(total))


def blockade_leakage(J: float, U: float) -> BlockadeResult:
    """Blocked-pulse transfer probability and effective tunnelling ``2 J^2 / U``.

    The electron starts in dot 2 with the blocker in dot 4, and link 2-3 is
    on for ``pi/(2J)``.  The returned leakage is the probability of finding
    dot 3 occupied, averaged over the pulse; the end-of-pulse value is
    dominated by the commensurability of ``U`` with the pulse length, while
    the average tracks the ``(J/U)^2`` envelope.
    """
    if not U > 0 or not J > 0:
        raise ArgumentError("J and U must be positive")
    basis = enumerate_basis(6, 2)
    spec = triangle_spec(J, U, 0.0)
    H = build_hamiltonian(spec, basis, LinkActivation.of((2, 3)))
    evals, evecs = np.linalg.eigh(H)
    psi0 = np.zeros(basis.dim, dtype=complex)
    psi0[basis.index(basis.state_with((2, 4)))] = 1.0
    rows = [k for k, st in enumerate(basis.states) if st[3] == 1]
    T = math.pi / (2 * J)
    p = _mean_probability(evals, evecs, psi0, rows, T)
    return BlockadeResult(leakage=min(max(p, 0.0), 1.0), i_eff=2 * J * J / U)


def blocked_transfer_final(J: float, U: float) -> float:
    """Probability of dot 3 being occupied at the end of the blocked pulse."""
    basis = enumerate_basis(6, 2)
    spec = triangle_spec(J, U, 0.0)
    U_seg = run_schedule(spec, basis, [Segment(LinkActivation.of((2, 3)), math.pi / (2 * J))])
    col = U_seg[:, basis.index(basis.state_with((2, 4)))]
    return float(sum(abs(col[k]) ** 2 for k, st in enumerate(basis.states) if st[3] == 1))


def dynamical_gate_scenario(delta_e: float, t: float) -> GateReport:
    """Coulomb-phase gate between two double dots.

    Qubits are dots (0, 1) and (2, 3); the inner dots 1 and 2 repel with
    energy ``delta_e`` and nothing tunnels.  The state ``|10>`` alone picks
    up ``exp(-1j * delta_e * t)``, so the entangling phase is ``delta_e * t``
    reduced to (-pi, pi].
    """
    if not delta_e > 0:
        raise ArgumentError("delta_e must be positive")
    basis = enumerate_basis(4, 2)
    spec = DotArraySpec(n_dots=4, coulomb_pairs=(CoulombPair(1, 2, delta_e),))
    enc = QubitEncoding(qubit1=(0, 1), qubit2=(2, 3))
    U = run_schedule(spec, basis, [Segment(LinkActivation(), t)])
    projected, leakage = project_computational(U, basis, enc)
    return gate_report(projected, leakage, TargetGate.dynamical(delta_e * t))


@dataclass(frozen=True)
class SweepRow:
    epsilon: float
    leakage_max: float
    gamma_dev: float
    fidelity: float


def timing_robustness_sweep(s: TriangleScenario, eps_grid: Iterable[float]) -> list[SweepRow]:
    """Scan pulse-length errors ``T -> T(1 + eps)``.

    ``gamma_dev`` is the flux-difference entangling phase minus
    ``windings * phi``, reduced to (-pi, pi].  ``fidelity`` compares the
    gate at flux ``phi`` with the same schedule's ideal-blockade gate.
    Rows whose gate is not phase-like carry ``nan`` for both.
    """
    rows = []
    for eps in eps_grid:
        eps = float(eps)
        if not -0.5 < eps < 0.5:
            raise ArgumentError(f"epsilon {eps} outside (-0.5, 0.5)")
        scen = TriangleScenario(s.J, s.U, s.phi, s.windings, s.deformations, eps)
        basis = enumerate_basis(6, 2)
        leak = 0.0
        gammas = []
        fid = math.nan
        try:
            for phi in (s.phi, 0.0):
                sched = build_triangle_schedule(
                    TriangleScenario(s.J, s.U, phi, s.windings, s.deformations, eps))
                U = run_schedule(triangle_spec(s.J, s.U, phi), basis, sched)
                projected, leakage = project_computational(U, basis, TRIANGLE_ENCODING)
                leak = max(leak, float(np.max(leakage)))
                if phi == s.phi:
                    fid = compare_to_target(projected, ideal_triangle_target(scen))
                gammas.append(entangling_phase(projected))
            dev = float(wrap_phase(gammas[0] - gammas[1] - s.windings * s.phi))
        except DegenerateGateError:
            dev = math.nan
            fid = math.nan
        rows.append(SweepRow(eps, leak, dev, fid))
    return rows
