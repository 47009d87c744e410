"""Tight-binding Hamiltonian of a quantum-dot array with Peierls link phases.

Units are natural (hbar = e = 1), so a link phase is the line integral of
the vector potential along the link.  A link stored as ``(i, j, t, theta)``
lets an electron hop from ``i`` to ``j`` with amplitude ``t * exp(1j*theta)``
and back with the complex conjugate, i.e. it contributes

    t e^{i theta} d_j^dagger d_i + h.c.

With this orientation the flux around a cycle equals the phase an electron
picks up while traversing it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Iterable, Mapping

import numpy as np

from .errors import ArgumentError
from .fock import FockBasis, hopping_matrix, number_matrix

HERMITIAN_TOL = 1e-12


def _pair(i: int, j: int) -> frozenset:
    return frozenset((int(i), int(j)))


def wrap_phase(x):
    """Reduce an angle (or array of angles) to the interval (-pi, pi]."""
    r = np.pi - np.mod(np.pi - np.asarray(x, dtype=float), 2 * np.pi)
    return float(r) if r.ndim == 0 else r


@dataclass(frozen=True)
class Link:
    i: int
    j: int
    magnitude: float
    phase: float = 0.0


@dataclass(frozen=True)
class CoulombPair:
    i: int
    j: int
    U: float


@dataclass(frozen=True)
class DotArraySpec:
    """Dot energies, tunnelling links and Coulomb couplings of an array."""

    n_dots: int
    dot_energies: tuple[float, ...] = ()
    links: tuple[Link, ...] = ()
    coulomb_pairs: tuple[CoulombPair, ...] = ()

    def __post_init__(self):
        energies = tuple(float(e) for e in self.dot_energies) or (0.0,) * self.n_dots
        object.__setattr__(self, "dot_energies", energies)
        object.__setattr__(self, "links", tuple(Link(*l) if not isinstance(l, Link) else l
                                                for l in self.links))
        object.__setattr__(self, "coulomb_pairs",
                           tuple(CoulombPair(*c) if not isinstance(c, CoulombPair) else c
                                 for c in self.coulomb_pairs))
        if self.n_dots < 1:
            raise ArgumentError("n_dots must be positive")
        if len(self.dot_energies) != self.n_dots:
            raise ArgumentError(
                f"expected {self.n_dots} dot energies, got {len(self.dot_energies)}")
        seen = set()
        for link in self.links:
            self._check_pair(link.i, link.j, "link")
            if link.magnitude < 0 or not math.isfinite(link.magnitude):
                raise ArgumentError(f"link {link.i}-{link.j} has invalid magnitude {link.magnitude}")
            if not math.isfinite(link.phase):
                raise ArgumentError(f"link {link.i}-{link.j} has non-finite phase")
            key = _pair(link.i, link.j)
            if key in seen:
                raise ArgumentError(f"duplicate link between dots {link.i} and {link.j}")
            seen.add(key)
        seen = set()
        for c in self.coulomb_pairs:
            self._check_pair(c.i, c.j, "Coulomb pair")
            if c.U < 0 or not math.isfinite(c.U):
                raise ArgumentError(f"Coulomb pair {c.i}-{c.j} has invalid U {c.U}")
            key = _pair(c.i, c.j)
            if key in seen:
                raise ArgumentError(f"duplicate Coulomb pair {c.i}-{c.j}")
            seen.add(key)

    def _check_pair(self, i, j, what):
        for k in (i, j):
            if not (isinstance(k, (int, np.integer)) and 0 <= k < self.n_dots):
                raise ArgumentError(f"{what} endpoint {k!r} out of range")
        if i == j:
            raise ArgumentError(f"{what} endpoints must differ, got {i}-{j}")

    def link(self, i: int, j: int) -> Link:
        """The stored link joining ``i`` and ``j`` in either orientation."""
        key = _pair(i, j)
        for link in self.links:
            if _pair(link.i, link.j) == key:
                return link
        raise ArgumentError(f"no link between dots {i} and {j}")

    def hop_phase(self, src: int, dst: int) -> float:
        """Phase picked up by an electron hopping from ``src`` to ``dst``."""
        link = self.link(src, dst)
        return link.phase if (link.i, link.j) == (src, dst) else -link.phase


@dataclass(frozen=True)
class LinkActivation:
    """Links switched on during one pulse segment.

    ``active`` maps an unordered dot pair to a magnitude override, or to
    ``None`` to use the magnitude stored in the array spec.
    """

    active: Mapping[frozenset, float | None] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "active", dict(self.active))

    @classmethod
    def of(cls, *pairs) -> "LinkActivation":
        return cls({_pair(*p): None for p in pairs})

    def __hash__(self):
        return hash(tuple(sorted((tuple(sorted(k)), v) for k, v in self.active.items())))

    def pairs(self) -> list[tuple[int, int]]:
        return sorted(tuple(sorted(k)) for k in self.active)


def build_hamiltonian(spec: DotArraySpec, basis: FockBasis,
                      active: LinkActivation | None = None) -> np.ndarray:
    """Assemble ``H = H_d + H_C + H_t`` on ``basis``.

    Parameters
    ----------
    spec : DotArraySpec
        Array description.
    basis : FockBasis
        Fock basis with ``basis.n_dots == spec.n_dots``.
    active : LinkActivation, optional
        Links that tunnel; all other links contribute nothing.

    Returns
    -------
    numpy.ndarray
        Dense Hermitian matrix of shape ``(basis.dim, basis.dim)``.
    """
    if basis.n_dots != spec.n_dots:
        raise ArgumentError(
            f"basis has {basis.n_dots} dots but the spec describes {spec.n_dots}")
    active = active or LinkActivation()
    occ = basis.occupations().astype(float)
    diag = occ @ np.asarray(spec.dot_energies)
    for c in spec.coulomb_pairs:
        diag = diag + c.U * occ[:, c.i] * occ[:, c.j]
    H = np.diag(diag).astype(complex)

    for key, override in active.active.items():
        i, j = sorted(key)
        link = spec.link(i, j)
        t = link.magnitude if override is None else float(override)
        if t < 0:
            raise ArgumentError(f"negative magnitude override on link {i}-{j}")
        if t == 0:
            continue
        forward = t * np.exp(1j * link.phase) * hopping_matrix(basis, link.j, link.i)
        H += forward + forward.conj().T
    return H


def loop_flux(spec: DotArraySpec, cycle: Iterable[int]) -> float:
    """Gauge-invariant flux through a closed walk of dots, in (-pi, pi].

    ``cycle`` lists the dots once, e.g. ``(1, 2, 3)``; the closing hop back
    to the first dot is implied.  A trailing repeat of the first dot is
    accepted as well.
    """
    cycle = [int(k) for k in cycle]
    if len(cycle) > 1 and cycle[0] == cycle[-1]:
        cycle = cycle[:-1]
    if len(cycle) < 3:
        raise ArgumentError("a cycle needs at least three dots")
    total = 0.0
    for src, dst in zip(cycle, cycle[1:] + cycle[:1]):
        total += spec.hop_phase(src, dst)
    return float(wrap_phase(total))


def gauge_transform(spec: DotArraySpec, site_phases) -> DotArraySpec:
    """Shift every link phase by ``chi_i - chi_j`` for link ``(i, j)``.

    Equivalent to the basis change ``H -> D^dagger H D`` with
    ``D = diag(exp(1j * sum_k chi_k n_k))``.
    """
    chi = [float(x) for x in site_phases]
    if len(chi) != spec.n_dots:
        raise ArgumentError(f"need {spec.n_dots} site phases, got {len(chi)}")
    links = tuple(replace(l, phase=l.phase + chi[l.i] - chi[l.j]) for l in spec.links)
    return replace(spec, links=links)


def gauge_unitary(basis: FockBasis, site_phases) -> np.ndarray:
    """Diagonal unitary ``exp(1j * sum_k chi_k n_k)`` on ``basis``."""
    chi = np.asarray(site_phases, dtype=float)
    if chi.shape != (basis.n_dots,):
        raise ArgumentError(f"need {basis.n_dots} site phases, got {chi.shape}")
    return np.diag(np.exp(1j * (basis.occupations() @ chi)))


def conjugate_spec(spec: DotArraySpec) -> DotArraySpec:
    """Spec whose Hamiltonian is the complex conjugate of ``spec``'s."""
    return replace(spec, links=tuple(replace(l, phase=-l.phase) for l in spec.links))


def is_hermitian(H: np.ndarray, tol: float = HERMITIAN_TOL) -> bool:
    return bool(np.max(np.abs(H - H.conj().T), initial=0.0) < tol)


__all__ = [
    "CoulombPair", "DotArraySpec", "Link", "LinkActivation", "build_hamiltonian",
    "conjugate_spec", "gauge_transform", "gauge_unitary", "is_hermitian", "loop_flux",
    "number_matrix", "wrap_phase",
]
