"""Fixed-particle-number Fock space for spinless fermions on quantum dots.

States are occupation tuples ``(n_0, ..., n_{N-1})``. Creation operators
are ordered by ascending dot index, so the Jordan-Wigner string of ``d_i``
counts the occupied dots with index below ``i``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from math import comb

import numpy as np

from .errors import ArgumentError

MAX_DOTS = 16

FockState = tuple[int, ...]


@dataclass(frozen=True)
class FockBasis:
    """All occupation states of ``n_electrons`` fermions on ``n_dots`` dots.

    States are ordered lexicographically by their bit-vector read from dot 0,
    with an occupied dot sorting first: for two dots and one electron the
    order is ``[(1, 0), (0, 1)]``.
    """

    n_dots: int
    n_electrons: int
    states: tuple[FockState, ...]
    _index: dict = field(repr=False, compare=False, hash=False)

    @property
    def dim(self) -> int:
        return len(self.states)

    def index(self, state) -> int:
        """Position of ``state`` in the basis; raises ``ArgumentError`` if absent."""
        try:
            return self._index[tuple(int(n) for n in state)]
        except KeyError:
            raise ArgumentError(f"state {tuple(state)} is not in this basis") from None

    def state_with(self, occupied) -> FockState:
        """The basis state with exactly the dots in ``occupied`` filled."""
        occ = [0] * self.n_dots
        for k in occupied:
            self._check_dot(k)
            occ[k] = 1
        state = tuple(occ)
        self.index(state)
        return state

    def occupations(self) -> np.ndarray:
        """Integer array of shape ``(dim, n_dots)``."""
        return np.array(self.states, dtype=np.int64).reshape(self.dim, self.n_dots)

    def _check_dot(self, i: int) -> None:
        if not (isinstance(i, (int, np.integer)) and 0 <= i < self.n_dots):
            raise ArgumentError(f"dot index {i!r} out of range for {self.n_dots} dots")


def enumerate_basis(n_dots: int, n_electrons: int) -> FockBasis:
    """Build the fixed-number basis.

    Parameters
    ----------
    n_dots : int
        Number of dots, ``1 <= n_dots <= 16``.
    n_electrons : int
        Electron number, ``0 <= n_electrons <= n_dots``.

    Returns
    -------
    FockBasis
        ``C(n_dots, n_electrons)`` states in lexicographic order.
    """
    for name, value in (("n_dots", n_dots), ("n_electrons", n_electrons)):
        if not isinstance(value, (int, np.integer)) or isinstance(value, bool):
            raise ArgumentError(f"{name} must be an integer, got {value!r}")
    if not 1 <= n_dots <= MAX_DOTS:
        raise ArgumentError(f"n_dots must lie in [1, {MAX_DOTS}], got {n_dots}")
    if not 0 <= n_electrons <= n_dots:
        raise ArgumentError(f"n_electrons must lie in [0, {n_dots}], got {n_electrons}")

    states = []
    for occupied in combinations(range(n_dots), n_electrons):
        occ = [0] * n_dots
        for k in occupied:
            occ[k] = 1
        states.append(tuple(occ))
    assert len(states) == comb(n_dots, n_electrons)
    index = {s: k for k, s in enumerate(states)}
    return FockBasis(int(n_dots), int(n_electrons), tuple(states), index)


def hopping_matrix(basis: FockBasis, i: int, j: int) -> np.ndarray:
    """Matrix of ``d_i^dagger d_j`` (moves one electron from dot ``j`` to dot ``i``).

    The sign of each element is ``(-1)**m`` where ``m`` counts occupied dots
    strictly between ``i`` and ``j``.
    """
    basis._check_dot(i)
    basis._check_dot(j)
    if i == j:
        raise ArgumentError("hopping_matrix needs i != j; use number_matrix for i == j")
    lo, hi = min(i, j), max(i, j)
    out = np.zeros((basis.dim, basis.dim), dtype=complex)
    for col, state in enumerate(basis.states):
        if state[j] != 1 or state[i] != 0:
            continue
        target = list(state)
        target[j] = 0
        target[i] = 1
        sign = -1.0 if sum(state[lo + 1:hi]) % 2 else 1.0
        out[basis.index(target), col] = sign
    return out


def number_matrix(basis: FockBasis, i: int) -> np.ndarray:
    """Diagonal occupation operator ``n_i``."""
    basis._check_dot(i)
    return np.diag(basis.occupations()[:, i].astype(complex))


def total_number_matrix(basis: FockBasis) -> np.ndarray:
    return np.diag(basis.occupations().sum(axis=1).astype(complex))
