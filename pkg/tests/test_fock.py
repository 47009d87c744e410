import itertools

import numpy as np
import pytest

from qdotgates import ArgumentError, enumerate_basis, hopping_matrix, number_matrix
from qdotgates.fock import total_number_matrix

from oracles import jordan_wigner_annihilator, restricted_operator


@pytest.mark.parametrize("n, k, size", [(2, 1, 2), (4, 2, 6), (6, 2, 15), (16, 2, 120), (3, 0, 1)])
def test_basis_size(n, k, size):
    assert enumerate_basis(n, k).dim == size


def test_basis_order_two_dots():
    assert enumerate_basis(2, 1).states == ((1, 0), (0, 1))


def test_basis_lexicographic_and_deterministic():
    b = enumerate_basis(5, 2)
    assert b.states == enumerate_basis(5, 2).states
    assert len(set(b.states)) == b.dim
    assert list(b.states) == sorted(b.states, reverse=True)
    assert all(sum(s) == 2 for s in b.states)


@pytest.mark.parametrize("args", [(0, 0), (17, 1), (3, 4), (3, -1), (2.5, 1)])
def test_basis_rejects_bad_arguments(args):
    with pytest.raises(ArgumentError):
        enumerate_basis(*args)


def test_hop_two_dots():
    b = enumerate_basis(2, 1)
    h = hopping_matrix(b, 0, 1)  # d_1^dag d_2 in one-based labels
    np.testing.assert_array_equal(h, [[0, 1], [0, 0]])
    # moving twice onto an occupied dot gives zero
    np.testing.assert_array_equal(h @ h, np.zeros((2, 2)))


def test_hop_sign_through_occupied_dot():
    b = enumerate_basis(3, 2)
    h = hopping_matrix(b, 0, 2)
    src = b.index((0, 1, 1))
    dst = b.index((1, 1, 0))
    assert h[dst, src] == -1


def test_hop_same_dot_rejected():
    with pytest.raises(ArgumentError):
        hopping_matrix(enumerate_basis(3, 1), 1, 1)


def test_number_matrix():
    b = enumerate_basis(2, 1)
    np.testing.assert_array_equal(number_matrix(b, 0), np.diag([1, 0]))


def test_number_sum_is_particle_number():
    b = enumerate_basis(6, 3)
    total = sum(number_matrix(b, i) for i in range(6))
    np.testing.assert_array_equal(total, 3 * np.eye(b.dim))
    np.testing.assert_array_equal(total, total_number_matrix(b))


def test_coulomb_product_marks_pair():
    b = enumerate_basis(4, 2)
    nn = number_matrix(b, 2) @ number_matrix(b, 3)
    expected = [1.0 if s[2] and s[3] else 0.0 for s in b.states]
    np.testing.assert_array_equal(nn, np.diag(expected))


@pytest.mark.parametrize("n", [2, 3, 4])
def test_hopping_matches_jordan_wigner(n):
    # brute force: build d_i^dag d_j on the full 2^n space and restrict
    for k in range(1, n):
        b = enumerate_basis(n, k)
        for i, j in itertools.permutations(range(n), 2):
            full = jordan_wigner_annihilator(n, i).conj().T @ jordan_wigner_annihilator(n, j)
            np.testing.assert_array_equal(hopping_matrix(b, i, j), restricted_operator(n, k, full))


@pytest.mark.parametrize("n", [3, 4])
def test_number_operator_idempotent_and_adjoint_pairs(n):
    b = enumerate_basis(n, 2)
    for i in range(n):
        ni = number_matrix(b, i)
        np.testing.assert_array_equal(ni @ ni, ni)
    for i, j in itertools.permutations(range(n), 2):
        assert np.max(np.abs(hopping_matrix(b, i, j).conj().T - hopping_matrix(b, j, i))) < 1e-14
