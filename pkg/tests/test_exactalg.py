import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from orbitcx import _kernels
from orbitcx.exactalg import (Coefficients, NoSolution, WrongRing, Z, euler_characteristic, homology_at,
                              induced_map, rank, rank_kernel_image, smith_normal_form, smith_normal_form_full,
                              snf_diagonal, solve_linear, solve_retraction)

from oracles import invariant_factors, rank_mod_p

small = st.lists(st.lists(st.integers(-4, 4), min_size=3, max_size=3), min_size=1, max_size=3)


def test_coefficients_parse():
    assert Coefficients.parse("Z").p is None
    assert Coefficients.parse("Zmod:5").p == 5
    assert str(Coefficients(7)) == "Zmod:7"
    with pytest.raises(ValueError):
        Coefficients.parse("Q")


def test_snf_examples():
    # [DERIVED] by determinantal divisors
    assert snf_diagonal([[2, 0], [0, 3]]) == [1, 6]
    M = np.array([[2, 4, 4], [-6, 6, 12], [10, -4, -16]])
    U, D, V = smith_normal_form(M)
    assert [D[i, i] for i in range(3)] == [2, 6, 12]
    assert np.array_equal(U @ M @ V, D)


@settings(max_examples=80, deadline=None)
@given(small)
def test_snf_matches_determinantal_divisors(rows):
    M = np.array(rows, dtype=np.int64)
    U, D, V, Ui, Vi = smith_normal_form_full(M)
    assert np.array_equal(np.asarray(U, dtype=object) @ M.astype(object) @ np.asarray(V, dtype=object), D)
    assert np.array_equal(np.asarray(Ui, dtype=object) @ np.asarray(U, dtype=object), np.eye(M.shape[0], dtype=object))
    diag = [d for d in snf_diagonal(M) if d]
    assert diag == invariant_factors(rows)
    assert all(b % a == 0 for a, b in zip(diag, diag[1:]))


@settings(max_examples=80, deadline=None)
@given(st.lists(st.lists(st.integers(0, 6), min_size=4, max_size=4), min_size=1, max_size=5),
       st.sampled_from([2, 3, 5, 7]))
def test_rank_mod_p_matches_oracle_and_backends(rows, p):
    M = np.array(rows)
    r, K, _ = rank_kernel_image(M, Coefficients(p))
    assert r == rank_mod_p(rows, p)
    assert not ((M @ K) % p).any() and K.shape[1] == M.shape[1] - r
    with _kernels.use_backend("numpy"):
        a = _kernels.rref_mod_p(M, p)
    if _kernels.NUMBA_AVAILABLE:
        with _kernels.use_backend("numba"):
            b = _kernels.rref_mod_p(M, p)
        assert np.array_equal(a[0], b[0]) and np.array_equal(a[1], b[1])


def test_solve_linear_and_errors():
    A = np.array([[1, 1], [0, 1]])
    x = solve_linear(A, np.array([1, 0]), Coefficients(3))
    assert np.array_equal((A @ x) % 3, [1, 0])
    with pytest.raises(NoSolution):
        solve_linear(np.array([[0, 0]]), np.array([1]), Coefficients(3))


def test_retraction_example():
    r = solve_retraction(np.array([[1], [1]]), Coefficients(2))
    assert np.array_equal(r, [[1, 0]])


def test_homology_circle_over_z():
    # two vertices, two edges a->b
    d1 = np.array([[-1, -1], [1, 1]])  # columns: edges, rows: vertices
    H1 = homology_at(np.zeros((2, 0), dtype=np.int64), d1, Z, dim=2)
    H0 = homology_at(d1, np.zeros((0, 2), dtype=np.int64), Z, dim=2)
    assert H1.rank == 1 and H0.rank == 1 and not H0.torsion


def test_homology_torsion():
    H = homology_at(np.array([[2]]), np.zeros((0, 1), dtype=np.int64), Z, dim=1)
    assert H.rank == 0 and tuple(H.torsion) == (2,)


def test_induced_map_identity():
    d1 = np.array([[-1, -1], [1, 1]])
    H1 = homology_at(np.zeros((2, 0), dtype=np.int64), d1, Z, dim=2)
    f = induced_map(np.eye(2, dtype=np.int64), H1, H1)
    assert abs(int(f[0, 0])) == 1


def test_euler_characteristic():
    assert euler_characteristic([2, 2]) == 0
