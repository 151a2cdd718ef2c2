import itertools
import random

import pytest

from nangle.field import (
    Matrix,
    PrimeField,
    block_matrix,
    column_space_basis,
    coordinates_in_basis,
    invert,
    kernel_basis,
    rank,
    rref,
    solve,
)

F2 = PrimeField(2)
F3 = PrimeField(3)
F5 = PrimeField(5)


def test_prime_field_validation():
    with pytest.raises(ValueError):
        PrimeField(4)
    with pytest.raises(ValueError):
        PrimeField(1)
    PrimeField(2)
    PrimeField(2147483647)  # largest prime below 2**31


def test_rref_identity_f3():
    m = F3.identity(2)
    r, rk, piv = rref(m)
    assert r == m
    assert rk == 2
    assert piv == [0, 1]


def test_rref_rank_one_f2():
    m = F2.matrix([[1, 1], [1, 1]])
    r, rk, piv = rref(m)
    assert r == F2.matrix([[1, 1], [0, 0]])
    assert rk == 1
    assert piv == [0]


def test_rref_zero():
    m = F5.zeros(3, 4)
    r, rk, piv = rref(m)
    assert r == m
    assert rk == 0
    assert piv == []


def test_rref_idempotent_random():
    rng = random.Random(11)
    for F in (F2, F3):
        for _ in range(40):
            m = F.random_matrix(rng.randrange(1, 7), rng.randrange(1, 7), rng)
            r1, _, _ = rref(m)
            r2, _, _ = rref(r1)
            assert r1 == r2


def test_solve_identity():
    b = F3.matrix([[2], [1]])
    x, ker = solve(F3.identity(2), b)
    assert x == b
    assert ker.cols == 0


def test_solve_zero_matrix():
    a = F2.zeros(2, 2)
    b = F2.zeros(2, 1)
    x, ker = solve(a, b)
    assert x.is_zero()
    assert ker.cols == 2
    assert rank(ker) == 2


def test_solve_f2_example_against_enumeration():
    # Oracle: enumerate all 4 vectors of F_2^2.
    a = F2.matrix([[1, 1], [0, 0]])
    b = F2.matrix([[1], [0]])
    sols = [
        v
        for v in itertools.product(range(2), repeat=2)
        if [(a.a[0][0] * v[0] + a.a[0][1] * v[1]) % 2, (a.a[1][0] * v[0] + a.a[1][1] * v[1]) % 2]
        == [1, 0]
    ]
    assert sorted(sols) == [(0, 1), (1, 0)]
    x, ker = solve(a, b)
    assert tuple(x.a[:, 0]) in sols
    assert ker.cols == 1
    # kernel is spanned by [1,1]^t
    assert tuple(ker.a[:, 0]) == (1, 1)


def test_solve_no_solution_is_regular_outcome():
    a = F2.matrix([[1, 1], [1, 1]])
    b = F2.matrix([[1], [0]])
    assert solve(a, b) is None


def test_solve_dimension_mismatch():
    with pytest.raises(ValueError):
        solve(F2.zeros(2, 2), F2.zeros(3, 1))


def test_kernel_identity_and_zero():
    assert kernel_basis(F3.identity(3)).cols == 0
    k = kernel_basis(F3.zeros(4, 4))
    assert k.cols == 4


def test_kernel_f5_example_against_enumeration():
    # Oracle: enumerate F_5^2 for [[1,2]].
    m = F5.matrix([[1, 2]])
    null = [v for v in itertools.product(range(5), repeat=2) if (v[0] + 2 * v[1]) % 5 == 0]
    assert len(null) == 5  # one-dimensional subspace
    k = kernel_basis(m)
    assert k.cols == 1
    v = tuple(k.a[:, 0])
    assert v in null and v != (0, 0)
    # up to scalar equal to span{[3,1]^t}
    assert any(((3 * c) % 5, (1 * c) % 5) == v for c in range(1, 5))


def test_invert_cases():
    assert invert(F3.identity(2)) == F3.identity(2)
    swap = F2.matrix([[0, 1], [1, 0]])
    assert invert(swap) == swap
    assert invert(F2.matrix([[1, 1], [1, 1]])) is None
    with pytest.raises(ValueError):
        invert(F2.zeros(2, 3))


def test_rank_nullity_random():
    rng = random.Random(5)
    for F in (F2, F3):
        for _ in range(60):
            m = F.random_matrix(rng.randrange(0, 8), rng.randrange(0, 8), rng)
            assert rank(m) + kernel_basis(m).cols == m.cols


def test_solve_full_solution_space_random():
    rng = random.Random(7)
    for _ in range(50):
        F = F3
        a = F.random_matrix(rng.randrange(1, 6), rng.randrange(1, 6), rng)
        x0 = F.random_matrix(a.cols, 1, rng)
        b = a.mul(x0)
        x, ker = solve(a, b)
        assert a.mul(x) == b
        for _ in range(3):
            coeffs = F.random_matrix(ker.cols, 1, rng)
            xk = x + ker.mul(coeffs)
            assert a.mul(xk) == b


def test_block_matrix_and_column_space():
    a = F3.matrix([[1, 0], [0, 0]])
    blk = block_matrix(F3, [[a, None], [None, a]], [2, 2], [2, 2])
    assert blk.a.shape == (4, 4)
    assert rank(blk) == 2
    cs = column_space_basis(blk)
    assert cs.cols == 2


def test_coordinates_in_basis():
    basis = F5.matrix([[1, 0], [0, 2], [0, 0]])
    v = F5.matrix([[3], [4], [0]])
    c = coordinates_in_basis(basis, v)
    assert basis.mul(c) == v
    with pytest.raises(ValueError):
        coordinates_in_basis(basis, F5.matrix([[0], [0], [1]]))


def test_large_modulus_matmul_exact():
    p = 2147483647
    F = PrimeField(p)
    a = F.matrix([[p - 1, p - 2], [1, p - 1]])
    b = F.matrix([[p - 1], [p - 1]])
    out = a.mul(b)
    expect = [[((p - 1) * (p - 1) + (p - 2) * (p - 1)) % p], [((p - 1) + (p - 1) * (p - 1)) % p]]
    assert out.tolist() == expect
