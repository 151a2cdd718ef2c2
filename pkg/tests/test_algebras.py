import numpy as np
import pytest

from nangle.algebras import ClosureError, build_based_algebra
from nangle.field import PrimeField
from nangle.quivers import AlgebraPresentation, PathExpr, Quiver

from helpers import (
    dual_numbers,
    naive_graded_quotient_dims,
    path_algebra_an,
    preprojective_an,
)


def test_path_algebra_a2():
    A = build_based_algebra(path_algebra_an(2))
    assert A.dim == 3
    paths = sorted(b.path for b in A.basis)
    assert paths == [(), (), ("a1",)]


def test_dual_numbers_dim2():
    A = build_based_algebra(dual_numbers())
    assert A.dim == 2
    assert A.dims_by_degree() == {0: 1, 1: 1}


def test_preprojective_a2_basis():
    A = build_based_algebra(preprojective_an(2))
    assert A.dim == 4
    assert sorted(b.path for b in A.basis) == [(), (), ("a1",), ("b1",)]
    # also equals 2*3*4/6
    assert A.dim == 2 * 3 * 4 // 6


@pytest.mark.parametrize("n", [2, 3, 4, 5])
def test_preprojective_dimension_formula(n):
    A = build_based_algebra(preprojective_an(n, degree_bound=2 * n))
    assert A.dim == n * (n + 1) * (n + 2) // 6


@pytest.mark.parametrize("n", [2, 3])
def test_preprojective_dims_against_naive_oracle(n):
    # Independent oracle: full path-space row reduction per degree.
    pres = preprojective_an(n)
    oracle = naive_graded_quotient_dims(pres, 2 * n + 1)
    A = build_based_algebra(pres)
    got = A.dims_by_degree()
    for d, dim in oracle.items():
        assert got.get(d, 0) == dim
    assert A.dim == sum(oracle.values())


def test_unit_and_associativity_small():
    for pres in (path_algebra_an(3), preprojective_an(2), dual_numbers()):
        A = build_based_algebra(pres)
        assert A.check_unit()
        assert A.check_associativity()


def test_preprojective_a3_associativity():
    A = build_based_algebra(preprojective_an(3))
    assert A.check_unit()
    assert A.check_associativity()


def test_closure_error_unbounded():
    # free loop algebra is infinite-dimensional
    field = PrimeField(2)
    quiver = Quiver([1], [("x", 1, 1)])
    pres = AlgebraPresentation(quiver, field, [], degree_bound=5)
    with pytest.raises(ClosureError):
        build_based_algebra(pres)


def test_inadmissible_relation_rejected():
    field = PrimeField(2)
    quiver = Quiver([1], [("x", 1, 1)])
    rel = PathExpr(quiver, [(1, ("x",))], field)
    pres = AlgebraPresentation(quiver, field, [rel], degree_bound=5)
    with pytest.raises(ValueError):
        build_based_algebra(pres)


def test_mixed_length_relation_truncated_polynomial():
    # k<x>/(x^2 - x^3) = k[x]/(x^2 (x-1)) has dimension 3 and a
    # non-nilpotent arrow ideal (x^2 becomes idempotent), so the closure
    # must stabilize at dim 3 and flag the algebra as non-admissible.
    field = PrimeField(3)
    quiver = Quiver([1], [("x", 1, 1)])
    rel = PathExpr(quiver, [(1, ("x", "x")), (-1, ("x", "x", "x"))], field)
    pres = AlgebraPresentation(quiver, field, [rel], degree_bound=8)
    A = build_based_algebra(pres)
    assert A.dim == 3
    assert A.check_associativity()
    assert not A.is_admissible()
    # x^2 is idempotent in the quotient
    xi = A.arrow_index["x"]
    x2 = A.basis_product(xi, xi)
    assert np.array_equal(A.mult(x2, x2), x2)


def test_admissible_flag_on_bundled_algebras():
    for pres in (path_algebra_an(3), preprojective_an(3), dual_numbers()):
        assert build_based_algebra(pres).is_admissible()


def test_opposite_of_preprojective():
    A = build_based_algebra(preprojective_an(3))
    B = A.opposite()
    assert B.dim == A.dim
    assert B.check_unit()
    assert B.check_associativity()
    # op of op multiplication agrees with original on random pairs
    rng = np.random.RandomState(0)
    C = B.opposite()
    for _ in range(20):
        i = rng.randint(A.dim)
        j = rng.randint(A.dim)
        assert np.array_equal(C.basis_product(i, j), A.basis_product(i, j))


def test_expr_coords_and_relation_vanishing():
    pres = preprojective_an(2)
    A = build_based_algebra(pres)
    for r in pres.all_relations():
        assert not A.expr_coords(r).any()
