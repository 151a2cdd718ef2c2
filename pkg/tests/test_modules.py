import numpy as np
import pytest

from nangle.algebras import build_based_algebra
from nangle.field import Matrix, PrimeField
from nangle.modules import (
    Module,
    ModuleMap,
    cokernel,
    direct_sum,
    dual_module,
    hom,
    hom_dim,
    identity_map,
    image,
    injective_module,
    is_selfinjective,
    kernel,
    map_from_vec,
    nakayama,
    nakayama_map,
    projective_module,
    radical_submodule,
    simple_module,
    socle,
    zero_map,
    zero_module,
)

from helpers import brute_force_hom_count, dual_numbers, path_algebra_an, preprojective_an


@pytest.fixture(scope="module")
def a2():
    return build_based_algebra(path_algebra_an(2))


@pytest.fixture(scope="module")
def pi2():
    return build_based_algebra(preprojective_an(2))


@pytest.fixture(scope="module")
def kx2():
    return build_based_algebra(dual_numbers())


def test_projective_dim_vectors_a2(a2):
    p1 = projective_module(a2, 1)
    p2 = projective_module(a2, 2)
    assert p1.dim_vector() == (1, 1)
    assert p2.dim_vector() == (0, 1)


def test_projective_dim_vector_pi2(pi2):
    # basis paths starting at 1 are {e1, a1}
    p1 = projective_module(pi2, 1)
    assert p1.dim_vector() == (1, 1)


def test_relation_check_catches_bad_module(pi2):
    F = pi2.field
    # both arrow actions the identity on a 1-dim space violates a1 b1 = 0
    with pytest.raises(ValueError):
        Module(pi2, {1: 1, 2: 1}, {"a1": F.matrix([[1]]), "b1": F.matrix([[1]])}, check=True)


def test_hom_simple_modules_a2(a2):
    s1 = simple_module(a2, 1)
    s2 = simple_module(a2, 2)
    assert hom_dim(s1, s2) == 0
    assert hom_dim(s1, s1) == 1


def test_hom_p1_p1_pi2(pi2):
    p1 = projective_module(pi2, 1)
    assert hom_dim(p1, p1) == 1  # = dim e1.Pi.e1


def test_hom_against_brute_force(pi2, a2):
    # all vertex-matrix tuples over F_2 for small modules
    cases = [
        (projective_module(pi2, 1), projective_module(pi2, 2)),
        (projective_module(pi2, 1), simple_module(pi2, 2)),
        (simple_module(a2, 1), projective_module(a2, 1)),
        (projective_module(a2, 1), projective_module(a2, 1)),
    ]
    for m, n in cases:
        basis = hom(m, n)
        p = m.field.p
        assert p ** len(basis) == brute_force_hom_count(m, n)


def test_hom_maps_commute(pi2):
    p1 = projective_module(pi2, 1)
    p2 = projective_module(pi2, 2)
    for f in hom(p1, p2):
        assert f.commutes()


def test_injective_socle_oracle(pi2):
    # I_v over self-injective Pi(A2) is isomorphic to P_{nu(v)}: socle check
    i1 = injective_module(pi2, 1)
    assert i1.dim_vector() == (1, 1)
    soc, _ = socle(i1)
    assert soc.dims[1] == 1 and soc.dims[2] == 0


def test_socle_of_projectives_pi2(pi2):
    p1 = projective_module(pi2, 1)
    soc, incl = socle(p1)
    assert soc.dims == {1: 0, 2: 1}
    assert incl.commutes()


def test_is_selfinjective(pi2, a2, kx2):
    assert is_selfinjective(a2) is None  # P2 = S2 is not injective
    perm = is_selfinjective(pi2)
    assert perm == {1: 2, 2: 1}
    assert is_selfinjective(kx2) == {1: 1}


def test_injectivity_oracle_via_ext(a2, pi2):
    # Independent oracle: P injective iff Ext^1(S_w, P) = 0 for all simples,
    # computed from Hom(rad P_w, P) / restriction of Hom(P_w, P).
    def ext1_simple_vanishes(algebra, w, target):
        pw = projective_module(algebra, w)
        rad, incl = radical_submodule(pw)
        maps_from_pw = hom(pw, target)
        restricted = [incl.then(f) for f in maps_from_pw]
        full = hom(rad, target)
        if not full:
            return True
        mat = np.stack([f.vec() for f in full], axis=1)
        field = target.field
        from nangle.field import rank

        rk_full = len(full)
        if restricted:
            aug = np.stack([f.vec() for f in restricted], axis=1)
            rk_res = rank(Matrix(field, aug))
        else:
            rk_res = 0
        return rk_full == rk_res

    def injective_by_ext(algebra, m):
        return all(ext1_simple_vanishes(algebra, w, m) for w in algebra.quiver.vertices)

    assert not injective_by_ext(a2, projective_module(a2, 2))  # P2 = S2 not injective
    assert injective_by_ext(a2, injective_module(a2, 2))
    assert injective_by_ext(pi2, projective_module(pi2, 1))  # self-injective
    assert injective_by_ext(pi2, projective_module(pi2, 2))


def test_kernel_cokernel_image(pi2):
    p1 = projective_module(pi2, 1)
    s1 = simple_module(pi2, 1)
    # the projection P1 -> S1 (top)
    cand = [f for f in hom(p1, s1) if not f.is_zero()]
    assert len(cand) == 1
    f = cand[0]
    K, incl = kernel(f)
    assert K.dim_vector() == (0, 1)  # rad P1 = S2
    C, proj = cokernel(f)
    assert C.is_zero()
    I, iincl, iepi = image(f)
    assert I.dim_vector() == s1.dim_vector()
    assert iepi.then(iincl) == f
    # kernel inclusion followed by f is zero
    assert incl.then(f).is_zero()


def test_direct_sum_projections(pi2):
    p1 = projective_module(pi2, 1)
    s2 = simple_module(pi2, 2)
    total, incls, projs = direct_sum([p1, s2])
    assert total.total_dim() == p1.total_dim() + s2.total_dim()
    for inc, prj, m in zip(incls, projs, [p1, s2]):
        assert inc.then(prj) == identity_map(m)
    # cross projections vanish
    assert incls[0].then(projs[1]).is_zero()


def test_nakayama_on_projectives(pi2, kx2):
    # nu(P_v) has the dimension vector of I_v
    for v in (1, 2):
        nu_p = nakayama(projective_module(pi2, v), pi2.opposite())
        iv = injective_module(pi2, v)
        assert nu_p.dim_vector() == iv.dim_vector()
    nu_p = nakayama(projective_module(kx2, 1))
    assert nu_p.dim_vector() == injective_module(kx2, 1).dim_vector()


def test_nakayama_functorial_on_identity(pi2):
    p1 = projective_module(pi2, 1)
    nu_p1 = nakayama(p1)
    nf = nakayama_map(identity_map(p1), nu_p1, nu_p1)
    assert nf == identity_map(nu_p1)


def test_nakayama_additive_and_functorial(pi2):
    p1 = projective_module(pi2, 1)
    p2 = projective_module(pi2, 2)
    maps = hom(p1, p2)
    nu_p1, nu_p2 = nakayama(p1), nakayama(p2)
    for f in maps:
        nf = nakayama_map(f, nu_p1, nu_p2)
        assert nf.commutes()
    if len(maps) >= 2:
        f, g = maps[0], maps[1]
        nf = nakayama_map(f, nu_p1, nu_p2)
        ng = nakayama_map(g, nu_p1, nu_p2)
        nsum = nakayama_map(f + g, nu_p1, nu_p2)
        assert nsum == nf + ng


def test_nakayama_identity_functor_on_kx2(kx2):
    # over k[x]/x^2 the Nakayama functor is naturally the identity
    for m in (projective_module(kx2, 1), simple_module(kx2, 1)):
        assert nakayama(m).dim_vector() == m.dim_vector()


def test_dual_module_roundtrip(pi2):
    op = pi2.opposite()
    p1 = projective_module(pi2, 1)
    d = dual_module(p1, op)
    dd = dual_module(d, pi2)
    assert dd.dim_vector() == p1.dim_vector()
    for a in p1.act:
        assert dd.act[a] == p1.act[a]


def test_path_action_convention(pi2):
    # path (a1, b1) acts as act[b1] @ act[a1]
    p1 = projective_module(pi2, 1)
    m = p1.path_action(("a1", "b1"), 1)
    expect = p1.act["b1"].mul(p1.act["a1"])
    assert m == expect
