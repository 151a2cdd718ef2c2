import random

import numpy as np
import pytest

from nangle.algebras import build_based_algebra
from nangle.functorcat import FunctorCategoryModel, Twist
from nangle.modules import hom, identity_map, projective_module, simple_module, zero_map
from nangle.sequences import (
    NSigmaSequence,
    SequenceMorphism,
    SigmaCategory,
    complete_morphism,
    completion_space,
    cone,
    decompose_contractible,
    find_sequence_iso,
    find_weak_iso,
    identity_morphism,
    is_exact_sequence,
    morphism_space,
    periodic_contraction,
    rotate_left,
    rotate_right,
    sequence_direct_sum,
    split_summand,
    trivial_sequence,
    weakly_isomorphic,
)
from nangle.stable import StableContext

from helpers import dual_numbers, preprojective_an


@pytest.fixture(scope="module")
def cat3():
    """(proj k[x]/x^2, Sigma = id, n = 3)."""
    A = build_based_algebra(dual_numbers(3))
    model = FunctorCategoryModel([projective_module(A, 1)], ambient=None)
    return SigmaCategory(model, Twist.identity(model), 3)


@pytest.fixture(scope="module")
def cat4():
    """(add S1 in the stable category of Pi(A2), Sigma = Omega^{-2}, n = 4)."""
    ctx = StableContext(build_based_algebra(preprojective_an(2)))
    model = FunctorCategoryModel([simple_module(ctx.algebra, 1)], ambient=ctx)
    tw = Twist.from_suspension(model, 2)
    return SigmaCategory(model, tw, 4)


def koszul_sequence(cat3, scale_last=1):
    """A -x-> A -x-> A -sx-> A over k[x]/x^2 (Sigma = id)."""
    A = cat3.model.projective(0)
    x_maps = [f for f in hom(A, A) if not f.is_iso() and not f.is_zero()]
    x = x_maps[0]
    return NSigmaSequence(cat3, [A, A, A], [x, x, x.scale(scale_last)])


def test_trivial_sequence_slots(cat3):
    x = cat3.model.projective(0)
    for slot in (1, 2, 3):
        t = trivial_sequence(cat3, x, slot)
        # identity sits at map position `slot`
        m = t.maps[slot - 1]
        assert m.is_iso() and not m.is_zero()
        assert is_exact_sequence(t)


def test_trivial_sequence_zero(cat3):
    z = cat3.zero_object()
    t = trivial_sequence(cat3, z, 1)
    assert all(o.total_dim() == 0 for o in t.objects)
    assert is_exact_sequence(t)


def test_rotate_inverse_pair(cat3, cat4):
    for cat in (cat3, cat4):
        x = cat.model.projective(0)
        t = trivial_sequence(cat, x, 1)
        assert rotate_right(rotate_left(t)).key() == t.key()
        assert rotate_left(rotate_right(t)).key() == t.key()


def test_rotation_sign_even_n(cat4):
    # for n = 4 the wrapped map carries sign (+1)
    x = cat4.model.projective(0)
    t = trivial_sequence(cat4, x, 1)
    r = rotate_left(t)
    wrapped = r.maps[3]
    expected = cat4.twist.map(t.maps[0])
    assert (wrapped - expected).is_zero()


def test_rotation_sign_odd_n(cat3):
    # for n = 3 the wrapped map carries sign (-1)
    seq = koszul_sequence(cat3)
    r = rotate_left(seq)
    wrapped = r.maps[2]
    expected = cat3.sigma_map(seq.maps[0]).scale(-1)
    assert (wrapped - expected).is_zero()


def test_rotating_n_times_gives_sigma_shift(cat3, cat4):
    # rotating n times yields Sigma X with every map (-1)^n Sigma alpha_i
    for cat, seq in ((cat3, koszul_sequence(cat3)),
                     (cat4, trivial_sequence(cat4, cat4.model.projective(0), 2))):
        n = cat.n
        r = seq
        for _ in range(n):
            r = rotate_left(r)
        sign = 1 if n % 2 == 0 else -1
        for i in range(n):
            expected = cat.sigma_map(seq.maps[i]).scale(sign)
            assert (r.maps[i] - expected).is_zero()


def test_koszul_sequence_exact(cat3):
    assert is_exact_sequence(koszul_sequence(cat3))


def test_nonexact_sequence_detected(cat3):
    # identity in two consecutive maps is not even a complex
    A = cat3.model.projective(0)
    ident = identity_map(A)
    seq = NSigmaSequence(cat3, [A, A, A], [ident, ident, ident])
    assert not is_exact_sequence(seq)


def test_exactness_rotation_invariant(cat3):
    seq = koszul_sequence(cat3)
    assert is_exact_sequence(rotate_left(seq))
    assert is_exact_sequence(rotate_right(seq))
    bad = koszul_sequence(cat3, scale_last=0)
    assert not is_exact_sequence(bad)
    assert not is_exact_sequence(rotate_left(bad))


def test_direct_sum_and_split(cat3):
    seq = koszul_sequence(cat3)
    t = trivial_sequence(cat3, cat3.model.projective(0), 1)
    total, ia, ib = sequence_direct_sum(seq, t)
    assert is_exact_sequence(total)
    # split with the idempotent of the first factor
    proj_phis = []
    for i in range(3):
        inc = ia.phis[i]
        # build idempotent from the inclusion and the block structure
        r = inc.target
        e = inc.mats
        mats = {}
        for v in r.dims:
            m = np.zeros((r.dims[v], r.dims[v]), dtype=np.int64)
            cols = inc.mats[v].a
            m[: cols.shape[0], : cols.shape[1]] = 0
            # inclusion then projection onto the first block
            d = seq.objects[i].dims[v]
            for k in range(d):
                m[k, k] = 1
            from nangle.field import Matrix

            mats[v] = Matrix(cat3.field, m)
        from nangle.modules import ModuleMap

        proj_phis.append(ModuleMap(r, r, mats, check=False))
    idem = SequenceMorphism(total, total, proj_phis)
    assert idem.is_idempotent()
    piece = split_summand(total, idem)
    assert find_sequence_iso(piece, seq) is not None


def test_split_requires_idempotent(cat3):
    seq = koszul_sequence(cat3)
    bad = SequenceMorphism(seq, seq, [p.scale(1) for p in identity_morphism(seq).phis], check=False)
    bad.phis[0] = seq.maps[0].then(zero_map(seq.objects[1], seq.objects[0]))
    with pytest.raises(ValueError):
        split_summand(seq, bad)


def test_cone_of_identity_contractible(cat3, cat4):
    for cat, seq in ((cat3, koszul_sequence(cat3)),
                     (cat4, trivial_sequence(cat4, cat4.model.projective(0), 1))):
        c = cone(identity_morphism(seq))
        assert is_exact_sequence(c)
        assert periodic_contraction(c) is not None
        pieces = decompose_contractible(c)
        assert pieces is not None
        if pieces:
            total = pieces[0]
            for piece in pieces[1:]:
                total = sequence_direct_sum(total, piece)[0]
            assert find_sequence_iso(total, c) is not None


def test_cone_of_zero_is_block_sum(cat3):
    seq = koszul_sequence(cat3)
    t = trivial_sequence(cat3, cat3.model.projective(0), 1)
    zero_phis = [zero_map(s, tt) for s, tt in zip(seq.objects, t.objects)]
    phi = SequenceMorphism(seq, t, zero_phis)
    c = cone(phi)
    expected = sequence_direct_sum(rotate_left(seq), t)[0]
    assert find_sequence_iso(c, expected) is not None


def test_trivial_sequence_has_contraction(cat3):
    t = trivial_sequence(cat3, cat3.model.projective(0), 2)
    assert periodic_contraction(t) is not None


def test_nonexact_has_no_contraction(cat3):
    # not even a complex
    A = cat3.model.projective(0)
    ident = identity_map(A)
    seq = NSigmaSequence(cat3, [A, A, A], [ident, ident, ident])
    assert periodic_contraction(seq) is None
    # a complex that is not exact
    bad = koszul_sequence(cat3, scale_last=0)
    assert bad.composite_is_complex()
    assert periodic_contraction(bad) is None


def test_complete_morphism_identity(cat3):
    seq = koszul_sequence(cat3)
    ident1 = identity_map(seq.objects[0])
    ident2 = identity_map(seq.objects[1])
    phi = complete_morphism(seq, seq, ident1, ident2)
    assert phi is not None
    assert phi.is_iso()


def test_complete_morphism_rejects_noncommuting(cat3):
    seq = koszul_sequence(cat3)
    with pytest.raises(ValueError):
        complete_morphism(seq, seq, identity_map(seq.objects[0]),
                          zero_map(seq.objects[1], seq.objects[1]))


def test_completion_space_kernel(cat3):
    seq = koszul_sequence(cat3)
    space = completion_space(seq, seq, identity_map(seq.objects[0]), identity_map(seq.objects[1]))
    assert space.solvable
    # every kernel perturbation still gives a morphism of sequences
    k = space.kernel_dim()
    if k:
        coeffs = np.zeros(k, dtype=np.int64)
        coeffs[0] = 1
        phi = space.morphism(coeffs)
        assert isinstance(phi, SequenceMorphism)


def test_weak_iso_detection(cat3):
    seq = koszul_sequence(cat3)
    ident = identity_morphism(seq)
    assert ident.is_weak_iso()
    # a morphism with only phi_1 invertible is not a weak isomorphism
    phis = [identity_map(seq.objects[0]),
            zero_map(seq.objects[1], seq.objects[1]),
            zero_map(seq.objects[2], seq.objects[2])]
    try:
        m = SequenceMorphism(seq, seq, phis)
        assert not m.is_weak_iso()
    except ValueError:
        pass  # not even a morphism; acceptable for this fixture


def test_find_weak_iso_between_equal_sequences(cat3):
    seq = koszul_sequence(cat3)
    m = find_weak_iso(seq, seq)
    assert m is not None and m.is_weak_iso()


def test_weakly_isomorphic_direct(cat3):
    seq = koszul_sequence(cat3)
    # conjugating by slotwise units gives an isomorphic (hence weakly
    # isomorphic) sequence: phis = (1, 2, 1) sends (x,x,x) to (2x,2x,x)
    other = NSigmaSequence(cat3, list(seq.objects),
                           [seq.maps[0].scale(2), seq.maps[1].scale(2), seq.maps[2]])
    chain = weakly_isomorphic(seq, other, depth=2)
    assert chain is not None
    direction, m = chain[0]
    assert m.is_weak_iso()


def test_unit_scaled_last_map_not_weakly_isomorphic_f3(cat3):
    # over F_3 the sequences (x,x,x) and (x,x,2x) admit no weak
    # isomorphism in either direction: they represent the two distinct
    # delta classes of the Heller parametrization
    seq = koszul_sequence(cat3)
    other = NSigmaSequence(cat3, list(seq.objects),
                           [seq.maps[0], seq.maps[1], seq.maps[2].scale(2)])
    assert find_weak_iso(seq, other) is None
    assert find_weak_iso(other, seq) is None


def test_morphism_space_contains_identity(cat3):
    seq = koszul_sequence(cat3)
    basis = morphism_space(seq, seq)
    assert basis
    # identity is in the span
    from nangle.field import Matrix, solve

    cols = np.stack([np.concatenate([p.vec() for p in m.phis]) for m in basis], axis=1)
    ident_vec = np.concatenate([identity_map(o).vec() for o in seq.objects])
    assert solve(Matrix(cat3.field, cols), Matrix(cat3.field, ident_vec.reshape(-1, 1))) is not None
