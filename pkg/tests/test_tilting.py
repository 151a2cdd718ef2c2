import random

import numpy as np
import pytest

from nangle.algebras import build_based_algebra
from nangle.axioms import Budget, verify_axioms
from nangle.functorcat import FunctorCategoryError
from nangle.heller import delta_of, sequence_kernel
from nangle.modules import hom, identity_map, simple_module, zero_map
from nangle.sequences import is_exact_sequence, rotate_left, trivial_sequence
from nangle.stable import StableContext
from nangle.tilting import (
    AngulationModel,
    ClusterTiltingData,
    ClusterTiltingError,
    StandardOracle,
    build_angulation,
    calabi_yau_report,
    construct_angle,
    left_approximation,
    lemma_vanishing_check,
    suspension_order,
    transport_tower,
)

from helpers import preprojective_an


@pytest.fixture(scope="module")
def pi2_setup():
    ctx = StableContext(build_based_algebra(preprojective_an(2)))
    s1 = simple_module(ctx.algebra, 1)
    ctd = ClusterTiltingData(ctx, [s1], 4)
    amb = build_angulation(ctd, rng=random.Random(1))
    return ctx, s1, ctd, amb


@pytest.fixture(scope="module")
def pi3_setup():
    ctx = StableContext(build_based_algebra(preprojective_an(3)))
    s1 = simple_module(ctx.algebra, 1)
    t2 = ctx.cosyzygy_power(s1, 2)
    t3 = ctx.cosyzygy_power(s1, 4)
    ctd = ClusterTiltingData(ctx, [s1, t2, t3], 4)
    amb = build_angulation(ctd, rng=random.Random(1))
    return ctx, ctd, amb


def test_check_cluster_tilting_pi2(pi2_setup):
    ctx, s1, ctd, amb = pi2_setup
    s2 = simple_module(ctx.algebra, 2)
    report = ctd.check(witnesses=[s2])
    assert report["ok"]
    assert report["rigid"] and report["stable"]
    assert report["permutation"] == {0: 0}
    # S2 is correctly rejected from the orthogonal
    assert report["witnesses"][0]["status"] == "rejected"


def test_check_cluster_tilting_degenerate_d1():
    from helpers import dual_numbers

    ctx = StableContext(build_based_algebra(dual_numbers()))
    s = simple_module(ctx.algebra, 1)
    ctd = ClusterTiltingData(ctx, [s], 3)  # d = 1: Omega^{-1} S = S
    report = ctd.check()
    assert report["ok"]
    assert "empty conjunction" in report.get("note", "")


def test_suspension_order_pi2(pi2_setup):
    _, _, ctd, _ = pi2_setup
    assert suspension_order(ctd) == 1


def test_suspension_order_pi3(pi3_setup):
    _, ctd, _ = pi3_setup
    assert suspension_order(ctd) == 3


def test_left_approximation(pi2_setup):
    ctx, s1, ctd, amb = pi2_setup
    # X in add T: approximation is (X, identity)-like: a split epi onto X
    target, f, idx = left_approximation(ctx, s1, ctd.summands)
    assert target.dim_vector() == s1.dim_vector()
    assert not ctx.stable_map(f).is_stable_zero()
    # X with no stable maps into T: zero approximation
    s2 = simple_module(ctx.algebra, 2)
    target, f, idx = left_approximation(ctx, s2, ctd.summands)
    assert target.total_dim() == 0
    assert f.is_zero()


def test_construct_angle_identity(pi2_setup):
    ctx, s1, ctd, amb = pi2_setup
    seq, tower = construct_angle(amb, identity_map(s1))
    assert is_exact_sequence(seq)
    # cone of the identity is stably zero
    assert ctx.is_stably_zero_object(tower.halves[0])


def test_construct_angle_zero(pi2_setup):
    ctx, s1, ctd, amb = pi2_setup
    seq, tower = construct_angle(amb, zero_map(s1, s1))
    assert is_exact_sequence(seq)
    assert lemma_vanishing_check(amb, tower)


def test_construct_angle_all_maps_pi2(pi2_setup):
    # every alpha_1 between copies of S1: exactness and Lemma 3.4 hold
    ctx, s1, ctd, amb = pi2_setup
    for f in hom(s1, s1):
        for c in range(ctx.field.p):
            seq, tower = construct_angle(amb, f.scale(c))
            assert is_exact_sequence(seq)
            assert lemma_vanishing_check(amb, tower)
            # consecutive composites vanish stably
            assert seq.composite_is_complex()


def test_standard_oracle_self_consistency(pi2_setup):
    ctx, s1, ctd, amb = pi2_setup
    oracle = StandardOracle(amb)
    seq, tower = construct_angle(amb, identity_map(s1))
    assert oracle.contains(seq)
    # rotation of a member is a member
    member = oracle.member_starting_with(seq.maps[0])
    assert oracle.contains(rotate_left(member))


def test_standard_oracle_rejects_nonexact(pi2_setup):
    ctx, s1, ctd, amb = pi2_setup
    oracle = StandardOracle(amb)
    member = oracle.member_starting_with(zero_map(amb.model.projective(0), amb.model.projective(0)))
    # corrupt one map so exactness fails
    bad_maps = list(member.maps)
    if not bad_maps[1].is_zero():
        bad_maps[1] = bad_maps[1].scale(0)
        from nangle.sequences import NSigmaSequence

        bad = NSigmaSequence(amb.category, member.objects, bad_maps, check=False)
        assert not oracle.contains(bad)


def test_verify_axioms_pi2_all_pass(pi2_setup):
    ctx, s1, ctd, amb = pi2_setup
    oracle = StandardOracle(amb)
    report = verify_axioms(amb.category, oracle, Budget(samples=5, max_rank=2, seed=3))
    statuses = {r.axiom: r.status for r in report.results}
    assert report.passed(), statuses
    assert set(statuses) == {"F1a", "F1b", "F1c", "F2", "F3", "F4", "exactness"}


def test_verify_axioms_fault_rotation_sign(pi3_setup):
    # over p = 2 the rotation sign is invisible; use Pi(A3) over F_3-like data?
    # preprojective_an uses p = 2 by default, so the sign fault must be
    # caught over an odd-characteristic scenario instead.
    ctx3 = StableContext(build_based_algebra(preprojective_an(3, p=3)))
    s1 = simple_module(ctx3.algebra, 1)
    t2 = ctx3.cosyzygy_power(s1, 2)
    t3 = ctx3.cosyzygy_power(s1, 4)
    ctd = ClusterTiltingData(ctx3, [s1, t2, t3], 4)
    amb = build_angulation(ctd, rng=random.Random(5))
    oracle = StandardOracle(amb)
    report = verify_axioms(amb.category, oracle, Budget(samples=3, max_rank=1, seed=7),
                           axioms=["F2"], fault="rotation_sign")
    statuses = {r.axiom: r.status for r in report.results}
    assert statuses["F2"] == "fail"
    failing = [r for r in report.results if r.status == "fail"]
    assert failing[0].counterexample is not None


def test_calabi_yau_report_pi2_degenerate(pi2_setup):
    ctx, s1, ctd, amb = pi2_setup
    report = calabi_yau_report(amb)
    assert report.get("e_selfinjective")
    assert report["d"] == 1
    assert report["cy_dimension"] == 3
    assert report.get("degenerate")  # E is a field: no non-projective modules


def test_calabi_yau_report_pi3(pi3_setup):
    ctx, ctd, amb = pi3_setup
    report = calabi_yau_report(amb)
    assert report.get("e_selfinjective")
    assert report["d"] == 1
    assert report["cy_dimension"] == 3
    assert report["enumeration"].startswith("complete")
    assert report["modules_checked"] > 0
    assert report["verified"] is True


def test_coresolution_failure_detected():
    # a non-cluster-tilting summand list makes the tower fail loudly
    ctx = StableContext(build_based_algebra(preprojective_an(3)))
    s2 = simple_module(ctx.algebra, 2)
    ctd = ClusterTiltingData(ctx, [s2], 4)
    report = ctd.check()
    assert not report["ok"]  # not stable under the suspension power
