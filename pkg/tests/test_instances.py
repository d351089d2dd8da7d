"""Distribution family construction and invariants."""

import math
from fractions import Fraction

import numpy as np
import pytest

from modalgap.core import DomainError, SeedSpec, draw_labeled
from modalgap.instances import (instance_from_json,
                                instance_to_json, make_boolean,
                                make_separable, make_separable_from_fixed_points,
                                make_sine, make_sine_shattered,
                                make_sine_subset, make_subspace,
                                make_three_param)

SQRT_HALF = math.sqrt(2.0) / 2.0


def test_make_sine_validation():
    with pytest.raises(DomainError):
        make_sine(0.0)
    with pytest.raises(DomainError):
        make_sine(1.5)
    with pytest.raises(DomainError):
        make_sine(0.5, support=[1, 1])
    with pytest.raises(DomainError):
        make_sine_subset([2, 2, 3], 0.5)


def test_finite_support_exact_points():
    inst = make_sine(0.9, support=2)
    assert inst.support_points == (Fraction(16, 17), Fraction(256, 257))


def test_sine_identity_connection():
    inst = make_sine(1.0)
    sample = draw_labeled(inst, 1, 4, SeedSpec(13))
    for o in sample.tasks[0]:
        assert o.y[0] == o.x[0]
        assert o.z == math.sin(1.0 / o.x[0])


def test_sine_draws_satisfy_equations_to_one_ulp():
    inst = make_sine(0.37, support=6)
    sample = draw_labeled(inst, 1, 64, SeedSpec(3))
    for o in sample.tasks[0]:
        assert abs(o.z - math.sin(1.0 / (0.37 * o.x[0]))) <= 1e-12


def test_subset_instance_uniform_probabilities():
    inst = make_sine_subset([1, 2, 3, 4], 0.5)
    points = inst.support_enumeration(0)
    assert [p for p, _ in points] == [Fraction(1, 4)] * 4


def test_single_index_point_mass():
    inst = make_sine_subset([5], 0.5)
    sample = draw_labeled(inst, 1, 10, SeedSpec(0))
    xs = {o.x[0] for o in sample.tasks[0]}
    assert xs == {float(Fraction(16 ** 5, 16 ** 5 + 1))}


def test_shattered_instance_realizes_signs():
    signs = [+1, -1, -1, +1, -1]
    inst = make_sine_shattered(signs)
    for s, z in zip(signs, inst._z_floats):
        assert math.copysign(1.0, z) == s
        assert abs(z) >= SQRT_HALF - 1e-12


def test_shattered_instance_too_deep_rejected():
    with pytest.raises(DomainError):
        make_sine_shattered([1] * 300)


def test_three_param_ratio_invariant():
    inst = make_three_param()
    rng = SeedSpec(21).child("latent").generator()
    obs, latents = inst.draw_latent_task(rng, 0, 300)
    for o, (c, t1, t2) in zip(obs, latents):
        x, y = o.x[0], o.y[0]
        assert x == pytest.approx(c * t1)
        assert y == pytest.approx(c * t2)
        ratio = (x + y) / x
        assert ratio != 0.0
        assert 1 - 2 / t1 < ratio < 1 - 1 / t1
        assert -1.0 < ratio < 0.5  # union over the whole parameter box
        assert o.z == math.sin(1.0 / (x + y))


def test_three_param_raw_sum_labels():
    inst = make_three_param("raw-sum")
    sample = draw_labeled(inst, 1, 50, SeedSpec(4))
    for o in sample.tasks[0]:
        assert o.z == o.x[0] + o.y[0]
    with pytest.raises(DomainError):
        make_three_param("other")


def test_boolean_constant_table_gives_constant_label():
    inst = make_boolean([(0, 0)])
    sample = draw_labeled(inst, 1, 100, SeedSpec(5))
    assert all(o.z == 0.0 for o in sample.tasks[0])


def test_boolean_label_balance_and_independence():
    # b(0)=0, b(1)=1: half the mass has z=1
    inst = make_boolean([(0, 1)])
    points = inst.support_enumeration(0)
    mass_z1 = sum(p for p, o in points if o.z == 1.0)
    assert mass_z1 == Fraction(1, 2)
    # b(0)=1, b(1)=0: exact covariance of x and z is zero
    inst2 = make_boolean([(1, 0)])
    pts = inst2.support_enumeration(0)
    e_x = sum(p * o.x[0] for p, o in pts)
    e_z = sum(p * o.z for p, o in pts)
    e_xz = sum(p * o.x[0] * o.z for p, o in pts)
    assert e_xz - e_x * e_z == 0
    sample = draw_labeled(inst2, 1, 4000, SeedSpec(6))
    xs = np.array([o.x[0] for o in sample.tasks[0]])
    zs = np.array([o.z for o in sample.tasks[0]])
    assert abs(np.corrcoef(xs, zs)[0, 1]) < 3.0 / math.sqrt(4000)


def test_boolean_validation():
    with pytest.raises(DomainError):
        make_boolean([(0, 2)])
    with pytest.raises(DomainError):
        make_boolean([])


def test_subspace_constant_connection():
    inst = make_subspace(np.zeros(3), np.array([0.1, 0.0, 0.2]))
    sample = draw_labeled(inst, 1, 8, SeedSpec(7))
    for o in sample.tasks[0]:
        assert np.array_equal(o.y, np.array([0.1, 0.0, 0.2]))


def test_subspace_validation():
    with pytest.raises(DomainError):
        make_subspace(np.ones(3), np.zeros(3))  # norm sqrt(3) > 1
    with pytest.raises(DomainError):
        make_subspace(np.zeros(2), np.zeros(3))


def test_separable_rejects_identity_and_diagonal_segments():
    with pytest.raises(DomainError):
        make_separable([(0, 0), (1, 1)])
    with pytest.raises(DomainError):
        make_separable([(0, 0), (Fraction(1, 2), Fraction(1, 2)), (1, 1)])
    with pytest.raises(DomainError):
        make_separable([(0, 0), (Fraction(1, 2), Fraction(1, 4)), (1, 2)])


def test_separable_fixed_points_exact():
    inst = make_separable_from_fixed_points(
        [0, Fraction(3, 10), Fraction(7, 10), 1])
    assert inst.fixed_points == (Fraction(0), Fraction(3, 10),
                                 Fraction(7, 10), Fraction(1))
    # f stays strictly increasing and hits the diagonal only on A
    for a, b in zip(inst.breakpoints, inst.breakpoints[1:]):
        assert b[0] > a[0] and b[1] > a[1]
    assert inst.f_exact(Fraction(3, 10)) == Fraction(3, 10)
    assert inst.f_exact(Fraction(1, 2)) != Fraction(1, 2)


def test_separable_labels_match_sign_rule():
    inst = make_separable_from_fixed_points([0, Fraction(1, 2), 1])
    sample = draw_labeled(inst, 1, 200, SeedSpec(8))
    for o in sample.tasks[0]:
        x, y = o.x[0], o.y[0]
        assert o.z == (1.0 if x >= y else -1.0)
        assert y == pytest.approx(float(inst.f_exact(Fraction(x))), abs=1e-12)


def test_instance_json_round_trips():
    cases = [
        make_sine(0.4),
        make_sine(0.4, support=5),
        make_sine_shattered([1, -1, 1]),
        make_three_param("raw-sum"),
        make_boolean([(0, 1), (1, 1)]),
        make_subspace(np.array([0.3, 0.4]), np.array([0.0, 0.1])),
        make_separable_from_fixed_points([0, Fraction(1, 4), 1]),
    ]
    for inst in cases:
        data = instance_to_json(inst)
        back = instance_from_json(data)
        assert instance_to_json(back) == data
        T = getattr(inst, "task_count", None) or 1
        sample_a = draw_labeled(inst, T, 6, SeedSpec(77))
        sample_b = draw_labeled(back, T, 6, SeedSpec(77))
        for oa, ob in zip(sample_a.tasks[0], sample_b.tasks[0]):
            assert np.array_equal(oa.x, ob.x)
            assert np.array_equal(oa.y, ob.y)
            assert oa.z == ob.z
