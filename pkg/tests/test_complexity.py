"""Monte Carlo complexity estimates against closed forms and brute force."""

import itertools
import math

import numpy as np
import pytest

from modalgap.core import DomainError, SeedSpec
from modalgap.complexity import (approximate_realizability, gaussian_average,
                                 gaussian_average_closed_form,
                                 rademacher_average,
                                 rademacher_average_closed_form)
from modalgap.hypotheses import (BooleanMapClass, ComposedSineClass,
                                 PolynomialClass, ScalingClass,
                                 SignCompleteClass, SineSingletonClass,
                                 TableLookupClass)

SEED = SeedSpec(314)


def test_singleton_average_is_exactly_zero():
    cls = SineSingletonClass()
    sample = (np.array([0.5, 0.9]), np.array([0.4, 0.7]))
    est = gaussian_average(cls, sample, draws=500, seed=SEED)
    assert est.value == 0.0 and est.stderr == 0.0
    assert est.mode == "enumeration-exact"
    assert gaussian_average_closed_form(cls, sample) == 0.0


def test_scaling_matches_half_normal_mean():
    # E[max(0, Z)] = 1/sqrt(2 pi) for Z standard normal
    cls = ScalingClass()
    est = gaussian_average(cls, np.array([1.0]), draws=1_000_000, seed=SEED)
    assert est.stderr < 1.5e-3
    assert est.agrees_with(1.0 / math.sqrt(2.0 * math.pi))
    assert abs(est.value - 0.3989) < 2e-3


def test_scaling_closed_form_values():
    cls = ScalingClass()
    assert gaussian_average_closed_form(cls, np.ones(4)) == pytest.approx(
        2.0 / math.sqrt(2.0 * math.pi))
    assert gaussian_average_closed_form(cls, np.ones(4)) == pytest.approx(0.7979, abs=1e-4)
    assert rademacher_average_closed_form(cls, np.array([1.0])) == 0.5


def test_sign_complete_gaussian_value_and_brute_force():
    cls = SignCompleteClass()
    pts = np.array([[0.0], [0.5], [1.0]])
    est = gaussian_average(cls, pts, draws=40_000, seed=SEED)
    assert est.agrees_with(3.0 * math.sqrt(2.0 / math.pi))
    assert abs(est.value - 2.394) < 0.02
    # per-draw supremum equals the brute-force max over the 8 sign patterns
    oracle = cls.sup_oracle(pts)
    rng = SEED.child("brute").generator()
    sigma = rng.standard_normal((64, 3))
    values = oracle.batch(sigma)
    patterns = np.array(list(itertools.product((-1.0, 1.0), repeat=3)))
    brute = (sigma @ patterns.T).max(axis=1)
    assert np.allclose(values, brute)
    assert np.allclose(values, np.abs(sigma).sum(axis=1))


def test_sign_complete_closed_forms():
    cls = SignCompleteClass()
    pts = np.arange(8.0).reshape(-1, 1)
    assert gaussian_average_closed_form(cls, pts) == pytest.approx(
        8.0 * math.sqrt(2.0 / math.pi))
    assert gaussian_average_closed_form(cls, pts) == pytest.approx(6.383, abs=1e-3)
    assert rademacher_average_closed_form(cls, pts) == 8.0


def test_rademacher_examples():
    pts = np.arange(5.0).reshape(-1, 1)
    est = rademacher_average(SignCompleteClass(), pts, draws=500, seed=SEED)
    assert est.value == 5.0 and est.stderr == 0.0   # every draw sums |eps| = n
    est = rademacher_average(ScalingClass(), np.array([1.0]), draws=200_000, seed=SEED)
    assert est.agrees_with(0.5)


def test_unsupported_closed_form_returns_none():
    assert gaussian_average_closed_form(BooleanMapClass(), np.array([0.0, 1.0])) is None
    assert gaussian_average_closed_form(PolynomialClass(2, 1), np.array([1.0])) is None
    assert rademacher_average_closed_form(ScalingClass(), np.ones(3)) is None


def test_comparison_inequality_rademacher_vs_gaussian():
    # R <= sqrt(pi/2) G with Monte Carlo slack
    samples = {
        "scaling-1": (ScalingClass(), np.array([1.0])),
        "scaling-4": (ScalingClass(), np.array([0.3, 0.9, 0.5, 1.0])),
        "sign-complete": (SignCompleteClass(), np.arange(6.0).reshape(-1, 1)),
        "boolean": (BooleanMapClass(), np.array([0.0, 1.0, 1.0, 0.0])),
    }
    for name, (cls, sample) in samples.items():
        g = gaussian_average(cls, sample, draws=30_000, seed=SEED.child(name))
        r = rademacher_average(cls, sample, draws=30_000, seed=SEED.child(name))
        slack = 4.0 * (g.stderr + r.stderr)
        assert r.value <= math.sqrt(math.pi / 2.0) * g.value + slack, name


def test_scale_equivariance_of_sign_complete():
    pts = np.array([[0.1], [0.7], [0.4]])
    base = gaussian_average(SignCompleteClass(bound=1.0), pts, draws=2000, seed=SEED)
    doubled = gaussian_average(SignCompleteClass(bound=2.0), pts, draws=2000, seed=SEED)
    assert doubled.value == 2.0 * base.value   # exact: same draws, scaled sup


def test_draws_validation_and_determinism():
    with pytest.raises(DomainError):
        gaussian_average(ScalingClass(), np.array([1.0]), draws=50, seed=SEED)
    a = gaussian_average(ScalingClass(), np.ones(3), draws=5000, seed=SEED)
    b = gaussian_average(ScalingClass(), np.ones(3), draws=5000, seed=SEED)
    assert a.value == b.value and a.stderr == b.stderr


def test_worker_count_does_not_change_results():
    cls = SignCompleteClass()
    pts = np.arange(5.0).reshape(-1, 1)
    serial = gaussian_average(cls, pts, draws=20_000, seed=SEED, workers=1)
    threaded = gaussian_average(cls, pts, draws=20_000, seed=SEED, workers=4)
    assert serial.value == threaded.value
    assert serial.stderr == threaded.stderr


def test_composed_sine_estimate_is_witness_mode():
    est = gaussian_average(ComposedSineClass(), [1, 2, 3, 4], draws=500,
                           seed=SEED)
    assert est.mode == "witness-lower-bound"
    assert est.value / 4 >= 0.35


def test_realizability_examples():
    # realizable scaling family: R = 0 with the generating theta as witness
    xs = np.array([0.2, 0.5, 0.8])
    report = approximate_realizability(ScalingClass(), xs, 0.6 * xs)
    assert report.value == 0.0 and report.exact
    assert report.witness.theta == pytest.approx(0.6)

    report = approximate_realizability(BooleanMapClass(),
                                       np.array([0.0, 0.0]),
                                       np.array([0.0, 1.0]))
    assert report.value == 0.5 and report.exact

    cls = TableLookupClass(support=(0.1, 0.9))
    report = approximate_realizability(cls, np.array([0.1, 0.9]),
                                       np.array([0.1, 0.9]))
    assert report.value == 0.0


def test_realizability_polynomial_flagged_surrogate():
    xs = np.array([0.1, 0.4, 0.9])
    ys = np.column_stack([xs * 0.5, xs * 0.0 + 0.2])
    report = approximate_realizability(PolynomialClass(1, 2), xs, ys)
    assert report.surrogate == "least-squares"
    assert not report.exact
    assert report.value <= 1e-10


def test_realizability_empty_sample():
    with pytest.raises(DomainError):
        approximate_realizability(ScalingClass(), np.array([]), np.array([]))
