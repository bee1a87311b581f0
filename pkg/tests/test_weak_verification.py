from dataclasses import replace

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from eulerwave.errors import ConfigurationError, DomainError
from eulerwave.fan_construction import (FanPartition, baseline_family, check_conditions,
                                        family_fan, perturbed_family)
from eulerwave.lifted_algebra import State, lift
from eulerwave.weak_verification import (PiecewiseFan, TestFunctionSet, bump_integral,
                                         entropy_jump_residual, interface_jump_integral,
                                         rh_residual, weak_form_residual, weak_integrals,
                                         verify_subsolution)


@pytest.fixture(scope="module")
def baseline():
    return baseline_family(6.0)


def test_rh_residual_vanishes_on_baseline(baseline):
    res = rh_residual(PiecewiseFan.from_subsolution(baseline))
    assert np.abs(res).max() <= 1e-12


def test_rh_residual_detects_density_shift(baseline):
    res = rh_residual(PiecewiseFan.from_subsolution(replace(baseline, rho1=baseline.rho1 + 0.1)))
    assert np.abs(res).max() > 1e-2


def test_rh_residual_witness():
    res = rh_residual(PiecewiseFan.from_subsolution(perturbed_family(-0.001, 5.8)))
    assert np.abs(res).max() <= 1e-12


def test_bump_integral_value():
    # the bump is exp(1 - 1/(1-s^2)); int exp(-1/(1-s^2)) ds = 0.44399381616807943
    assert bump_integral() == pytest.approx(np.e * 0.44399381616807943, rel=1e-12)


def test_weak_residual_small_for_baseline(baseline):
    fan = PiecewiseFan.from_subsolution(baseline)
    tests = TestFunctionSet.random(20, seed=7)
    assert weak_form_residual(fan, tests) <= 1e-6
    on = TestFunctionSet.on_interfaces(fan.speeds, 5, seed=2)
    assert weak_form_residual(fan, on) <= 1e-6


def test_weak_integrals_match_jump_formula(baseline):
    fan = PiecewiseFan.from_subsolution(replace(baseline, rho1=baseline.rho1 + 0.1))
    tests = TestFunctionSet.on_interfaces(fan.speeds, 4, seed=3)
    w = weak_integrals(fan, tests)
    ref = interface_jump_integral(fan, tests)
    assert np.abs(ref).max() > 1e-2
    np.testing.assert_allclose(w, ref, atol=1e-8)


def test_weak_residual_converges(baseline):
    fan = PiecewiseFan.from_subsolution(baseline)
    errs = [weak_form_residual(fan, TestFunctionSet.on_interfaces(fan.speeds, 3, seed=1,
                                                                   resolution=n))
            for n in (16, 32, 64, 128)]
    assert all(b < a / 4 for a, b in zip(errs, errs[1:]))


def test_constant_field_has_zero_weak_integral():
    z = lift(State(2.0, (0.3, -0.7))).as_vector()
    fan = PiecewiseFan.constant(z)
    tests = TestFunctionSet.random(10, seed=0)
    # the x2 rule is split at the (trivial) interfaces, leaving a tiny quadrature error
    assert weak_form_residual(fan, tests) <= 1e-9
    far = TestFunctionSet([[0.5, 0.0, 5.0]], [[0.3, 0.3, 0.3]])
    assert weak_form_residual(fan, far) <= 1e-14


def test_empty_test_set():
    fan = PiecewiseFan.constant(np.ones(8))
    empty = TestFunctionSet(np.zeros((0, 3)), np.zeros((0, 3)))
    assert weak_form_residual(fan, empty) == 0.0


@pytest.mark.parametrize("kwargs", [
    dict(centers=[[0.5, 0, 0]], radii=[[0.2, 0.2, 0.2]], resolution=4),
    dict(centers=[[0.5, 0, 0]], radii=[[0.45, 0.2, 0.2]], resolution=8),
    dict(centers=[[0.1, 0, 0]], radii=[[0.2, 0.2, 0.2]]),
    dict(centers=[[0.5, 0, 0]], radii=[[0.2, -0.2, 0.2]]),
    dict(centers=[[0.5, 0, 0]], radii=[[0.2, 0.2]]),
])
def test_bad_test_function_configuration(kwargs):
    with pytest.raises(ConfigurationError):
        TestFunctionSet(**kwargs)


def test_fan_validation():
    z = np.ones(8)
    with pytest.raises(DomainError):
        PiecewiseFan(FanPartition(1.0, 0.0), (z, z, z))
    with pytest.raises(DomainError):
        PiecewiseFan(FanPartition(0.0, 1.0), (z, z))
    with pytest.raises(DomainError):
        PiecewiseFan(FanPartition(0.0, 1.0), (z, z * np.nan, z))


def test_entropy_at_baseline(baseline):
    fan = PiecewiseFan.from_subsolution(baseline)
    left, right = entropy_jump_residual(fan)
    rep = check_conditions(baseline)
    assert left == pytest.approx(rep.inequalities[2], abs=1e-12)
    assert right == pytest.approx(rep.inequalities[3], abs=1e-12)
    # the right interface is a stationary contact with no energy loss
    assert left > 0 and abs(right) <= 1e-12


def test_entropy_c1_override_crosses_zero(baseline):
    fan = PiecewiseFan.from_subsolution(baseline)
    assert entropy_jump_residual(fan, C1=6.8)[0] > 0
    assert entropy_jump_residual(fan, C1=6.9)[0] < 0


def test_verify_witness_and_baseline(baseline):
    for f in (baseline, perturbed_family(-0.001, 5.8)):
        v = verify_subsolution(f)
        assert v and all(v.checks.values())


def test_verify_rejects_shifted_density(baseline):
    v = verify_subsolution(replace(baseline, rho1=baseline.rho1 + 0.1))
    assert not v and not v.checks["rh_residual"]


def test_verify_rejects_small_c1():
    v = verify_subsolution(family_fan(0.0, 5.0))
    assert not v.checks["definiteness_strict"]


@settings(max_examples=60)
@given(st.floats(-0.9, 0.0), st.floats(0.5, 40.0))
def test_verify_agrees_with_conditions(eta, c1):
    f = family_fan(eta, c1)
    assert bool(verify_subsolution(f)) == check_conditions(f).overall


@settings(max_examples=40)
@given(st.floats(-2.0, 2.0))
def test_rh_residual_covariant_under_boost(c):
    # mass and x1-momentum rows are invariant; x2-momentum picks up c times mass
    fan = PiecewiseFan.from_subsolution(replace(baseline_family(6.0), rho1=2.3))
    r = rh_residual(fan)
    expected = r.copy()
    expected[:, 2] += c * r[:, 0]
    np.testing.assert_allclose(rh_residual(fan.boosted(c)), expected, atol=1e-9)
    good = PiecewiseFan.from_subsolution(baseline_family(6.0)).boosted(c)
    assert np.abs(rh_residual(good)).max() <= 1e-9
