import cmath
import math

import numpy as np
import pytest

import core.theta as theta_module
from core.config import DEFAULT_TAU_GRID, DEFAULT_THETA_GRID, TruncationPolicy
from core.errors import LowImaginaryTau, ThetaNullUndefined, TruncationBudgetExceeded
from core.jets import constant_jet, identity_jet
from core.theta import (QUASI_PERIOD_SIGNS, HalfPlanePoint, ThetaIndex, modular_x, nome,
                        theta1_prime, theta_derivative, theta_derivatives, theta_eval,
                        theta_identity_residual, theta_null)

GRID = [complex(t.replace("i", "j")) for t in DEFAULT_TAU_GRID]
THETA_GRID = [complex(t.replace("i", "j")) for t in DEFAULT_THETA_GRID]


def _val(k, z, tau, pol=None):
    pol = pol or TruncationPolicy()
    return theta_eval(k, constant_jet(z, 0), constant_jet(tau, 0), pol).value


def test_theta3_at_i():
    # theta3(0|i) = pi^(1/4) / Gamma(3/4)
    expected = math.pi ** 0.25 / math.gamma(0.75)
    assert abs(_val(3, 0, 1j) - expected) < 1e-15


def test_theta1_is_odd_and_others_even():
    z, tau = 0.21 + 0.07j, 0.3 + 1.2j
    assert abs(_val(1, -z, tau) + _val(1, z, tau)) < 1e-14
    for k in (2, 3, 4):
        assert abs(_val(k, -z, tau) - _val(k, z, tau)) < 1e-14


@pytest.mark.parametrize("tau", THETA_GRID)
def test_identity_suite_on_grid(tau):
    report = theta_identity_residual(tau, tol=1e-11)
    assert report.passed, report


def test_half_shift_relations():
    z, tau = 0.13 + 0.05j, -0.25 + 0.9j
    assert abs(_val(1, z + 0.5, tau) - _val(2, z, tau)) < 1e-13
    assert abs(_val(3, z + 0.5, tau) - _val(4, z, tau)) < 1e-13


def test_z_derivatives_match_finite_differences():
    z, tau, h = 0.17 + 0.03j, 0.1 + 1.1j, 1e-5
    d = theta_derivatives(1, constant_jet(z, 0), constant_jet(tau, 0), orders=(0, 1, 2))
    fd1 = (_val(1, z + h, tau) - _val(1, z - h, tau)) / (2 * h)
    fd2 = (_val(1, z + h, tau) - 2 * _val(1, z, tau) + _val(1, z - h, tau)) / h ** 2
    assert abs(d[1].value - fd1) < 1e-8
    assert abs(d[2].value - fd2) < 1e-4


def test_heat_equation_in_tau():
    # 4 pi i d(theta)/d(tau) = d^2(theta)/dz^2
    z, tau0 = 0.2 + 0.1j, 0.3 + 0.95j
    tau = identity_jet(tau0)
    for k in (1, 2, 3, 4):
        dtau = theta_eval(k, constant_jet(z), tau).d[1]
        dzz = theta_derivative(k, constant_jet(z, 0), constant_jet(tau0, 0), dz=2).value
        assert abs(4j * math.pi * dtau - dzz) < 1e-11 * max(1.0, abs(dzz))


def test_theta1_prime_matches_jacobi_product():
    tau = -0.4 + 0.8j
    lhs = theta1_prime(constant_jet(0.0, 0), constant_jet(tau, 0)).value
    rhs = math.pi * np.prod([theta_null(k, constant_jet(tau, 0)).value for k in (2, 3, 4)])
    assert abs(lhs - rhs) < 1e-12 * abs(rhs)


def test_theta_null_rejects_theta1():
    with pytest.raises(ThetaNullUndefined):
        theta_null(1, 1j)


def test_low_imaginary_tau():
    with pytest.raises(LowImaginaryTau):
        theta_eval(3, 0.0, 0.5 + 0.01j)
    with pytest.raises(LowImaginaryTau):
        HalfPlanePoint(0.5)


def test_budget_exhaustion():
    tiny = TruncationPolicy(max_terms=4, min_im_tau=0.01)
    with pytest.raises(TruncationBudgetExceeded):
        theta_eval(3, 0.0, 0.02j, tiny)


def test_truncation_doubling_is_stable(pol):
    tau = 0.05 + 0.75j
    a = _val(2, 0.1, tau, pol)
    b = _val(2, 0.1, tau, pol.doubled())
    assert abs(a - b) < 1e-15


def test_theta_index_validation():
    with pytest.raises(ValueError):
        ThetaIndex(5)


def test_modular_x_at_i_is_one_half():
    assert abs(modular_x(1j).value - 0.5) < 1e-14


def test_modular_x_unit_shift():
    # x(tau + 1) = 1 / x(tau)
    tau = 0.2 + 0.9j
    assert abs(modular_x(tau + 1).value * modular_x(tau).value - 1) < 1e-12


def test_modular_x_inversion():
    # x(-1/tau) = 1 - x(tau)
    tau = 0.3 + 1.2j
    assert abs(modular_x(-1 / tau).value + modular_x(tau).value - 1) < 1e-12


def test_nome():
    assert abs(nome(1j) - cmath.exp(-math.pi)) < 1e-16


def test_theta_grid_spans_the_supported_range():
    ims = [t.imag for t in THETA_GRID]
    assert len(THETA_GRID) == 20
    assert min(ims) == pytest.approx(0.05) and max(ims) == pytest.approx(10)
    assert all(abs(t.real) <= 1 for t in THETA_GRID)


@pytest.mark.parametrize("tau", [10j, 6j, 1.2j, 0.4 + 7.5j])
def test_identity_suite_at_large_imaginary_part(tau):
    report = theta_identity_residual(tau, tol=1e-11)
    assert report.passed, report


@pytest.mark.parametrize("k", [1, 2, 3, 4])
@pytest.mark.parametrize("tau", [0.3 + 1.2j, 8j])
def test_quasi_periodicity_laws(k, tau):
    z = 0.19 - 0.07j
    s1, s2 = QUASI_PERIOD_SIGNS[k]
    tk = _val(k, z, tau)
    shifted = _val(k, z + tau, tau)
    expected = s2 * cmath.exp(-2j * math.pi * z) / nome(tau) * tk
    assert abs(_val(k, z + 1, tau) - s1 * tk) < 1e-12 * abs(tk)
    assert abs(shifted - expected) < 1e-11 * max(abs(shifted), abs(expected))


def test_identity_suite_detects_a_wrong_sign(monkeypatch):
    monkeypatch.setitem(theta_module.QUASI_PERIOD_SIGNS, 3, (1, -1))
    assert not theta_identity_residual(0.3 + 1.2j, tol=1e-11).passed


@pytest.mark.parametrize("tau", [0.3 + 1.2j, -0.25 + 0.9j, 0.1 + 1.5j])
def test_modular_x_is_invariant_under_the_level_two_generator(tau):
    # tau -> tau / (2 tau + 1) lies in Gamma(2)
    image = tau / (2 * tau + 1)
    assert abs(modular_x(image).value - modular_x(tau).value) < 1e-12
