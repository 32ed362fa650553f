import cmath
import math

import pytest

from core.config import DEFAULT_CHUD_GRID
from core.errors import (BranchCutError, ConventionNotCalibrated, GammaPoleError,
                         SingularPathError, ToolkitError)
from core.hypergeom import (CHUD_VARIANTS, LEMNISCATIC_PARAMS, ChudVariant, ContinuationRegion,
                            HypergeomParams, calibrate_chudnovsky, calibrated_chud_variant,
                            chud_residual, chud_u, classify_region, gauss_2f1, gauss_2f1_scalar,
                            lemniscatic_integral_oracle, lemniscatic_integral_series)
from core.jets import identity_jet

CHUD_GRID = [complex(t.replace("i", "j")) for t in DEFAULT_CHUD_GRID]

LEMNISCATE_POINTS = [
    0.3, 0.5 + 0.2j, 0.6j, -0.7 + 0.3j,
    0.8 * cmath.exp(0.3j), 0.9 * cmath.exp(1.0j), 0.95 * cmath.exp(2.0j),
    0.85 * cmath.exp(-0.7j), 0.7 * cmath.exp(2.8j), 0.93 * cmath.exp(0.5j),
]


def test_classify_region():
    assert classify_region(0.5) is ContinuationRegion.DISC
    assert classify_region(0.9 + 0.1j) is ContinuationRegion.NEAR_ONE
    assert classify_region(-3) is ContinuationRegion.OUTER
    assert classify_region(1.1j) is ContinuationRegion.PFAFF


def test_elementary_closed_forms():
    # 2F1(1,1;2;z) = -log(1-z)/z
    p = HypergeomParams(1, 1, 2)
    for z in (0.3 + 0.1j, -0.9 + 0.3j, 1.1j):
        assert abs(gauss_2f1_scalar(p, z) + cmath.log(1 - z) / z) < 1e-12
    # 2F1(a,b;b;z) = (1-z)^-a with b - a non-integral
    q = HypergeomParams(0.3, 0.7, 0.7)
    for z in (0.6, -1.7 + 0.4j):
        assert abs(gauss_2f1_scalar(q, z) - cmath.exp(-0.3 * cmath.log(1 - z))) < 1e-12


@pytest.mark.parametrize("s", LEMNISCATE_POINTS)
def test_series_matches_quadrature_oracle(s):
    assert abs(lemniscatic_integral_series(s) - lemniscatic_integral_oracle(s)) < 1e-9


def test_euler_fallback_matches_quadrature_oracle():
    z = 0.9 * cmath.exp(1j * math.pi / 3)
    assert classify_region(z) is ContinuationRegion.PFAFF
    assert classify_region(z / (z - 1)) is ContinuationRegion.PFAFF
    s = 0.9 ** 0.25 * cmath.exp(1j * math.pi / 12)
    assert abs(lemniscatic_integral_series(s) - lemniscatic_integral_oracle(s)) < 1e-9


@pytest.mark.parametrize("z, routes", [
    (0.6 + 0.3j, (ContinuationRegion.DISC, ContinuationRegion.NEAR_ONE)),
    (-0.7 + 0.1j, (ContinuationRegion.DISC, ContinuationRegion.PFAFF)),
    (-1.3 - 0.2j, (ContinuationRegion.OUTER, ContinuationRegion.PFAFF)),
    (1.4 + 0.5j, (ContinuationRegion.OUTER, ContinuationRegion.NEAR_ONE)),
])
def test_continuation_routes_agree_on_overlaps(z, routes):
    p = HypergeomParams(0.5, 0.25, 1.25)
    first, second = (gauss_2f1_scalar(p, z, region=r) for r in routes)
    assert abs(first - second) < 1e-11 * max(1.0, abs(first))


@pytest.mark.parametrize("z0", [0.4 + 0.2j, 0.8 - 0.3j, -2.0 + 0.7j, 1.1j])
def test_jet_satisfies_hypergeometric_equation(z0):
    a, b, c = 0.5, 0.25, 1.25
    f = gauss_2f1(HypergeomParams(a, b, c), identity_jet(z0))
    lhs = z0 * (1 - z0) * f.d[2] + (c - (a + b + 1) * z0) * f.d[1] - a * b * f.d[0]
    assert abs(lhs) < 1e-10


def test_branch_cut_rejected():
    with pytest.raises(BranchCutError):
        gauss_2f1_scalar(LEMNISCATIC_PARAMS, 2.0)


def test_gamma_poles():
    with pytest.raises(GammaPoleError):
        HypergeomParams(1, 1, -2)
    with pytest.raises(GammaPoleError):
        gauss_2f1_scalar(HypergeomParams(0.5, 0.5, 1.0), 0.9)


def test_oracle_refuses_singular_path():
    with pytest.raises(SingularPathError):
        lemniscatic_integral_oracle(1.0 + 1e-4j)


def test_variant_order_starts_with_half_factor():
    assert CHUD_VARIANTS[0] == ChudVariant("t3/t2", "t3^4/t2^4", 0.5)
    assert len(CHUD_VARIANTS) == 8
    assert len({v.name for v in CHUD_VARIANTS}) == 8


def test_uncalibrated_u_raises(fresh_calibration):
    with pytest.raises(ConventionNotCalibrated):
        calibrated_chud_variant()


def test_calibration_selects_consistent_reading(fresh_calibration, pol):
    variant = calibrate_chudnovsky(pol)
    assert variant.scale == 1.0
    matching = {"t3/t2": "t3^4/t2^4", "t2/t3": "t2^4/t3^4"}
    assert matching[variant.prefactor] == variant.argument
    assert calibrated_chud_variant() is variant
    # write-once
    assert calibrate_chudnovsky(pol) is variant


def test_chudnovsky_identity_on_grid(fresh_calibration, pol):
    calibrate_chudnovsky(pol)
    reports = [chud_residual(t, pol, tol=1e-6) for t in CHUD_GRID[:5]]
    assert all(r.passed for r in reports), reports
    assert all(r.convention == calibrated_chud_variant().name for r in reports)


def test_half_factor_reading_fails(pol):
    half = CHUD_VARIANTS[0]
    assert chud_residual(CHUD_GRID[0], pol, half).residual_abs > 1e-3


def test_chudnovsky_stable_under_truncation_doubling(fresh_calibration, pol):
    variant = calibrate_chudnovsky(pol)
    for tau in CHUD_GRID[:3]:
        a = chud_residual(tau, pol, variant).residual_abs
        b = chud_residual(tau, pol.doubled(), variant).residual_abs
        assert abs(a - b) < 1e-9


def test_u_on_imaginary_axis_hits_the_cut(pol):
    # theta3^4/theta2^4 is real and > 1 on the imaginary axis
    with pytest.raises(BranchCutError):
        chud_u(1.3j, pol, ChudVariant("t3/t2", "t3^4/t2^4", 1.0))


def test_exactly_the_matched_unit_readings_pass(pol):
    points = (0.35 + 1.05j, -0.4 + 0.8j, 0.2 + 0.9j)

    def passes(variant):
        try:
            return all(chud_residual(t, pol, variant, 1e-4).passed for t in points)
        except ToolkitError:
            return False

    passing = [v for v in CHUD_VARIANTS if passes(v)]
    assert passing == [ChudVariant("t3/t2", "t3^4/t2^4", 1.0), ChudVariant("t2/t3", "t2^4/t3^4", 1.0)]
    assert len({v.equivalence_class for v in passing}) == 1
    for tau in points:
        a, b = (chud_residual(tau, pol, v).residual_abs for v in passing)
        assert a < 1e-10 and b < 1e-10


def test_calibration_keeps_the_first_equivalent_reading(fresh_calibration, pol):
    assert calibrate_chudnovsky(pol) == ChudVariant("t3/t2", "t3^4/t2^4", 1.0)


def test_equivalence_classes():
    matched = ChudVariant("t2/t3", "t2^4/t3^4", 1.0)
    crossed = ChudVariant("t2/t3", "t3^4/t2^4", 1.0)
    assert matched.matched and not crossed.matched
    assert matched.equivalence_class == ChudVariant("t3/t2", "t3^4/t2^4", 1.0).equivalence_class
    assert len({v.equivalence_class for v in CHUD_VARIANTS}) == 4


def test_u_tau_derivative_matches_finite_differences(fresh_calibration, pol):
    variant = calibrate_chudnovsky(pol)
    tau0, h = 0.35 + 1.05j, 1e-5
    u = chud_u(identity_jet(tau0), pol, variant)

    def value(tau):
        return chud_u(tau, pol, variant).value

    fd = (value(tau0 + h) - value(tau0 - h)) / (2 * h)
    assert abs(u.d[1] - fd) < 1e-7 * max(1.0, abs(u.d[1]))
