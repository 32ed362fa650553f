import numpy as np
import pytest

from core.config import DEFAULT_TAU_GRID
from core.elliptic import PeriodConvention
from core.errors import (CuspMismatch, LatticePoleError, NoRelation, RankDeficient,
                         SingularConfiguration, SolutionPoleError, UnsupportedFamily)
from core.jets import constant_jet, identity_jet
from core.painleve import (HITCHIN_PARAMS, PERIOD_VARIANTS, PICARD_PARAMS, Cusp, CurveFitSpec,
                           Family, P6Params, PeriodVariant, SolutionSpec,
                           calibrate_period_convention, calibrated_period_variant,
                           cross_identity_gap, cusp_asymptotics_check, fit_algebraic_relation,
                           half_period_images, hitchin_y, p6_residual_parametric, p6_rhs,
                           picard_samples, picard_y, solution_residual, substitution_xy,
                           sweep_algebraic_relation, to_standard_params, wp_form_residual,
                           x_schwarz_residual)
from core.theta import modular_x

GRID = [complex(t.replace("i", "j")) for t in DEFAULT_TAU_GRID]


def test_standard_normalization():
    assert to_standard_params(P6Params(1, 2, 3, 4)) == (1, -2, 3, -3.5)
    assert to_standard_params(HITCHIN_PARAMS) == (0.125, -0.125, 0.125, 0.375)


def test_rhs_rejects_coincident_points():
    with pytest.raises(SingularConfiguration):
        p6_rhs(0.3, 0.3, 1.0, PICARD_PARAMS)
    with pytest.raises(SingularConfiguration):
        p6_rhs(0.0, 0.5, 1.0, PICARD_PARAMS)


def test_rational_spec_checks_consistency():
    spec = SolutionSpec.rational(Family.PICARD, 1, 2, 5)
    assert spec.A == pytest.approx(0.2) and spec.B == pytest.approx(0.4)
    with pytest.raises(ValueError):
        SolutionSpec(Family.PICARD, 0.5, 0.5, (1, 1, 3))


@pytest.mark.parametrize("nmn", [(1, 1, 3), (1, 2, 5)])
def test_picard_solves_p6(nmn, pol):
    spec = SolutionSpec.rational(Family.PICARD, *nmn)
    for tau in GRID[:5]:
        report = solution_residual(spec, tau, PICARD_PARAMS, pol, tol=1e-7)
        assert report.passed, report


def test_picard_quarter_points_give_the_diagonal(pol):
    # (nu, mu, N) = (1, 1, 2): y = x, which sits on the P6 singular locus
    spec = SolutionSpec.rational(Family.PICARD, 1, 1, 2)
    for tau in GRID[:3]:
        assert abs(picard_y(spec, tau, pol).value - modular_x(tau, pol).value) < 1e-12
    with pytest.raises(SingularConfiguration):
        solution_residual(spec, GRID[0], PICARD_PARAMS, pol)


def test_picard_zero_one_two_vanishes(pol):
    spec = SolutionSpec.rational(Family.PICARD, 0, 1, 2)
    assert max(abs(y) for _, y in picard_samples(spec, GRID[:5], pol)) < 1e-20


def test_picard_pole(pol):
    with pytest.raises(SolutionPoleError):
        picard_y(SolutionSpec(Family.PICARD, 0, 0), 1.2j, pol)


def test_families_are_not_interchangeable(pol):
    with pytest.raises(UnsupportedFamily):
        picard_y(SolutionSpec(Family.HITCHIN, 1 / 3, 1 / 3), 1.2j, pol)
    with pytest.raises(UnsupportedFamily):
        hitchin_y(SolutionSpec(Family.PICARD, 1 / 3, 1 / 3), 1.2j, pol)


def test_period_calibration_picks_double_periods(fresh_calibration, pol):
    variant = calibrate_period_convention(pol)
    assert variant == PeriodVariant(PeriodConvention.DOUBLE, 2.0)
    assert calibrated_period_variant() is variant


def test_substitution_cross_identity(fresh_calibration, pol):
    variant = calibrate_period_convention(pol)
    spec = SolutionSpec.rational(Family.PICARD, 1, 1, 3)
    for tau in GRID[:5]:
        assert cross_identity_gap(variant, spec, tau, pol) < 1e-9
    wrong = PeriodVariant(PeriodConvention.UNIT, 1.0)
    assert cross_identity_gap(wrong, spec, GRID[0], pol) > 1e-3


def test_half_period_images(pol):
    tau = 0.3 + 1.2j
    images = half_period_images(tau, PeriodConvention.DOUBLE, pol)
    x = modular_x(tau, pol).value
    assert abs(images["omega1"]) < 1e-10
    assert abs(images["omega3"] - 1) < 1e-10
    assert abs(images["omega1+omega3"] - x) < 1e-10


def test_hitchin_solves_p6(pol):
    spec = SolutionSpec(Family.HITCHIN, 1 / 3, 1 / 3)
    for tau in GRID[:5]:
        report = solution_residual(spec, tau, HITCHIN_PARAMS, pol, tol=1e-7)
        assert report.passed, report


def test_hitchin_negative_control(pol):
    spec = SolutionSpec(Family.HITCHIN, 1 / 3, 1 / 3)
    for tau in GRID[:5]:
        assert solution_residual(spec, tau, PICARD_PARAMS, pol).residual_abs > 1e-3


def test_hitchin_unit_shift_in_a(pol):
    tau = -0.25 + 0.9j
    y = hitchin_y(SolutionSpec(Family.HITCHIN, 1 / 3, 1 / 3), tau, pol).value
    shifted = hitchin_y(SolutionSpec(Family.HITCHIN, 4 / 3, 1 / 3), tau, pol).value
    assert abs(y - shifted) < 1e-9 * abs(y)


@pytest.mark.parametrize("tau", GRID[:10])
def test_x_satisfies_gamma2_schwarz_equation(tau, pol):
    assert x_schwarz_residual(tau, pol, tol=1e-8).passed


@pytest.mark.parametrize("cusp, samples", [
    (Cusp.ZERO, [1j / 1.2, 1j / 1.6, 1j / 2.0, 1j / 2.5]),
    (Cusp.INFINITY, [1.2j, 1.6j, 2.0j, 2.5j]),
])
def test_second_order_decay_at_zero_and_infinity(cusp, samples, pol):
    rows = cusp_asymptotics_check(cusp, samples, pol)
    # the error term is 128 e^2 to leading order
    assert all(100 <= row.ratio <= 140 for row in rows)
    assert abs(rows[-1].ratio - 128) < 2


def test_divergence_rate_at_one(pol):
    rows = cusp_asymptotics_check(Cusp.ONE, [1 + 0.5j, 1 + 0.4j, 1 + 0.3j, 1 + 0.25j], pol)
    assert all(0.5 <= row.ratio <= 2 for row in rows)
    assert all(row.leading_error > 0 for row in rows)


def test_cusp_samples_must_approach(pol):
    with pytest.raises(CuspMismatch):
        cusp_asymptotics_check(Cusp.INFINITY, [2.0j, 1.5j], pol)
    with pytest.raises(CuspMismatch):
        cusp_asymptotics_check(Cusp.ZERO, [1.2j], pol)


def test_wp_form(fresh_calibration, pol):
    variant = calibrate_period_convention(pol)
    spec = SolutionSpec.rational(Family.PICARD, 1, 1, 3)
    tau = GRID[1]
    assert wp_form_residual(spec, tau, PICARD_PARAMS, variant.conv, pol, z_scale=variant.z_scale).passed
    assert wp_form_residual(spec, tau, HITCHIN_PARAMS, variant.conv, pol,
                            z_scale=variant.z_scale).residual_abs > 1e-3
    with pytest.raises(UnsupportedFamily):
        wp_form_residual(SolutionSpec(Family.HITCHIN, 1 / 3, 1 / 3), tau, PICARD_PARAMS,
                         variant.conv, pol)


def _sign_free_error(coeffs, expected):
    return min(np.max(np.abs(coeffs - expected)), np.max(np.abs(coeffs + expected)))


def _random_points(n=40, seed=3):
    rng = np.random.default_rng(seed)
    return rng.normal(size=n) + 1j * rng.normal(size=n)


def test_fit_recovers_diagonal():
    xs = _random_points()
    fit = fit_algebraic_relation(list(zip(xs, xs)), CurveFitSpec(1, 1))
    expected = np.array([[0, 1], [-1, 0]])
    assert _sign_free_error(fit.coeffs, expected) < 1e-8
    assert fit.heldout_residual < 1e-10


def test_sweep_recovers_parabola():
    ys = _random_points()
    fit = sweep_algebraic_relation(list(zip(ys ** 2, ys)), max_deg=3)
    assert (fit.deg_x, fit.deg_y) == (1, 2)
    expected = np.zeros((2, 3))
    expected[0, 2], expected[1, 0] = 1, -1
    assert _sign_free_error(fit.coeffs, expected) < 1e-8


def test_fit_is_scale_equivariant():
    ys = _random_points()
    base = fit_algebraic_relation(list(zip(ys ** 2, ys)), CurveFitSpec(1, 2))
    scaled = fit_algebraic_relation(list(zip(ys ** 2, 2 * ys)), CurveFitSpec(1, 2))
    # F(x, y) = 0 becomes F(x, y/2) = 0: coefficient (i, j) picks up 2^-j
    rescaled = base.coeffs / 2.0 ** np.arange(3)
    a = scaled.coeffs / scaled.coeffs[1, 0]
    b = rescaled / rescaled[1, 0]
    assert np.max(np.abs(a - b)) < 1e-8


def test_rank_deficiency_and_missing_relation():
    xs = _random_points()
    with pytest.raises(RankDeficient):
        fit_algebraic_relation(list(zip(xs, xs)), CurveFitSpec(2, 2))
    with pytest.raises(RankDeficient):
        fit_algebraic_relation([(x, 0j) for x in xs], CurveFitSpec(1, 1))
    with pytest.raises(NoRelation):
        fit_algebraic_relation(list(zip(xs, _random_points(seed=11))), CurveFitSpec(1, 1))


def test_fit_spec_validation():
    with pytest.raises(ValueError):
        CurveFitSpec(0, 1)
    with pytest.raises(ValueError):
        CurveFitSpec(1, 1, sample_count=5)
    assert CurveFitSpec(2, 3).sample_count == 17


def test_picard_half_points_end_to_end(pol):
    spec = SolutionSpec.rational(Family.PICARD, 1, 1, 2)
    fit = sweep_algebraic_relation(picard_samples(spec, pol=pol), max_deg=6)
    assert (fit.deg_x, fit.deg_y) == (1, 1)
    assert fit.heldout_residual < 1e-7


def test_rhs_closed_values():
    assert p6_rhs(2, 5, 0, PICARD_PARAMS) == pytest.approx(5 / 3)
    assert p6_rhs(0.3 + 0.2j, 0.7 - 0.1j, 0, P6Params(0, 0, 0, 0.5)) == 0


def test_planted_non_solution_fails(pol):
    tau = identity_jet(0.3 + 1.2j)
    x = modular_x(tau, pol)
    assert p6_residual_parametric(x, x * x, PICARD_PARAMS, 1e-7).residual_abs > 1e-2


def test_hitchin_stable_under_truncation_doubling(pol):
    spec = SolutionSpec(Family.HITCHIN, 1 / 3, 1 / 3)
    a = solution_residual(spec, 1.2j, HITCHIN_PARAMS, pol).residual_abs
    b = solution_residual(spec, 1.2j, HITCHIN_PARAMS, pol.doubled()).residual_abs
    assert abs(a - b) < 1e-9


def test_x_schwarz_residual_is_two_periodic(pol):
    tau = 0.4 + 0.9j
    a = x_schwarz_residual(tau, pol).residual_abs
    b = x_schwarz_residual(tau + 2, pol).residual_abs
    assert abs(a - b) < 1e-9


def test_origin_is_the_pole_of_the_substitution(pol):
    with pytest.raises(LatticePoleError):
        substitution_xy(constant_jet(0.0, 0), constant_jet(1.2j, 0), PeriodConvention.DOUBLE, pol)


def test_period_readings_include_halving():
    scales = {v.z_scale for v in PERIOD_VARIANTS}
    assert scales == {0.5, 1.0, 2.0}
    assert len(PERIOD_VARIANTS) == 6


@pytest.mark.parametrize("cusp, samples", [
    (Cusp.INFINITY, [4j, 5j, 6j]),
    (Cusp.ZERO, [1j / 2, 1j / 2.5, 1j / 3]),
])
def test_deep_cusp_samples_stay_bounded(cusp, samples, pol):
    rows = cusp_asymptotics_check(cusp, samples, pol)
    assert all(row.ratio <= 300 for row in rows)
    assert abs(rows[0].ratio - 128) < 5
