"""
elliptic.py
===========
Weierstrass p and p' over jets, lattice invariants, half-period values,
an independent Laurent-series oracle and the lemniscatic torus (g2=4, g3=0).
"""

import cmath
import logging
import math
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache
from typing import Tuple, Union

from core.config import TruncationPolicy
from core.errors import LatticePoleError, RadiusExceeded, TruncationBudgetExceeded
from core.jets import Jet, constant_jet
from core.report import ResidualReport
from core.theta import (DEFAULT_POLICY, HalfPlanePoint, as_jet, as_tau, check_tau,
                        theta_derivatives)

logger = logging.getLogger(__name__)

POLE_GUARD = 1e-6


class PeriodConvention(Enum):
    UNIT = "unit"      # periods 1, tau
    DOUBLE = "double"  # periods 2, 2tau


@dataclass(frozen=True)
class LatticeInvariants:
    g2: complex
    g3: complex

    @property
    def discriminant(self) -> complex:
        return self.g2 ** 3 - 27 * self.g3 ** 2

    @property
    def degenerate(self) -> bool:
        return abs(self.discriminant) <= 1e-12


@dataclass(frozen=True)
class EValues:
    e1: complex
    e2: complex
    e3: complex

    def as_tuple(self) -> Tuple[complex, complex, complex]:
        return (self.e1, self.e2, self.e3)


def half_periods(tau: complex, conv: PeriodConvention) -> Tuple[complex, complex]:
    """(omega1, omega3) of the convention's lattice"""
    if conv is PeriodConvention.UNIT:
        return 0.5, tau / 2
    return 1.0, tau


def lattice_distance(z: complex, tau: complex, conv: PeriodConvention) -> float:
    """Distance from z to the nearest lattice point"""
    w1, w3 = half_periods(tau, conv)
    p1, p3 = 2 * w1, 2 * w3
    n0 = round(z.imag / p3.imag)
    best = math.inf
    for n in (n0 - 1, n0, n0 + 1):
        shifted = z - n * p3
        m0 = round(shifted.real / p1.real)
        for m in (m0 - 1, m0, m0 + 1):
            best = min(best, abs(shifted - m * p1))
    return best


def zero_constant(tau: Union[complex, Jet], pol: TruncationPolicy = DEFAULT_POLICY) -> Jet:
    """Additive constant in p(w) = -d^2/dw^2 ln theta_1(w|tau) + C(tau).

    C = theta_1'''(0)/(3 theta_1'(0)), the value that removes the w^0 term of
    the Laurent expansion (periods 1, tau).
    """
    tau = as_jet(tau)
    d = theta_derivatives(1, constant_jet(0.0, tau.order), tau, pol, orders=(1, 3))
    return d[3] / (d[1] * 3.0)


def _wp_unit(w: Jet, tau: Jet, pol: TruncationPolicy) -> Tuple[Jet, Jet]:
    t = theta_derivatives(1, w, tau, pol, orders=(0, 1, 2, 3))
    t0, t1, t2, t3 = t[0], t[1], t[2], t[3]
    t0_sq = t0 * t0
    log2 = (t2 * t0 - t1 * t1) / t0_sq
    log3 = t3 / t0 - (t1 * t2) * 3.0 / t0_sq + (t1 * t1 * t1) * 2.0 / (t0_sq * t0)
    return zero_constant(tau, pol) - log2, -log3


def wp_eval(z: Union[complex, Jet], tau: Union[complex, Jet], conv: PeriodConvention,
            pol: TruncationPolicy = DEFAULT_POLICY) -> Tuple[Jet, Jet]:
    """Jets of p(z(t)) and p'(z(t)) on the lattice of tau(t) in the given convention"""
    z, tau = as_jet(z), as_jet(tau)
    tau0 = complex(tau.d[0])
    check_tau(tau0, pol.min_im_tau)
    if lattice_distance(complex(z.d[0]), tau0, conv) < POLE_GUARD:
        raise LatticePoleError(f"z = {z.d[0]} is within {POLE_GUARD} of a lattice point")
    if conv is PeriodConvention.UNIT:
        return _wp_unit(z, tau, pol)
    # p(z; 2, 2tau) = p(z/2; 1, tau)/4
    p, dp = _wp_unit(z * 0.5, tau, pol)
    return p * 0.25, dp * 0.125


def _lambert(tau: complex, power: int, pol: TruncationPolicy) -> complex:
    """sum_{n>=1} n^power q2^n / (1 - q2^n), q2 = exp(2 pi i tau)"""
    q2 = cmath.exp(2j * cmath.pi * tau)
    total = 0j
    small_run = 0
    qn = 1.0 + 0j
    for n in range(1, pol.hyper_max_terms + 1):
        qn *= q2
        term = n ** power * qn / (1 - qn)
        total += term
        if abs(term) <= pol.term_tol * abs(total):
            small_run += 1
            if small_run >= 2:
                return total
        else:
            small_run = 0
    raise TruncationBudgetExceeded(f"Eisenstein series did not converge at tau={tau}")


def invariants_g2g3(tau: Union[complex, HalfPlanePoint], conv: PeriodConvention,
                    pol: TruncationPolicy = DEFAULT_POLICY) -> LatticeInvariants:
    """g2, g3 from the Eisenstein q-expansions"""
    tau = as_tau(tau)
    check_tau(tau, pol.min_im_tau)
    e4 = 1 + 240 * _lambert(tau, 3, pol)
    e6 = 1 - 504 * _lambert(tau, 5, pol)
    g2 = (4 * math.pi ** 4 / 3) * e4
    g3 = (8 * math.pi ** 6 / 27) * e6
    if conv is PeriodConvention.DOUBLE:
        g2, g3 = g2 / 16, g3 / 64
    return LatticeInvariants(complex(g2), complex(g3))


def e_values(tau: Union[complex, HalfPlanePoint], conv: PeriodConvention,
             pol: TruncationPolicy = DEFAULT_POLICY) -> EValues:
    """p at the half-periods omega1, omega1+omega3, omega3"""
    tau = as_tau(tau)
    w1, w3 = half_periods(tau, conv)
    tau_jet = constant_jet(tau, 0)

    def at(z):
        return complex(wp_eval(constant_jet(z, 0), tau_jet, conv, pol)[0].d[0])

    return EValues(at(w1), at(w1 + w3), at(w3))


def wp_laurent_oracle(z: complex, tau: Union[complex, HalfPlanePoint], conv: PeriodConvention,
                      pol: TruncationPolicy = DEFAULT_POLICY) -> complex:
    """p(z) = z^-2 + sum c_k z^{2k}; shares no code with the theta route"""
    z, tau = complex(z), as_tau(tau)
    w1, w3 = half_periods(tau, conv)
    radius = 0.6 * min(abs(w1), abs(w3))
    if not abs(z) < radius:
        raise RadiusExceeded(f"|z| = {abs(z):.4g} outside the oracle disc of radius {radius:.4g}")
    inv = invariants_g2g3(tau, conv, pol)
    coeffs = [0j, inv.g2 / 20, inv.g3 / 28]
    z2 = z * z
    total = 1 / z2 + coeffs[1] * z2 + coeffs[2] * z2 ** 2
    small_run = 0
    for k in range(3, pol.hyper_max_terms):
        c_k = 3 / ((2 * k + 3) * (k - 2)) * sum(coeffs[m] * coeffs[k - 1 - m] for m in range(1, k - 1))
        coeffs.append(c_k)
        term = c_k * z2 ** k
        total += term
        if abs(term) <= pol.term_tol * abs(total):
            small_run += 1
            if small_run >= 2:
                return total
        else:
            small_run = 0
    raise TruncationBudgetExceeded(f"Laurent series did not converge at z={z}")


@lru_cache(maxsize=1)
def lemniscatic_scale() -> float:
    """c with g2(c * (Z + iZ)) = 4, i.e. c^-4 g2(1, i) = 4"""
    g2 = invariants_g2g3(1j, PeriodConvention.UNIT).g2
    c = (g2.real / 4) ** 0.25
    logger.info(f"✓ Lemniscatic scale c = {c:.17g}")
    return c


def lemniscatic_lattice_distance(w: complex) -> float:
    c = lemniscatic_scale()
    return c * lattice_distance(complex(w) / c, 1j, PeriodConvention.UNIT)


def wp_lemniscatic(w: Union[complex, Jet], pol: TruncationPolicy = DEFAULT_POLICY) -> Tuple[Jet, Jet]:
    """p and p' on the torus p'^2 = 4p^3 - 4p, via p(w; c L) = c^-2 p(w/c; L)"""
    w = as_jet(w)
    if lemniscatic_lattice_distance(complex(w.d[0])) < POLE_GUARD:
        raise LatticePoleError(f"w = {w.d[0]} is on the lemniscatic lattice")
    c = lemniscatic_scale()
    p, dp = wp_eval(w * (1.0 / c), constant_jet(1j, w.order), PeriodConvention.UNIT, pol)
    return p * (1.0 / c ** 2), dp * (1.0 / c ** 3)


def lemniscatic_e_values(pol: TruncationPolicy = DEFAULT_POLICY) -> EValues:
    c = lemniscatic_scale()

    def at(w):
        return complex(wp_lemniscatic(constant_jet(w, 0), pol)[0].d[0])

    return EValues(at(c / 2), at(c * (1 + 1j) / 2), at(c * 1j / 2))


def wp_identity_residual(z: complex, tau: Union[complex, HalfPlanePoint], conv: PeriodConvention,
                         pol: TruncationPolicy = DEFAULT_POLICY, tol: float = 1e-9) -> ResidualReport:
    """|p'^2 - 4p^3 + g2 p + g3|, scaled by |p|^3"""
    tau = as_tau(tau)
    p, dp = wp_eval(constant_jet(z, 0), constant_jet(tau, 0), conv, pol)
    p0, dp0 = complex(p.d[0]), complex(dp.d[0])
    inv = invariants_g2g3(tau, conv, pol)
    defect = abs(dp0 ** 2 - 4 * p0 ** 3 + inv.g2 * p0 + inv.g3) / max(1.0, abs(p0) ** 3)
    return ResidualReport.build(tau, defect, tol, "wp-identity", conv.value)
