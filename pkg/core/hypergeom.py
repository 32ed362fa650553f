"""
hypergeom.py
============
Gauss 2F1 over jets with analytic continuation, a quadrature oracle for the
lemniscatic integral, and the Abelian integral u(tau) on the Chudnovsky
orbifold together with the residual of [u, tau] = -2 p(2u).
"""

import cmath
import logging
import threading
from dataclasses import dataclass
from enum import Enum
from typing import List, Optional, Sequence, Tuple, Union

from scipy import integrate, special

from core.config import TruncationPolicy
from core.errors import (BranchCutError, CalibrationError, ConventionNotCalibrated,
                         GammaPoleError, LatticePoleError, SingularPathError, ToleranceNotReached,
                         ToolkitError, TruncationBudgetExceeded)
from core.elliptic import POLE_GUARD, lemniscatic_lattice_distance, wp_lemniscatic
from core.jets import Jet, identity_jet, jet_compose, schwarz_bracket
from core.report import ResidualReport
from core.theta import DEFAULT_POLICY, HalfPlanePoint, as_jet, as_tau, check_tau, theta_null

logger = logging.getLogger(__name__)

CUT_GUARD = 1e-8
GAMMA_GUARD = 1e-10


@dataclass(frozen=True)
class HypergeomParams:
    a: complex
    b: complex
    c: complex

    def __post_init__(self):
        for n in range(41):
            if abs(self.c + n) <= 1e-10:
                raise GammaPoleError(f"c = {self.c} is a non-positive integer")

    def shifted(self, k: int) -> "HypergeomParams":
        return HypergeomParams(self.a + k, self.b + k, self.c + k)


class ContinuationRegion(Enum):
    DISC = "disc"          # |z| <= 0.75
    NEAR_ONE = "near_one"  # |1 - z| <= 0.75
    OUTER = "outer"        # |z| >= 1.25
    PFAFF = "pfaff"        # otherwise


def classify_region(z: complex) -> ContinuationRegion:
    """Total classification, first matching region wins"""
    if abs(z) <= 0.75:
        return ContinuationRegion.DISC
    if abs(1 - z) <= 0.75:
        return ContinuationRegion.NEAR_ONE
    if abs(z) >= 1.25:
        return ContinuationRegion.OUTER
    return ContinuationRegion.PFAFF


def _near_pole(x: complex) -> bool:
    x = complex(x)
    return x.real <= GAMMA_GUARD and abs(x - round(x.real)) <= GAMMA_GUARD


def _gamma(x: complex) -> complex:
    if _near_pole(x):
        raise GammaPoleError(f"Gamma pole at {x}")
    return complex(special.gamma(complex(x)))


def _rgamma(x: complex) -> complex:
    """1/Gamma, zero at the poles"""
    return complex(special.rgamma(complex(x)))


def _check_cut(z: complex):
    if z.real >= 1 - CUT_GUARD and abs(z.imag) <= CUT_GUARD:
        raise BranchCutError(f"z = {z} lies on the branch cut [1, inf)")


def _series(a: complex, b: complex, c: complex, z: complex, pol: TruncationPolicy) -> complex:
    """Direct power series, stopped after two consecutive sub-tolerance terms"""
    term = 1.0 + 0j
    total = 1.0 + 0j
    small_run = 0
    for n in range(pol.hyper_max_terms):
        term *= (a + n) * (b + n) / ((c + n) * (n + 1)) * z
        total += term
        if abs(term) <= pol.term_tol * max(abs(total), 1.0):
            small_run += 1
            if small_run >= 2:
                return total
        else:
            small_run = 0
        if term == 0:
            return total
    raise TruncationBudgetExceeded(f"2F1 series did not converge at z={z}")


def _near_one(p: HypergeomParams, z: complex, pol: TruncationPolicy) -> complex:
    a, b, c = p.a, p.b, p.c
    s = c - a - b
    if _near_pole(s) or _near_pole(-s):
        raise GammaPoleError(f"c - a - b = {s} is integral; log-case connection not supported")
    w = 1 - z
    first = _gamma(c) * _gamma(s) * _rgamma(c - a) * _rgamma(c - b) * _series(a, b, 1 - s, w, pol)
    second = (_gamma(c) * _gamma(-s) * _rgamma(a) * _rgamma(b) * cmath.exp(s * cmath.log(w))
              * _series(c - a, c - b, s + 1, w, pol))
    return first + second


def _outer(p: HypergeomParams, z: complex, pol: TruncationPolicy) -> complex:
    a, b, c = p.a, p.b, p.c
    if _near_pole(b - a) or _near_pole(a - b):
        raise GammaPoleError(f"b - a = {b - a} is integral; log-case connection not supported")
    log_mz = cmath.log(-z)
    w = 1 / z
    first = (_gamma(c) * _gamma(b - a) * _rgamma(b) * _rgamma(c - a) * cmath.exp(-a * log_mz)
             * _series(a, a - c + 1, a - b + 1, w, pol))
    second = (_gamma(c) * _gamma(a - b) * _rgamma(a) * _rgamma(c - b) * cmath.exp(-b * log_mz)
              * _series(b, b - c + 1, b - a + 1, w, pol))
    return first + second


def _euler_integral(p: HypergeomParams, z: complex) -> complex:
    """Gamma(c)/(Gamma(b)Gamma(c-b)) int_0^1 t^{b-1}(1-t)^{c-b-1}(1-zt)^{-a} dt"""
    a, b, c = p.a, p.b, p.c
    if not (b.imag == 0 and c.imag == 0 and c.real > b.real > 0):
        raise ToleranceNotReached(f"no convergent route for 2F1{(a, b, c)} at z={z}")

    def part(fn):
        value, abserr = integrate.quad(fn, 0.0, 1.0, weight="alg",
                                       wvar=(b.real - 1, c.real - b.real - 1),
                                       epsabs=1e-14, epsrel=1e-13, limit=200)
        return value, abserr

    def kernel(t):
        return cmath.exp(-a * cmath.log(1 - z * t))

    re, err_re = part(lambda t: kernel(t).real)
    im, err_im = part(lambda t: kernel(t).imag)
    if max(err_re, err_im) > 1e-11:
        raise ToleranceNotReached(f"Euler integral error {max(err_re, err_im):.3g} at z={z}")
    return _gamma(c) * _rgamma(b) * _rgamma(c - b) * complex(re, im)


def gauss_2f1_scalar(p: HypergeomParams, z: complex, pol: TruncationPolicy = DEFAULT_POLICY,
                     region: Optional[ContinuationRegion] = None) -> complex:
    """2F1(a, b; c; z), principal branch; ``region`` forces a route"""
    z = complex(z)
    _check_cut(z)
    region = region or classify_region(z)
    if region is ContinuationRegion.DISC:
        return _series(p.a, p.b, p.c, z, pol)
    if region is ContinuationRegion.NEAR_ONE:
        return _near_one(p, z, pol)
    if region is ContinuationRegion.OUTER:
        return _outer(p, z, pol)
    # Pfaff: F(a,b;c;z) = (1-z)^{-a} F(a, c-b; c; z/(z-1))
    w = z / (z - 1)
    prefactor = cmath.exp(-p.a * cmath.log(1 - z))
    pfaff = HypergeomParams(p.a, p.c - p.b, p.c)
    inner = classify_region(w)
    if inner is ContinuationRegion.PFAFF:
        logger.debug(f"Pfaff image {w} still in the annulus, using the Euler integral")
        return prefactor * _euler_integral(pfaff, w)
    return prefactor * gauss_2f1_scalar(pfaff, w, pol, inner)


def _pochhammer(x: complex, k: int) -> complex:
    out = 1.0 + 0j
    for j in range(k):
        out *= x + j
    return out


def gauss_2f1(p: HypergeomParams, z: Union[complex, Jet],
              pol: TruncationPolicy = DEFAULT_POLICY) -> Jet:
    """Jet of 2F1(a, b; c; z(t)); dF/dz = (ab/c) 2F1(a+1, b+1; c+1; z)"""
    z = as_jet(z)
    z0 = complex(z.d[0])
    derivs = []
    for k in range(z.order + 1):
        factor = _pochhammer(p.a, k) * _pochhammer(p.b, k) / _pochhammer(p.c, k)
        derivs.append(factor * gauss_2f1_scalar(p.shifted(k), z0, pol))
    return jet_compose(derivs, z)


# Lemniscatic integral

_QUARTIC_ROOTS = (1, -1, 1j, -1j)
LEMNISCATIC_PARAMS = HypergeomParams(0.5, 0.25, 1.25)


def _segment_distance(point: complex, s: complex) -> float:
    if s == 0:
        return abs(point)
    r = ((point * s.conjugate()).real) / abs(s) ** 2
    r = min(max(r, 0.0), 1.0)
    return abs(point - r * s)


def lemniscatic_integral_oracle(s: complex, tol: float = 1e-12) -> complex:
    """int_0^s (1 - t^4)^{-1/2} dt along the straight segment (QUADPACK Gauss-Kronrod)"""
    s = complex(s)
    if s == 0:
        return 0j
    if min(_segment_distance(root, s) for root in _QUARTIC_ROOTS) < 1e-3:
        raise SingularPathError(f"segment [0, {s}] passes within 1e-3 of t^4 = 1")

    def integrand(r):
        return s / cmath.sqrt(1 - (s * r) ** 4)

    re, err_re = integrate.quad(lambda r: integrand(r).real, 0.0, 1.0,
                                epsabs=tol / 10, epsrel=0.0, limit=200)
    im, err_im = integrate.quad(lambda r: integrand(r).imag, 0.0, 1.0,
                                epsabs=tol / 10, epsrel=0.0, limit=200)
    if err_re + err_im > tol:
        raise ToleranceNotReached(f"quadrature error {err_re + err_im:.3g} above {tol}")
    return complex(re, im)


def lemniscatic_integral_series(s: complex, pol: TruncationPolicy = DEFAULT_POLICY) -> complex:
    """s * 2F1(1/2, 1/4; 5/4; s^4)"""
    s = complex(s)
    return s * gauss_2f1_scalar(LEMNISCATIC_PARAMS, s ** 4, pol)


# Chudnovsky Abelian integral u(tau)

@dataclass(frozen=True)
class ChudVariant:
    """Reading of u = scale * P * 2F1(1/2, 1/4; 5/4 | Z) with P, Z built from theta_2, theta_3"""
    prefactor: str  # "t3/t2" or "t2/t3"
    argument: str   # "t3^4/t2^4" or "t2^4/t3^4"
    scale: float    # leading constant

    @property
    def name(self) -> str:
        return f"pre={self.prefactor},arg={self.argument},scale={self.scale:g}"

    @property
    def matched(self) -> bool:
        """Prefactor and argument both use t3/t2, or both use t2/t3"""
        return self.prefactor.split("/")[0] == self.argument.split("/")[0][:2]

    @property
    def equivalence_class(self) -> Tuple[float, bool]:
        """Matched readings with one scale pass or fail together"""
        return self.scale, self.matched


# Half-factor readings first; then the leading constant 1
CHUD_VARIANTS: List[ChudVariant] = [
    ChudVariant(pre, arg, scale)
    for scale in (0.5, 1.0)
    for pre in ("t3/t2", "t2/t3")
    for arg in ("t3^4/t2^4", "t2^4/t3^4")
]

_chud_lock = threading.Lock()
_chud_variant: Optional[ChudVariant] = None


def chud_u(tau: Union[complex, Jet], pol: TruncationPolicy = DEFAULT_POLICY,
           variant: Optional[ChudVariant] = None) -> Jet:
    """Jet of u(tau) under the given (or calibrated) reading of the formula"""
    variant = variant or calibrated_chud_variant()
    tau = as_jet(tau)
    check_tau(complex(tau.d[0]), pol.min_im_tau)
    ratio = theta_null(3, tau, pol) / theta_null(2, tau, pol)   # t3/t2
    pre = ratio if variant.prefactor == "t3/t2" else 1.0 / ratio
    r = ratio if variant.argument == "t3^4/t2^4" else 1.0 / ratio
    r2 = r * r
    arg = r2 * r2
    z0 = complex(arg.d[0])
    if z0.real >= 1 and abs(z0.imag) < 1e-3:
        raise BranchCutError(f"2F1 argument {z0} is within 1e-3 of the cut")
    return pre * gauss_2f1(LEMNISCATIC_PARAMS, arg, pol) * variant.scale


def chud_residual(tau: Union[complex, HalfPlanePoint], pol: TruncationPolicy = DEFAULT_POLICY,
                  variant: Optional[ChudVariant] = None, tol: float = 1e-6) -> ResidualReport:
    """|[u, tau] + 2 p(2u)| with p on the lemniscatic torus"""
    variant = variant or calibrated_chud_variant()
    tau = as_tau(tau)
    u = chud_u(identity_jet(tau), pol, variant)
    two_u = 2 * complex(u.d[0])
    if lemniscatic_lattice_distance(two_u) < POLE_GUARD:
        raise LatticePoleError(f"2u = {two_u} is on the lemniscatic lattice")
    wp_value = complex(wp_lemniscatic(two_u, pol)[0].d[0])
    residual = abs(schwarz_bracket(u) + 2 * wp_value)
    return ResidualReport.build(tau, residual, tol, "chudnovsky", variant.name)


def calibrate_chudnovsky(pol: TruncationPolicy = DEFAULT_POLICY,
                         points: Sequence[complex] = (0.35 + 1.05j, -0.4 + 0.8j, 0.2 + 0.9j),
                         threshold: float = 1e-4) -> ChudVariant:
    """Pick the reading of u(tau) for which the identity holds at every reference point.

    A matched reading is the lemniscatic integral taken to s = t3/t2 or to
    1/s, and the two satisfy the identity together. Exactly one equivalence
    class must pass; its first member in CHUD_VARIANTS order is the
    representative.
    Once chosen, the reading stays fixed until reset_calibration().
    """
    global _chud_variant
    if _chud_variant is not None:
        return _chud_variant
    passing = []
    for variant in CHUD_VARIANTS:
        try:
            ok = all(chud_residual(t, pol, variant, threshold).passed for t in points)
        except ToolkitError as e:
            logger.debug(f"variant {variant.name} failed: {e}")
            ok = False
        if ok:
            passing.append(variant)
    if not passing:
        raise CalibrationError("no reading of u(tau) satisfies [u, tau] = -2 p(2u)")
    classes = {v.equivalence_class for v in passing}
    if len(classes) > 1:
        raise CalibrationError(f"inequivalent readings of u(tau) pass: {[v.name for v in passing]}")
    if len(passing) > 1:
        logger.info(f"Equivalent readings pass: {', '.join(v.name for v in passing)}")
    with _chud_lock:
        if _chud_variant is None:
            _chud_variant = passing[0]
            logger.info(f"✓ Chudnovsky formula calibrated: {_chud_variant.name}")
        return _chud_variant


def calibrated_chud_variant() -> ChudVariant:
    if _chud_variant is None:
        raise ConventionNotCalibrated("run calibrate_chudnovsky() before evaluating u(tau)")
    return _chud_variant


def reset_calibration():
    global _chud_variant
    with _chud_lock:
        _chud_variant = None

