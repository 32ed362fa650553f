"""
theta.py
========
Jacobi theta functions over jets.
Convention: nome q = exp(i pi tau), z-period 1 (trig factors carry pi z).
"""

import cmath
import logging
from dataclasses import dataclass
from typing import Dict, Sequence, Union

from core.config import TruncationPolicy
from core.errors import LowImaginaryTau, ThetaNullUndefined, TruncationBudgetExceeded
from core.jets import Jet, constant_jet, jet_elementary
from core.report import ResidualReport

logger = logging.getLogger(__name__)

DEFAULT_POLICY = TruncationPolicy()


@dataclass(frozen=True)
class ThetaIndex:
    k: int

    def __post_init__(self):
        if self.k not in (1, 2, 3, 4):
            raise ValueError(f"theta index must be 1..4, got {self.k}")


@dataclass(frozen=True)
class HalfPlanePoint:
    """A tau in the upper half-plane, at least min_im_tau above the real axis"""
    tau: complex
    min_im_tau: float = DEFAULT_POLICY.min_im_tau

    def __post_init__(self):
        object.__setattr__(self, "tau", complex(self.tau))
        check_tau(self.tau, self.min_im_tau)


def check_tau(tau: complex, min_im_tau: float):
    if not tau.imag >= min_im_tau:
        raise LowImaginaryTau(f"Im(tau) = {tau.imag:.6g} below min_im_tau = {min_im_tau}")


def as_tau(tau: Union[complex, HalfPlanePoint]) -> complex:
    return tau.tau if isinstance(tau, HalfPlanePoint) else complex(tau)


def as_jet(v: Union[complex, Jet], order: int = 3) -> Jet:
    return v if isinstance(v, Jet) else constant_jet(complex(v), order)


def nome(tau: complex) -> complex:
    return cmath.exp(1j * cmath.pi * tau)


def _index(k) -> int:
    return k.k if isinstance(k, ThetaIndex) else ThetaIndex(int(k)).k


def _theta_series(k: int, z: Jet, tau: Jet, pol: TruncationPolicy,
                  orders: Sequence[int]) -> Dict[int, Jet]:
    """Sum the q-series of d^j theta_k / dz^j for every j in orders, as t-jets.

    Term n contributes 2 s_n q^{e_n} trig(m pi z) with
      k=1: sin, s_n=(-1)^n, e_n=(n+1/2)^2, m=2n+1 (n>=0)
      k=2: cos, s_n=1,      e_n=(n+1/2)^2, m=2n+1 (n>=0)
      k=3: cos, s_n=1,      e_n=n^2,       m=2n   (n>=1), plus 1
      k=4: cos, s_n=(-1)^n, e_n=n^2,       m=2n   (n>=1), plus 1
    """
    check_tau(complex(tau.d[0]), pol.min_im_tau)
    order = min(z.order, tau.order)
    z, tau = z.truncate(order), tau.truncate(order)
    half = k in (1, 2)
    alternating = k in (1, 4)
    use_sin = k == 1

    totals = {j: constant_jet(1.0 if (j == 0 and not half) else 0.0, order) for j in orders}
    accumulated = 0.0
    small_run = 0
    n = 0 if half else 1
    used = 0
    while True:
        if used >= pol.max_terms:
            raise TruncationBudgetExceeded(
                f"theta_{k} did not converge within {pol.max_terms} terms at tau={tau.d[0]}")
        e = (n + 0.5) ** 2 if half else float(n * n)
        m = 2 * n + 1 if half else 2 * n
        omega = m * cmath.pi
        sign = -1.0 if (alternating and n % 2) else 1.0
        base = tau * (1j * cmath.pi * e)
        e_plus = jet_elementary(base + z * (1j * omega), "exp")
        e_minus = jet_elementary(base - z * (1j * omega), "exp")

        magnitude = 0.0
        for j in orders:
            phase = cmath.exp(0.5j * cmath.pi * j)
            if use_sin:
                trig = (e_plus * phase - e_minus * (1.0 / phase)) * (1.0 / 2j)
            else:
                trig = (e_plus * phase + e_minus * (1.0 / phase)) * 0.5
            term = trig * (2.0 * sign * omega ** j)
            totals[j] = totals[j] + term
            magnitude = max(magnitude, float(max(abs(term.d))))
        accumulated += magnitude
        used += 1
        n += 1

        # q-series terms are not monotone for complex z: require two quiet terms in a row
        if magnitude <= pol.term_tol * accumulated:
            small_run += 1
            if small_run >= 2:
                return totals
        else:
            small_run = 0


def theta_eval(k, z: Union[complex, Jet], tau: Union[complex, Jet],
               pol: TruncationPolicy = DEFAULT_POLICY) -> Jet:
    """Jet of theta_k(z(t) | tau(t))"""
    return _theta_series(_index(k), as_jet(z), as_jet(tau), pol, (0,))[0]


def theta_derivative(k, z: Union[complex, Jet], tau: Union[complex, Jet],
                     pol: TruncationPolicy = DEFAULT_POLICY, dz: int = 1) -> Jet:
    """Jet of d^dz theta_k / dz^dz at (z(t) | tau(t)), dz in 0..3"""
    if dz not in (0, 1, 2, 3):
        raise ValueError(f"dz must be 0..3, got {dz}")
    return _theta_series(_index(k), as_jet(z), as_jet(tau), pol, (dz,))[dz]


def theta_derivatives(k, z: Union[complex, Jet], tau: Union[complex, Jet],
                      pol: TruncationPolicy = DEFAULT_POLICY,
                      orders: Sequence[int] = (0, 1, 2, 3)) -> Dict[int, Jet]:
    """Several z-derivatives from one pass over the series"""
    return _theta_series(_index(k), as_jet(z), as_jet(tau), pol, tuple(orders))


def theta_null(k, tau: Union[complex, Jet], pol: TruncationPolicy = DEFAULT_POLICY) -> Jet:
    """theta_k(0 | tau) for k in 2..4"""
    k = _index(k)
    if k == 1:
        raise ThetaNullUndefined("theta_1(0|tau) vanishes identically; use theta1_prime")
    tau = as_jet(tau)
    return theta_eval(k, constant_jet(0.0, tau.order), tau, pol)


def theta1_prime(z: Union[complex, Jet], tau: Union[complex, Jet],
                 pol: TruncationPolicy = DEFAULT_POLICY) -> Jet:
    """Jet of the z-derivative of theta_1 at (z(t) | tau(t))"""
    return theta_derivative(1, z, tau, pol, dz=1)


def modular_x(tau: Union[complex, Jet], pol: TruncationPolicy = DEFAULT_POLICY) -> Jet:
    """x(tau) = theta_4^4 / theta_3^4"""
    tau = as_jet(tau)
    ratio = theta_null(4, tau, pol) / theta_null(3, tau, pol)
    squared = ratio * ratio
    return squared * squared


# theta_k(z + 1) = s1 theta_k(z),  theta_k(z + tau) = s2 q^-1 exp(-2 pi i z) theta_k(z)
QUASI_PERIOD_SIGNS = {1: (-1, -1), 2: (-1, 1), 3: (1, 1), 4: (1, -1)}


def _relative_defect(lhs: complex, rhs: complex, scale: float = 0.0) -> float:
    return abs(lhs - rhs) / max(abs(lhs), abs(rhs), scale)


def theta_identity_residual(tau: Union[complex, HalfPlanePoint], pol: TruncationPolicy = DEFAULT_POLICY,
                            z: complex = 0.23 + 0.11j, tol: float = 1e-11) -> ResidualReport:
    """Largest relative defect among

        theta3^4 = theta2^4 + theta4^4                 (at z = 0)
        theta1'(0) = pi theta2 theta3 theta4
        the z + 1 and z + tau quasi-periodicity laws for k = 1..4
    """
    tau = as_tau(tau)
    check_tau(tau, pol.min_im_tau)
    t = constant_jet(tau, 0)

    def val(k, at):
        return complex(theta_eval(k, constant_jet(at, 0), t, pol).d[0])

    n2, n3, n4 = (complex(theta_null(k, t, pol).d[0]) for k in (2, 3, 4))
    d1 = complex(theta1_prime(constant_jet(0.0, 0), t, pol).d[0])
    # near a cusp one null is tiny and carries the others' rounding
    quartic_scale = max(abs(n2), abs(n3), abs(n4)) ** 4
    product_scale = cmath.pi * max(abs(n2 * n3), abs(n2 * n4), abs(n3 * n4))
    defects = [
        _relative_defect(n3 ** 4, n2 ** 4 + n4 ** 4, quartic_scale),
        _relative_defect(d1, cmath.pi * n2 * n3 * n4, product_scale),
    ]
    multiplier = cmath.exp(-2j * cmath.pi * z) / nome(tau)
    for k, (s1, s2) in QUASI_PERIOD_SIGNS.items():
        tk = val(k, z)
        defects.append(_relative_defect(val(k, z + 1), s1 * tk))
        defects.append(_relative_defect(val(k, z + tau), s2 * multiplier * tk))
    return ResidualReport.build(tau, max(defects), tol, "theta-identities", "q=exp(i pi tau)")
