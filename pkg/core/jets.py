"""
jets.py
=======
Complex jets of order <= 3: a value and its first three derivatives at an
implicit base point. All differential checks in the toolkit read off jets.
"""

import cmath
from dataclasses import dataclass
from math import comb
from typing import Sequence

import numpy as np

from core.errors import (BranchPointError, CriticalPointError, DegenerateMobius,
                         DivisionByZeroJet, MobiusPoleError, NonFiniteResult)

MAX_ORDER = 3
_ZERO_GUARD = 1e-300
_CRITICAL_GUARD = 1e-12


class Jet:
    """Derivative values d[0..order] of a complex function at a base point.

    Entries are derivative values, not Taylor coefficients. Arithmetic between
    jets of unequal order truncates to the smaller order.
    """

    __slots__ = ("d", "base")

    def __init__(self, d: Sequence[complex], base: complex = None):
        arr = np.asarray(d, dtype=np.complex128).copy()
        if arr.ndim != 1 or not 1 <= arr.size <= MAX_ORDER + 1:
            raise ValueError(f"jet needs 1..{MAX_ORDER + 1} entries, got shape {arr.shape}")
        if not np.all(np.isfinite(arr)):
            raise NonFiniteResult(f"non-finite jet entries {arr}")
        arr.setflags(write=False)
        self.d = arr
        # evaluation-parameter base point, when known (needed only by jet_invert)
        self.base = None if base is None else complex(base)

    @property
    def order(self) -> int:
        return self.d.size - 1

    @property
    def value(self) -> complex:
        return complex(self.d[0])

    def truncate(self, order: int) -> "Jet":
        return Jet(self.d[:order + 1], self.base)

    def __repr__(self):
        return f"Jet({', '.join(repr(complex(v)) for v in self.d)})"

    # Operator sugar over jet_arith
    def _coerce(self, other) -> "Jet":
        if isinstance(other, Jet):
            return other
        return constant_jet(other, self.order)

    def __add__(self, other):
        return jet_arith(self, self._coerce(other), "add")

    __radd__ = __add__

    def __sub__(self, other):
        return jet_arith(self, self._coerce(other), "sub")

    def __rsub__(self, other):
        return jet_arith(self._coerce(other), self, "sub")

    def __mul__(self, other):
        if not isinstance(other, Jet):
            return _checked(self.d * complex(other), self.base)
        return jet_arith(self, other, "mul")

    __rmul__ = __mul__

    def __truediv__(self, other):
        if not isinstance(other, Jet):
            if abs(other) <= _ZERO_GUARD:
                raise DivisionByZeroJet("division of a jet by zero")
            return _checked(self.d / complex(other), self.base)
        return jet_arith(self, other, "div")

    def __rtruediv__(self, other):
        return jet_arith(self._coerce(other), self, "div")

    def __neg__(self):
        return Jet(-self.d, self.base)

    def __pow__(self, n: int):
        if isinstance(n, int) and n >= 0:
            out = constant_jet(1.0, self.order)
            for _ in range(n):
                out = out * self
            return out
        return jet_elementary(self, "pow", n)


def constant_jet(value: complex, order: int = MAX_ORDER) -> Jet:
    d = np.zeros(order + 1, dtype=np.complex128)
    d[0] = value
    return Jet(d)


def identity_jet(base: complex, order: int = MAX_ORDER) -> Jet:
    """Jet of t -> t at t = base"""
    d = np.zeros(order + 1, dtype=np.complex128)
    d[0] = base
    if order >= 1:
        d[1] = 1.0
    return Jet(d, base)


def _checked(d, base: complex = None) -> Jet:
    with np.errstate(all="ignore"):
        arr = np.asarray(d, dtype=np.complex128)
    if not np.all(np.isfinite(arr)):
        raise NonFiniteResult(f"jet operation overflowed: {arr}")
    return Jet(arr, base)


def _common_base(lhs: Jet, rhs: Jet):
    return lhs.base if lhs.base is not None else rhs.base


def jet_compose(outer: Sequence[complex], inner: Jet) -> Jet:
    """Faa di Bruno to order 3.

    ``outer`` holds f, f', f'', f''' evaluated at inner.d[0] (a Jet is accepted).
    """
    f = outer.d if isinstance(outer, Jet) else np.asarray(outer, dtype=np.complex128)
    n = min(inner.order, len(f) - 1)
    x = inner.d
    out = [f[0]]
    if n >= 1:
        out.append(f[1] * x[1])
    if n >= 2:
        out.append(f[2] * x[1] ** 2 + f[1] * x[2])
    if n >= 3:
        out.append(f[3] * x[1] ** 3 + 3 * f[2] * x[1] * x[2] + f[1] * x[3])
    return _checked(out, inner.base)


def reciprocal(x: Jet) -> Jet:
    x0 = x.d[0]
    if abs(x0) <= _ZERO_GUARD:
        raise DivisionByZeroJet(f"reciprocal of a jet with value {x0}")
    with np.errstate(all="ignore"):
        r = 1.0 / x0
        outer = [r, -r * r, 2 * r ** 3, -6 * r ** 4]
    return jet_compose(outer, x)


def jet_arith(lhs: Jet, rhs: Jet, op_tag: str) -> Jet:
    """add / sub / mul (Leibniz) / div (lhs times reciprocal of rhs)"""
    n = min(lhs.order, rhs.order)
    a, b = lhs.d[:n + 1], rhs.d[:n + 1]
    base = _common_base(lhs, rhs)
    if op_tag == "add":
        return _checked(a + b, base)
    if op_tag == "sub":
        return _checked(a - b, base)
    if op_tag == "mul":
        with np.errstate(all="ignore"):
            out = [sum(comb(k, j) * a[j] * b[k - j] for j in range(k + 1)) for k in range(n + 1)]
        return _checked(out, base)
    if op_tag == "div":
        if abs(rhs.d[0]) <= _ZERO_GUARD:
            raise DivisionByZeroJet(f"division by a jet with value {rhs.d[0]}")
        return jet_arith(Jet(a, base), reciprocal(Jet(b, base)), "mul")
    raise ValueError(f"unknown op_tag {op_tag!r}")


def jet_elementary(x: Jet, fn_tag: str, s: complex = None) -> Jet:
    """exp, log, sqrt, pow(s), sin, cos of a jet; principal branches"""
    x0 = complex(x.d[0])
    if fn_tag in ("log", "sqrt", "pow") and abs(x0) <= _ZERO_GUARD:
        raise BranchPointError(f"{fn_tag} at branch point {x0}")
    try:
        if fn_tag == "exp":
            e = cmath.exp(x0)
            outer = [e, e, e, e]
        elif fn_tag == "log":
            r = 1.0 / x0
            outer = [cmath.log(x0), r, -r * r, 2 * r ** 3]
        elif fn_tag == "sqrt":
            return jet_elementary(x, "pow", 0.5)
        elif fn_tag == "pow":
            if s is None:
                raise ValueError("pow needs an exponent")
            s = complex(s)
            # x**(s-k) through exp(s log x) keeps one principal branch for all terms
            base = cmath.exp(s * cmath.log(x0))
            r = 1.0 / x0
            outer = [base, s * base * r, s * (s - 1) * base * r ** 2,
                     s * (s - 1) * (s - 2) * base * r ** 3]
        elif fn_tag == "sin":
            sn, cs = cmath.sin(x0), cmath.cos(x0)
            outer = [sn, cs, -sn, -cs]
        elif fn_tag == "cos":
            sn, cs = cmath.sin(x0), cmath.cos(x0)
            outer = [cs, -sn, -cs, sn]
        else:
            raise ValueError(f"unknown fn_tag {fn_tag!r}")
    except OverflowError as e:
        raise NonFiniteResult(f"{fn_tag} overflowed at {x0}") from e
    return jet_compose(outer, x)


def jet_invert(y: Jet, tau0: complex = None) -> Jet:
    """Jet of the inverse function tau(y) at the base value y.d[0].

    The value slot of the result is the original base point: ``tau0`` if
    given, else ``y.base``.
    """
    if y.order < 1 or abs(y.d[1]) <= _CRITICAL_GUARD:
        raise CriticalPointError("inverse undefined where the first derivative vanishes")
    if tau0 is None:
        tau0 = y.base
    if tau0 is None:
        raise ValueError("jet_invert needs the base point (pass tau0 or build the jet with base)")
    y1 = y.d[1]
    out = [tau0, 1.0 / y1]
    if y.order >= 2:
        out.append(-y.d[2] / y1 ** 3)
    if y.order >= 3:
        out.append((3 * y.d[2] ** 2 - y1 * y.d[3]) / y1 ** 5)
    return _checked(out, base=y.d[0])


def schwarz_bracket(y: Jet) -> complex:
    """[y, tau] = y'''/y'^3 - (3/2) y''^2/y'^4  (= -{tau, y})"""
    if y.order < 3:
        raise ValueError("schwarz_bracket needs an order-3 jet")
    y1 = y.d[1]
    if abs(y1) <= _CRITICAL_GUARD:
        raise CriticalPointError("schwarz bracket at a critical point")
    return complex(y.d[3] / y1 ** 3 - 1.5 * y.d[2] ** 2 / y1 ** 4)


def standard_schwarzian(t: Jet) -> complex:
    """{t, y} = t'''/t' - (3/2)(t''/t')^2"""
    if t.order < 3:
        raise ValueError("standard_schwarzian needs an order-3 jet")
    t1 = t.d[1]
    if abs(t1) <= _CRITICAL_GUARD:
        raise CriticalPointError("schwarzian at a critical point")
    return complex(t.d[3] / t1 - 1.5 * (t.d[2] / t1) ** 2)


def log_derivative_connection(y: Jet) -> complex:
    """d/dtau ln y'(tau) = y''/y'"""
    if y.order < 2:
        raise ValueError("connection needs an order >= 2 jet")
    if abs(y.d[1]) <= _CRITICAL_GUARD:
        raise CriticalPointError("connection at a critical point")
    return complex(y.d[2] / y.d[1])


@dataclass(frozen=True)
class MobiusMap:
    """tau -> (a tau + b)/(c tau + d)"""
    a: complex
    b: complex
    c: complex
    d: complex

    def __post_init__(self):
        if abs(self.det) <= 1e-14:
            raise DegenerateMobius(f"ad - bc = {self.det} is degenerate")

    @property
    def det(self) -> complex:
        return self.a * self.d - self.b * self.c

    def __call__(self, tau: complex) -> complex:
        return (self.a * tau + self.b) / (self.c * tau + self.d)

    def inverse(self) -> "MobiusMap":
        return MobiusMap(self.d, -self.b, -self.c, self.a)

    def derivatives(self, tau0: complex):
        """m, m', m'', m''' at tau0"""
        den = self.c * tau0 + self.d
        if abs(den) <= _CRITICAL_GUARD:
            raise MobiusPoleError(f"c*tau + d vanishes at {tau0}")
        det = self.det
        return [self(tau0), det / den ** 2, -2 * self.c * det / den ** 3,
                6 * self.c ** 2 * det / den ** 4]


def mobius_jet(m: MobiusMap, tau: Jet) -> Jet:
    """Jet of m composed with tau"""
    return jet_compose(m.derivatives(complex(tau.d[0])), tau)
