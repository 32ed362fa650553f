"""
report.py
=========
ResidualReport: one verified identity at one tau.
"""

from dataclasses import dataclass
from typing import Optional

from core.errors import ToolkitError


@dataclass
class ResidualReport:
    """Absolute residual of an identity at tau; passed <=> residual_abs <= tol"""
    tau: complex
    residual_abs: float
    tol: float
    passed: bool
    context: str
    convention: str
    error: Optional[str] = None

    @classmethod
    def build(cls, tau, residual, tol, context, convention) -> "ResidualReport":
        residual = float(residual)
        return cls(complex(tau), residual, float(tol), residual <= tol, context, convention)

    @classmethod
    def failure(cls, tau, tol, context, convention, error: ToolkitError) -> "ResidualReport":
        """Row for an evaluation that raised instead of producing a residual"""
        return cls(complex(tau), float("inf"), float(tol), False, context, convention, error.code)
