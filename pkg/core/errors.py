"""
errors.py
=========
Toolkit exception hierarchy.
Every error carries a stable ``code`` that the CLI writes into report rows.
"""


class ToolkitError(Exception):
    """Base class for every toolkit error"""
    code = "TOOLKIT_ERROR"


# Jets
class JetError(ToolkitError):
    code = "JET_ERROR"


class DivisionByZeroJet(JetError):
    code = "DIVISION_BY_ZERO_JET"


class NonFiniteResult(JetError):
    code = "NON_FINITE_RESULT"


class BranchPointError(JetError):
    code = "BRANCH_POINT"


class CriticalPointError(JetError):
    code = "CRITICAL_POINT"


class MobiusPoleError(JetError):
    code = "MOBIUS_POLE"


class DegenerateMobius(JetError):
    code = "DEGENERATE_MOBIUS"


# Theta
class ThetaError(ToolkitError):
    code = "THETA_ERROR"


class TruncationBudgetExceeded(ThetaError):
    code = "TRUNCATION_BUDGET_EXCEEDED"


class LowImaginaryTau(ThetaError):
    code = "LOW_IMAGINARY_TAU"


class ThetaNullUndefined(ThetaError):
    code = "THETA_NULL_UNDEFINED"


# Elliptic
class EllipticError(ToolkitError):
    code = "ELLIPTIC_ERROR"


class LatticePoleError(EllipticError):
    code = "LATTICE_POLE"


class RadiusExceeded(EllipticError):
    code = "RADIUS_EXCEEDED"


# Hypergeometric
class HypergeomError(ToolkitError):
    code = "HYPERGEOM_ERROR"


class BranchCutError(HypergeomError):
    code = "BRANCH_CUT"


class GammaPoleError(HypergeomError):
    code = "GAMMA_POLE"


class SingularPathError(HypergeomError):
    code = "SINGULAR_PATH"


class ToleranceNotReached(HypergeomError):
    code = "TOLERANCE_NOT_REACHED"


# Painleve
class PainleveError(ToolkitError):
    code = "PAINLEVE_ERROR"


class SingularConfiguration(PainleveError):
    code = "SINGULAR_CONFIGURATION"


class SolutionPoleError(PainleveError):
    code = "SOLUTION_POLE"


class UnsupportedFamily(PainleveError):
    code = "UNSUPPORTED_FAMILY"


class CuspMismatch(PainleveError):
    code = "CUSP_MISMATCH"


class RankDeficient(PainleveError):
    code = "RANK_DEFICIENT"


class NoRelation(PainleveError):
    code = "NO_RELATION"


# Calibration
class CalibrationError(ToolkitError):
    code = "CALIBRATION_FAILED"


class ConventionNotCalibrated(CalibrationError):
    code = "CONVENTION_NOT_CALIBRATED"


# CLI
class UsageError(ToolkitError):
    code = "USAGE_ERROR"
    exit_status = 2
