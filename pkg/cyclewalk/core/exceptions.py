"""
Exception hierarchy for cyclewalk

All errors raised by the library derive from CycleWalkError. Subclasses
also inherit from the matching builtin (ValueError / RuntimeError) so that
callers catching the builtin keep working.
"""

from typing import Optional


class CycleWalkError(Exception):
    """Base class of every cyclewalk error"""
    pass


class ComplexError(CycleWalkError, ValueError):
    """Invalid complex, chain or dimension mismatch"""
    pass


class NoHolesError(ComplexError):
    """Raised when a homology class is requested but beta_1 = 0"""
    pass


class InputFormatError(CycleWalkError, ValueError):
    """Malformed input file; carries the offending line when known"""

    def __init__(self, message: str, line: Optional[int] = None, path: Optional[str] = None):
        self.line = line
        self.path = path
        location = ""
        if path is not None:
            location += f"{path}"
        if line is not None:
            location += f":{line}"
        super().__init__(f"{location}: {message}" if location else message)


class SolverError(CycleWalkError, RuntimeError):
    """LP, eigen or ODE solver failure"""

    def __init__(self, message: str, residual: Optional[float] = None):
        self.residual = residual
        if residual is not None:
            message = f"{message} (residual={residual:.3e})"
        super().__init__(message)


class ResourceLimitError(CycleWalkError, RuntimeError):
    """Raised when an exact computation exceeds its operation budget"""
    pass


class AbsorbedError(CycleWalkError):
    """Raised when a step is requested from the absorbing null chain"""
    pass


class InterruptedException(CycleWalkError):
    """Exception raised when a long-running experiment is cancelled"""
    pass
