"""Exception types shared across the package.

Dedicated classes (instead of a bare ``ValueError`` everywhere) let callers
distinguish structural failures -- a singular pencil, a degenerate trial
space -- from plain argument mistakes.
"""


class SymPencilError(Exception):
    """Base class for all errors raised by this package."""


class EigenDecompositionError(SymPencilError):
    """Symmetric eigendecomposition failed or left a large residual.

    The ``residual`` attribute carries the achieved relative residual when
    the decomposition converged but did not meet the accuracy contract.
    """

    def __init__(self, msg, residual=None):
        super().__init__(msg)
        self.residual = residual


class SingularPencil(SymPencilError):
    """det(A - lambda*B) vanishes identically to tolerance."""


class SingularA(SymPencilError):
    """A is singular but the requested construction needs A**-1."""


class SingularB(SymPencilError):
    """B has a nontrivial kernel; use the relation/quotient path instead."""


class NotAnEigenvalue(SymPencilError):
    """The given point is not in the point spectrum to tolerance."""


class ZeroVector(SymPencilError):
    """A nonzero vector was required."""


class NotOrthoComplemented(SymPencilError):
    """A subspace is degenerate in the indefinite inner product.

    ``witness`` holds a basis of the isotropic part F intersected with its
    orthogonal companion, when available.
    """

    def __init__(self, msg, witness=None):
        super().__init__(msg)
        self.witness = witness


class DegenerateTrialSpace(SymPencilError):
    """The compressed matrix B_V is singular on the trial subspace."""


class EmptyConeIntersection(SymPencilError):
    """No sample vector of the subspace landed in the requested sign cone."""


class OddGrid(SymPencilError):
    """A quadrature node collides with a zero of the weight function."""


class ParseError(SymPencilError):
    """Matrix Market input is malformed; carries the 1-based line number."""

    def __init__(self, msg, line_number=None):
        if line_number is not None:
            msg = f"line {line_number}: {msg}"
        super().__init__(msg)
        self.line_number = line_number


class NotSquare(SymPencilError):
    """The parsed matrix is not square."""


class NotReal(SymPencilError):
    """The parsed matrix is not real-valued."""
