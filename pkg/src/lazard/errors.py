"""Typed errors shared across the library.

Mathematical gates raise rather than silently degrade: every hypothesis the
computations rely on (unit pivots, nilpotency bounds, free quotients, ...) is
checked where it is used, and the failure carries a witness when one exists.
"""

from __future__ import annotations


class LazardError(Exception):
    """Base class for all library errors."""


class NotUnitError(LazardError):
    """Attempt to invert a residue divisible by p."""


class InconsistentSystemError(LazardError):
    """Linear system M x = b has no solution (b outside the column span)."""


class DimensionMismatchError(LazardError):
    """Operands have incompatible shapes."""


class JacobiError(LazardError):
    """Structure constants violate the Jacobi identity.

    Carries the first violating basis triple and the residual vector.
    """

    def __init__(self, triple, residual):
        self.triple = triple
        self.residual = residual
        super().__init__(f"Jacobi identity fails on basis triple {triple}; residual {residual}")


class ModuleAxiomError(LazardError):
    """Action matrices do not represent the bracket: rho([x,y]) != [rho x, rho y]."""

    def __init__(self, pair, residual):
        self.pair = pair
        self.residual = residual
        super().__init__(f"module axiom fails on basis pair {pair}")


class NotSolvableError(LazardError):
    """Derived series stabilises at a nonzero subalgebra."""


class TorsionAbelianizationError(LazardError):
    """g/[g,g] has no free rank-one quotient at the working precision.

    This is the finite-precision signal that the input does not present a
    solvable algebra with infinite abelianization, so no rank-one splitting
    chain exists.
    """


class MalformedChainError(LazardError):
    """A filtration member is not an ideal (or does not live in the ambient algebra)."""


class ClassTooLargeError(LazardError):
    """Nilpotency class at the working precision is >= p; group operations undefined."""


class DegreeCapError(LazardError):
    """BCH table requested beyond degree p-1, where p enters the denominators."""


class ExponentialNotExactError(LazardError):
    """exp of the operator cannot be evaluated exactly at this precision."""


class NotUnipotentError(LazardError):
    """(U - I)^p != 0, so the truncated logarithm is not licensed."""


class NotNilpotentError(LazardError):
    """N^p != 0, so the truncated exponential is not licensed."""


class CocycleError(LazardError):
    """An operator failed to preserve cocycles, or a vector is not a cocycle."""

    def __init__(self, message, witness=None):
        self.witness = witness
        super().__init__(message)


class InputError(LazardError):
    """Malformed user input (file syntax, out-of-range indices, bad parameters)."""
