"""Typed errors shared across the package.

The CLI maps these onto its exit-code contract: BadInputError -> 4,
NumericalError -> 2, TheoremViolationError -> 3.
"""


class JetminError(Exception):
    """Base class for all package errors."""


class BadInputError(JetminError, ValueError):
    """Malformed or inconsistent user input (problem files, arguments)."""


class DomainError(BadInputError):
    """A point lies outside the domain, or a domain spec is invalid."""


class GreenPoleError(DomainError):
    """Green-function evaluation at the pole; the value would be -infinity."""


class NumericalError(JetminError, RuntimeError):
    """Numerical failure: non-convergent quadrature, infeasible or singular solve."""


class NonIntegrableWeightError(NumericalError):
    """The weighted integrand diverges even on the constrained subspace."""


class TheoremViolationError(JetminError, RuntimeError):
    """An exact identity was violated beyond tolerance; signals an internal bug."""
