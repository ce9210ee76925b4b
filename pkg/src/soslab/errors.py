"""Exception types shared across the package."""


class SoslabError(Exception):
    """Base class for all package errors."""


class InvalidParams(SoslabError):
    """Parameters violate their documented constraints."""


class InvalidSupport(InvalidParams):
    """A support set has the wrong size or contains out-of-range vertices."""


class RademacherWithSignal(InvalidParams):
    """Two-point noise is a null construction and requires beta_star = 0."""


class TooLarge(SoslabError):
    """A combinatorial enumeration or matrix dimension exceeds its budget."""


class NotBinary(SoslabError):
    """Binary positivity mode was applied to a matrix with entries outside {0, 1}."""


class CertificateUndefined(SoslabError):
    """No all-positive 2l-clique exists, so the certificate would divide by zero."""


class MissingValue(SoslabError):
    """A pseudo-expectation was queried outside the subsets it covers."""


class EigFailure(SoslabError):
    """The symmetric eigensolver failed to converge."""
