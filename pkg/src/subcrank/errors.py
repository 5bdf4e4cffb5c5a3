"""Exception hierarchy shared by all modules."""

import numpy as np


class SubcrankError(Exception):
    """Base class for errors raised by this package."""


class ParameterError(SubcrankError, ValueError):
    """Invalid input parameter (order, step count, mesh size, ...)."""


class AlignmentError(ParameterError):
    """Indicator datum does not align with the mesh lines."""


class DomainError(SubcrankError, ValueError):
    """Complex argument falls on a branch cut."""


class SingularityError(SubcrankError, ValueError):
    """Time profile evaluated at a singular point."""


class DataError(SubcrankError, ValueError):
    """Invalid numerical data, e.g. nonpositive errors fed to a rate fit."""


class NotSPDError(SubcrankError, np.linalg.LinAlgError):
    """Matrix failed a positive-definiteness check during factorization."""
