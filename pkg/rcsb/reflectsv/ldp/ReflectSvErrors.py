##
# File:    ReflectSvErrors.py
# Author:  J. Westbrook
# Date:    14-Oct-2026
# Version: 0.001
#
# Updated:
#
##
"""
Exception hierarchy for the reflected stochastic volatility numerics.

Library code raises these; the command-line runner maps them to exit codes
(ValidationError -> 2, NumericalFailure -> 3).
"""
__docformat__ = "restructuredtext en"
__author__ = "John Westbrook"
__email__ = "john.westbrook@rcsb.org"
__license__ = "Apache 2.0"


class ReflectSvError(Exception):
    """Base class for all package errors."""


class ValidationError(ReflectSvError, ValueError):
    """Rejected input, configuration or precondition."""


class NumericalFailure(ReflectSvError):
    """Base class for numerical problems detected at run time."""


class ReplicaAbortError(NumericalFailure):
    def __init__(self, message, stepIndex=None, replicaIndex=None):
        super(ReplicaAbortError, self).__init__(message)
        self.stepIndex = stepIndex
        self.replicaIndex = replicaIndex


class DegenerateDenominatorError(NumericalFailure):
    def __init__(self, message, denominator=None):
        super(DegenerateDenominatorError, self).__init__(message)
        self.denominator = denominator


class NonConvergenceError(NumericalFailure):
    pass
