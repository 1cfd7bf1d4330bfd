"""Exceptions and warning categories raised by ramancoupling.

Every exception carries an ``exit_code`` that the command line
front-end returns to the shell: 1 for configuration problems, 3 for
fit and peak-detection failures and 2 for any other numerical failure.
"""
# Author: ramancoupling developers
# Created: October 2026

__all__ = ['RamanCouplingError', 'ConfigError', 'SizeError', 'DomainError',
           'ContractError', 'RangeError', 'LabelingError',
           'SingularityError', 'PoleCollisionError', 'ConvergenceError',
           'BracketingError', 'TrackingError', 'StiffnessError',
           'DetectionError', 'FitError',
           'RamanCouplingWarning', 'DispersiveWarning',
           'PerturbativeWarning', 'TruncationWarning', 'LabelingWarning',
           'MonotonicityWarning']


class RamanCouplingError(Exception):
    exit_code = 2


class ConfigError(RamanCouplingError, ValueError):
    exit_code = 1


class SizeError(RamanCouplingError, ValueError):
    pass


class DomainError(RamanCouplingError, ValueError):
    pass


class ContractError(RamanCouplingError, ValueError):
    pass


class RangeError(RamanCouplingError, ValueError):
    pass


class LabelingError(RamanCouplingError, RuntimeError):
    """Dressed-state assignment failed.

    Attributes
    ----------
    conflicts : list
      ``(label, eigenindex, overlap2)`` triples that could not be
      assigned.
    """

    def __init__(self, message, conflicts=()):
        RamanCouplingError.__init__(self, message)
        self.conflicts = list(conflicts)


class SingularityError(RamanCouplingError, ArithmeticError):
    pass


class PoleCollisionError(SingularityError):
    pass


class ConvergenceError(RamanCouplingError, RuntimeError):

    def __init__(self, message, history=()):
        RamanCouplingError.__init__(self, message)
        self.history = list(history)


class BracketingError(RamanCouplingError, RuntimeError):
    pass


class TrackingError(RamanCouplingError, RuntimeError):

    def __init__(self, message, omega_amp=None):
        RamanCouplingError.__init__(self, message)
        self.omega_amp = omega_amp


class StiffnessError(RamanCouplingError, RuntimeError):
    pass


class DetectionError(RamanCouplingError, RuntimeError):
    exit_code = 3


class FitError(RamanCouplingError, RuntimeError):
    exit_code = 3

    def __init__(self, message, history=()):
        RamanCouplingError.__init__(self, message)
        self.history = list(history)


class RamanCouplingWarning(UserWarning):
    pass


class DispersiveWarning(RamanCouplingWarning):
    pass


class PerturbativeWarning(RamanCouplingWarning):
    pass


class TruncationWarning(RamanCouplingWarning):
    pass


class LabelingWarning(RamanCouplingWarning):
    pass


class MonotonicityWarning(RamanCouplingWarning):
    pass
