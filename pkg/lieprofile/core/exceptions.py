# ----------------------------------------------------------------------------
# Copyright (c) 2024-, LieProfile development team.
#
# Distributed under the terms of the Modified BSD License.
#
# The full license is in the file LICENSE, distributed with this software.
# ----------------------------------------------------------------------------


class LieProfileError(Exception):
    """Base class for all lieprofile exceptions"""
    pass


class LieProfileLayoutError(LieProfileError):
    """Exception for a point or array that does not match a group layout

    Parameters
    ----------
    obj_name : str
        The name of the object being checked
    expected : int or tuple
        The expected dimension or shape
    found : int or tuple
        The dimension or shape received
    """
    def __init__(self, obj_name, expected, found):
        super(LieProfileLayoutError, self).__init__()
        self.args = ("%s does not conform to the group layout: expected %s, "
                     "found %s" % (obj_name, expected, found), )


class LieProfileDomainError(LieProfileError, ValueError):
    """Exception for a parameter outside its admissible domain

    Parameters
    ----------
    param : str
        The parameter name
    value : object
        The offending value
    constraint : str
        Human readable description of the admissible domain
    """
    def __init__(self, param, value, constraint):
        super(LieProfileDomainError, self).__init__()
        self.param = param
        self.value = value
        self.args = ("%s = %s is outside its domain (%s)"
                     % (param, value, constraint), )


class LieProfileRangeError(LieProfileError, IndexError):
    """Exception for a scale index outside a cached range

    Parameters
    ----------
    name : str
        The name of the index
    value : int
        The requested index
    low, high : int
        The inclusive bounds of the cached range
    """
    def __init__(self, name, value, low, high):
        super(LieProfileRangeError, self).__init__()
        self.args = ("%s = %s is outside the cached range [%s, %s]"
                     % (name, value, low, high), )


class LieProfileUnsupportedError(LieProfileError):
    """Exception for a feature that is not available for the given input"""
    def __init__(self, what):
        super(LieProfileUnsupportedError, self).__init__()
        self.args = ("Unsupported: %s" % what, )


class LieProfileNormalizationError(LieProfileError):
    """Exception for a coefficient field with the wrong normalization tag

    Parameters
    ----------
    expected : str
        The normalization the operation needs
    found : str
        The normalization of the field
    """
    def __init__(self, expected, found):
        super(LieProfileNormalizationError, self).__init__()
        self.args = ("Conversion required: expected %s coefficients, found "
                     "%s. Use CoefficientField.convert first"
                     % (expected, found), )


class LieProfilePreconditionError(LieProfileError, ValueError):
    """Exception for inputs that violate an operation precondition"""
    def __init__(self, msg):
        super(LieProfilePreconditionError, self).__init__()
        self.args = (msg, )


class LieProfileInsufficientDataError(LieProfileError):
    """Exception for a horizon too short for the requested tail

    Parameters
    ----------
    available : int
        Number of snapshots available
    required : int
        Number of snapshots needed
    """
    def __init__(self, available, required):
        super(LieProfileInsufficientDataError, self).__init__()
        self.args = ("Insufficient data: %d snapshots available, %d required"
                     % (available, required), )


class LieProfileUndecidableError(LieProfileError):
    """Exception for an orthogonality test that cannot be decided

    Parameters
    ----------
    rank : int
        The rank whose track could not be classified
    profile : int
        The profile the rank was compared against
    verdict : Verdict
        The undecided verdict, including the tail statistics
    """
    def __init__(self, rank, profile, verdict):
        super(LieProfileUndecidableError, self).__init__()
        self.rank = rank
        self.profile = profile
        self.verdict = verdict
        self.args = ("Undecidable orthogonality between rank %d and profile "
                     "%d: %s" % (rank, profile, verdict.detail), )


class LieProfileNonconvergentError(LieProfileError):
    """Exception for a coefficient sequence failing the Cauchy test

    Parameters
    ----------
    rank : int
        The rank m of the coefficient sequence
    radius : float
        The measured Cauchy radius over the tail
    tolerance : float
        The tolerance it exceeded
    """
    def __init__(self, rank, radius, tolerance):
        super(LieProfileNonconvergentError, self).__init__()
        self.rank = rank
        self.args = ("Nonconvergent coefficient at rank %d: tail radius %g "
                     "exceeds %g" % (rank, radius, tolerance), )


class LieProfileIngestionError(LieProfileError):
    """Exception for a malformed input file

    Parameters
    ----------
    path : str
        The file being read
    line : int or None
        The 1-based line number of the problem, if known
    reason : str
        What is wrong
    """
    def __init__(self, path, line, reason):
        super(LieProfileIngestionError, self).__init__()
        self.path = path
        self.line = line
        if line is None:
            self.args = ("%s: %s" % (path, reason), )
        else:
            self.args = ("%s, line %d: %s" % (path, line, reason), )


class LieProfileGeneratorError(LieProfileError):
    """Exception for a generator specification that cannot be realized"""
    def __init__(self, msg):
        super(LieProfileGeneratorError, self).__init__()
        self.args = (msg, )


class LieProfileInvariantError(LieProfileError):
    """Exception for an internal bookkeeping invariant that does not hold"""
    def __init__(self, msg):
        super(LieProfileInvariantError, self).__init__()
        self.args = ("Internal invariant failure: %s" % msg, )


class LieProfileDivergenceWarning(UserWarning):
    """Warning for a lattice sum whose convergence hypothesis is violated"""
    pass
