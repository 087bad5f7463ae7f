"""Exception hierarchy.

Input problems (bad files, violated hypotheses) derive from ``InputError``;
the CLI maps those to exit status 2. Everything else is a computation or
verification failure (exit status 1).
"""


class ProbHopfError(Exception):
    pass


class InputError(ProbHopfError, ValueError):
    pass


class ParseError(InputError):
    def __init__(self, message, line=None, source=None):
        self.line = line
        self.source = source
        where = ""
        if source is not None:
            where += f"{source}:"
        if line is not None:
            where += f"{line}:"
        super().__init__(f"{where} {message}" if where else message)


class MalformedError(InputError):
    """Tensor or table has out-of-range ids, wrong shape, negative entries..."""


class NotAbelianError(InputError):
    pass


class InconsistentInputError(InputError):
    """Data contradicts an axiom the operation relies on (e.g. zero p(a.a^-1=1))."""


class ConvergenceError(ProbHopfError):
    def __init__(self, message, residual=None):
        self.residual = residual
        super().__init__(message)


class NonCommutingError(ProbHopfError):
    pass


class DefectiveError(ProbHopfError):
    """No common eigenbasis could be separated."""


class SnapError(ProbHopfError):
    """A value that must be an integer (or rational) is not, within tolerance."""

    def __init__(self, message, offenders=()):
        self.offenders = list(offenders)
        super().__init__(message)


class DualRankError(ProbHopfError):
    pass


class QuotientError(ProbHopfError):
    pass
