"""Shared exception hierarchy.

InputError covers anything a caller can fix (bad files, bad flags, bad
arguments); NumericalError covers internal numerical failures (root finder
or quadrature not converging). The CLI maps them to exit codes 2 and 1.
"""


class MataError(Exception):
    pass


class InputError(MataError, ValueError):
    pass


class NumericalError(MataError, RuntimeError):
    pass
