"""Exception hierarchy. Each class carries the CLI exit code it maps to."""


class TailMarginError(Exception):
    exit_code = 1


class InputError(TailMarginError, ValueError):
    """Bad or insufficient input data (unparseable file, empty tail, ...)."""

    exit_code = 2


class DomainError(TailMarginError, ValueError):
    """Mathematically invalid request, e.g. an infinite quantile."""

    exit_code = 3


class FitError(TailMarginError, RuntimeError):
    """Maximum-likelihood search failed; ``best`` holds the best iterate found."""

    exit_code = 4

    def __init__(self, message, best=None):
        super().__init__(message)
        self.best = best
