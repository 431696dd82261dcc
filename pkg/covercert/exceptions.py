"""Error types. ``status_code`` doubles as the process exit code of the CLI."""

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_INVARIANT = 2
EXIT_USAGE = 64


class CovercertException(Exception):
    status_code = EXIT_VALIDATION

    def __init__(self, detail: str, status_code: int | None = None):
        super().__init__(detail)
        self.detail = detail
        if status_code is not None:
            self.status_code = status_code

    def __str__(self) -> str:
        return self.detail


class FormatError(CovercertException):
    def __init__(self, detail: str, line: int | None = None, source: str | None = None):
        where = ""
        if source is not None:
            where = f"{source}:"
        if line is not None:
            where = f"{where}{line}: "
        elif where:
            where = f"{where} "
        super().__init__(f"{where}{detail}")
        self.line = line


class InvalidTriangulation(CovercertException):
    pass


class DisconnectedTriangulation(CovercertException):
    pass


class MultipleVertices(CovercertException):
    pass


class InvalidQuotient(CovercertException):
    pass


class UnknownElement(CovercertException):
    pass


class TooLarge(CovercertException):
    pass


class NoAdmissibleCut(CovercertException):
    pass


class GraphDisconnected(CovercertException):
    pass


class DomainMismatch(CovercertException):
    pass


class PreconditionViolation(CovercertException):
    pass


class SupportTooLarge(CovercertException):
    pass


class NotACocycle(CovercertException):
    pass


class ValueOutOfRange(CovercertException):
    pass


class MatchingViolation(CovercertException):
    pass


class OrientationMissing(CovercertException):
    pass


class InvalidProfile(CovercertException):
    pass


class CoverInvariantError(CovercertException):
    status_code = EXIT_INVARIANT


class TheoremViolation(CovercertException):
    status_code = EXIT_INVARIANT
