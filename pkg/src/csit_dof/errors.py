"""Exception types raised across the package."""


class CsitDofError(Exception):
    """Base class for all package errors."""


class Singular(CsitDofError, ArithmeticError):
    """A matrix is too ill-conditioned to invert reliably."""


class BadLength(CsitDofError, ValueError):
    """Schedule length incompatible with the generator's block size."""


class ParseError(CsitDofError, ValueError):
    pass


class EmptySchedule(CsitDofError, ValueError):
    pass


class DegenerateGrid(CsitDofError, ValueError):
    """Fewer than two distinct abscissae for a slope fit."""


class Infeasible(CsitDofError, ValueError):
    pass


class ConfigError(CsitDofError, ValueError):
    pass


class AuditFailure(CsitDofError):
    """A schedule requests perfect CSIT more often than the cap allows."""

    def __init__(self, audit):
        self.audit = audit
        worst = max(range(len(audit.per_user)), key=lambda k: audit.per_user[k])
        super().__init__(
            f"user {worst + 1} has perfect CSIT in a fraction "
            f"{float(audit.per_user[worst]):.6g} of slots, above the cap "
            f"{float(audit.lambda_cap):.6g}"
        )
