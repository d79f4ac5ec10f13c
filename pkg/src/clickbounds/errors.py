"""Exception hierarchy shared by all clickbounds modules."""


class ClickboundsError(Exception):
    """Base class for all errors raised by this package."""


class InvalidParameterError(ClickboundsError):
    """A parameter is outside its documented domain (bad nbar, eta, index...)."""


class InfeasibleDataError(ClickboundsError):
    """Measured or derived quantities are not realizable by any photon
    number distribution (violated feasibility invariants, infeasible LP)."""


class CertificateError(ClickboundsError):
    """An optimality certificate failed verification; the reported bound
    cannot be trusted."""


class SingularSystemError(ClickboundsError):
    """A linear system that should be regular turned out singular."""
