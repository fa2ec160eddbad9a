"""Exception hierarchy shared by every module."""


class SidonLabError(Exception):
    pass


class ConfigError(SidonLabError, ValueError):
    """Bad parameters or a malformed run configuration."""


class StageOutOfRange(ConfigError):
    pass


class StageMismatch(SidonLabError, ValueError):
    pass


class HeadroomViolation(SidonLabError):
    """A translation would leave the tower the set lives in.

    Raised when the caller picked too small a work stage.
    """


class ResourceLimit(SidonLabError):
    """Stage cap, range-count cap or floor budget exceeded."""


class InvariantViolation(SidonLabError):
    """An exactness guard tripped. Never clamp these away."""


class NegativeAtomMeasure(InvariantViolation):
    pass
