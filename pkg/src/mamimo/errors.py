"""Exception types shared across the package."""


class MamimoError(Exception):
    """Base class for errors raised by this package."""


class InfeasibleError(MamimoError):
    """A requested operating point cannot be met (e.g. rate target above the
    asymptotic limit, or pilot overhead exceeding the coherence block)."""


class RankDeficiencyError(MamimoError):
    """A matrix that must be inverted is (numerically) rank deficient."""

    def __init__(self, message: str, cond: float | None = None):
        super().__init__(message)
        self.cond = cond


class UnsupportedScenarioError(MamimoError):
    """An operation was asked to run on a propagation scenario it does not
    model (e.g. Bayesian estimation without a defined channel prior)."""
