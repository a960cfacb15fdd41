"""Exception types raised by the library."""


class HypothesisViolation(ValueError):
    """chi_1(x) chi_2(x) = 0 at some site, so the birth recursion is undefined."""

    def __init__(self, site):
        self.site = site
        super().__init__(f"chi_1(x) chi_2(x) vanishes at site {site}")


class BirthSpaceTrivial(ValueError):
    pass


class WindowTooSmall(ValueError):
    pass


class NonUnitaryTruncation(ValueError):
    pass


class BoundaryCase(ValueError):
    """A predictor was asked about a parameter on a case boundary."""
