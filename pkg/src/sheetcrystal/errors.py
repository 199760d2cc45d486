"""Exception types shared across the package."""


class SheetCrystalError(Exception):
    """Base class for domain errors raised by this package."""


class NotNormalizableError(SheetCrystalError):
    """The electrostatic potential does not confine a bound state."""


class AsymmetricAsymptoticFieldError(SheetCrystalError):
    """The two unbounded end regions carry different field magnitudes."""


class BreakpointMismatchError(SheetCrystalError):
    """A wavefunction and a potential disagree on their breakpoint positions."""


class DivergentTailError(SheetCrystalError):
    """A wavefunction carries a non-decaying component in an unbounded region."""


class NoBoundStatesError(SheetCrystalError):
    """The potential does not bind any state."""
