"""Exception hierarchy shared by all modules."""


class MagUCPError(Exception):
    """Base class for every error raised by this package."""


class ConfigurationError(MagUCPError, ValueError):
    """Invalid input: unknown name, bad parameter, dimension mismatch."""


class EvaluationError(MagUCPError, ArithmeticError):
    """A field or integrand produced a non-finite value."""


class VanishingBoundaryMassError(EvaluationError):
    """The boundary mass Phi(r) is numerically zero at the requested radius."""

    def __init__(self, radius, phi):
        self.radius = radius
        self.phi = phi
        super().__init__(
            f"vanishing boundary mass: Phi({radius!r}) = {phi!r} is below the floor"
        )


class InternalConsistencyError(MagUCPError, RuntimeError):
    """Two computed quantities contradict each other."""
