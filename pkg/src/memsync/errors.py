"""Exception types shared across the package."""


class MemsyncError(Exception):
    """Base class for all package-specific errors."""


class ConfigurationError(MemsyncError):
    """Invalid model parameter, scenario setting, or config file content.

    ``key_path`` locates the offending entry when the error comes from a
    config file (e.g. ``"network.coupling.P"``).
    """

    def __init__(self, message, key_path=None):
        self.key_path = key_path
        if key_path:
            message = f"{key_path}: {message}"
        super().__init__(message)


class StabilityError(ConfigurationError):
    """Explicit time step violates the diffusion stability bound."""


class SimulationBlowupError(MemsyncError):
    """A non-finite value appeared while stepping.

    Carries the step index, the location of the first offending value and,
    when raised from :func:`memsync.solver.run`, the partial trajectory
    recorded up to the failing step (``trajectory`` attribute).
    """

    def __init__(self, message, step=None, trajectory=None):
        super().__init__(message)
        self.step = step
        self.trajectory = trajectory


class InsufficientDataError(MemsyncError):
    """Not enough usable samples for a statistical estimate."""
