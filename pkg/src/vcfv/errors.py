"""Exception hierarchy shared by all modules."""


class VcfvError(Exception):
    """Base class for every error raised by this package."""


class MeshFormatError(VcfvError):
    """Unreadable or unsupported mesh file."""


class GeometryError(VcfvError):
    """Degenerate or inconsistent mesh geometry."""


class PositivityError(VcfvError):
    """Non-positive density or pressure encountered."""

    def __init__(self, message, cell=None, face=None, state=None):
        super().__init__(message)
        self.cell = cell
        self.face = face
        self.state = state


class InterpolationError(VcfvError):
    """Vertex interpolation could not be evaluated."""


class ConfigError(VcfvError):
    """Invalid run configuration."""

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class StepError(VcfvError):
    """A time step failed; carries the step/time context."""

    def __init__(self, message, step=None, time=None, cause=None):
        super().__init__(message)
        self.step = step
        self.time = time
        self.cause = cause
