"""Exception hierarchy shared by the vidtext library and its CLI."""


class VidtextError(Exception):
    """Base class for every error raised by this package."""


class ContractError(VidtextError):
    """A caller violated an API precondition (bad shapes, indices, ranges)."""


class ValidationError(VidtextError):
    """An input file or configuration value failed validation."""


class FrameSequenceError(VidtextError):
    """A frame directory could not be interpreted as a consecutive sequence."""


class InputOutputError(VidtextError):
    """A required path is missing or a file could not be read or written."""
