"""Exception types raised across the package."""


class ShapeError(ValueError):
    """Array dimensions are inconsistent with the requested operation."""


class ModeError(ValueError):
    """Unfolding mode outside {1, 2, 3}."""


class DegenerateBandError(ValueError):
    """A reference band has zero mean, so a relative error is undefined."""


class FormatError(ValueError):
    """A cube file is malformed.

    Parameters
    ----------
    message : str
    offset : int, optional
        Byte offset in the file where the problem was detected.
    """

    def __init__(self, message, offset=None):
        if offset is not None:
            message = f"{message} (at byte offset {offset})"
        super().__init__(message)
        self.offset = offset
