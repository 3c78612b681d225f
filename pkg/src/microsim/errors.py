"""Exception types shared across the package."""


class DimensionError(ValueError):
    """Array shapes or grids that were required to match do not."""


class DegenerateInputError(ValueError):
    """Input has too little structure for the operation (e.g. constant depth map)."""


class AlignmentError(RuntimeError):
    """Focus alignment produced no usable depth bins."""


class PoseError(ValueError):
    """Pose label text is malformed or not in the configured class set."""
