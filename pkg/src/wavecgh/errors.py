"""Exception types for file handling."""


class CorruptFileError(ValueError):
    """Header magic, size or payload length does not match the format."""


class VersionMismatchError(CorruptFileError):
    """File was written with an unsupported format version."""


class StaleCacheError(ValueError):
    """Cached LUT was built for a different scene or block size."""
