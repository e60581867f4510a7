"""Exception hierarchy shared by every fuzzylbp module."""


class FuzzyLbpError(Exception):
    """Base class for all errors raised by fuzzylbp."""


class DecodeError(FuzzyLbpError, ValueError):
    """Malformed, truncated or unsupported image data."""

    def __init__(self, message, offset=None):
        if offset is not None:
            message = f"{message} (at byte offset {offset})"
        super().__init__(message)
        self.offset = offset


class ContractError(FuzzyLbpError, ValueError):
    """A caller violated an operation's precondition."""


class ParameterError(FuzzyLbpError, ValueError):
    """Invalid membership-function or classifier parameters."""


class DatasetError(FuzzyLbpError):
    """Problems scanning a dataset tree or reading one of its images."""


class StoreError(FuzzyLbpError):
    """Feature store or model file cannot be written or read back."""
