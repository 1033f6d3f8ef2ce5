"""Exception types shared across the pipeline."""


class UrlSentinelError(Exception):
    """Base class for all library errors."""


class DegenerateInputError(UrlSentinelError):
    """Raised when a URL is empty (or becomes empty) after normalization."""


class FeedError(UrlSentinelError):
    """Base class for feed transport failures; all are retryable."""

    retryable = True


class FeedStatusError(FeedError):
    """Feed endpoint answered with a non-200 status."""

    def __init__(self, status: int, url: str):
        super().__init__(f"feed {url} returned HTTP {status}")
        self.status = status
        self.url = url


class FeedNetworkError(FeedError):
    """Connection-level failure while fetching a feed."""


class FeedTimeoutError(FeedError):
    """Feed did not answer within the allotted timeout."""


class FeedFormatError(UrlSentinelError):
    """Feed body does not match the expected format (e.g. missing CSV column)."""


class BundleFormatError(UrlSentinelError):
    """Base class for model bundle (de)serialization failures."""


class BundleMagicError(BundleFormatError):
    """Stream does not start with the bundle magic."""


class BundleVersionError(BundleFormatError):
    """Bundle format version is not supported by this build."""


class BundleChecksumError(BundleFormatError):
    """Trailing CRC-32 does not match the bundle contents."""


class BundleTruncationError(BundleFormatError):
    """Stream ended before a declared section was complete."""


class PipelineStageError(UrlSentinelError):
    """Wraps a failure inside a named training-pipeline stage."""

    def __init__(self, stage: str, cause: Exception):
        super().__init__(f"stage '{stage}' failed: {cause}")
        self.stage = stage
        self.cause = cause
