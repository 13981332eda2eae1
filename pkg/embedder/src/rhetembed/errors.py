"""Error taxonomy for the embedding and fine-tuning tools."""


class EmbedderError(Exception):
    """Base class; the CLI reports these as failures with exit code 1."""


class InputParseError(EmbedderError):
    """A pair CSV could not be read or violates the format."""


class EncoderLoadFailure(EmbedderError):
    """The requested encoder could not be constructed."""


class OutOfMemory(EmbedderError):
    """The runtime ran out of memory; the message carries a batch-size hint."""
