"""Exception types shared across the toolkit."""

from __future__ import annotations


class McqgenError(Exception):
    """Base class for every error raised by this package."""


class ConfigError(McqgenError):
    """A pipeline or CLI configuration value is missing or out of range."""


class CorpusFormatError(McqgenError):
    """A corpus file cannot be decoded or violates its format contract.

    ``byte_offset`` points at the offending byte when it is known.
    """

    def __init__(self, message: str, *, byte_offset: int | None = None):
        super().__init__(message)
        self.byte_offset = byte_offset


class GazetteerError(McqgenError):
    """A gazetteer directory or file is unusable."""


class AnnotationError(McqgenError):
    """A stand-off annotation does not fit the passage it points into."""


class ClozeError(McqgenError):
    """A mention cannot be turned into a cloze statement."""


class KnowledgeBaseError(McqgenError):
    """An assertion dump, embedding file, or serialized index is unusable."""


class ResourceError(McqgenError):
    """A configured input resource could not be opened or read."""


class GenerationFailure(McqgenError):
    """A sample could not be completed; ``reason`` is a stable tag."""

    reason = "generation-failed"


class PoolExhausted(GenerationFailure):
    """Too few eligible surfaces remain in the answer pool."""

    reason = "pool-exhausted"


class GroundingFailed(GenerationFailure):
    """No usable link between the sample text and the knowledge graph."""

    reason = "grounding-failed"


class SubgraphExhausted(GenerationFailure):
    """The retrieved neighborhood holds fewer candidates than requested."""

    reason = "subgraph-exhausted"
