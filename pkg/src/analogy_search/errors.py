"""Exception hierarchy shared across the package.

Every domain error derives from AnalogySearchError so the HTTP layer can
map expected failures to 4xx responses in one place.
"""


class AnalogySearchError(Exception):
    """Base class for all expected domain errors."""

    code = "error"


class EmbeddingFormatError(AnalogySearchError):
    """Malformed embedding file (bad coordinate, dimension mismatch, empty)."""

    code = "embedding_format"


class DimensionMismatchError(AnalogySearchError):
    """Vectors of different dimensionality were combined."""

    code = "dimension_mismatch"


class DegenerateVectorError(AnalogySearchError):
    """A zero / near-zero vector was used where a direction is required."""

    code = "degenerate_vector"


class CorpusFormatError(AnalogySearchError):
    """Malformed corpus record stream."""

    code = "corpus_format"


class IndexFormatError(AnalogySearchError):
    """Unreadable or incompatible index file."""

    code = "index_format"


class UnknownPaperError(AnalogySearchError):
    """A paper id that is not part of the corpus index."""

    code = "unknown_paper"


class MissingAspectError(AnalogySearchError):
    """The query paper lacks a vector for a required aspect."""

    code = "missing_aspect"


class ClusteringError(AnalogySearchError):
    """Clustering preconditions violated (e.g. fewer points than clusters)."""

    code = "clustering"


class ConfigError(AnalogySearchError):
    """Invalid search configuration."""

    code = "config"


class EvaluationError(AnalogySearchError):
    """Invalid evaluation input (probe sizes, vote payloads, ...)."""

    code = "evaluation"


class SessionError(AnalogySearchError):
    """Unknown or closed A/B session."""

    code = "session"
