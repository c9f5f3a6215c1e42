"""Exception hierarchy.

Every engine error carries a stable machine-readable ``code`` which the CLI
reports verbatim.
"""


class EngineError(Exception):
    code = "engine-error"


class PresentationError(EngineError):
    code = "presentation"


class CompositionDomainError(EngineError):
    code = "composition-domain"


class ReversionError(EngineError):
    code = "reversion"


class SymmetryError(EngineError):
    code = "symmetry-violation"


class TruncationError(EngineError):
    code = "truncation-unsound"


class NotInvertibleError(EngineError):
    code = "not-invertible"


class DegenerateBundleError(EngineError):
    code = "degenerate-bundle"


class BaseMismatchError(EngineError):
    code = "base-mismatch"


class RankError(EngineError):
    code = "rank"


class InvalidExcessError(EngineError):
    code = "invalid-excess"


class IncompatibleError(EngineError):
    code = "incompatible"


class NormalizationError(EngineError):
    code = "normalization"


class EmbeddingError(EngineError):
    code = "embedding"


class InternalInconsistencyError(EngineError):
    """An invariant that must hold by construction failed."""

    code = "internal-inconsistency"
