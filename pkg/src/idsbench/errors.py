"""Exception hierarchy shared by all pipeline stages."""

from __future__ import annotations


class IdsBenchError(Exception):
    """Base class for every error raised by the toolkit."""


class ArffError(IdsBenchError):
    """A parse error tied to a 1-based line number (0 when not line-specific)."""

    def __init__(self, message: str, line: int):
        self.line = line
        self.message = message
        where = f"line {line}: " if line else ""
        super().__init__(f"{where}{message}")


class MalformedHeader(ArffError):
    pass


class UndeclaredNominalValue(ArffError):
    pass


class ArityMismatch(ArffError):
    pass


class NonNumericToken(ArffError):
    pass


class PreprocessError(IdsBenchError):
    pass


class LabelNotFound(PreprocessError):
    pass


class AllMissingColumn(PreprocessError):
    pass


class SchemaMismatch(PreprocessError):
    pass


class DegeneratePartition(PreprocessError):
    pass


class ClassifierError(IdsBenchError):
    pass


class SingleClassData(ClassifierError):
    pass


class BadHyperparameter(ClassifierError):
    pass


class WidthMismatch(ClassifierError):
    pass


class ModelFormatError(ClassifierError):
    """Serialized model is unreadable or carries an unsupported format version."""


class EvaluationError(IdsBenchError):
    pass


class EmptyEvaluation(EvaluationError):
    pass


class MissingAlgorithm(EvaluationError):
    pass
