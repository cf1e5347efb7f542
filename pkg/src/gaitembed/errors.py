"""Exception hierarchy for the gait embedding library

Everything raised on purpose derives from GaitEmbedError. DataError covers bad or insufficient
inputs (command line exit code 2), ArtifactIoError covers files that could not be written or
read (exit code 3).
"""


class GaitEmbedError(Exception):
    """Base class for all library errors"""


class DataError(GaitEmbedError):
    """Input data does not satisfy an operation's preconditions"""


class ArtifactIoError(GaitEmbedError):
    """An artifact file could not be read or written"""


class DegenerateFrame(DataError):
    """Skeleton frame cannot define a body orientation"""


class NoValidFrame(DataError):
    """Track has no frame with all joints valid"""


class ParseError(DataError):
    """Malformed record in a capture or CSV input file"""

    def __init__(self, line, reason):
        super().__init__(f"line {line}: {reason}")
        self.line = line
        self.reason = reason


class EmptyInput(DataError):
    """Capture input holds no records"""


class InsufficientData(DataError):
    """Some labels have too few sequences for the requested operation"""

    def __init__(self, message, labels=()):
        super().__init__(message)
        self.labels = list(labels)


class InvalidParams(DataError):
    """Parameters outside their documented ranges"""


class ShapeMismatch(DataError):
    """Tensor shapes do not conform"""

    def __init__(self, what, expected, actual):
        super().__init__(f"{what}: expected shape {expected}, got {actual}")
        self.expected = expected
        self.actual = actual


class GraphNotEvaluated(DataError):
    """Backward requested before the forward values exist"""


class DegenerateBatch(DataError):
    """Batch labels cannot form any triplet"""


class NoTriplets(DataError):
    """Mining found no triplet in the batch; the training step is skipped"""


class InvalidK(DataError):
    """Cluster count outside 1..N"""


class LengthMismatch(DataError):
    """Label sequences of different lengths"""


class TooFewPoints(DataError):
    """Not enough points for a projection"""


class FormatError(DataError):
    """Checkpoint file has bad magic bytes, version or header"""


class CorruptPayload(DataError):
    """Checkpoint payload length does not match its header"""


class CheckpointIoError(ArtifactIoError):
    """Checkpoint path could not be written or read"""


class ArtifactWriteError(ArtifactIoError):
    """Report artifact (SVG, CSV, manifest) could not be written"""
