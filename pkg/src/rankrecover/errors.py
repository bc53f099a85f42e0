"""Exception hierarchy shared across the package.

Two base classes matter for the CLI exit-code mapping: ValidationError
(bad inputs, configs, shapes -> exit 2) and DataContractError (inputs that
parse fine but violate a data-level precondition, e.g. an empty pair set
-> exit 4). I/O problems are plain OSError (exit 3).
"""


class RankRecoverError(Exception):
    """Base class for all package errors."""


class ValidationError(RankRecoverError, ValueError):
    """Inputs violate a contract: domain, type, shape or config errors."""


class DataContractError(RankRecoverError, RuntimeError):
    """Well-formed inputs that violate a data-level precondition."""


# dataset ingestion / serialization

class MissingTargetColumnError(ValidationError):
    """CSV has no 'target' column."""


class NonNumericCellError(ValidationError):
    """A feature/target/group cell failed numeric parsing."""


class RaggedRowsError(ValidationError):
    """CSV rows disagree with the header width."""


class NonFiniteValueError(ValidationError):
    """NaN or infinity in features or targets."""


class EmptyDatasetError(ValidationError):
    """Dataset with zero rows where rows are required."""


class SplitInfeasibleError(DataContractError):
    """Requested split cannot place every part a nonempty share."""


# simulation

class RoiLayoutError(ValidationError):
    """ROI out of grid bounds or overlapping another ROI."""


class DegenerateGroundTruthError(ValidationError):
    """Ground-truth weight vector has empty support."""


class NoiseCalibrationError(ValidationError):
    """Signal has zero norm, the noise ratio cannot be calibrated."""


# pairs

class MissingSubjectLabelsError(DataContractError):
    """Pair policy requires subject labels that the data lacks."""


class EmptyPairSetError(DataContractError):
    """No pair survives the policy."""


# estimation / evaluation

class DimensionMismatchError(ValidationError):
    """Array shapes disagree."""


class ZeroVectorError(ValidationError):
    """A vector that must be nonzero is zero."""


class ZeroBandwidthError(ValidationError):
    """All abscissae identical, local regression has no bandwidth."""


class RankDeficientDesignError(ValidationError):
    """Polynomial design matrix is rank deficient."""
