"""Exception types raised by the pitchsim pipeline."""


class PitchsimError(Exception):
    """Base class for all pitchsim errors."""


class InvalidDimension(PitchsimError):
    """Grid dimensions or extent are degenerate."""


class MalformedRecord(PitchsimError):
    """An activity CSV row or header could not be parsed."""


class EmptyInput(PitchsimError):
    """No usable input records."""


class NonpositiveBandwidth(PitchsimError):
    """Kernel bandwidth must be strictly positive."""


class ZeroMass(PitchsimError):
    """Heatmap has zero total activity and cannot be normalized."""


class ZeroVariance(PitchsimError):
    """A cell vector is constant; the statistic is undefined."""


class EmptyWeights(PitchsimError):
    """The weights matrix has no nonzero entries."""


class IsolatedCell(PitchsimError):
    """A cell has no neighbours (zero row sum in the weights matrix)."""


class InsufficientPermutations(PitchsimError):
    """Permutation count must be at least 1."""


class TooLarge(PitchsimError):
    """Problem size exceeds the exhaustive-enumeration limit."""


class GridMismatch(PitchsimError):
    """Inputs reference different grids."""


class AsymmetricInput(PitchsimError):
    """Distance matrix is not symmetric."""


class NaNInput(PitchsimError):
    """Input contains NaN values."""


class UnknownPlayer(PitchsimError):
    """Requested player id is not present in the inputs."""
