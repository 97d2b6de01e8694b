"""Exception types shared across the package."""


class VfpError(Exception):
    """Base class for all package-specific errors."""


class MalformedDocument(VfpError):
    """An MDP/policy document is structurally wrong (keys, types, lengths)."""


class InvalidStochasticRow(VfpError):
    """A probability row is negative or does not sum to 1 within tolerance."""


class InvalidGamma(VfpError):
    """Discount factor outside [0, 1)."""


class UnknownFixture(VfpError):
    """Requested built-in MDP name does not exist."""


class EnumerationTooLarge(VfpError):
    """|A|^|S| exceeds the deterministic-policy enumeration cap."""


class ShapeMismatch(VfpError):
    """Array shapes are inconsistent with the MDP dimensions."""


class MuOutOfRange(VfpError):
    """Mixture coefficient outside [0, 1]."""


class OrderViolation(VfpError):
    """Single-state policy variants produced elementwise-incomparable values.

    Values of policies that agree everywhere but one state are totally
    ordered; incomparability beyond tolerance signals a numerical failure.
    """


class NotAgreeing(VfpError):
    """Two policies differ on a state that was required to be fixed."""


class DimensionUnsupported(VfpError):
    """Planar geometry helpers only accept 2-component points."""


class NonFiniteLogits(VfpError):
    """Softmax parameters contain NaN or infinity."""


class MissingPolicy(VfpError):
    """An explicit-policy initialization was requested without a policy."""


class UnknownSuite(VfpError):
    """Requested verification suite name does not exist."""
