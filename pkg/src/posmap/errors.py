"""Exception hierarchy.

Every domain error carries a short machine-readable ``code`` that the CLI
puts in its JSON error object.
"""


class PosmapError(Exception):
    code = "PosmapError"


class DimensionError(PosmapError, ValueError):
    code = "DimensionError"


class BasisError(PosmapError, ValueError):
    code = "BasisError"


class SpecError(PosmapError, ValueError):
    code = "SpecError"


class NotCP(PosmapError):
    code = "NotCP"


class InBall(PosmapError):
    code = "InBall"


class NonDiagonalizable(PosmapError):
    code = "NonDiagonalizable"


class NotAProjection(PosmapError):
    code = "NotAProjection"


class NumericalError(PosmapError, ArithmeticError):
    code = "NumericalError"
