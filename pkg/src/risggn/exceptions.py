"""Error types raised by the numerical engines."""


class PoleCollisionError(ValueError):
    """Meijer-G parameters put left and right pole families on top of each other.

    Raised when some upper parameter a_i (i <= n) exceeds a lower parameter
    b_j (j <= m) by a positive integer, so no separating contour exists and
    neither evaluation strategy applies.
    """


class MeijerConvergenceError(ArithmeticError):
    """The Meijer-G evaluator could not reach the requested tolerance.

    The message carries the diagnostic state (strategy, contour abscissa,
    truncation point or precision ceiling reached).
    """


class DegenerateFitError(ArithmeticError):
    """The moment-matched PDF fit produced parameters outside their domain.

    Carries the offending intermediate values (a2, a3, a6 and the radicand
    of a7) in the message.
    """


class AsymptoticPoleError(ArithmeticError):
    """A gamma factor in an asymptotic SER term sits exactly on a pole."""
