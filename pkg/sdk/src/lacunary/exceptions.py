"""Exception hierarchy shared by the library, the CLI and the HTTP service.

PreconditionError covers refusals (bad input, hypothesis not met).
NumericalAnomalyError covers outcomes the mathematics rules out, which
therefore point at a numerical pathology.
"""


class LacunaryError(Exception):
    """Base class for all errors raised by lacunary."""


class PreconditionError(LacunaryError, ValueError):
    """An operation refused its input."""


class NumericalAnomalyError(LacunaryError, ArithmeticError):
    """A computation produced a result that should be impossible."""


class _LocatedSyntaxError(PreconditionError):
    kind = "input"

    def __init__(self, message: str, text: str, position: int):
        self.text = text
        self.position = position
        self.message = message
        super().__init__(self.render())

    def render(self) -> str:
        caret = " " * self.position + "^"
        return f"{self.kind} error at column {self.position}: {self.message}\n  {self.text}\n  {caret}"


class DescriptorSyntaxError(_LocatedSyntaxError):
    """Unparseable spectral-set descriptor."""

    kind = "descriptor"


class ExpressionSyntaxError(_LocatedSyntaxError):
    """Unparseable function expression."""

    kind = "expression"


class AliasingError(PreconditionError):
    """A polynomial does not fit on the requested grid."""

    def __init__(self, bandwidth: int, q: int):
        self.bandwidth = bandwidth
        self.q = q
        self.required_q = max(q, (2 * bandwidth + 1).bit_length())
        super().__init__(
            f"bandwidth {bandwidth} aliases on a 2^{q} grid; use grid exponent >= {self.required_q}"
        )


class QuadratureNotConvergedError(NumericalAnomalyError):
    """Successive grid refinements still disagree at the largest grid."""

    def __init__(self, coarse: float, fine: float, q: int):
        self.coarse = coarse
        self.fine = fine
        self.q = q
        super().__init__(
            f"quadrature not converged at q={q}: {coarse!r} vs {fine!r}"
        )
