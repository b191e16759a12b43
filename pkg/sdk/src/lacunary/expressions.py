"""Function expressions such as "(pi/4)*(1+z)" or "z^2 + 0.5 zbar^3".

expr    := term (('+' | '-') term)*
term    := unary (('*' | '/')? unary)*       juxtaposition multiplies
unary   := ('+' | '-') unary | power
power   := primary ('^' ['-'] integer)?
primary := number | 'z' | 'zbar' | 'pi' | 'i' | ('re' | 'conj') '(' expr ')' | '(' expr ')'
"""

import math
import re

from .circle import TrigPoly
from .exceptions import ExpressionSyntaxError, PreconditionError

_TOKEN = re.compile(
    r"\s*(?:(\d+\.\d*(?:[eE][-+]?\d+)?|\.\d+(?:[eE][-+]?\d+)?|\d+(?:[eE][-+]?\d+)?)|([A-Za-z_]+)|(\*\*|[-+*/^(),]))"
)
_CONSTANTS = {"pi": math.pi, "i": 1j}
_FUNCTIONS = ("re", "conj")
MAX_POWER = 64


def parse_function(text: str) -> TrigPoly:
    """Parse an expression into a TrigPoly."""
    return _ExpressionParser(text).parse()


class _ExpressionParser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = []
        pos = 0
        stripped = text.rstrip()
        while pos < len(stripped):
            match = _TOKEN.match(stripped, pos)
            if not match or match.end() == pos:
                raise ExpressionSyntaxError("unexpected character", text, pos)
            kind = match.lastindex
            self.tokens.append((kind, match.group(kind), match.start(kind)))
            pos = match.end()
        self.i = 0

    def _peek(self):
        return self.tokens[self.i] if self.i < len(self.tokens) else (None, None, len(self.text))

    def _fail(self, message: str, position: int = None):
        raise ExpressionSyntaxError(message, self.text, self._peek()[2] if position is None else position)

    def _take(self, expected: str = None):
        kind, value, _ = self._peek()
        if kind is None or (expected is not None and value != expected):
            self._fail(f"expected {expected or 'a token'}, found {value or 'end of input'}")
        self.i += 1
        return value

    def parse(self) -> TrigPoly:
        if not self.tokens:
            self._fail("empty expression")
        result = self._expr()
        if self._peek()[0] is not None:
            self._fail(f"unexpected {self._peek()[1]!r}")
        return result

    def _expr(self) -> TrigPoly:
        result = self._term()
        while self._peek()[1] in ("+", "-"):
            if self._take() == "+":
                result = result + self._term()
            else:
                result = result - self._term()
        return result

    def _starts_primary(self) -> bool:
        kind, value, _ = self._peek()
        return kind in (1, 2) or value == "("

    def _term(self) -> TrigPoly:
        result = self._unary()
        while self._peek()[1] in ("*", "/") or self._starts_primary():
            operator = self._take() if self._peek()[1] in ("*", "/") else "*"
            position = self._peek()[2]
            operand = self._unary()
            if operator == "*":
                result = result * operand
                continue
            try:
                result = result / operand
            except PreconditionError as e:
                self._fail(str(e), position)
        return result

    def _unary(self) -> TrigPoly:
        if self._peek()[1] == "-":
            self._take()
            return -self._unary()
        if self._peek()[1] == "+":
            self._take()
            return self._unary()
        return self._power()

    def _power(self) -> TrigPoly:
        base = self._primary()
        if self._peek()[1] not in ("^", "**"):
            return base
        self._take()
        sign = 1
        if self._peek()[1] == "-":
            self._take()
            sign = -1
        kind, value, position = self._peek()
        if kind != 1 or not value.isdigit():
            self._fail("exponent must be an integer")
        self._take()
        exponent = int(value)
        if exponent > MAX_POWER:
            self._fail(f"exponent above {MAX_POWER}", position)
        if sign < 0:
            if len(base.spectrum()) != 1:
                self._fail("negative powers apply to single terms only", position)
            (k, c), = base.coeffs.items()
            return TrigPoly.monomial(-k * exponent, c ** (-exponent))
        result = TrigPoly.constant(1.0)
        for _ in range(exponent):
            result = result * base
        return result

    def _primary(self) -> TrigPoly:
        kind, value, position = self._peek()
        if kind is None:
            self._fail("expected a term, found end of input")
        if kind == 1:
            self._take()
            return TrigPoly.constant(float(value))
        if value == "(":
            self._take()
            result = self._expr()
            self._take(")")
            return result
        if kind != 2:
            self._fail(f"unexpected {value!r}")
        self._take()
        if value == "z":
            return TrigPoly.monomial(1)
        if value == "zbar":
            return TrigPoly.monomial(-1)
        if value in _CONSTANTS:
            return TrigPoly.constant(_CONSTANTS[value])
        if value in _FUNCTIONS:
            self._take("(")
            inner = self._expr()
            self._take(")")
            return inner.real_part() if value == "re" else inner.conj()
        self._fail(f"unknown name {value!r}", position)
