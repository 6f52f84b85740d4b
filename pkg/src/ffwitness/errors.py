"""Exception hierarchy shared by the library and the CLI."""


class FFError(Exception):
    pass


class UsageError(FFError, ValueError):
    """Bad arguments or violated preconditions."""


class ParseError(UsageError):
    def __init__(self, message: str, position: int | None = None, text: str | None = None):
        self.message = message
        self.position = position
        self.text = text
        super().__init__(self._render())

    def _render(self) -> str:
        if self.position is None:
            return self.message
        out = f"{self.message} at position {self.position}"
        if self.text is not None:
            out += f"\n  {self.text}\n  {' ' * self.position}^"
        return out


class EvaluationError(FFError, ArithmeticError):
    """Numerical evaluation failed (zero denominator, quadrature, ...)."""


class NoWitnessError(FFError):
    """The second derivative vanishes at the chosen point; no witness exists."""


class BoundConstructionError(FFError, RuntimeError):
    """An emitted bound failed its own validation; indicates a bug."""
