class GraphValidationError(ValueError):
    pass


class EdgeListParseError(ValueError):
    def __init__(self, lineno: int, message: str):
        super().__init__(f"line {lineno}: {message}")
        self.lineno = lineno


class MLOverflowError(OverflowError):
    """A Mittag-Leffler value (or a trace built from one) exceeds float range."""
