class ConfigError(ValueError):
    """Invalid run or generator configuration."""


class EdgeListParseError(ValueError):
    def __init__(self, lineno: int, message: str):
        self.lineno = lineno
        where = f"line {lineno}: " if lineno else ""
        super().__init__(f"{where}{message}")


class BinCorruptionError(RuntimeError):
    """A bin's stream framing does not match its mode tag."""
