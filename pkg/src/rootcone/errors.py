class RootConeError(Exception):
    pass


class CounterexampleFound(RootConeError):
    """An instance with nonempty support has no strict solution.

    ``certificate`` holds the Gordan multipliers (one per row, chamber rows last).
    """

    def __init__(self, message: str, word=(), certificate=None):
        super().__init__(message)
        self.word = tuple(word)
        self.certificate = certificate


class StrategyUnavailable(RootConeError):
    pass


class GridExhausted(RootConeError):
    pass


class RecipeFailure(RootConeError):
    """A case-derived witness did not pass full re-verification."""
