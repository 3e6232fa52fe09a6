class InvalidArgument(ValueError):
    pass


class UnsupportedSize(RuntimeError):
    """Raised when an exact procedure would exceed its size or time budget."""


class UnsupportedRecord(ValueError):
    pass


class InvalidParams(ValueError):
    pass


class StrategyError(RuntimeError):
    """A strategy raised while choosing moves; carries the round number."""

    def __init__(self, round_no: int, cause: BaseException):
        super().__init__(f"strategy failed in round {round_no}: {cause!r}")
        self.round = round_no
