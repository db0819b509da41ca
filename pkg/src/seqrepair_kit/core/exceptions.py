from typing import Optional, Dict, Any


class SeqRepairError(Exception):
    """
    Base exception for every error raised by the kit.

    Args:
        message (str): Error message
        field_name (Optional[str]): Name of the field, parameter or op that caused the error
        params (Optional[Dict[str, Any]]): Additional parameters for error formatting

    Examples:
        >>> raise SeqRepairError("Empty batch")
        >>> raise SeqRepairError("Must be positive", field_name="clip")
        >>> raise SeqRepairError("Expected {expected} rows, got {got}", params={"expected": 3, "got": 2})
    """

    def __init__(
        self,
        message: str,
        field_name: Optional[str] = None,
        params: Optional[Dict[str, Any]] = None,
    ) -> None:
        self.message = message
        self.field_name = field_name
        self.params = params or {}

        # Format message with params if provided
        if self.params:
            self.message = self.message.format(**self.params)

        super().__init__(self.message)

    def __str__(self) -> str:
        """Return formatted error message."""
        if self.field_name:
            return f"{self.field_name}: {self.message}"
        return self.message


class ContractViolation(SeqRepairError, ValueError):
    """Raised when an operation's precondition (shape, length, emptiness) is broken."""
    pass


class TokenIndexError(SeqRepairError, IndexError):
    """Raised when a token id or target index falls outside the vocabulary."""
    pass


class ConfigurationError(SeqRepairError):
    """Raised for invalid hyperparameters, unknown modes or incompatible vocabularies."""
    pass


class UnsupportedGrammarError(SeqRepairError):
    """Raised when a grammar's language is infinite."""
    pass


class DataError(SeqRepairError):
    """
    Raised for unreadable or inconsistent dataset files.

    Args:
        message (str): Error message
        path (Optional[str]): Offending file
    """

    def __init__(self, message: str, path: Optional[str] = None, **kwargs: Any) -> None:
        self.path = path
        super().__init__(message, **kwargs)

    def __str__(self) -> str:
        base = super().__str__()
        return f"{base} [{self.path}]" if self.path else base


class GradientCheckError(SeqRepairError):
    """Raised when a gradient check meets a non-finite intermediate value."""
    pass


class TrainingDivergedError(SeqRepairError):
    """
    Raised when a loss becomes NaN or infinite during training.

    Args:
        message (str): Error message
        batch_index (int): Index of the batch inside the epoch
        epoch (int): Epoch counter when the divergence happened
    """

    def __init__(self, message: str, batch_index: int, epoch: int = 0) -> None:
        self.batch_index = batch_index
        self.epoch = epoch
        super().__init__(
            "{message} (epoch {epoch}, batch {batch})",
            params={"message": message, "epoch": epoch, "batch": batch_index},
        )


class CheckpointError(SeqRepairError):
    """Raised when a checkpoint file is malformed or has an unknown version."""
    pass
