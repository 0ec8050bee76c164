#!/usr/bin/env python3
"""
Exception types raised by the ScoreCraft services.

Commands catch ScoreCraftError at the boundary and turn it into an exit code.
"""

from typing import Dict, List, Optional


class ScoreCraftError(Exception):
    """Base class for every error the library raises on purpose"""

    exit_code = 2


class InvalidInputError(ScoreCraftError):
    """Non-finite or otherwise unusable input values"""


class DomainError(ScoreCraftError):
    """Operation applied outside its mathematical domain"""


class ShapeError(DomainError):
    """Operand shapes do not conform"""


class ContractError(ScoreCraftError):
    """A caller broke an operation's precondition"""


class InvalidConfigError(ScoreCraftError):
    """Configuration values that cannot be used"""


class ConfigValidationError(InvalidConfigError):
    """Named validation failure with the JSON path of the offending value"""

    def __init__(self, code: str, path: str, message: str):
        self.code = code
        self.path = path
        self.message = message
        super().__init__(f"{code} at {path}: {message}")


class DegenerateScoresError(ScoreCraftError):
    """Scores without spread where a spread is required"""


class DegenerateFeatureError(ScoreCraftError):
    def __init__(self, column: str):
        self.column = column
        super().__init__(f"Feature column '{column}' is constant and cannot be normalized")


class DataParseError(ScoreCraftError):
    def __init__(self, row: int, column: str, value: str):
        self.row = row
        self.column = column
        self.value = value
        super().__init__(f"Non-numeric value '{value}' at row {row}, column '{column}'")


class DataFormatError(ScoreCraftError):
    """File layout problems (missing header, empty file)"""


class SchemaMismatchError(ScoreCraftError):
    def __init__(self, missing: List[str], extra: Optional[List[str]] = None):
        self.missing = list(missing)
        self.extra = list(extra or [])
        message = f"Missing columns: {', '.join(self.missing) or 'none'}"
        if self.extra:
            message += f"; extra columns: {', '.join(self.extra)}"
        super().__init__(message)


class MetricError(ScoreCraftError):
    """A metric cannot be computed for the given series"""


class DivergenceError(ScoreCraftError):
    exit_code = 3

    def __init__(self, step: int, components: Dict[str, float]):
        self.step = step
        self.components = dict(components)
        detail = ', '.join(f"{name}={value}" for name, value in self.components.items())
        super().__init__(f"Non-finite loss at step {step} ({detail})")
