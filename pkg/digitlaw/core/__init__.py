from digitlaw.core.config import Settings, get_settings
from digitlaw.core.errors import (
    ColumnNotFoundError,
    DigitLawError,
    IngestError,
    InvalidParameterError,
    NoEligibleValuesError,
    WorkCapExceededError,
)

__all__ = [
    "ColumnNotFoundError",
    "DigitLawError",
    "IngestError",
    "InvalidParameterError",
    "NoEligibleValuesError",
    "Settings",
    "WorkCapExceededError",
    "get_settings",
]
