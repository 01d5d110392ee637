from typing import List, Tuple

from infrastructure.errors import DomainError
from infrastructure.logger import get_logger

logger = get_logger(__name__)


def parse_range(text: str) -> Tuple[float, float]:
    """
    Parses a "min:max" range such as "1e-3:0.5".

    Args:
        text (str): range literal.

    Returns:
        Tuple[float, float]: (min, max) with min < max.
    """
    parts = str(text).split(":")
    if len(parts) != 2:
        raise DomainError(f"range must look like min:max, got {text!r}")
    try:
        low, high = float(parts[0]), float(parts[1])
    except ValueError:
        raise DomainError(f"range bounds must be numbers, got {text!r}")
    if not low < high:
        raise DomainError(f"range needs min < max, got {text!r}")
    return low, high


def parse_float_list(text: str) -> List[float]:
    """Comma-separated floats, e.g. "0.25,0.5,0.75,1.0"."""
    values = []
    for item in str(text).split(","):
        item = item.strip()
        if not item:
            continue
        try:
            values.append(float(item))
        except ValueError:
            raise DomainError(f"not a number: {item!r}")
    if not values:
        raise DomainError("expected at least one value")
    return values


def parse_grid(text: str) -> Tuple[int, int]:
    """Grid shape "DxR": D delta columns by R rho levels."""
    parts = str(text).lower().split("x")
    if len(parts) != 2 or not all(p.strip().isdigit() for p in parts):
        raise DomainError(f"grid must look like 12x12, got {text!r}")
    rows, cols = int(parts[0]), int(parts[1])
    if rows < 1 or cols < 1:
        raise DomainError(f"grid dimensions must be positive, got {text!r}")
    return rows, cols
