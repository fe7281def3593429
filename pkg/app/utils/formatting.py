import math
from typing import Iterable, Sequence


SIGNIFICANT_DIGITS = 9


def format_number(value: float | int | None, digits: int = SIGNIFICANT_DIGITS) -> str:
    """Number with `digits` significant digits; empty for missing values."""
    if value is None:
        return ""
    if isinstance(value, float) and math.isnan(value):
        return "nan"
    return f"{value:.{digits}g}"


def parse_number(text: str) -> float | None:
    if text == "":
        return None
    return float(text)


def format_us(ticks: float | int | None) -> str:
    """Nanosecond ticks shown in microseconds."""
    if ticks is None:
        return "-"
    return f"{ticks / 1000:.3f}us"


def format_probability(value: float | None) -> str:
    if value is None or math.isnan(value):
        return "-"
    return f"{value:.6f}"


def format_interval(low: float, high: float, digits: int = 6) -> str:
    if math.isnan(low) or math.isnan(high):
        return "[-]"
    return f"[{low:.{digits}g}, {high:.{digits}g}]"


def format_table(headers: Sequence[str], rows: Iterable[Sequence[str]]) -> str:
    """
    Aligned plain-text table. Example:
    quantity  subject
    adf       device:1
    """
    rows = [list(row) for row in rows]
    widths = [len(header) for header in headers]
    for row in rows:
        for position, cell in enumerate(row):
            widths[position] = max(widths[position], len(cell))
    lines = ["  ".join(header.ljust(width) for header, width in zip(headers, widths)).rstrip()]
    for row in rows:
        lines.append("  ".join(cell.ljust(width) for cell, width in zip(row, widths)).rstrip())
    return "\n".join(lines)
