"""Number formatting utilities for terminal summaries."""

from typing import Optional


def format_speed(value: Optional[float], decimal_places: int = 3) -> str:
    """
    Format a speed in m/s.

    Args:
        value: Speed in m/s
        decimal_places: Number of decimal places

    Returns:
        Formatted speed string
    """
    if value is None:
        return "N/A"

    return f"{value:.{decimal_places}f} m/s"


def format_percent(value: Optional[float], decimal_places: int = 1) -> str:
    """
    Format a value that is already in percent (45.0 = 45%).

    Args:
        value: Percent value
        decimal_places: Number of decimal places

    Returns:
        Formatted percentage string
    """
    if value is None:
        return "N/A"

    return f"{value:.{decimal_places}f}%"


def format_fraction(value: Optional[float], decimal_places: int = 1) -> str:
    """
    Format a fraction as percent (0.62 = 62%).

    Args:
        value: Fraction in [0, 1]
        decimal_places: Number of decimal places

    Returns:
        Formatted percentage string
    """
    if value is None:
        return "N/A"

    return f"{value * 100:.{decimal_places}f}%"


def format_ratio(value: Optional[float], decimal_places: int = 3) -> str:
    if value is None:
        return "N/A"

    return f"{value:.{decimal_places}f}"


def format_seconds(value: Optional[float], decimal_places: int = 3) -> str:
    if value is None:
        return "N/A"

    return f"{value:.{decimal_places}f} s"


def format_scientific(value: Optional[float], decimal_places: int = 2) -> str:
    """Format small residuals and tolerances, e.g. ``3.20e-09``."""
    if value is None:
        return "N/A"

    return f"{value:.{decimal_places}e}"


def format_fall(fell: bool, fall_time: Optional[float] = None, reason: Optional[str] = None) -> str:
    """
    Describe the fall status of a run.

    Args:
        fell: Whether the run ended in a fall
        fall_time: Time of the fall
        reason: Cause reported by the simulator

    Returns:
        ``"walking"`` or ``"fell at 12.345 s (reason)"``
    """
    if not fell:
        return "walking"

    text = "fell"
    if fall_time is not None:
        text += f" at {format_seconds(fall_time)}"
    if reason:
        text += f" ({reason})"
    return text
