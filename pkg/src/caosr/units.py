"""Simulated-time units.

All internal times are integer microseconds so that the timing sum
identities checked by the metrics engine hold exactly.
"""

US_PER_MS = 1_000
US_PER_S = 1_000_000


def ms(value: float) -> int:
    """Milliseconds to integer microseconds."""
    return round(value * US_PER_MS)


def seconds(value: float) -> int:
    """Seconds to integer microseconds."""
    return round(value * US_PER_S)


def to_ms(value_us: int) -> float:
    return value_us / US_PER_MS

def to_s(value_us: int) -> float:
    return value_us / US_PER_S
