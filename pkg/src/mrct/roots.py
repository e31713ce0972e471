"""Root finding for monotone CP curves and the 3-decimal reporting rule."""

from __future__ import annotations

import math
from typing import Callable

from scipy import optimize

BRACKET_WIDTH = 1e-7
REPORT_STEP = 1e-3


def crossing_point(
    fn: Callable[[float], float],
    target: float,
    lo: float,
    hi: float,
    width: float = BRACKET_WIDTH,
) -> float:
    """Point where an increasing ``fn`` crosses ``target`` (Brent's method).

    Assumes ``fn(lo) < target <= fn(hi)``; the result is within ``width``
    of the crossing, so callers reporting on a grid re-check neighbours.
    """
    return float(optimize.brentq(lambda x: fn(x) - target, lo, hi, xtol=width))


def round_up_to_grid(
    fn: Callable[[float], float],
    target: float,
    root: float,
    lo: float,
    hi: float,
    step: float = REPORT_STEP,
) -> tuple[float, float]:
    """Smallest multiple of ``step`` in ``[lo, hi]`` where ``fn >= target``.

    Starts from the grid point just above ``root`` and walks at most a step
    or two to absorb bracket slack. A grid point beyond ``hi`` is clipped to
    ``hi``. Returns ``(value, fn(value))``.
    """
    n = math.ceil(root / step - 1e-9)
    value = min(max(n * step, lo), hi)
    while value - step >= lo and fn(value - step) >= target:
        value -= step
    while value + step <= hi and fn(value) < target:
        value += step
    value = round(value, 12)
    return value, fn(value)


def first_grid_index(
    fn: Callable[[int], float],
    target: float,
    lo: int,
    hi: int,
) -> int | None:
    """First integer ``i`` in ``[lo, hi]`` with ``fn(i) >= target``, scanning
    upward; ``None`` if there is none.

    Makes no monotonicity assumption, at the price of one evaluation per
    grid point; meant for step-shaped curves from integer sample sizes.
    """
    for i in range(lo, hi + 1):
        if fn(i) >= target:
            return i
    return None
