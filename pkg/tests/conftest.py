"""Shared trace-building helpers for the test suite."""

from __future__ import annotations

import math

from gaui.dwell import GazeSample, TargetHit


def t30(index: int) -> int:
    """Timestamp of the index-th sample of a 30 Hz stream, in integer ms."""
    return int(math.floor(index * 1000.0 / 30.0 + 0.5))


def hit_trace(pattern: list[str | None], threshold_ms: int = 500,
              start_index: int = 0) -> list[tuple[GazeSample, TargetHit | None]]:
    """Build a 30 Hz (sample, hit) trace from a list of target ids / None."""
    trace = []
    for i, target in enumerate(pattern):
        sample = GazeSample(t_ms=t30(start_index + i), x_px=0.0, y_px=0.0)
        hit = None if target is None else TargetHit(target, threshold_ms)
        trace.append((sample, hit))
    return trace
