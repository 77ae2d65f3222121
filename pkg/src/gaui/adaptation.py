"""Size-band selection with hysteresis.

The adaptive interface is a three-state switcher over SMALL / MEDIUM / LARGE.
Raw thresholds sit between the bands (30 and 35 cm by default); a spatial
buffer around each threshold (default +/- 2 cm) means a band switch happens
only once the reading is beyond threshold-plus-buffer, and the reverse switch
only after crossing the opposite side. There is no temporal debounce: the
hysteresis is purely spatial.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from enum import Enum

from .errors import StreamOrderError
from .geometry import clamp_distance

DEFAULT_THRESHOLDS_CM = (30.0, 35.0)
DEFAULT_BUFFER_CM = 2.0


class Band(Enum):
    SMALL = "small"
    MEDIUM = "medium"
    LARGE = "large"

    @property
    def reference_distance_cm(self) -> float:
        """Median of the distance band this size was designed for."""
        return _REFERENCE_CM[self]

    def __str__(self) -> str:  # pragma: no cover - cosmetic
        return self.value


_REFERENCE_CM = {Band.SMALL: 27.0, Band.MEDIUM: 32.0, Band.LARGE: 37.0}
_ORDER = [Band.SMALL, Band.MEDIUM, Band.LARGE]


class InterfaceType(Enum):
    STATIC_SMALL = "static-small"
    STATIC_MEDIUM = "static-medium"
    STATIC_LARGE = "static-large"
    ADAPTIVE = "adaptive"

    def __str__(self) -> str:  # pragma: no cover - cosmetic
        return self.value


_STATIC_BAND = {
    InterfaceType.STATIC_SMALL: Band.SMALL,
    InterfaceType.STATIC_MEDIUM: Band.MEDIUM,
    InterfaceType.STATIC_LARGE: Band.LARGE,
}


@dataclass(frozen=True)
class AdaptationEvent:
    t_ms: int
    from_band: Band
    to_band: Band

    def to_json(self) -> dict:
        return {"t_ms": self.t_ms, "from": self.from_band.value, "to": self.to_band.value}

    def to_json_line(self) -> str:
        return json.dumps(self.to_json())


def init_band(
    distance_cm: float,
    thresholds_cm: tuple[float, float] = DEFAULT_THRESHOLDS_CM,
) -> Band:
    """Band whose half-open raw interval contains the first valid reading.

    No hysteresis at startup: d < t1 -> SMALL, t1 <= d < t2 -> MEDIUM,
    d >= t2 -> LARGE.
    """
    d = clamp_distance(distance_cm)
    t1, t2 = thresholds_cm
    if d < t1:
        return Band.SMALL
    if d < t2:
        return Band.MEDIUM
    return Band.LARGE


@dataclass
class AdaptationController:
    """Tracks the current size band over a stream of distance readings.

    Single-writer: updates must arrive in strictly increasing timestamp
    order. Distinct controllers are independent.
    """

    current: Band
    thresholds_cm: tuple[float, float] = DEFAULT_THRESHOLDS_CM
    buffer_cm: float = DEFAULT_BUFFER_CM
    event_log: list[AdaptationEvent] = field(default_factory=list)
    _last_t_ms: int | None = field(default=None, repr=False)

    def __post_init__(self) -> None:
        t1, t2 = self.thresholds_cm
        if not t1 < t2:
            raise ValueError(f"thresholds must be ordered, got {self.thresholds_cm}")
        if self.buffer_cm < 0:
            raise ValueError(f"buffer must be non-negative, got {self.buffer_cm}")
        if not self.buffer_cm < (t2 - t1) / 2.0:
            raise ValueError(
                f"buffer {self.buffer_cm} cm would make bands overlap into ambiguity "
                f"(must be < {(t2 - t1) / 2.0})"
            )

    @classmethod
    def from_distance(
        cls,
        distance_cm: float,
        thresholds_cm: tuple[float, float] = DEFAULT_THRESHOLDS_CM,
        buffer_cm: float = DEFAULT_BUFFER_CM,
    ) -> "AdaptationController":
        return cls(
            current=init_band(distance_cm, thresholds_cm),
            thresholds_cm=thresholds_cm,
            buffer_cm=buffer_cm,
        )

    def update(self, distance_cm: float, t_ms: int) -> AdaptationEvent | None:
        """Apply one reading; return the adaptation event if the band changed.

        Switch-up requires d >= threshold + buffer, switch-down requires
        d <= threshold - buffer (both inclusive). A reading past the far
        buffer jumps two bands in a single logged event.
        """
        if self._last_t_ms is not None and t_ms <= self._last_t_ms:
            raise StreamOrderError(
                f"distance reading at t={t_ms} ms not after previous t={self._last_t_ms} ms"
            )
        self._last_t_ms = t_ms
        d = clamp_distance(distance_cm)
        target = self._target_band(d)
        if target is self.current:
            return None
        event = AdaptationEvent(t_ms=t_ms, from_band=self.current, to_band=target)
        self.current = target
        self.event_log.append(event)
        return event

    def _target_band(self, d: float) -> Band:
        t1, t2 = self.thresholds_cm
        b = self.buffer_cm
        if self.current is Band.SMALL:
            if d >= t2 + b:
                return Band.LARGE
            if d >= t1 + b:
                return Band.MEDIUM
            return Band.SMALL
        if self.current is Band.MEDIUM:
            if d >= t2 + b:
                return Band.LARGE
            if d <= t1 - b:
                return Band.SMALL
            return Band.MEDIUM
        # LARGE
        if d <= t1 - b:
            return Band.SMALL
        if d <= t2 - b:
            return Band.MEDIUM
        return Band.LARGE

    def replay_band(self, initial: Band) -> Band:
        """Reconstruct the current band purely from the event history."""
        band = initial
        for event in self.event_log:
            band = event.to_band
        return band


def band_for_interface(
    interface: InterfaceType,
    distance_cm: float,
    controller: AdaptationController | None = None,
) -> Band:
    """Band an interface type presents at a given distance.

    Static types ignore the distance entirely; the adaptive type reports the
    controller's current band, or the init rule when no controller exists yet.
    """
    if interface is InterfaceType.ADAPTIVE:
        if controller is not None:
            return controller.current
        return init_band(distance_cm)
    return _STATIC_BAND[interface]
