"""Per-target dwell-selection state machine.

A dwell starts when a valid gaze sample lands on a target. From then on every
sample, valid or not, counts toward the window total; only valid samples on
the dwelled target count as in-target. The dwell survives as long as the
running in-target fraction stays at or above the threshold fraction (0.70 by
default); the moment it drops below, the dwell is cancelled and the gaze must
re-enter the target to start over. Activation fires on the first sample at or
past the per-target time threshold, provided the fraction guard still holds.

After an activation the machine is refractory for that target: a fresh dwell
on it requires the gaze to leave it first. This blocks repeat-fire while the
gaze keeps resting on the just-activated target.

Sample validity rules:
  * an invalid sample (tracker produced no estimate) never starts a dwell and
    never counts in-target, but it does count toward the window total;
  * refractory exit compares the raw geometric hit, whatever the validity.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from enum import Enum

from .errors import StreamOrderError

DEFAULT_IN_TARGET_FRACTION = 0.70
DEFAULT_SAMPLE_RATE_HZ = 30.0
TRACK_DWELL_MS = 1000
CONTROL_DWELL_MS = 500


@dataclass(frozen=True)
class GazeSample:
    """One tracker frame: screen coordinates plus optional distance reading.

    Coordinates may fall outside the screen (tracker noise) and are kept
    as-is. ``valid=False`` marks frames where the tracker produced no
    estimate.
    """

    t_ms: int
    x_px: float
    y_px: float
    distance_cm: float | None = None
    valid: bool = True

    def to_json(self) -> dict:
        doc: dict = {"t_ms": self.t_ms, "x_px": self.x_px, "y_px": self.y_px}
        if self.distance_cm is not None:
            doc["distance_cm"] = self.distance_cm
        if not self.valid:
            doc["valid"] = False
        return doc

    @classmethod
    def from_json(cls, doc: dict) -> "GazeSample":
        return cls(
            t_ms=int(doc["t_ms"]),
            x_px=float(doc["x_px"]),
            y_px=float(doc["y_px"]),
            distance_cm=None if doc.get("distance_cm") is None else float(doc["distance_cm"]),
            valid=bool(doc.get("valid", True)),
        )


@dataclass(frozen=True)
class DwellParams:
    threshold_ms: int
    in_target_fraction: float = DEFAULT_IN_TARGET_FRACTION
    sample_rate_hz: float = DEFAULT_SAMPLE_RATE_HZ

    def __post_init__(self) -> None:
        if self.threshold_ms <= 0:
            raise ValueError(f"dwell threshold must be positive, got {self.threshold_ms}")
        if not (0.0 < self.in_target_fraction <= 1.0):
            raise ValueError(f"in-target fraction must be in (0, 1], got {self.in_target_fraction}")


@dataclass(frozen=True)
class TargetHit:
    """Result of hit-testing one sample: which target, and its dwell threshold."""

    target_id: str
    threshold_ms: int


class DwellEventKind(Enum):
    STARTED = "started"
    PROGRESS = "progress"
    CANCELLED = "cancelled"
    ACTIVATED = "activated"

    def __str__(self) -> str:  # pragma: no cover - cosmetic
        return self.value


@dataclass(frozen=True)
class DwellEvent:
    """Feedback event.

    ``fraction`` is the elapsed fraction of the threshold for STARTED and
    PROGRESS, and the final in-target fraction for CANCELLED and ACTIVATED.
    """

    kind: DwellEventKind
    target_id: str
    t_ms: int
    fraction: float

    def to_json(self) -> dict:
        return {
            "t_ms": self.t_ms,
            "kind": self.kind.value,
            "target": self.target_id,
            "fraction": self.fraction,
        }

    def to_json_line(self) -> str:
        return json.dumps(self.to_json())


class _State(Enum):
    IDLE = "idle"
    DWELLING = "dwelling"
    REFRACTORY = "refractory"


@dataclass
class DwellMachine:
    """Sequential dwell tracker for one interactive session.

    Feed samples in non-decreasing timestamp order together with the raw
    hit-test result for each sample. At most one target is dwelled at a time;
    a sample consumed by a cancellation does not immediately start a dwell on
    whatever it hit (re-entry happens on the next sample).
    """

    in_target_fraction: float = DEFAULT_IN_TARGET_FRACTION

    _state: _State = field(default=_State.IDLE, repr=False)
    _target_id: str | None = field(default=None, repr=False)
    _threshold_ms: int = field(default=0, repr=False)
    _start_ms: int = field(default=0, repr=False)
    _n_in: int = field(default=0, repr=False)
    _n_total: int = field(default=0, repr=False)
    _last_t_ms: int | None = field(default=None, repr=False)

    @property
    def state_name(self) -> str:
        return self._state.value

    @property
    def dwelled_target(self) -> str | None:
        return self._target_id if self._state is _State.DWELLING else None

    def reset(self) -> None:
        """Unconditionally return to IDLE. Used at trial and page boundaries."""
        self._state = _State.IDLE
        self._target_id = None
        self._threshold_ms = 0
        self._start_ms = 0
        self._n_in = 0
        self._n_total = 0

    def feed(self, sample: GazeSample, hit: TargetHit | None) -> list[DwellEvent]:
        """Consume one sample and return the feedback events it produced."""
        if self._last_t_ms is not None and sample.t_ms < self._last_t_ms:
            raise StreamOrderError(
                f"gaze sample at t={sample.t_ms} ms precedes previous t={self._last_t_ms} ms"
            )
        self._last_t_ms = sample.t_ms

        if self._state is _State.REFRACTORY:
            if hit is not None and hit.target_id == self._target_id:
                return []
            # Gaze left the activated target: re-arm and treat this sample as idle.
            self._state = _State.IDLE
            self._target_id = None

        if self._state is _State.IDLE:
            if hit is not None and sample.valid:
                self._state = _State.DWELLING
                self._target_id = hit.target_id
                self._threshold_ms = hit.threshold_ms
                self._start_ms = sample.t_ms
                self._n_in = 1
                self._n_total = 1
                return [DwellEvent(DwellEventKind.STARTED, hit.target_id, sample.t_ms, 0.0)]
            return []

        # DWELLING
        assert self._target_id is not None
        self._n_total += 1
        if sample.valid and hit is not None and hit.target_id == self._target_id:
            self._n_in += 1
        fraction_in = self._n_in / self._n_total
        target_id = self._target_id

        if fraction_in < self.in_target_fraction:
            self.reset()
            return [DwellEvent(DwellEventKind.CANCELLED, target_id, sample.t_ms, fraction_in)]

        elapsed = sample.t_ms - self._start_ms
        if elapsed >= self._threshold_ms:
            self._state = _State.REFRACTORY
            self._n_in = 0
            self._n_total = 0
            return [DwellEvent(DwellEventKind.ACTIVATED, target_id, sample.t_ms, fraction_in)]

        return [
            DwellEvent(
                DwellEventKind.PROGRESS, target_id, sample.t_ms, elapsed / self._threshold_ms
            )
        ]


def replay_dwell(
    trace: list[tuple[GazeSample, TargetHit | None]],
    in_target_fraction: float = DEFAULT_IN_TARGET_FRACTION,
) -> list[DwellEvent]:
    """Run a fresh machine over a recorded (sample, hit) trace."""
    machine = DwellMachine(in_target_fraction=in_target_fraction)
    events: list[DwellEvent] = []
    for sample, hit in trace:
        events.extend(machine.feed(sample, hit))
    return events
