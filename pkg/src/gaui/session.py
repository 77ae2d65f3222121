"""Trial and live-session orchestration.

A session owns the full wiring: distance readings feed the adaptation
controller (adaptive interface only), gaze samples are hit-tested against the
current page and drive the dwell machine, and dwell activations move pages,
toggle playback, or play tracks. Trial sessions add a task, a timeout, and
derived metrics; live sessions run open-ended and schedule the in-app
reflection prompt thirty seconds after the first adaptation.

Where the log matters, conventions are:
  * pages are 0-based in events and player state;
  * dwell STARTED / CANCELLED / ACTIVATED land in the event log, per-frame
    PROGRESS events are returned to the caller but not logged;
  * an adaptation rebuilds the layout, clamps the current page into the new
    page count and cancels any in-flight dwell, because target rectangles
    move under the gaze.
"""

from __future__ import annotations

import json
import random
import statistics
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable

from .adaptation import (
    AdaptationController,
    Band,
    InterfaceType,
    band_for_interface,
)
from .dwell import DwellEvent, DwellEventKind, DwellMachine, GazeSample
from .errors import ConfigurationError
from .geometry import DEFAULT_PROFILE, DisplayProfile
from .layout import (
    DEFAULT_CHROME,
    ChromeConfig,
    LayoutModel,
    NAV_LEFT_ID,
    NAV_RIGHT_ID,
    PLAY_PAUSE_ID,
    Playlist,
    hit_test,
    layout_for_band,
    page_of_track,
)

DEFAULT_TIMEOUT_MS = 60_000
ESM_DELAY_MS = 30_000

# Hard tasks anchor on the page that holds this 1-based playlist position.
HARD_ANCHOR_TRACK = 10


class DistanceBand(Enum):
    """Instructed face-to-screen range, or free movement."""

    CM_25_29 = "25-29"
    CM_30_34 = "30-34"
    CM_35_39 = "35-39"
    FREE = "free"

    @property
    def median_cm(self) -> float:
        return {"25-29": 27.0, "30-34": 32.0, "35-39": 37.0, "free": 32.0}[self.value]

    @property
    def range_cm(self) -> tuple[float, float] | None:
        if self is DistanceBand.FREE:
            return None
        lo, hi = self.value.split("-")
        return float(lo), float(hi)

    def __str__(self) -> str:  # pragma: no cover - cosmetic
        return self.value


class Difficulty(Enum):
    EASY = "easy"
    HARD = "hard"

    def __str__(self) -> str:  # pragma: no cover - cosmetic
        return self.value


class Outcome(Enum):
    SUCCESS = "success"
    TIMEOUT = "timeout"


@dataclass(frozen=True)
class TrialConfig:
    interface: InterfaceType
    distance_band: DistanceBand
    difficulty: Difficulty
    seed: int
    timeout_ms: int = DEFAULT_TIMEOUT_MS

    def __post_init__(self) -> None:
        if self.timeout_ms <= 0:
            raise ValueError(f"timeout must be positive, got {self.timeout_ms}")

    def to_json(self) -> dict:
        return {
            "interface": self.interface.value,
            "distance_band": self.distance_band.value,
            "difficulty": self.difficulty.value,
            "seed": self.seed,
            "timeout_ms": self.timeout_ms,
        }

    @classmethod
    def from_json(cls, doc: dict) -> "TrialConfig":
        return cls(
            interface=InterfaceType(doc["interface"]),
            distance_band=DistanceBand(doc["distance_band"]),
            difficulty=Difficulty(doc["difficulty"]),
            seed=int(doc["seed"]),
            timeout_ms=int(doc.get("timeout_ms", DEFAULT_TIMEOUT_MS)),
        )


@dataclass(frozen=True)
class TaskSpec:
    """What the participant must do: play the 1-based target track."""

    target_track: int
    start_page: int = 1  # 1-based; trials always start on the first page

    def to_json(self) -> dict:
        return {"target_track": self.target_track, "start_page": self.start_page}


class SessionEventKind(Enum):
    DWELL = "dwell"
    PAGE_CHANGED = "page_changed"
    ADAPTATION = "adaptation"
    TRACK_PLAYED = "track_played"
    PLAY_PAUSE = "play_pause"
    ESM_PROMPT = "esm_prompt"
    ESM_ANSWER = "esm_answer"
    SUCCESS = "success"
    TIMEOUT = "timeout"


@dataclass(frozen=True)
class SessionEvent:
    t_ms: int
    kind: SessionEventKind
    data: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {"t_ms": self.t_ms, "kind": self.kind.value, **self.data}

    def to_json_line(self) -> str:
        return json.dumps(self.to_json())


@dataclass
class PlayerState:
    current_page: int = 0  # 0-based
    playing: int | None = None  # 0-based playlist index
    paused: bool = False


class PlayerSession:
    """Open-ended adaptive media player driven by timestamped samples."""

    def __init__(
        self,
        interface: InterfaceType,
        playlist: Playlist,
        profile: DisplayProfile = DEFAULT_PROFILE,
        chrome: ChromeConfig = DEFAULT_CHROME,
        initial_distance_cm: float = 32.0,
        esm_enabled: bool = False,
    ) -> None:
        self.interface = interface
        self.playlist = playlist
        self.profile = profile
        self.chrome = chrome
        self.controller: AdaptationController | None = None
        if interface is InterfaceType.ADAPTIVE:
            self.controller = AdaptationController.from_distance(initial_distance_cm)
        self.band: Band = band_for_interface(interface, initial_distance_cm, self.controller)
        self.layout: LayoutModel = layout_for_band(self.band, profile, playlist, chrome)
        self.machine = DwellMachine()
        self.player = PlayerState()
        self.events: list[SessionEvent] = []
        self.esm_enabled = esm_enabled
        self._esm_deadline_ms: int | None = None
        self._esm_fired = False
        self.page_rendered_at_ms = 0

    # -- event plumbing ----------------------------------------------------

    def _log(self, event: SessionEvent) -> SessionEvent:
        self.events.append(event)
        return event

    def _maybe_fire_esm(self, now_ms: int, out: list[SessionEvent]) -> None:
        if (
            self.esm_enabled
            and not self._esm_fired
            and self._esm_deadline_ms is not None
            and now_ms >= self._esm_deadline_ms
        ):
            self._esm_fired = True
            out.append(
                self._log(SessionEvent(self._esm_deadline_ms, SessionEventKind.ESM_PROMPT))
            )

    # -- sample processing ---------------------------------------------------

    def _route_distance(self, t_ms: int, cm: float, out: list[SessionEvent]) -> None:
        if self.controller is None:
            return
        # The controller wants strictly increasing stamps; drop same-tick reads.
        if self.controller._last_t_ms is not None and t_ms <= self.controller._last_t_ms:
            return
        change = self.controller.update(cm, t_ms)
        if change is not None:
            out.append(self._apply_adaptation(change.t_ms, change.from_band, change.to_band))

    def apply_distance(self, t_ms: int, cm: float) -> list[SessionEvent]:
        """Feed a bare distance reading (no gaze), as the wire protocol does."""
        out: list[SessionEvent] = []
        self._maybe_fire_esm(t_ms, out)
        self._route_distance(t_ms, cm, out)
        return out

    def step(self, sample: GazeSample) -> list[SessionEvent]:
        out: list[SessionEvent] = []
        self._maybe_fire_esm(sample.t_ms, out)
        if sample.distance_cm is not None:
            self._route_distance(sample.t_ms, sample.distance_cm, out)

        hit = hit_test(self.layout, self.player.current_page, sample.x_px, sample.y_px)
        for dwell_event in self.machine.feed(sample, hit):
            event = SessionEvent(
                dwell_event.t_ms,
                SessionEventKind.DWELL,
                {
                    "dwell": dwell_event.kind.value,
                    "target": dwell_event.target_id,
                    "fraction": dwell_event.fraction,
                },
            )
            if dwell_event.kind is not DwellEventKind.PROGRESS:
                self._log(event)
            out.append(event)
            if dwell_event.kind is DwellEventKind.ACTIVATED:
                out.extend(self._activate(dwell_event))
        return out

    def _activate(self, event: DwellEvent) -> list[SessionEvent]:
        t = event.t_ms
        target = event.target_id
        if target in (NAV_LEFT_ID, NAV_RIGHT_ID):
            step = 1 if target == NAV_RIGHT_ID else -1
            from_page = self.player.current_page
            to_page = min(max(from_page + step, 0), self.layout.page_count - 1)
            self.player.current_page = to_page
            self.machine.reset()
            data = {"from_page": from_page, "to_page": to_page, "via": target}
            data.update(self._nav_annotations(t, from_page, to_page))
            self.page_rendered_at_ms = t
            return [self._log(SessionEvent(t, SessionEventKind.PAGE_CHANGED, data))]
        if target == PLAY_PAUSE_ID:
            self.player.paused = not self.player.paused
            return [
                self._log(
                    SessionEvent(t, SessionEventKind.PLAY_PAUSE, {"paused": self.player.paused})
                )
            ]
        # Track item.
        spec = self.layout.find_target(target)
        assert spec is not None and spec.track_index is not None
        self.player.playing = spec.track_index
        self.player.paused = False
        data = {"track_index": spec.track_index, "title": spec.title}
        data.update(self._track_annotations(spec.track_index))
        return [self._log(SessionEvent(t, SessionEventKind.TRACK_PLAYED, data))]

    def _nav_annotations(self, t_ms: int, from_page: int, to_page: int) -> dict:
        return {"since_render_ms": t_ms - self.page_rendered_at_ms}

    def _track_annotations(self, track_index: int) -> dict:
        return {}

    def _apply_adaptation(self, t_ms: int, from_band: Band, to_band: Band) -> SessionEvent:
        self.band = to_band
        self.layout = layout_for_band(to_band, self.profile, self.playlist, self.chrome)
        self.player.current_page = min(self.player.current_page, self.layout.page_count - 1)
        self.machine.reset()
        self.page_rendered_at_ms = t_ms
        if self.esm_enabled and self._esm_deadline_ms is None:
            self._esm_deadline_ms = t_ms + ESM_DELAY_MS
        return self._log(
            SessionEvent(
                t_ms,
                SessionEventKind.ADAPTATION,
                {"from": from_band.value, "to": to_band.value},
            )
        )

    def record_esm_answer(self, t_ms: int, answers: dict) -> SessionEvent:
        return self._log(SessionEvent(t_ms, SessionEventKind.ESM_ANSWER, {"answers": answers}))


class TrialSession(PlayerSession):
    """One task-driven trial: find and play the target track before timeout."""

    def __init__(
        self,
        config: TrialConfig,
        base_playlist: Playlist | None = None,
        profile: DisplayProfile = DEFAULT_PROFILE,
        chrome: ChromeConfig = DEFAULT_CHROME,
        initial_distance_cm: float | None = None,
        capture_samples: bool = False,
    ) -> None:
        base = base_playlist or Playlist()
        rng = random.Random(config.seed)
        shuffled = base.shuffled(rng)
        if initial_distance_cm is None:
            initial_distance_cm = config.distance_band.median_cm
        super().__init__(
            interface=config.interface,
            playlist=shuffled,
            profile=profile,
            chrome=chrome,
            initial_distance_cm=initial_distance_cm,
            esm_enabled=config.distance_band is DistanceBand.FREE,
        )
        self.config = config
        self.base_playlist = base
        self.task = self._assign_task(rng)
        self.outcome: Outcome | None = None
        self.out_of_band_samples = 0
        self.captured: list[GazeSample] | None = [] if capture_samples else None

    def _assign_task(self, rng: random.Random) -> TaskSpec:
        if self.config.difficulty is Difficulty.EASY:
            first_page = min(self.layout.items_per_page, self.playlist.count)
            return TaskSpec(target_track=rng.randint(1, first_page))
        page = page_of_track(self.layout, HARD_ANCHOR_TRACK)
        lo = (page - 1) * self.layout.items_per_page + 1
        hi = min(page * self.layout.items_per_page, self.playlist.count)
        return TaskSpec(target_track=rng.randint(lo, hi))

    @property
    def finished(self) -> bool:
        return self.outcome is not None

    def target_page(self) -> int:
        """0-based page of the target under the current layout."""
        return page_of_track(self.layout, self.task.target_track) - 1

    def step(self, sample: GazeSample) -> list[SessionEvent]:
        if self.finished:
            return []
        if self.captured is not None:
            self.captured.append(sample)
        if sample.t_ms >= self.config.timeout_ms:
            self.outcome = Outcome.TIMEOUT
            return [self._log(SessionEvent(self.config.timeout_ms, SessionEventKind.TIMEOUT))]
        band_range = self.config.distance_band.range_cm
        if (
            band_range is not None
            and sample.distance_cm is not None
            and not (band_range[0] <= sample.distance_cm <= band_range[1])
        ):
            # Phase-1 style enforcement: flag it, the clock keeps running.
            self.out_of_band_samples += 1
        out = super().step(sample)
        for event in out:
            if event.kind is SessionEventKind.TRACK_PLAYED and event.data.get("correct"):
                self.outcome = Outcome.SUCCESS
                out = out + [self._log(SessionEvent(event.t_ms, SessionEventKind.SUCCESS))]
                break
        return out

    def _nav_annotations(self, t_ms: int, from_page: int, to_page: int) -> dict:
        target_page = self.target_page()
        toward = abs(to_page - target_page) < abs(from_page - target_page)
        return {
            "since_render_ms": t_ms - self.page_rendered_at_ms,
            "toward_target": toward,
        }

    def _track_annotations(self, track_index: int) -> dict:
        return {"correct": track_index + 1 == self.task.target_track}

    def record(self) -> "TrialRecord":
        if not self.finished:
            raise ConfigurationError("trial still running; feed samples until success or timeout")
        return TrialRecord(
            config=self.config,
            task=self.task,
            events=tuple(self.events),
            outcome=self.outcome,
            out_of_band_samples=self.out_of_band_samples,
            samples=None if self.captured is None else tuple(self.captured),
            base_titles=self.base_playlist.titles,
        )


@dataclass(frozen=True)
class TrialRecord:
    """Everything one trial produced: config, task, event log, outcome."""

    config: TrialConfig
    task: TaskSpec
    events: tuple[SessionEvent, ...]
    outcome: Outcome
    out_of_band_samples: int = 0
    samples: tuple[GazeSample, ...] | None = None
    base_titles: tuple[str, ...] | None = None

    def to_json(self) -> dict:
        return {
            "config": self.config.to_json(),
            "task": self.task.to_json(),
            "outcome": self.outcome.value,
            "out_of_band_samples": self.out_of_band_samples,
            "events": [e.to_json() for e in self.events],
        }

    def trace_lines(self) -> Iterable[str]:
        """JSON-lines trace: a config header then one line per gaze sample."""
        if self.samples is None:
            raise ConfigurationError("trial was run without sample capture; nothing to export")
        header = {"type": "config", **self.config.to_json()}
        if self.base_titles is not None:
            header["playlist"] = list(self.base_titles)
        yield json.dumps(header)
        for sample in self.samples:
            yield json.dumps({"type": "sample", **sample.to_json()})


@dataclass(frozen=True)
class TrialMetrics:
    task_time_ms: int
    nav_time_ms: float | None
    track_errors: int
    pp_errors: int
    timeout: bool

    def to_json(self) -> dict:
        return {
            "task_time_ms": self.task_time_ms,
            "nav_time_ms": self.nav_time_ms,
            "track_errors": self.track_errors,
            "pp_errors": self.pp_errors,
            "timeout": self.timeout,
        }


def metrics(record: TrialRecord) -> TrialMetrics:
    """Derive the dependent measures from a completed trial record.

    Task time runs from the moment the list is shown (t=0) to the correct
    track playing; timeouts are capped at the limit. Navigation time averages
    the page-render-to-activation latency of navigations that moved toward
    the target page; moves away stay in the log but not in the average.
    Play/pause errors are counted for hard trials only, over the whole
    pre-success portion.
    """
    success_t: int | None = None
    track_errors = 0
    pp_errors = 0
    nav_latencies: list[int] = []
    for event in record.events:
        if event.kind is SessionEventKind.TRACK_PLAYED:
            if event.data.get("correct"):
                success_t = event.t_ms
                break
            track_errors += 1
        elif event.kind is SessionEventKind.PLAY_PAUSE:
            pp_errors += 1
        elif event.kind is SessionEventKind.PAGE_CHANGED and event.data.get("toward_target"):
            nav_latencies.append(event.data["since_render_ms"])
    timed_out = record.outcome is Outcome.TIMEOUT
    task_time = record.config.timeout_ms if timed_out else success_t
    assert task_time is not None
    return TrialMetrics(
        task_time_ms=task_time,
        nav_time_ms=statistics.mean(nav_latencies) if nav_latencies else None,
        track_errors=track_errors,
        pp_errors=pp_errors if record.config.difficulty is Difficulty.HARD else 0,
        timeout=timed_out,
    )


def start_trial(
    config: TrialConfig,
    base_playlist: Playlist | None = None,
    profile: DisplayProfile = DEFAULT_PROFILE,
    chrome: ChromeConfig = DEFAULT_CHROME,
    initial_distance_cm: float | None = None,
    capture_samples: bool = False,
) -> TrialSession:
    """Seeded trial setup: shuffled playlist, assigned task, zeroed clocks."""
    return TrialSession(
        config,
        base_playlist=base_playlist,
        profile=profile,
        chrome=chrome,
        initial_distance_cm=initial_distance_cm,
        capture_samples=capture_samples,
    )


def replay_trace(
    lines: Iterable[str],
    profile: DisplayProfile = DEFAULT_PROFILE,
    chrome: ChromeConfig = DEFAULT_CHROME,
) -> TrialRecord:
    """Re-run a recorded trace (config header + sample lines) through a fresh trial."""
    it = iter(lines)
    try:
        header = json.loads(next(it))
    except StopIteration:
        raise ConfigurationError("empty trace") from None
    if header.get("type") != "config":
        raise ConfigurationError("trace must start with a config line")
    config = TrialConfig.from_json(header)
    playlist = Playlist(tuple(header["playlist"])) if "playlist" in header else Playlist()
    session = start_trial(config, base_playlist=playlist, profile=profile, chrome=chrome,
                          capture_samples=True)
    for line in it:
        line = line.strip()
        if not line:
            continue
        doc = json.loads(line)
        if doc.get("type") == "sample":
            session.step(GazeSample.from_json(doc))
        if session.finished:
            break
    if not session.finished:
        # Trace ended early: close the trial as a timeout at the limit.
        session.step(GazeSample(t_ms=config.timeout_ms, x_px=-1.0, y_px=-1.0, valid=False))
    return session.record()
