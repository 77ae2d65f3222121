"""Synthetic participant: noisy gaze streams and posture distance dynamics.

The core premise of the model is that gaze error lives in angular units.
Fixation scatter is drawn in degrees and converted to pixels at the current
viewing distance, so a static interface loses effective angular size as the
user moves away while the adaptive interface keeps it constant. That single
assumption generates the qualitative interface contrasts; everything else is
search mechanics.

Agent policy ("intentional but noisy"): scan the current page's items top to
bottom, spending a lognormal inspect duration on each; when the sought track
is on screen, fixate it until it activates; otherwise deliberate briefly and
dwell the navigation button that moves toward the target page. The agent
never aims at a wrong target; every error comes from noisy samples landing on
a neighbour. Samples emitted mid-saccade are marked invalid (saccadic
suppression), and tracker frame loss is modelled as additional invalid
samples at a fixed probability.

A fixation is re-aimed (fresh offset draw, no saccade cost) whenever its
dwell is cancelled, whenever an unintended activation fires, and after a
stall of three dwell thresholds without any activation.
"""

from __future__ import annotations

import math
import random
import statistics
from dataclasses import dataclass, replace

from .adaptation import InterfaceType
from .dwell import GazeSample
from .geometry import DEFAULT_PROFILE, DisplayProfile, angle_to_px, clamp_distance
from .layout import DEFAULT_CHROME, ChromeConfig, Playlist, TargetSpec, track_id
from .seeding import stable_seed
from .session import (
    Difficulty,
    DistanceBand,
    SessionEventKind,
    TrialConfig,
    TrialRecord,
    TrialSession,
    metrics as trial_metrics,
    start_trial,
)

SAMPLE_RATE_HZ = 30.0
BOTTOM_REGION_FRACTION = 0.2
REFIXATE_THRESHOLDS = 3
# A non-intending reader reacts to the dwell feedback: once the outline has
# charged this far toward activation, the inspect is abandoned.
INSPECT_BAIL_PROGRESS = 0.6


def sample_time_ms(index: int, rate_hz: float = SAMPLE_RATE_HZ) -> int:
    return int(math.floor(index * 1000.0 / rate_hz + 0.5))


def duration_to_samples(duration_ms: float, rate_hz: float = SAMPLE_RATE_HZ) -> int:
    return max(1, int(math.floor(duration_ms * rate_hz / 1000.0 + 0.5)))


@dataclass(frozen=True)
class GazeNoiseModel:
    """Angular noise parameters for the synthetic tracker.

    The fixation sigma and the search model's inspect scale are the two
    calibrated values (fitted once against the default calibration targets);
    the rest are structural constants.
    """

    fixation_offset_sigma_deg: float = 0.825
    per_sample_jitter_sigma_deg: float = 0.35
    bottom_region_inflation: float = 1.5
    frame_drop_prob: float = 0.02

    def __post_init__(self) -> None:
        if self.fixation_offset_sigma_deg < 0 or self.per_sample_jitter_sigma_deg < 0:
            raise ValueError("noise sigmas must be non-negative")
        if self.bottom_region_inflation < 1.0:
            raise ValueError("bottom-region inflation must be >= 1")
        if not (0.0 <= self.frame_drop_prob <= 1.0):
            raise ValueError("frame drop probability must be in [0, 1]")

    def to_json(self) -> dict:
        return {
            "fixation_offset_sigma_deg": self.fixation_offset_sigma_deg,
            "per_sample_jitter_sigma_deg": self.per_sample_jitter_sigma_deg,
            "bottom_region_inflation": self.bottom_region_inflation,
            "frame_drop_prob": self.frame_drop_prob,
        }

    @classmethod
    def from_json(cls, doc: dict) -> "GazeNoiseModel":
        return cls(**{k: doc[k] for k in cls.__dataclass_fields__ if k in doc})


@dataclass(frozen=True)
class SearchModel:
    """Visual-search timing. Inspect durations are lognormal around the scale."""

    per_item_inspect_ms: float = 350.0  # geometric mean of the lognormal
    inspect_sigma: float = 0.4
    saccade_ms: float = 200.0
    decision_ms: float = 150.0

    def __post_init__(self) -> None:
        if min(self.per_item_inspect_ms, self.saccade_ms, self.decision_ms) <= 0:
            raise ValueError("search durations must be positive")
        if self.inspect_sigma < 0:
            raise ValueError("inspect sigma must be non-negative")

    def draw_inspect_ms(self, rng: random.Random) -> float:
        if self.inspect_sigma == 0:
            return self.per_item_inspect_ms
        return self.per_item_inspect_ms * math.exp(self.inspect_sigma * rng.gauss(0.0, 1.0))

    def to_json(self) -> dict:
        return {
            "per_item_inspect_ms": self.per_item_inspect_ms,
            "inspect_sigma": self.inspect_sigma,
            "saccade_ms": self.saccade_ms,
            "decision_ms": self.decision_ms,
        }

    @classmethod
    def from_json(cls, doc: dict) -> "SearchModel":
        return cls(**{k: doc[k] for k in cls.__dataclass_fields__ if k in doc})


# -- gaze trace agent ---------------------------------------------------------


class _Goal:
    INSPECT = "inspect"
    DECIDE = "decide"
    DWELL = "dwell"

    def __init__(self, kind: str, spec: TargetSpec | None = None):
        self.kind = kind
        self.spec = spec


class _Agent:
    """Closed-loop executor: emits samples, watches session events, re-plans."""

    def __init__(
        self,
        session: TrialSession,
        noise: GazeNoiseModel,
        search: SearchModel,
        rng: random.Random,
        distance_cm: float,
    ) -> None:
        self.session = session
        self.noise = noise
        self.search = search
        self.rng = rng
        self.distance_cm = distance_cm
        self.profile = session.profile
        self.i = 0  # next sample index
        self.gaze_point: tuple[float, float] | None = None
        self.plan: list[_Goal] = []
        self.replan = False

    # -- noise helpers

    def _deg_to_px(self, degrees: float) -> float:
        if degrees <= 0:
            return 0.0
        return angle_to_px(degrees, self.distance_cm, self.profile)

    def _inflation(self, spec: TargetSpec) -> float:
        threshold_y = (1.0 - BOTTOM_REGION_FRACTION) * self.profile.height_px
        return self.noise.bottom_region_inflation if spec.rect.center[1] >= threshold_y else 1.0

    def _aim(self, spec: TargetSpec) -> tuple[float, float]:
        sigma = self._deg_to_px(self.noise.fixation_offset_sigma_deg) * self._inflation(spec)
        cx, cy = spec.rect.center
        if sigma == 0:
            return (cx, cy)
        return (cx + self.rng.gauss(0.0, sigma), cy + self.rng.gauss(0.0, sigma))

    def _jittered(self, point: tuple[float, float], inflation: float) -> tuple[float, float]:
        sigma = self._deg_to_px(self.noise.per_sample_jitter_sigma_deg) * inflation
        if sigma == 0:
            return point
        return (point[0] + self.rng.gauss(0.0, sigma), point[1] + self.rng.gauss(0.0, sigma))

    # -- sample emission

    def _emit(self, point: tuple[float, float], inflation: float, valid: bool = True) -> dict:
        """Send one sample through the session; summarize what happened."""
        x, y = self._jittered(point, inflation)
        if valid and self.noise.frame_drop_prob > 0:
            valid = self.rng.random() >= self.noise.frame_drop_prob
        sample = GazeSample(
            t_ms=sample_time_ms(self.i), x_px=x, y_px=y,
            distance_cm=self.distance_cm, valid=valid,
        )
        self.i += 1
        flags = {
            "page_changed": False,
            "adapted": False,
            "activated": None,
            "cancelled": None,
            "played": None,
            "play_pause": False,
            "progress": None,
        }
        for event in self.session.step(sample):
            if event.kind is SessionEventKind.PAGE_CHANGED:
                flags["page_changed"] = True
            elif event.kind is SessionEventKind.ADAPTATION:
                flags["adapted"] = True
            elif event.kind is SessionEventKind.TRACK_PLAYED:
                flags["played"] = event.data["track_index"]
            elif event.kind is SessionEventKind.PLAY_PAUSE:
                flags["play_pause"] = True
            elif event.kind is SessionEventKind.DWELL:
                if event.data["dwell"] == "activated":
                    flags["activated"] = event.data["target"]
                elif event.data["dwell"] == "cancelled":
                    flags["cancelled"] = event.data["target"]
                elif event.data["dwell"] == "progress":
                    flags["progress"] = (event.data["target"], event.data["fraction"])
        if flags["page_changed"] or flags["adapted"]:
            self.replan = True
        return flags

    def _saccade(self, to_point: tuple[float, float]) -> None:
        """Move the fixation point; in-flight samples are suppressed (invalid)."""
        if self.gaze_point is None:
            self.gaze_point = to_point
            return
        n = duration_to_samples(self.search.saccade_ms)
        fx, fy = self.gaze_point
        tx, ty = to_point
        for j in range(1, n + 1):
            if self.session.finished or self.replan:
                break
            f = j / (n + 1)
            self._emit((fx + (tx - fx) * f, fy + (ty - fy) * f), 1.0, valid=False)
        self.gaze_point = to_point

    # -- goals

    def _build_plan(self) -> list[_Goal]:
        session = self.session
        page = session.player.current_page
        items = session.layout.pages[page]
        target_page = session.target_page()
        plan: list[_Goal] = []
        if page == target_page:
            wanted = track_id(session.task.target_track - 1)
            for spec in items:
                if spec.id == wanted:
                    plan.append(_Goal(_Goal.DWELL, spec))
                    return plan
                plan.append(_Goal(_Goal.INSPECT, spec))
            # Shuffled page without the target cannot happen: the task places
            # it here, so treat as a scan-and-leave page.
        else:
            for spec in items:
                plan.append(_Goal(_Goal.INSPECT, spec))
        plan.append(_Goal(_Goal.DECIDE))
        nav = session.layout.control_bar[2] if target_page > page else session.layout.control_bar[0]
        plan.append(_Goal(_Goal.DWELL, nav))
        return plan

    def _run_inspect(self, spec: TargetSpec) -> None:
        point = self._aim(spec)
        self._saccade(point)
        inflation = self._inflation(spec)
        for _ in range(duration_to_samples(self.search.draw_inspect_ms(self.rng))):
            if self.session.finished or self.replan:
                return
            flags = self._emit(point, inflation)
            progress = flags["progress"]
            if progress is not None and progress[0] == spec.id and progress[1] >= INSPECT_BAIL_PROGRESS:
                return

    def _neutral_point(self) -> tuple[float, float]:
        """Dead zone between the list and the control bar, used while deliberating."""
        layout = self.session.layout
        items = layout.pages[self.session.player.current_page]
        list_bottom = max(s.rect.y + s.rect.h for s in items)
        control_top = layout.control_bar[0].rect.y
        return (self.profile.width_px / 2.0, (list_bottom + control_top) / 2.0)

    def _run_decide(self) -> None:
        point = self._neutral_point()
        self._saccade(point)
        for _ in range(duration_to_samples(self.search.decision_ms)):
            if self.session.finished or self.replan:
                return
            self._emit(point, 1.0)

    def _run_dwell(self, spec: TargetSpec) -> None:
        """Fixate until the intended activation lands; re-aim on any setback."""
        point = self._aim(spec)
        self._saccade(point)
        inflation = self._inflation(spec)
        stall_limit = REFIXATE_THRESHOLDS * spec.dwell_threshold_ms
        fix_start = self.i
        while not (self.session.finished or self.replan):
            flags = self._emit(point, inflation)
            mishap = (
                (flags["activated"] is not None and flags["activated"] != spec.id)
                or flags["cancelled"] == spec.id
                or (flags["played"] is not None and not self.session.finished)
                or flags["play_pause"]
            )
            if mishap:
                point = self._aim(spec)
                fix_start = self.i
                continue
            if sample_time_ms(self.i) - sample_time_ms(fix_start) > stall_limit:
                point = self._aim(spec)
                fix_start = self.i

    def run(self) -> None:
        hard_stop = duration_to_samples(self.session.config.timeout_ms) + 64
        while not self.session.finished and self.i <= hard_stop:
            if self.replan or not self.plan:
                self.replan = False
                self.plan = self._build_plan()
            goal = self.plan.pop(0)
            if goal.kind == _Goal.INSPECT:
                self._run_inspect(goal.spec)
            elif goal.kind == _Goal.DECIDE:
                self._run_decide()
            else:
                self._run_dwell(goal.spec)


def run_trial(
    config: TrialConfig,
    noise: GazeNoiseModel | None = None,
    search: SearchModel | None = None,
    base_playlist: Playlist | None = None,
    profile: DisplayProfile = DEFAULT_PROFILE,
    chrome: ChromeConfig = DEFAULT_CHROME,
    distance_cm: float | None = None,
    capture_samples: bool = False,
) -> TrialRecord:
    """Drive one trial to completion with the synthetic participant."""
    noise = noise or GazeNoiseModel()
    search = search or SearchModel()
    if distance_cm is None:
        distance_cm = config.distance_band.median_cm
    session = start_trial(
        config,
        base_playlist=base_playlist,
        profile=profile,
        chrome=chrome,
        initial_distance_cm=distance_cm,
        capture_samples=capture_samples,
    )
    rng = random.Random(stable_seed(config.seed, "agent"))
    _Agent(session, noise, search, rng, distance_cm).run()
    if not session.finished:  # pragma: no cover - the timeout sample closes it
        session.step(GazeSample(config.timeout_ms, -1.0, -1.0, valid=False))
    return session.record()


def generate_trial_trace(
    config: TrialConfig,
    noise: GazeNoiseModel | None = None,
    search: SearchModel | None = None,
    **kwargs,
) -> tuple[TrialRecord, tuple[GazeSample, ...]]:
    """Trial record plus the exact sample stream that produced it."""
    record = run_trial(config, noise, search, capture_samples=True, **kwargs)
    assert record.samples is not None
    return record, record.samples


# -- posture distance dynamics ------------------------------------------------

NORMAL_IQR_FACTOR = 1.3489795003921634  # q3 - q1 of a unit normal


@dataclass(frozen=True)
class PostureProfile:
    """Mean-reverting distance signal parameters for one holding posture."""

    name: str
    median_cm: float
    q1_cm: float
    q3_cm: float
    reversion_rate: float  # per-sample pull toward the median, in (0, 1]
    volatility_cm: float  # per-sample gaussian step size

    def __post_init__(self) -> None:
        if not (self.q1_cm < self.median_cm < self.q3_cm):
            raise ValueError(f"quartiles must straddle the median: {self}")
        if not (0.0 < self.reversion_rate <= 1.0):
            raise ValueError("reversion rate must be in (0, 1]")
        if self.volatility_cm < 0:
            raise ValueError("volatility must be non-negative")

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "median_cm": self.median_cm,
            "q1_cm": self.q1_cm,
            "q3_cm": self.q3_cm,
            "reversion_rate": self.reversion_rate,
            "volatility_cm": self.volatility_cm,
        }

    @classmethod
    def from_json(cls, doc: dict) -> "PostureProfile":
        return cls(**{k: doc[k] for k in cls.__dataclass_fields__})


def _volatility_for(q1: float, q3: float, reversion_rate: float) -> float:
    """Step size whose stationary spread reproduces the target IQR."""
    stationary_sd = (q3 - q1) / NORMAL_IQR_FACTOR
    return stationary_sd * math.sqrt(1.0 - (1.0 - reversion_rate) ** 2)


def _posture(name: str, median: float, q1: float, q3: float, reversion: float) -> PostureProfile:
    return PostureProfile(
        name=name,
        median_cm=median,
        q1_cm=q1,
        q3_cm=q3,
        reversion_rate=reversion,
        volatility_cm=_volatility_for(q1, q3, reversion),
    )


def default_postures() -> dict[str, PostureProfile]:
    """Six holding postures. A mounted phone sits farthest away and nearly
    still; the handheld postures live in the 30-40 cm window. Reversion
    rates are tuned per posture so two-minute adaptive sessions produce
    plausible band-switch counts (walking restless, hands-free calm)."""
    profiles = [
        _posture("walking", 35.0, 31.0, 39.0, 0.004),
        _posture("standing", 34.0, 31.0, 37.0, 0.002),
        _posture("slouching", 31.0, 28.0, 34.0, 0.0025),
        _posture("sitting_handsfree", 41.0, 36.0, 44.0, 0.002),
        _posture("sitting_desk", 33.0, 30.0, 36.0, 0.0018),
        _posture("sitting_chair", 33.0, 29.5, 36.5, 0.002),
    ]
    return {p.name: p for p in profiles}


def generate_posture_session(
    profile: PostureProfile,
    duration_ms: int = 120_000,
    rng_seed: int = 0,
    rate_hz: float = SAMPLE_RATE_HZ,
) -> list[tuple[int, float]]:
    """Distance signal at the sample rate for one posture session."""
    rng = random.Random(rng_seed)
    n = duration_to_samples(duration_ms, rate_hz)
    d = profile.median_cm
    out: list[tuple[int, float]] = []
    for i in range(n):
        out.append((sample_time_ms(i, rate_hz), clamp_distance(d)))
        d += profile.reversion_rate * (profile.median_cm - d)
        if profile.volatility_cm > 0:
            d += rng.gauss(0.0, profile.volatility_cm)
    return out


def signal_quantiles(signal: list[tuple[int, float]]) -> tuple[float, float, float]:
    values = sorted(v for _, v in signal)
    q1, med, q3 = statistics.quantiles(values, n=4)
    return q1, med, q3


# -- calibration ---------------------------------------------------------------


@dataclass(frozen=True)
class CalibrationTargets:
    """Summary statistics the fitted model should land near.

    Besides the two mean task times (seconds), two error means pin the noise
    scale: play/pause slips per hard trial and wrong tracks per hard trial at
    the far distance band. Matching times alone is degenerate (the descent
    trades all noise away for inspect time), so the error terms carry a
    weight that puts a 0.1-error gap on the scale of a ~0.5 s time gap.
    """

    easy_task_time_s: float = 2.33
    hard_task_time_s: float = 10.1
    hard_pp_errors: float = 0.18
    far_track_errors: float = 0.12
    error_weight: float = 25.0


@dataclass(frozen=True)
class CalibrationResult:
    noise: GazeNoiseModel
    search: SearchModel
    objective: float
    converged: bool
    evaluations: int


def _calibration_objective(
    noise: GazeNoiseModel,
    search: SearchModel,
    targets: CalibrationTargets,
    reps: int,
    seed: int,
) -> float:
    times: dict[Difficulty, list[float]] = {Difficulty.EASY: [], Difficulty.HARD: []}
    pp_errors: list[int] = []
    far_errors: list[int] = []
    bands = (DistanceBand.CM_25_29, DistanceBand.CM_30_34, DistanceBand.CM_35_39)
    for difficulty in (Difficulty.EASY, Difficulty.HARD):
        for band in bands:
            for rep in range(reps):
                config = TrialConfig(
                    interface=InterfaceType.ADAPTIVE,
                    distance_band=band,
                    difficulty=difficulty,
                    seed=stable_seed(seed, "calibrate", band.value, difficulty.value, rep),
                )
                m = trial_metrics(run_trial(config, noise, search))
                times[difficulty].append(m.task_time_ms / 1000.0)
                if difficulty is Difficulty.HARD:
                    pp_errors.append(m.pp_errors)
                    if band is DistanceBand.CM_35_39:
                        far_errors.append(m.track_errors)
    easy = statistics.mean(times[Difficulty.EASY])
    hard = statistics.mean(times[Difficulty.HARD])
    pp = statistics.mean(pp_errors)
    far = statistics.mean(far_errors)
    return (
        (easy - targets.easy_task_time_s) ** 2
        + (hard - targets.hard_task_time_s) ** 2
        + targets.error_weight
        * ((pp - targets.hard_pp_errors) ** 2 + (far - targets.far_track_errors) ** 2)
    )


def calibrate(
    noise: GazeNoiseModel,
    search: SearchModel,
    targets: CalibrationTargets | None = None,
    reps: int = 8,
    seed: int = 1,
    sweeps: int = 3,
    sigma_step: float = 0.6,
    inspect_step: float = 120.0,
) -> CalibrationResult:
    """Coordinate descent over (fixation sigma, inspect scale).

    Each candidate is scored on the same seeded trial set, so the objective
    is deterministic and an already-optimal input is a fixed point. The
    initial sigma step is wide enough to jump from a noise-free start into
    the region where errors respond to sigma at all. When the step budget
    runs out before both step sizes shrink below resolution, the best
    parameters so far are returned with ``converged=False``.
    """
    targets = targets or CalibrationTargets()
    sigma = noise.fixation_offset_sigma_deg
    inspect = search.per_item_inspect_ms
    steps = {"sigma": sigma_step, "inspect": inspect_step}
    resolution = {"sigma": 0.02, "inspect": 8.0}
    evaluations = 0

    def score(sig: float, insp: float) -> float:
        nonlocal evaluations
        evaluations += 1
        return _calibration_objective(
            replace(noise, fixation_offset_sigma_deg=sig),
            replace(search, per_item_inspect_ms=insp),
            targets,
            reps,
            seed,
        )

    best = score(sigma, inspect)
    moved = False
    for _ in range(sweeps):
        moved = False
        for param in ("sigma", "inspect"):
            step = steps[param]
            while step >= resolution[param]:
                candidates = []
                if param == "sigma":
                    for cand in (sigma - step, sigma + step):
                        if cand >= 0:
                            candidates.append((score(cand, inspect), cand))
                    improved = [c for c in candidates if c[0] < best]
                    if improved:
                        best, sigma = min(improved)
                        moved = True
                        break
                else:
                    for cand in (inspect - step, inspect + step):
                        if cand > 0:
                            candidates.append((score(sigma, cand), cand))
                    improved = [c for c in candidates if c[0] < best]
                    if improved:
                        best, inspect = min(improved)
                        moved = True
                        break
                step /= 2.0
                steps[param] = step
        if not moved and all(steps[p] < resolution[p] for p in steps):
            break
    converged = all(steps[p] < resolution[p] for p in steps) or not moved
    return CalibrationResult(
        noise=replace(noise, fixation_offset_sigma_deg=sigma),
        search=replace(search, per_item_inspect_ms=inspect),
        objective=best,
        converged=converged,
        evaluations=evaluations,
    )
