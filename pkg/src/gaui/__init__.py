"""Distance-adaptive gaze-dwell interaction engine.

The package wires four stages: visual-angle geometry, a hysteresis band
controller, a dwell-selection state machine, and a paginated media-player
layout, then builds trial sessions, a Monte Carlo simulated participant, an
experiment harness, and a live demo service on top of them.
"""

from .adaptation import (
    AdaptationController,
    AdaptationEvent,
    Band,
    InterfaceType,
    band_for_interface,
    init_band,
)
from .dwell import DwellEvent, DwellEventKind, DwellMachine, DwellParams, GazeSample, TargetHit
from .errors import ConfigurationError, GauiError, StreamOrderError
from .geometry import (
    DEFAULT_PROFILE,
    DisplayProfile,
    angle_to_physical,
    angle_to_px,
    physical_to_px,
    px_to_physical,
)
from .layout import (
    ChromeConfig,
    LayoutModel,
    Playlist,
    TargetSpec,
    hit_test,
    layout_for_band,
    page_of_track,
)
from .session import (
    Difficulty,
    DistanceBand,
    Outcome,
    PlayerSession,
    TaskSpec,
    TrialConfig,
    TrialMetrics,
    TrialRecord,
    TrialSession,
    metrics,
    replay_trace,
    start_trial,
)
from .simuser import (
    CalibrationResult,
    CalibrationTargets,
    GazeNoiseModel,
    PostureProfile,
    SearchModel,
    calibrate,
    default_postures,
    generate_posture_session,
    generate_trial_trace,
    run_trial,
)

__version__ = "0.1.0"
