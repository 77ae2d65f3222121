import json

import pytest

from conftest import t30

from gaui.adaptation import Band, InterfaceType
from gaui.dwell import GazeSample
from gaui.layout import NAV_RIGHT_ID, PLAY_PAUSE_ID, Playlist, page_of_track, track_id
from gaui.session import (
    Difficulty,
    DistanceBand,
    Outcome,
    PlayerSession,
    SessionEventKind,
    TrialConfig,
    metrics,
    replay_trace,
    start_trial,
)
from gaui.simuser import GazeNoiseModel, SearchModel, run_trial

ZERO_NOISE = GazeNoiseModel(0.0, 0.0, 1.0, 0.0)
FIXED_SEARCH = SearchModel(inspect_sigma=0.0)


def config(interface=InterfaceType.STATIC_SMALL, band=DistanceBand.CM_25_29,
           difficulty=Difficulty.EASY, seed=11, **kw):
    return TrialConfig(interface=interface, distance_band=band,
                       difficulty=difficulty, seed=seed, **kw)


def fixate(session, target_id, n, start_index=0, distance_cm=None):
    """Feed n samples at 30 Hz pinned to a target's center."""
    spec = session.layout.find_target(target_id)
    cx, cy = spec.rect.center
    events = []
    for i in range(n):
        events.extend(
            session.step(GazeSample(t30(start_index + i), cx, cy, distance_cm=distance_cm))
        )
    return events


def kinds(events):
    return [e.kind for e in events]


class TestStartTrial:
    def test_same_seed_reproduces_playlist_and_target(self):
        a = start_trial(config(seed=5))
        b = start_trial(config(seed=5))
        assert a.playlist.titles == b.playlist.titles
        assert a.task == b.task
        assert a.playlist.titles != Playlist().titles  # order is randomized

    def test_easy_target_is_on_page_one(self):
        for seed in range(25):
            session = start_trial(config(seed=seed))
            assert 1 <= session.task.target_track <= session.layout.items_per_page
            assert session.target_page() == 0

    @pytest.mark.parametrize(
        "interface,expected_page",
        [
            (InterfaceType.STATIC_SMALL, 3),
            (InterfaceType.STATIC_MEDIUM, 4),
            (InterfaceType.STATIC_LARGE, 5),
        ],
    )
    def test_hard_target_page_by_interface(self, interface, expected_page):
        for seed in range(15):
            session = start_trial(config(interface=interface, difficulty=Difficulty.HARD, seed=seed))
            assert page_of_track(session.layout, session.task.target_track) == expected_page

    def test_adaptive_initial_band_comes_from_distance(self):
        session = start_trial(config(interface=InterfaceType.ADAPTIVE, band=DistanceBand.CM_35_39,
                                     difficulty=Difficulty.HARD))
        assert session.band is Band.LARGE
        assert page_of_track(session.layout, session.task.target_track) == 5


class TestStepRules:
    def test_nav_activation_changes_page_and_resets_dwell(self):
        session = start_trial(config(difficulty=Difficulty.HARD))
        events = fixate(session, NAV_RIGHT_ID, 16)
        assert SessionEventKind.PAGE_CHANGED in kinds(events)
        page_event = next(e for e in events if e.kind is SessionEventKind.PAGE_CHANGED)
        assert page_event.data["from_page"] == 0
        assert page_event.data["to_page"] == 1
        assert page_event.data["toward_target"] is True
        assert session.player.current_page == 1
        assert session.machine.state_name == "idle"

    def test_play_pause_toggles(self):
        session = start_trial(config())
        events = fixate(session, PLAY_PAUSE_ID, 16)
        toggles = [e for e in events if e.kind is SessionEventKind.PLAY_PAUSE]
        assert len(toggles) == 1
        assert session.player.paused is True

    def test_wrong_track_plays_without_ending_trial(self):
        session = start_trial(config(seed=11))
        wrong = next(
            spec for spec in session.layout.pages[0]
            if spec.track_index + 1 != session.task.target_track
        )
        events = fixate(session, wrong.id, 31)
        played = [e for e in events if e.kind is SessionEventKind.TRACK_PLAYED]
        assert len(played) == 1
        assert played[0].data["correct"] is False
        assert not session.finished
        assert session.player.playing == wrong.track_index

    def test_correct_track_ends_trial_success(self):
        session = start_trial(config(seed=11))
        target = track_id(session.task.target_track - 1)
        events = fixate(session, target, 31)
        assert session.finished
        assert session.outcome is Outcome.SUCCESS
        assert kinds(events)[-1] is SessionEventKind.SUCCESS
        assert session.step(GazeSample(99_000, 0, 0)) == []

    def test_timeout_at_limit(self):
        session = start_trial(config())
        events = session.step(GazeSample(60_000, 0.0, 0.0))
        assert session.outcome is Outcome.TIMEOUT
        assert kinds(events) == [SessionEventKind.TIMEOUT]
        assert events[0].t_ms == 60_000

    def test_event_timestamps_within_trial_window(self):
        record = run_trial(config(difficulty=Difficulty.HARD, seed=3), ZERO_NOISE, FIXED_SEARCH)
        assert all(0 <= e.t_ms <= 60_000 for e in record.events)

    def test_out_of_band_samples_are_flagged_clock_keeps_running(self):
        session = start_trial(config(band=DistanceBand.CM_25_29))
        session.step(GazeSample(0, 0.0, 0.0, distance_cm=35.0))
        session.step(GazeSample(33, 0.0, 0.0, distance_cm=27.0))
        assert session.out_of_band_samples == 1
        assert not session.finished


class TestAdaptationMidTrial:
    def test_band_switch_rebuilds_layout_and_keeps_page(self):
        session = start_trial(config(interface=InterfaceType.ADAPTIVE,
                                     band=DistanceBand.CM_30_34,
                                     difficulty=Difficulty.HARD))
        assert session.band is Band.MEDIUM
        session.player.current_page = 9
        events = session.step(GazeSample(t30(1), 0.0, 0.0, distance_cm=37.5))
        assert SessionEventKind.ADAPTATION in kinds(events)
        assert session.band is Band.LARGE
        assert session.layout.page_count == 15
        assert session.player.current_page == 9  # still valid, unchanged

    def test_band_switch_clamps_page_into_new_bounds(self):
        session = start_trial(config(interface=InterfaceType.ADAPTIVE,
                                     band=DistanceBand.CM_35_39,
                                     difficulty=Difficulty.HARD))
        session.player.current_page = 12
        session.step(GazeSample(t30(1), 0.0, 0.0, distance_cm=20.0))
        assert session.band is Band.SMALL
        assert session.layout.page_count == 8
        assert session.player.current_page == 7

    def test_in_flight_dwell_cancelled_by_adaptation(self):
        session = start_trial(config(interface=InterfaceType.ADAPTIVE,
                                     band=DistanceBand.CM_30_34))
        fixate(session, track_id(session.layout.pages[0][0].track_index), 5,
               distance_cm=32.0)
        assert session.machine.state_name == "dwelling"
        session.step(GazeSample(t30(6), 0.0, 0.0, distance_cm=38.0))
        assert session.machine.state_name == "idle"


class TestMetrics:
    def test_success_time_and_zero_errors(self):
        session = start_trial(config(seed=11))
        target = track_id(session.task.target_track - 1)
        fixate(session, target, 31)
        m = metrics(session.record())
        assert m.task_time_ms == 1000
        assert m.track_errors == 0
        assert m.pp_errors == 0
        assert m.timeout is False
        assert m.nav_time_ms is None

    def test_two_wrong_tracks_counted(self):
        session = start_trial(config(seed=11))
        wrongs = [
            spec for spec in session.layout.pages[0]
            if spec.track_index + 1 != session.task.target_track
        ][:2]
        i = 0
        for spec in wrongs:
            fixate(session, spec.id, 31, start_index=i)
            i += 40  # leave the refractory target before the next dwell
        fixate(session, track_id(session.task.target_track - 1), 31, start_index=i)
        m = metrics(session.record())
        assert m.track_errors == 2
        assert session.outcome is Outcome.SUCCESS

    def test_play_pause_errors_counted_for_hard_only(self):
        for difficulty, expected in ((Difficulty.HARD, 1), (Difficulty.EASY, 0)):
            session = start_trial(config(difficulty=difficulty, seed=11))
            fixate(session, PLAY_PAUSE_ID, 16)
            session.step(GazeSample(60_000, 0.0, 0.0))
            m = metrics(session.record())
            assert m.pp_errors == expected

    def test_navigation_time_measured_from_page_render(self):
        session = start_trial(config(difficulty=Difficulty.HARD, seed=11))
        fixate(session, NAV_RIGHT_ID, 16)  # activation at t=500
        fixate(session, NAV_RIGHT_ID, 17, start_index=20)  # re-entry after refractory reset
        session.step(GazeSample(60_000, 0.0, 0.0))
        m = metrics(session.record())
        nav_events = [e for e in session.events if e.kind is SessionEventKind.PAGE_CHANGED]
        assert len(nav_events) == 2
        assert nav_events[0].data["since_render_ms"] == 500
        latencies = [e.data["since_render_ms"] for e in nav_events]
        assert m.nav_time_ms == pytest.approx(sum(latencies) / 2)

    def test_timeout_metrics_capped_at_limit(self):
        session = start_trial(config(seed=11))
        session.step(GazeSample(60_000, 0.0, 0.0))
        m = metrics(session.record())
        assert m.timeout is True
        assert m.task_time_ms == 60_000


class TestEsmScheduling:
    def make_live(self):
        return PlayerSession(
            interface=InterfaceType.ADAPTIVE,
            playlist=Playlist(),
            initial_distance_cm=32.0,
            esm_enabled=True,
        )

    def test_prompt_thirty_seconds_after_first_adaptation(self):
        session = self.make_live()
        events = session.apply_distance(12_000, 38.0)
        assert kinds(events) == [SessionEventKind.ADAPTATION]
        assert session.apply_distance(41_999, 38.5) == []
        events = session.apply_distance(42_000, 38.5)
        assert kinds(events) == [SessionEventKind.ESM_PROMPT]
        assert events[0].t_ms == 42_000

    def test_no_adaptation_no_prompt(self):
        session = self.make_live()
        for i in range(120):
            session.step(GazeSample(t30(i), 0.0, 0.0, distance_cm=32.0))
        assert SessionEventKind.ESM_PROMPT not in [e.kind for e in session.events]

    def test_later_adaptations_do_not_reschedule(self):
        session = self.make_live()
        session.apply_distance(5_000, 38.0)
        session.apply_distance(20_000, 27.0)  # second switch, down to small
        events = session.apply_distance(35_000, 27.5)
        assert kinds(events) == [SessionEventKind.ESM_PROMPT]
        assert events[0].t_ms == 35_000
        assert session.apply_distance(70_000, 27.6) == []

    def test_prompt_event_logged_at_scheduled_time(self):
        session = self.make_live()
        session.apply_distance(12_000, 38.0)
        events = session.apply_distance(42_010, 38.5)  # first reading past the deadline
        assert events[0].kind is SessionEventKind.ESM_PROMPT
        assert events[0].t_ms == 42_000

    def test_fixed_band_trials_never_prompt(self):
        record = run_trial(config(interface=InterfaceType.ADAPTIVE, seed=2), ZERO_NOISE, FIXED_SEARCH)
        assert all(e.kind is not SessionEventKind.ESM_PROMPT for e in record.events)

    def test_esm_answer_recorded(self):
        session = self.make_live()
        session.record_esm_answer(43_000, {"noticed": "yes", "helpful": 4})
        last = session.events[-1]
        assert last.kind is SessionEventKind.ESM_ANSWER
        assert last.data["answers"]["noticed"] == "yes"


class TestOptimalAgentInvariants:
    @pytest.mark.parametrize(
        "interface,min_navs",
        [
            (InterfaceType.STATIC_SMALL, 2),
            (InterfaceType.STATIC_MEDIUM, 3),
            (InterfaceType.STATIC_LARGE, 4),
        ],
    )
    def test_zero_noise_hard_trial_uses_minimum_navigations(self, interface, min_navs):
        record = run_trial(config(interface=interface, difficulty=Difficulty.HARD, seed=8),
                           ZERO_NOISE, FIXED_SEARCH)
        navs = [e for e in record.events if e.kind is SessionEventKind.PAGE_CHANGED]
        assert len(navs) == min_navs
        assert all(e.data["toward_target"] for e in navs)

    def test_zero_noise_easy_trial_never_navigates(self):
        record = run_trial(config(seed=8), ZERO_NOISE, FIXED_SEARCH)
        assert all(e.kind is not SessionEventKind.PAGE_CHANGED for e in record.events)
        assert metrics(record).nav_time_ms is None


class TestReplay:
    def test_replay_reproduces_identical_event_log(self):
        record = run_trial(config(interface=InterfaceType.ADAPTIVE, seed=31,
                                  difficulty=Difficulty.HARD),
                           capture_samples=True)
        lines = list(record.trace_lines())
        replayed = replay_trace(lines)
        assert [e.to_json() for e in replayed.events] == [e.to_json() for e in record.events]
        assert replayed.outcome == record.outcome
        assert replayed.task == record.task

    def test_replay_requires_config_header(self):
        from gaui.errors import ConfigurationError

        with pytest.raises(ConfigurationError):
            replay_trace(['{"type":"sample","t_ms":0,"x_px":0,"y_px":0}'])
        with pytest.raises(ConfigurationError):
            replay_trace([])

    def test_truncated_trace_closes_as_timeout(self):
        record = run_trial(config(seed=31), capture_samples=True)
        lines = list(record.trace_lines())[:3]  # header + two samples
        replayed = replay_trace(lines)
        assert replayed.outcome is Outcome.TIMEOUT

    def test_trial_record_json_shape(self):
        record = run_trial(config(seed=31), capture_samples=True)
        doc = record.to_json()
        assert doc["outcome"] == "success"
        assert doc["config"]["interface"] == "static-small"
        assert isinstance(doc["events"], list)
        header = json.loads(list(record.trace_lines())[0])
        assert header["type"] == "config"
        assert header["playlist"] == list(Playlist().titles)
