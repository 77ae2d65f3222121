import csv
import io
import json
import statistics

import pytest
from click.testing import CliRunner

from gaui.adaptation import InterfaceType
from gaui.cli import main
from gaui.experiment import (
    ALL_BANDS,
    CSV_HEADER,
    ExperimentPlan,
    POSTURES_CSV_HEADER,
    cell_seed,
    postures_csv_text,
    run_experiment,
    run_postures,
)
from gaui.seeding import stable_seed
from gaui.session import Difficulty, DistanceBand
from gaui.simuser import GazeNoiseModel, PostureProfile, SearchModel

SMALL_PLAN = ExperimentPlan(
    interfaces=(InterfaceType.ADAPTIVE, InterfaceType.STATIC_SMALL),
    bands=(DistanceBand.CM_25_29, DistanceBand.CM_35_39),
    difficulties=(Difficulty.EASY, Difficulty.HARD),
    reps=3,
    base_seed=9,
)


@pytest.fixture(scope="module")
def small_result():
    return run_experiment(SMALL_PLAN)


class TestSeeding:
    def test_stable_seed_is_frozen_across_platforms(self):
        assert stable_seed(1, "a", 2) == 938383822073135179

    def test_cell_seed_frozen(self):
        assert (
            cell_seed(42, InterfaceType.ADAPTIVE, DistanceBand.CM_35_39, Difficulty.HARD, 0)
            == 6338107991864547566
        )

    def test_cell_seeds_distinct_across_coordinates(self):
        seeds = {
            cell_seed(1, i, b, d, rep)
            for i in (InterfaceType.ADAPTIVE, InterfaceType.STATIC_SMALL)
            for b in ALL_BANDS
            for d in (Difficulty.EASY, Difficulty.HARD)
            for rep in range(3)
        }
        assert len(seeds) == 2 * 3 * 2 * 3


class TestCsvOutputs:
    def test_raw_header_is_stable(self, small_result):
        assert small_result.csv_text().splitlines()[0] == (
            "seed,interface,band,difficulty,task_time_ms,nav_time_ms,"
            "track_errors,pp_errors,timeout"
        )
        assert CSV_HEADER == small_result.csv_text().splitlines()[0]

    def test_row_count_matches_plan(self, small_result):
        lines = small_result.csv_text().splitlines()
        assert len(lines) - 1 == 2 * 2 * 2 * 3

    def test_rows_ordered_by_cell_coordinates(self, small_result):
        rows = list(csv.DictReader(io.StringIO(small_result.csv_text())))
        coords = [(r["interface"], r["band"], r["difficulty"]) for r in rows]
        assert coords == sorted(coords, key=lambda c: (
            [i.value for i in SMALL_PLAN.interfaces].index(c[0]),
            [b.value for b in SMALL_PLAN.bands].index(c[1]),
            [d.value for d in SMALL_PLAN.difficulties].index(c[2]),
        ))

    def test_summary_means_match_independent_recomputation(self, small_result):
        rows = list(csv.DictReader(io.StringIO(small_result.csv_text())))
        for cell in small_result.cells:
            subset = [
                r for r in rows
                if (r["interface"], r["band"], r["difficulty"])
                == (cell.interface, cell.band, cell.difficulty)
            ]
            assert cell.n == len(subset)
            assert cell.task_time_ms_mean == pytest.approx(
                statistics.mean(int(r["task_time_ms"]) for r in subset)
            )
            assert cell.track_errors_mean == pytest.approx(
                statistics.mean(int(r["track_errors"]) for r in subset)
            )
            navs = [float(r["nav_time_ms"]) for r in subset if r["nav_time_ms"]]
            if navs:
                assert cell.nav_time_ms_mean == pytest.approx(statistics.mean(navs))
            else:
                assert cell.nav_time_ms_mean is None
            assert cell.timeouts == sum(int(r["timeout"]) for r in subset)

    def test_summary_csv_parses(self, small_result):
        rows = list(csv.DictReader(io.StringIO(small_result.summary_csv_text())))
        assert len(rows) == len(small_result.cells)
        assert rows[0]["interface"] == small_result.cells[0].interface


class TestDeterminismAndIsolation:
    def test_identical_runs_are_byte_identical(self, small_result):
        again = run_experiment(SMALL_PLAN)
        assert again.csv_text() == small_result.csv_text()
        assert again.summary_csv_text() == small_result.summary_csv_text()

    def test_rep_count_change_leaves_other_rows_unchanged(self, small_result):
        bigger = run_experiment(
            ExperimentPlan(
                interfaces=SMALL_PLAN.interfaces,
                bands=SMALL_PLAN.bands,
                difficulties=SMALL_PLAN.difficulties,
                reps=5,
                base_seed=9,
            )
        )
        small_rows = {(r.seed): r for r in small_result.rows}
        bigger_rows = {(r.seed): r for r in bigger.rows}
        assert set(small_rows) <= set(bigger_rows)
        for seed, row in small_rows.items():
            assert bigger_rows[seed] == row

    def test_plan_json_round_trip(self):
        doc = SMALL_PLAN.to_json()
        assert ExperimentPlan.from_json(doc) == SMALL_PLAN
        assert ExperimentPlan.from_json({}) == ExperimentPlan()

    def test_reps_validation(self):
        with pytest.raises(ValueError):
            ExperimentPlan(reps=0)


class TestPostures:
    def test_csv_header_and_rows(self):
        summaries = run_postures(reps=2, base_seed=1, duration_ms=10_000)
        text = postures_csv_text(summaries)
        lines = text.splitlines()
        assert lines[0] == POSTURES_CSV_HEADER
        assert len(lines) == 7  # six postures

    def test_custom_profile_with_zero_volatility_never_switches(self):
        frozen = PostureProfile("pinned", 41.0, 40.0, 42.0, 0.01, 0.0)
        summaries = run_postures({"pinned": frozen}, reps=3, base_seed=1, duration_ms=30_000)
        assert summaries[0].switches_mean == 0.0
        assert summaries[0].median_cm == pytest.approx(41.0)

    def test_distance_medians_near_profile_targets(self):
        summaries = run_postures(reps=5, base_seed=3, duration_ms=60_000)
        from gaui.simuser import default_postures

        targets = default_postures()
        for s in summaries:
            assert abs(s.median_cm - targets[s.posture].median_cm) / targets[s.posture].median_cm < 0.15


class TestCli:
    def test_experiment_writes_three_files_and_is_deterministic(self, tmp_path):
        plan_doc = {
            "interfaces": ["adaptive"],
            "bands": ["25-29"],
            "difficulties": ["easy"],
            "reps": 3,
            "base_seed": 5,
        }
        plan_path = tmp_path / "plan.json"
        plan_path.write_text(json.dumps(plan_doc))
        runner = CliRunner()
        outputs = []
        for name in ("a", "b"):
            out_dir = tmp_path / name
            result = runner.invoke(
                main,
                ["experiment", "--plan", str(plan_path), "--out", str(out_dir)],
            )
            assert result.exit_code == 0, result.output
            assert (out_dir / "trials.csv").exists()
            assert (out_dir / "summary.csv").exists()
            assert (out_dir / "summary.json").exists()
            outputs.append((out_dir / "trials.csv").read_bytes())
        assert outputs[0] == outputs[1]

    def test_experiment_seed_option_overrides_plan(self, tmp_path):
        runner = CliRunner()
        plan_path = tmp_path / "plan.json"
        plan_path.write_text(json.dumps({
            "interfaces": ["adaptive"], "bands": ["25-29"],
            "difficulties": ["easy"], "reps": 1, "base_seed": 5,
        }))
        out_a, out_b = tmp_path / "a", tmp_path / "b"
        runner.invoke(main, ["experiment", "--plan", str(plan_path), "--out", str(out_a)])
        runner.invoke(main, ["experiment", "--plan", str(plan_path), "--out", str(out_b), "--seed", "6"])
        assert (out_a / "trials.csv").read_text() != (out_b / "trials.csv").read_text()

    def test_layout_prints_model_json(self):
        runner = CliRunner()
        result = runner.invoke(main, ["layout", "--band", "medium"])
        assert result.exit_code == 0
        doc = json.loads(result.output)
        assert doc["items_per_page"] == 3
        assert doc["page_count"] == 10

    def test_layout_with_custom_profile(self, tmp_path):
        profile_path = tmp_path / "display.json"
        profile_path.write_text(json.dumps(
            {"name": "phone", "width_px": 1290, "height_px": 2796, "ppi": 460}
        ))
        runner = CliRunner()
        result = runner.invoke(
            main, ["layout", "--band", "small", "--profile", str(profile_path)]
        )
        assert result.exit_code == 0
        assert json.loads(result.output)["items_per_page"] == 4

    def test_replay_round_trip(self, tmp_path):
        from gaui.session import TrialConfig
        from gaui.simuser import run_trial

        cfg = TrialConfig(
            interface=InterfaceType.STATIC_SMALL,
            distance_band=DistanceBand.CM_25_29,
            difficulty=Difficulty.EASY,
            seed=4,
        )
        record = run_trial(cfg, capture_samples=True)
        trace_path = tmp_path / "trace.jsonl"
        trace_path.write_text("\n".join(record.trace_lines()) + "\n")
        runner = CliRunner()
        result = runner.invoke(main, ["replay", "--trace", str(trace_path)])
        assert result.exit_code == 0, result.output
        header = json.loads(result.output.splitlines()[0])
        assert header["outcome"] == record.outcome.value
        replayed_events = [json.loads(line) for line in result.output.splitlines()[1:]]
        assert replayed_events == [e.to_json() for e in record.events]

    def test_postures_writes_csv(self, tmp_path):
        out_path = tmp_path / "postures.csv"
        runner = CliRunner()
        result = runner.invoke(
            main, ["postures", "--reps", "2", "--out", str(out_path), "--duration-ms", "10000"]
        )
        assert result.exit_code == 0, result.output
        assert out_path.read_text().splitlines()[0] == POSTURES_CSV_HEADER

    def test_postures_with_custom_profiles(self, tmp_path):
        profiles_path = tmp_path / "postures.json"
        profiles_path.write_text(json.dumps([
            {"name": "pinned", "median_cm": 41.0, "q1_cm": 40.0, "q3_cm": 42.0,
             "reversion_rate": 0.01, "volatility_cm": 0.0},
        ]))
        out_path = tmp_path / "out.csv"
        runner = CliRunner()
        result = runner.invoke(main, [
            "postures", "--profiles", str(profiles_path), "--reps", "2",
            "--out", str(out_path), "--duration-ms", "5000",
        ])
        assert result.exit_code == 0, result.output
        assert "pinned,2,0.0,0.0" in out_path.read_text()

    def test_replay_missing_file_fails_cleanly(self):
        runner = CliRunner()
        result = runner.invoke(main, ["replay", "--trace", "/nonexistent.jsonl"])
        assert result.exit_code != 0
