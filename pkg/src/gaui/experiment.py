"""Factorial experiment runner and posture-session batch.

Every trial's seed derives from a stable hash of (base seed, interface,
band, difficulty, rep), so a partial rerun or a changed rep count never
perturbs other cells, and two identical invocations are byte-identical on
disk. Output order follows cell coordinates, never completion order.
"""

from __future__ import annotations

import io
import json
import statistics
from dataclasses import dataclass, field
from pathlib import Path

from .adaptation import AdaptationController, InterfaceType
from .geometry import DEFAULT_PROFILE, DisplayProfile
from .layout import DEFAULT_CHROME, ChromeConfig, Playlist
from .seeding import stable_seed
from .session import Difficulty, DistanceBand, TrialConfig, metrics
from .simuser import (
    GazeNoiseModel,
    PostureProfile,
    SearchModel,
    default_postures,
    generate_posture_session,
    run_trial,
    signal_quantiles,
)

CSV_HEADER = "seed,interface,band,difficulty,task_time_ms,nav_time_ms,track_errors,pp_errors,timeout"

ALL_INTERFACES = (
    InterfaceType.STATIC_SMALL,
    InterfaceType.STATIC_MEDIUM,
    InterfaceType.STATIC_LARGE,
    InterfaceType.ADAPTIVE,
)
ALL_BANDS = (DistanceBand.CM_25_29, DistanceBand.CM_30_34, DistanceBand.CM_35_39)
ALL_DIFFICULTIES = (Difficulty.EASY, Difficulty.HARD)


@dataclass(frozen=True)
class ExperimentPlan:
    interfaces: tuple[InterfaceType, ...] = ALL_INTERFACES
    bands: tuple[DistanceBand, ...] = ALL_BANDS
    difficulties: tuple[Difficulty, ...] = ALL_DIFFICULTIES
    reps: int = 300
    base_seed: int = 42

    def __post_init__(self) -> None:
        if self.reps < 1:
            raise ValueError("at least one rep per cell")

    @classmethod
    def from_json(cls, doc: dict) -> "ExperimentPlan":
        return cls(
            interfaces=tuple(InterfaceType(v) for v in doc.get("interfaces", [i.value for i in ALL_INTERFACES])),
            bands=tuple(DistanceBand(v) for v in doc.get("bands", [b.value for b in ALL_BANDS])),
            difficulties=tuple(Difficulty(v) for v in doc.get("difficulties", [d.value for d in ALL_DIFFICULTIES])),
            reps=int(doc.get("reps", 300)),
            base_seed=int(doc.get("base_seed", 42)),
        )

    def to_json(self) -> dict:
        return {
            "interfaces": [i.value for i in self.interfaces],
            "bands": [b.value for b in self.bands],
            "difficulties": [d.value for d in self.difficulties],
            "reps": self.reps,
            "base_seed": self.base_seed,
        }


def cell_seed(base_seed: int, interface: InterfaceType, band: DistanceBand,
              difficulty: Difficulty, rep: int) -> int:
    return stable_seed(base_seed, interface.value, band.value, difficulty.value, rep)


@dataclass(frozen=True)
class TrialRow:
    seed: int
    interface: str
    band: str
    difficulty: str
    task_time_ms: int
    nav_time_ms: float | None
    track_errors: int
    pp_errors: int
    timeout: int

    def to_csv(self) -> str:
        nav = "" if self.nav_time_ms is None else repr(round(self.nav_time_ms, 6))
        return (
            f"{self.seed},{self.interface},{self.band},{self.difficulty},"
            f"{self.task_time_ms},{nav},{self.track_errors},{self.pp_errors},{self.timeout}"
        )


@dataclass(frozen=True)
class CellSummary:
    interface: str
    band: str
    difficulty: str
    n: int
    task_time_ms_mean: float
    task_time_ms_sd: float
    nav_time_ms_mean: float | None
    nav_time_ms_sd: float | None
    track_errors_mean: float
    track_errors_sd: float
    pp_errors_mean: float
    pp_errors_sd: float
    timeouts: int

    def to_json(self) -> dict:
        return {k: getattr(self, k) for k in self.__dataclass_fields__}


@dataclass
class ExperimentResult:
    plan: ExperimentPlan
    rows: list[TrialRow]
    cells: list[CellSummary] = field(default_factory=list)

    def csv_text(self) -> str:
        buf = io.StringIO()
        buf.write(CSV_HEADER + "\n")
        for row in self.rows:
            buf.write(row.to_csv() + "\n")
        return buf.getvalue()

    def summary_csv_text(self) -> str:
        cols = list(CellSummary.__dataclass_fields__)
        buf = io.StringIO()
        buf.write(",".join(cols) + "\n")
        for cell in self.cells:
            values = []
            for col in cols:
                v = getattr(cell, col)
                values.append("" if v is None else (repr(v) if isinstance(v, float) else str(v)))
            buf.write(",".join(values) + "\n")
        return buf.getvalue()

    def summary_json(self) -> dict:
        return {"plan": self.plan.to_json(), "cells": [c.to_json() for c in self.cells]}

    def cell(self, interface: InterfaceType, band: DistanceBand,
             difficulty: Difficulty) -> CellSummary:
        for c in self.cells:
            if (c.interface, c.band, c.difficulty) == (interface.value, band.value, difficulty.value):
                return c
        raise KeyError((interface, band, difficulty))

    def mean_over(self, interface: InterfaceType, difficulty: Difficulty, metric: str) -> float:
        """Mean of a metric pooled over every band of one interface/difficulty."""
        values = [
            getattr(r, metric)
            for r in self.rows
            if r.interface == interface.value and r.difficulty == difficulty.value
            and getattr(r, metric) is not None
        ]
        return statistics.mean(values)


def _mean_sd(values: list[float]) -> tuple[float, float]:
    mean = statistics.mean(values)
    sd = statistics.stdev(values) if len(values) > 1 else 0.0
    return mean, sd


def summarize(plan: ExperimentPlan, rows: list[TrialRow]) -> list[CellSummary]:
    cells = []
    for interface in plan.interfaces:
        for band in plan.bands:
            for difficulty in plan.difficulties:
                cell_rows = [
                    r for r in rows
                    if (r.interface, r.band, r.difficulty)
                    == (interface.value, band.value, difficulty.value)
                ]
                if not cell_rows:
                    continue
                task_mean, task_sd = _mean_sd([r.task_time_ms for r in cell_rows])
                navs = [r.nav_time_ms for r in cell_rows if r.nav_time_ms is not None]
                nav_mean, nav_sd = _mean_sd(navs) if navs else (None, None)
                err_mean, err_sd = _mean_sd([r.track_errors for r in cell_rows])
                pp_mean, pp_sd = _mean_sd([r.pp_errors for r in cell_rows])
                cells.append(
                    CellSummary(
                        interface=interface.value,
                        band=band.value,
                        difficulty=difficulty.value,
                        n=len(cell_rows),
                        task_time_ms_mean=task_mean,
                        task_time_ms_sd=task_sd,
                        nav_time_ms_mean=nav_mean,
                        nav_time_ms_sd=nav_sd,
                        track_errors_mean=err_mean,
                        track_errors_sd=err_sd,
                        pp_errors_mean=pp_mean,
                        pp_errors_sd=pp_sd,
                        timeouts=sum(r.timeout for r in cell_rows),
                    )
                )
    return cells


def run_experiment(
    plan: ExperimentPlan,
    noise: GazeNoiseModel | None = None,
    search: SearchModel | None = None,
    profile: DisplayProfile = DEFAULT_PROFILE,
    chrome: ChromeConfig = DEFAULT_CHROME,
    base_playlist: Playlist | None = None,
) -> ExperimentResult:
    """Run the full factorial plan; deterministic given the plan's base seed."""
    noise = noise or GazeNoiseModel()
    search = search or SearchModel()
    rows: list[TrialRow] = []
    for interface in plan.interfaces:
        for band in plan.bands:
            for difficulty in plan.difficulties:
                for rep in range(plan.reps):
                    seed = cell_seed(plan.base_seed, interface, band, difficulty, rep)
                    config = TrialConfig(
                        interface=interface, distance_band=band,
                        difficulty=difficulty, seed=seed,
                    )
                    record = run_trial(
                        config, noise, search,
                        base_playlist=base_playlist, profile=profile, chrome=chrome,
                    )
                    m = metrics(record)
                    rows.append(
                        TrialRow(
                            seed=seed,
                            interface=interface.value,
                            band=band.value,
                            difficulty=difficulty.value,
                            task_time_ms=m.task_time_ms,
                            nav_time_ms=m.nav_time_ms,
                            track_errors=m.track_errors,
                            pp_errors=m.pp_errors,
                            timeout=int(m.timeout),
                        )
                    )
    result = ExperimentResult(plan=plan, rows=rows)
    result.cells = summarize(plan, rows)
    return result


def write_experiment_outputs(result: ExperimentResult, out_dir: Path) -> dict[str, Path]:
    out_dir.mkdir(parents=True, exist_ok=True)
    paths = {
        "trials_csv": out_dir / "trials.csv",
        "summary_csv": out_dir / "summary.csv",
        "summary_json": out_dir / "summary.json",
    }
    paths["trials_csv"].write_text(result.csv_text())
    paths["summary_csv"].write_text(result.summary_csv_text())
    paths["summary_json"].write_text(json.dumps(result.summary_json(), indent=2) + "\n")
    return paths


# -- posture batch --------------------------------------------------------------

POSTURES_CSV_HEADER = "posture,sessions,switches_mean,switches_sd,median_cm,q1_cm,q3_cm"


@dataclass(frozen=True)
class PostureSummary:
    posture: str
    sessions: int
    switches_mean: float
    switches_sd: float
    median_cm: float
    q1_cm: float
    q3_cm: float

    def to_csv(self) -> str:
        return (
            f"{self.posture},{self.sessions},{self.switches_mean!r},{self.switches_sd!r},"
            f"{self.median_cm!r},{self.q1_cm!r},{self.q3_cm!r}"
        )

    def to_json(self) -> dict:
        return {k: getattr(self, k) for k in self.__dataclass_fields__}


def run_posture_session_switches(profile: PostureProfile, rng_seed: int,
                                 duration_ms: int = 120_000) -> tuple[int, list[float]]:
    """Band-switch count and raw distances for one adaptive posture session."""
    signal = generate_posture_session(profile, duration_ms=duration_ms, rng_seed=rng_seed)
    controller = AdaptationController.from_distance(signal[0][1])
    switches = 0
    for t_ms, cm in signal[1:]:
        if controller.update(cm, t_ms) is not None:
            switches += 1
    return switches, [cm for _, cm in signal]


def run_postures(
    profiles: dict[str, PostureProfile] | None = None,
    reps: int = 100,
    base_seed: int = 42,
    duration_ms: int = 120_000,
) -> list[PostureSummary]:
    profiles = profiles or default_postures()
    summaries = []
    for name in profiles:
        profile = profiles[name]
        counts: list[int] = []
        distances: list[float] = []
        for rep in range(reps):
            switches, values = run_posture_session_switches(
                profile, rng_seed=stable_seed(base_seed, "posture", name, rep),
                duration_ms=duration_ms,
            )
            counts.append(switches)
            distances.extend(values)
        mean, sd = _mean_sd([float(c) for c in counts])
        q1, med, q3 = signal_quantiles([(0, v) for v in distances])
        summaries.append(
            PostureSummary(
                posture=name, sessions=reps,
                switches_mean=mean, switches_sd=sd,
                median_cm=med, q1_cm=q1, q3_cm=q3,
            )
        )
    return summaries


def postures_csv_text(summaries: list[PostureSummary]) -> str:
    lines = [POSTURES_CSV_HEADER]
    lines.extend(s.to_csv() for s in summaries)
    return "\n".join(lines) + "\n"
