"""FastAPI service: REST access to the engine plus the demo wire protocol.

Every WebSocket connection owns one isolated player session; a malformed
frame produces an error frame and leaves the connection (and session) alive.
"""

from __future__ import annotations

import json
from pathlib import Path

from fastapi import FastAPI, WebSocket, WebSocketDisconnect
from fastapi.responses import PlainTextResponse
from fastapi.staticfiles import StaticFiles
from pydantic import ValidationError

from .. import __version__
from ..adaptation import Band, InterfaceType
from ..dwell import GazeSample
from ..errors import GauiError
from ..experiment import (
    ExperimentPlan,
    postures_csv_text,
    run_experiment,
    run_postures,
)
from ..geometry import DEFAULT_PROFILE, DisplayProfile
from ..layout import DEFAULT_CHROME, ChromeConfig, Playlist, layout_for_band
from ..session import PlayerSession, SessionEvent, SessionEventKind, replay_trace
from ..simuser import GazeNoiseModel, PostureProfile, SearchModel
from .models import (
    ChromeDoc,
    DistanceFrame,
    EsmAnswerFrame,
    ExperimentRequest,
    GazeFrame,
    HelloFrame,
    LayoutRequest,
    PosturesRequest,
    ProfileDoc,
    ReplayRequest,
    ResetFrame,
    client_frame_adapter,
)


def _profile_from(doc: ProfileDoc | None) -> DisplayProfile:
    if doc is None:
        return DEFAULT_PROFILE
    return DisplayProfile.from_json(doc.model_dump())


def _chrome_from(doc: ChromeDoc | None) -> ChromeConfig:
    if doc is None:
        return DEFAULT_CHROME
    return ChromeConfig(**doc.model_dump())


class SessionBridge:
    """Wire-frame adapter around one live player session."""

    def __init__(self, hello: HelloFrame) -> None:
        self.interface = InterfaceType(hello.interface)
        self.profile = _profile_from(hello.profile)
        self.chrome = _chrome_from(hello.chrome)
        self.playlist = Playlist(tuple(hello.playlist)) if hello.playlist else Playlist()
        self.initial_distance_cm = hello.initial_distance_cm
        self.session = self._new_session()

    def _new_session(self) -> PlayerSession:
        return PlayerSession(
            interface=self.interface,
            playlist=self.playlist,
            profile=self.profile,
            chrome=self.chrome,
            initial_distance_cm=self.initial_distance_cm,
            esm_enabled=True,
        )

    def reset(self) -> list[dict]:
        self.session = self._new_session()
        return [self.layout_frame()]

    def layout_frame(self) -> dict:
        session = self.session
        page = session.player.current_page
        targets = []
        for spec in session.layout.page_targets(page, include_disabled=True):
            doc = spec.to_json()
            doc["enabled"] = session.layout.control_enabled(spec.id, page)
            targets.append(doc)
        return {
            "type": "layout",
            "band": session.band.value,
            "page": page + 1,
            "page_count": session.layout.page_count,
            "targets": targets,
        }

    def player_frame(self) -> dict:
        player = self.session.player
        title = None
        if player.playing is not None:
            title = self.session.playlist.titles[player.playing]
        return {
            "type": "player",
            "playing": None if player.paused or player.playing is None else title,
            "track_index": player.playing,
            "paused": player.paused,
        }

    def frames_for(self, events: list[SessionEvent]) -> list[dict]:
        frames: list[dict] = []
        for event in events:
            if event.kind is SessionEventKind.DWELL:
                frames.append(
                    {
                        "type": "dwell",
                        "kind": event.data["dwell"],
                        "target": event.data["target"],
                        "fraction": event.data["fraction"],
                        "t_ms": event.t_ms,
                    }
                )
            elif event.kind is SessionEventKind.ADAPTATION:
                frames.append(
                    {
                        "type": "adaptation",
                        "from": event.data["from"],
                        "to": event.data["to"],
                        "t_ms": event.t_ms,
                    }
                )
                frames.append(self.layout_frame())
            elif event.kind is SessionEventKind.PAGE_CHANGED:
                frames.append(self.layout_frame())
            elif event.kind in (SessionEventKind.TRACK_PLAYED, SessionEventKind.PLAY_PAUSE):
                frames.append(self.player_frame())
            elif event.kind is SessionEventKind.ESM_PROMPT:
                frames.append({"type": "esm_prompt", "t_ms": event.t_ms})
        return frames

    def handle(self, frame) -> list[dict]:
        if isinstance(frame, GazeFrame):
            sample = GazeSample(t_ms=frame.t_ms, x_px=frame.x, y_px=frame.y, valid=frame.valid)
            return self.frames_for(self.session.step(sample))
        if isinstance(frame, DistanceFrame):
            return self.frames_for(self.session.apply_distance(frame.t_ms, frame.cm))
        if isinstance(frame, EsmAnswerFrame):
            self.session.record_esm_answer(frame.t_ms, frame.answers)
            return []
        if isinstance(frame, ResetFrame):
            return self.reset()
        raise GauiError(f"unexpected frame: {frame!r}")


def create_app(static_dir: Path | None = None) -> FastAPI:
    app = FastAPI(title="gaui", version=__version__)

    @app.get("/health")
    def health() -> dict:
        return {"status": "ok", "version": __version__}

    @app.post("/api/layout")
    def layout(req: LayoutRequest) -> dict:
        playlist = Playlist(tuple(req.playlist)) if req.playlist else Playlist()
        model = layout_for_band(
            Band(req.band), _profile_from(req.profile), playlist, _chrome_from(req.chrome)
        )
        return model.to_json()

    @app.post("/api/experiment")
    def experiment(req: ExperimentRequest) -> dict:
        plan_doc = dict(req.plan)
        if req.seed is not None:
            plan_doc["base_seed"] = req.seed
        plan = ExperimentPlan.from_json(plan_doc)
        noise = GazeNoiseModel.from_json(req.sim.noise)
        search = SearchModel.from_json(req.sim.search)
        result = run_experiment(plan, noise, search, profile=_profile_from(req.profile))
        return {"summary": result.summary_json(), "csv": result.csv_text()}

    @app.post("/api/postures")
    def postures(req: PosturesRequest) -> dict:
        profiles = None
        if req.profiles is not None:
            profiles = {doc["name"]: PostureProfile.from_json(doc) for doc in req.profiles}
        summaries = run_postures(
            profiles=profiles, reps=req.reps, base_seed=req.seed, duration_ms=req.duration_ms
        )
        return {
            "postures": [s.to_json() for s in summaries],
            "csv": postures_csv_text(summaries),
        }

    @app.post("/api/replay", response_class=PlainTextResponse)
    def replay(req: ReplayRequest) -> str:
        record = replay_trace(req.trace.splitlines())
        lines = [json.dumps(record.to_json()["config"])]
        lines.extend(e.to_json_line() for e in record.events)
        return "\n".join(lines) + "\n"

    @app.websocket("/ws")
    async def ws_session(socket: WebSocket) -> None:
        await socket.accept()
        bridge: SessionBridge | None = None
        try:
            while True:
                raw = await socket.receive_text()
                try:
                    frame = client_frame_adapter.validate_json(raw)
                except (ValidationError, ValueError) as exc:
                    await socket.send_text(json.dumps({"type": "error", "msg": str(exc)}))
                    continue
                try:
                    if isinstance(frame, HelloFrame):
                        bridge = SessionBridge(frame)
                        out = [bridge.layout_frame()]
                    elif bridge is None:
                        out = [{"type": "error", "msg": "send a hello frame first"}]
                    else:
                        out = bridge.handle(frame)
                except (GauiError, ValueError) as exc:
                    out = [{"type": "error", "msg": str(exc)}]
                for doc in out:
                    await socket.send_text(json.dumps(doc))
        except WebSocketDisconnect:
            return

    if static_dir is not None and static_dir.is_dir():
        app.mount("/", StaticFiles(directory=static_dir, html=True), name="demo-ui")

    return app
