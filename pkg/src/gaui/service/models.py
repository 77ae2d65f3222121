"""Pydantic request/response models and demo wire frames.

The demo protocol is newline-framed JSON over a persistent bidirectional
stream (served as a WebSocket, one frame per message). Client frames are a
discriminated union on ``type``; server frames are plain JSON documents
assembled by the session bridge.
"""

from __future__ import annotations

from typing import Annotated, Literal, Union

from pydantic import BaseModel, Field, TypeAdapter


class ProfileDoc(BaseModel):
    name: str = "display"
    width_px: int
    height_px: int
    ppi: float


class ChromeDoc(BaseModel):
    header_px: float = 850.0
    control_margin_px: float = 50.0
    bottom_margin_px: float = 0.0


# -- client -> server frames ---------------------------------------------------


class HelloFrame(BaseModel):
    type: Literal["hello"]
    interface: str = "adaptive"
    profile: ProfileDoc | None = None
    chrome: ChromeDoc | None = None
    initial_distance_cm: float = 32.0
    playlist: list[str] | None = None


class GazeFrame(BaseModel):
    type: Literal["gaze"]
    t_ms: int
    x: float
    y: float
    valid: bool = True


class DistanceFrame(BaseModel):
    type: Literal["distance"]
    t_ms: int
    cm: float


class EsmAnswerFrame(BaseModel):
    type: Literal["esm_answer"]
    t_ms: int = 0
    answers: dict


class ResetFrame(BaseModel):
    type: Literal["reset"]


ClientFrame = Annotated[
    Union[HelloFrame, GazeFrame, DistanceFrame, EsmAnswerFrame, ResetFrame],
    Field(discriminator="type"),
]

client_frame_adapter: TypeAdapter = TypeAdapter(ClientFrame)


# -- REST bodies ----------------------------------------------------------------


class LayoutRequest(BaseModel):
    band: Literal["small", "medium", "large"]
    profile: ProfileDoc | None = None
    chrome: ChromeDoc | None = None
    playlist: list[str] | None = None


class SimDoc(BaseModel):
    noise: dict = Field(default_factory=dict)
    search: dict = Field(default_factory=dict)


class ExperimentRequest(BaseModel):
    plan: dict = Field(default_factory=dict)
    sim: SimDoc = Field(default_factory=SimDoc)
    profile: ProfileDoc | None = None
    seed: int | None = None


class PosturesRequest(BaseModel):
    reps: int = 100
    seed: int = 42
    profiles: list[dict] | None = None
    duration_ms: int = 120_000


class ReplayRequest(BaseModel):
    trace: str  # JSON-lines text: config header then sample lines
