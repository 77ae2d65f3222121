"""Paginated media-player geometry and hit-testing.

List items span the full screen width with a height subtending 4 degrees at
the band's reference distance; the three control buttons (page-left,
play/pause, page-right) are 3 x 5 degrees each, bottom-anchored and centered
with a 0.5 degree gap. Because item height grows with the band, fewer items
fit per page and the playlist spreads over more pages.

Pages are indexed 0-based everywhere inside the engine; ``page_of_track``
speaks 1-based on both ends because its contract is the arithmetic
ceil(track / items_per_page).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from enum import Enum

from .adaptation import Band
from .dwell import CONTROL_DWELL_MS, TRACK_DWELL_MS, TargetHit
from .errors import ConfigurationError
from .geometry import DisplayProfile, angle_to_px

ITEM_HEIGHT_DEG = 4.0
CONTROL_WIDTH_DEG = 3.0
CONTROL_HEIGHT_DEG = 5.0
CONTROL_GAP_DEG = 0.5

NAV_LEFT_ID = "nav_left"
NAV_RIGHT_ID = "nav_right"
PLAY_PAUSE_ID = "play_pause"

DEFAULT_TRACK_TITLES = (
    "Aurora", "Breeze", "Cascade", "Drift", "Ember", "Falcon", "Glacier",
    "Horizon", "Indigo", "Jubilee", "Karma", "Lagoon", "Meadow", "Nebula",
    "Oasis", "Pulse", "Quartz", "Ripple", "Solstice", "Tundra", "Umbra",
    "Velvet", "Willow", "Xenon", "Yonder", "Zephyr", "Canyon", "Dune",
    "Mirage", "Prism",
)


class TargetKind(Enum):
    TRACK = "track"
    NAV_LEFT = "nav_left"
    NAV_RIGHT = "nav_right"
    PLAY_PAUSE = "play_pause"


@dataclass(frozen=True)
class Rect:
    x: float
    y: float
    w: float
    h: float

    def contains(self, px: float, py: float) -> bool:
        """Top/left edges inclusive, bottom/right exclusive."""
        return self.x <= px < self.x + self.w and self.y <= py < self.y + self.h

    @property
    def center(self) -> tuple[float, float]:
        return (self.x + self.w / 2.0, self.y + self.h / 2.0)

    def overlaps(self, other: "Rect") -> bool:
        return not (
            self.x + self.w <= other.x
            or other.x + other.w <= self.x
            or self.y + self.h <= other.y
            or other.y + other.h <= self.y
        )


@dataclass(frozen=True)
class TargetSpec:
    id: str
    kind: TargetKind
    rect: Rect
    dwell_threshold_ms: int
    track_index: int | None = None  # 0-based playlist position, TRACK only
    title: str | None = None

    def to_json(self) -> dict:
        doc = {
            "id": self.id,
            "kind": self.kind.value,
            "x": self.rect.x,
            "y": self.rect.y,
            "w": self.rect.w,
            "h": self.rect.h,
            "dwell_threshold_ms": self.dwell_threshold_ms,
        }
        if self.track_index is not None:
            doc["track_index"] = self.track_index
        if self.title is not None:
            doc["title"] = self.title
        return doc


@dataclass(frozen=True)
class Playlist:
    """Ordered soundtrack titles; single words so they can be read at a glance."""

    titles: tuple[str, ...] = DEFAULT_TRACK_TITLES

    def __post_init__(self) -> None:
        if len(self.titles) < 1:
            raise ValueError("playlist needs at least one track")
        if len(set(self.titles)) != len(self.titles):
            raise ValueError("track titles must be unique")

    @property
    def count(self) -> int:
        return len(self.titles)

    def shuffled(self, rng) -> "Playlist":
        order = list(self.titles)
        rng.shuffle(order)
        return Playlist(titles=tuple(order))


@dataclass(frozen=True)
class ChromeConfig:
    """Non-target chrome around the list: header area and control spacing.

    Defaults are calibrated once against the default display so the three
    bands show 4 / 3 / 2 items per page.
    """

    header_px: float = 850.0
    control_margin_px: float = 50.0
    bottom_margin_px: float = 0.0


DEFAULT_CHROME = ChromeConfig()


@dataclass(frozen=True)
class LayoutModel:
    band: Band
    profile: DisplayProfile
    playlist: Playlist
    items_per_page: int
    page_count: int
    pages: tuple[tuple[TargetSpec, ...], ...]
    control_bar: tuple[TargetSpec, TargetSpec, TargetSpec]  # nav_left, play_pause, nav_right
    item_height_px: float = field(compare=False, default=0.0)

    def page_targets(self, page: int, include_disabled: bool = False) -> list[TargetSpec]:
        """All hit-testable targets on a 0-based page."""
        if not (0 <= page < self.page_count):
            raise ValueError(f"page {page} out of range [0, {self.page_count})")
        targets = list(self.pages[page])
        for spec in self.control_bar:
            if include_disabled or self.control_enabled(spec.id, page):
                targets.append(spec)
        return targets

    def control_enabled(self, target_id: str, page: int) -> bool:
        """Navigation does not wrap: left is dead on the first page, right on the last."""
        if target_id == NAV_LEFT_ID:
            return page > 0
        if target_id == NAV_RIGHT_ID:
            return page < self.page_count - 1
        return True

    def find_target(self, target_id: str) -> TargetSpec | None:
        for page in self.pages:
            for spec in page:
                if spec.id == target_id:
                    return spec
        for spec in self.control_bar:
            if spec.id == target_id:
                return spec
        return None

    def to_json(self) -> dict:
        return {
            "band": self.band.value,
            "items_per_page": self.items_per_page,
            "page_count": self.page_count,
            "pages": [[t.to_json() for t in page] for page in self.pages],
            "controls": [t.to_json() for t in self.control_bar],
        }

    def to_json_str(self, indent: int | None = 2) -> str:
        return json.dumps(self.to_json(), indent=indent)


def track_id(index: int) -> str:
    return f"track:{index}"


def layout_for_band(
    band: Band,
    profile: DisplayProfile,
    playlist: Playlist | None = None,
    chrome: ChromeConfig = DEFAULT_CHROME,
) -> LayoutModel:
    """Deterministic geometry for one band on one display.

    Raises ConfigurationError when the viewport cannot fit at least one list
    item plus the control bar.
    """
    playlist = playlist or Playlist()
    ref = band.reference_distance_cm
    item_h = angle_to_px(ITEM_HEIGHT_DEG, ref, profile)
    btn_w = angle_to_px(CONTROL_WIDTH_DEG, ref, profile)
    btn_h = angle_to_px(CONTROL_HEIGHT_DEG, ref, profile)
    gap = angle_to_px(CONTROL_GAP_DEG, ref, profile)

    control_top = profile.height_px - chrome.bottom_margin_px - btn_h
    viewport_top = chrome.header_px
    viewport_h = control_top - chrome.control_margin_px - viewport_top
    if viewport_h < item_h:
        raise ConfigurationError(
            f"viewport of {viewport_h:.1f} px cannot fit one {item_h:.1f} px item "
            f"for band {band.value} on {profile.name}"
        )
    bar_w = 3 * btn_w + 2 * gap
    if bar_w > profile.width_px or control_top < 0:
        raise ConfigurationError(
            f"control bar does not fit: {bar_w:.1f} px wide, top at {control_top:.1f} px"
        )

    items_per_page = max(1, math.floor(viewport_h / item_h))
    page_count = math.ceil(playlist.count / items_per_page)

    pages: list[tuple[TargetSpec, ...]] = []
    for page in range(page_count):
        specs = []
        start = page * items_per_page
        for slot, index in enumerate(range(start, min(start + items_per_page, playlist.count))):
            rect = Rect(x=0.0, y=viewport_top + slot * item_h, w=float(profile.width_px), h=item_h)
            specs.append(
                TargetSpec(
                    id=track_id(index),
                    kind=TargetKind.TRACK,
                    rect=rect,
                    dwell_threshold_ms=TRACK_DWELL_MS,
                    track_index=index,
                    title=playlist.titles[index],
                )
            )
        pages.append(tuple(specs))

    x0 = (profile.width_px - bar_w) / 2.0
    controls = []
    for i, (tid, kind) in enumerate(
        [
            (NAV_LEFT_ID, TargetKind.NAV_LEFT),
            (PLAY_PAUSE_ID, TargetKind.PLAY_PAUSE),
            (NAV_RIGHT_ID, TargetKind.NAV_RIGHT),
        ]
    ):
        rect = Rect(x=x0 + i * (btn_w + gap), y=control_top, w=btn_w, h=btn_h)
        controls.append(
            TargetSpec(id=tid, kind=kind, rect=rect, dwell_threshold_ms=CONTROL_DWELL_MS)
        )

    return LayoutModel(
        band=band,
        profile=profile,
        playlist=playlist,
        items_per_page=items_per_page,
        page_count=page_count,
        pages=tuple(pages),
        control_bar=(controls[0], controls[1], controls[2]),
        item_height_px=item_h,
    )


def hit_test(model: LayoutModel, page: int, x_px: float, y_px: float) -> TargetHit | None:
    """The unique target on a 0-based page containing the point, if any.

    Disabled navigation buttons are not hit-testable. Rect edges are
    inclusive on top/left and exclusive on bottom/right, so adjacent targets
    never both claim a point.
    """
    for spec in model.pages[page]:
        if spec.rect.contains(x_px, y_px):
            return TargetHit(spec.id, spec.dwell_threshold_ms)
    for spec in model.control_bar:
        if model.control_enabled(spec.id, page) and spec.rect.contains(x_px, y_px):
            return TargetHit(spec.id, spec.dwell_threshold_ms)
    return None


def page_of_track(model: LayoutModel, track_index: int) -> int:
    """1-based page holding the 1-based track index: ceil(track / items_per_page)."""
    if not (1 <= track_index <= model.playlist.count):
        raise ValueError(f"track index {track_index} out of range [1, {model.playlist.count}]")
    return math.ceil(track_index / model.items_per_page)
