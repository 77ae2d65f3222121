"""Visual-angle geometry: degrees <-> physical size (cm) <-> screen pixels.

All layout math runs in real-valued pixels; rounding to integer pixels is a
render/hit-test concern and uses round-half-away-from-zero (`round_px`).
The angular conversion is exact (2 * d * tan(theta / 2)), never the
small-angle approximation.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path

CM_PER_INCH = 2.54

# Distances outside this window are treated as sensor garbage.
MIN_DISTANCE_CM = 5.0
MAX_DISTANCE_CM = 200.0


@dataclass(frozen=True)
class DisplayProfile:
    """Physical and pixel description of the screen everything is laid out on."""

    width_px: int
    height_px: int
    pixels_per_cm: float
    name: str = "display"

    def __post_init__(self) -> None:
        if self.width_px <= 0 or self.height_px <= 0:
            raise ValueError(f"display dimensions must be positive: {self.width_px}x{self.height_px}")
        if not (self.pixels_per_cm > 0 and math.isfinite(self.pixels_per_cm)):
            raise ValueError(f"pixels_per_cm must be finite and positive: {self.pixels_per_cm}")

    @property
    def width_cm(self) -> float:
        return self.width_px / self.pixels_per_cm

    @property
    def height_cm(self) -> float:
        return self.height_px / self.pixels_per_cm

    @classmethod
    def from_json(cls, doc: dict | str | Path) -> "DisplayProfile":
        """Load a profile from ``{"name", "width_px", "height_px", "ppi"}``.

        ``pixels_per_cm`` is derived as ppi / 2.54. Accepts a parsed dict, a
        JSON string, or a path to a JSON file.
        """
        if isinstance(doc, Path):
            doc = json.loads(doc.read_text())
        elif isinstance(doc, str):
            doc = json.loads(doc)
        return cls(
            width_px=int(doc["width_px"]),
            height_px=int(doc["height_px"]),
            pixels_per_cm=float(doc["ppi"]) / CM_PER_INCH,
            name=str(doc.get("name", "display")),
        )

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "width_px": self.width_px,
            "height_px": self.height_px,
            "ppi": self.pixels_per_cm * CM_PER_INCH,
        }


# A 6.7-inch 460 ppi handset: 1290x2796 px, 181.10 px/cm.
DEFAULT_PROFILE = DisplayProfile(
    width_px=1290,
    height_px=2796,
    pixels_per_cm=460.0 / CM_PER_INCH,
    name="handheld-6.7in",
)


def validate_angle(theta_deg: float) -> float:
    if not (0.0 < theta_deg < 90.0):
        raise ValueError(f"visual angle must be in (0, 90) degrees, got {theta_deg}")
    return theta_deg


def validate_distance(distance_cm: float) -> float:
    if not (MIN_DISTANCE_CM <= distance_cm <= MAX_DISTANCE_CM):
        raise ValueError(
            f"viewing distance {distance_cm} cm outside plausible range "
            f"[{MIN_DISTANCE_CM}, {MAX_DISTANCE_CM}]"
        )
    return distance_cm


def clamp_distance(distance_cm: float) -> float:
    """Clamp a raw sensor reading into the plausible distance window."""
    return min(max(distance_cm, MIN_DISTANCE_CM), MAX_DISTANCE_CM)


def angle_to_physical(theta_deg: float, distance_cm: float) -> float:
    """Physical extent (cm) subtending ``theta_deg`` at ``distance_cm``.

    Exact formula: 2 * d * tan(theta / 2). Strictly increasing in both
    arguments over the valid domain.
    """
    validate_angle(theta_deg)
    validate_distance(distance_cm)
    return 2.0 * distance_cm * math.tan(math.radians(theta_deg) / 2.0)


def physical_to_px(size_cm: float, profile: DisplayProfile) -> float:
    if size_cm < 0:
        raise ValueError(f"physical size must be non-negative, got {size_cm}")
    return size_cm * profile.pixels_per_cm


def px_to_physical(size_px: float, profile: DisplayProfile) -> float:
    return size_px / profile.pixels_per_cm


def angle_to_px(theta_deg: float, distance_cm: float, profile: DisplayProfile) -> float:
    """Pixel extent of ``theta_deg`` at ``distance_cm`` on ``profile``."""
    return physical_to_px(angle_to_physical(theta_deg, distance_cm), profile)


def round_px(value: float) -> int:
    """Round half away from zero, for render/hit-test boundaries."""
    return int(math.floor(value + 0.5)) if value >= 0 else -int(math.floor(-value + 0.5))
