"""Stable seed derivation so partial reruns and parallel execution reproduce."""

from __future__ import annotations

import hashlib


def stable_seed(*parts: object) -> int:
    """Platform-independent 63-bit seed from a tuple of coordinates."""
    text = "\x1f".join(str(p) for p in parts)
    digest = hashlib.sha256(text.encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "big") >> 1
