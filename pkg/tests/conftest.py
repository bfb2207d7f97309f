"""Shared fixtures: deterministic images and PNG helpers."""

from __future__ import annotations

import io

import numpy as np
import pytest
from hypothesis import HealthCheck, settings
from PIL import Image as PilImage

settings.register_profile(
    "suite",
    deadline=None,
    max_examples=75,
    derandomize=True,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("suite")


def make_rgb(height: int, width: int, seed: int = 0) -> np.ndarray:
    """Deterministic random 8-bit RGB array."""
    rng = np.random.default_rng(seed)
    return rng.integers(0, 256, (height, width, 3), dtype=np.uint8)


def png_bytes(rgb: np.ndarray, alpha: np.ndarray | None = None) -> bytes:
    buf = io.BytesIO()
    if alpha is not None:
        PilImage.fromarray(np.dstack([rgb, alpha]), "RGBA").save(buf, format="PNG")
    else:
        PilImage.fromarray(rgb, "RGB").save(buf, format="PNG")
    return buf.getvalue()


def decode_rgb(data: bytes) -> np.ndarray:
    with PilImage.open(io.BytesIO(data)) as im:
        return np.asarray(im.convert("RGB"), dtype=np.uint8)


@pytest.fixture
def small_png() -> bytes:
    return png_bytes(make_rgb(24, 32, seed=7))
