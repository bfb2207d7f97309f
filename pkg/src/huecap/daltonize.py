"""Three-stage recoloring: simulate the deficient percept, measure the lost
color, redistribute it onto intact channels.

The scalar operations define the contract; ``recolor_image`` applies the same
chain per pixel through the selected kernel (see ``_engine``) and is
bit-identical to the scalar path.  PNG read/write (8-bit RGB/RGBA, alpha
passed through untouched) is this module's interchange surface.
"""

from __future__ import annotations

import io
import math
from dataclasses import dataclass
from enum import Enum
from typing import Sequence

import numpy as np
from PIL import Image as _PilImage

from . import _engine
from .colorspace import Color, Encoding
from .cvd_model import CvdProfile, CvdType, apply_matrix3, correction_matrix_for, matrix_for, simulate
from .errors import DomainError, ParseError

__all__ = [
    "Mode",
    "Space",
    "Image",
    "GainReport",
    "perception_error",
    "correct",
    "recolor_image",
    "discriminability_gain",
    "quantize_u8",
    "read_png",
    "write_png",
    "decode_png",
    "encode_png",
    "recolor_u8",
    "recolor_png_bytes",
    "CONFUSION_SETS",
]


class Mode(Enum):
    CORRECT = "correct"
    SIMULATE = "simulate"


class Space(Enum):
    """Working space for the per-pixel transform.

    LINEAR decodes sRGB to linear light before applying the matrices (the
    physiologically meaningful default); GAMMA applies them directly to the
    gamma-encoded values, reproducing naive shader behavior for comparison.
    """

    LINEAR = "linear"
    GAMMA = "gamma"


def perception_error(c: Color, profile: CvdProfile) -> np.ndarray:
    """Color information lost to the simulated percept: original minus simulated.

    Unclamped; components may be negative.
    """
    c.require(Encoding.LINEAR)
    sim = simulate(c, profile)
    return np.array([c.r - sim.r, c.g - sim.g, c.b - sim.b])


def correct(c: Color, profile: CvdProfile, correction: np.ndarray | None = None) -> Color:
    """Corrected color: the perception error, redistributed through the type's
    correction matrix, added back onto the original.  Severity 0 returns the
    input unchanged; the result is clamped per channel.
    """
    c.require(Encoding.LINEAR)
    if profile.is_identity:
        return c
    if correction is None:
        correction = correction_matrix_for(profile.cvd_type)
    e = perception_error(c, profile)
    dr, dg, db = apply_matrix3(correction, e[0], e[1], e[2])
    return Color(c.r + dr, c.g + dg, c.b + db, Encoding.LINEAR)


@dataclass
class Image:
    """A row-major grid of sRGB-encoded pixels with optional 8-bit alpha."""

    pixels: np.ndarray  # (height, width, 3) float64 in [0, 1]
    alpha: np.ndarray | None = None  # (height, width) uint8, never transformed

    def __post_init__(self) -> None:
        px = np.asarray(self.pixels, dtype=np.float64)
        if px.ndim != 3 or px.shape[2] != 3 or px.shape[0] < 1 or px.shape[1] < 1:
            raise DomainError(
                f"pixel buffer must be (height, width, 3) with positive dimensions, got {px.shape}"
            )
        if not np.isfinite(px).all():
            raise DomainError("pixel buffer contains non-finite values")
        self.pixels = np.clip(px, 0.0, 1.0)
        if self.alpha is not None:
            a = np.asarray(self.alpha, dtype=np.uint8)
            if a.shape != px.shape[:2]:
                raise DomainError(f"alpha shape {a.shape} does not match pixels {px.shape[:2]}")
            self.alpha = a

    @property
    def height(self) -> int:
        return self.pixels.shape[0]

    @property
    def width(self) -> int:
        return self.pixels.shape[1]


def _copy_alpha(img: Image) -> np.ndarray | None:
    return None if img.alpha is None else img.alpha.copy()


def recolor_image(img: Image, profile: CvdProfile, mode: Mode = Mode.CORRECT,
                  space: Space = Space.LINEAR, *, workers: int | None = None,
                  kernel: str | None = None, correction: np.ndarray | None = None) -> Image:
    """Transform every pixel independently; output dimensions equal input.

    Deterministic: output is bit-identical for any worker count and for
    either kernel.  Severity 0 returns an unmodified copy.
    """
    if not isinstance(mode, Mode) or not isinstance(space, Space):
        raise DomainError("mode and space must be Mode / Space members")
    if profile.is_identity:
        return Image(img.pixels.copy(), _copy_alpha(img))
    sim = matrix_for(profile.cvd_type, profile.severity)
    do_correct = mode is Mode.CORRECT
    if do_correct and correction is None:
        correction = correction_matrix_for(profile.cvd_type)
    out = _engine.recolor_array(img.pixels, sim, correction if do_correct else None,
                                do_correct, space is Space.LINEAR, workers, kernel)
    return Image(out, _copy_alpha(img))


@dataclass(frozen=True)
class GainReport:
    """Mean figure-to-ground separation as perceived, before and after correction."""

    pre: float
    post: float
    gain: float


def _mean_cross_distance(left: Sequence[Color], right: Sequence[Color]) -> float:
    total = 0.0
    for a in left:
        for b in right:
            total += math.dist(a.channels(), b.channels())
    return total / (len(left) * len(right))


def discriminability_gain(figure: Sequence[Color], ground: Sequence[Color],
                          profile: CvdProfile,
                          correction: np.ndarray | None = None) -> GainReport:
    """How much the correction separates two color sets for the simulated viewer.

    ``pre`` is the mean pairwise linear-RGB distance between the simulated
    figure and ground colors; ``post`` is the same after correcting first;
    ``gain = post - pre``.
    """
    figure = list(figure)
    ground = list(ground)
    if not figure or not ground:
        raise DomainError("figure and ground color sets must be non-empty")
    for c in (*figure, *ground):
        c.require(Encoding.LINEAR)
    sim_f = [simulate(c, profile) for c in figure]
    sim_g = [simulate(c, profile) for c in ground]
    pre = _mean_cross_distance(sim_f, sim_g)
    post_f = [simulate(correct(c, profile, correction), profile) for c in figure]
    post_g = [simulate(correct(c, profile, correction), profile) for c in ground]
    post = _mean_cross_distance(post_f, post_g)
    return GainReport(pre, post, post - pre)


def _lin(r: float, g: float, b: float) -> Color:
    return Color(r, g, b, Encoding.LINEAR)


# Figure/ground sets straddling each type's confusion axis (the near-null
# direction of the severity-1.0 matrix): red vs. green for protan and deutan,
# blue vs. yellow for tritan.  Each pair simulates to nearly the same percept,
# so any working correction must increase their separation.
CONFUSION_SETS: dict[CvdType, tuple[tuple[Color, ...], tuple[Color, ...]]] = {
    CvdType.PROTAN: (
        (_lin(0.90, 0.29, 0.20), _lin(0.85, 0.31, 0.25), _lin(0.95, 0.25, 0.15)),
        (_lin(0.10, 0.41, 0.20), _lin(0.15, 0.41, 0.25), _lin(0.20, 0.36, 0.15)),
    ),
    CvdType.DEUTAN: (
        (_lin(0.90, 0.23, 0.22), _lin(0.85, 0.28, 0.25), _lin(0.95, 0.20, 0.18)),
        (_lin(0.16, 0.54, 0.20), _lin(0.11, 0.59, 0.23), _lin(0.21, 0.51, 0.16)),
    ),
    CvdType.TRITAN: (
        (_lin(0.51, 0.33, 0.98), _lin(0.47, 0.38, 0.90), _lin(0.55, 0.30, 0.95)),
        (_lin(0.39, 0.57, 0.02), _lin(0.35, 0.62, 0.05), _lin(0.43, 0.54, 0.10)),
    ),
}


def quantize_u8(pixels: np.ndarray) -> np.ndarray:
    """8-bit quantization, rounding half away from zero (channels are >= 0)."""
    return np.floor(np.asarray(pixels, dtype=np.float64) * 255.0 + 0.5).astype(np.uint8)


def _decode_pil(im: _PilImage.Image) -> tuple[np.ndarray, np.ndarray | None]:
    has_alpha = im.mode in ("RGBA", "LA", "PA") or (
        im.mode == "P" and "transparency" in im.info
    )
    converted = im.convert("RGBA" if has_alpha else "RGB")
    arr = np.asarray(converted, dtype=np.uint8)
    alpha = arr[..., 3].copy() if has_alpha else None
    return np.ascontiguousarray(arr[..., :3]), alpha


def _open_image(source) -> _PilImage.Image:
    try:
        im = _PilImage.open(source)
        # force pixel decoding now: PIL defers it, and truncated payloads
        # only fail at this point
        im.load()
        return im
    except FileNotFoundError:
        raise
    except Exception as exc:
        raise ParseError(f"could not decode image: {exc}") from exc


def read_png(source) -> Image:
    """Read a PNG (path or file object) into a float image; alpha is preserved.

    Raises ParseError when the payload is not a decodable image.
    """
    with _open_image(source) as im:
        rgb, alpha = _decode_pil(im)
    return Image(rgb.astype(np.float64) / 255.0, alpha)


def _encode_png(rgb_u8: np.ndarray, alpha: np.ndarray | None, target) -> None:
    if alpha is not None:
        arr = np.dstack([rgb_u8, alpha])
        _PilImage.fromarray(arr, "RGBA").save(target, format="PNG")
    else:
        _PilImage.fromarray(rgb_u8, "RGB").save(target, format="PNG")


def write_png(img: Image, target) -> None:
    """Write an image as 8-bit PNG (RGBA when alpha is present)."""
    _encode_png(quantize_u8(img.pixels), img.alpha, target)


def decode_png(source) -> tuple[np.ndarray, np.ndarray | None]:
    """Decode a PNG (path, file object, or BytesIO) to 8-bit RGB plus alpha."""
    with _open_image(source) as im:
        return _decode_pil(im)


def encode_png(rgb_u8: np.ndarray, alpha: np.ndarray | None = None) -> bytes:
    """Encode an 8-bit RGB array (RGBA when alpha is given) as PNG bytes."""
    buf = io.BytesIO()
    _encode_png(np.ascontiguousarray(rgb_u8, dtype=np.uint8), alpha, buf)
    return buf.getvalue()


def recolor_u8(rgb: np.ndarray, profile: CvdProfile, mode: Mode = Mode.CORRECT,
               space: Space = Space.LINEAR, *, workers: int | None = None,
               kernel: str | None = None) -> np.ndarray:
    """Transform an (h, w, 3) uint8 array on the fused 8-bit path.

    Bit-equal to the float pipeline followed by quantization, with no
    per-pixel transfer-function pow calls.  Severity 0 returns a copy.
    """
    if not isinstance(mode, Mode) or not isinstance(space, Space):
        raise DomainError("mode and space must be Mode / Space members")
    rgb = np.ascontiguousarray(rgb, dtype=np.uint8)
    if profile.is_identity:
        return rgb.copy()
    sim = matrix_for(profile.cvd_type, profile.severity)
    do_correct = mode is Mode.CORRECT
    corr = correction_matrix_for(profile.cvd_type) if do_correct else None
    return _engine.recolor_array_u8(rgb, sim, corr, do_correct,
                                    space is Space.LINEAR, workers, kernel)


def recolor_png_bytes(data: bytes, profile: CvdProfile, mode: Mode = Mode.CORRECT,
                      space: Space = Space.LINEAR, *, workers: int | None = None,
                      kernel: str | None = None) -> bytes:
    """Decode a PNG, recolor it on the fused 8-bit path, re-encode.

    Produces the same bytes as read_png -> recolor_image -> write_png.
    """
    rgb, alpha = decode_png(io.BytesIO(data))
    out = recolor_u8(rgb, profile, mode, space, workers=workers, kernel=kernel)
    return encode_png(out, alpha)
