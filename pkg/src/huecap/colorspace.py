"""Scalar color math: sRGB transfer functions, hexcone HSV, hue-arc interpolation.

Channel values are floats in [0, 1].  ``Color`` carries an explicit encoding
tag (display sRGB vs. linear light) so the two spaces cannot be mixed
silently; operations declare the encoding they expect and raise
``EncodingMismatch`` otherwise.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

from .errors import DomainError, EncodingMismatch

__all__ = [
    "Encoding",
    "Color",
    "Hsv",
    "linearize_channel",
    "delinearize_channel",
    "srgb_to_linear",
    "linear_to_srgb",
    "rgb_to_hsv",
    "hsv_to_rgb",
    "hsv_lerp",
]


class Encoding(Enum):
    """Pixel encoding: display (gamma-encoded) sRGB or linear light."""

    SRGB = "srgb"
    LINEAR = "linear"


def _channel(x: float) -> float:
    x = float(x)
    if not math.isfinite(x):
        raise DomainError(f"channel value must be finite, got {x!r}")
    return min(max(x, 0.0), 1.0)


@dataclass(frozen=True)
class Color:
    """An RGB triple with an encoding tag.  Channels are clamped to [0, 1]."""

    r: float
    g: float
    b: float
    encoding: Encoding = Encoding.SRGB

    def __post_init__(self) -> None:
        object.__setattr__(self, "r", _channel(self.r))
        object.__setattr__(self, "g", _channel(self.g))
        object.__setattr__(self, "b", _channel(self.b))
        if not isinstance(self.encoding, Encoding):
            raise DomainError(f"bad encoding tag: {self.encoding!r}")

    def channels(self) -> tuple[float, float, float]:
        return (self.r, self.g, self.b)

    def require(self, encoding: Encoding) -> None:
        if self.encoding is not encoding:
            raise EncodingMismatch(
                f"expected a {encoding.value}-encoded color, got {self.encoding.value}"
            )


@dataclass(frozen=True)
class Hsv:
    """Hue in degrees [0, 360), saturation and value in [0, 1].

    Achromatic colors carry hue 0 by convention.
    """

    h: float
    s: float
    v: float

    def __post_init__(self) -> None:
        h = float(self.h)
        if not math.isfinite(h):
            raise DomainError(f"hue must be finite, got {h!r}")
        object.__setattr__(self, "h", h % 360.0)
        object.__setattr__(self, "s", _channel(self.s))
        object.__setattr__(self, "v", _channel(self.v))


# IEC 61966-2-1 sRGB transfer function breakpoints.
_SRGB_CUTOFF = 0.04045
_LINEAR_CUTOFF = 0.0031308


def linearize_channel(u: float) -> float:
    """sRGB electro-optical transfer: one gamma-encoded channel to linear light."""
    if u <= _SRGB_CUTOFF:
        return u / 12.92
    return ((u + 0.055) / 1.055) ** 2.4


def delinearize_channel(v: float) -> float:
    """Inverse transfer: one linear-light channel back to gamma-encoded sRGB."""
    if v <= _LINEAR_CUTOFF:
        return v * 12.92
    if v >= 1.0:
        # 1.055 - 0.055 rounds below 1.0 in binary floating point; white must
        # stay a fixed point of the transfer pair.
        return v
    return 1.055 * v ** (1.0 / 2.4) - 0.055


def srgb_to_linear(c: Color) -> Color:
    c.require(Encoding.SRGB)
    return Color(
        linearize_channel(c.r),
        linearize_channel(c.g),
        linearize_channel(c.b),
        Encoding.LINEAR,
    )


def linear_to_srgb(c: Color) -> Color:
    c.require(Encoding.LINEAR)
    return Color(
        delinearize_channel(c.r),
        delinearize_channel(c.g),
        delinearize_channel(c.b),
        Encoding.SRGB,
    )


def rgb_to_hsv(c: Color) -> Hsv:
    """Hexcone HSV of an RGB triple; the encoding tag is ignored (pure geometry)."""
    r, g, b = c.channels()
    maxc = max(r, g, b)
    minc = min(r, g, b)
    diff = maxc - minc
    if diff == 0.0:
        return Hsv(0.0, 0.0, maxc)
    if maxc == r:
        h = 60.0 * (((g - b) / diff) % 6.0)
    elif maxc == g:
        h = 60.0 * ((b - r) / diff + 2.0)
    else:
        h = 60.0 * ((r - g) / diff + 4.0)
    return Hsv(h, diff / maxc, maxc)


def hsv_to_rgb(hsv: Hsv, encoding: Encoding = Encoding.SRGB) -> Color:
    """Hexcone HSV back to RGB, tagged with the requested encoding."""
    h = hsv.h % 360.0
    c = hsv.v * hsv.s
    hp = h / 60.0
    x = c * (1.0 - abs(hp % 2.0 - 1.0))
    sector = int(hp) % 6
    r1, g1, b1 = (
        (c, x, 0.0),
        (x, c, 0.0),
        (0.0, c, x),
        (0.0, x, c),
        (x, 0.0, c),
        (c, 0.0, x),
    )[sector]
    m = hsv.v - c
    return Color(r1 + m, g1 + m, b1 + m, encoding)


def hsv_lerp(a: Hsv, b: Hsv, t: float) -> Hsv:
    """Interpolate hue along the shorter circular arc; saturation and value linearly.

    A hue gap of exactly 180 degrees breaks toward increasing hue.  The
    endpoints are returned exactly at t = 0 and t = 1.
    """
    t = float(t)
    if not (0.0 <= t <= 1.0) or not math.isfinite(t):
        raise DomainError(f"interpolation parameter must be in [0, 1], got {t!r}")
    if t == 0.0:
        return a
    if t == 1.0:
        return b
    arc = (b.h - a.h) % 360.0
    if arc > 180.0:
        arc -= 360.0
    return Hsv(
        (a.h + t * arc) % 360.0,
        a.s + t * (b.s - a.s),
        a.v + t * (b.v - a.v),
    )
