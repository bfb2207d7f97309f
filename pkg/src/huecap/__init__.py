"""Personalized color-vision toolkit.

Estimates a viewer's color vision deficiency from a hue-cap arrangement
test, recolors images through severity-parameterized simulation and
daltonization, and reproduces the supporting paired-sample statistics.
"""

__version__ = "0.1.0"

from .colorspace import Color, Encoding, Hsv
from .cvd_model import CvdProfile, CvdType, matrix_for, simulate
from .daltonize import (
    Image,
    Mode,
    Space,
    correct,
    discriminability_gain,
    perception_error,
    read_png,
    recolor_image,
    recolor_png_bytes,
    write_png,
)

__all__ = [
    "__version__",
    "Color",
    "Encoding",
    "Hsv",
    "CvdProfile",
    "CvdType",
    "matrix_for",
    "simulate",
    "Image",
    "Mode",
    "Space",
    "correct",
    "discriminability_gain",
    "perception_error",
    "read_png",
    "recolor_image",
    "recolor_png_bytes",
    "write_png",
]
