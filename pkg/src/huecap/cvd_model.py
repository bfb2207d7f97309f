"""Severity-parameterized CVD simulation.

The simulation matrices are loaded from a plain-text data file bundled with
the package (see ``data/cvd_matrices.txt`` for layout and provenance) and
verified against a SHA-256 digest so the coefficients stay auditable.
Severities between the published 0.1 grid steps are produced by element-wise
linear interpolation of the two bracketing matrices, matching how the grid
itself was generated.
"""

from __future__ import annotations

import functools
import hashlib
import math
from dataclasses import dataclass
from enum import Enum
from importlib import resources

import numpy as np

from .colorspace import Color, Encoding
from .errors import DomainError, ValidationError

__all__ = ["CvdType", "CvdProfile", "matrix_for", "correction_matrix_for", "simulate", "apply_matrix3"]

# Digest of data/cvd_matrices.txt; refuse to run on silently edited coefficients.
_DATA_SHA256 = "1931cdd159c5cbef2d2ba9ffec1f42af306af6f277990bf022ce333fde0a1dea"

_SEVERITY_STEPS = 11  # 0.0 .. 1.0 on a 0.1 grid


class CvdType(Enum):
    PROTAN = "protan"
    DEUTAN = "deutan"
    TRITAN = "tritan"
    NONE = "none"


@dataclass(frozen=True)
class CvdProfile:
    """A deficiency type plus a severity in [0, 1].

    Severity 0 means normal color vision; type NONE is only valid with
    severity 0.
    """

    cvd_type: CvdType
    severity: float = 0.0

    def __post_init__(self) -> None:
        if not isinstance(self.cvd_type, CvdType):
            raise DomainError(f"bad CVD type: {self.cvd_type!r}")
        s = float(self.severity)
        if not (math.isfinite(s) and 0.0 <= s <= 1.0):
            raise DomainError(f"severity must be in [0, 1], got {self.severity!r}")
        object.__setattr__(self, "severity", s)
        if self.cvd_type is CvdType.NONE and s != 0.0:
            raise DomainError("type 'none' requires severity 0")

    @property
    def is_identity(self) -> bool:
        return self.cvd_type is CvdType.NONE or self.severity == 0.0


@functools.lru_cache(maxsize=1)
def _tables() -> tuple[dict[CvdType, np.ndarray], dict[CvdType, np.ndarray]]:
    raw = resources.files("huecap").joinpath("data/cvd_matrices.txt").read_bytes()
    digest = hashlib.sha256(raw).hexdigest()
    if digest != _DATA_SHA256:
        raise ValidationError(
            f"cvd_matrices.txt checksum mismatch: expected {_DATA_SHA256}, got {digest}"
        )
    sims: dict[CvdType, np.ndarray] = {
        t: np.full((_SEVERITY_STEPS, 3, 3), np.nan) for t in (CvdType.PROTAN, CvdType.DEUTAN, CvdType.TRITAN)
    }
    corrections: dict[CvdType, np.ndarray] = {}
    for lineno, line in enumerate(raw.decode("ascii").splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        try:
            if parts[0] == "sim":
                cvd_type = CvdType(parts[1])
                step = round(float(parts[2]) * 10)
                values = [float(x) for x in parts[3:]]
                if len(values) != 9:
                    raise ValueError("expected 9 coefficients")
                sims[cvd_type][step] = np.array(values).reshape(3, 3)
            elif parts[0] == "correction":
                cvd_type = CvdType(parts[1])
                values = [float(x) for x in parts[2:]]
                if len(values) != 9:
                    raise ValueError("expected 9 coefficients")
                corrections[cvd_type] = np.array(values).reshape(3, 3)
            else:
                raise ValueError(f"unknown record kind {parts[0]!r}")
        except (ValueError, KeyError, IndexError) as exc:
            raise ValidationError(f"cvd_matrices.txt line {lineno}: {exc}") from exc
    for t, table in sims.items():
        if np.isnan(table).any():
            raise ValidationError(f"incomplete severity grid for {t.value}")
        table.setflags(write=False)
    for t in (CvdType.PROTAN, CvdType.DEUTAN, CvdType.TRITAN):
        if t not in corrections:
            raise ValidationError(f"missing correction matrix for {t.value}")
        corrections[t].setflags(write=False)
    return sims, corrections


def matrix_for(cvd_type: CvdType, severity: float) -> np.ndarray:
    """The 3x3 simulation matrix for a type and severity.

    Severities on the published 0.1 grid return the embedded matrix;
    intermediate severities interpolate element-wise between the two
    bracketing grid matrices.  Returns a fresh array.
    """
    if cvd_type is CvdType.NONE or not isinstance(cvd_type, CvdType):
        raise DomainError(f"no simulation matrix for type {cvd_type!r}")
    severity = float(severity)
    if not (math.isfinite(severity) and 0.0 <= severity <= 1.0):
        raise DomainError(f"severity must be in [0, 1], got {severity!r}")
    table = _tables()[0][cvd_type]
    pos = severity * 10.0
    lower = int(math.floor(pos))
    frac = pos - lower
    # Snap float noise (e.g. 0.30000000000000004) onto the grid.
    if frac < 1e-9 or lower == 10:
        return table[lower].copy()
    if frac > 1.0 - 1e-9:
        return table[lower + 1].copy()
    return (1.0 - frac) * table[lower] + frac * table[lower + 1]


def correction_matrix_for(cvd_type: CvdType) -> np.ndarray:
    """The error-redistribution matrix registered for a deficiency type."""
    if cvd_type is CvdType.NONE or not isinstance(cvd_type, CvdType):
        raise DomainError(f"no correction matrix for type {cvd_type!r}")
    return _tables()[1][cvd_type].copy()


def apply_matrix3(m, r, g, b):
    """3x3 matrix times a channel triple, with a fixed evaluation order.

    The vectorized image kernels replicate this exact term order so the
    array paths match this scalar path bit for bit; do not reorder.
    """
    return (
        m[0][0] * r + m[0][1] * g + m[0][2] * b,
        m[1][0] * r + m[1][1] * g + m[1][2] * b,
        m[2][0] * r + m[2][1] * g + m[2][2] * b,
    )


def simulate(c: Color, profile: CvdProfile) -> Color:
    """Simulated percept of a linear-RGB color, clamped to [0, 1] per channel.

    Severity 0 (or type NONE) returns the input unchanged.
    """
    c.require(Encoding.LINEAR)
    if profile.is_identity:
        return c
    m = matrix_for(profile.cvd_type, profile.severity)
    r, g, b = apply_matrix3(m, c.r, c.g, c.b)
    return Color(r, g, b, Encoding.LINEAR)
