"""Adapted Farnsworth-Munsell style hue arrangement test.

Four rows of thirteen color slots each span the hue circle between four fixed
anchor colors.  Slots 0 and 12 of each row hold the anchors; the eleven caps
between them are shuffled for the participant to re-order.  Scoring sums each
cap's absolute displacement from its target slot, and the per-row sums feed a
deficiency-type vote: rows 1 and 4 load on protan confusion axes, rows 1 and 2
on deutan, rows 3 and 4 on tritan.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from math import floor, isfinite
from typing import Any, Mapping, Sequence

from .colorspace import Color, Encoding, hsv_lerp, hsv_to_rgb, rgb_to_hsv
from .cvd_model import CvdProfile, CvdType
from .errors import DomainError, InvalidArrangement, ParseError

ROW_COUNT = 4
SLOT_COUNT = 13
CAP_COUNT = SLOT_COUNT - 2  # movable caps per row; ids and target slots run 1..11

#: Row start anchors, sRGB-encoded; row r runs from ANCHORS[r] to
#: ANCHORS[(r + 1) % 4], closing the hue circle: red, yellow-green,
#: cyan-green, blue-purple, and back to red.
ANCHORS: tuple[Color, ...] = (
    Color(0.75, 0.40, 0.40),
    Color(0.30, 0.67, 0.33),
    Color(0.10, 0.65, 0.65),
    Color(0.52, 0.46, 0.71),
)

#: Row indices (0-based) that contribute to each deficiency type's error sum.
TYPE_ROWS: dict[CvdType, tuple[int, int]] = {
    CvdType.PROTAN: (0, 3),
    CvdType.DEUTAN: (0, 1),
    CvdType.TRITAN: (2, 3),
}


@dataclass(frozen=True)
class Palette:
    """Four rows of thirteen sRGB colors; index = slot = target position.

    In each row, ``rows[r][0]`` and ``rows[r][12]`` are the fixed anchors and
    ``rows[r][k]`` for k = 1..11 is the movable cap with id k.
    """

    rows: tuple[tuple[Color, ...], ...]

    def __post_init__(self) -> None:
        if len(self.rows) != ROW_COUNT or any(len(r) != SLOT_COUNT for r in self.rows):
            raise DomainError(
                f"palette must have {ROW_COUNT} rows of {SLOT_COUNT} slots"
            )

    def cap_color(self, row: int, cap_id: int) -> Color:
        """Color of movable cap ``cap_id`` (1..11) in ``row`` (0..3)."""
        if not 0 <= row < ROW_COUNT:
            raise DomainError(f"row must be in 0..{ROW_COUNT - 1}, got {row}")
        if not 1 <= cap_id <= CAP_COUNT:
            raise DomainError(f"cap id must be in 1..{CAP_COUNT}, got {cap_id}")
        return self.rows[row][cap_id]


def _check_permutation(row: Sequence[int], index: int) -> tuple[int, ...]:
    ids = tuple(row)
    if len(ids) != CAP_COUNT or any(type(i) is not int for i in ids) or sorted(
        ids
    ) != list(range(1, CAP_COUNT + 1)):
        raise InvalidArrangement(
            f"row {index + 1} must be a permutation of cap ids 1..{CAP_COUNT}, "
            f"got {list(row)!r}"
        )
    return ids


@dataclass(frozen=True)
class Arrangement:
    """Per row, the sequence of cap ids as placed in positions 1..11.

    ``rows[r][p - 1]`` is the id of the cap the participant put at position p.
    Each row must be a true permutation of ids 1..11.
    """

    rows: tuple[tuple[int, ...], ...]

    def __post_init__(self) -> None:
        if len(self.rows) != ROW_COUNT:
            raise InvalidArrangement(f"arrangement must have {ROW_COUNT} rows")
        object.__setattr__(
            self,
            "rows",
            tuple(_check_permutation(r, i) for i, r in enumerate(self.rows)),
        )


def identity_arrangement() -> Arrangement:
    """Every cap in its target position; scores zero."""
    return Arrangement((tuple(range(1, CAP_COUNT + 1)),) * ROW_COUNT)


@dataclass(frozen=True)
class ScoreReport:
    """Displacement errors of one arrangement.

    ``cap_errors[r][i - 1]`` is cap i's |position - target| in row r;
    ``row_errors`` the per-row sums, ``total`` their sum, and ``scaled`` the
    total rescaled by 85/48 onto the classical test's error scale.  The three
    type sums pair the rows named in ``TYPE_ROWS``.
    """

    cap_errors: tuple[tuple[int, ...], ...]
    row_errors: tuple[int, int, int, int]
    total: int
    scaled: float
    protan_error: int
    deutan_error: int
    tritan_error: int


@dataclass(frozen=True)
class SeverityMap:
    """Calibration mapping from scaled error to a severity in [0, 1].

    Scaled errors below ``none_threshold`` read as no deficiency; severity
    then rises linearly, reaching 1.0 at ``max_threshold``, and is quantized
    to ``step``.  The defaults are a documented calibration choice (the
    none cutoff follows classical superior-discrimination scores), not a
    clinically validated scale; tune per deployment.
    """

    none_threshold: float = 16.0
    max_threshold: float = 200.0
    step: float = 0.1

    def __post_init__(self) -> None:
        for name in ("none_threshold", "max_threshold", "step"):
            v = float(getattr(self, name))
            if not isfinite(v):
                raise DomainError(f"{name} must be finite, got {v!r}")
            object.__setattr__(self, name, v)
        if not 0.0 < self.none_threshold < self.max_threshold:
            raise DomainError(
                "thresholds must satisfy 0 < none_threshold < max_threshold, got "
                f"{self.none_threshold!r} and {self.max_threshold!r}"
            )
        if not 0.0 < self.step <= 1.0:
            raise DomainError(f"step must be in (0, 1], got {self.step!r}")

    def severity_for(self, scaled: float) -> float:
        """Severity for a scaled error, quantized to this map's step."""
        x = (scaled - self.none_threshold) / (self.max_threshold - self.none_threshold)
        x = min(max(x, 0.0), 1.0)
        # Round to the nearest step, then strip binary representation noise
        # (e.g. 3 * 0.1 -> 0.30000000000000004) so equal severities compare equal.
        return round(round(x / self.step) * self.step, 10)


def generate_palette() -> Palette:
    """Build the four-row hue gradient between the anchors.

    Slot k of row r sits at t = k/12 along the shorter hue arc from
    ``ANCHORS[r]`` to ``ANCHORS[(r + 1) % 4]``, with saturation and value
    interpolated linearly.  The anchor slots hold the anchor colors exactly.
    """
    rows = []
    for r in range(ROW_COUNT):
        start, end = ANCHORS[r], ANCHORS[(r + 1) % ROW_COUNT]
        a, b = rgb_to_hsv(start), rgb_to_hsv(end)
        row = [start]
        for k in range(1, SLOT_COUNT - 1):
            row.append(hsv_to_rgb(hsv_lerp(a, b, k / 12.0), Encoding.SRGB))
        row.append(end)
        rows.append(tuple(row))
    return Palette(tuple(rows))


def shuffle(palette: Palette, seed: int) -> Arrangement:
    """Deterministically scatter each row's caps.

    A single Mersenne Twister generator (``random.Random(seed)``) shuffles the
    rows in order, so a stored seed replays the exact starting arrangement.
    """
    if not isinstance(palette, Palette):
        raise DomainError("shuffle expects a Palette")
    rng = random.Random(seed)
    rows = []
    for _ in range(ROW_COUNT):
        ids = list(range(1, CAP_COUNT + 1))
        rng.shuffle(ids)
        rows.append(tuple(ids))
    return Arrangement(tuple(rows))


def score(arrangement: Arrangement) -> ScoreReport:
    """Score an arrangement with exact integer arithmetic.

    Cap i's error is |position - i|; row errors sum the caps, the total sums
    the rows, and the scaled value is total * 85/48 (one correctly rounded
    division, mathematically identical to total/48 * 85).
    """
    rows = tuple(
        _check_permutation(r, i) for i, r in enumerate(getattr(arrangement, "rows", ()))
    )
    cap_errors = []
    row_errors = []
    for ids in rows:
        errors = [0] * CAP_COUNT
        for position, cap_id in enumerate(ids, start=1):
            errors[cap_id - 1] = abs(position - cap_id)
        cap_errors.append(tuple(errors))
        row_errors.append(sum(errors))
    total = sum(row_errors)
    type_sums = {
        t: row_errors[i] + row_errors[j] for t, (i, j) in TYPE_ROWS.items()
    }
    return ScoreReport(
        cap_errors=tuple(cap_errors),
        row_errors=tuple(row_errors),
        total=total,
        scaled=total * 85.0 / 48.0,
        protan_error=type_sums[CvdType.PROTAN],
        deutan_error=type_sums[CvdType.DEUTAN],
        tritan_error=type_sums[CvdType.TRITAN],
    )


def classify(report: ScoreReport, severity_map: SeverityMap | None = None) -> CvdProfile:
    """Turn a score into a deficiency profile.

    Below the map's none threshold the profile is (NONE, 0).  Otherwise the
    type is the largest of the three type sums -- ties break protan over
    deutan over tritan, the population prevalence order -- and severity comes
    from the map's linear ramp.
    """
    m = severity_map if severity_map is not None else SeverityMap()
    if report.scaled < m.none_threshold:
        return CvdProfile(CvdType.NONE, 0.0)
    sums = (
        (CvdType.PROTAN, report.protan_error),
        (CvdType.DEUTAN, report.deutan_error),
        (CvdType.TRITAN, report.tritan_error),
    )
    # max() keeps the first of equal candidates, so listing the types in
    # prevalence order implements the protan > deutan > tritan tie-break.
    best_type, _ = max(sums, key=lambda pair: pair[1])
    return CvdProfile(best_type, m.severity_for(report.scaled))


def color_to_hex(color: Color) -> str:
    """8-bit ``#RRGGBB`` form of an sRGB color (round half away from zero)."""
    color.require(Encoding.SRGB)
    parts = (int(floor(c * 255.0 + 0.5)) for c in color.channels())
    return "#" + "".join(f"{p:02X}" for p in parts)


def palette_to_dict(palette: Palette) -> dict[str, Any]:
    """JSON-ready palette listing: rows, slots, cap ids, and hex colors."""
    rows = []
    for r, row in enumerate(palette.rows):
        slots = []
        for k, color in enumerate(row):
            slot: dict[str, Any] = {
                "slot": k,
                "fixed": k == 0 or k == SLOT_COUNT - 1,
                "hex": color_to_hex(color),
            }
            if not slot["fixed"]:
                slot["cap_id"] = k
            slots.append(slot)
        rows.append({"row": r + 1, "slots": slots})
    return {"rows": rows}


def arrangement_to_dict(arrangement: Arrangement) -> dict[str, Any]:
    """JSON-ready arrangement: per-row cap id sequences."""
    return {"rows": [list(row) for row in arrangement.rows]}


def arrangement_from_dict(payload: Mapping[str, Any]) -> Arrangement:
    """Parse a per-row id sequence document.

    Raises ParseError for structural problems and InvalidArrangement when the
    shape is right but a row is not a permutation.
    """
    if not isinstance(payload, Mapping):
        raise ParseError("arrangement document must be a JSON object")
    rows = payload.get("rows")
    if not isinstance(rows, Sequence) or isinstance(rows, (str, bytes)):
        raise ParseError('arrangement document needs a "rows" array')
    if len(rows) != ROW_COUNT:
        raise ParseError(f"arrangement needs exactly {ROW_COUNT} rows, got {len(rows)}")
    cleaned = []
    for i, row in enumerate(rows):
        if not isinstance(row, Sequence) or isinstance(row, (str, bytes)):
            raise ParseError(f"row {i + 1} must be an array of cap ids")
        ids = []
        for value in row:
            # bool is an int subclass; reject it explicitly
            if isinstance(value, bool) or not isinstance(value, int):
                raise ParseError(f"row {i + 1} contains a non-integer cap id: {value!r}")
            ids.append(value)
        cleaned.append(tuple(ids))
    return Arrangement(tuple(cleaned))


def report_to_dict(report: ScoreReport) -> dict[str, Any]:
    """JSON-ready score report mirroring the type's fields."""
    return {
        "cap_errors": [list(row) for row in report.cap_errors],
        "row_errors": list(report.row_errors),
        "total": report.total,
        "scaled": report.scaled,
        "protan_error": report.protan_error,
        "deutan_error": report.deutan_error,
        "tritan_error": report.tritan_error,
    }
