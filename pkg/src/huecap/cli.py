"""Command-line front end: recoloring, palette and scoring utilities,
statistics reproduction, kernel benchmark, and the service launcher.

Exit codes: 0 on success, 1 for runtime and I/O failures, 2 for usage,
parse, and validation errors.
"""

from __future__ import annotations

import io
import json
import math
import sys
import time
from pathlib import Path

import click

from . import __version__, daltonize, fm100, stats
from ._engine import active_kernel, available_kernels
from .cvd_model import CvdProfile, CvdType
from .errors import HuecapError, InvalidArrangement, ParseError, ValidationError

_TYPE_CHOICES = click.Choice([t.value for t in CvdType], case_sensitive=False)
_SPACE_CHOICES = click.Choice([s.value for s in daltonize.Space], case_sensitive=False)


def parse_severity(text: str) -> float:
    """Severity from either a 0-1 fraction or a 0-100 percent.

    Values above 1 are read as percentages, matching how severities are
    usually quoted (e.g. "50" means 0.5); 1.0 itself means full severity.
    """
    try:
        value = float(text)
    except ValueError:
        raise click.BadParameter(f"severity must be a number, got {text!r}")
    if not math.isfinite(value) or value < 0.0:
        raise click.BadParameter(f"severity must be non-negative, got {text!r}")
    if value > 1.0:
        if value > 100.0:
            raise click.BadParameter(
                f"severity percent must be at most 100, got {text!r}"
            )
        value /= 100.0
    return value


def _profile_from_flags(type_name: str, severity_text: str | None) -> CvdProfile:
    cvd_type = CvdType(type_name.lower())
    if cvd_type is CvdType.NONE:
        if severity_text is not None and parse_severity(severity_text) != 0.0:
            raise click.BadParameter("severity must be 0 when --type none")
        return CvdProfile(CvdType.NONE, 0.0)
    if severity_text is None:
        raise click.UsageError("--severity is required for this type")
    return CvdProfile(cvd_type, parse_severity(severity_text))


@click.group()
@click.version_option(__version__, prog_name="huecap")
def main() -> None:
    """Color vision deficiency simulation, correction, testing, and analysis."""


def _run_recolor(mode: daltonize.Mode, type_name: str, severity_text: str | None,
                 space: str, workers: int | None, kernel: str | None,
                 bench: bool, in_path: str, out_path: str) -> None:
    profile = _profile_from_flags(type_name, severity_text)
    space_value = daltonize.Space(space.lower())
    try:
        data = Path(in_path).read_bytes()
    except OSError as exc:
        raise click.ClickException(f"cannot read {in_path}: {exc}")
    try:
        rgb, alpha = daltonize.decode_png(io.BytesIO(data))
    except ParseError as exc:
        raise click.ClickException(str(exc))
    start = time.perf_counter()
    out = daltonize.recolor_u8(rgb, profile, mode, space_value,
                               workers=workers, kernel=kernel)
    elapsed = time.perf_counter() - start
    try:
        Path(out_path).write_bytes(daltonize.encode_png(out, alpha))
    except OSError as exc:
        raise click.ClickException(f"cannot write {out_path}: {exc}")
    if bench:
        pixels = rgb.shape[0] * rgb.shape[1]
        rate = pixels / elapsed / 1e6 if elapsed > 0 else float("inf")
        click.echo(
            f"transform: {elapsed * 1e3:.1f} ms for {rgb.shape[1]}x{rgb.shape[0]} "
            f"({rate:.1f} Mpx/s, kernel={kernel or active_kernel()})"
        )


def _recolor_options(fn):
    for deco in reversed([
        click.option("--type", "type_name", type=_TYPE_CHOICES, required=True,
                     help="Deficiency type."),
        click.option("--severity", "severity_text", default=None,
                     help="Severity: 0-1 fraction, or 0-100 percent when > 1."),
        click.option("--space", type=_SPACE_CHOICES, default="linear",
                     show_default=True, help="Apply matrices in linear light or "
                                             "directly on gamma-encoded values."),
        click.option("--workers", type=click.IntRange(min=1), default=None,
                     help="Row-parallel worker threads (output is identical "
                          "for any count)."),
        click.option("--kernel", type=click.Choice(["compiled", "python"]),
                     default=None, help="Force a specific kernel."),
        click.option("--bench", is_flag=True,
                     help="Print wall time and Mpx/s for the transform stage."),
        click.argument("in_path", metavar="IN_PNG"),
        click.argument("out_path", metavar="OUT_PNG"),
    ]):
        fn = deco(fn)
    return fn


@main.command()
@_recolor_options
def simulate(type_name, severity_text, space, workers, kernel, bench,
             in_path, out_path) -> None:
    """Rewrite IN_PNG as a viewer with the given deficiency would see it."""
    _run_recolor(daltonize.Mode.SIMULATE, type_name, severity_text, space,
                 workers, kernel, bench, in_path, out_path)


@main.command()
@_recolor_options
def correct(type_name, severity_text, space, workers, kernel, bench,
            in_path, out_path) -> None:
    """Recolor IN_PNG to compensate for the given deficiency."""
    _run_recolor(daltonize.Mode.CORRECT, type_name, severity_text, space,
                 workers, kernel, bench, in_path, out_path)


@main.command()
@click.option("--json", "json_path", type=click.Path(dir_okay=False),
              default=None, help="Write the palette as JSON to this path "
                                 "('-' for stdout) instead of the text listing.")
def palette(json_path) -> None:
    """Print the four-row arrangement-test palette."""
    p = fm100.generate_palette()
    doc = fm100.palette_to_dict(p)
    if json_path is not None:
        text = json.dumps(doc, indent=2)
        if json_path == "-":
            click.echo(text)
        else:
            try:
                Path(json_path).write_text(text + "\n", encoding="utf-8")
            except OSError as exc:
                raise click.ClickException(f"cannot write {json_path}: {exc}")
        return
    for row in doc["rows"]:
        swatches = " ".join(
            f"{slot['hex']}{'*' if slot['fixed'] else ''}" for slot in row["slots"]
        )
        click.echo(f"row {row['row']}: {swatches}")
    click.echo("(* = fixed anchor; movable cap ids equal their slot numbers)")


@main.command()
@click.argument("arrangement_path", metavar="ARRANGEMENT_JSON")
def score(arrangement_path) -> None:
    """Score an arrangement JSON file and classify the deficiency."""
    try:
        payload = json.loads(Path(arrangement_path).read_text(encoding="utf-8"))
    except OSError as exc:
        raise click.ClickException(f"cannot read {arrangement_path}: {exc}")
    except ValueError as exc:
        raise click.UsageError(f"{arrangement_path} is not valid JSON: {exc}")
    try:
        arrangement = fm100.arrangement_from_dict(payload)
        report = fm100.score(arrangement)
    except (ParseError, InvalidArrangement) as exc:
        raise click.UsageError(str(exc))
    profile = fm100.classify(report)
    click.echo(f"row errors:   {list(report.row_errors)}")
    click.echo(f"total error:  {report.total}")
    click.echo(f"scaled error: {report.scaled:g}")
    click.echo(
        f"type sums:    protan={report.protan_error} "
        f"deutan={report.deutan_error} tritan={report.tritan_error}"
    )
    if profile.cvd_type is CvdType.NONE:
        click.echo("profile:      None")
    else:
        click.echo(
            f"profile:      {profile.cvd_type.value.capitalize()}, "
            f"{profile.severity * 100:.0f}%"
        )


def _format_p(p: float) -> str:
    return "<.001" if p < 0.001 else f"{p:.3f}".lstrip("0")


@main.command(name="stats")
@click.argument("trials_path", metavar="TRIALS_CSV")
@click.option("--subgroup", "subgroup_name", type=click.Choice(["cvd"]),
              default=None, help="Restrict to participants whose desktop "
                                 "screening found a deficiency.")
@click.option("--confidence", type=click.FloatRange(min=0, max=1, min_open=True,
              max_open=True), default=0.95, show_default=True)
def stats_command(trials_path, subgroup_name, confidence) -> None:
    """Paired t test over a pre/post trials CSV."""
    try:
        records = stats.load_trials(trials_path)
    except OSError as exc:
        raise click.ClickException(str(exc))
    except (ParseError, ValidationError) as exc:
        raise click.UsageError(str(exc))
    if subgroup_name == "cvd":
        records = stats.subgroup(records, stats.has_desktop_cvd)
        group_label = "Participants with CVD"
    else:
        group_label = "All Participants"
    try:
        result = stats.paired_t_from_records(records, confidence)
    except HuecapError as exc:
        raise click.UsageError(str(exc))
    ci = f"[{result.ci_low:.2f}, {result.ci_high:.2f}]"
    ci_label = f"{confidence * 100:g}% CI"
    click.echo(f"{'Group':<24}{'df':>4}{'t':>8}  {ci_label:<16}{'p':>7}")
    click.echo(
        f"{group_label:<24}{result.df:>4}{result.t:>8.2f}  {ci:<16}"
        f"{_format_p(result.p):>7}"
    )
    click.echo()
    click.echo(f"n = {result.n}, mean difference = {result.mean_diff:.2f}, "
               f"sd = {result.sd_diff:.2f}, Cohen's d = {result.cohens_d:.2f}")
    if subgroup_name == "cvd":
        click.echo(
            f"note: the originally reported effect size for this subgroup is "
            f"{stats.ORIGINALLY_REPORTED_SUBGROUP_D:.2f}, which does not follow "
            f"from these records via d = mean/sd (= {result.cohens_d:.2f}); "
            f"t and the confidence interval do match the original figures."
        )


@main.command()
@click.option("--width", type=click.IntRange(min=1), default=1920, show_default=True)
@click.option("--height", type=click.IntRange(min=1), default=1080, show_default=True)
@click.option("--repeat", type=click.IntRange(min=1), default=3, show_default=True,
              help="Take the best of this many runs per kernel.")
def bench(width, height, repeat) -> None:
    """Compare the compiled and pure-python kernels on a synthetic frame."""
    import numpy as np

    rng = np.random.default_rng(0)
    frame = rng.integers(0, 256, (height, width, 3), dtype=np.uint8)
    profile = CvdProfile(CvdType.PROTAN, 1.0)
    pixels = width * height
    click.echo(f"frame {width}x{height}, full correction in linear light, "
               f"best of {repeat}:")
    results = {}
    for kernel in available_kernels():
        best = math.inf
        for _ in range(repeat):
            start = time.perf_counter()
            daltonize.recolor_u8(frame, profile, daltonize.Mode.CORRECT,
                                 daltonize.Space.LINEAR, workers=1, kernel=kernel)
            best = min(best, time.perf_counter() - start)
        results[kernel] = best
        click.echo(f"  {kernel:<9} {best * 1e3:8.1f} ms  "
                   f"{pixels / best / 1e6:8.1f} Mpx/s")
    if len(results) == 2:
        click.echo(f"  speedup   {results['python'] / results['compiled']:8.1f}x")


@main.command()
@click.option("--port", type=click.IntRange(min=1, max=65535), default=8765,
              show_default=True)
@click.option("--bind", default="127.0.0.1", show_default=True,
              help="Bind address; widen beyond loopback only on trusted networks.")
@click.option("--snapshot", type=click.Path(dir_okay=False), default=None,
              help="Persist sessions to this JSON file across restarts.")
def serve(port, bind, snapshot) -> None:
    """Run the local HTTP service (no auth; loopback by default)."""
    from .service import SessionStore, run

    store = SessionStore(snapshot_path=snapshot) if snapshot else SessionStore()
    run(host=bind, port=port, store=store)


if __name__ == "__main__":
    sys.exit(main())
