"""Local HTTP/JSON service hosting assessment sessions and recoloring.

A small FastAPI app exposes the arrangement test and the image pipeline to
the browser UI: sessions are held in memory (optionally snapshotted to a
JSON file), each guarded by its own lock, and recoloring accepts either a
stored session profile or an explicit one.  The service is a single-user
local tool: it binds to loopback by default and has no authentication.
"""

from __future__ import annotations

import json
import secrets
import threading
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable

from fastapi import Body, FastAPI, File, Form, Request, UploadFile
from fastapi.exceptions import HTTPException, RequestValidationError
from fastapi.responses import JSONResponse, Response

from . import __version__, fm100
from ._engine import active_kernel
from .cvd_model import CvdProfile, CvdType
from .daltonize import Mode, Space, recolor_png_bytes
from .errors import HuecapError

DEFAULT_TTL_SECONDS = 24 * 60 * 60
DEFAULT_MAX_UPLOAD_BYTES = 16 * 1024 * 1024
_PNG_SIGNATURE = b"\x89PNG\r\n\x1a\n"


@dataclass
class Session:
    """One participant's test state; mutate only under ``lock``."""

    session_id: str
    seed: int
    palette: fm100.Palette
    shuffled: fm100.Arrangement
    created_at: float
    arrangement: fm100.Arrangement | None = None
    report: fm100.ScoreReport | None = None
    profile: CvdProfile | None = None
    lock: threading.Lock = field(default_factory=threading.Lock, repr=False)


class SessionStore:
    """In-memory session registry with expiry and optional JSON snapshots.

    The snapshot stores only seeds, timestamps, and submitted arrangements;
    palettes, reports, and profiles are deterministic functions of those and
    are rebuilt on load.
    """

    def __init__(self, *, ttl_seconds: float = DEFAULT_TTL_SECONDS,
                 snapshot_path: str | Path | None = None,
                 clock: Callable[[], float] = time.time) -> None:
        if ttl_seconds <= 0:
            raise ValueError(f"ttl_seconds must be positive, got {ttl_seconds!r}")
        self._ttl = float(ttl_seconds)
        self._clock = clock
        self._snapshot_path = Path(snapshot_path) if snapshot_path else None
        self._sessions: dict[str, Session] = {}
        self._lock = threading.Lock()
        if self._snapshot_path is not None and self._snapshot_path.exists():
            self._load_snapshot()

    def create(self, seed: int | None = None) -> Session:
        if seed is None:
            seed = secrets.randbits(32)
        palette = fm100.generate_palette()
        session = Session(
            session_id=secrets.token_urlsafe(16),
            seed=int(seed),
            palette=palette,
            shuffled=fm100.shuffle(palette, int(seed)),
            created_at=self._clock(),
        )
        with self._lock:
            self._sessions[session.session_id] = session
            self._save_snapshot_locked()
        return session

    def get(self, session_id: str) -> Session | None:
        """The live session, or None when unknown or expired."""
        now = self._clock()
        with self._lock:
            session = self._sessions.get(session_id)
            if session is None:
                return None
            if now - session.created_at > self._ttl:
                del self._sessions[session_id]
                self._save_snapshot_locked()
                return None
            return session

    def submit(self, session: Session,
               arrangement: fm100.Arrangement) -> tuple[fm100.ScoreReport, CvdProfile]:
        """Score and store an arrangement; last write wins under the session lock."""
        report = fm100.score(arrangement)
        profile = fm100.classify(report)
        with session.lock:
            session.arrangement = arrangement
            session.report = report
            session.profile = profile
        with self._lock:
            self._save_snapshot_locked()
        return report, profile

    def purge_expired(self) -> int:
        """Drop expired sessions; returns how many were removed."""
        now = self._clock()
        with self._lock:
            stale = [
                sid for sid, s in self._sessions.items()
                if now - s.created_at > self._ttl
            ]
            for sid in stale:
                del self._sessions[sid]
            if stale:
                self._save_snapshot_locked()
        return len(stale)

    def _save_snapshot_locked(self) -> None:
        if self._snapshot_path is None:
            return
        payload = {
            "sessions": [
                {
                    "session_id": s.session_id,
                    "seed": s.seed,
                    "created_at": s.created_at,
                    "arrangement": (
                        fm100.arrangement_to_dict(s.arrangement)
                        if s.arrangement is not None else None
                    ),
                }
                for s in self._sessions.values()
            ]
        }
        tmp = self._snapshot_path.with_suffix(self._snapshot_path.suffix + ".tmp")
        tmp.write_text(json.dumps(payload), encoding="utf-8")
        tmp.replace(self._snapshot_path)

    def _load_snapshot(self) -> None:
        try:
            payload = json.loads(self._snapshot_path.read_text(encoding="utf-8"))
            entries = payload["sessions"]
        except (OSError, ValueError, KeyError):
            return  # unreadable snapshot: start fresh rather than fail startup
        now = self._clock()
        palette = fm100.generate_palette()
        for entry in entries:
            try:
                created_at = float(entry["created_at"])
                if now - created_at > self._ttl:
                    continue
                session = Session(
                    session_id=str(entry["session_id"]),
                    seed=int(entry["seed"]),
                    palette=palette,
                    shuffled=fm100.shuffle(palette, int(entry["seed"])),
                    created_at=created_at,
                )
                if entry.get("arrangement") is not None:
                    arrangement = fm100.arrangement_from_dict(entry["arrangement"])
                    session.arrangement = arrangement
                    session.report = fm100.score(arrangement)
                    session.profile = fm100.classify(session.report)
            except (HuecapError, KeyError, TypeError, ValueError):
                continue  # skip damaged entries, keep the rest
            self._sessions[session.session_id] = session


def _profile_payload(profile: CvdProfile | None) -> dict[str, Any] | None:
    if profile is None:
        return None
    return {"type": profile.cvd_type.value, "severity": profile.severity}


def _session_payload(session: Session) -> dict[str, Any]:
    return {
        "version": __version__,
        "session_id": session.session_id,
        "seed": session.seed,
        "palette": fm100.palette_to_dict(session.palette),
        "shuffled": fm100.arrangement_to_dict(session.shuffled),
        "arrangement": (
            fm100.arrangement_to_dict(session.arrangement)
            if session.arrangement is not None else None
        ),
        "report": (
            fm100.report_to_dict(session.report)
            if session.report is not None else None
        ),
        "profile": _profile_payload(session.profile),
    }


_TYPE_NAMES = {t.value: t for t in CvdType}


def _parse_explicit_profile(type_text: str, severity_text: str | None) -> CvdProfile:
    key = type_text.strip().lower()
    if key not in _TYPE_NAMES:
        raise HTTPException(422, f"unknown deficiency type {type_text!r}")
    cvd_type = _TYPE_NAMES[key]
    if cvd_type is CvdType.NONE:
        if severity_text not in (None, "", "0", "0.0"):
            raise HTTPException(422, "severity must be 0 for type 'none'")
        return CvdProfile(CvdType.NONE, 0.0)
    if severity_text is None or not severity_text.strip():
        raise HTTPException(422, "severity is required for an explicit profile")
    try:
        severity = float(severity_text)
    except ValueError:
        raise HTTPException(422, f"severity must be a number, got {severity_text!r}")
    if not 0.0 <= severity <= 1.0:
        raise HTTPException(422, f"severity must be in [0, 1], got {severity!r}")
    return CvdProfile(cvd_type, severity)


def create_app(store: SessionStore | None = None, *,
               max_upload_bytes: int = DEFAULT_MAX_UPLOAD_BYTES) -> FastAPI:
    """Build the service app around the given session store."""
    store = store if store is not None else SessionStore()
    app = FastAPI(title="huecap service", version=__version__)

    @app.exception_handler(HTTPException)
    async def _http_error(_req: Request, exc: HTTPException) -> JSONResponse:
        return JSONResponse(
            {"version": __version__, "detail": exc.detail},
            status_code=exc.status_code,
        )

    @app.exception_handler(RequestValidationError)
    async def _body_error(_req: Request, exc: RequestValidationError) -> JSONResponse:
        return JSONResponse(
            {"version": __version__, "detail": str(exc.errors())},
            status_code=422,
        )

    def _session_or_404(session_id: str) -> Session:
        session = store.get(session_id)
        if session is None:
            raise HTTPException(404, f"unknown or expired session {session_id!r}")
        return session

    @app.get("/healthz")
    def healthz() -> dict[str, Any]:
        return {"version": __version__, "status": "ok", "kernel": active_kernel()}

    @app.post("/sessions", status_code=201)
    def create_session(payload: dict | None = Body(default=None)) -> dict[str, Any]:
        seed = None
        if payload is not None:
            if not isinstance(payload, dict):
                raise HTTPException(422, "request body must be a JSON object")
            seed = payload.get("seed")
            if seed is not None and (isinstance(seed, bool) or not isinstance(seed, int)):
                raise HTTPException(422, "seed must be an integer")
        return _session_payload(store.create(seed))

    @app.get("/sessions/{session_id}/palette")
    def get_palette(session_id: str) -> dict[str, Any]:
        return _session_payload(_session_or_404(session_id))

    @app.post("/sessions/{session_id}/arrangement")
    def submit_arrangement(session_id: str,
                           payload: dict = Body(...)) -> dict[str, Any]:
        session = _session_or_404(session_id)
        try:
            arrangement = fm100.arrangement_from_dict(payload)
        except HuecapError as exc:
            raise HTTPException(422, str(exc))
        report, profile = store.submit(session, arrangement)
        return {
            "version": __version__,
            "session_id": session.session_id,
            "report": fm100.report_to_dict(report),
            "profile": _profile_payload(profile),
        }

    @app.post("/recolor")
    def recolor(image: UploadFile = File(...),
                mode: str = Form("correct"),
                space: str = Form("linear"),
                session_id: str | None = Form(None),
                type: str | None = Form(None),
                severity: str | None = Form(None)) -> Response:
        try:
            mode_value = Mode(mode.strip().lower())
        except ValueError:
            raise HTTPException(422, f"mode must be 'simulate' or 'correct', got {mode!r}")
        try:
            space_value = Space(space.strip().lower())
        except ValueError:
            raise HTTPException(422, f"space must be 'linear' or 'gamma', got {space!r}")

        if session_id is not None and type is not None:
            raise HTTPException(422, "provide either session_id or an explicit "
                                     "profile, not both")
        if session_id is not None:
            session = _session_or_404(session_id)
            profile = session.profile
            if profile is None:
                raise HTTPException(
                    409, "session has no profile yet; submit an arrangement first"
                )
        elif type is not None:
            profile = _parse_explicit_profile(type, severity)
        else:
            raise HTTPException(
                409, "no profile available: pass session_id or type and severity"
            )

        data = image.file.read(max_upload_bytes + 1)
        if len(data) > max_upload_bytes:
            raise HTTPException(413, f"image exceeds the {max_upload_bytes} byte limit")
        if not data.startswith(_PNG_SIGNATURE):
            raise HTTPException(415, "payload is not a PNG image")
        try:
            result = recolor_png_bytes(data, profile, mode_value, space_value)
        except HuecapError as exc:
            raise HTTPException(415, f"could not decode PNG: {exc}")
        return Response(
            content=result,
            media_type="image/png",
            headers={
                "X-Huecap-Version": __version__,
                "X-Applied-Type": profile.cvd_type.value,
                "X-Applied-Severity": f"{profile.severity:g}",
                "X-Applied-Mode": mode_value.value,
                "X-Applied-Space": space_value.value,
            },
        )

    return app


def run(host: str = "127.0.0.1", port: int = 8765, *,
        store: SessionStore | None = None) -> None:
    """Serve the app with uvicorn (blocking)."""
    import uvicorn

    uvicorn.run(create_app(store), host=host, port=port, log_level="info")
