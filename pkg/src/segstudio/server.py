"""HTTP job service around the contour-to-mask pipeline.

Endpoints under /api: create a job from a contour VTK + metadata JSON
upload, start mask generation asynchronously, poll progress, download
the finished NRRD, compute metric reports, and convert volumes to RAS.
The static frontend bundle is served from the root path when present.

Jobs live in an in-memory registry with per-job workspace directories;
state transitions (created -> running -> done | failed) are serialized
under a lock, rasterization runs on a thread pool, and expired jobs are
swept lazily on access.  Error bodies are always
``{"error": {"code": ..., "message": ...}}``.
"""

from __future__ import annotations

import os
import secrets
import shutil
import tempfile
import threading
import time
from concurrent.futures import ThreadPoolExecutor
from contextlib import asynccontextmanager
from dataclasses import dataclass, field
from pathlib import Path

from fastapi import FastAPI, File, UploadFile
from fastapi.responses import FileResponse, JSONResponse, Response
from fastapi.staticfiles import StaticFiles

from .errors import EmptyMaskError, GeometryMismatchError, SegError
from .metrics import build_report, report_dict
from .nrrd import parse_nrrd, write_nrrd
from .polydata import (
    ContourSet,
    MetaDescriptor,
    contours_from_polydata,
    parse_meta_json,
    parse_polydata,
    polydata_mode,
)
from .rasterize import RasterizeOptions, rasterize
from .volume import reorient_to_ras


@dataclass(frozen=True)
class ServiceConfig:
    port: int = 8000
    workdir: Path | None = None
    job_ttl_hours: float = 24.0
    max_upload_mb: int = 512
    workers: int = 2
    static_dir: Path | None = None

    @classmethod
    def from_env(cls, env=None) -> "ServiceConfig":
        env = os.environ if env is None else env
        static = env.get("STATIC_DIR")
        workdir = env.get("WORKDIR")
        return cls(
            port=int(env.get("PORT", "8000")),
            workdir=Path(workdir) if workdir else None,
            job_ttl_hours=float(env.get("JOB_TTL_HOURS", "24")),
            max_upload_mb=int(env.get("MAX_UPLOAD_MB", "512")),
            workers=int(env.get("WORKERS", "2")),
            static_dir=Path(static) if static else None,
        )


@dataclass
class Job:
    id: str
    state: str  # created | running | done | failed
    progress: int
    error: str | None
    workspace: Path
    created_at: float
    expires_at: float
    contours: ContourSet = field(repr=False, default=None)
    meta: MetaDescriptor = field(repr=False, default=None)


class JobRegistry:
    """Thread-safe job table with compare-and-set state transitions."""

    def __init__(self, config: ServiceConfig):
        self._jobs: dict[str, Job] = {}
        self._lock = threading.Lock()
        self._pool = ThreadPoolExecutor(max_workers=config.workers)
        self._ttl_seconds = config.job_ttl_hours * 3600.0
        self._root = Path(config.workdir) / "jobs"

    def create(self, contours: ContourSet, meta: MetaDescriptor, uploads: dict[str, bytes]) -> Job:
        job_id = secrets.token_urlsafe(16)
        workspace = self._root / job_id
        workspace.mkdir(parents=True)
        for name, data in uploads.items():
            (workspace / name).write_bytes(data)
        now = time.time()
        job = Job(
            id=job_id,
            state="created",
            progress=0,
            error=None,
            workspace=workspace,
            created_at=now,
            expires_at=now + self._ttl_seconds,
            contours=contours,
            meta=meta,
        )
        with self._lock:
            self._jobs[job_id] = job
        return job

    def get(self, job_id: str) -> Job | None:
        """Look up a job, sweeping it out first if its TTL has lapsed."""
        expired = None
        with self._lock:
            job = self._jobs.get(job_id)
            # running jobs are left alone so the worker can finish writing
            if job is not None and job.state != "running" and time.time() >= job.expires_at:
                expired = self._jobs.pop(job_id)
                job = None
        if expired is not None:
            shutil.rmtree(expired.workspace, ignore_errors=True)
        return job

    def start(self, job: Job) -> bool:
        """created -> running; returns False when the job already left `created`."""
        with self._lock:
            if job.state != "created":
                return False
            job.state = "running"
        self._pool.submit(self._run, job)
        return True

    def _run(self, job: Job) -> None:
        def sink(pct: float) -> None:
            job.progress = max(job.progress, int(pct))

        try:
            mask = rasterize(job.contours, job.meta, progress=sink, options=RasterizeOptions())
            (job.workspace / "mask.nrrd").write_bytes(write_nrrd(mask))
            job.progress = 100
            with self._lock:
                job.state = "done"
        except SegError as exc:
            with self._lock:
                job.state = "failed"
                job.error = exc.code
        except Exception as exc:  # pragma: no cover - defensive
            with self._lock:
                job.state = "failed"
                job.error = str(exc) or type(exc).__name__

    def shutdown(self) -> None:
        self._pool.shutdown(wait=True)


def _error(status: int, code: str, message: str) -> JSONResponse:
    return JSONResponse(status_code=status, content={"error": {"code": code, "message": message}})


def create_app(config: ServiceConfig | None = None) -> FastAPI:
    config = config or ServiceConfig()
    if config.workdir is None:
        config = ServiceConfig(
            port=config.port,
            workdir=Path(tempfile.mkdtemp(prefix="segstudio-")),
            job_ttl_hours=config.job_ttl_hours,
            max_upload_mb=config.max_upload_mb,
            workers=config.workers,
            static_dir=config.static_dir,
        )
    registry = JobRegistry(config)
    limit_bytes = config.max_upload_mb * 1024 * 1024

    @asynccontextmanager
    async def lifespan(app: FastAPI):
        yield
        registry.shutdown()

    app = FastAPI(title="segstudio", lifespan=lifespan)
    app.state.config = config
    app.state.registry = registry

    async def _read_part(part: UploadFile | None, name: str):
        """Returns (bytes, None) or (None, error response)."""
        if part is None:
            return None, _error(400, "MISSING_PART", f"multipart field {name!r} is required")
        data = await part.read()
        if len(data) > limit_bytes:
            return None, _error(413, "TOO_LARGE", f"{name!r} exceeds {config.max_upload_mb} MiB")
        return data, None

    @app.post("/api/jobs", status_code=201)
    async def create_job(
        contours: UploadFile | None = File(default=None),
        meta: UploadFile | None = File(default=None),
    ):
        contour_bytes, err = await _read_part(contours, "contours")
        if err:
            return err
        meta_bytes, err = await _read_part(meta, "meta")
        if err:
            return err
        try:
            descriptor = parse_meta_json(meta_bytes.decode("utf-8", errors="replace"))
            pd = parse_polydata(contour_bytes.decode("utf-8", errors="replace"))
            mode = polydata_mode(pd)
            cs = contours_from_polydata(pd, descriptor, mode=mode)
        except SegError as exc:
            return _error(422, exc.code, str(exc))
        job = registry.create(cs, descriptor, {"contours.vtk": contour_bytes, "meta.json": meta_bytes})
        return {"job_id": job.id}

    @app.post("/api/jobs/{job_id}/mask", status_code=202)
    async def start_job(job_id: str):
        job = registry.get(job_id)
        if job is None:
            return _error(404, "NOT_FOUND", f"no job {job_id!r}")
        if not registry.start(job):
            return _error(409, "WRONG_STATE", f"job is {job.state}, expected created")
        return {"job_id": job.id, "state": "running"}

    @app.get("/api/jobs/{job_id}/progress")
    async def job_progress(job_id: str):
        job = registry.get(job_id)
        if job is None:
            return _error(404, "NOT_FOUND", f"no job {job_id!r}")
        body = {"state": job.state, "progress": job.progress}
        if job.error is not None:
            body["error"] = job.error
        return body

    @app.get("/api/jobs/{job_id}/mask")
    async def download_mask(job_id: str):
        job = registry.get(job_id)
        if job is None:
            return _error(404, "NOT_FOUND", f"no job {job_id!r}")
        if job.state != "done":
            return _error(409, "WRONG_STATE", f"job is {job.state}, expected done")
        return FileResponse(
            job.workspace / "mask.nrrd",
            media_type="application/octet-stream",
            filename="mask.nrrd",
        )

    @app.post("/api/metrics")
    async def metrics(
        a: UploadFile | None = File(default=None),
        b: UploadFile | None = File(default=None),
    ):
        a_bytes, err = await _read_part(a, "a")
        if err:
            return err
        b_bytes, err = await _read_part(b, "b")
        if err:
            return err
        try:
            vol_a = parse_nrrd(a_bytes)
            vol_b = parse_nrrd(b_bytes)
        except SegError as exc:
            return _error(422, exc.code, str(exc))
        try:
            report = build_report(vol_a, vol_b)
        except (GeometryMismatchError, EmptyMaskError) as exc:
            return _error(409, exc.code, str(exc))
        return report_dict(report)

    @app.post("/api/convert")
    async def convert(volume: UploadFile | None = File(default=None)):
        data, err = await _read_part(volume, "volume")
        if err:
            return err
        try:
            vol = parse_nrrd(data)
        except SegError as exc:
            return _error(422, exc.code, str(exc))
        out = write_nrrd(reorient_to_ras(vol))
        return Response(content=out, media_type="application/octet-stream")

    static_dir = config.static_dir
    if static_dir is not None and (Path(static_dir) / "index.html").is_file():
        app.mount("/", StaticFiles(directory=static_dir, html=True), name="frontend")
    else:

        @app.get("/")
        @app.get("/{path:path}")
        async def frontend_missing(path: str = ""):
            return _error(404, "NO_FRONTEND", "frontend bundle not built; API lives under /api")

    return app
