"""Command-line front door for the pipeline.

Subcommands: `info` (geometry summary), `convert` (reorient to RAS),
`mask` (contours + metadata -> NRRD mask), `metrics` (Dice/Hausdorff
report), `serve` (run the HTTP job service).

Exit codes are a stable contract: 0 success, 2 I/O or parse failure,
3 rasterization failure, 4 metric precondition failure.  Diagnostics go
to stderr; results go to stdout or the requested output file.
"""

from __future__ import annotations

import argparse
import socket
import sys
from pathlib import Path

from .errors import SegError
from .metrics import build_report, render_report
from .nrrd import parse_nrrd, parse_nrrd_full, scalar_type_name, write_nrrd
from .polydata import contours_from_polydata, parse_meta_json, parse_polydata, polydata_mode
from .rasterize import RasterizeOptions, rasterize
from .server import ServiceConfig, create_app
from .volume import reorient_to_ras

EXIT_OK = 0
EXIT_IO = 2
EXIT_RASTER = 3
EXIT_METRIC = 4


def _fail(code: int, message: str) -> int:
    print(f"error: {message}", file=sys.stderr)
    return code


def _read_bytes(path: str) -> bytes:
    return Path(path).read_bytes()


def _read_text(path: str) -> str:
    return Path(path).read_text(encoding="utf-8")


def _cmd_info(args) -> int:
    try:
        vol, header = parse_nrrd_full(_read_bytes(args.file))
    except OSError as exc:
        return _fail(EXIT_IO, f"cannot read {args.file}: {exc}")
    except SegError as exc:
        return _fail(EXIT_IO, f"{exc.code}: {exc}")
    geom = vol.geometry
    rows = [" ".join(repr(float(v)) for v in row) for row in geom.directions.T]
    print(f"file: {args.file}")
    print("sizes: " + " ".join(str(s) for s in geom.sizes))
    print(f"scalar_type: {scalar_type_name(vol.scalar_type)}")
    print(f"basis: {geom.basis}")
    print("origin: " + " ".join(repr(float(v)) for v in geom.origin))
    print("directions: " + "  ".join(f"[{r}]" for r in rows))
    print(f"encoding: {header.encoding}")
    for note in header.diagnostics:
        print(f"note: {note}", file=sys.stderr)
    return EXIT_OK


def _cmd_convert(args) -> int:
    try:
        vol = parse_nrrd(_read_bytes(args.input))
    except OSError as exc:
        return _fail(EXIT_IO, f"cannot read {args.input}: {exc}")
    except SegError as exc:
        return _fail(EXIT_IO, f"{exc.code}: {exc}")
    out = write_nrrd(reorient_to_ras(vol))
    try:
        Path(args.output).write_bytes(out)
    except OSError as exc:
        return _fail(EXIT_IO, f"cannot write {args.output}: {exc}")
    return EXIT_OK


def _cmd_mask(args) -> int:
    try:
        meta = parse_meta_json(_read_text(args.meta))
        pd = parse_polydata(_read_text(args.contours))
        cs = contours_from_polydata(pd, meta, mode=polydata_mode(pd))
    except OSError as exc:
        return _fail(EXIT_IO, f"cannot read inputs: {exc}")
    except SegError as exc:
        return _fail(EXIT_IO, f"{exc.code}: {exc}")

    sink = None
    if args.progress:

        def sink(pct: float) -> None:
            print(f"progress {pct:g}", file=sys.stderr)

    options = RasterizeOptions(lenient=args.lenient, foreground_value=args.fg_value)
    try:
        mask = rasterize(cs, meta, progress=sink, options=options)
    except SegError as exc:
        return _fail(EXIT_RASTER, f"{exc.code}: {exc}")
    try:
        Path(args.output).write_bytes(write_nrrd(mask))
    except OSError as exc:
        return _fail(EXIT_IO, f"cannot write {args.output}: {exc}")
    return EXIT_OK


def _cmd_metrics(args) -> int:
    try:
        vol_a = parse_nrrd(_read_bytes(args.a))
        vol_b = parse_nrrd(_read_bytes(args.b))
    except OSError as exc:
        return _fail(EXIT_IO, f"cannot read inputs: {exc}")
    except SegError as exc:
        return _fail(EXIT_IO, f"{exc.code}: {exc}")
    try:
        report = build_report(vol_a, vol_b)
    except SegError as exc:
        return _fail(EXIT_METRIC, f"{exc.code}: {exc}")
    sys.stdout.write(render_report(report, "text").decode("utf-8"))
    if args.json:
        try:
            Path(args.json).write_bytes(render_report(report, "json"))
        except OSError as exc:
            return _fail(EXIT_IO, f"cannot write {args.json}: {exc}")
    return EXIT_OK


def _cmd_serve(args) -> int:
    base = ServiceConfig.from_env()
    config = ServiceConfig(
        port=args.port if args.port is not None else base.port,
        workdir=Path(args.workdir) if args.workdir else base.workdir,
        job_ttl_hours=args.ttl_hours if args.ttl_hours is not None else base.job_ttl_hours,
        max_upload_mb=args.max_upload_mb if args.max_upload_mb is not None else base.max_upload_mb,
        workers=args.workers if args.workers is not None else base.workers,
        static_dir=Path(args.static_dir) if args.static_dir else base.static_dir,
    )
    # probe the port up front so a busy port is an orderly exit, not a traceback
    probe = socket.socket(socket.AF_INET, socket.SOCK_STREAM)
    probe.setsockopt(socket.SOL_SOCKET, socket.SO_REUSEADDR, 1)
    try:
        probe.bind((args.host, config.port))
    except OSError as exc:
        probe.close()
        return _fail(EXIT_IO, f"cannot bind {args.host}:{config.port}: {exc}")
    probe.close()

    import uvicorn

    uvicorn.run(create_app(config), host=args.host, port=config.port, log_level="warning")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="seg", description="contour-to-mask segmentation toolkit")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("info", help="print the geometry summary of a volume")
    p.add_argument("file")
    p.set_defaults(func=_cmd_info)

    p = sub.add_parser("convert", help="reorient a volume to the RAS basis")
    p.add_argument("input")
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=_cmd_convert)

    p = sub.add_parser("mask", help="rasterize contours into a binary mask")
    p.add_argument("--contours", required=True, help="legacy VTK polydata file")
    p.add_argument("--meta", required=True, help="grid metadata JSON sidecar")
    p.add_argument("-o", "--output", required=True)
    p.add_argument("--lenient", action="store_true", help="fill self-intersecting contours even-odd")
    p.add_argument("--fg-value", type=int, choices=(1, 255), default=1)
    p.add_argument("--progress", action="store_true", help="report per-slice progress on stderr")
    p.set_defaults(func=_cmd_mask)

    p = sub.add_parser("metrics", help="compare two masks (Dice, Hausdorff)")
    p.add_argument("--a", required=True)
    p.add_argument("--b", required=True)
    p.add_argument("--json", help="also write the JSON report here")
    p.set_defaults(func=_cmd_metrics)

    p = sub.add_parser("serve", help="run the HTTP job service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=None)
    p.add_argument("--workdir", default=None)
    p.add_argument("--ttl-hours", type=float, default=None)
    p.add_argument("--max-upload-mb", type=int, default=None)
    p.add_argument("--workers", type=int, default=None)
    p.add_argument("--static-dir", default=None)
    p.set_defaults(func=_cmd_serve)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
