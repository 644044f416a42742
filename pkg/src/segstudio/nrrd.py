"""NRRD volume file parsing and serialization.

Only the subset the mask pipeline needs: 3-D volumes with attached
headers, raw or gzip encoding, scalar types uchar/short/ushort/float,
and the space fields (origin, directions, basis) the geometry model is
built from.  The writer emits a fixed field order with shortest
round-trip float formatting, so output files are byte-reproducible.
"""

from __future__ import annotations

import gzip
import re
import zlib
from dataclasses import dataclass

import numpy as np

from .errors import BadMagicError, SizeMismatchError, UnsupportedFieldError
from .polydata import BASIS_TO_SPACE, SPACE_TO_BASIS, MetaDescriptor
from .volume import Volume, VolumeGeometry

_TYPE_ALIASES = {
    "uchar": "uchar",
    "unsigned char": "uchar",
    "uint8": "uchar",
    "uint8_t": "uchar",
    "short": "short",
    "short int": "short",
    "signed short": "short",
    "signed short int": "short",
    "int16": "short",
    "int16_t": "short",
    "ushort": "ushort",
    "unsigned short": "ushort",
    "unsigned short int": "ushort",
    "uint16": "ushort",
    "uint16_t": "ushort",
    "float": "float",
    "float32": "float",
}
_TYPE_TO_DTYPE = {
    "uchar": np.dtype("uint8"),
    "short": np.dtype("int16"),
    "ushort": np.dtype("uint16"),
    "float": np.dtype("float32"),
}
_DTYPE_TO_TYPE = {d: t for t, d in _TYPE_TO_DTYPE.items()}


def scalar_type_name(dtype) -> str:
    """Canonical NRRD type string (uchar/short/ushort/float) for a dtype."""
    return _DTYPE_TO_TYPE[np.dtype(dtype)]

_KNOWN_FIELDS = {
    "type",
    "dimension",
    "sizes",
    "space",
    "space directions",
    "space origin",
    "encoding",
    "endian",
}

_MAGIC_RE = re.compile(r"NRRD000([1-5])")


@dataclass(frozen=True)
class NrrdHeader:
    """Parsed header fields, with type/encoding names canonicalized."""

    version: int
    type: str
    dimension: int
    sizes: tuple[int, int, int]
    space: str
    space_directions: tuple[tuple[float, float, float], ...]
    space_origin: tuple[float, float, float]
    encoding: str
    endian: str
    diagnostics: tuple[str, ...] = ()


def _split_header(data: bytes) -> tuple[str, bytes]:
    candidates = []
    i = data.find(b"\n\n")
    if i != -1:
        candidates.append((i, 2))
    i = data.find(b"\r\n\r\n")
    if i != -1:
        candidates.append((i, 4))
    if not candidates:
        raise UnsupportedFieldError("no blank line separating header from payload")
    pos, skip = min(candidates)
    return data[:pos].decode("ascii", errors="replace"), data[pos + skip :]


def _parse_vector(tok: str) -> tuple[float, ...]:
    tok = tok.strip()
    if not (tok.startswith("(") and tok.endswith(")")):
        raise UnsupportedFieldError(f"bad vector syntax {tok!r}")
    try:
        return tuple(float(x) for x in tok[1:-1].split(","))
    except ValueError as exc:
        raise UnsupportedFieldError(f"bad vector syntax {tok!r}") from exc


def _map_space(value: str) -> str:
    for candidate in (value, value.lower(), value.upper()):
        if candidate in SPACE_TO_BASIS:
            return candidate
    raise UnsupportedFieldError(f"unsupported space {value!r}")


def parse_nrrd_header(data: bytes) -> tuple[NrrdHeader, bytes]:
    """Parse the header; returns it plus the undecoded payload bytes."""
    if not data.startswith(b"NRRD"):
        raise BadMagicError("input does not begin with the NRRD magic")
    text, payload = _split_header(data)
    lines = text.splitlines()
    m = _MAGIC_RE.fullmatch(lines[0].strip())
    if m is None:
        raise BadMagicError(f"unsupported magic line {lines[0]!r}")
    version = int(m.group(1))

    fields: dict[str, str] = {}
    diagnostics: list[str] = []
    for ln in lines[1:]:
        if not ln.strip() or ln.startswith("#"):
            continue
        if ":=" in ln:
            diagnostics.append(f"ignored key-value pair: {ln.split(':=', 1)[0].strip()}")
            continue
        if ":" not in ln:
            raise UnsupportedFieldError(f"malformed header line {ln!r}")
        name, value = ln.split(":", 1)
        name = " ".join(name.lower().split())
        if name in ("data file", "datafile"):
            raise UnsupportedFieldError("detached data files are not supported")
        if name in _KNOWN_FIELDS:
            fields[name] = value.strip()
        else:
            diagnostics.append(f"ignored field: {name}")

    for required in ("type", "dimension", "sizes", "encoding"):
        if required not in fields:
            raise UnsupportedFieldError(f"missing required field: {required}")

    try:
        dimension = int(fields["dimension"])
    except ValueError as exc:
        raise UnsupportedFieldError(f"bad dimension {fields['dimension']!r}") from exc
    if dimension != 3:
        raise UnsupportedFieldError(f"dimension {dimension} not supported (only 3)")

    try:
        sizes = tuple(int(s) for s in fields["sizes"].split())
    except ValueError as exc:
        raise UnsupportedFieldError(f"bad sizes {fields['sizes']!r}") from exc
    if len(sizes) != 3 or any(s < 1 for s in sizes):
        raise UnsupportedFieldError(f"sizes must be 3 positive integers, got {fields['sizes']!r}")

    type_name = " ".join(fields["type"].lower().split())
    if type_name not in _TYPE_ALIASES:
        raise UnsupportedFieldError(f"unsupported type {fields['type']!r}")
    ctype = _TYPE_ALIASES[type_name]

    encoding = fields["encoding"].lower()
    if encoding == "gz":
        encoding = "gzip"
    if encoding not in ("raw", "gzip"):
        raise UnsupportedFieldError(f"unsupported encoding {fields['encoding']!r}")

    if "space" in fields:
        space = _map_space(fields["space"])
    else:
        space = "right-anterior-superior"
        diagnostics.append("no space field; assuming right-anterior-superior")

    if "space directions" in fields:
        rows = []
        for tok in fields["space directions"].split():
            if tok.lower() == "none":
                raise UnsupportedFieldError("non-spatial axes (space directions: none) not supported")
            row = _parse_vector(tok)
            if len(row) != 3:
                raise UnsupportedFieldError(f"space direction row {tok!r} is not a 3-vector")
            rows.append(row)
        if len(rows) != 3:
            raise UnsupportedFieldError(f"expected 3 space direction rows, got {len(rows)}")
        directions = tuple(rows)
    else:
        directions = ((1.0, 0.0, 0.0), (0.0, 1.0, 0.0), (0.0, 0.0, 1.0))
        diagnostics.append("no space directions; assuming identity")

    if "space origin" in fields:
        origin = _parse_vector(fields["space origin"])
        if len(origin) != 3:
            raise UnsupportedFieldError(f"space origin {fields['space origin']!r} is not a 3-vector")
    else:
        origin = (0.0, 0.0, 0.0)
        diagnostics.append("no space origin; assuming (0,0,0)")

    endian = fields.get("endian", "little").lower()
    if endian not in ("little", "big"):
        raise UnsupportedFieldError(f"unsupported endian {fields['endian']!r}")
    if "endian" not in fields and _TYPE_TO_DTYPE[ctype].itemsize > 1:
        diagnostics.append("no endian field for multi-byte type; assuming little")

    header = NrrdHeader(
        version=version,
        type=ctype,
        dimension=dimension,
        sizes=sizes,  # type: ignore[arg-type]
        space=space,
        space_directions=directions,
        space_origin=origin,  # type: ignore[arg-type]
        encoding=encoding,
        endian=endian,
        diagnostics=tuple(diagnostics),
    )
    return header, payload


def _decode_payload(header: NrrdHeader, payload: bytes) -> np.ndarray:
    dtype = _TYPE_TO_DTYPE[header.type]
    nx, ny, nz = header.sizes
    expected = nx * ny * nz * dtype.itemsize
    if header.encoding == "gzip":
        try:
            payload = gzip.decompress(payload)
        except (OSError, EOFError, zlib.error) as exc:
            raise SizeMismatchError(f"gzip payload could not be decoded: {exc}") from exc
    if len(payload) != expected:
        raise SizeMismatchError(f"payload holds {len(payload)} bytes, expected {expected}")
    order = "<" if header.endian == "little" else ">"
    return np.frombuffer(payload, dtype=dtype.newbyteorder(order)).astype(dtype)


def parse_nrrd_full(data: bytes) -> tuple[Volume, NrrdHeader]:
    """Parse an NRRD file, returning the volume plus header diagnostics."""
    header, payload = parse_nrrd_header(data)
    voxels = _decode_payload(header, payload)
    rows = np.array(header.space_directions, dtype=float)
    geom = VolumeGeometry(
        header.sizes,
        rows.T,
        np.array(header.space_origin),
        SPACE_TO_BASIS[header.space],
    )
    return Volume(geom, voxels), header


def parse_nrrd(data: bytes) -> Volume:
    """Parse an NRRD file into a Volume (first index axis fastest)."""
    return parse_nrrd_full(data)[0]


def _fmt_vector(vec) -> str:
    # repr gives the shortest decimal string that round-trips the float
    return "(" + ",".join(repr(float(x)) for x in vec) + ")"


def write_nrrd(v: Volume, encoding: str = "gzip") -> bytes:
    """Serialize a volume as an attached-header NRRD0004 file.

    Field order is fixed and floats use shortest round-trip formatting,
    so the same volume always produces identical bytes.
    """
    if encoding not in ("raw", "gzip"):
        raise ValueError(f"unsupported encoding {encoding!r}")
    g = v.geometry
    ctype = _DTYPE_TO_TYPE[v.voxels.dtype]
    lines = [
        "NRRD0004",
        f"type: {ctype}",
        "dimension: 3",
        f"space: {BASIS_TO_SPACE[g.basis]}",
        "sizes: " + " ".join(str(s) for s in g.sizes),
        "space directions: " + " ".join(_fmt_vector(row) for row in g.directions.T),
        "space origin: " + _fmt_vector(g.origin),
    ]
    if v.voxels.dtype.itemsize > 1:
        lines.append("endian: little")
    lines.append(f"encoding: {encoding}")
    payload = v.voxels.astype(v.voxels.dtype.newbyteorder("<"), copy=False).tobytes()
    if encoding == "gzip":
        payload = gzip.compress(payload, mtime=0)
    return ("\n".join(lines) + "\n\n").encode("ascii") + payload


def extract_meta(v: Volume) -> MetaDescriptor:
    """Grid metadata sidecar for a volume, without the voxel payload."""
    return MetaDescriptor.from_geometry(v.geometry)
