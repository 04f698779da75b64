"""Binary checkpoint format for solver states.

Byte layout (little-endian), version 1:

    offset  size  field
    0       8     magic  b"BSVCKPT1"
    8       4     version        uint32
    12      4     kind           uint32 (0 nse, 1 mhd, 2 boussinesq)
    16      4     d              uint32
    20      4     n              uint32
    24      8     t              float64
    32      8     seed           uint64
    40      4     n_fields       uint32
    -- per field --
            8     name           utf-8, NUL padded
            4     components     uint32
    -- payload, per field --
                  complex128 coefficients, C order, components outermost,
                  wavevectors in lexicographic order on shifted indices
                  (xi + n/2), i.e. an fftshift of the FFT layout
    -- trailer --
            4     crc32 of all preceding bytes   uint32

Any corrupted byte changes the CRC, so restarts either reproduce the
stored state bit-exactly or fail loudly.
"""

from __future__ import annotations

import struct
import zlib
from dataclasses import dataclass

import numpy as np

from .spectral import Grid, SpectralField

MAGIC = b"BSVCKPT1"
VERSION = 1

KIND_CODES = {"nse": 0, "mhd": 1, "boussinesq": 2}
KIND_NAMES = {v: k for k, v in KIND_CODES.items()}

_HEADER = struct.Struct("<8sIIIIdQI")
_FIELD_HEADER = struct.Struct("<8sI")


class CheckpointError(IOError):
    """Malformed, truncated, or corrupted checkpoint bytes."""


@dataclass
class CheckpointData:
    """Decoded checkpoint: metadata plus named coefficient fields."""

    kind: str
    d: int
    n: int
    t: float
    seed: int
    fields: dict[str, SpectralField]


def _to_canonical(coeffs: np.ndarray, d: int) -> np.ndarray:
    return np.fft.fftshift(coeffs, axes=tuple(range(1, d + 1)))


def _from_canonical(canonical: np.ndarray, d: int) -> np.ndarray:
    return np.fft.ifftshift(canonical, axes=tuple(range(1, d + 1)))


def encode_checkpoint(
    kind: str, t: float, seed: int, fields: dict[str, SpectralField]
) -> bytes:
    """Serialize named fields (all on one grid) into checkpoint bytes."""
    if kind not in KIND_CODES:
        raise CheckpointError(f"unknown system kind {kind!r}")
    if not fields:
        raise CheckpointError("checkpoint needs at least one field")
    grids = {f.grid for f in fields.values()}
    if len(grids) != 1:
        raise CheckpointError("all checkpoint fields must share one grid")
    grid = grids.pop()

    parts = [
        _HEADER.pack(
            MAGIC, VERSION, KIND_CODES[kind], grid.d, grid.n, t, seed, len(fields)
        )
    ]
    names = sorted(fields)
    for name in names:
        raw = name.encode("utf-8")
        if len(raw) > 8:
            raise CheckpointError(f"field name {name!r} longer than 8 bytes")
        parts.append(_FIELD_HEADER.pack(raw.ljust(8, b"\x00"), fields[name].components))
    for name in names:
        canonical = _to_canonical(fields[name].coeffs, grid.d)
        parts.append(np.ascontiguousarray(canonical, dtype=np.complex128).tobytes())
    body = b"".join(parts)
    return body + struct.pack("<I", zlib.crc32(body))


def decode_checkpoint(blob: bytes) -> CheckpointData:
    """Parse checkpoint bytes, verifying magic, version, and checksum."""
    if len(blob) < _HEADER.size + 4:
        raise CheckpointError("checkpoint truncated")
    body, (crc,) = blob[:-4], struct.unpack("<I", blob[-4:])
    if zlib.crc32(body) != crc:
        raise CheckpointError("checkpoint checksum mismatch")
    magic, version, kind_code, d, n, t, seed, n_fields = _HEADER.unpack_from(body, 0)
    if magic != MAGIC:
        raise CheckpointError(f"bad magic {magic!r}")
    if version != VERSION:
        raise CheckpointError(f"unsupported checkpoint version {version}")
    if kind_code not in KIND_NAMES:
        raise CheckpointError(f"unknown kind code {kind_code}")
    grid = Grid(d, n)

    offset = _HEADER.size
    headers = []
    for _ in range(n_fields):
        raw_name, components = _FIELD_HEADER.unpack_from(body, offset)
        offset += _FIELD_HEADER.size
        headers.append((raw_name.rstrip(b"\x00").decode("utf-8"), components))

    fields: dict[str, SpectralField] = {}
    for name, components in headers:
        count = components * grid.npoints
        nbytes = count * 16
        if offset + nbytes > len(body):
            raise CheckpointError("checkpoint payload truncated")
        flat = np.frombuffer(body, dtype=np.complex128, count=count, offset=offset)
        offset += nbytes
        canonical = flat.reshape((components,) + grid.shape)
        coeffs = _from_canonical(canonical, grid.d)
        fields[name] = SpectralField(grid, coeffs=coeffs.copy())
    if offset != len(body):
        raise CheckpointError("trailing bytes after checkpoint payload")
    return CheckpointData(
        kind=KIND_NAMES[kind_code], d=d, n=n, t=t, seed=seed, fields=fields
    )


def write_checkpoint(path, kind, t, seed, fields) -> None:
    with open(path, "wb") as fh:
        fh.write(encode_checkpoint(kind, t, seed, fields))


def read_checkpoint(path) -> CheckpointData:
    with open(path, "rb") as fh:
        return decode_checkpoint(fh.read())
