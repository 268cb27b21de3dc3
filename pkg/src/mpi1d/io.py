"""File formats: the MPI1DMAT binary matrix format and the CSV tables.

Binary matrix layout (all little-endian)::

    8 bytes   b"MPI1DMAT"
    1 byte    version (1)
    8 bytes   rows, uint64
    8 bytes   cols, uint64
    1 + n     domain tag (uint8 length, ASCII)
    1 + n     codomain tag (uint8 length, ASCII)
    8*r*c     entries, float64, row-major

Floats in CSV files are written with ``repr``, the shortest decimal string
that round-trips to the same binary64 value, so outputs are byte-stable.
"""

from __future__ import annotations

import csv
import io
import struct
from pathlib import Path
from typing import Iterable, Optional

import numpy as np

from .grids import SpaceGrid
from .imaging import Phantom, Signal
from .operator import OperatorMatrix
from .spectral import DecayFit, SpectrumReport

MAGIC = b"MPI1DMAT"
VERSION = 1


class FormatError(ValueError):
    """Malformed or unsupported input file."""


def fmt_float(x) -> str:
    return repr(float(x))


def _pack_tag(tag: str) -> bytes:
    raw = tag.encode("ascii")
    if len(raw) > 255:
        raise ValueError("tag too long")
    return struct.pack("<B", len(raw)) + raw


def matrix_to_bytes(op: OperatorMatrix) -> bytes:
    header = MAGIC + struct.pack("<BQQ", VERSION, op.rows, op.cols)
    header += _pack_tag(op.domain_tag) + _pack_tag(op.codomain_tag)
    return header + np.ascontiguousarray(op.data, dtype="<f8").tobytes()


def matrix_from_bytes(buf: bytes) -> OperatorMatrix:
    if buf[:8] != MAGIC:
        raise FormatError("not an MPI1DMAT file (bad magic)")
    if len(buf) < 25:
        raise FormatError("truncated header")
    version, rows, cols = struct.unpack_from("<BQQ", buf, 8)
    if version != VERSION:
        raise FormatError(f"unsupported MPI1DMAT version {version}")
    pos = 25
    tags = []
    for _ in range(2):
        if pos >= len(buf):
            raise FormatError("truncated tag")
        n = buf[pos]
        raw = buf[pos + 1:pos + 1 + n]
        if len(raw) != n:
            raise FormatError("truncated tag")
        try:
            tags.append(raw.decode("ascii"))
        except UnicodeDecodeError:
            raise FormatError("tag is not ASCII") from None
        pos += 1 + n
    expected = 8 * rows * cols
    body = buf[pos:]
    if len(body) != expected:
        raise FormatError(f"expected {expected} data bytes, found {len(body)}")
    data = np.frombuffer(body, dtype="<f8").reshape(rows, cols)
    return OperatorMatrix(data, tags[0], tags[1], meta={"name": "loaded"})


def write_matrix(path, op: OperatorMatrix) -> None:
    Path(path).write_bytes(matrix_to_bytes(op))


def read_matrix(path) -> OperatorMatrix:
    return matrix_from_bytes(Path(path).read_bytes())


def write_rows(path, header: Iterable[str], rows, comment: Optional[str] = None) -> None:
    buf = io.StringIO()
    if comment:
        buf.write(f"# {comment}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    Path(path).write_text(buf.getvalue(), encoding="utf-8")


def read_rows(path):
    comments, rows = [], []
    with open(path, encoding="utf-8", newline="") as fh:
        lines = fh.read().splitlines()
    body = []
    for line in lines:
        if line.startswith("#"):
            comments.append(line[1:].strip())
        elif line.strip():
            body.append(line)
    reader = csv.reader(body)
    try:
        header = next(reader)
    except StopIteration:
        raise FormatError(f"{path}: empty CSV") from None
    rows = [r for r in reader]
    return comments, [h.strip() for h in header], rows


def write_spectrum_csv(path, rep: SpectrumReport) -> None:
    trusted = rep.trusted
    write_rows(path, ["index", "sigma", "trusted"],
                ((i + 1, fmt_float(s), "true" if t else "false")
                 for i, (s, t) in enumerate(zip(rep.sigmas, trusted))))


def read_spectrum_csv(path) -> SpectrumReport:
    _, header, rows = read_rows(path)
    if header[:2] != ["index", "sigma"]:
        raise FormatError(f"{path}: expected header index,sigma,trusted; got {','.join(header)}")
    try:
        idx = [int(r[0]) for r in rows]
        sig = [float(r[1]) for r in rows]
    except (ValueError, IndexError) as exc:
        raise FormatError(f"{path}: {exc}") from None
    if idx != list(range(1, len(idx) + 1)):
        raise FormatError(f"{path}: indices must run 1..n")
    return SpectrumReport(np.array(sig))


def write_fit_csv(path, fit: DecayFit, predicted: float) -> None:
    write_rows(path, ["n0", "n1", "slope", "intercept", "residual", "widom_rate_predicted"],
                [[fit.n0, fit.n1, fmt_float(fit.slope), fmt_float(fit.intercept),
                  fmt_float(fit.residual), fmt_float(predicted)]])


def write_phantom_csv(path, c: Phantom) -> None:
    write_rows(path, ["coordinate", "value"],
                ((fmt_float(x), fmt_float(v)) for x, v in zip(c.grid.points, c.values)))


def read_phantom_csv(path, grid: SpaceGrid, rtol: float = 1e-9) -> Phantom:
    """Read a phantom and check its coordinates against ``grid``."""
    _, header, rows = read_rows(path)
    if header != ["coordinate", "value"]:
        raise FormatError(f"{path}: expected header coordinate,value")
    try:
        x = np.array([float(r[0]) for r in rows])
        v = np.array([float(r[1]) for r in rows])
    except (ValueError, IndexError) as exc:
        raise FormatError(f"{path}: {exc}") from None
    if x.size != grid.n_points or np.max(np.abs(x - grid.points)) > rtol * (grid.right - grid.left):
        raise FormatError(
            f"{path}: coordinates do not match the {grid.n_points}-point grid "
            f"on [{grid.left}, {grid.right}]"
        )
    return Phantom(grid, v)


def write_signal_csv(path, s: Signal) -> None:
    seed = "none" if s.seed is None else str(s.seed)
    comment = f"noise={fmt_float(s.noise_level)} seed={seed}"
    first = "index" if s.kind == "freq" else "time"
    coords = s.coords if s.coords is not None else np.arange(s.samples.size, dtype=float)
    if s.kind == "freq":
        rows = ((int(n), fmt_float(v)) for n, v in zip(coords, s.samples))
    else:
        rows = ((fmt_float(t), fmt_float(v)) for t, v in zip(coords, s.samples))
    write_rows(path, [first, "value"], rows, comment)


def read_signal_csv(path) -> Signal:
    comments, header, rows = read_rows(path)
    if header not in (["time", "value"], ["index", "value"]):
        raise FormatError(f"{path}: expected header time,value or index,value")
    kind = "time" if header[0] == "time" else "freq"
    noise, seed = 0.0, None
    for c in comments:
        for part in c.split():
            key, _, val = part.partition("=")
            if key == "noise":
                noise = float(val)
            elif key == "seed" and val != "none":
                seed = int(val)
    try:
        coords = np.array([float(r[0]) for r in rows])
        vals = np.array([float(r[1]) for r in rows])
    except (ValueError, IndexError) as exc:
        raise FormatError(f"{path}: {exc}") from None
    return Signal(kind, vals, coords, noise, seed)


def write_matrix_csv(path, op: OperatorMatrix) -> None:
    """Plain dense dump, one matrix row per line (for sparsity pictures)."""
    buf = io.StringIO()
    for row in op.data:
        buf.write(",".join(fmt_float(v) for v in row))
        buf.write("\n")
    Path(path).write_text(buf.getvalue(), encoding="utf-8")
