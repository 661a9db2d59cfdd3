"""Snapshot files: one spectral field per text file.

Format::

    # levy-ns field v1, n=<n>, theta=<theta>, t=<time>
    <j>,<kx>,<ky>,<c|s>,<lambda_j>,<a_j>
    ...

Floats are written with 17 significant digits so a read-back is bit-exact.
"""
from __future__ import annotations

import logging
import re
from pathlib import Path
from typing import Optional

import numpy as np

from levyns.core.constants import FLOAT_FORMAT, SNAPSHOT_HEADER
from levyns.core.spectral.basis import Phase, WaveVector, build_basis
from levyns.core.spectral.field import SpectralField

logger = logging.getLogger(__name__)

_HEADER_RE = re.compile(
    r"^# levy-ns field v1, n=(?P<n>\d+), theta=(?P<theta>[^,]+), t=(?P<t>\S+)\s*$"
)


def _fmt(value: float) -> str:
    return FLOAT_FORMAT.format(value)


def format_snapshot(u: SpectralField, theta: float, time: float) -> str:
    lines = [SNAPSHOT_HEADER.format(n=u.n, theta=_fmt(theta), time=_fmt(time))]
    for mode, a in zip(u.basis.modes, u.coefficients):
        lines.append(
            f"{mode.index},{mode.wave.kx},{mode.wave.ky},{mode.phase.symbol},"
            f"{_fmt(mode.eigenvalue)},{_fmt(a)}"
        )
    return "\n".join(lines) + "\n"


def write_snapshot(path: Path, u: SpectralField, theta: float, time: float) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(format_snapshot(u, theta, time), encoding="utf-8")
    return path


def read_snapshot(path: Path) -> tuple[SpectralField, float, float]:
    """Read a snapshot; returns (field, theta, time).

    Rows are matched to modes by (kx, ky, phase), so a file written for the
    canonical basis of size n always round-trips.
    """
    path = Path(path)
    text = path.read_text(encoding="utf-8").splitlines()
    if not text:
        raise ValueError(f"Empty snapshot file: {path}")
    header = _HEADER_RE.match(text[0])
    if header is None:
        raise ValueError(f"{path}:1: not a levy-ns field v1 header")
    n = int(header.group("n"))
    theta = float(header.group("theta"))
    time = float(header.group("t"))
    basis = build_basis(n)
    coeffs = np.zeros(n)
    seen = 0
    for lineno, line in enumerate(text[1:], start=2):
        if not line.strip():
            continue
        parts = line.split(",")
        if len(parts) != 6:
            raise ValueError(f"{path}:{lineno}: expected 6 columns, got {len(parts)}")
        wave = WaveVector(int(parts[1]), int(parts[2]))
        phase = Phase.from_symbol(parts[3])
        coeffs[basis.index_of(wave, phase) - 1] = float(parts[5])
        seen += 1
    if seen != n:
        raise ValueError(f"{path}: header declares n={n} but {seen} rows were read")
    logger.debug(f"Read snapshot {path} (n={n}, t={time})")
    return SpectralField(basis, coeffs), theta, time


def snapshot_name(step: int, directory: Optional[Path] = None) -> Path:
    name = f"snapshot_{step:08d}.csv"
    return Path(directory) / name if directory is not None else Path(name)
