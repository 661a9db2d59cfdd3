"""Divergence-free Fourier eigenbasis of the Stokes operator on the unit torus."""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from functools import cached_property, lru_cache

import numpy as np

logger = logging.getLogger(__name__)

FOUR_PI_SQ = 4.0 * math.pi ** 2


class Phase(Enum):
    """Trigonometric phase of a basis mode."""
    COSINE = "cosine"
    SINE = "sine"

    @property
    def symbol(self) -> str:
        """Single-letter tag used in snapshot files."""
        return "c" if self is Phase.COSINE else "s"

    @classmethod
    def from_symbol(cls, symbol: str) -> "Phase":
        symbols = {"c": cls.COSINE, "s": cls.SINE}
        try:
            return symbols[symbol.strip()]
        except KeyError:
            raise ValueError(f"Unknown phase symbol: {symbol!r}") from None

    @property
    def order(self) -> int:
        return 0 if self is Phase.COSINE else 1


@dataclass(frozen=True, order=True)
class WaveVector:
    """Fourier lattice index in canonical half-lattice form."""
    kx: int
    ky: int

    def __post_init__(self) -> None:
        if self.kx == 0 and self.ky == 0:
            raise ValueError("Wave vector (0, 0) carries the mean and is excluded")
        if not (self.ky > 0 or (self.ky == 0 and self.kx > 0)):
            raise ValueError(
                f"Wave vector ({self.kx}, {self.ky}) is not in canonical half-lattice form"
            )

    @classmethod
    def canonical(cls, kx: int, ky: int) -> "WaveVector":
        """Representative of the line {k, -k}."""
        if ky < 0 or (ky == 0 and kx < 0):
            kx, ky = -kx, -ky
        return cls(kx, ky)

    @property
    def norm_sq(self) -> int:
        return self.kx * self.kx + self.ky * self.ky

    @property
    def eigenvalue(self) -> float:
        return FOUR_PI_SQ * self.norm_sq

    @property
    def direction(self) -> tuple[float, float]:
        """Unit vector k_perp / |k|, orthogonal to the wave vector."""
        length = math.sqrt(self.norm_sq)
        return (-self.ky / length, self.kx / length)

    @property
    def perp(self) -> tuple[int, int]:
        """Integer vector k_perp = (-ky, kx); exactly orthogonal to (kx, ky)."""
        return (-self.ky, self.kx)


@dataclass(frozen=True)
class BasisMode:
    """One eigenfunction e_j = sqrt(2) * k_perp/|k| * trig(2 pi k.x)."""
    index: int
    wave: WaveVector
    phase: Phase

    @property
    def eigenvalue(self) -> float:
        return self.wave.eigenvalue

    @property
    def direction(self) -> tuple[float, float]:
        return self.wave.direction

    def sort_key(self) -> tuple[int, int, int, int]:
        # Eigenvalue order is |k|^2 order; integers keep ties exact.
        return (self.wave.norm_sq, self.wave.kx, self.wave.ky, self.phase.order)

    def to_dict(self) -> dict:
        return {
            "index": self.index,
            "kx": self.wave.kx,
            "ky": self.wave.ky,
            "phase": self.phase.symbol,
            "eigenvalue": self.eigenvalue,
        }


@dataclass(frozen=True)
class Basis:
    """The first n Stokes eigenmodes, ordered by eigenvalue with a fixed tie-break.

    Ordering: ascending lambda, then lexicographic (kx, ky), then cosine before sine.
    """
    modes: tuple[BasisMode, ...]
    _lookup: dict = field(default_factory=dict, init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        lookup = {(m.wave, m.phase): m.index for m in self.modes}
        object.__setattr__(self, "_lookup", lookup)

    @property
    def n(self) -> int:
        return len(self.modes)

    def __len__(self) -> int:
        return len(self.modes)

    def __iter__(self):
        return iter(self.modes)

    def mode(self, j: int) -> BasisMode:
        """Mode with 1-based index j."""
        if not 1 <= j <= self.n:
            raise IndexError(f"Mode index {j} outside 1..{self.n}")
        return self.modes[j - 1]

    def index_of(self, wave: WaveVector, phase: Phase) -> int:
        """1-based index of (wave, phase); KeyError when not in the basis."""
        return self._lookup[(wave, phase)]

    def restrict(self, m: int) -> "Basis":
        """Basis of the first m modes (the range of the projection onto m modes)."""
        if not 1 <= m <= self.n:
            raise ValueError(f"Cannot restrict a basis of size {self.n} to {m} modes")
        if m == self.n:
            return self
        return build_basis(m)

    @cached_property
    def eigenvalues(self) -> np.ndarray:
        values = np.array([m.eigenvalue for m in self.modes], dtype=float)
        values.setflags(write=False)
        return values

    @cached_property
    def wave_numbers(self) -> np.ndarray:
        """(n, 2) integer array of (kx, ky)."""
        waves = np.array([(m.wave.kx, m.wave.ky) for m in self.modes], dtype=np.int64)
        waves.setflags(write=False)
        return waves

    @cached_property
    def directions(self) -> np.ndarray:
        """(n, 2) array of unit directions k_perp / |k|."""
        dirs = np.array([m.direction for m in self.modes], dtype=float)
        dirs.setflags(write=False)
        return dirs

    @cached_property
    def is_sine(self) -> np.ndarray:
        mask = np.array([m.phase is Phase.SINE for m in self.modes], dtype=bool)
        mask.setflags(write=False)
        return mask

    @property
    def max_wavenumber(self) -> int:
        """Largest |kx| or |ky| present (the band limit per axis)."""
        return int(np.abs(self.wave_numbers).max())

    def waves(self) -> list[WaveVector]:
        """Distinct wave vectors in first-appearance order."""
        seen: dict[WaveVector, None] = {}
        for m in self.modes:
            seen.setdefault(m.wave, None)
        return list(seen)


def _half_lattice_within(radius_sq: int) -> list[WaveVector]:
    bound = math.isqrt(radius_sq)
    waves = []
    for ky in range(0, bound + 1):
        for kx in range(-bound, bound + 1):
            if kx * kx + ky * ky > radius_sq:
                continue
            if ky > 0 or (ky == 0 and kx > 0):
                waves.append(WaveVector(kx, ky))
    return waves


@lru_cache(maxsize=64)
def build_basis(n: int) -> Basis:
    """Return the first n Stokes eigenmodes on the torus (0,1]^2.

    Whole eigenvalue shells are enumerated before truncating so the tie-break
    is applied over complete shells.
    """
    if n < 1:
        raise ValueError(f"Basis size must be at least 1, got {n}")

    radius_sq = 1
    while True:
        waves = _half_lattice_within(radius_sq)
        if 2 * len(waves) >= n:
            break
        radius_sq *= 2

    candidates = [
        BasisMode(index=0, wave=w, phase=p) for w in waves for p in (Phase.COSINE, Phase.SINE)
    ]
    candidates.sort(key=BasisMode.sort_key)
    modes = tuple(
        BasisMode(index=j + 1, wave=m.wave, phase=m.phase)
        for j, m in enumerate(candidates[:n])
    )
    logger.debug(f"Built Stokes basis with {n} modes, max |k|^2 = {modes[-1].wave.norm_sq}")
    return Basis(modes=modes)
