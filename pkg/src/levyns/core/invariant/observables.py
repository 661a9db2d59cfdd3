"""Scalar observables of a Galerkin state and their registry."""
from __future__ import annotations

import logging
import math
from abc import ABC, abstractmethod
from dataclasses import dataclass
from enum import Enum
from typing import Callable, Optional

import numpy as np

from levyns.core.spectral.basis import Basis

logger = logging.getLogger(__name__)


class ObservableKind(Enum):
    """Families of observables Phi(u) sampled for the empirical measures."""
    L2_NORM = "l2"
    H1_NORM_THETA = "h1theta"
    MODE_COEFF = "mode"
    F_THETA = "ftheta"
    ENERGY_BAND = "band"

    @property
    def display_name(self) -> str:
        names = {
            ObservableKind.L2_NORM: "L2 norm",
            ObservableKind.H1_NORM_THETA: "Gradient norm to the theta",
            ObservableKind.MODE_COEFF: "Mode coefficient",
            ObservableKind.F_THETA: "f_theta",
            ObservableKind.ENERGY_BAND: "Energy band",
        }
        return names.get(self, self.value)

    @property
    def description(self) -> str:
        descriptions = {
            ObservableKind.L2_NORM: "||u||_0",
            ObservableKind.H1_NORM_THETA: "||grad u||_0^theta",
            ObservableKind.MODE_COEFF: "<u, e_j>_0 for one basis index j",
            ObservableKind.F_THETA: "(||u||_0^2 + 1)^(theta/2)",
            ObservableKind.ENERGY_BAND: "1/2 sum of a_j^2 over shells m1 <= |k| <= m2",
        }
        return descriptions.get(self, "Unknown observable")


class BaseObservable(ABC):
    """A functional Phi: H0_n -> R evaluated on coefficient vectors."""

    kind: ObservableKind
    # signed observables get an underflow bin as well as an overflow bin
    signed: bool = False

    @property
    def name(self) -> str:
        return self.kind.value

    @abstractmethod
    def evaluate(self, coefficients: np.ndarray, basis: Basis, theta: float) -> float:
        """Phi(u) for the state with the given coefficients."""

    def check(self, basis: Basis) -> None:
        """Raise ValueError if the observable is undefined on ``basis``."""

    def __repr__(self) -> str:
        return f"{type(self).__name__}({self.name!r})"


class L2NormObservable(BaseObservable):
    kind = ObservableKind.L2_NORM

    def evaluate(self, coefficients, basis, theta):
        return float(np.sqrt(np.dot(coefficients, coefficients)))


class H1ThetaObservable(BaseObservable):
    kind = ObservableKind.H1_NORM_THETA

    def evaluate(self, coefficients, basis, theta):
        return float(np.dot(basis.eigenvalues * coefficients, coefficients) ** (theta / 2.0))


class FThetaObservable(BaseObservable):
    kind = ObservableKind.F_THETA

    def evaluate(self, coefficients, basis, theta):
        return float((np.dot(coefficients, coefficients) + 1.0) ** (theta / 2.0))


class ModeCoeffObservable(BaseObservable):
    kind = ObservableKind.MODE_COEFF
    signed = True

    def __init__(self, j: int) -> None:
        if j < 1:
            raise ValueError(f"Mode index must be at least 1, got {j}")
        self.j = j

    @property
    def name(self) -> str:
        return f"mode:{self.j}"

    def check(self, basis):
        if self.j > basis.n:
            raise ValueError(f"Observable {self.name} needs n >= {self.j}, got n={basis.n}")

    def evaluate(self, coefficients, basis, theta):
        return float(coefficients[self.j - 1])


class EnergyBandObservable(BaseObservable):
    """Kinetic energy 0.5 * sum a_j^2 of the modes with m1 <= |k| <= m2."""

    kind = ObservableKind.ENERGY_BAND

    def __init__(self, m1: float, m2: float) -> None:
        if not 0 < m1 <= m2:
            raise ValueError(f"Band needs 0 < m1 <= m2, got {m1}, {m2}")
        self.m1 = m1
        self.m2 = m2
        self._masks: dict[int, np.ndarray] = {}

    @property
    def name(self) -> str:
        return f"band:{self.m1:g}:{self.m2:g}"

    def _mask(self, basis: Basis) -> np.ndarray:
        mask = self._masks.get(basis.n)
        if mask is None:
            k = np.sqrt(basis.eigenvalues) / (2.0 * math.pi)
            mask = (k >= self.m1 - 1e-9) & (k <= self.m2 + 1e-9)
            self._masks[basis.n] = mask
        return mask

    def check(self, basis):
        if not self._mask(basis).any():
            logger.warning(f"Observable {self.name} selects no modes of the n={basis.n} basis")

    def evaluate(self, coefficients, basis, theta):
        a = coefficients[self._mask(basis)]
        return float(0.5 * np.dot(a, a))


ObservableFactory = Callable[[tuple[str, ...]], BaseObservable]


@dataclass(frozen=True)
class ObservableSpec:
    """Parsed observable token such as ``l2``, ``mode:3`` or ``band:2:4``."""
    kind: ObservableKind
    params: tuple[str, ...] = ()

    @classmethod
    def parse(cls, token: str) -> "ObservableSpec":
        parts = [p.strip() for p in token.strip().split(":")]
        try:
            kind = ObservableKind(parts[0])
        except ValueError:
            known = ", ".join(k.value for k in ObservableKind)
            raise ValueError(f"Unknown observable {token!r} (known: {known})") from None
        return cls(kind, tuple(parts[1:]))

    @property
    def token(self) -> str:
        return ":".join((self.kind.value, *self.params))


def _no_params(factory: Callable[[], BaseObservable], kind: ObservableKind) -> ObservableFactory:
    def build(params: tuple[str, ...]) -> BaseObservable:
        if params:
            raise ValueError(f"Observable {kind.value} takes no parameters")
        return factory()
    return build


def _mode(params: tuple[str, ...]) -> BaseObservable:
    if len(params) != 1:
        raise ValueError("Observable mode takes one index, as in mode:3")
    return ModeCoeffObservable(int(params[0]))


def _band(params: tuple[str, ...]) -> BaseObservable:
    if len(params) != 2:
        raise ValueError("Observable band takes two shell radii, as in band:2:4")
    return EnergyBandObservable(float(params[0]), float(params[1]))


class ObservableRegistry:
    """Registry for the observable families known to the invariant-measure tools."""

    def __init__(self) -> None:
        self._factories: dict[ObservableKind, ObservableFactory] = {}
        self._register_default_observables()

    def _register_default_observables(self) -> None:
        self.register(ObservableKind.L2_NORM, _no_params(L2NormObservable, ObservableKind.L2_NORM))
        self.register(
            ObservableKind.H1_NORM_THETA, _no_params(H1ThetaObservable, ObservableKind.H1_NORM_THETA)
        )
        self.register(ObservableKind.F_THETA, _no_params(FThetaObservable, ObservableKind.F_THETA))
        self.register(ObservableKind.MODE_COEFF, _mode)
        self.register(ObservableKind.ENERGY_BAND, _band)

    def register(self, kind: ObservableKind, factory: ObservableFactory) -> None:
        self._factories[kind] = factory
        logger.info(f"Registered observable: {kind.value}")

    def get(self, kind: ObservableKind) -> Optional[ObservableFactory]:
        return self._factories.get(kind)

    def kinds(self) -> list[ObservableKind]:
        return list(self._factories)

    def build(self, spec: ObservableSpec | str) -> BaseObservable:
        if isinstance(spec, str):
            spec = ObservableSpec.parse(spec)
        factory = self.get(spec.kind)
        if factory is None:
            raise ValueError(f"No observable registered for {spec.kind.value}")
        return factory(spec.params)

    def parse_list(self, text: str) -> list[BaseObservable]:
        """Comma-separated tokens, e.g. ``l2,h1theta,mode:1``; duplicates are dropped."""
        observables: dict[str, BaseObservable] = {}
        for token in text.split(","):
            if token.strip():
                observable = self.build(token)
                observables.setdefault(observable.name, observable)
        if not observables:
            raise ValueError("No observables given")
        return list(observables.values())


# Global observable registry instance
observable_registry = ObservableRegistry()
