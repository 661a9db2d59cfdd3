"""Levy symbol psi(xi) = int (e^{i xi y} - 1 - i xi y 1_{|y|<=1}) nu(dy) by quadrature.

For the symmetric families the compensator and the odd part of e^{i xi y}
cancel, so psi is real:

    psi(xi) = 2c int_0^R (cos(xi y) - 1) y^(-1-alpha) dy,

and an increment over time t has characteristic function exp(t psi(xi)).
"""
from __future__ import annotations

import logging
import math
import warnings

import numpy as np
from scipy import integrate

from levyns.core.errors import QuadratureError
from levyns.core.levy.measure import LevyMeasureSpec

logger = logging.getLogger(__name__)

DEFAULT_TOLERANCE = 1e-10


def _quad(func, lower, upper, what: str, tolerance: float, **kwargs) -> float:
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        result = integrate.quad(
            func, lower, upper, epsabs=tolerance, epsrel=tolerance, limit=500,
            full_output=1, **kwargs,
        )
    value, abserr = result[0], result[1]
    requested = max(tolerance, tolerance * abs(value))
    if len(result) > 3 and abserr > 1e3 * requested:
        raise QuadratureError(what, abserr, requested)
    return float(value)


def levy_symbol(
    measure: LevyMeasureSpec,
    xi: float,
    tolerance: float = DEFAULT_TOLERANCE,
) -> complex:
    """psi(xi) by adaptive quadrature; imaginary part zero for symmetric measures."""
    xi = abs(float(xi))
    if xi == 0.0:
        return 0j
    a = measure.alpha
    c = measure.intensity
    r = measure.radius
    inner_edge = min(1.0, r)

    # -2 sin^2(xi y / 2) avoids cancellation in cos(xi y) - 1 near y = 0
    def near(y: float) -> float:
        if y == 0.0:
            return 0.0
        return -2.0 * math.sin(0.5 * xi * y) ** 2 * y ** (-1.0 - a)

    total = _quad(near, 0.0, inner_edge, f"psi({xi:g}) on (0, {inner_edge:g}]", tolerance)

    if r > 1.0:
        def power(y: float) -> float:
            return y ** (-1.0 - a)

        upper = np.inf if math.isinf(r) else r
        oscillatory = _quad(
            power, 1.0, upper, f"psi({xi:g}) tail", tolerance, weight="cos", wvar=xi,
        )
        mass = (1.0 - (0.0 if math.isinf(r) else r ** (-a))) / a
        total += oscillatory - mass

    return complex(2.0 * c * total, 0.0)


def stable_char_exponent(measure: LevyMeasureSpec, xi: float) -> float:
    """Closed form psi(xi) = -K |xi|^alpha for the untruncated stable family."""
    return -measure.stable_constant() * abs(xi) ** measure.alpha


def increment_cf(measure: LevyMeasureSpec, xi: float, dt: float, beta: float = 1.0) -> complex:
    """E exp(i xi beta L_dt) = exp(dt psi(beta xi))."""
    return complex(np.exp(dt * levy_symbol(measure, beta * xi)))
