"""Buckley-Leverett displacement along a fracture with the Welge tangent."""

from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from fracflow.closure import (
    SATURATION_EPS,
    FluidProps,
    SaturationFunctions,
    detach_closure,
    fractional_flow,
    physical_saturation,
)
from fracflow.fdsim.exceptions import WelgeConstructionError

WELGE_TOLERANCE = 1e-10
_GRID_POINTS = 2001


@dataclass(frozen=True)
class WelgeShock:
    """Shock on the normalized saturation axis.

    ``speed`` is f_w(S_f)/S_f, the slope of the tangent from the origin.
    """

    saturation: float
    fw: float
    speed: float


def total_velocity(f: SaturationFunctions, K_F: float, mu_w: float, dp: float, length: float) -> float:
    """Darcy velocity of water at end-point mobility under a linear pressure drop."""
    return float(K_F) * float(f.corey.krw_max) / mu_w * dp / length


def dfw_dS(S, f: SaturationFunctions, fl: FluidProps):
    """Analytic derivative of f_w with respect to normalized saturation on (0, 1)."""
    c = f.corey
    S = np.asarray(S, dtype=float)
    n_w = c.n_w1 * S + c.n_w2 * (1.0 - S)
    n_nw = c.n_nw1 * S + c.n_nw2 * (1.0 - S)
    krw = c.krw_max * S ** n_w
    krnw = c.krnw_max * (1.0 - S) ** n_nw
    dkrw = krw * ((c.n_w1 - c.n_w2) * np.log(S) + n_w / S)
    dkrnw = krnw * ((c.n_nw1 - c.n_nw2) * np.log(1.0 - S) - n_nw / (1.0 - S))
    a, b = krw / fl.mu_w, krnw / fl.mu_nw
    da, db = dkrw / fl.mu_w, dkrnw / fl.mu_nw
    return (da * b - a * db) / (a + b) ** 2


def welge_shock(f: SaturationFunctions, fl: FluidProps, tol: float = WELGE_TOLERANCE) -> WelgeShock:
    """Locate the shock where the tangent from (0, 0) touches f_w.

    Finds the root of g(S) = f_w'(S) - f_w(S)/S. A curve that stays convex (or is
    linear) gives a piston-like front at S = 1.

    Raises:
        WelgeConstructionError: If f_w is not convex near S = 0
    """
    f = detach_closure(f)
    S = np.linspace(SATURATION_EPS, 1.0 - SATURATION_EPS, _GRID_POINTS)
    g = dfw_dS(S, f, fl) - fractional_flow(S, f, fl) / S
    scale = max(1.0, float(np.max(np.abs(dfw_dS(S, f, fl)))))
    small = 1e-9 * scale

    if np.all(np.abs(g) <= small) or np.all(g > -small):
        fw = float(fractional_flow(1.0, f, fl))
        return WelgeShock(saturation=1.0, fw=fw, speed=fw)
    if g[0] <= small:
        raise WelgeConstructionError(
            f"fractional flow is not convex near S=0 (g={g[0]:.3e}); no Welge tangent"
        )

    i = int(np.argmax(g <= 0.0))
    s_f = float(brentq(
        lambda s: float(dfw_dS(s, f, fl) - fractional_flow(s, f, fl) / s), S[i - 1], S[i], xtol=tol,
    ))
    fw = float(fractional_flow(s_f, f, fl))
    return WelgeShock(saturation=s_f, fw=fw, speed=fw / s_f)


def _window(f: SaturationFunctions) -> float:
    return 1.0 - f.corey.s_wc - f.corey.s_nwr


def shock_position(f: SaturationFunctions, fl: FluidProps, u_t: float, porosity: float, t: float) -> float:
    """Distance travelled by the shock after time ``t`` (m)."""
    f = detach_closure(f)
    shock = welge_shock(f, fl)
    return u_t / porosity * shock.speed / _window(f) * t


def bl_saturation(
    f: SaturationFunctions,
    fl: FluidProps,
    xi,
) -> np.ndarray:
    """Normalized saturation as a function of the similarity variable.

    ``xi`` is x * phi / (u_t * t), so that behind the shock
    xi = df_w/ds_w with the derivative taken in physical saturation.
    """
    f = detach_closure(f)
    xi = np.asarray(xi, dtype=float)
    shock = welge_shock(f, fl)
    window = _window(f)
    xi_front = shock.speed / window

    S = np.zeros_like(xi)
    behind = xi < xi_front
    if shock.saturation >= 1.0:
        S[behind] = 1.0
        return S

    s_table = np.linspace(shock.saturation, 1.0 - SATURATION_EPS, _GRID_POINTS)
    slope = dfw_dS(s_table, f, fl) / window
    # Slope decreases behind the shock; np.interp needs ascending abscissae
    S[behind] = np.interp(xi[behind], slope[::-1], s_table[::-1], left=1.0, right=shock.saturation)
    return S


def bl_profile(
    f: SaturationFunctions,
    fl: FluidProps,
    u_t: float,
    porosity: float,
    t: float,
    x,
) -> np.ndarray:
    """Physical water saturation along ``x`` at time ``t`` for a water flood.

    The initial state ahead of the front is s_wc.
    """
    f = detach_closure(f)
    x = np.asarray(x, dtype=float)
    if t <= 0.0 or u_t <= 0.0:
        return np.full(x.shape, f.corey.s_wc)
    xi = x * porosity / (u_t * t)
    S = bl_saturation(f, fl, xi)
    return physical_saturation(S, f.corey.s_wc, f.corey.s_nwr)
